"""Surfaces of revolution: lifts, rotational symmetry, seed solver,
meridian propagation, and the cmc constructor."""

import numpy as np
import pytest

from isothermic import catalog
from isothermic.conserved import mean_curvature_data, pcq_verify
from isothermic.errors import (
    AxisPoint,
    ConstraintViolated,
    DegenerateBasis,
    InfinityBoundary,
    RepeatedPoint,
)
from isothermic.minkowski import (
    hyperbolic_point,
    inner3,
    norm3,
    profile_coordinates,
)
from isothermic.nets import moutard_check, verify_isothermic
from isothermic.revolution import (
    Meridian,
    RotationProfile,
    build_revolution_cmc,
    meridian_step,
    revolution_lift,
    seed_edge,
    symmetric_pcq_check,
)
from isothermic.transforms import complementary

Q_FLAT = np.array([1.0, 0.0, -1.0])
Q_HYP = np.array([0.0, 0.0, 1.0])
Q_SPH = np.array([1.0, 0.0, 0.0])


def admissible_seed(rng, Q, H, tries=200):
    for _ in range(tries):
        eta0, eta1 = rng.uniform(-0.5, 0.5, 2)
        rho0, rho1 = rng.uniform(0.5, 1.5, 2)
        try:
            M0 = hyperbolic_point(eta0, rho0)
            M1 = hyperbolic_point(eta1, rho1)
            if np.linalg.norm(M1 - M0) < 0.05:
                continue
            sols = seed_edge(Q, H, M0, M1)
        except (InfinityBoundary, DegenerateBasis, ConstraintViolated):
            continue
        return M0, M1, sols
    raise AssertionError("no admissible seed found")


def test_revolution_lift_cylinder_weights():
    net = revolution_lift(0.4 * np.arange(4), np.ones(4),
                          RotationProfile.uniform(4, np.pi / 2))
    np.testing.assert_allclose(net.weights.u, 0.08, atol=1e-15)
    np.testing.assert_allclose(net.weights.v, -1.0, atol=1e-15)
    assert moutard_check(net.lifts)[0]
    assert verify_isothermic(net.lifts).ok


def test_revolution_lift_cross_ratio_closed_form(rng):
    eta = np.array([0.0, 0.3, 0.5, 0.9])
    rho = np.array([1.0, 1.2, 0.8, 1.0])
    phi = np.array([0.0, 0.7, 1.2, 2.1])
    net = revolution_lift(eta, rho, phi)
    for face in net.domain.faces():
        (m, n) = face[0]
        q = net.face_cross_ratio(face)
        de, dr, dp = eta[m + 1] - eta[m], rho[m + 1] - rho[m], phi[n + 1] - phi[n]
        expected = -(de * de + dr * dr) / (4 * rho[m] * rho[m + 1]
                                           * np.sin(dp / 2.0) ** 2)
        assert q == pytest.approx(expected, rel=1e-11)


def test_revolution_lift_validation():
    with pytest.raises(AxisPoint):
        revolution_lift(np.array([0.0, 0.3]), np.array([1.0, -0.2]),
                        RotationProfile.uniform(3, 0.5))
    with pytest.raises(RepeatedPoint):
        revolution_lift(np.array([0.0, 0.0]), np.array([1.0, 1.0]),
                        RotationProfile.uniform(3, 0.5))
    with pytest.raises(RepeatedPoint):
        RotationProfile(np.array([0.0, 2.0 * np.pi]))


def test_symmetric_pcq_check():
    net, cq = build_revolution_cmc(Q_SPH, 0.3, hyperbolic_point(0.1, 0.9),
                                   hyperbolic_point(0.4, 1.0), 2,
                                   RotationProfile.uniform(5, 0.9))
    assert symmetric_pcq_check(net, cq)

    # a quantity whose ambient vector has a rotation-plane component is not
    # rotationally symmetric
    patch = catalog.cylinder_net(5, 3, 0.3, np.pi / 4, n_start=-1)
    zz = catalog.zigzag_quantity_on(patch)
    assert not symmetric_pcq_check(patch, zz)
    # the cylinder's own quantity (flat ambient vector) is symmetric
    assert symmetric_pcq_check(patch, catalog.cylinder_quantity(patch))


def test_seed_edge_minimal_has_single_factor(rng):
    count = 0
    for _ in range(40):
        try:
            _, _, sols = admissible_seed(rng, Q_HYP, 0.0, tries=50)
        except AssertionError:
            continue
        count += 1
        assert len(sols) == 1
        assert sols[0].alpha > 0
    assert count >= 20


def test_seed_edge_generic_two_solutions(rng):
    M0, M1, sols = admissible_seed(rng, Q_FLAT, 0.35)
    assert len(sols) == 2
    for sol in sols:
        assert abs(float(norm3(sol.sphere0)) - 1.0) < 1e-9
        assert abs(float(norm3(sol.sphere1)) - 1.0) < 1e-9
        meridian = Meridian(np.stack([M0, M1]), np.stack([sol.sphere0, sol.sphere1]),
                            Q_FLAT, sol.alpha, sol.edge_weight, 0.35)
        assert meridian.validate() < 1e-9


def test_seed_edge_constraint_violated():
    M0 = hyperbolic_point(0.2, 0.8)
    M1 = hyperbolic_point(0.45, 0.9)
    with pytest.raises(ConstraintViolated):
        seed_edge(Q_SPH, 50.0, M0, M1)  # C^2 H^2 > A


def test_seed_edge_boundary_and_basis_errors():
    with pytest.raises(InfinityBoundary):
        seed_edge(Q_HYP, 0.0, hyperbolic_point(0.0, 1.0), hyperbolic_point(0.3, 1.1))
    # Q parallel to the span of M0, M1 (all three in one Lorentz plane)
    M0 = hyperbolic_point(0.0, 1.0)
    M1 = hyperbolic_point(0.3, 1.0)
    with pytest.raises(DegenerateBasis):
        seed_edge(M0 + M1, 0.2, M0, M1)


def test_meridian_step_postconditions():
    M0 = hyperbolic_point(0.0, 1.0)
    M1 = hyperbolic_point(0.3, 1.1)
    H = 0.35
    sols = seed_edge(Q_FLAT, H, M0, M1)
    sol = sols[0]
    kappa = -float(norm3(Q_FLAT))
    M2, S2 = meridian_step((M1, sol.sphere1), Q_FLAT, sol.alpha, sol.edge_weight,
                           H, kappa, prev=M0)
    target = -(1.0 + sol.edge_weight / sol.alpha)
    assert float(inner3(M2, M1)) == pytest.approx(target, rel=1e-11)
    assert float(norm3(M2)) == pytest.approx(-1.0, abs=1e-11)
    assert float(norm3(S2)) == pytest.approx(1.0, abs=1e-10)
    # the discarded branch is the predecessor: stepping back returns M0, S0
    M3, S3 = meridian_step((M2, S2), Q_FLAT, sol.alpha, sol.edge_weight,
                           H, kappa, prev=M1)
    back_M, back_S = meridian_step((M2, S2), Q_FLAT, sol.alpha, sol.edge_weight,
                                   H, kappa, prev=M3)
    np.testing.assert_allclose(back_M, M1, atol=1e-10)
    np.testing.assert_allclose(back_S, sol.sphere1, atol=1e-10)
    back2_M, back2_S = meridian_step((M1, sol.sphere1), Q_FLAT, sol.alpha,
                                     sol.edge_weight, H, kappa, prev=M2)
    np.testing.assert_allclose(back2_M, M0, atol=1e-10)
    np.testing.assert_allclose(back2_S, sol.sphere0, atol=1e-10)


def test_meridian_step_degenerate_gate():
    M0 = hyperbolic_point(0.0, 1.0)
    M1 = hyperbolic_point(0.3, 1.1)
    H = 0.35
    sol = seed_edge(Q_FLAT, H, M0, M1)[0]
    c = sol.edge_weight
    kappa_degenerate = (1.0 - 2.0 * c * H) / (c * c)
    with pytest.raises(ConstraintViolated, match="alternate"):
        meridian_step((M1, sol.sphere1), Q_FLAT, sol.alpha, c, H,
                      kappa_degenerate, prev=M0)


def test_build_reproduces_cylinder():
    # seeding on the unit cylinder with H = 1/2 and the flat ambient vector
    # continues the cylinder: the meridian radius stays exactly one
    eta_step = 0.3
    M0 = hyperbolic_point(0.0, 1.0)
    M1 = hyperbolic_point(eta_step, 1.0)
    sols = seed_edge(Q_FLAT, 0.5, M0, M1)
    alphas = [s.alpha for s in sols]
    branch = int(np.argmin(np.abs(np.array(alphas) + 0.5)))
    assert alphas[branch] == pytest.approx(-0.5, abs=1e-12)
    net, cq = build_revolution_cmc(Q_FLAT, 0.5, M0, M1, 4,
                                   RotationProfile.uniform(6, 0.9), branch=branch)
    eta, rho = profile_coordinates(net.revolution.meridian_points)
    np.testing.assert_allclose(rho, 1.0, atol=1e-10)
    np.testing.assert_allclose(np.diff(eta), eta_step, atol=1e-10)
    H, kappa = mean_curvature_data(cq)
    assert H == pytest.approx(0.5, abs=1e-12)
    assert kappa == pytest.approx(0.0, abs=1e-12)


@pytest.mark.filterwarnings("ignore:meridian crossed")
def test_build_hyperbolic_catenoid():
    # minimal net of revolution in hyperbolic space (no real complementary
    # nets): the discrete counterpart of a catenoid-like minimal surface
    net, cq = build_revolution_cmc(Q_HYP, 0.0, hyperbolic_point(0.1, 0.7),
                                   hyperbolic_point(0.35, 0.8), 3,
                                   RotationProfile.uniform(7, 0.8))
    assert verify_isothermic(net.lifts).ok
    assert pcq_verify(net, cq).max_residual < 1e-8
    H, kappa = mean_curvature_data(cq)
    assert H == pytest.approx(0.0, abs=1e-12)
    assert kappa == pytest.approx(-1.0, abs=1e-12)
    assert complementary(cq) == []
    assert symmetric_pcq_check(net, cq)


def test_build_spherical_candidate_torus():
    # H^2 + kappa > 0 in a spherical ambient: closure is reported as a
    # defect, not solved for
    net, cq = build_revolution_cmc(Q_SPH, 0.3, hyperbolic_point(0.1, 0.9),
                                   hyperbolic_point(0.4, 1.0), 5,
                                   RotationProfile.uniform(8, 2 * np.pi / 8))
    H, kappa = mean_curvature_data(cq)
    assert (H, kappa) == (pytest.approx(0.3, abs=1e-12), pytest.approx(1.0, abs=1e-12))
    assert len(complementary(cq)) == 2
    # meridian closure defect: distance between first and last samples
    pts = net.revolution.meridian_points
    defect = float(np.linalg.norm(pts[-1] - pts[0]))
    assert np.isfinite(defect)


def test_build_invariants_meridian_weight_constant():
    net, cq = build_revolution_cmc(Q_SPH, 0.3, hyperbolic_point(0.1, 0.9),
                                   hyperbolic_point(0.4, 1.0), 3,
                                   RotationProfile.uniform(5, 0.9))
    # meridian edge weight is the constant c and the propagation gate is
    # edge independent
    u = net.weights.u
    np.testing.assert_allclose(u, u[0], rtol=1e-10)
    H, kappa = mean_curvature_data(cq)
    gate = 1.0 - 2.0 * u[0] * H - u[0] ** 2 * kappa
    assert gate > 0
    # sphere curve consistency: stepping from the seed reproduces the data
    # used to assemble the net (validated internally); |S| = 1 throughout
    M = net.revolution.meridian_points
    assert np.abs(norm3(M) + 1.0).max() < 1e-10


def test_complementary_count_matches_invariant_sign():
    cases = [
        (Q_SPH, 0.3, 2),   # H^2 + kappa > 0
        (Q_HYP, 1.0, 1),   # H^2 + kappa = 0
        (Q_HYP, 0.0, 0),   # H^2 + kappa < 0
    ]
    for Q, H, count in cases:
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            net, cq = build_revolution_cmc(Q, H, hyperbolic_point(0.2, 0.8),
                                           hyperbolic_point(0.45, 0.9), 2,
                                           RotationProfile.uniform(5, 0.9))
        assert len(complementary(cq)) == count


def test_meridian_crossing_warns():
    # crossing the infinity boundary is allowed and announced
    with pytest.warns(UserWarning, match="infinity boundary"):
        build_revolution_cmc(Q_HYP, 0.0, hyperbolic_point(0.1, 0.7),
                             hyperbolic_point(0.35, 0.8), 3,
                             RotationProfile.uniform(5, 0.8))


def test_seed_and_step_consistent():
    # stepping forward from the seed start reproduces the seed end
    M0 = hyperbolic_point(0.1, 0.9)
    M1 = hyperbolic_point(0.4, 1.0)
    H = 0.3
    sol = seed_edge(Q_SPH, H, M0, M1)[0]
    kappa = -float(norm3(Q_SPH))
    M1b, S1b = meridian_step((M0, sol.sphere0), Q_SPH, sol.alpha,
                             sol.edge_weight, H, kappa, prev=None)
    if np.linalg.norm(M1b - M1) > 1e-6:
        # the orientation convention picked the other branch; force it by
        # discarding the branch just found
        M1b, S1b = meridian_step((M0, sol.sphere0), Q_SPH, sol.alpha,
                                 sol.edge_weight, H, kappa, prev=M1b)
    np.testing.assert_allclose(M1b, M1, atol=1e-10)
    np.testing.assert_allclose(S1b, sol.sphere1, atol=1e-10)


def test_closure_defect_report():
    from isothermic.revolution import closure_defect

    net, _ = build_revolution_cmc(Q_SPH, 0.3, hyperbolic_point(0.1, 0.9),
                                  hyperbolic_point(0.4, 1.0), 2,
                                  RotationProfile.uniform(8, 2 * np.pi / 8))
    defect = closure_defect(net)
    assert defect["angle_defect"] == pytest.approx(0.0, abs=1e-12)
    assert defect["meridian_gap"] > 0
