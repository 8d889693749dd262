"""Polynomial conserved quantities of discrete isothermic nets.

A conserved quantity attaches to every vertex a polynomial P(lam) with
5-vector coefficients such that, on every edge (ij),

    dP_ij(lam) = (lam * a_ij / <F_i, F_j>) * ( <P_j, F_j> F_i - <P_i, F_i> F_j ).

Consequences used throughout: the constant coefficient is the same vector
at every vertex (it defines the ambient space form), |P(lam)|^2 depends on
lam only, and the top coefficient is orthogonal to the net's lifts.  Linear
quantities lam*Z + Q with |Z|^2 = 1 carry the geometry of constant mean
curvature: H = -<Z, Q> and ambient curvature kappa = -|Q|^2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateTop,
    NonzeroRoot,
    NotConserved,
    SingularSystem,
    SphericalStar,
)
from .grids import VertexField, propagation_order
from .minkowski import SIGNATURE, minkowski_inner, norm2, solve_dense
from .nets import IsothermicNet
from .polyvec import (
    mp_eval,
    mp_inner_vec,
    mp_max_coeff,
    mp_norm_poly,
    mp_scale_arg,
)
from .tolerances import tol


class ConservedQuantity:
    """Vertex field of polynomials of a common degree, bound to a net."""

    def __init__(self, net: IsothermicNet, coeffs, *, check: bool = True):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape[:2] != (net.domain.rows, net.domain.cols) or coeffs.shape[3:] != (5,):
            raise ValueError("coefficient array must have shape (rows, cols, deg+1, 5)")
        self.net = net
        self.coeffs = coeffs
        if check:
            self._check_invariants()

    # -- basic accessors ------------------------------------------------

    @property
    def degree(self) -> int:
        return self.coeffs.shape[2] - 1

    def at(self, v) -> np.ndarray:
        mi, ni = self.net.domain.index(v)
        return self.coeffs[mi, ni]

    def evaluate(self, lam: float) -> VertexField:
        return VertexField(self.net.domain, mp_eval(self.coeffs, lam))

    @property
    def top(self) -> VertexField:
        """Field of leading coefficients."""
        return VertexField(self.net.domain, self.coeffs[:, :, -1, :].copy())

    @property
    def constant(self) -> np.ndarray:
        """The (vertex-independent) constant coefficient."""
        return self.coeffs[:, :, 0, :].mean(axis=(0, 1))

    def scale(self) -> float:
        return 1.0 + mp_max_coeff(self.coeffs)

    def scaled(self, factor: float) -> "ConservedQuantity":
        return ConservedQuantity(self.net, self.coeffs * factor, check=False)

    # -- invariants -----------------------------------------------------

    def _check_invariants(self):
        s = self.scale()
        q_spread = np.abs(self.coeffs[:, :, 0, :] - self.constant).max()
        if q_spread > tol(s):
            raise NotConserved(f"constant coefficient varies over vertices ({q_spread:.3g})")
        np_all = mp_norm_poly(self.coeffs)
        spread = np.abs(np_all - np_all.mean(axis=(0, 1))).max()
        if spread > tol(s * s):
            raise NotConserved(f"|P|^2 varies over vertices ({spread:.3g})")
        inc = np.abs((self.coeffs[:, :, -1, :] * SIGNATURE * self.net.lifts.data).sum(-1))
        if inc.max() > tol(s * self.net.lift_scale()):
            raise NotConserved(f"top coefficient not orthogonal to the net ({inc.max():.3g})")
        if np_all[..., -1].min() < -tol(s * s):
            raise NotConserved("top coefficient has negative Minkowski square")

    def norm_poly(self) -> np.ndarray:
        """Coefficients of |P(lam)|^2 (asserts vertex independence)."""
        np_all = mp_norm_poly(self.coeffs)
        mean = np_all.mean(axis=(0, 1))
        spread = float(np.abs(np_all - mean).max())
        if spread > tol(self.scale() ** 2):
            raise NotConserved(f"|P|^2 varies over vertices ({spread:.3g})")
        return mean

    def top_norm2(self) -> float:
        return float(self.norm_poly()[-1])


def pcq_residual(net: IsothermicNet, coeffs) -> float:
    """Worst coefficientwise residual of the edge condition, relative to the
    coefficient scale."""
    coeffs = np.asarray(coeffs, dtype=float)
    k = coeffs.shape[2]
    scale = 1.0 + mp_max_coeff(coeffs)
    dom = net.domain
    worst = 0.0
    for i, j in dom.edges():
        ci = coeffs[dom.index(i)]
        cj = coeffs[dom.index(j)]
        Fi, Fj = net.lifts[i], net.lifts[j]
        a = net.weight((i, j))
        g = float(minkowski_inner(Fi, Fj))
        pii = mp_inner_vec(ci, Fi)  # <P_i, F_i>(lam)
        pjj = mp_inner_vec(cj, Fj)
        resid = np.zeros((k + 1, 5))
        resid[:k] = cj - ci
        resid[1:] -= (a / g) * (np.outer(pjj, Fi) - np.outer(pii, Fj))
        worst = max(worst, float(np.abs(resid).max()) / scale)
    return worst


@dataclass
class VerifyReport:
    ok: bool
    max_residual: float


def pcq_verify(net: IsothermicNet, quantity) -> VerifyReport:
    """Report-only check of the conserved-quantity edge condition."""
    coeffs = quantity.coeffs if isinstance(quantity, ConservedQuantity) else quantity
    r = pcq_residual(net, coeffs)
    return VerifyReport(r <= tol(1.0), r)


def pcq_propagate(net: IsothermicNet, seed, basepoint=None) -> ConservedQuantity:
    """Extend a seed polynomial at the basepoint to a conserved quantity by
    parallel transport through the edge connections.

    On each edge the transported polynomial stays polynomial only if an
    exact division by (1 - lam * a_ij) succeeds; a residual there, degree
    growth, or path dependence on the redundant edges means the seed value
    is wrong or the net has no such quantity.

    Raises
    ------
    NotConserved
    """
    dom = net.domain
    if basepoint is None:
        basepoint = dom.center()
    seed = np.asarray(seed, dtype=float)
    if seed.ndim != 2 or seed.shape[1] != 5:
        raise ValueError("seed must have shape (deg+1, 5)")
    k = seed.shape[0]
    coeffs = np.zeros((dom.rows, dom.cols, k, 5))
    coeffs[dom.index(basepoint)] = seed
    scale = 1.0 + mp_max_coeff(seed)

    lift_scale = net.lift_scale()

    def transport(src, dst):
        ci = coeffs[dom.index(src)]
        Fi, Fj = net.lifts[src], net.lifts[dst]
        a = net.weight((src, dst))
        g = float(minkowski_inner(Fi, Fj))
        s_poly = mp_inner_vec(ci, Fj)  # real coefficients of <P_src(lam), F_dst>
        # exact division by (1 - a*lam) gives <P_dst, F_dst>
        p_dst = np.zeros(max(k - 1, 1))
        carry = 0.0
        for idx in range(k - 1):
            carry = s_poly[idx] + a * carry
            p_dst[idx] = carry
        rem = s_poly[k - 1] + a * carry if k > 1 else s_poly[0]
        if abs(rem) > tol(scale * lift_scale):
            raise NotConserved(
                f"transport across {(src, dst)} is not polynomial "
                f"(division remainder {abs(rem):.3g})")
        p_src = mp_inner_vec(ci, Fi)
        if abs(p_src[k - 1]) > tol(scale * lift_scale):
            raise NotConserved(
                f"transport across {(src, dst)} raises the degree "
                f"(top incidence defect {abs(p_src[k - 1]):.3g})")
        add = np.zeros((k, 5))
        if k > 1:
            add[1:] += np.outer(p_dst[: k - 1], Fi)
            add[1:] -= np.outer(p_src[: k - 1], Fj)
        coeffs[dom.index(dst)] = ci + (a / g) * add

    tree, cross = propagation_order(dom, basepoint)
    for parent, child in tree:
        transport(parent, child)
    worst = 0.0
    for i, j in cross:
        saved = coeffs[dom.index(j)].copy()
        transport(i, j)
        worst = max(worst, float(np.abs(coeffs[dom.index(j)] - saved).max()))
        coeffs[dom.index(j)] = saved
    if worst > tol(scale):
        raise NotConserved(f"path dependence {worst:.3g} during propagation")
    return ConservedQuantity(net, coeffs)


def degree_reduce(cq: ConservedQuantity, mu: float) -> ConservedQuantity:
    """Divide out a common root: P(mu) must vanish at every vertex
    (it vanishes globally as soon as it vanishes anywhere).

    Raises
    ------
    NonzeroRoot
    """
    values = mp_eval(cq.coeffs, mu)
    worst = float(np.sqrt((values * values).sum(-1)).max())
    if worst > tol(cq.scale() * (1.0 + abs(mu)) ** cq.degree):
        raise NonzeroRoot(f"|P({mu})| = {worst:.3g} is not a root")
    k = cq.coeffs.shape[2]
    if k < 2:
        raise NonzeroRoot("cannot reduce a constant quantity")
    out = np.zeros((cq.coeffs.shape[0], cq.coeffs.shape[1], k - 1, 5))
    carry = cq.coeffs[:, :, k - 1, :]
    for j in range(k - 2, -1, -1):
        out[:, :, j, :] = carry
        carry = cq.coeffs[:, :, j, :] + mu * carry
    return ConservedQuantity(cq.net, out)


def norm_poly(cq: ConservedQuantity) -> np.ndarray:
    """Vertex-independent coefficients of |P(lam)|^2 (ascending)."""
    return cq.norm_poly()


def reparametrize(cq: ConservedQuantity, alpha: float) -> ConservedQuantity:
    """Rescale the spectral parameter: P(alpha * lam) is conserved for the
    same net with edge weights alpha * a."""
    if alpha == 0.0:
        raise ValueError("alpha must be nonzero")
    new_net = cq.net.with_weights(cq.net.weights.scaled(alpha))
    return ConservedQuantity(new_net, mp_scale_arg(cq.coeffs, alpha))


def normalize_top(cq: ConservedQuantity) -> ConservedQuantity:
    """Scale so the top coefficient has unit Minkowski square.

    Raises
    ------
    DegenerateTop
        If |top|^2 vanishes (the top is then a lift of the net itself).
    """
    t2 = cq.top_norm2()
    if t2 <= tol(cq.scale() ** 2):
        raise DegenerateTop("isotropic top coefficient cannot be normalized")
    return cq.scaled(1.0 / np.sqrt(t2))


def mean_curvature_data(cq: ConservedQuantity):
    """(H, kappa) of a normalized linear quantity: H = -<Z, Q> (constant
    over vertices), kappa = -|Q|^2."""
    if cq.degree != 1:
        raise ValueError("mean curvature data needs a linear quantity")
    t2 = cq.top_norm2()
    if abs(t2 - 1.0) > tol(1.0):
        raise ValueError("quantity is not normalized (|top|^2 != 1)")
    Q = cq.constant
    zq = (cq.coeffs[:, :, 1, :] * SIGNATURE * Q).sum(-1)
    H = -float(zq.mean())
    if float(np.abs(zq + H).max()) > tol(cq.scale() ** 2):
        raise NotConserved("<Z, Q> varies over vertices")
    return H, -float(norm2(Q))


# --- sphere-congruence propagation and linear solvers -----------------------


def propagate_congruence(net: IsothermicNet, Q, Z0, basepoint) -> VertexField:
    """Propagate a vertex congruence from its value at the basepoint by

        Z_j = Z_i + a_ij / <F_i, F_j> * ( <Q, F_j> F_i - <Q, F_i> F_j ),

    which is integrable on any isothermic net and independent of lift
    scalings.  Incidence <Z, F> = 0 is *not* automatic away from the
    basepoint's star; callers check it."""
    dom = net.domain
    field = VertexField.zeros(dom, (5,))
    field[basepoint] = np.asarray(Z0, dtype=float)

    def step(src, dst):
        Fi, Fj = net.lifts[src], net.lifts[dst]
        a = net.weight((src, dst))
        g = float(minkowski_inner(Fi, Fj))
        qi = float(minkowski_inner(Q, Fi))
        qj = float(minkowski_inner(Q, Fj))
        field[dst] = field[src] + (a / g) * (qj * Fi - qi * Fj)

    tree, cross = propagation_order(dom, basepoint)
    for parent, child in tree:
        step(parent, child)
    worst = 0.0
    for i, j in cross:
        saved = field[j].copy()
        step(i, j)
        worst = max(worst, float(np.abs(field[j] - saved).max()))
        field[j] = saved
    scale = 1.0 + float(np.abs(field.data).max())
    if worst > tol(scale):
        raise NotConserved(f"congruence propagation is path dependent ({worst:.3g})")
    return field


def _linear_quantity(net, Q, Z_field) -> ConservedQuantity:
    dom = net.domain
    coeffs = np.zeros((dom.rows, dom.cols, 2, 5))
    coeffs[:, :, 0, :] = np.asarray(Q, dtype=float)
    coeffs[:, :, 1, :] = Z_field.data
    return ConservedQuantity(net, coeffs, check=False)


def lcq_solve_3x3(net: IsothermicNet, Q) -> ConservedQuantity:
    """Unique linear conserved quantity lam*Z + Q of a non-spherical 3x3 net.

    The value of Z at the center is pinned by incidence at the center and
    the four incidence conditions at its neighbors,

        <Z, F_c> = 0,   <Z, F_nbr> = -a_{c,nbr} <Q, F_nbr>,

    a 5x5 solve that is regular exactly when the axis vertex star spans the
    whole space; Z is then propagated across the grid (incidence at the
    diagonal vertices holds automatically).

    Raises
    ------
    SphericalStar
        If the vertex star system is singular.
    """
    dom = net.domain
    if dom.rows != 3 or dom.cols != 3:
        raise ValueError("lcq_solve_3x3 expects a 3x3 net")
    c = dom.center()
    Q = np.asarray(Q, dtype=float)
    rows = [net.lifts[c] * SIGNATURE]
    rhs = [0.0]
    for nbr in dom.neighbors(c):
        a = net.weight((c, nbr))
        rows.append(net.lifts[nbr] * SIGNATURE)
        rhs.append(-a * float(minkowski_inner(Q, net.lifts[nbr])))
    try:
        Zc = solve_dense(np.stack(rows), np.asarray(rhs))
    except SingularSystem as exc:
        raise SphericalStar("vertex star is cospherical") from exc
    Z = propagate_congruence(net, Q, Zc, c)
    cq = _linear_quantity(net, Q, Z)
    report = pcq_verify(net, cq)
    if not report.ok:
        raise NotConserved(f"star solve did not yield a conserved quantity "
                           f"(residual {report.max_residual:.3g})")
    return cq


@dataclass
class InconsistencyReport:
    """Returned by :func:`lcq_solve_grid` when no linear quantity with the
    requested constant term exists on the whole net."""

    max_incidence: float
    residuals: np.ndarray  # per-vertex |<Z, F>| / scale
    quantity: ConservedQuantity | None = None


def lcq_solve_grid(net: IsothermicNet, Q, basepoint=None):
    """Linear conserved quantity with prescribed constant term on a whole
    grid, or an :class:`InconsistencyReport`.

    Solves the nine incidence conditions on the extended vertex star of the
    basepoint in least squares, propagates, and verifies incidence at every
    vertex; failure means the net is not cmc for this ambient vector.
    """
    dom = net.domain
    if basepoint is None:
        basepoint = dom.center()
    Q = np.asarray(Q, dtype=float)

    # propagation is affine in the start value with trivial linear part:
    # Z(v) = Z(base) + W(v) with W independent of the start.
    W = propagate_congruence(net, Q, np.zeros(5), basepoint)

    m, n = basepoint
    star = [(m, n), (m + 1, n), (m - 1, n), (m, n + 1), (m, n - 1),
            (m + 2, n), (m - 2, n), (m, n + 2), (m, n - 2)]
    rows, rhs = [], []
    for v in star:
        if dom.contains(v):
            rows.append(net.lifts[v] * SIGNATURE)
            rhs.append(-float(minkowski_inner(W[v], net.lifts[v])))
    Zc, *_ = np.linalg.lstsq(np.stack(rows), np.asarray(rhs), rcond=None)

    Z = VertexField(dom, W.data + Zc)
    scale = (1.0 + float(np.abs(Z.data).max())) * net.lift_scale()
    inc = np.abs((Z.data * SIGNATURE * net.lifts.data).sum(-1)) / scale
    worst = float(inc.max())
    if worst > tol(1.0):
        return InconsistencyReport(worst, inc)
    cq = _linear_quantity(net, Q, Z)
    report = pcq_verify(net, cq)
    if not report.ok:
        return InconsistencyReport(worst, inc, None)
    return cq


@dataclass
class TypeReport:
    spherical: bool
    sphere: np.ndarray | None
    min_degree: int | None
    degenerate_present: bool
    verified: int


def classify_type(net: IsothermicNet, candidates=()) -> TypeReport:
    """Classify the net relative to supplied candidate quantities.

    Type 0 (all vertices on one sphere) is decided intrinsically from the
    rank of the lifts; higher types are certified only relative to the
    verified normalized candidates, reporting the minimal degree among them
    and whether a degenerate (isotropic-top) quantity was seen.
    """
    V = net.lifts.data.reshape(-1, 5)
    V = V / np.linalg.norm(V, axis=1)[:, None]
    s = np.linalg.svd(V, compute_uv=False)
    if s[4] / s[0] <= tol(1.0):
        _, _, vt = np.linalg.svd(V * SIGNATURE)
        normal = vt[-1]
        nn = float(norm2(normal))
        sphere = None
        if nn > tol(1.0):
            sphere = normal / np.sqrt(nn)
            k = int(np.argmax(np.abs(sphere)))
            if sphere[k] < 0:
                sphere = -sphere
        return TypeReport(True, sphere, 0, False, 0)

    min_degree = None
    degenerate = False
    verified = 0
    for cand in candidates:
        if not pcq_verify(net, cand).ok:
            continue
        verified += 1
        t2 = cand.top_norm2()
        if t2 <= tol(cand.scale() ** 2):
            degenerate = True
            continue
        d = cand.degree
        if min_degree is None or d < min_degree:
            min_degree = d
    return TypeReport(False, None, min_degree, degenerate, verified)
