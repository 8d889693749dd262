"""Darboux and Backlund transforms, permutability, complementary nets, and
conserved-quantity reconstruction from parallel sections.

A Darboux transform with parameter mu is an isotropic parallel section of
the edge connection at mu; it is a new isothermic net with the same edge
weights, characterized by the edge cross ratios [f_i; f_j; fhat_j; fhat_i]
= a_ij * mu.  A Backlund transform additionally starts orthogonal to the
value P(mu) of a conserved quantity, which keeps the transformed quantity
at the same degree and preserves the constant coefficient (hence the
ambient space form and the mean curvature).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .conserved import ConservedQuantity
from .errors import (
    CoincidentTransforms,
    DegenerateStart,
    EmptyConic,
    IncidenceFailure,
    NotBacklund,
    NotParallel,
    NotPolynomial,
)
from .grids import VertexField, propagation_order
from .minkowski import (
    SIGNATURE,
    cross_ratio,
    cross_ratio_matrix,
    minkowski_inner,
    norm2,
    orthonormal_complement,
    ray_distance,
)
from .nets import CalapsoFrame, IsothermicNet, edge_connection
from .polyvec import (
    mp_eval,
    mp_inner_vec,
    mp_max_coeff,
    mp_scale_poly,
    mp_shift,
    mp_trim,
)
from .tolerances import tol


@dataclass
class DarbouxTransform:
    """Parameter and isotropic parallel lift of a Darboux transform."""

    mu: float
    lifts: VertexField
    base: IsothermicNet
    max_residual: float = 0.0

    def net(self) -> IsothermicNet:
        """The transform as an isothermic net (same edge weights).

        Representatives are normalized to unit length for conditioning; the
        parallel section itself stays available as ``lifts``.
        """
        data = self.lifts.data
        norms = np.linalg.norm(data, axis=-1, keepdims=True)
        return IsothermicNet(self.base.domain,
                             VertexField(self.base.domain, data / norms),
                             self.base.weights)

    def cross_ratio_residual(self) -> float:
        """Worst deviation of [f_i; f_j; fhat_j; fhat_i] from a_ij * mu."""
        worst = 0.0
        for i, j in self.base.domain.edges():
            q = cross_ratio(self.base.lifts[i], self.base.lifts[j],
                            self.lifts[j], self.lifts[i])
            target = self.base.weight((i, j)) * self.mu
            worst = max(worst, abs(q - target) / (1.0 + abs(target)))
        return worst


def parallel_residual(net: IsothermicNet, mu: float, section: VertexField) -> float:
    """Worst edge defect of S_i = C_ij(mu) S_j over all edges."""
    worst = 0.0
    scale = 1.0 + float(np.abs(section.data).max())
    for i, j in net.domain.edges():
        resid = section[i] - edge_connection(net, mu, (i, j)) @ section[j]
        worst = max(worst, float(np.abs(resid).max()) / scale)
    return worst


def darboux_propagate(net: IsothermicNet, mu: float, start, basepoint=None) -> DarbouxTransform:
    """Propagate an isotropic start vector into a Darboux transform.

    Raises
    ------
    DegenerateStart
        If the start is not isotropic or is proportional to the base lift.
    PoleParameter
        If 1 - mu * a vanishes on some edge.
    """
    dom = net.domain
    if basepoint is None:
        basepoint = (dom.m1, dom.n1)
    start = np.asarray(start, dtype=float)
    s2 = float(np.dot(start, start))
    if abs(norm2(start)) > tol(s2):
        raise DegenerateStart("start vector is not isotropic")
    if ray_distance(start, net.lifts[basepoint]) <= tol(1.0):
        raise DegenerateStart("start coincides with the base net")

    lifts = VertexField.zeros(dom, (5,))
    lifts[basepoint] = start
    tree, cross = propagation_order(dom, basepoint)
    for parent, child in tree:
        # parallelity F_parent = C(parent, child) F_child inverted via the
        # reversed edge map
        lifts[child] = edge_connection(net, mu, (child, parent)) @ lifts[parent]
    worst = 0.0
    scale = 1.0 + float(np.abs(lifts.data).max())
    for i, j in cross:
        resid = lifts[i] - edge_connection(net, mu, (i, j)) @ lifts[j]
        worst = max(worst, float(np.abs(resid).max()) / scale)
    if worst > tol(1.0):
        raise NotParallel(f"Darboux propagation is path dependent ({worst:.3g})")
    return DarbouxTransform(mu, lifts, net, worst)


def backlund_init(cq: ConservedQuantity, mu: float, s: float, basepoint=None) -> np.ndarray:
    """Isotropic start vector orthogonal to P(mu) at the basepoint.

    The isotropic rays orthogonal to a spacelike P(mu) form a two-sphere;
    a deterministic circle inside it is exposed through the rational
    parameter ``s``: with (t, u1, u2) the timelike and first two spacelike
    directions of an orthonormal basis of P(mu)-perp,

        X(s) = t + (1 - s^2)/(1 + s^2) u1 + 2s/(1 + s^2) u2.

    Raises
    ------
    EmptyConic
        If P(mu) is timelike (no real isotropic directions exist).
    DegenerateStart
        If the chosen direction coincides with the net's lift.
    """
    net = cq.net
    if basepoint is None:
        basepoint = (net.domain.m1, net.domain.n1)
    P = mp_eval(cq.at(basepoint), mu)
    p2 = float(norm2(P))
    scale = float(np.dot(P, P))
    if scale <= tol(1.0) ** 2:
        raise EmptyConic("P(mu) vanishes; reduce the quantity first")
    if abs(p2) <= tol(scale):
        # isotropic P(mu): the only orthogonal isotropic ray is P(mu) itself
        return P.copy()
    if p2 < 0:
        raise EmptyConic("P(mu) is timelike; its complement carries no light cone")

    dirs = orthonormal_complement(P)
    t = dirs[0]  # timelike direction comes first
    u1, u2 = dirs[1], dirs[2]
    den = 1.0 + s * s
    X = t + ((1.0 - s * s) / den) * u1 + (2.0 * s / den) * u2
    if ray_distance(X, net.lifts[basepoint]) <= tol(1.0):
        raise DegenerateStart("start direction coincides with the net; vary s")
    return X


def pcq_darboux(cq: ConservedQuantity, transform: DarbouxTransform) -> ConservedQuantity:
    """Conserved quantity of a Darboux transform (degree at most N+1):

        Phat(lam) = (lam - mu) P(lam)
                    - ( lam(lam-mu)/mu <P,F> Fhat + lam <P,Fhat> F ) / <F,Fhat>.

    The top norm is preserved, |Phat|^2 = (lam - mu)^2 |P|^2.

    Raises
    ------
    NotPolynomial
        If the degree N+2 coefficient fails to cancel (bad input quantity).
    """
    net = cq.net
    mu = transform.mu
    dom = net.domain
    k = cq.coeffs.shape[2]
    out = np.zeros((dom.rows, dom.cols, k + 2, 5))
    for v in dom.vertices():
        mi, ni = dom.index(v)
        c = cq.coeffs[mi, ni]
        F = net.lifts[v]
        Fh = transform.lifts[v]
        g = float(minkowski_inner(F, Fh))
        pf = mp_inner_vec(c, F)
        pfh = mp_inner_vec(c, Fh)
        total = np.zeros((k + 2, 5))
        total[:k] += -mu * c
        total[1 : k + 1] += c
        total[2 : k + 2] -= np.outer(pf, Fh) / (mu * g)
        total[1 : k + 1] += np.outer(pf, Fh) / g
        total[1 : k + 1] -= np.outer(pfh, F) / g
        out[mi, ni] = total
    scale = 1.0 + mp_max_coeff(out)
    top = float(np.abs(out[:, :, k + 1, :]).max())
    if top > tol(scale):
        raise NotPolynomial(f"degree {k + 1} coefficient does not cancel ({top:.3g})")
    trimmed = mp_trim(out, scale)
    return ConservedQuantity(transform.net(), trimmed)


def pcq_backlund(cq: ConservedQuantity, transform: DarbouxTransform) -> ConservedQuantity:
    """Conserved quantity of a Backlund transform, same degree N:

        Phat(lam) = P(lam) - (lam/mu) <P,F>/<F,Fhat> Fhat
                    - lam <P,Fhat>/((lam-mu) <F,Fhat>) F,

    where the last division is exact because <P(mu), Fhat> = 0.  The
    constant coefficient is unchanged.

    Raises
    ------
    NotBacklund
        If the start orthogonality <P(mu), Fhat> fails at some vertex.
    """
    net = cq.net
    mu = transform.mu
    dom = net.domain
    k = cq.coeffs.shape[2]
    out = np.zeros((dom.rows, dom.cols, k, 5))
    scale = cq.scale() * (1.0 + float(np.abs(transform.lifts.data).max()))
    for v in dom.vertices():
        mi, ni = dom.index(v)
        c = cq.coeffs[mi, ni]
        F = net.lifts[v]
        Fh = transform.lifts[v]
        g = float(minkowski_inner(F, Fh))
        pf = mp_inner_vec(c, F)
        pfh = mp_inner_vec(c, Fh)  # must vanish at mu
        # divide lam * pfh by (lam - mu): quotient degree <= k-1
        num = np.concatenate([[0.0], pfh])
        quot = np.zeros(k)
        carry = num[k]
        for j in range(k - 1, -1, -1):
            quot[j] = carry
            carry = num[j] + mu * carry
        if abs(carry) > tol(scale):
            raise NotBacklund(f"<P({mu}), Fhat> = {carry:.3g} at {v}")
        total = c.copy()
        if k > 1:
            total[1:] -= np.outer(pf[: k - 1], Fh) / (mu * g)
        total -= np.outer(quot, F) / g
        out[mi, ni] = total
    result = ConservedQuantity(transform.net(), out)
    return result


@dataclass
class BianchiResult:
    net: IsothermicNet
    lifts: VertexField
    residual_first: float
    residual_second: float
    quantity: ConservedQuantity | None
    quantity_gap: float | None


def bianchi(net: IsothermicNet, first: DarbouxTransform, second: DarbouxTransform,
            quantities: tuple[ConservedQuantity, ConservedQuantity] | None = None)\
        -> BianchiResult:
    """Fourth net of the permutability quadrilateral:

        F_12 = C(mu2/mu1; fhat1, fhat2) F   (vertexwise),

    verified to be a Darboux transform of the first input with parameter
    mu2 and of the second with parameter mu1.  When the two inputs are
    Backlund transforms with their quantities supplied, the transformed
    quantity is computed along both routes and the agreement reported.

    Raises
    ------
    CoincidentTransforms
        If the two transforms touch at some vertex.
    """
    mu1, mu2 = first.mu, second.mu
    if abs(mu1 - mu2) <= tol(1.0 + abs(mu1)):
        raise CoincidentTransforms("equal parameters")
    dom = net.domain
    lifts = VertexField.zeros(dom, (5,))
    for v in dom.vertices():
        A, B = first.lifts[v], second.lifts[v]
        g = float(minkowski_inner(A, B))
        if abs(g) <= tol(float(np.linalg.norm(A) * np.linalg.norm(B))):
            raise CoincidentTransforms(f"transforms coincide at {v}")
        lifts[v] = cross_ratio_matrix(mu2 / mu1, A, B) @ net.lifts[v]

    d_of_first = DarbouxTransform(mu2, lifts, first.net())
    d_of_second = DarbouxTransform(mu1, lifts, second.net())
    r1 = d_of_first.cross_ratio_residual()
    r2 = d_of_second.cross_ratio_residual()

    quantity = None
    gap = None
    if quantities is not None:
        q1, q2 = quantities
        route1 = pcq_backlund(q1, d_of_first)
        route2 = pcq_backlund(q2, d_of_second)
        gap = float(np.abs(route1.coeffs - route2.coeffs).max())
        quantity = route1
    return BianchiResult(d_of_first.net(), lifts, r1, r2, quantity, gap)


@dataclass
class ComplementaryNet:
    mu: float
    multiplicity: int
    lifts: VertexField | None  # None when P(mu) vanishes identically
    degenerate: bool


def complementary(cq: ConservedQuantity) -> list[ComplementaryNet]:
    """Evaluations of the quantity at the real roots of |P(lam)|^2.

    Each non-degenerate entry is an isotropic parallel section, i.e. a
    Backlund transform of the net; for a normalized linear quantity the
    roots are H +- sqrt(H^2 + kappa), so their count tracks the sign of
    H^2 + kappa.  Roots come from companion-matrix eigenvalues; a root is
    accepted as real when |imag| <= 1e-7 (1 + |real|), and roots are merged
    into multiplicity clusters of radius 1e-6.
    """
    poly = cq.norm_poly()
    scale = float(np.abs(poly).max())
    if scale == 0.0:
        return []
    k = len(poly)
    while k > 1 and abs(poly[k - 1]) <= tol(scale):
        k -= 1
    poly = poly[:k]
    if len(poly) <= 1:
        return []
    roots = np.roots(poly[::-1])
    real = [float(r.real) for r in roots if abs(r.imag) <= 1e-7 * (1.0 + abs(r.real))]
    real.sort()
    clusters: list[list[float]] = []
    for r in real:
        if clusters and abs(r - clusters[-1][-1]) <= 1e-6:
            clusters[-1].append(r)
        else:
            clusters.append([r])
    out = []
    for cluster in clusters:
        mu = float(np.mean(cluster))
        values = mp_eval(cq.coeffs, mu)
        size = float(np.sqrt((values * values).sum(-1)).max())
        degenerate = size <= tol(cq.scale() * (1.0 + abs(mu)) ** cq.degree)
        lifts = None if degenerate else VertexField(cq.net.domain, values)
        out.append(ComplementaryNet(mu, len(cluster), lifts, degenerate))
    return out


def pcq_from_parallel_sections(net: IsothermicNet, sections, weights) -> ConservedQuantity:
    """Degree-N conserved quantity from N+1 parallel sections:

        P(lam) = sum_n w_n * S^n * prod_{m != n} (lam - mu_m),

    where S^n is parallel for the connection at mu_n and the combined top
    coefficient sum_n w_n S^n must be orthogonal to the net everywhere.

    Parameters
    ----------
    sections : list of (mu, VertexField)
    weights : list of floats

    Raises
    ------
    NotParallel, IncidenceFailure
    """
    mus = [mu for mu, _ in sections]
    if len(set(np.round(mus, 12))) != len(mus):
        raise ValueError("section parameters must be pairwise distinct")
    for mu, sec in sections:
        r = parallel_residual(net, mu, sec)
        if r > tol(1.0):
            raise NotParallel(f"section at {mu} is not parallel (residual {r:.3g})")
    dom = net.domain
    top = np.zeros((dom.rows, dom.cols, 5))
    for w, (mu, sec) in zip(weights, sections):
        top += w * sec.data
    inc = np.abs((top * SIGNATURE * net.lifts.data).sum(-1))
    scale = (1.0 + float(np.abs(top).max())) * net.lift_scale()
    if inc.max() > tol(scale):
        raise IncidenceFailure(
            f"combined top coefficient not orthogonal to the net ({inc.max():.3g})")

    k = len(sections)
    coeffs = np.zeros((dom.rows, dom.cols, k, 5))
    for n, (w, (mu, sec)) in enumerate(zip(weights, sections)):
        p = np.array([1.0])
        for m, other in enumerate(mus):
            if m != n:
                p = np.convolve(p, [-other, 1.0])
        coeffs += w * mp_scale_poly(sec.data[:, :, None, :], p)
    return ConservedQuantity(net, coeffs)


def calapso_pcq(cq: ConservedQuantity, frame: CalapsoFrame) -> ConservedQuantity:
    """Conserved quantity of a Calapso transform: vertexwise frame applied
    to the parameter-shifted polynomial P(mu + lam).  Degree and top norm
    are preserved; for linear quantities the curvatures move along the
    family H -> H - mu, kappa -> kappa + 2 mu H - mu^2 with H^2 + kappa
    invariant."""
    if frame.net is not cq.net:
        # allow equality by value for reloaded nets
        if frame.net.domain != cq.net.domain:
            raise ValueError("frame was built for a different net")
    shifted = mp_shift(cq.coeffs, frame.mu)
    data = np.einsum("mnij,mnkj->mnki", frame.frames.data, shifted)
    return ConservedQuantity(frame.transformed, data)
