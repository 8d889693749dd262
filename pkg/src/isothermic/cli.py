"""Command line interface.

Subcommands: generate, verify, transform, classify, export.  Exit codes:
0 on success, 2 when a verification fails, 1 on usage errors.  The global
relative tolerance can be set with --tol or the ISOTHERMIC_TOL environment
variable.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .conserved import (
    InconsistencyReport,
    classify_type,
    lcq_solve_grid,
    mean_curvature_data,
    normalize_top,
    pcq_verify,
)
from .errors import GeometryError
from .euclidean import EuclideanNet, christoffel, classify_cmc
from .minkowski import euclidean_lift
from .nets import calapso, verify_isothermic
from .netfile import load_net, save_net
from .objexport import export_obj
from .revolution import RotationProfile, build_revolution_cmc, seed_edge
from .tolerances import set_tolerance
from .transforms import backlund_init, bianchi, darboux_propagate, pcq_backlund, pcq_darboux

USAGE_ERROR = 1
VERIFY_FAILURE = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def _parse_reals(text: str, prefix: str = "") -> np.ndarray:
    if prefix and text.startswith(prefix):
        text = text[len(prefix):]
    try:
        return np.array([float(x) for x in text.replace(",", " ").split()])
    except ValueError as exc:
        raise GeometryError(f"cannot parse real list from '{text}'") from exc


def _default_space_form(kappa: float) -> np.ndarray:
    if abs(kappa) < 1e-15:
        return np.array([1.0, 0.0, -1.0])
    if kappa < 0:
        return np.array([0.0, 0.0, np.sqrt(-kappa)])
    return np.array([np.sqrt(kappa), 0.0, 0.0])


def _find_seed_edge(Q, H):
    """Deterministic scan for an admissible seed edge."""
    from .minkowski import hyperbolic_point, inner3, norm3

    candidates = []
    for eta0 in (0.0, 0.15, -0.2, 0.3):
        for rho0 in (1.0, 0.8, 1.3, 0.6):
            for deta in (0.25, 0.4, 0.15):
                for drho in (0.1, -0.15, 0.3, 0.0):
                    candidates.append((eta0, rho0, eta0 + deta, rho0 + drho))
    kappa = -float(norm3(Q))
    for eta0, rho0, eta1, rho1 in candidates:
        if rho1 <= 0.05:
            continue
        M0 = hyperbolic_point(eta0, rho0)
        M1 = hyperbolic_point(eta1, rho1)
        if abs(inner3(Q, M0)) < 1e-6 or abs(inner3(Q, M1)) < 1e-6:
            continue
        try:
            sols = seed_edge(Q, H, M0, M1)
        except GeometryError:
            continue
        for branch, sol in enumerate(sols):
            gate = 1.0 - 2.0 * sol.edge_weight * H - sol.edge_weight ** 2 * kappa
            if gate > 1e-6:
                return M0, M1, branch
    raise GeometryError("no admissible seed edge found for these (H, kappa)")


def _cmd_generate(args) -> int:
    kappa = args.kappa
    Q3 = _default_space_form(kappa)
    if args.seed_edge:
        import json

        with open(args.seed_edge) as fh:
            doc = json.load(fh)
        M0 = np.asarray(doc["M0"], dtype=float)
        M1 = np.asarray(doc["M1"], dtype=float)
        if "Q" in doc:
            Q3 = np.asarray(doc["Q"], dtype=float)
        branch = args.branch if args.branch is not None else 0
    else:
        M0, M1, auto_branch = _find_seed_edge(Q3, args.H)
        branch = args.branch if args.branch is not None else auto_branch
    profile = RotationProfile.uniform(args.angles, 2.0 * np.pi / args.angles)
    net, quantity = build_revolution_cmc(Q3, args.H, M0, M1, args.steps,
                                         profile, branch=branch)
    H, kap = mean_curvature_data(quantity)
    from .revolution import closure_defect

    metadata = {
        "construction": "revolution-cmc",
        "H": H,
        "kappa": kap,
        "steps": args.steps,
        "angles": args.angles,
        "branch": branch,
        "seed_M0": M0,
        "seed_M1": M1,
        "closure": closure_defect(net),
    }
    save_net(args.output, net, [quantity], metadata)
    print(f"wrote {args.output}: {net.domain.rows}x{net.domain.cols} net, "
          f"H={H:.12g}, kappa={kap:.12g}")
    return 0


def _cmd_verify(args) -> int:
    net, quantities, metadata = load_net(args.net)
    report = verify_isothermic(net.lifts, strict=False)
    if not report.ok:
        print(f"FAIL isothermic: {report.reason}")
        return VERIFY_FAILURE
    try:
        weight_residual = net.validate()
    except GeometryError as exc:
        print(f"FAIL stored weights: {exc}")
        return VERIFY_FAILURE
    print(f"isothermic: ok (factorization residual {report.max_factor_residual:.3g}, "
          f"stored-weight residual {weight_residual:.3g})")
    code = 0
    for idx, cq in enumerate(quantities):
        vr = pcq_verify(net, cq)
        status = "ok" if vr.ok else "FAIL"
        print(f"conserved quantity {idx} (degree {cq.degree}): {status} "
              f"(residual {vr.max_residual:.3g})")
        if not vr.ok:
            code = VERIFY_FAILURE
    if args.lcq:
        Q = _parse_reals(args.lcq, prefix="Q=")
        if Q.shape != (5,):
            raise GeometryError("--lcq expects 5 reals")
        result = lcq_solve_grid(net, Q)
        if isinstance(result, InconsistencyReport):
            print(f"FAIL lcq: incidence residual {result.max_incidence:.3g}")
            code = VERIFY_FAILURE
        else:
            H, kap = mean_curvature_data(normalize_top(result))
            print(f"lcq: ok, H={H:.12g}, kappa={kap:.12g}")
    return code


def _first_quantity(quantities, what):
    if not quantities:
        raise GeometryError(f"{what} needs a stored conserved quantity")
    return quantities[0]


def _cmd_transform(args) -> int:
    net, quantities, metadata = load_net(args.net)
    out_quantities = []
    out_meta = {"derived_from": str(args.net), "transform": args.kind}

    if args.kind == "calapso":
        frame, transformed = calapso(net, args.mu)
        from .transforms import calapso_pcq

        out_net = transformed
        out_quantities = [calapso_pcq(cq, frame) for cq in quantities]
        out_meta["mu"] = args.mu
    elif args.kind == "darboux":
        start = _parse_reals(args.start)
        if start.shape == (3,):
            start = euclidean_lift(start)
        if start.shape != (5,):
            raise GeometryError("--start expects 3 or 5 reals")
        transform = darboux_propagate(net, args.mu, start)
        out_net = transform.net()
        out_quantities = [pcq_darboux(cq, transform) for cq in quantities]
        out_meta["mu"] = args.mu
    elif args.kind == "backlund":
        cq = _first_quantity(quantities, "backlund")
        start = backlund_init(cq, args.mu, args.s)
        transform = darboux_propagate(net, args.mu, start)
        out_net = transform.net()
        out_quantities = [pcq_backlund(cq, transform)]
        out_meta["mu"] = args.mu
        out_meta["s"] = args.s
    elif args.kind == "christoffel":
        enet = EuclideanNet.from_isothermic(net)
        dual = christoffel(enet)
        out_net = dual.to_isothermic()
    elif args.kind == "bianchi":
        cq = _first_quantity(quantities, "bianchi")
        t1 = darboux_propagate(net, args.mu1, backlund_init(cq, args.mu1, args.s1))
        t2 = darboux_propagate(net, args.mu2, backlund_init(cq, args.mu2, args.s2))
        q1 = pcq_backlund(cq, t1)
        q2 = pcq_backlund(cq, t2)
        result = bianchi(net, t1, t2, (q1, q2))
        out_net = result.net
        out_quantities = [result.quantity]
        out_meta.update({"mu1": args.mu1, "mu2": args.mu2,
                         "quantity_gap": result.quantity_gap})
    else:  # pragma: no cover - argparse restricts choices
        raise GeometryError(f"unknown transform {args.kind}")

    save_net(args.output, out_net, out_quantities, out_meta)
    print(f"wrote {args.output}")
    return 0


def _cmd_classify(args) -> int:
    net, quantities, metadata = load_net(args.net)
    report = classify_type(net, quantities)
    if report.spherical:
        print("type: 0 (spherical)")
        if report.sphere is not None:
            print("sphere vector:", " ".join(f"{x:.12g}" for x in report.sphere))
    elif report.min_degree is not None:
        extra = ", degenerate-top candidate present" if report.degenerate_present else ""
        print(f"type: <= {report.min_degree} relative to {report.verified} "
              f"verified candidate(s){extra}")
    else:
        print(f"type: unknown ({report.verified} verified candidate(s), "
              f"degenerate={report.degenerate_present})")
    for idx, cq in enumerate(quantities):
        if cq.degree == 1 and pcq_verify(net, cq).ok:
            try:
                label = classify_cmc(normalize_top(cq))
            except GeometryError:
                continue
            print(f"quantity {idx}: {label.label} (H={label.H:.12g}, "
                  f"kappa={label.kappa:.12g}, H^2+kappa={label.lawson_invariant:.12g})")
    return 0


def _cmd_export(args) -> int:
    net, quantities, metadata = load_net(args.net)
    Q = None
    if args.Q:
        Q = _parse_reals(args.Q)
    elif quantities:
        Q = quantities[0].constant
    elif "kappa" in metadata:
        Q3 = _default_space_form(float(metadata["kappa"]))
        from .minkowski import embed_lorentz3

        Q = embed_lorentz3(Q3)
    if Q is None:
        raise GeometryError("no ambient vector available: pass --Q")
    Q = np.asarray(Q, dtype=float)
    if Q.shape == (3,):
        from .minkowski import embed_lorentz3

        Q = embed_lorentz3(Q)
    report = export_obj(net, Q, args.model, args.output, clamp=args.clamp)
    print(f"wrote {report.path}: {report.vertex_count} vertices, "
          f"{report.face_count} quads, {len(report.flagged)} flagged")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="isothermic",
                     description="discrete isothermic nets and cmc constructions")
    parser.add_argument("--tol", type=float, default=None,
                        help="global relative tolerance (default 1e-9)")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="construct nets")
    gen_sub = gen.add_subparsers(dest="generator", required=True)
    rev = gen_sub.add_parser("revolution", help="cmc net of revolution")
    rev.add_argument("--H", type=float, required=True, help="mean curvature")
    rev.add_argument("--kappa", type=float, required=True, help="ambient curvature")
    rev.add_argument("--steps", type=int, default=6,
                     help="meridian steps beyond the seed edge, each direction")
    rev.add_argument("--angles", type=int, default=12, help="rotation samples")
    rev.add_argument("--branch", type=int, default=None, choices=(0, 1),
                     help="seed sphere branch")
    rev.add_argument("--seed-edge", default=None,
                     help="JSON file with M0, M1 (and optionally Q) in Lorentz 3-space")
    rev.add_argument("-o", "--output", required=True)
    rev.set_defaults(func=_cmd_generate)

    ver = sub.add_parser("verify", help="verify a net file")
    ver.add_argument("net")
    ver.add_argument("--lcq", default=None, metavar="Q=...",
                     help="solve for a linear conserved quantity with this ambient vector")
    ver.set_defaults(func=_cmd_verify)

    tra = sub.add_parser("transform", help="apply a transformation")
    tra_sub = tra.add_subparsers(dest="kind", required=True)

    cal = tra_sub.add_parser("calapso")
    cal.add_argument("--mu", type=float, required=True)
    dar = tra_sub.add_parser("darboux")
    dar.add_argument("--mu", type=float, required=True)
    dar.add_argument("--start", required=True,
                     help="start point (3 reals) or lift (5 reals)")
    bac = tra_sub.add_parser("backlund")
    bac.add_argument("--mu", type=float, required=True)
    bac.add_argument("--s", type=float, default=0.0,
                     help="rational parameter on the start circle")
    tra_sub.add_parser("christoffel")
    bia = tra_sub.add_parser("bianchi")
    bia.add_argument("--mu1", type=float, required=True)
    bia.add_argument("--mu2", type=float, required=True)
    bia.add_argument("--s1", type=float, default=0.0)
    bia.add_argument("--s2", type=float, default=0.5)
    for p in (cal, dar, bac, tra_sub.choices["christoffel"], bia):
        p.add_argument("net")
        p.add_argument("-o", "--output", required=True)
        p.set_defaults(func=_cmd_transform)

    cla = sub.add_parser("classify", help="classify a net file")
    cla.add_argument("net")
    cla.set_defaults(func=_cmd_classify)

    exp = sub.add_parser("export", help="export an OBJ quad mesh")
    exp.add_argument("net")
    exp.add_argument("--model", required=True,
                     choices=("euclidean", "poincare", "stereographic"))
    exp.add_argument("--Q", default=None, help="ambient vector (3 or 5 reals)")
    exp.add_argument("--clamp", type=float, default=1e6)
    exp.add_argument("-o", "--output", required=True)
    exp.set_defaults(func=_cmd_export)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    env_tol = os.environ.get("ISOTHERMIC_TOL")
    if args.tol is not None:
        set_tolerance(args.tol)
    elif env_tol:
        set_tolerance(float(env_tol))
    try:
        return args.func(args)
    except GeometryError as exc:
        print(f"verification error: {exc}", file=sys.stderr)
        return VERIFY_FAILURE


if __name__ == "__main__":
    sys.exit(main())
