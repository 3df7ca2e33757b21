"""Command-line interface.

Subcommands: ``gen`` writes model or random curvature tensors (and the bump
negative-control fixture) as JSON; ``verify`` runs the verification suite on a
tensor or fixture file and exits 1 if any check fails; ``area``, ``spectrum``
and ``radon`` export equator-area scans, Jacobi spectra and great-sphere
transforms as CSV; ``act`` applies a group element to a tensor file.  Exit
codes: 0 success, 1 verification failure, 2 usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .analysis import (
    build_jacobi_galerkin,
    equator_area,
    funk_radon,
    jacobi_spectrum_probe,
    left_invariant_metric,
)
from .correspondence import metric_from_curv
from .sphere_geom import Equator, random_equator, sphere_quadrature, tangent_frame
from .tableio import write_csv, write_json
from .tensor_core import (
    GroupElement,
    act,
    constant_curvature,
    fubini_study,
    load_matrix,
    load_tensor,
    random_positive,
    save_tensor,
)
from .verification import BumpMetric, verify_metric, verify_tensor

BUMP_FORMAT = "bump-metric-v1"

CHECK_NAMES = (
    "symmetry",
    "positivity",
    "roundtrip",
    "killing_constancy",
    "mean_curvature",
    "metric_equation",
    "equivariance",
    "antipodal",
)


@dataclass
class RunConfig:
    """Parameters of one CLI invocation, embedded in every report."""

    command: str
    seed: int = 0
    version: str = __version__
    params: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return asdict(self)


def _emit(payload: dict) -> None:
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _load_subject(path: str):
    """Load a tensor file or a bump fixture; returns ('tensor', R) or ('bump', g)."""
    with open(path) as fh:
        head = json.load(fh)
    if isinstance(head, dict) and head.get("format") == BUMP_FORMAT:
        g = BumpMetric(
            n=int(head["n"]),
            amplitude=float(head["amplitude"]),
            width=float(head["width"]),
            center=np.asarray(head["center"], dtype=float),
            direction=np.asarray(head["direction"], dtype=float),
        )
        return "bump", g
    return "tensor", load_tensor(path)


# ---------------------------------------------------------------------------
# gen


def cmd_gen(args) -> int:
    config = RunConfig("gen", seed=args.seed, params={"kind": args.kind})
    if args.kind == "round":
        R = constant_curvature(args.n, 1.0)
        info = {"kind": "round", "n": args.n}
    elif args.kind == "fubini-study":
        if args.m < 2:
            raise ValueError("fubini-study requires --m >= 2")
        R = fubini_study(args.m)
        info = {"kind": "fubini-study", "m": args.m, "n": 2 * args.m + 1}
    elif args.kind == "left-invariant":
        if min(args.a, args.b, args.c) <= 0:
            raise ValueError("left-invariant coefficients must be positive")
        _, R = left_invariant_metric(args.a, args.b, args.c, seed=args.seed)
        info = {"kind": "left-invariant", "coefficients": [args.a, args.b, args.c], "n": 3}
    elif args.kind == "random":
        R, margin, eps = random_positive(args.n, args.seed, target_margin=args.margin)
        info = {
            "kind": "random",
            "n": args.n,
            "seed": args.seed,
            "positivity_margin": margin,
            "step": eps,
        }
    elif args.kind == "bump":
        payload = {
            "format": BUMP_FORMAT,
            "n": args.n,
            "amplitude": args.amplitude,
            "width": args.width,
            "center": [1.0] + [0.0] * args.n,
            "direction": [0.0, 1.0] + [0.0] * (args.n - 1),
        }
        write_json(args.out, payload)
        _emit({"config": config.as_dict(), "written": args.out, "info": {"kind": "bump"}})
        return 0
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(f"unknown kind {args.kind}")
    save_tensor(R, args.out)
    _emit({"config": config.as_dict(), "written": args.out, "info": info})
    return 0


# ---------------------------------------------------------------------------
# verify


def _bump_probe_pairs(g: BumpMetric, points: int = 12):
    """Equators through the bump center with points walking into the bump.

    The normals mix the perturbation direction with its orthogonal
    complement: an equator whose normal is parallel or perpendicular to the
    direction is fixed by a reflection that preserves the metric, so its mean
    curvature vanishes identically and it cannot witness the perturbation.
    """
    center = g.center / np.linalg.norm(g.center)
    d = g.direction - (g.direction @ center) * center
    d /= np.linalg.norm(d)
    comp = [w for w in tangent_frame(center) if abs(w @ d) < 0.9]
    a, b = comp[0] - (comp[0] @ d) * d, comp[1] - (comp[1] @ d) * d
    a /= np.linalg.norm(a)
    b -= (b @ a) * a
    b /= np.linalg.norm(b)
    normals = [d + a, d + b, d + a + b]
    ts = np.linspace(0.05, 0.6, points)
    pairs = []
    for v in normals:
        eq = Equator(v)
        u = d - (d @ eq.normal) * eq.normal
        u /= np.linalg.norm(u)
        pts = np.cos(ts)[:, None] * center + np.sin(ts)[:, None] * u
        pairs.append((eq.normal, pts))
    return pairs


def cmd_verify(args) -> int:
    tolerances = {}
    for name in CHECK_NAMES:
        val = getattr(args, f"tol_{name}")
        if val is not None:
            tolerances[name] = val
    kind, subject = _load_subject(args.input)
    config = RunConfig(
        "verify",
        seed=args.seed,
        params={"input": args.input, "equators": args.equators, "points": args.points},
    )
    if kind == "tensor":
        report = verify_tensor(
            subject,
            seed=args.seed,
            tolerances=tolerances,
            equators=args.equators,
            points=args.points,
        )
    else:
        report = verify_metric(
            subject,
            seed=args.seed,
            tolerances=tolerances,
            equators=args.equators,
            points=args.points,
            extra_pairs=_bump_probe_pairs(subject),
        )
    payload = {"config": config.as_dict(), "report": report.as_dict()}
    if args.out:
        write_json(args.out, payload)
    _emit(payload)
    return 0 if report.passed else 1


# ---------------------------------------------------------------------------
# area / spectrum / radon


def _metric_from_file(path: str):
    kind, subject = _load_subject(path)
    if kind == "tensor":
        return metric_from_curv(subject, override=True)
    return subject


def cmd_area(args) -> int:
    g = _metric_from_file(args.input)
    rng = np.random.default_rng(args.seed)
    normals = [random_equator(rng, g.n).normal for _ in range(args.equators)]
    areas = [equator_area(g, v, args.order) for v in normals]
    header = [f"v{i}" for i in range(g.n + 1)] + ["area"]
    rows = ([float(c) for c in v] + [a] for v, a in zip(normals, areas))
    write_csv(args.out, header, rows)
    areas = np.asarray(areas)
    mean = float(areas.mean())
    spread = float((areas.max() - areas.min()) / mean) if mean else float("inf")
    config = RunConfig(
        "area",
        seed=args.seed,
        params={"input": args.input, "equators": args.equators, "order": args.order},
    )
    _emit(
        {
            "config": config.as_dict(),
            "written": args.out,
            "mean_area": mean,
            "relative_spread": spread,
        }
    )
    return 0


def cmd_spectrum(args) -> int:
    g = _metric_from_file(args.input)
    if args.v:
        v = Equator(np.asarray([float(t) for t in args.v.split(",")], dtype=float))
    else:
        v = Equator(np.eye(g.n + 1)[0])
    rows = []
    summary = []
    for L in args.L:
        gal = build_jacobi_galerkin(g, v, L, order=args.order)
        probe = jacobi_spectrum_probe(g, v, L, null_tol=args.null_tol, galerkin=gal)
        for idx, lam in enumerate(probe.eigenvalues):
            rows.append([L, idx, float(lam)])
        summary.append(
            {
                "L": L,
                "order": probe.order,
                "n_negative": probe.n_negative,
                "n_null": probe.n_null,
            }
        )
    write_csv(args.out, ["L", "index", "eigenvalue"], rows)
    config = RunConfig(
        "spectrum",
        seed=0,
        params={"input": args.input, "L": args.L, "null_tol": args.null_tol},
    )
    _emit({"config": config.as_dict(), "written": args.out, "levels": summary})
    return 0


def _radon_function(kind: str, seed: int, dim: int):
    if kind == "one":
        return lambda P: np.ones(P.shape[0])
    rng = np.random.default_rng(seed)
    c0 = rng.standard_normal()
    c1 = rng.standard_normal(dim)
    c2 = rng.standard_normal((dim, dim))
    c2 = 0.5 * (c2 + c2.T)

    def poly(P):
        return c0 + P @ c1 + np.einsum("ni,ij,nj->n", P, c2, P)

    return poly


def cmd_radon(args) -> int:
    g = _metric_from_file(args.input)
    f = _radon_function(args.f, args.f_seed, g.n + 1)
    rng = np.random.default_rng(args.seed)
    normals = [random_equator(rng, g.n).normal for _ in range(args.equators)]
    values = [funk_radon(g, f, v, args.order) for v in normals]
    header = [f"v{i}" for i in range(g.n + 1)] + ["transform"]
    write_csv(args.out, header, ([float(c) for c in v] + [val] for v, val in zip(normals, values)))
    rule = sphere_quadrature(g.n, max(args.order, 16))
    reference = rule.integrate(f)
    config = RunConfig(
        "radon",
        seed=args.seed,
        params={
            "input": args.input,
            "equators": args.equators,
            "order": args.order,
            "f": args.f,
            "f_seed": args.f_seed,
        },
    )
    _emit(
        {
            "config": config.as_dict(),
            "written": args.out,
            "mean_transform": float(np.mean(values)),
            "sphere_integral": reference,
        }
    )
    return 0


def cmd_act(args) -> int:
    R = load_tensor(args.tensor)
    T = load_matrix(args.matrix)
    out = act(R, T)
    save_tensor(out, args.out)
    config = RunConfig("act", seed=0, params={"tensor": args.tensor, "matrix": args.matrix})
    _emit(
        {
            "config": config.as_dict(),
            "written": args.out,
            "n": out.n,
            "max_norm": out.max_norm(),
        }
    )
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="equator-forge",
        description="Curvature tensors whose spheres have all equators minimal.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a tensor (or fixture) file")
    p.add_argument("kind", choices=["round", "fubini-study", "left-invariant", "random", "bump"])
    p.add_argument("--n", type=int, default=3, help="sphere dimension")
    p.add_argument("--m", type=int, default=2, help="complex dimension for fubini-study")
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--margin", type=float, default=0.1, help="positivity margin for random")
    p.add_argument("--amplitude", type=float, default=0.1, help="bump fixture amplitude")
    p.add_argument("--width", type=float, default=0.04, help="bump fixture width")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", help="run the verification suite on a file")
    p.add_argument("input")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--equators", type=int, default=20)
    p.add_argument("--points", type=int, default=10)
    p.add_argument("--out", default=None, help="also write the JSON report here")
    for name in CHECK_NAMES:
        p.add_argument(
            f"--tol-{name.replace('_', '-')}",
            dest=f"tol_{name}",
            type=float,
            default=None,
            help=f"override tolerance of the {name} check",
        )
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("area", help="CSV scan of equator areas")
    p.add_argument("input")
    p.add_argument("--equators", type=int, default=50)
    p.add_argument("--order", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_area)

    p = sub.add_parser("spectrum", help="CSV of Jacobi-operator eigenvalues")
    p.add_argument("input")
    p.add_argument("--v", default=None, help="comma-separated equator normal")
    p.add_argument("--L", type=int, action="append", default=None, help="basis degree (repeatable)")
    p.add_argument("--order", type=int, default=None)
    p.add_argument("--null-tol", dest="null_tol", type=float, default=1e-3)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("radon", help="CSV scan of the great-sphere transform")
    p.add_argument("input")
    p.add_argument("--equators", type=int, default=100)
    p.add_argument("--order", type=int, default=24)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--f", choices=["one", "poly"], default="poly")
    p.add_argument("--f-seed", dest="f_seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_radon)

    p = sub.add_parser("act", help="apply a group element to a tensor file")
    p.add_argument("tensor")
    p.add_argument("matrix")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_act)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "L", None) is not None and not args.L:
        args.L = [12]
    if hasattr(args, "L") and args.L is None:
        args.L = [12]
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
