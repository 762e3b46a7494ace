"""Command-line entry point: ``python -m delmeasure <subcommand> ...``.

Every subcommand writes a JSON document (to ``--output`` or stdout).
Exit status: 0 when all asserted checks pass, 1 when one fails, 2 on
usage errors or unusable input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .configs import ConfigSpec, random_config
from .forms import (
    flip_discontinuity,
    kahler_two_form,
    lambda_length,
    omega_total,
    random_decoration,
    top_coefficient,
    wp_form,
)
from .geom import DegenerateError, PointConfiguration
from .kahler import det_excluding, free_kahler_matrix, kahler_matrix, normalized_det, prepotential
from .mc import conditional_growth_check, default_workers, estimate_volume
from .regions import closed_form_I, closed_form_I1, integral_B, integral_R
from .suite import SCHEMA_VERSION, run_suite
from .tri import delaunay
from .voronoi import dual_graph, dual_length_flat, dual_length_hyperbolic

OK, CHECK_FAILED, USAGE = 0, 1, 2


@dataclass
class RunConfig:
    subcommand: str
    input: Optional[Path] = None
    output: Optional[Path] = None
    seed: int = 0
    samples: Optional[int] = None
    threads: int = 1
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if any(v <= 0 for v in self.tolerances.values()):
            raise ValueError("tolerances must be positive")
        if self.threads < 1:
            raise ValueError("thread count must be at least 1")


def _read_config(path: Path) -> PointConfiguration:
    with open(path) as fh:
        return PointConfiguration.from_json(json.load(fh))


def _emit(doc: dict, out: Optional[Path]) -> None:
    doc = {"schema_version": SCHEMA_VERSION, **doc}
    text = json.dumps(doc, indent=2, default=_jsonable)
    if out is None:
        print(text)
    else:
        Path(out).write_text(text + "\n")


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, complex):
        return [x.real, x.imag]
    return str(x)


def _int_list(text: str) -> list:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen(args, cfg: RunConfig) -> int:
    rng = np.random.default_rng(cfg.seed)
    config = random_config(rng, ConfigSpec(args.n, min_sep=args.min_sep))
    _emit({"command": "gen", "seed": cfg.seed, **config.to_json()}, cfg.output)
    return OK


def cmd_delaunay(args, cfg: RunConfig) -> int:
    t = delaunay(_read_config(cfg.input))
    _emit({"command": "delaunay", "triangulation": t.to_json(), "is_delaunay": t.is_delaunay()}, cfg.output)
    return OK


def cmd_measure(args, cfg: RunConfig) -> int:
    config = _read_config(cfg.input)
    t = delaunay(config)
    exclude = tuple(args.exclude) if args.exclude else config.gauge
    if len(exclude) != 3:
        raise ValueError("--exclude needs exactly three vertex ids")
    D = kahler_matrix(t)
    keep = [v for v in D.labels if v not in exclude]
    doc = {
        "command": "measure",
        "exclude": list(exclude),
        "det": det_excluding(t, exclude, D),
        "normalized_det": normalized_det(t, exclude, D) if t.inf in exclude else None,
        "eigenvalues": D.restrict(keep).eigenvalues(),
        "prepotential": prepotential(t),
    }
    _emit(doc, cfg.output)
    return OK


def _forms_report(check: str, t, rng, edge) -> tuple:
    """Return (report, asserted ok) for one ``forms --check`` value."""
    N = t.config.n_free
    D = free_kahler_matrix(t)
    omega = omega_total(t)
    if check == "omega":
        err = float(np.abs(omega.matrix - kahler_two_form(D).matrix).max() / np.abs(omega.matrix).max())
        return {"matrix": omega.matrix, "labels": omega.labels, "vs_kahler_matrix": err}, err <= 1e-9
    if check == "wp":
        wp = wp_form(t, random_decoration(t, rng))
        err = float(np.abs(wp.matrix - 2 * omega.matrix).max() / np.abs(omega.matrix).max())
        return {"wp_vs_twice_omega": err}, err <= 1e-9
    if check == "topcoeff":
        pf, det = top_coefficient(omega, N), D.det()
        err = abs(pf - (-1) ** N * det) / abs(det)
        return {"pfaffian": pf, "det": det, "sign": (-1) ** N, "rel_error": err}, err <= 1e-8
    if check == "ptolemy":
        dec = random_decoration(t, rng)
        P = t._pts
        rows = []
        for u, v in t.interior_edges():
            p, q = t.apex(u, v), t.apex(v, u)
            if t.inf in (p, q):
                continue
            L = lambda i, j: lambda_length(P[i], P[j], dec.radii[i], dec.radii[j])  # noqa: E731
            res = L(u, v) * L(p, q) - L(p, u) * L(v, q) - L(u, q) * L(v, p)
            rows.append({"edge": [u, v], "theta": t.theta(u, v), "residual": res})
        return {"quads": rows}, True
    # flip-discontinuity
    if edge is None:
        edge = min(t.interior_edges(), key=lambda e: abs(t.theta(*e)))
    fd = flip_discontinuity(t, tuple(edge))
    return {"edge": list(edge), "lhs": fd.lhs.coeffs, "rhs": fd.rhs.coeffs,
            "scale": fd.scale, "residual": fd.residual}, True


def cmd_forms(args, cfg: RunConfig) -> int:
    t = delaunay(_read_config(cfg.input))
    if t.config.n_free == 0:
        raise ValueError("forms need at least one free point")
    report, ok = _forms_report(args.check, t, np.random.default_rng(cfg.seed), args.edge)
    _emit({"command": "forms", "check": args.check, "pass": bool(ok), **report}, cfg.output)
    return OK if ok else CHECK_FAILED


def cmd_regions(args, cfg: RunConfig) -> int:
    t = delaunay(_read_config(cfg.input))
    if args.face not in t.faces:
        raise ValueError(f"no face with id {args.face}")
    n = cfg.samples or 10**6
    if args.kind == "B":
        est, exact = integral_B(t.face_points(args.face), n, cfg.seed), closed_form_I()
    else:
        est, exact = integral_R(t, args.face, n, cfg.seed), closed_form_I1(t, args.face)
    sigma = abs(est.mean - exact) / est.stderr
    doc = {"command": "regions", "face": args.face, "vertices": list(t.faces[args.face]), "kind": args.kind,
           "estimate": est.mean, "stderr": est.stderr, "closed_form": exact, "sigma_distance": sigma,
           "samples": n, "seed": cfg.seed, "pass": sigma <= 3.0}
    _emit(doc, cfg.output)
    return OK if sigma <= 3.0 else CHECK_FAILED


def cmd_voronoi(args, cfg: RunConfig) -> int:
    t = delaunay(_read_config(cfg.input))
    g = dual_graph(t)
    length = dual_length_hyperbolic if args.lengths == "hyperbolic" else dual_length_flat
    doc = {
        "command": "voronoi",
        "lengths": args.lengths,
        "nodes": {str(f): g.nodes[f] for f in sorted(g.nodes)},
        "edges": [{"primal": list(d.edge), "faces": list(d.faces), "theta_n": d.theta_n, "theta_s": d.theta_s,
                   "length": length(d)} for d in g.edges],
    }
    _emit(doc, cfg.output)
    return OK


def cmd_volume(args, cfg: RunConfig) -> int:
    n = cfg.samples or 10**5
    est = estimate_volume(args.N, n, cfg.seed, workers=cfg.threads, proposal=args.proposal)
    doc = {"command": "volume", "N": args.N, "V": est.to_json(), "Z": est.mean / math.factorial(args.N),
           "proposal": args.proposal}
    _emit(doc, cfg.output)
    return OK


def cmd_growth(args, cfg: RunConfig) -> int:
    n = cfg.samples or 10**5
    check = conditional_growth_check(_read_config(args.base), n, cfg.seed, workers=cfg.threads)
    ok = check.passed_refined if args.refined else check.passed
    _emit({"command": "growth", "refined": args.refined, **check.to_json()}, cfg.output)
    return OK if ok else CHECK_FAILED


def cmd_verify_all(args, cfg: RunConfig) -> int:
    echo = (lambda s: print(s, file=sys.stderr)) if args.verbose else None
    doc = run_suite(cfg.seed, args.quick, echo)
    _emit({"command": "verify-all", **{k: v for k, v in doc.items() if k != "schema_version"}}, cfg.output)
    return OK if doc["passed"] else CHECK_FAILED


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="delmeasure", description=__doc__.splitlines()[0])
    p.add_argument("--threads", type=int, default=None, help="worker processes (default from DELMEASURE_THREADS)")
    p.add_argument("--json", action="store_true", help="accepted for compatibility; output is always JSON")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def add(name, fn, needs_input=True, seed_default=0):
        s = sub.add_parser(name)
        if needs_input:
            s.add_argument("--input", type=Path, required=True)
        s.add_argument("--output", type=Path)
        s.add_argument("--seed", type=int, default=seed_default)
        s.set_defaults(func=fn)
        return s

    s = add("gen", cmd_gen, needs_input=False)
    s.add_argument("--n", type=int, required=True, help="number of free points")
    s.add_argument("--min-sep", type=float, default=0.05)

    add("delaunay", cmd_delaunay)

    s = add("measure", cmd_measure)
    s.add_argument("--exclude", type=_int_list, help="three vertex ids, e.g. 0,1,2")

    s = add("forms", cmd_forms)
    s.add_argument("--check", choices=["omega", "wp", "ptolemy", "topcoeff", "flip-discontinuity"], required=True)
    s.add_argument("--edge", type=_int_list, help="edge u,v for flip-discontinuity")

    s = add("regions", cmd_regions)
    s.add_argument("--face", type=int, required=True)
    s.add_argument("--kind", choices=["R", "B"], required=True)
    s.add_argument("--samples", type=int)

    s = add("voronoi", cmd_voronoi)
    s.add_argument("--lengths", choices=["hyperbolic", "flat"], default="hyperbolic")

    s = add("volume", cmd_volume, needs_input=False)
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--samples", type=int)
    s.add_argument("--proposal", choices=["mixture", "sphere"], default="mixture")

    s = add("growth", cmd_growth, needs_input=False)
    s.add_argument("--base", type=Path, required=True)
    s.add_argument("--samples", type=int)
    s.add_argument("--refined", action="store_true")

    s = add("verify-all", cmd_verify_all, needs_input=False, seed_default=7)
    s.add_argument("--quick", action="store_true")
    s.add_argument("--verbose", action="store_true", help="print one line per check to stderr")
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = RunConfig(
            args.subcommand,
            getattr(args, "input", None),
            args.output,
            args.seed,
            getattr(args, "samples", None),
            args.threads if args.threads is not None else default_workers(),
        )
        if cfg.samples is not None and cfg.samples <= 0:
            raise ValueError("--samples must be positive")
        return args.func(args, cfg)
    except (OSError, ValueError, KeyError, DegenerateError) as exc:
        print(f"delmeasure {args.subcommand}: error: {exc}", file=sys.stderr)
        return USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
