"""Command line front end: model catalog, divergence evaluation, verification.

Subcommands:

    models     list the builtin catalog and parameter schemas
    div        evaluate a divergence for one or more point pairs
    verify     run a named verification suite, emit a JSON report
    sweep      evaluate divergences over a coordinate grid for plotting
    probe-f    scatter of the dual divergence against the reversed divergence

All randomness is seed-determined; identical invocations produce byte-identical
output. CSV output is RFC 4180 (CRLF, minimal quoting) with 17 significant
digits so doubles round-trip exactly; JSON rows are emitted one per line,
verification reports as a single JSON document. Wall-clock timing goes to
stderr, never into report documents.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional

import numpy as np

from .config import DEFAULT_CONFIG, ToleranceConfig
from .divergence import DivergenceKind, _divergence_many
from .eguchi import symmetry_probe
from .errors import DualGeoError, InvalidModelSpec, ShootingNoConvergence
from .manifold import ManifoldModel, Point, builtin_schemas, parse_model_spec
from .sampling import sample_points
from .verify import default_models, run_suites

KIND_NAMES = {
    "ay": DivergenceKind.AY,
    "canonical": DivergenceKind.CANONICAL,
    "dual": DivergenceKind.CANONICAL_DUAL,
    "pseudonorm": DivergenceKind.PSEUDO_NORM,
    "oracle": DivergenceKind.ORACLE_KL,
}


def _f17(x) -> str:
    return format(float(x), ".17g")


def _csv_line(fields) -> str:
    out = []
    for f in fields:
        s = f if isinstance(f, str) else _f17(f) if isinstance(f, (float, np.floating)) else str(f)
        if any(c in s for c in ",\"\r\n"):
            s = '"' + s.replace('"', '""') + '"'
        out.append(s)
    return ",".join(out) + "\r\n"


class _Output:
    def __init__(self, path: Optional[str]):
        self.path = path
        self._fh = open(path, "w", newline="") if path else sys.stdout

    def write(self, text: str):
        self._fh.write(text)

    def close(self):
        if self.path:
            self._fh.close()


def _tolerances(args) -> ToleranceConfig:
    cfg = DEFAULT_CONFIG
    updates = {}
    if args.tol_ode is not None:
        updates["ode_rel_tol"] = args.tol_ode
        updates["ode_abs_tol"] = args.tol_ode * 1e-2
    if args.tol_shoot is not None:
        updates["shoot_tol"] = args.tol_shoot
    if args.quad_nodes is not None:
        updates["quad_nodes"] = args.quad_nodes
    if args.fd_step is not None:
        updates["fd_step"] = args.fd_step
    return cfg.with_(**updates) if updates else cfg


def _load_model(spec: str) -> ManifoldModel:
    if spec.strip().startswith("{"):
        return parse_model_spec(json.loads(spec))
    return parse_model_spec(spec)


def _parse_point(model: ManifoldModel, text: str, coords: str) -> np.ndarray:
    vals = np.array([float(tok) for tok in text.split(",")])
    vals = model.convert_coords(vals, coords)
    if vals.shape[0] != model.dim:
        raise InvalidModelSpec(
            f"point {text!r} has {vals.shape[0]} coordinates; model needs {model.dim}"
        )
    return vals


def _pool_map(fn, items, threads):
    """Worker-pool map preserving input order; default size is the host's
    available parallelism. Results are ordered by input index, so output is
    byte-identical regardless of completion order."""
    workers = threads if threads and threads > 0 else (os.cpu_count() or 1)
    if workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _add_common(parser):
    parser.add_argument("--tol-ode", type=float, default=None, help="ODE relative tolerance")
    parser.add_argument("--tol-shoot", type=float, default=None, help="shooting tolerance")
    parser.add_argument("--quad-nodes", type=int, default=None, help="quadrature node count")
    parser.add_argument("--fd-step", type=float, default=None, help="finite-difference step")
    parser.add_argument("--format", choices=["csv", "json"], default="csv")
    parser.add_argument("--output", default=None, help="output file (default stdout)")
    parser.add_argument("--seed", type=int, default=0, help="seed for any sampling")
    parser.add_argument("--threads", type=int, default=None, help="worker pool size")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_models(args) -> int:
    schemas = builtin_schemas()
    if args.format == "json":
        print(json.dumps(schemas, indent=2))
        return 0
    for name, info in schemas.items():
        print(f"{name}")
        print(f"    spec:    {info['params']}")
        print(f"    chart:   {info['chart']}")
        print(f"    domain:  {info['domain']}")
        print(f"    dually flat: {'yes' if info['dually_flat'] else 'no'}")
    return 0


def cmd_div(args) -> int:
    model = _load_model(args.model)
    cfg = _tolerances(args)
    kind = KIND_NAMES[args.kind]
    ps = [_parse_point(model, t, args.coords) for t in args.p]
    qs = [_parse_point(model, t, args.coords) for t in args.q]
    if len(ps) == 1 and len(qs) > 1:
        ps = ps * len(qs)
    if len(ps) != len(qs):
        raise InvalidModelSpec("-p and -q must be given equally often (or one -p for many -q)")

    def one(pair):
        p, q = pair
        try:
            val = _divergence_many(model, kind, p[None, :], q[None, :], cfg)[0]
            return float(val), True
        except DualGeoError:
            return float("nan"), False

    pairs = list(zip(ps, qs))
    results = _pool_map(one, pairs, args.threads)

    out = _Output(args.output)
    any_failed = False
    if args.format == "csv":
        out.write(_csv_line(["kind", "p", "q", "value", "quad_nodes", "converged"]))
    for (p, q), (val, ok) in zip(pairs, results):
        any_failed = any_failed or not ok
        if args.format == "csv":
            out.write(
                _csv_line(
                    [
                        args.kind,
                        ",".join(_f17(x) for x in p),
                        ",".join(_f17(x) for x in q),
                        val,
                        cfg.quad_nodes,
                        ok,
                    ]
                )
            )
        else:
            out.write(
                json.dumps(
                    {
                        "kind": args.kind,
                        "p": [float(x) for x in p],
                        "q": [float(x) for x in q],
                        "value": None if not ok else float(val),
                        "quad_nodes": cfg.quad_nodes,
                        "converged": bool(ok),
                    }
                )
                + "\n"
            )
    out.close()
    return 3 if any_failed else 0


def cmd_verify(args) -> int:
    cfg = _tolerances(args)
    models = [_load_model(args.model)] if args.model else default_models()
    report = run_suites(models, args.suite, samples=args.samples, seed=args.seed, cfg=cfg)
    doc = json.dumps(report.to_dict(), indent=2) + "\n"
    out = _Output(args.output)
    out.write(doc)
    out.close()
    print(f"suite {args.suite}: {'pass' if report.passed else 'FAIL'} "
          f"in {report.duration:.1f}s", file=sys.stderr)
    return 0 if report.passed else 1


def _parse_grid(model: ManifoldModel, spec: str) -> List[np.ndarray]:
    axes = []
    for part in spec.split(","):
        toks = part.split(":")
        if len(toks) != 3:
            raise InvalidModelSpec(f"grid axis {part!r} must be min:max:count")
        lo, hi, cnt = float(toks[0]), float(toks[1]), int(toks[2])
        if cnt < 1:
            raise InvalidModelSpec("grid count must be >= 1")
        axes.append(np.linspace(lo, hi, cnt))
    if len(axes) != model.dim:
        raise InvalidModelSpec(f"grid needs {model.dim} axes, got {len(axes)}")
    return axes


def cmd_sweep(args) -> int:
    model = _load_model(args.model)
    cfg = _tolerances(args)
    kinds = [KIND_NAMES[k] for k in args.kind]
    p = _parse_point(model, args.p, args.coords)
    axes = _parse_grid(model, args.grid)
    mesh = np.meshgrid(*axes, indexing="ij")
    Q = np.stack([m.ravel() for m in mesh], axis=1)

    def one(q):
        vals = []
        ok_all = True
        for kind in kinds:
            try:
                v = _divergence_many(model, kind, p[None, :], q[None, :], cfg)[0]
                vals.append(float(v))
            except DualGeoError:
                vals.append(float("nan"))
                ok_all = False
        return q, vals, ok_all

    rows = _pool_map(one, list(Q), args.threads)

    out = _Output(args.output)
    if args.format == "csv":
        header = [f"q{i+1}" for i in range(model.dim)] + list(args.kind) + ["converged"]
        out.write(_csv_line(header))
        for q, vals, ok in rows:
            out.write(_csv_line([*q, *vals, ok]))
    else:
        for q, vals, ok in rows:
            rec = {"q": [float(x) for x in q], "converged": bool(ok)}
            rec.update(
                {k: (None if np.isnan(v) else v) for k, v in zip(args.kind, vals)}
            )
            out.write(json.dumps(rec) + "\n")
    out.close()
    return 0


def cmd_probe_f(args) -> int:
    model = _load_model(args.model)
    cfg = _tolerances(args)
    if args.samples < 10:
        raise InvalidModelSpec("probe-f needs at least 10 samples")
    rng = np.random.default_rng(args.seed)
    if args.p is not None:
        p = Point(_parse_point(model, args.p, args.coords))
    else:
        p = Point(sample_points(model, 1, rng, shrink=0.6)[0])
    qs = [Point(x) for x in sample_points(model, args.samples, rng, shrink=0.85)]
    res = symmetry_probe(model, p, qs, cfg)

    out = _Output(args.output)
    if args.format == "csv":
        out.write(_csv_line(["index", "dual_divergence", "reversed_divergence"]))
        for i, (d, r) in enumerate(res.pairs):
            out.write(_csv_line([i, d, r]))
    else:
        out.write(
            json.dumps(
                {
                    "p": [float(x) for x in p.coords],
                    "pairs": [[float(d), float(r)] for d, r in res.pairs],
                    "skipped": [int(i) for i in res.skipped],
                    "rank_agreement": float(res.rank_agreement),
                    "max_equality_error": float(res.max_equality_error),
                }
            )
            + "\n"
        )
    out.close()
    print(
        f"rank_agreement={res.rank_agreement:.6f} skipped={len(res.skipped)}/{args.samples}",
        file=sys.stderr,
    )
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="dualgeo",
        description="Dual-geometry toolkit: geodesics, transports and divergences "
        "on statistical manifolds",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p_models = sub.add_parser("models", help="list builtin models")
    p_models.add_argument("--format", choices=["text", "json"], default="text")
    p_models.set_defaults(fn=cmd_models)

    p_div = sub.add_parser("div", help="evaluate a divergence for point pairs")
    p_div.add_argument("--model", required=True, help="model spec, e.g. categorical:2")
    p_div.add_argument("--kind", choices=list(KIND_NAMES), default="canonical")
    p_div.add_argument(
        "-p",
        action="append",
        required=True,
        help="first point, comma-separated (use -p=-1,2 when the first value is negative)",
    )
    p_div.add_argument("-q", action="append", required=True, help="second point")
    p_div.add_argument("--coords", choices=["chart", "mixture", "natural"], default="chart")
    _add_common(p_div)
    p_div.set_defaults(fn=cmd_div)

    p_ver = sub.add_parser(
        "verify",
        help="run a verification suite",
        epilog=(
            "Report schema (single JSON document): {suite, models, seed, samples, "
            "checks: [{check_id, max_error, tolerance, passed, samples}], "
            "overall_pass}. Classification residuals appear as checks named "
            "verdict_*, flatness_residual and sectional_curvature_error. "
            "Wall-clock timing is printed to stderr, never into the document."
        ),
    )
    p_ver.add_argument("--model", default=None, help="model spec (default: all builtins)")
    p_ver.add_argument(
        "--suite",
        default="all",
        choices=["eguchi", "pathindep", "gradient", "collapse", "symmetry", "classification", "all"],
    )
    p_ver.add_argument("--samples", type=int, default=3)
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.add_argument("--output", default=None)
    p_ver.add_argument("--tol-ode", type=float, default=None)
    p_ver.add_argument("--tol-shoot", type=float, default=None)
    p_ver.add_argument("--quad-nodes", type=int, default=None)
    p_ver.add_argument("--fd-step", type=float, default=None)
    p_ver.set_defaults(fn=cmd_verify)

    p_sweep = sub.add_parser("sweep", help="divergence values over a coordinate grid")
    p_sweep.add_argument("--model", required=True)
    p_sweep.add_argument("--kind", action="append", choices=list(KIND_NAMES), required=True)
    p_sweep.add_argument("-p", required=True, help="fixed first point")
    p_sweep.add_argument("--grid", required=True, help="per-axis min:max:count, comma separated")
    p_sweep.add_argument("--coords", choices=["chart", "mixture", "natural"], default="chart")
    _add_common(p_sweep)
    p_sweep.set_defaults(fn=cmd_sweep)

    p_probe = sub.add_parser("probe-f", help="dual-vs-reversed divergence scatter")
    p_probe.add_argument("--model", required=True)
    p_probe.add_argument("-p", default=None, help="base point (default: sampled)")
    p_probe.add_argument("--samples", type=int, default=20)
    p_probe.add_argument("--coords", choices=["chart", "mixture", "natural"], default="chart")
    _add_common(p_probe)
    p_probe.set_defaults(fn=cmd_probe_f)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except InvalidModelSpec as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ShootingNoConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except DualGeoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
