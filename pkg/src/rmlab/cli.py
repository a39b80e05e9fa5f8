"""Command-line front end: construct, norm, verify, classify, sweep.

Output is machine-first: JSON verdicts (floats at 17 significant digits,
keys sorted, so identical config and seed give byte-identical bytes) and
RFC-4180 CSV traces.  Exit status: 0 on success, 1 on probe failure,
2 on configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .analysis import classify
from .constructions import build_tree, power_split, shell_thresholds, sparse_function, tree_function
from .funcrep import ParamSpace, StepFunction
from .geometry import Cube, Domain
from .norms import rm_norm_estimate
from .verification import PROBES, ProbeResult

__all__ = ["main"]


class _F(float):
    """Float with fixed 17-significant-digit repr for deterministic JSON."""

    def __repr__(self) -> str:  # noqa: D105
        if math.isinf(self):
            return "1e999" if self > 0 else "-1e999"
        return format(float(self), ".17g")


def _wrap_floats(obj):
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, float):
        return _F(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return _F(float(obj))
    if isinstance(obj, dict):
        return {k: _wrap_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_wrap_floats(v) for v in obj]
    return obj


def canonical_json(obj) -> str:
    return json.dumps(_wrap_floats(obj), indent=2, sort_keys=True) + "\n"


def _write_output(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _write_csv(rows: list[dict], path: str) -> None:
    if not rows:
        return
    fieldnames = list(rows[0].keys())
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (format(v, ".17g") if isinstance(v, float) else v) for k, v in row.items()})


def _parse_real(text: str) -> float:
    if text.strip().lower() in ("inf", "+inf", "infinity"):
        return math.inf
    return float(text)


def _add_param_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--p", type=_parse_real, default=None)
    sub.add_argument("--q", type=_parse_real, default=None)
    sub.add_argument("--alpha", type=float, default=None)


def _apply_config(args: argparse.Namespace, parser: argparse.ArgumentParser) -> argparse.Namespace:
    """Fill unset flags from a JSON config file mirroring flag names."""
    if getattr(args, "config", None) is None:
        return args
    try:
        data = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"config: {exc}")
    if not isinstance(data, dict):
        parser.error("config: top-level JSON object expected")
    for key, value in data.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            parser.error(f"config: unknown field {key!r}")
        if getattr(args, attr) is None:
            setattr(args, attr, value)
    return args


def _resolved_config(args: argparse.Namespace, skip=("func", "config")) -> dict:
    out = {}
    for key, value in sorted(vars(args).items()):
        if key in skip or callable(value):
            continue
        out[key] = value
    return out


def _params_or_exit(args, parser, require=("p", "q", "alpha")) -> ParamSpace:
    for name in require:
        if getattr(args, name, None) is None:
            parser.error(f"missing required flag --{name}")
    try:
        return ParamSpace(args.p, args.q, args.alpha)
    except ValueError as exc:
        parser.error(str(exc))
    raise AssertionError


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_construct(args, parser) -> int:
    name = args.construction
    meta: dict = {"construction": name, "config": _resolved_config(args)}
    function_doc: dict | None = None
    if name == "sparse":
        if args.L is None:
            parser.error("sparse construction needs --L")
        f = sparse_function(args.L, args.n)
        function_doc = f.to_json_dict()
        meta["pieces"] = len(f)
        meta["volumes_head"] = [1.0 / l for l in range(1, min(args.L, 16) + 1)]
    elif name == "tree":
        params = _params_or_exit(args, parser)
        if args.depth is None:
            parser.error("tree construction needs --depth")
        try:
            tree = build_tree(args.n, args.depth, params)
        except ValueError as exc:
            parser.error(str(exc))
        f = tree_function(tree)
        function_doc = f.to_json_dict()
        meta.update(
            {
                "pieces": len(f),
                "cutoff": tree.cutoff,
                "domain_side": tree.domain_side,
                "lengths": list(tree.lengths()),
                "raw_distances": list(tree.raw_distances()),
                "distances": list(tree.distances()),
                "radii": list(tree.radii()),
                "gaps": list(tree.gaps()),
                "heights": [tree.height(i) for i in range(tree.depth + 1)],
            }
        )
    elif name == "shells":
        for flag in ("p", "alpha"):
            if getattr(args, flag) is None:
                parser.error(f"shell construction needs --{flag}")
        if args.K is None:
            parser.error("shell construction needs --K")
        try:
            shells = shell_thresholds(args.p, args.alpha, args.K)
        except ValueError as exc:
            parser.error(str(exc))
        f = StepFunction(((Cube((-1.0,), 2.0), 1.0),))
        function_doc = f.to_json_dict()
        meta.update(
            {
                "normalizer": shells.normalizer,
                "exponent": shells.exponent,
                "thresholds": list(shells.thresholds),
            }
        )
    elif name == "power-split":
        params = _params_or_exit(args, parser)
        base = args.grid if args.grid is not None else 2
        try:
            split = power_split(base, args.n, params)
        except ValueError as exc:
            parser.error(str(exc))
        function_doc = {
            "kind": "radial-power",
            "dim": split.dim,
            "exponent": split.radial_exponent,
            "inner_cube": {"lower": list(split.inner_cube.lower), "side": split.inner_cube.side},
        }
        meta.update(
            {
                "grid_base": split.grid_base,
                "radial_exponent": split.radial_exponent,
                "lq_exponent": split.lq_exponent,
                "ring_score_floor": split.ring_score_floor,
                "orthant_sphere_measure": split.orthant_sphere_measure,
            }
        )
    else:  # pragma: no cover - argparse restricts choices
        parser.error(f"unknown construction {name!r}")

    _write_output(canonical_json(function_doc), args.output)
    if args.meta is not None:
        _write_output(canonical_json(meta), args.meta)
    return 0


def _cmd_norm(args, parser) -> int:
    params = _params_or_exit(args, parser)
    if args.function is None:
        parser.error("missing required flag --function")
    try:
        f = StepFunction.from_json(Path(args.function).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        parser.error(f"function: {exc}")
    lows = [c.lower for c, _ in f.pieces]
    highs = [c.upper for c, _ in f.pieces]
    n = f.dim
    if args.root is not None:
        coords = [float(v) for v in args.root.split(",")]
        if args.side is None:
            parser.error("--root needs --side")
        root = Cube(tuple(coords), args.side)
    else:
        lo = tuple(min(l[j] for l in lows) for j in range(n))
        hi = tuple(max(h[j] for h in highs) for j in range(n))
        root = Cube(lo, max(b - a for a, b in zip(lo, hi)))
    depth = args.depth if args.depth is not None else 6
    offsets = None
    if args.offsets is not None:
        offsets = tuple(float(v) for v in args.offsets.split(","))
    domain = Domain.whole_space(n) if args.domain in (None, "rn") else Domain.of_cube(root)
    try:
        est = rm_norm_estimate(f, params, root, depth, offsets=offsets, domain=domain)
    except ValueError as exc:
        parser.error(str(exc))
    doc = est.as_dict()
    doc["config"] = _resolved_config(args)
    _write_output(canonical_json(doc), args.output)
    if args.certificate_csv is not None and est.certificate is not None:
        rows = [
            {**{f"lower_{j}": c.lower[j] for j in range(n)}, "side": c.side}
            for c in est.certificate
        ]
        _write_csv(rows, args.certificate_csv)
    return 0


def _cmd_classify(args, parser) -> int:
    for name in ("p", "q", "alpha"):
        if getattr(args, name) is None:
            parser.error(f"missing required flag --{name}")
    kind = "whole-space" if args.domain in (None, "rn") else "cube"
    try:
        res = classify(args.p, args.q, args.alpha, kind)
    except ValueError as exc:
        parser.error(str(exc))
    doc = {"verdict": res.verdict, "theta": res.theta, "tag": res.tag, "config": _resolved_config(args)}
    _write_output(canonical_json(doc), args.output)
    return 0


def _probe_kwargs(name: str, args) -> dict:
    kwargs: dict = {}
    if args.seed is not None and name in (
        "riesz-identity", "q23-identity", "embedding", "oracle-equivalence", "inequalities"
    ):
        kwargs["seed"] = args.seed
    if args.K is not None and name == "lem1e":
        kwargs["shell_count"] = args.K
    if args.depth is not None and name == "prop-q":
        kwargs["depth"] = args.depth
    if args.grid is not None and name == "q23-identity":
        kwargs["grid_cells"] = args.grid
    return kwargs


def _cmd_verify(args, parser) -> int:
    names = args.probes or sorted(PROBES)
    for name in names:
        if name not in PROBES:
            parser.error(f"unknown probe {name!r}; available: {', '.join(sorted(PROBES))}")
    threads = int(os.environ.get("RMLAB_THREADS", "0")) or None

    def run(name: str) -> ProbeResult:
        return PROBES[name](**_probe_kwargs(name, args))

    if threads == 1 or len(names) == 1:
        results = [run(name) for name in names]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, names))
    results.sort(key=lambda r: r.name)

    verdicts = []
    for res in results:
        doc = res.as_dict()
        doc["config"] = {**_resolved_config(args), "probe": res.name}
        verdicts.append(doc)
        if args.output is not None:
            outdir = Path(args.output)
            outdir.mkdir(parents=True, exist_ok=True)
            _write_output(canonical_json(doc), str(outdir / f"{res.name}.json"))
            if res.trace_rows:
                _write_csv(res.trace_rows, str(outdir / f"{res.name}.csv"))
    summary = {"probes": verdicts, "all_pass": all(r.passed for r in results)}
    if args.output is None:
        _write_output(canonical_json(summary), None)
    else:
        _write_output(canonical_json(summary), str(Path(args.output) / "summary.json"))
    for res in results:
        sys.stderr.write(f"{res.name}: {'PASS' if res.passed else 'FAIL'} ({res.elapsed_s:.2f}s)\n")
    return 0 if all(r.passed for r in results) else 1


def _cmd_sweep(args, parser) -> int:
    res = PROBES["classify-sweep"]()
    if args.output is not None and args.output != "-":
        _write_csv(res.trace_rows, args.output)
    doc = res.as_dict()
    doc["config"] = _resolved_config(args)
    if args.json is not None:
        _write_output(canonical_json(doc), args.json)
    elif args.output in (None, "-"):
        _write_output(canonical_json(doc), None)
    return 0 if res.passed else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rmlab", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    construct = subs.add_parser("construct", help="emit a constructed function as JSON")
    construct.add_argument("construction", choices=("sparse", "tree", "shells", "power-split"))
    _add_param_flags(construct)
    construct.add_argument("--n", type=int, default=1)
    construct.add_argument("--L", type=int, default=None, help="sparse truncation length")
    construct.add_argument("--depth", type=int, default=None)
    construct.add_argument("--K", type=int, default=None, help="shell count")
    construct.add_argument("--grid", type=int, default=None, help="grid base for power-split")
    construct.add_argument("--seed", type=int, default=None)
    construct.add_argument("--config", default=None)
    construct.add_argument("-o", "--output", default=None)
    construct.add_argument("--meta", default=None, help="construction metadata JSON path")
    construct.set_defaults(func=_cmd_construct)

    norm = subs.add_parser("norm", help="partition-norm estimate for a step function")
    _add_param_flags(norm)
    norm.add_argument("--function", default=None, help="StepFunction JSON path")
    norm.add_argument("--domain", choices=("rn", "cube"), default=None)
    norm.add_argument("--n", type=int, default=None)
    norm.add_argument("--depth", type=int, default=None)
    norm.add_argument("--offsets", default=None, help="comma-separated grid shifts in [0,1)")
    norm.add_argument("--root", default=None, help="comma-separated lower corner of the search root")
    norm.add_argument("--side", type=float, default=None, help="side of the search root")
    norm.add_argument("--grid", type=int, default=None)
    norm.add_argument("--K", type=int, default=None)
    norm.add_argument("--seed", type=int, default=None)
    norm.add_argument("--config", default=None)
    norm.add_argument("-o", "--output", default=None)
    norm.add_argument("--certificate-csv", default=None)
    norm.set_defaults(func=_cmd_norm)

    cls = subs.add_parser("classify", help="space classification for one parameter point")
    _add_param_flags(cls)
    cls.add_argument("--domain", choices=("rn", "cube"), default=None)
    cls.add_argument("--seed", type=int, default=None)
    cls.add_argument("--config", default=None)
    cls.add_argument("-o", "--output", default=None)
    cls.set_defaults(func=_cmd_classify)

    verify = subs.add_parser("verify", help="run named verification probes")
    verify.add_argument("probes", nargs="*", metavar="probe")
    _add_param_flags(verify)
    verify.add_argument("--n", type=int, default=None)
    verify.add_argument("--depth", type=int, default=None)
    verify.add_argument("--grid", type=int, default=None)
    verify.add_argument("--K", type=int, default=None)
    verify.add_argument("--seed", type=int, default=None)
    verify.add_argument("--config", default=None)
    verify.add_argument("-o", "--output", default=None, help="directory for verdicts and traces")
    verify.set_defaults(func=_cmd_verify)

    sweep = subs.add_parser("sweep", help="classification sweep as CSV")
    sweep.add_argument("--seed", type=int, default=None)
    sweep.add_argument("--config", default=None)
    sweep.add_argument("-o", "--output", default=None, help="CSV path")
    sweep.add_argument("--json", default=None, help="JSON verdict path")
    sweep.set_defaults(func=_cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    args = _apply_config(args, parser)
    return args.func(args, parser)


if __name__ == "__main__":
    sys.exit(main())
