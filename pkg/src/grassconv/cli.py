"""Command-line front end: eligibility checks, density verdicts, support
sampling, convolution-power analysis, and the self-test suite.

Reports are deterministic given the flags and seed: JSON is emitted with
sorted keys and 12-significant-digit floats, and the only volatile field is
the timestamp isolated inside metadata.  Exit codes: 0 success, 1 usage
error, 2 numerical inconsistency, 3 self-test failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum

import numpy as np

from . import __version__
from .cartan import (Configuration, NotInGroupError, NumericalInconsistencyError,
                     cartan_from_configuration, configuration_of, is_eligible)
from .density import SAMPLE_TOL, DensityVerdict, decide, support_sample
from .linalg import Field, Tolerance
from .powers import PowerAnalysis, min_power
from .structure import CartanElement, GrassmannShape


class _Parser(argparse.ArgumentParser):
    """argparse variant whose usage errors exit with status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    shape: GrassmannShape
    field: Field
    x: CartanElement | None
    y: CartanElement | None
    trials: int
    samples: int
    seed: int
    tol: Tolerance
    sample_tol: float
    fmt: str
    out: str | None
    threads: int


def _parse_values(text: str, p: int) -> tuple[float, ...]:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise ValueError(f"malformed value list {text!r}") from exc
    if len(vals) != p:
        raise ValueError(f"expected {p} values, got {len(vals)}")
    return vals


def _element(shape: GrassmannShape, conf_text: str | None,
             values_text: str | None, name: str) -> CartanElement:
    if (conf_text is None) == (values_text is None):
        raise ValueError(f"provide exactly one of --{name} or --{name}-values")
    if values_text is not None:
        return CartanElement(shape, _parse_values(values_text, shape.p))
    conf = Configuration.parse(conf_text)
    return cartan_from_configuration(shape, conf)


def _config_from_args(args, need_x: bool = True, need_y: bool = True) -> RunConfig:
    shape = GrassmannShape(args.p, args.q)
    field = Field(args.field)
    tol = Tolerance(rank_rel=args.tol_rank, entry_abs=args.tol_entry)
    x = _element(shape, args.x, args.x_values, "x") if need_x else None
    y = _element(shape, args.y, args.y_values, "y") if need_y else None
    if args.trials < 0 or args.samples < 1 or args.seed < 0 or args.threads < 1:
        raise ValueError("trials must be >= 0, samples >= 1, seed >= 0, threads >= 1")
    return RunConfig(shape, field, x, y, args.trials, args.samples, args.seed,
                     tol, args.sample_tol, args.format, args.out, args.threads)


# ---------------------------------------------------------------------------
# Serialization

def _round12(x: float) -> float:
    return float(f"{float(x):.12g}")


def _jsonable(obj):
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, (bool, str)) or obj is None:
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _round12(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _params_dict(cfg: RunConfig, args) -> dict:
    # thread count is an execution knob, not a parameter of the result, and
    # must not perturb the otherwise byte-stable report
    return {
        "p": cfg.shape.p, "q": cfg.shape.q, "field": cfg.field.value,
        "x": args.x if args.x is not None else args.x_values,
        "y": (args.y if args.y is not None else args.y_values) if hasattr(args, "y") else None,
        "trials": cfg.trials, "samples": cfg.samples, "seed": cfg.seed,
        "tol_rank": cfg.tol.rank_rel, "tol_entry": cfg.tol.entry_abs,
        "sample_tol": cfg.sample_tol,
    }


def _metadata() -> dict:
    return {"timestamp": datetime.now(timezone.utc).isoformat(), "version": __version__}


def _verdict_dict(v: DensityVerdict) -> dict:
    d = {
        "status": v.status.value,
        "eligibility": {
            "eligible": v.eligibility.eligible,
            "lhs": v.eligibility.lhs,
            "rhs": v.eligibility.rhs,
            "x_configuration": str(v.x_configuration),
            "y_configuration": str(v.y_configuration),
        },
        "tangent": None,
        "necessity": None,
        "note": v.note,
    }
    if v.tangent is not None:
        t = v.tangent
        d["tangent"] = {"criterion": t.criterion, "achieved_rank": t.achieved_rank,
                        "target_rank": t.target_rank, "witness_seed": t.witness_seed,
                        "trials": t.trials}
    if v.necessity is not None:
        d["necessity"] = {
            "samples": v.necessity.samples,
            "consistent": v.necessity.consistent,
            "clauses": [{"name": c.name, "required": c.required, "value": c.value,
                         "satisfied": c.satisfied, "violated": c.violated}
                        for c in v.necessity.clauses],
        }
    return d


def _power_dict(analysis: PowerAnalysis) -> dict:
    reports = []
    for r in analysis.reports:
        reports.append({
            "level": r.level, "samples": int(r.points.shape[0]),
            "verdict": r.verdict.value, "affine_dimension": r.affine_dim,
            "forced_zeros": r.forced_zeros,
            "min_abs_entry": {"min": r.min_abs_entry.min, "mean": r.min_abs_entry.mean,
                              "max": r.min_abs_entry.max},
            "note": r.note,
        })
    cert = None
    if analysis.certificate is not None:
        t = analysis.certificate
        cert = {"criterion": t.criterion, "achieved_rank": t.achieved_rank,
                "target_rank": t.target_rank, "witness_seed": t.witness_seed,
                "trials": t.trials, "level": analysis.certificate_level}
    return {"min_power": analysis.min_power, "certificate": cert,
            "bootstrap_point": (list(analysis.bootstrap_point.h)
                                if analysis.bootstrap_point else None),
            "reports": reports, "note": analysis.note}


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(payload: dict, out: str | None) -> None:
    _emit(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n", out)


# ---------------------------------------------------------------------------
# Subcommand handlers

def _cmd_eligibility(args) -> int:
    cfg = _config_from_args(args)
    cx = configuration_of(cfg.x, cfg.tol)
    cy = configuration_of(cfg.y, cfg.tol)
    verdict = is_eligible(cx, cy, cfg.shape.p)
    payload = {"schema": 1, "command": "eligibility", "params": _params_dict(cfg, args),
               "eligibility": {"eligible": verdict.eligible, "lhs": verdict.lhs,
                               "rhs": verdict.rhs, "x_configuration": str(cx),
                               "y_configuration": str(cy)},
               "metadata": _metadata()}
    if cfg.fmt == "text":
        word = "eligible" if verdict.eligible else "NOT eligible"
        _emit(f"pair X[{cx}], Y[{cy}] at p={cfg.shape.p} is {word}: "
              f"max(s,2u)+max(t,2v) = {verdict.lhs} vs 2p = {verdict.rhs}\n", cfg.out)
    elif cfg.fmt == "json":
        _emit_json(payload, cfg.out)
    else:
        raise ValueError("eligibility supports formats json and text")
    return 0


def _cmd_decide(args) -> int:
    cfg = _config_from_args(args)
    verdict = decide(cfg.x, cfg.y, cfg.field, cfg.trials, cfg.samples, cfg.seed,
                     cfg.tol, cfg.sample_tol, cfg.threads)
    payload = {"schema": 1, "command": "decide", "params": _params_dict(cfg, args),
               "verdict": _verdict_dict(verdict), "metadata": _metadata()}
    if cfg.fmt == "text":
        lines = [f"status: {verdict.status.value}",
                 f"eligibility: lhs={verdict.eligibility.lhs} rhs={verdict.eligibility.rhs} "
                 f"X[{verdict.x_configuration}] Y[{verdict.y_configuration}]"]
        if verdict.tangent:
            t = verdict.tangent
            lines.append(f"certificate: {t.criterion}-rank {t.achieved_rank}/{t.target_rank} "
                         f"witness_seed={t.witness_seed} after {t.trials} trials")
        if verdict.necessity:
            for c in verdict.necessity.clauses:
                val = "" if c.value is None else f" value={c.value:.12g}"
                lines.append(f"clause {c.name}{val}: required {c.required}, "
                             f"satisfied {c.satisfied}/{verdict.necessity.samples}")
        if verdict.note:
            lines.append(f"note: {verdict.note}")
        _emit("\n".join(lines) + "\n", cfg.out)
    elif cfg.fmt == "json":
        _emit_json(payload, cfg.out)
    else:
        raise ValueError("decide supports formats json and text")
    return 0


def _cmd_sample(args) -> int:
    cfg = _config_from_args(args)
    sample = support_sample(cfg.x, cfg.y, cfg.field, cfg.samples, cfg.seed,
                            cfg.tol, cfg.threads)
    if cfg.fmt == "json":
        payload = {"schema": 1, "command": "sample", "params": _params_dict(cfg, args),
                   "points": sample.points, "metadata": _metadata()}
        _emit_json(payload, cfg.out)
        return 0
    buf = io.StringIO()
    if cfg.fmt == "csv":
        params = _params_dict(cfg, args)
        for key in sorted(params):
            buf.write(f"# {key}: {params[key]}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([f"H{i + 1}" for i in range(cfg.shape.p)])
        for row in sample.points:
            writer.writerow([f"{v:.12g}" for v in row])
    else:
        header = "  ".join(f"{f'H{i + 1}':>16s}" for i in range(cfg.shape.p))
        buf.write(header + "\n")
        for row in sample.points:
            buf.write("  ".join(f"{v:16.12g}" for v in row) + "\n")
    _emit(buf.getvalue(), cfg.out)
    return 0


def _cmd_power(args) -> int:
    cfg = _config_from_args(args, need_y=False)
    analysis = min_power(cfg.x, cfg.field, cfg.trials, cfg.samples, cfg.seed,
                         cfg.tol, cfg.sample_tol, cfg.threads)
    payload = {"schema": 1, "command": "power", "params": _params_dict(cfg, args),
               "power": _power_dict(analysis), "metadata": _metadata()}
    if cfg.fmt == "text":
        lines = [f"min power: {analysis.min_power}"]
        for r in analysis.reports:
            lines.append(f"level {r.level}: {r.verdict.value} affine_dim={r.affine_dim} "
                         f"forced_zeros={r.forced_zeros} "
                         f"min|entry| max={r.min_abs_entry.max:.3e}")
        if analysis.note:
            lines.append(f"note: {analysis.note}")
        _emit("\n".join(lines) + "\n", cfg.out)
    elif cfg.fmt == "json":
        _emit_json(payload, cfg.out)
    else:
        raise ValueError("power supports formats json and text")
    return 0


def _cmd_selftest(args) -> int:
    from .selftest import run_selftest

    tol = Tolerance(rank_rel=args.tol_rank, entry_abs=args.tol_entry)
    shape = None
    if (args.p is None) != (args.q is None):
        raise ValueError("give both --p and --q or neither")
    if args.p is not None:
        shape = GrassmannShape(args.p, args.q)
    ok, lines = run_selftest(shape=shape, seed=args.seed, trials=args.trials,
                             samples=args.samples, tol=tol,
                             sample_tol=args.sample_tol, threads=args.threads)
    _emit("\n".join(lines) + "\n", args.out)
    return 0 if ok else 3


# ---------------------------------------------------------------------------
# Parser

def _add_common(sp, need_y: bool = True, need_x: bool = True) -> None:
    sp.add_argument("--p", type=int, required=True, help="rank p (p >= 2)")
    sp.add_argument("--q", type=int, required=True, help="q > p")
    sp.add_argument("--field", choices=[f.value for f in Field], default="R",
                    help="base field: R, C, or H (default R)")
    if need_x:
        sp.add_argument("--x", help="configuration of X, e.g. '2,1;0'")
        sp.add_argument("--x-values", help="explicit chamber values, e.g. '3.0,2.0,1.0'")
    if need_y:
        sp.add_argument("--y", help="configuration of Y")
        sp.add_argument("--y-values", help="explicit chamber values for Y")
    sp.add_argument("--trials", type=int, default=20, help="witness search draws (default 20)")
    sp.add_argument("--samples", type=int, default=500, help="support sample size (default 500)")
    sp.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    sp.add_argument("--tol-rank", type=float, default=1e-9, dest="tol_rank",
                    help="relative rank cutoff (default 1e-9)")
    sp.add_argument("--tol-entry", type=float, default=1e-10, dest="tol_entry",
                    help="absolute entry tolerance (default 1e-10)")
    sp.add_argument("--sample-tol", type=float, default=SAMPLE_TOL, dest="sample_tol",
                    help="zero/repetition tolerance on sampled points (default 1e-6)")
    sp.add_argument("--format", choices=["json", "csv", "text"], default="json")
    sp.add_argument("--out", help="write the report to this path instead of stdout")
    sp.add_argument("--threads", type=int, default=1, help="worker threads (default 1)")


def _build_parser() -> _Parser:
    parser = _Parser(prog="grassconv",
                     description="Density certificates for convolutions of orbital "
                                 "measures on noncompact Grassmannians.")
    parser.add_argument("--version", action="version", version=f"grassconv {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    sp = subs.add_parser("eligibility", help="evaluate the sharp pair criterion")
    _add_common(sp)
    sp.set_defaults(handler=_cmd_eligibility)

    sp = subs.add_parser("decide", help="full density verdict for a pair")
    _add_common(sp)
    sp.set_defaults(handler=_cmd_decide)

    sp = subs.add_parser("sample", help="sample the projected support of the convolution")
    _add_common(sp)
    sp.set_defaults(handler=_cmd_sample)

    sp = subs.add_parser("power", help="minimal absolutely continuous convolution power")
    _add_common(sp, need_y=False)
    sp.set_defaults(handler=_cmd_power)

    sp = subs.add_parser("selftest", help="run the verification suite at desk scale")
    sp.add_argument("--p", type=int, help="restrict to one shape: rank p")
    sp.add_argument("--q", type=int, help="restrict to one shape: q > p")
    sp.add_argument("--trials", type=int, default=20)
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tol-rank", type=float, default=1e-9, dest="tol_rank")
    sp.add_argument("--tol-entry", type=float, default=1e-10, dest="tol_entry")
    sp.add_argument("--sample-tol", type=float, default=SAMPLE_TOL, dest="sample_tol")
    sp.add_argument("--out", help="write the report to this path instead of stdout")
    sp.add_argument("--threads", type=int, default=1)
    sp.set_defaults(handler=_cmd_selftest)
    return parser


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except (NotInGroupError, NumericalInconsistencyError) as exc:
        print(f"numerical inconsistency: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
