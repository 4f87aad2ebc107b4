"""Command-line entry point: ``cycloc {code,order,trellis,decode,sim}``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .cyclic import CapacityError, CodeError, SpecError, load_code
from .locosd import StructureError, load_structure, locality_aware_decode, qmld
from .ordering import OrderingError, gamma_order, identity_order
from .osd import OsdConfig, osd_decode, snr_to_n0
from .reports import best_chain, report_code, report_trellis
from .sim import ConfigError, load_sim, records_csv, run_sim
from .trellis import (awgn_branch_metrics, build_trellis, dimension_profile, export_trellis,
                      profile_csv, profile_upper_bound, viterbi_decode)

OUT_DIR_ENV = "CYCLOC_OUT_DIR"


def _out_path(p: str) -> Path:
    """Relative output paths land in $CYCLOC_OUT_DIR when it is set."""
    path = Path(p)
    base = os.environ.get(OUT_DIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _parse_chain(text: Optional[str]):
    if text is None or text in ("", "identity", "none"):
        return ()
    if text == "best":
        return "best"
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"chain must be comma-separated integers, got {text!r}") from exc


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2))


def cmd_code(args) -> int:
    _emit(report_code(load_code(args.spec)))
    return 0


def cmd_order(args) -> int:
    code = load_code(args.spec)
    chain = _parse_chain(args.chain)
    if chain == "best":
        raise ConfigError("order needs an explicit chain")
    _emit(gamma_order(code.n, chain).to_json())
    return 0


def cmd_trellis(args) -> int:
    code = load_code(args.spec)
    report, trellis = report_trellis(code, _parse_chain(args.chain), build=not args.analytic)
    if args.export:
        if trellis is None:
            raise CapacityError("trellis was not built; nothing to export")
        export_trellis(trellis, _out_path(args.export))
    if args.csv:
        chain = tuple(report["chain"])
        order = gamma_order(code.n, chain) if chain else identity_order(code.n)
        bound = profile_upper_bound(code, chain) if chain else None
        _out_path(args.csv).write_text(profile_csv(dimension_profile(code, order), bound))
    _emit(report)
    return 0


def _read_words(path: str) -> np.ndarray:
    text = Path(path).read_text().strip()
    if text.startswith("["):
        data = np.asarray(json.loads(text), dtype=np.float64)
    else:
        data = np.asarray([[float(v) for v in line.replace(",", " ").split()]
                           for line in text.splitlines() if line.strip()], dtype=np.float64)
    return np.atleast_2d(data)


def cmd_decode(args) -> int:
    code = load_code(args.spec)
    ys = _read_words(args.y)
    if ys.shape[1] != code.n:
        raise ConfigError(f"received words have length {ys.shape[1]}, code has n={code.n}")
    if args.n0 is not None:
        n0 = args.n0
    elif args.snr_db is not None:
        n0 = snr_to_n0(args.snr_db, args.convention, code.k / code.n)
    else:
        n0 = None
    structure = load_structure(code, args.structure) if args.structure else None
    cfg = OsdConfig(args.order)
    out = []
    if args.scheme == "viterbi":
        chain = _parse_chain(args.chain)
        if chain == "best":
            chain = best_chain(code)
        t = build_trellis(code, gamma_order(code.n, chain) if chain else identity_order(code.n))
        for w in viterbi_decode(t, awgn_branch_metrics(ys)):
            out.append({"codeword": w.tolist(), "stage": "VITERBI", "ml_certified": True})
    elif args.scheme == "qmld":
        if structure is None:
            raise ConfigError("qmld needs --structure")
        words, ok = qmld(structure, ys)
        for w, o in zip(words, np.atleast_1d(ok)):
            out.append({"codeword": w.tolist(), "stage": "QMLD", "in_code": bool(o)})
    else:
        if args.scheme == "locosd" and (structure is None or n0 is None):
            raise ConfigError("locosd needs --structure and --n0 or --snr-db")
        for y in ys:
            if args.scheme == "osd":
                res = osd_decode(code, y, cfg, score_on=args.score_on)
            else:
                res = locality_aware_decode(code, structure, y, cfg, n0, args.score_on)
            out.append({"codeword": res.codeword.tolist(), "stage": res.stage,
                        "ml_certified": res.ml_certified, "metric": res.metric,
                        "candidates": res.candidates})
    _emit(out)
    return 0


def cmd_sim(args) -> int:
    spec = load_sim(args.sim)
    records = run_sim(spec, workers=args.workers)
    text = records_csv(records, timing=not args.no_timing)
    if args.out:
        _out_path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cycloc", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("code", help="code parameters, cosets and locality")
    c.add_argument("spec")
    c.set_defaults(func=cmd_code)

    o = sub.add_parser("order", help="coordinate permutation of a divisor chain")
    o.add_argument("spec")
    o.add_argument("--chain", required=True, help="comma-separated chain, e.g. 3,21")
    o.set_defaults(func=cmd_order)

    t = sub.add_parser("trellis", help="state profile, bounds and Viterbi cost")
    t.add_argument("spec")
    t.add_argument("--chain", default=None, help="comma-separated chain, 'best' or 'identity'")
    t.add_argument("--export", help="write the trellis as JSON")
    t.add_argument("--csv", help="write the per-level profile as CSV")
    t.add_argument("--analytic", action="store_true", help="skip building the trellis")
    t.set_defaults(func=cmd_trellis)

    d = sub.add_parser("decode", help="decode received words")
    d.add_argument("spec")
    d.add_argument("--y", required=True, help="JSON list(s) or whitespace-separated rows")
    d.add_argument("--scheme", choices=["osd", "locosd", "viterbi", "qmld"], default="osd")
    d.add_argument("--order", type=int, default=0)
    d.add_argument("--structure", help="local structure JSON")
    d.add_argument("--chain", default=None)
    d.add_argument("--n0", type=float)
    d.add_argument("--snr-db", type=float)
    d.add_argument("--convention", choices=["es", "eb"], default="es")
    d.add_argument("--score-on", choices=["y", "llr"], default="y")
    d.set_defaults(func=cmd_decode)

    s = sub.add_parser("sim", help="Monte Carlo FER/BER sweep")
    s.add_argument("sim")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out", help=f"CSV path (relative paths go under ${OUT_DIR_ENV})")
    s.add_argument("--no-timing", action="store_true", help="leave the seconds column empty")
    s.set_defaults(func=cmd_sim)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SpecError, ConfigError, CodeError, StructureError, OrderingError,
            CapacityError, FileNotFoundError) as exc:
        print(f"cycloc: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
