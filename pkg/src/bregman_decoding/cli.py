"""Command-line interface: batch decoding over line-delimited JSON records.

Each input line is one JSON object carrying either "probs" or "logits"
(exactly one) and an optional "id" that is echoed back.  Output is one JSON
object per input line, in input order.  Records that fail are replaced by
error objects carrying the exception name and the run exits with code 2;
malformed flags exit with code 1; full success exits 0.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .decoder import (
    DecodeConfig,
    cost_curve,
    decode,
    logits_to_probs,
    sample_many,
    top_k_renormalize,
)
from .errors import BregmanDecodingError, InputError
from .generators import generator_from_alpha
from .validation import check_prob_vector

_EXIT_OK = 0
_EXIT_USAGE = 1
_EXIT_RECORD_ERRORS = 2


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(_EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(x) -> float:
    return float(x)


def _add_io_flags(p: _Parser) -> None:
    p.add_argument("--input", default=None, help="input path (default: stdin)")
    p.add_argument("--output", default=None, help="output path (default: stdout)")


def _add_model_flags(p: _Parser, with_lambda: bool = True) -> None:
    p.add_argument("--mode", choices=("primal", "dual"), default="primal")
    p.add_argument(
        "--alpha",
        default="shannon",
        help="family parameter: a real number, 'shannon', 'inf' or '-inf'",
    )
    if with_lambda:
        p.add_argument(
            "--lambda", dest="lam", type=float, default=0.0,
            help="sparsity cost per kept token (default 0)",
        )
        p.add_argument(
            "--k-max", default="none",
            help="cap on the selected sparsity, or 'none' (default)",
        )
        p.add_argument(
            "--search", choices=("binary", "exponential", "linear"),
            default="binary",
        )
    p.add_argument("--temperature", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-12)


def _add_record_flags(p: _Parser) -> None:
    p.add_argument(
        "--compact", action="store_true",
        help="emit support + support_probs instead of a dense probs array",
    )


def build_parser() -> _Parser:
    parser = _Parser(prog="bregdec", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_dec = sub.add_parser("decode", help="adaptive sparse decoding")
    _add_model_flags(p_dec)
    _add_record_flags(p_dec)
    p_dec.add_argument(
        "--emit-cost-curve", action="store_true",
        help="attach the (k, cost) pairs evaluated during the search",
    )
    _add_io_flags(p_dec)

    p_ren = sub.add_parser("renorm", help="fixed-k generalized top-k decoding")
    _add_model_flags(p_ren, with_lambda=False)
    p_ren.add_argument("--k", type=int, required=True)
    _add_record_flags(p_ren)
    _add_io_flags(p_ren)

    p_curve = sub.add_parser("cost-curve", help="export cost(k) as CSV")
    _add_model_flags(p_curve)
    p_curve.add_argument(
        "--k-range", default=None, metavar="A:B",
        help="inclusive k range (default 1:V)",
    )
    _add_io_flags(p_curve)

    p_samp = sub.add_parser("sample", help="decode then draw token indices")
    _add_model_flags(p_samp)
    p_samp.add_argument("--seed", type=int, default=0)
    p_samp.add_argument("--n", type=int, default=1, help="draws per record")
    _add_io_flags(p_samp)

    return parser


def _make_config(args) -> DecodeConfig:
    k_max = getattr(args, "k_max", "none")
    if isinstance(k_max, str):
        k_max = None if k_max.lower() == "none" else int(k_max)
    return DecodeConfig(
        generator=generator_from_alpha(args.alpha),
        mode=args.mode,
        lam=getattr(args, "lam", 0.0),
        k_max=k_max,
        search=getattr(args, "search", "binary"),
        tol=args.tol,
        temperature=args.temperature,
    )


def _record_probs(record: dict, temperature: float) -> np.ndarray:
    has_probs = "probs" in record
    has_logits = "logits" in record
    if has_probs == has_logits:
        raise InputError("record must carry exactly one of 'probs' or 'logits'")
    if has_logits:
        return logits_to_probs(record["logits"], temperature)
    return check_prob_vector(record["probs"])


def _iter_records(stream):
    for line in stream:
        line = line.strip()
        if line:
            yield line


def _emit(out, obj) -> None:
    out.write(json.dumps(obj))
    out.write("\n")


def _error_payload(record_id, exc: Exception) -> dict:
    payload = {}
    if record_id is not None:
        payload["id"] = record_id
    payload["error"] = {"type": type(exc).__name__, "message": str(exc)}
    return payload


def _decode_record(result, record_id, compact: bool, size: int, curve) -> dict:
    out = {}
    if record_id is not None:
        out["id"] = record_id
    out["k_star"] = result.k_star
    out["nu"] = _fmt(result.nu)
    out["cost"] = _fmt(result.cost)
    out["support"] = [int(i) for i in result.support]
    if compact:
        out["support_probs"] = [_fmt(v) for v in result.support_probs]
    else:
        out["probs"] = [_fmt(v) for v in result.sparse_probs]
    if curve is not None:
        out["cost_curve"] = [[int(k), _fmt(c)] for k, c in curve]
    return out


def _run_per_record(args, handler) -> int:
    """Shared record loop: parse, handle, emit; continue past failures."""
    instream = open(args.input, "r", encoding="utf-8") if args.input else sys.stdin
    outstream = open(args.output, "w", encoding="utf-8") if args.output else sys.stdout
    failed = False
    try:
        for line in _iter_records(instream):
            record_id = None
            try:
                record = json.loads(line)
                if not isinstance(record, dict):
                    raise InputError("record must be a JSON object")
                record_id = record.get("id")
                _emit(outstream, handler(record, record_id))
            except (BregmanDecodingError, ValueError) as exc:
                failed = True
                _emit(outstream, _error_payload(record_id, exc))
    finally:
        if args.input:
            instream.close()
        if args.output:
            outstream.close()
    return _EXIT_RECORD_ERRORS if failed else _EXIT_OK


def _cmd_decode(args) -> int:
    cfg = _make_config(args)

    def handler(record, record_id):
        probs = _record_probs(record, cfg.temperature)
        result = decode(probs, cfg, collect_cost_curve=args.emit_cost_curve)
        curve = result.cost_curve if args.emit_cost_curve else None
        return _decode_record(result, record_id, args.compact, probs.size, curve)

    return _run_per_record(args, handler)


def _cmd_renorm(args) -> int:
    cfg_gen = generator_from_alpha(args.alpha)

    def handler(record, record_id):
        probs = _record_probs(record, args.temperature)
        support, support_probs, nu = top_k_renormalize(
            probs, args.k, cfg_gen, mode=args.mode, tol=args.tol
        )
        out = {}
        if record_id is not None:
            out["id"] = record_id
        out["k"] = int(args.k)
        out["nu"] = _fmt(nu)
        out["support"] = [int(i) for i in support]
        if args.compact:
            out["support_probs"] = [_fmt(v) for v in support_probs]
        else:
            dense = np.zeros(probs.size)
            dense[support] = support_probs
            out["probs"] = [_fmt(v) for v in dense]
        return out

    return _run_per_record(args, handler)


def _parse_k_range(spec: str, size: int):
    lo, _, hi = spec.partition(":")
    a = int(lo) if lo else 1
    b = int(hi) if hi else size
    if not 1 <= a <= b <= size:
        raise InputError(f"k range {spec!r} is invalid for V = {size}")
    return a, b


def _cmd_cost_curve(args) -> int:
    cfg = _make_config(args)
    instream = open(args.input, "r", encoding="utf-8") if args.input else sys.stdin
    outstream = open(args.output, "w", encoding="utf-8") if args.output else sys.stdout
    try:
        lines = list(_iter_records(instream))
        if len(lines) != 1:
            print(
                f"bregdec cost-curve: expected exactly one input record, got {len(lines)}",
                file=sys.stderr,
            )
            return _EXIT_USAGE
        record = json.loads(lines[0])
        probs = _record_probs(record, cfg.temperature)
        a, b = (1, probs.size)
        if args.k_range:
            a, b = _parse_k_range(args.k_range, probs.size)
        pairs = cost_curve(probs, cfg, ks=range(a, b + 1))
        outstream.write("k,cost\n")
        for k, c in pairs:
            outstream.write(f"{k},{c!r}\n")
    except (BregmanDecodingError, ValueError) as exc:
        print(f"bregdec cost-curve: {exc}", file=sys.stderr)
        return _EXIT_USAGE
    finally:
        if args.input:
            instream.close()
        if args.output:
            outstream.close()
    return _EXIT_OK


def _cmd_sample(args) -> int:
    cfg = _make_config(args)
    counter = {"i": 0}

    def handler(record, record_id):
        probs = _record_probs(record, cfg.temperature)
        result = decode(probs, cfg)
        # one independent, reproducible stream per record position
        draws = sample_many(result, args.n, [args.seed, counter["i"]])
        counter["i"] += 1
        out = {}
        if record_id is not None:
            out["id"] = record_id
        out["samples"] = [int(t) for t in draws]
        return out

    return _run_per_record(args, handler)


_COMMANDS = {
    "decode": _cmd_decode,
    "renorm": _cmd_renorm,
    "cost-curve": _cmd_cost_curve,
    "sample": _cmd_sample,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except BregmanDecodingError as exc:
        # configuration-level failures (bad mode/generator combinations)
        print(f"bregdec: {exc}", file=sys.stderr)
        return _EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
