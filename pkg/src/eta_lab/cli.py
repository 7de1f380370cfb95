"""Command-line front end.

    eta-lab constants [--K 1000] [--digits 12]
    eta-lab eta D1 D2 [--cap 100000]
    eta-lab sigma D1 D2 K N
    eta-lab qexp D1 D2 K --terms M
    eta-lab scan --x X [--cap] [--workers W]
    eta-lab densities --x X [--lemma 2,3,5,7] [--pollack KMAX] [--lt 2:-1,3:+1]
    eta-lab audit --x X [--cap] [--workers W]
    eta-lab verify [--quick] [--golden DIR] [--update-golden]

Exit codes: 0 success, 1 usage or invalid input, 2 computational check
failure or cap exhaustion. All outputs flow through one serialization
layer; --no-timestamp makes any command byte-deterministic.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .constants import (
    combined_constant,
    default_primes,
    mu_constant,
    render_decimal,
    rigorous_constant,
)
from .experiments import (
    CapExceededError,
    build_context,
    decomposition_audit,
    density_lemma,
    density_lt,
    density_pollack,
    scan_pairs,
)
from .newform import (
    DEFAULT_ETA_CAP,
    NewformPair,
    eta,
    eta_sign_trace,
    q_expansion,
    sigma_coefficient,
)
from .reports import build_envelope, serialize
from .verify import run_criteria

MAX_X = 10**8


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract here is exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _emit(args, command: str, config: dict, payload) -> None:
    env = build_envelope(command, config, payload, args.no_timestamp)
    text = serialize(env, args.format, args.digits)
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)


def _add_common(p: _Parser) -> None:
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p.add_argument("--output", default=None, help="output path (default stdout)")
    p.add_argument("--digits", type=int, default=12, help="rendering precision")
    p.add_argument("--no-timestamp", action="store_true",
                   help="omit the timestamp for byte-deterministic output")


def _check_x(x: int) -> int:
    if x < 1:
        raise ValueError("--x must be >= 1")
    if x > MAX_X:
        raise ValueError(
            f"--x {x} exceeds {MAX_X}: the sieve and chi tables would need "
            "multiple GB; shard the range or raise the limit in source"
        )
    return x


def build_parser() -> _Parser:
    top = _Parser(prog="eta-lab", description=__doc__.splitlines()[0])
    top.add_argument("--version", action="version", version=f"eta-lab {__version__}")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", parents=[], help="rigorous limit constants")
    p.add_argument("--K", type=int, default=1000, dest="k_terms",
                   help="series truncation index (default 1000)")
    _add_common(p)

    p = sub.add_parser("eta", help="first negative-coefficient prime of one pair")
    p.add_argument("d1", type=int)
    p.add_argument("d2", type=int)
    p.add_argument("--cap", type=int, default=DEFAULT_ETA_CAP)
    _add_common(p)

    p = sub.add_parser("sigma", help="one twisted divisor-sum coefficient")
    p.add_argument("d1", type=int)
    p.add_argument("d2", type=int)
    p.add_argument("k", type=int)
    p.add_argument("n", type=int)
    _add_common(p)

    p = sub.add_parser("qexp", help="q-expansion: constant term and a_1..a_M")
    p.add_argument("d1", type=int)
    p.add_argument("d2", type=int)
    p.add_argument("k", type=int)
    p.add_argument("--terms", type=int, default=10)
    _add_common(p)

    p = sub.add_parser("scan", help="average eta over all pairs |D1*D2| <= x")
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--cap", type=int, default=DEFAULT_ETA_CAP)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--K", type=int, default=1000, dest="k_terms")
    _add_common(p)

    p = sub.add_parser("densities", help="observed vs predicted densities")
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--lemma", default=None, metavar="P1,P2,...",
                   help="per-prime sign densities at these primes")
    p.add_argument("--pollack", type=int, default=None, metavar="KMAX",
                   help="n(D) = p_k densities for k = 1..KMAX")
    p.add_argument("--lt", default=None, metavar="P:S,...",
                   help="pair sign pattern, e.g. 2:-1,3:+1 or 2:0")
    p.add_argument("--workers", type=int, default=1)
    _add_common(p)

    p = sub.add_parser("audit", help="exact decomposition audit of sum eta")
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--cap", type=int, default=DEFAULT_ETA_CAP)
    p.add_argument("--workers", type=int, default=1)
    _add_common(p)

    p = sub.add_parser("verify", help="run the acceptance criteria")
    p.add_argument("--quick", action="store_true", help="skip x >= 1e6 scans")
    p.add_argument("--golden", default=None, help="golden file directory")
    p.add_argument("--update-golden", action="store_true",
                   help="rewrite the golden file from this run")
    _add_common(p)
    return top


# ---------------------------------------------------------------------------
# Command handlers
# ---------------------------------------------------------------------------

def _cmd_constants(args) -> int:
    k = args.k_terms
    primes = default_primes(k)
    order = ["theta", "Theta", "alpha", "beta", "erdos"]
    values = [(rigorous_constant(name, k, primes), None) for name in order]
    values.append((combined_constant(k, primes), None))
    values.append((mu_constant(k, primes), None))
    rendered = [(rv, render_decimal(rv, args.digits)) for rv, _ in values]
    payload = {"kind": "constants", "values": rendered}
    _emit(args, "constants", {"K": k, "digits": args.digits}, payload)
    return 0


def _cmd_eta(args) -> int:
    pair = NewformPair(args.d1, args.d2)
    res = eta(pair, args.cap)
    trace = eta_sign_trace(pair, args.cap)
    payload = {"kind": "eta", "d1": args.d1, "d2": args.d2, "cap": args.cap,
               "result": res, "trace": trace}
    _emit(args, "eta", {"d1": args.d1, "d2": args.d2, "cap": args.cap}, payload)
    return 2 if res.status == "cap_exceeded" else 0


def _cmd_sigma(args) -> int:
    pair = NewformPair(args.d1, args.d2)
    value = sigma_coefficient(pair, args.k, args.n)
    payload = {"kind": "sigma", "d1": args.d1, "d2": args.d2, "k": args.k,
               "n": args.n, "value": value}
    _emit(args, "sigma", {"d1": args.d1, "d2": args.d2, "k": args.k, "n": args.n}, payload)
    return 0


def _cmd_qexp(args) -> int:
    pair = NewformPair(args.d1, args.d2)
    expansion = q_expansion(pair, args.k, args.terms)
    payload = {"kind": "qexp", "d1": args.d1, "d2": args.d2, "expansion": expansion}
    _emit(args, "qexp", {"d1": args.d1, "d2": args.d2, "k": args.k,
                         "terms": args.terms}, payload)
    return 0


def _cmd_scan(args) -> int:
    x = _check_x(args.x)
    report = scan_pairs(x, cap=args.cap, workers=args.workers,
                        k_terms=args.k_terms, digits=args.digits)
    # worker count deliberately left out of the echo: results are
    # worker-independent and the bytes must be too
    config = {"x": x, "cap": args.cap, "K": args.k_terms}
    _emit(args, "scan", config, report)
    return 0


def _parse_pattern(text: str) -> list[tuple[int, int]]:
    out = []
    for part in text.split(","):
        p, _, s = part.partition(":")
        out.append((int(p), int(s)))
    return out


def _cmd_densities(args) -> int:
    x = _check_x(args.x)
    if not (args.lemma or args.pollack or args.lt):
        raise ValueError("densities needs at least one of --lemma, --pollack, --lt")
    ctx = build_context(x)
    reports = []
    config: dict = {"x": x}
    if args.lemma:
        for p in (int(t) for t in args.lemma.split(",")):
            reports.append(density_lemma(x, p, ctx))
        config["lemma"] = args.lemma
    if args.pollack:
        reports.append(density_pollack(x, args.pollack, ctx))
        config["pollack"] = args.pollack
    if args.lt:
        reports.append(density_lt(x, _parse_pattern(args.lt), ctx, args.workers))
        config["lt"] = args.lt
    _emit(args, "densities", config, reports)
    return 0


def _cmd_audit(args) -> int:
    x = _check_x(args.x)
    report = decomposition_audit(x, cap=args.cap, workers=args.workers)
    _emit(args, "audit", {"x": x, "cap": args.cap}, report)
    return 0


def _cmd_verify(args) -> int:
    results = run_criteria(
        quick=args.quick, golden_dir=args.golden, update_golden=args.update_golden
    )
    payload = {
        "kind": "verify",
        "criteria": [
            {"id": r.cid, "name": r.name, "status": r.status,
             "seconds": r.seconds, "detail": r.detail}
            for r in results
        ],
    }
    _emit(args, "verify", {"quick": args.quick}, payload)
    return 0 if all(r.status != "fail" for r in results) else 2


_HANDLERS = {
    "constants": _cmd_constants,
    "eta": _cmd_eta,
    "sigma": _cmd_sigma,
    "qexp": _cmd_qexp,
    "scan": _cmd_scan,
    "densities": _cmd_densities,
    "audit": _cmd_audit,
    "verify": _cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except CapExceededError as exc:
        print(f"eta-lab: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"eta-lab: invalid input: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
