"""Command-line entry point: ``sdpolar {sweep,report,oracle,construct}``.

Exit codes: 0 success, 1 configuration error, 2 oracle suite failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .code import construct, dump_frozen
from .crc import CRC32C
from .oracle import SUITES, run_oracle
from .report import run_report
from .sim import ConfigError, SweepConfig, results_csv, run_sweep

log = logging.getLogger("sdpolar")

EXIT_OK, EXIT_CONFIG, EXIT_SUITE, EXIT_IO = 0, 1, 2, 3
_COMMANDS = ("sweep", "report", "oracle", "construct")


def _code(text: str) -> tuple[int, int]:
    try:
        n, K = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected n,K, got {text!r}") from None
    return n, K


def _list(cast):
    def parse(text: str):
        try:
            return [cast(v) for v in text.split(",") if v.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad list {text!r}") from None
    return parse


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sdpolar", description="Symbol-decision polar decoding toolkit.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--config", help="key=value file; command-line flags take precedence")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", help="output path (stdout if omitted)")

    def code_flags(sp):
        sp.add_argument("--code", type=_code, default=(6, 32), metavar="n,K")
        sp.add_argument("--crc32c", action="store_true", help="CRC-32C concatenation")
        sp.add_argument("--design", type=float, default=0.5, help="BEC erasure probability")

    s = sub.add_parser("sweep", help="Monte Carlo BER/FER sweep")
    common(s)
    code_flags(s)
    s.add_argument("--frozen-file")
    s.add_argument("--dec", type=_list(str), default=["sc"], metavar="LIST")
    s.add_argument("--ebn0", type=_list(float), default=[2.0], metavar="LIST")
    s.add_argument("--trials", type=int, default=10000)
    s.add_argument("--target-fe", type=int, default=100)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--exact", action="store_true", help="log-sum-exp kernels")
    s.add_argument("--pcms", action="store_true", help="pre-computed stage-1 memory")

    r = sub.add_parser("report", help="analytical latency/memory/addition tables")
    common(r)
    r.add_argument("--N", type=int)
    r.add_argument("--L", type=int)
    r.add_argument("--P", type=int)
    r.add_argument("--q-ch", type=int, default=4)
    r.add_argument("--format", choices=("text", "csv"), default="text")

    o = sub.add_parser("oracle", help="run equivalence suites")
    common(o)
    o.add_argument("--suite", action="append", choices=SUITES)
    o.add_argument("--cases", type=int, default=1000)

    c = sub.add_parser("construct", help="print a frozen set")
    common(c)
    code_flags(c)
    return p


def read_config(path) -> list[str]:
    """Turn a key=value file into command-line flags (``true`` marks a bare switch)."""
    argv = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        flag = "--" + key.replace("_", "-")
        if value.lower() in ("true", "yes", "on"):
            argv.append(flag)
        elif value.lower() in ("false", "no", "off"):
            continue
        else:
            argv += [flag, value]
    return argv


def _expand_config(argv: list[str]) -> list[str]:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return argv
    at = next((i for i, a in enumerate(argv) if a in _COMMANDS), None)
    if at is None:
        return argv
    return argv[:at + 1] + read_config(known.config) + argv[at + 1:]


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _sweep(args) -> int:
    n, K = args.code
    cfg = SweepConfig(n=n, K=K, design_param=args.design, crc=args.crc32c,
                      frozen_file=args.frozen_file, decoders=tuple(args.dec),
                      ebn0=tuple(args.ebn0), trials=args.trials, target_fe=args.target_fe,
                      seed=args.seed, workers=args.workers, out=args.out, exact=args.exact,
                      pcms=args.pcms)
    log.info("code N=%d K=%d fingerprint %s", cfg.code.N, cfg.code.K, cfg.code.fingerprint())
    results = run_sweep(cfg)
    if not args.out:
        sys.stdout.write(results_csv(results))
    return EXIT_OK


def _oracle(args) -> int:
    failed = False
    for name in args.suite or SUITES:
        res = run_oracle(name, args.cases, args.seed)
        print(res.line())
        for note in res.notes:
            print("  " + note)
        failed |= not res.passed
    return EXIT_SUITE if failed else EXIT_OK


def _construct(args) -> int:
    n, K = args.code
    spec = construct(n, K, args.design, CRC32C if args.crc32c else None)
    _emit(dump_frozen(spec), args.out)
    return EXIT_OK


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(_expand_config(argv))
    except ConfigError as exc:
        print(f"sdpolar: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"sdpolar: {exc}", file=sys.stderr)
        return EXIT_IO
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "sweep":
            return _sweep(args)
        if args.command == "report":
            _emit(run_report(args.format, args.N, args.L, args.P, args.q_ch), args.out)
            return EXIT_OK
        if args.command == "oracle":
            return _oracle(args)
        return _construct(args)
    except OSError as exc:
        print(f"sdpolar: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:  # ConfigError included
        print(f"sdpolar: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
