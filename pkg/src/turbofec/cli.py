"""Command-line front end: ``turbofec {sweep,uncoded,encode,decode}``.

Exit status is 0 on success, 2 on usage errors and 1 on I/O errors.  Every
subcommand accepts ``--config FILE`` with ``key = value`` lines mirroring the
long flags (``min_errors = 100``); flags given on the command line win.
"""
from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from .channel import ChannelParams, awgn, bpsk_modulate, channel_llr
from .decoder import MaxStarMode, turbo_decode
from .encoder import Rate, TurboConfig, depuncture, turbo_encode
from .errors import ConfigurationError
from .harness import (SweepSpec, format_csv, parse_ebno, run_sweep, uncoded_ber,
                      write_csv)
from .interleaver import parse_interleaver
from .trellis import RscSpec

_BOOL = {"1": True, "true": True, "yes": True, "on": True,
         "0": False, "false": False, "no": False, "off": False}


def _converter(fn):
    def convert(text):
        try:
            return fn(text)
        except (ConfigurationError, ValueError) as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    convert.__name__ = fn.__name__
    return convert


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise ValueError(f"must be >= 1, got {v}")
    return v


def _nonneg_int(text):
    v = int(text)
    if v < 0:
        raise ValueError(f"must be >= 0, got {v}")
    return v


gen_type = _converter(RscSpec.from_octal)
rate_type = _converter(Rate.parse)
decoder_type = _converter(MaxStarMode.parse)
ebno_type = _converter(parse_ebno)
positive_int = _converter(_positive_int)
nonneg_int = _converter(_nonneg_int)
seed_type = _converter(lambda t: int(t, 0) & ((1 << 64) - 1))


def parse_bits(text: str, length: int) -> np.ndarray:
    """Parse a binary string or ``0x`` hex value into exactly ``length`` bits
    (most significant bit first)."""
    text = text.strip().replace("_", "").replace(" ", "")
    if text.lower().startswith("0x"):
        value = int(text, 16)
        if value.bit_length() > length:
            raise ValueError(f"hex value wider than {length} bits")
        text = format(value, f"0{length}b")
    if not text or set(text) - {"0", "1"}:
        raise ValueError("expected a binary string or 0x-prefixed hex")
    if len(text) != length:
        raise ValueError(f"expected {length} bits, got {len(text)}")
    return np.frombuffer(text.encode(), dtype=np.uint8) - ord("0")


def format_bits(bits, fmt: str = "bin") -> str:
    s = "".join("1" if b else "0" for b in bits)
    if fmt == "hex":
        return "0x" + format(int(s, 2), f"0{math.ceil(len(s) / 4)}x")
    return s


def load_config(path: str) -> dict[str, str]:
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                key, sep, value = line.partition(":")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            out[key.strip().lower().replace("-", "_")] = value.strip().strip('"').strip("'")
    return out


def _add_code_args(p: argparse.ArgumentParser):
    p.add_argument("--gen", type=gen_type, default="7,5",
                   help="octal feedback,forward generators (default 7,5)")
    p.add_argument("--n", type=positive_int, default="1000", help="block length in bits")
    p.add_argument("--rate", type=rate_type, default="1/3", help="1/2 or 1/3")
    p.add_argument("--interleaver", default="random:42",
                   help="random:<seed>, block:<rows>x<cols> or identity")
    p.add_argument("--terminate", action=argparse.BooleanOptionalAction, default=True,
                   help="terminate encoder 1 with K-1 tail bits")


def _add_decoder_args(p: argparse.ArgumentParser):
    p.add_argument("--iters", type=positive_int, default="6", help="turbo iterations")
    p.add_argument("--decoder", type=decoder_type, default="log-map",
                   help="log-map or max-log-map")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="turbofec", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file mirroring the flags")

    sweep = sub.add_parser("sweep", parents=[common], help="Monte Carlo BER sweep of a turbo code")
    _add_code_args(sweep)
    _add_decoder_args(sweep)
    _add_run_args(sweep)

    unc = sub.add_parser("uncoded", parents=[common], help="uncoded BPSK baseline")
    unc.add_argument("--n", type=positive_int, default="10000", help="bits per frame")
    _add_run_args(unc)

    enc = sub.add_parser("encode", parents=[common], help="encode one message")
    _add_code_args(enc)
    enc.add_argument("--message", help="binary string or 0x hex; random if omitted")
    enc.add_argument("--seed", type=seed_type, default="1", help="seed for a random message")
    enc.add_argument("--format", choices=["bin", "hex"], default="bin")

    dec = sub.add_parser("decode", parents=[common], help="decode one received hard codeword")
    _add_code_args(dec)
    _add_decoder_args(dec)
    dec.add_argument("--received", required=True,
                     help="codeword bits (binary or 0x hex), '-' reads stdin")
    dec.add_argument("--ebno", type=float, default=3.0,
                     help="Eb/N0 in dB used for channel reliability and added noise")
    dec.add_argument("--add-noise", action="store_true", help="corrupt with AWGN at --ebno")
    dec.add_argument("--seed", type=seed_type, default="1", help="noise seed")
    dec.add_argument("--format", choices=["bin", "hex"], default="bin")
    return parser


def _add_run_args(p: argparse.ArgumentParser):
    p.add_argument("--ebno", type=ebno_type, default="0:0.5:2",
                   help="Eb/N0 points in dB: start:step:stop or a comma list")
    p.add_argument("--frames", type=positive_int, default="1000", help="max frames per point")
    p.add_argument("--min-errors", type=nonneg_int, default="100",
                   help="stop a point after this many bit errors (0 disables)")
    p.add_argument("--seed", type=seed_type, default="1", help="master seed")
    p.add_argument("--workers", type=positive_int, default="1", help="worker threads")
    p.add_argument("--out", help="CSV destination (stdout if omitted)")


def _parse(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            cfg = load_config(args.config)
        except OSError as exc:
            raise _IOFailure(f"cannot read config: {exc}") from None
        except ValueError as exc:
            parser.error(f"argument --config: {exc}")
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        for key, value in cfg.items():
            if key not in known or key in ("config", "help"):
                parser.error(f"argument --config: unknown key {key!r}")
            if key in ("terminate", "add_noise"):
                if value.lower() not in _BOOL:
                    parser.error(f"argument --{key.replace('_', '-')}: expected true/false")
                cfg[key] = _BOOL[value.lower()]
        sub.set_defaults(**cfg)
        args = parser.parse_args(argv)
    return parser, args


class _IOFailure(Exception):
    pass


def _turbo_config(parser, args) -> TurboConfig:
    try:
        perm = parse_interleaver(args.interleaver, args.n)
    except ConfigurationError as exc:
        parser.error(f"argument --interleaver: {exc}")
    return TurboConfig(args.gen, args.n, perm, args.rate, args.terminate)


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _log_point(p):
    print(f"Eb/N0 {p.ebno_db:6.2f} dB  frames {p.frames:7d}  errors {p.bit_errors:8d}  "
          f"BER {p.ber:.3e}  FER {p.fer:.3e}", file=sys.stderr)


def cmd_sweep(parser, args):
    spec = SweepSpec(_turbo_config(parser, args), args.ebno, args.iters, args.frames,
                     args.min_errors, args.seed, args.decoder)
    result = run_sweep(spec, workers=args.workers, on_point=_log_point)
    if args.out:
        write_csv(result, args.out)
    else:
        sys.stdout.write(format_csv(result))


def cmd_uncoded(parser, args):
    spec = SweepSpec(None, args.ebno, max_frames=args.frames, min_bit_errors=args.min_errors,
                     master_seed=args.seed, uncoded_n=args.n)

    def log(p):
        print(f"Eb/N0 {p.ebno_db:6.2f} dB  simulated {p.ber:.4e}  "
              f"theory {uncoded_ber(p.ebno_db):.4e}", file=sys.stderr)

    result = run_sweep(spec, workers=args.workers, on_point=log)
    if args.out:
        write_csv(result, args.out)
    else:
        sys.stdout.write(format_csv(result))


def cmd_encode(parser, args):
    cfg = _turbo_config(parser, args)
    if args.message is None:
        u = np.random.default_rng(args.seed).integers(0, 2, cfg.n)
    else:
        try:
            u = parse_bits(args.message, cfg.n)
        except ValueError as exc:
            parser.error(f"argument --message: {exc}")
    cw = turbo_encode(cfg, u)
    print(format_bits(cw.symbols, args.format))


def cmd_decode(parser, args):
    cfg = _turbo_config(parser, args)
    text = sys.stdin.read() if args.received == "-" else args.received
    try:
        bits = parse_bits(text, cfg.codeword_length)
    except ValueError as exc:
        parser.error(f"argument --received: {exc}")
    params = ChannelParams(args.ebno, cfg.code_rate)
    x = bpsk_modulate(bits)
    if args.add_noise:
        x = awgn(x, params.sigma, np.random.default_rng(args.seed))
    r0, r1, r2 = depuncture(cfg, channel_llr(x, params.lc))
    result = turbo_decode(cfg, r0, r1, r2, args.iters, args.decoder)
    print(format_bits(result.hard_bits, args.format))


COMMANDS = {"sweep": cmd_sweep, "uncoded": cmd_uncoded,
            "encode": cmd_encode, "decode": cmd_decode}


def main(argv=None) -> int:
    try:
        parser, args = _parse(argv)
        COMMANDS[args.command](parser, args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    except _IOFailure as exc:
        print(f"turbofec: {exc}", file=sys.stderr)
        return 1
    except ConfigurationError as exc:
        print(f"turbofec: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"turbofec: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
