"""Command-line entry point: ``oqamtr ber|filters|analyze``."""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import analysis, channel, timereversal
from .errors import OqamTrError
from .filters import (FILTER_NAMES, check_real_orthogonality, get_filter, load_filter,
                      save_filter)
from .harness import run_sweep
from .io import CONFIG_KEYS, emit_csv, emit_plot, load_configs

log = logging.getLogger("oqamtr")


def _config_help():
    width = max(len(k) for k in CONFIG_KEYS)
    lines = ["config file keys (TOML, flat; arrays in [a, b] syntax):"]
    lines += [f"  {k:<{width}}  {v}" for k, v in CONFIG_KEYS.items()]
    return "\n".join(lines)


def cmd_ber(args):
    configs = load_configs(args.config)
    records = []
    for cfg in configs:
        log.info("running %s (%s), %d SNR points", cfg.scheme, cfg.filter_label, len(cfg.snr_db))
        records += run_sweep(cfg, workers=args.workers)
    text = emit_csv(records, args.out)
    if args.out is None:
        sys.stdout.write(text)
    if args.plot:
        emit_plot(records, args.plot)
    truncated = [r for r in records if r.truncated]
    for r in truncated:
        print(f"warning: truncated record {r.scheme}/{r.filter} at {r.snr_db} dB "
              f"({r.bits} bits)", file=sys.stderr)
    return 3 if truncated and args.strict else 0


def cmd_filters(args):
    if args.inspect:
        f = load_filter(args.inspect)
        defect = check_real_orthogonality(f, 2, max(1, 2 * f.length // f.num_subcarriers - 1))
        print(f"name {f.name}\nM {f.num_subcarriers}\nlength {f.length}")
        print(f"stored_defect {f.orthogonality_defect:.6e}\nmeasured_defect {defect:.6e}")
        for k, v in analysis.localization_measures(f).items():
            print(f"{k} {v:.6g}")
        return 0
    if args.name is None or args.M is None:
        print("error: --name and --M are required unless --inspect is given", file=sys.stderr)
        return 2
    f = get_filter(args.name, args.M)
    if args.out:
        save_filter(f, args.out)
    else:
        print("\n".join(f"{c:.17g}" for c in f.coeffs))
    print(f"{f.name} M={f.num_subcarriers} L={f.length} defect={f.orthogonality_defect:.3e}",
          file=sys.stderr)
    return 0


def cmd_analyze(args):
    if args.what == "weights":
        f = get_filter(args.filter, args.M)
        print(analysis.interference_weights(f, args.dm, args.dn).format(args.digits))
        return 0
    profile = channel.REFERENCE_PROFILE
    h = channel.draw_channel(profile, args.seed, args.delay_mode)
    pre = timereversal.tr_prefilter(h, normalize=not args.raw)
    eq = timereversal.equivalent_channel(h, pre, args.M)
    print(f"# seed {args.seed} delay_mode {args.delay_mode} center {eq.center_index}")
    print(f"# max_imag_residual {eq.max_imag_residual:.6e}")
    for c in eq.taps:
        print(f"{c.real:.17g} {c.imag:.17g}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="oqamtr", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("ber", help="run a BER sweep", epilog=_config_help(),
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    b.add_argument("--config", required=True)
    b.add_argument("--out", help="CSV path (stdout if omitted)")
    b.add_argument("--plot", help="SVG path")
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--strict", action="store_true", help="nonzero exit on truncated records")
    b.set_defaults(func=cmd_ber)

    f = sub.add_parser("filters", help="write or inspect prototype coefficient files")
    f.add_argument("--name", choices=FILTER_NAMES)
    f.add_argument("--M", type=int)
    f.add_argument("--out")
    f.add_argument("--inspect", metavar="FILE")
    f.set_defaults(func=cmd_filters)

    a = sub.add_parser("analyze", help="interference weights or TR equivalent channel")
    a.add_argument("what", choices=("weights", "tr"))
    a.add_argument("--filter", choices=FILTER_NAMES, default="iota4")
    a.add_argument("--M", type=int, default=16)
    a.add_argument("--dm", type=int, default=1)
    a.add_argument("--dn", type=int, default=2)
    a.add_argument("--digits", type=int, default=4)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--delay-mode", default="floor", choices=channel.DELAY_MODES)
    a.add_argument("--raw", action="store_true", help="unnormalized prefilter")
    a.set_defaults(func=cmd_analyze)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OqamTrError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
