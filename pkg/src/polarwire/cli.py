"""Command-line harness.

Subcommands: construct, encode, decode, fer, secrecy, conjecture.  The
experiment subcommands take `--config <file>` (key = value text, see
parse_kv_text) plus overriding flags and emit a CSV and a JSON report.
All indices printed or read here are 1-based; the output directory
defaults to the POLARWIRE_OUT environment variable, then the working
directory.

Exit codes: 0 success, 2 validation error, 3 at least one point skipped.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from .channels import capacity, make_channel
from .codec import sc_decode, wiretap_encode
from .construction import (allocate_rate_equivocation, profile_to_text,
                           spec_from_text, spec_to_text)
from .experiments import (RUNNERS, ConfigError, ExperimentConfig, _build_spec,
                          _eve_channel_spec, _profile, _resolve_eve,
                          config_from_tree, parse_kv_text, scan_csv_body)
from .rng import substream

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_SKIPPED = 3


def _out_dir() -> Path:
    return Path(os.environ.get("POLARWIRE_OUT", "."))


def _load_config(path: str, overrides: argparse.Namespace) -> ExperimentConfig:
    text = Path(path).read_text() if path else ""
    tree = parse_kv_text(text)
    if getattr(overrides, "kind_force", None):
        # the experiment subcommand decides what runs, not the config file
        tree["kind"] = overrides.kind_force
    elif getattr(overrides, "kind_default", None) and "kind" not in tree:
        kd = overrides.kind_default
        if kd == "auto":
            kd = "secrecy" if ("eve" in tree or "kernel" in tree) else "fer"
        tree["kind"] = kd
    for key in ("seed", "trials", "workers", "out"):
        val = getattr(overrides, key, None)
        if val is not None:
            tree[key] = val
    if getattr(overrides, "n", None):
        tree["n"] = [int(x) for x in overrides.n.split(",")]
    return config_from_tree(tree)


def _parse_channel_arg(text: str):
    """Mini channel syntax: bec:0.3, bsc:0.11."""
    kind, _, param = text.partition(":")
    kind = kind.lower()
    if kind == "bec":
        return make_channel("bec", delta=float(param))
    if kind == "bsc":
        return make_channel("bsc", p=float(param))
    raise ConfigError(f"cannot parse channel {text!r}; use bec:<delta> or bsc:<p>")


def _bits_arg(text: str) -> np.ndarray:
    if text == "":
        return np.zeros(0, dtype=np.uint8)
    if not set(text) <= {"0", "1"}:
        raise ConfigError(f"bit string must contain only 0/1, got {text!r}")
    return np.array([int(c) for c in text], dtype=np.uint8)


def _cmd_construct(args) -> int:
    cfg = _load_config(args.config, args)
    legit_ch = cfg.legit.build()
    eve_ch = _resolve_eve(cfg)
    n = cfg.n_list[0]
    spec, r, r_star = _build_spec(cfg, n, 0, legit_ch, eve_ch)
    out = args.out or f"construct_n{n}"
    base = _out_dir() / out
    base.parent.mkdir(parents=True, exist_ok=True)
    Path(f"{base}.spec.txt").write_text(spec_to_text(spec))
    legit_prof = _profile(cfg, cfg.legit, legit_ch, n, (0, 0, 0))
    Path(f"{base}.legit_profile.txt").write_text(profile_to_text(legit_prof))
    if eve_ch is not None:
        eve_prof = _profile(cfg, _eve_channel_spec(cfg, eve_ch), eve_ch, n, (0, 0, 1))
        Path(f"{base}.eve_profile.txt").write_text(profile_to_text(eve_prof))
    print(f"n = {n}")
    print(f"r = {r!r}, r_star = {r_star!r}, eps = {cfg.eps!r}, beta = {cfg.beta!r}")
    print(f"|A| = {spec.k_secret}, |N| = {spec.k_random}, |B| = {spec.b_set.size}")
    print(f"secret rate |A|/n = {spec.secret_rate!r}")
    print(f"reliability target 2^(-n^beta) = {2.0 ** (-(n ** cfg.beta)):.3e}")
    if eve_ch is not None:
        cs = capacity(legit_ch) - capacity(eve_ch)
        print(f"secrecy capacity target = {cs!r}")
        if args.rate is not None and args.re is not None:
            alloc = allocate_rate_equivocation(args.rate, args.re,
                                               capacity(legit_ch), capacity(eve_ch))
            print(f"allocation: secret = {alloc.secret_fraction!r}, "
                  f"nonsecret = {alloc.nonsecret_fraction!r}, "
                  f"random = {alloc.random_fraction!r}")
    print(f"wrote {base}.spec.txt")
    return EXIT_OK


def _cmd_encode(args) -> int:
    spec = spec_from_text(Path(args.spec).read_text())
    u = _bits_arg(args.bits)
    if u.size != spec.k_secret:
        raise ConfigError(f"message must carry |A| = {spec.k_secret} bits")
    if args.b_star is not None:
        cw = wiretap_encode(spec, u, b_star=_bits_arg(args.b_star))
    else:
        cw = wiretap_encode(spec, u, rng=substream(args.seed or 0, 99))
    print("x      = " + "".join(str(b) for b in cw.x))
    print("b_star = " + "".join(str(b) for b in cw.b_star))
    return EXIT_OK


def _cmd_decode(args) -> int:
    spec = spec_from_text(Path(args.spec).read_text())
    channel = _parse_channel_arg(args.channel)
    labels = list(channel.labels)
    if all(len(s) == 1 for s in labels) and "," not in args.y:
        symbols = list(args.y)
    else:
        symbols = args.y.split(",")
    if len(symbols) != spec.n:
        raise ConfigError(f"expected {spec.n} received symbols, got {len(symbols)}")
    try:
        y = np.array([labels.index(s) for s in symbols], dtype=np.int64)
    except ValueError:
        raise ConfigError(f"symbols must be among {labels}")
    res = sc_decode(spec, channel, y)
    print("u_hat      = " + "".join(str(b) for b in res.u_hat))
    print("b_star_hat = " + "".join(str(b) for b in res.b_star_hat))
    return EXIT_OK


def _cmd_experiment(args) -> int:
    cfg = _load_config(args.config, args)
    report = RUNNERS[cfg.kind](cfg)
    out = cfg.out or f"{cfg.kind}_seed{cfg.seed}"
    base = _out_dir() / out
    base.parent.mkdir(parents=True, exist_ok=True)
    csv_path = Path(f"{base}.csv")
    csv_path.write_text(report.csv_body())
    Path(f"{base}.json").write_text(report.to_json() + "\n")
    if cfg.kind == "conjecture":
        Path(f"{base}.scan.csv").write_text(scan_csv_body(report))
    print(f"wrote {csv_path}")
    for p in report.points:
        print("  " + ", ".join(f"{k}={v}" for k, v in p.items()
                               if k in ("n", "rate", "fer", "fer_informed",
                                        "equiv_rate", "fano_bound", "cs_target")
                               and v is not None))
    for s in report.skipped:
        print(f"  skipped n={s['n']}: {s['reason']}", file=sys.stderr)
    return EXIT_SKIPPED if report.skipped else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polarwire",
        description="Polar wiretap coding simulator (1-based indices in all I/O)")
    sub = parser.add_subparsers(dest="command", required=True)

    def experiment_args(p, kind, force=True):
        p.add_argument("--config", default=None, help="key = value config file")
        p.add_argument("--n", default=None, help="override blocklength list, comma separated")
        p.add_argument("--seed", type=int, default=None, help="override root seed")
        p.add_argument("--trials", type=int, default=None, help="override trial count")
        p.add_argument("--workers", type=int, default=None, help="override worker count")
        p.add_argument("--out", default=None, help="output basename")
        if force:
            p.set_defaults(kind_force=kind)
        else:
            p.set_defaults(kind_default=kind)

    p = sub.add_parser("construct", help="build a wiretap code spec and profiles")
    experiment_args(p, "auto", force=False)
    p.add_argument("--rate", type=float, default=None, help="R for a rate-equivocation allocation")
    p.add_argument("--re", type=float, default=None, help="Re for a rate-equivocation allocation")
    p.set_defaults(func=_cmd_construct)

    p = sub.add_parser("encode", help="encode a message with a stored code spec")
    p.add_argument("--spec", required=True, help="spec text file")
    p.add_argument("--bits", required=True, help="message bits, e.g. 0110")
    p.add_argument("--b-star", default=None, help="force the randomization bits")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_encode)

    p = sub.add_parser("decode", help="successive-cancellation decode")
    p.add_argument("--spec", required=True)
    p.add_argument("--channel", required=True, help="bec:<delta> or bsc:<p>")
    p.add_argument("--y", required=True,
                   help="received symbols; single characters or comma separated labels")
    p.set_defaults(func=_cmd_decode)

    for kind, blurb in (("fer", "frame-error-rate sweep"),
                        ("secrecy", "equivocation sweep"),
                        ("conjecture", "conditioned mutual-information scan")):
        p = sub.add_parser(kind, help=blurb)
        experiment_args(p, kind)
        p.set_defaults(func=_cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
