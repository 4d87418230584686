"""Command line entry point: ``eth-gamma <stage> --config run.json``."""
from __future__ import annotations

import argparse
import json
import logging
import sys

from .errors import ConfigInvalid, EthGammaError
from .pipeline import STAGES, RunConfig, load_config, run_stage

log = logging.getLogger("eth_gamma")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="eth-gamma", description=__doc__)
    p.add_argument("stage", choices=STAGES)
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--out", help="output directory (overrides out_dir)")
    p.add_argument("--seed", type=int, help="RNG seed (overrides config)")
    p.add_argument("--no-cache", action="store_true", help="always re-diagonalise")
    p.add_argument("--beta-eff", help="comma separated beta_eff values (overrides config)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _parse_betas(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigInvalid(f"--beta-eff: {exc}") from exc


def resolve_config(args) -> RunConfig:
    cfg = load_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.no_cache:
        overrides["cache"] = False
    if args.beta_eff is not None:
        overrides["beta_eff_list"] = _parse_betas(args.beta_eff)
    if args.out is not None:
        overrides["out_dir"] = args.out
    if overrides:
        raw = {k: getattr(cfg, k) for k in cfg.__dataclass_fields__}
        raw.update(overrides)
        cfg = RunConfig.from_dict(raw)
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        written = run_stage(args.stage, cfg)
    except EthGammaError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (TypeError, json.JSONDecodeError) as exc:
        print(f"error: ConfigInvalid: {exc}", file=sys.stderr)
        return ConfigInvalid.exit_code
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
