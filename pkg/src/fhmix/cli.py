"""Command-line entry point.

Subcommands: fit-fh (classical model; REML, Prasad-Rao or a flat-prior
chain), fit-mix (mixture model via Gibbs), simulate (replicated scenario
studies), summarize (recompute summaries from a stored draws file).

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 prior
fails the propriety conditions, 4 sampler or estimation failure.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys

import numpy as np

from . import io as fio
from .classic import fit_fh
from .core import validate_prior
from .errors import (ConfigError, DataError, EstimationError,
                     PriorProprietyError, SamplerError)
from .gibbs import ChainConfig, ChainOutput, run_fh_chain, run_mixture_chain
from .simstudy import (CONTAMINATION_CASES, SCENARIOS, ScenarioSpec,
                       run_shrinkage_study, run_study)
from .summaries import diagnostics, summarize_areas, summarize_params
from .types import Dataset, PriorConfig


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so main() owns codes."""

    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value file; flags override it")
    p.add_argument("--seed", type=int, default=None,
                   help="RNG seed (default: config file, then $SAE_SEED, then 0)")


def _add_chain_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--iterations", type=int, default=None)
    p.add_argument("--burn-in", type=int, default=None)
    p.add_argument("--thin", type=int, default=None)
    p.add_argument("--chains", type=int, default=None)


def _add_prior_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha1", type=float, default=None)
    p.add_argument("--alpha2", type=float, default=None)
    p.add_argument("--p-beta-a", type=float, default=None)
    p.add_argument("--p-beta-b", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fhmix", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit-fh", help="fit the classical area-level model")
    p.add_argument("data", help="dataset CSV (area_id,y,se,x1,...)")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--method", choices=("reml", "pr", "hb"), default="reml")
    p.add_argument("--no-intercept", action="store_true")
    _add_common(p)
    _add_chain_flags(p)

    p = sub.add_parser("fit-mix", help="fit the mixture model by Gibbs sampling")
    p.add_argument("data")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--no-intercept", action="store_true")
    _add_common(p)
    _add_chain_flags(p)
    _add_prior_flags(p)

    p = sub.add_parser("simulate", help="run a replicated simulation study")
    p.add_argument("--scenario", required=True,
                   choices=SCENARIOS + ("contamination",))
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--out", required=True,
                   help="study CSV (shrinkage CSV for --scenario contamination)")
    p.add_argument("--cases", default=",".join(CONTAMINATION_CASES),
                   help="comma-separated contamination cases")
    _add_common(p)
    _add_chain_flags(p)
    _add_prior_flags(p)

    p = sub.add_parser("summarize", help="recompute summaries from stored draws")
    p.add_argument("draws", help="draws file written by fit-fh/fit-mix")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--data", default=None,
                   help="original dataset CSV; enables areas.csv")
    p.add_argument("--no-intercept", action="store_true")
    _add_common(p)
    return parser


def _effective_config(args) -> dict[str, str]:
    """File keys with explicitly-set flags layered on top."""
    cfg = fio.read_config(args.config) if getattr(args, "config", None) else {}
    for key in ("iterations", "burn_in", "thin", "chains",
                "alpha1", "alpha2", "p_beta_a", "p_beta_b"):
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = fio.fmt(val) if isinstance(val, float) else str(val)
    if getattr(args, "seed", None) is not None:
        cfg["seed"] = str(args.seed)
    return cfg


def _seed_from(cfg: dict[str, str]) -> int:
    if "seed" in cfg:
        try:
            return int(cfg["seed"])
        except ValueError:
            raise ConfigError(f"seed must be an integer (got {cfg['seed']!r})") from None
    return fio.resolve_seed(None)


def _ensure_out_dir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path


def _write_chain_outputs(out_dir: str, out: ChainOutput, data: Dataset,
                         cfg_hash: str) -> None:
    fio.write_params_csv(os.path.join(out_dir, "params.csv"), summarize_params(out))
    fio.write_areas_csv(os.path.join(out_dir, "areas.csv"), summarize_areas(out, data))
    fio.write_diagnostics_csv(os.path.join(out_dir, "diagnostics.csv"), diagnostics(out))
    fio.write_draws(os.path.join(out_dir, "draws.bin"), out, cfg_hash)


def _write_point_fit(out_dir: str, data: Dataset, fit) -> None:
    """Classical point fits have no posterior spread: write estimates in
    the mean column and leave the others empty."""
    with open(os.path.join(out_dir, "params.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["parameter", "mean", "sd", "q2.5", "median", "q97.5"])
        for j, b in enumerate(fit.params.beta):
            w.writerow([f"beta{j + 1}", fio.fmt(b), "", "", "", ""])
        w.writerow(["a", fio.fmt(fit.params.a_var), "", "", "", ""])
    a = fit.params.a_var
    cond_sd = np.sqrt(data.d_var * a / (data.d_var + a)) if a > 0 else np.zeros(data.m)
    with open(os.path.join(out_dir, "areas.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["area_id", "theta_mean", "theta_sd", "outlier_prob", "shrinkage"])
        for i, aid in enumerate(data.area_ids):
            w.writerow([aid, fio.fmt(fit.theta[i]), fio.fmt(cond_sd[i]), "",
                        fio.fmt(fit.shrinkage[i])])


def _cmd_fit_fh(args) -> int:
    cfg = _effective_config(args)
    seed = _seed_from(cfg)
    data = fio.read_dataset(args.data, intercept=not args.no_intercept)
    out_dir = _ensure_out_dir(args.out_dir)
    if args.method in ("reml", "pr"):
        fit = fit_fh(data, method=args.method)
        _write_point_fit(out_dir, data, fit)
        print(f"fit-fh method={args.method} m={data.m} r={data.r} "
              f"a={fio.fmt(fit.params.a_var)}")
    else:
        chain = fio.chain_config_from(cfg, seed)
        out = run_fh_chain(data, chain)
        _write_chain_outputs(out_dir, out, data, fio.config_hash(cfg))
        print(f"fit-fh method=hb m={data.m} r={data.r} "
              f"chains={chain.chains} retained={chain.retained} seed={seed}")
    return 0


def _cmd_fit_mix(args) -> int:
    cfg = _effective_config(args)
    seed = _seed_from(cfg)
    data = fio.read_dataset(args.data, intercept=not args.no_intercept)
    prior = fio.prior_config_from(cfg)
    check = validate_prior(prior, data.m, data.r)
    if not check:
        raise PriorProprietyError(
            "improper posterior; violated: " + "; ".join(check.violations))
    chain = fio.chain_config_from(cfg, seed)
    out = run_mixture_chain(data, prior, chain)
    out_dir = _ensure_out_dir(args.out_dir)
    _write_chain_outputs(out_dir, out, data, fio.config_hash(cfg))
    print(f"fit-mix m={data.m} r={data.r} chains={chain.chains} "
          f"retained={chain.retained} seed={seed}")
    return 0


def _cmd_simulate(args) -> int:
    cfg = _effective_config(args)
    seed = _seed_from(cfg)
    prior = fio.prior_config_from(cfg)
    chain = {k: int(cfg[k]) for k in ("iterations", "burn_in", "thin", "chains")
             if k in cfg}
    if args.scenario == "contamination":
        cases = tuple(c.strip() for c in args.cases.split(",") if c.strip())
        rows = run_shrinkage_study(m=args.m, seed=seed, cases=cases,
                                   chain=chain, prior=prior)
        fio.write_shrinkage_csv(args.out, rows)
        print(f"simulate contamination m={args.m} cases={','.join(cases)} "
              f"seed={seed} -> {args.out}")
    else:
        spec = ScenarioSpec(scenario=args.scenario, m=args.m, reps=args.reps)
        report = run_study([spec], seed=seed, chain=chain, prior=prior)
        fio.write_study_csv(args.out, report)
        for line in report.failures:
            print(f"warning: replicate failed: {line}", file=sys.stderr)
        print(f"simulate {args.scenario} m={args.m} reps={args.reps} "
              f"seed={seed} -> {args.out}")
    return 0


def _chain_output_from_draws(fields: dict[str, str],
                             arrays: dict[str, np.ndarray],
                             area_ids: list[str] | None) -> ChainOutput:
    chains = int(fields["chains"])
    retained = int(fields["retained"])
    m = int(fields["m"])
    seed = int(fields.get("seed", "0"))
    if area_ids is None:
        area_ids = [str(i + 1) for i in range(m)]
    config = ChainConfig(iterations=retained, burn_in=0, thin=1,
                         chains=chains, seed=seed)
    if fields["kind"] == "mixture":
        return ChainOutput(kind="mixture", theta=arrays["theta"],
                           beta=arrays["beta"], config=config,
                           area_ids=area_ids, a1=arrays["a1"],
                           a2=arrays["a2"], p=arrays["p"],
                           delta=arrays["delta"])
    return ChainOutput(kind="fh", theta=arrays["theta"], beta=arrays["beta"],
                       config=config, area_ids=area_ids, a=arrays["a"])


def _cmd_summarize(args) -> int:
    fields, arrays = fio.read_draws(args.draws)
    data = None
    if args.data is not None:
        data = fio.read_dataset(args.data, intercept=not args.no_intercept)
        if data.m != int(fields["m"]):
            raise DataError(f"draws have m={fields['m']} but dataset has m={data.m}")
    ids = data.area_ids if data is not None else None
    out = _chain_output_from_draws(fields, arrays, ids)
    out_dir = _ensure_out_dir(args.out_dir)
    fio.write_params_csv(os.path.join(out_dir, "params.csv"), summarize_params(out))
    fio.write_diagnostics_csv(os.path.join(out_dir, "diagnostics.csv"), diagnostics(out))
    wrote = "params.csv, diagnostics.csv"
    if data is not None:
        fio.write_areas_csv(os.path.join(out_dir, "areas.csv"),
                            summarize_areas(out, data))
        wrote += ", areas.csv"
    print(f"summarize kind={fields['kind']} config={fields.get('config', '')} "
          f"-> {wrote}")
    return 0


_COMMANDS = {
    "fit-fh": _cmd_fit_fh,
    "fit-mix": _cmd_fit_mix,
    "simulate": _cmd_simulate,
    "summarize": _cmd_summarize,
}


def run_cli(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PriorProprietyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (SamplerError, EstimationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
