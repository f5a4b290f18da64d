"""File formats: dataset CSV, flat key = value configs, result CSVs,
and the raw-draws binary.

All floating-point text is written with %.17g so values round-trip
exactly through read/write.  The draws binary is a single ASCII header
line followed by C-ordered little-endian float64.
"""

from __future__ import annotations

import csv
import hashlib
import os
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, DataError
from .gibbs import ChainConfig, ChainOutput
from .simstudy import DeviationReport, ShrinkageRow
from .summaries import AreaSummary, ParamDiagnostic, ParamSummary
from .types import Dataset, PriorConfig


def fmt(x: float) -> str:
    """Shortest text that restores the exact double (%.17g)."""
    return "%.17g" % float(x)


def read_dataset(path: str, intercept: bool = True) -> Dataset:
    """Load `area_id,y,se,x1,...,xk` and square the standard errors into
    sampling variances.  A leading all-ones column is injected unless
    `intercept` is false; with no x columns the intercept-only design is
    used."""
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise DataError(f"cannot open dataset {path!r}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"dataset {path!r} is empty") from None
        header = [h.strip() for h in header]
        if header[:3] != ["area_id", "y", "se"]:
            raise DataError(
                f"dataset {path!r}: header must start with area_id,y,se (got {header[:3]})")
        xcols = header[3:]
        for j, name in enumerate(xcols):
            if name != f"x{j + 1}":
                raise DataError(f"dataset {path!r}: covariate columns must be "
                                f"x1,x2,... (column {j + 4} is {name!r})")
        if not intercept and not xcols:
            raise DataError(f"dataset {path!r}: no covariates and no intercept")
        ids: list[str] = []
        y: list[float] = []
        se: list[float] = []
        rows: list[list[float]] = []
        for ln, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(header):
                raise DataError(f"dataset {path!r} line {ln}: expected "
                                f"{len(header)} fields, got {len(row)}")
            ids.append(row[0].strip())
            try:
                y.append(float(row[1]))
                se.append(float(row[2]))
                rows.append([float(v) for v in row[3:]])
            except ValueError as exc:
                raise DataError(f"dataset {path!r} line {ln}: {exc}") from None
    if not ids:
        raise DataError(f"dataset {path!r} has a header but no rows")
    se_arr = np.asarray(se)
    if np.any(~(np.isfinite(se_arr) & (se_arr > 0))):
        i = int(np.flatnonzero(~(np.isfinite(se_arr) & (se_arr > 0)))[0])
        raise DataError(f"dataset {path!r}: se must be finite and > 0 "
                        f"(area {ids[i]!r})")
    X = np.asarray(rows, dtype=np.float64).reshape(len(ids), len(xcols))
    if intercept:
        X = np.column_stack([np.ones(len(ids)), X])
    return Dataset(y=np.asarray(y), d_var=se_arr * se_arr, X=X,
                   area_ids=ids, se=se_arr)


def write_dataset(path: str, data: Dataset, intercept: bool = True) -> None:
    """Inverse of `read_dataset`: drops the injected intercept column
    when `intercept` is true and writes stored standard errors."""
    X = data.X[:, 1:] if intercept else data.X
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["area_id", "y", "se"] + [f"x{j + 1}" for j in range(X.shape[1])])
        for i, aid in enumerate(data.area_ids):
            w.writerow([aid, fmt(data.y[i]), fmt(data.se[i])]
                       + [fmt(v) for v in X[i]])


def read_config(path: str) -> dict[str, str]:
    """Flat `key = value` file; '#' starts a comment, blank lines are
    skipped, later keys override earlier ones."""
    try:
        text = open(path).read()
    except OSError as exc:
        raise ConfigError(f"cannot open config {path!r}: {exc}") from exc
    out: dict[str, str] = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config {path!r} line {ln}: expected key = value")
        key, val = line.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigError(f"config {path!r} line {ln}: empty key")
        out[key] = val.strip()
    return out


def config_hash(cfg: dict[str, str]) -> str:
    """sha256 over the canonical 'key=value' listing, sorted by key."""
    blob = "\n".join(f"{k}={cfg[k]}" for k in sorted(cfg)).encode()
    return hashlib.sha256(blob).hexdigest()


def write_params_csv(path: str, summaries: Sequence[ParamSummary]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["parameter", "mean", "sd", "q2.5", "median", "q97.5"])
        for s in summaries:
            w.writerow([s.name, fmt(s.mean), fmt(s.sd), fmt(s.q2_5),
                        fmt(s.median), fmt(s.q97_5)])


def write_areas_csv(path: str, summaries: Sequence[AreaSummary]) -> None:
    """outlier_prob is empty for fits without component labels."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["area_id", "theta_mean", "theta_sd", "outlier_prob", "shrinkage"])
        for s in summaries:
            prob = "" if s.outlier_prob is None else fmt(s.outlier_prob)
            w.writerow([s.area_id, fmt(s.theta_mean), fmt(s.theta_sd),
                        prob, fmt(s.shrinkage)])


def write_study_csv(path: str, report: DeviationReport) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["scenario", "m", "method", "group", "metric", "value"])
        for row in report.rows:
            w.writerow([row.scenario, row.m, row.method, row.group,
                        row.metric, fmt(row.value)])


def write_shrinkage_csv(path: str, rows: Iterable[ShrinkageRow]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["scenario", "method", "area_id", "weight", "contaminated"])
        for row in rows:
            w.writerow([row.scenario, row.method, row.area_id,
                        fmt(row.weight), row.contaminated])


def write_diagnostics_csv(path: str, diags: Sequence[ParamDiagnostic]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["parameter", "ess", "rhat", "flagged"])
        for d in diags:
            rhat = "" if np.isnan(d.rhat) else fmt(d.rhat)
            w.writerow([d.name, fmt(d.ess), rhat, int(d.flagged)])


_DRAWS_MAGIC = "fhmix-draws"
_DRAWS_VERSION = 1


def _draws_matrix(out: ChainOutput) -> np.ndarray:
    """Column layout per retained sweep: theta (m), beta (r), then the
    variance block: a1, a2, p and delta (m, stored 0.0/1.0) for the
    mixture, a alone for the classical chain."""
    blocks = [out.theta, out.beta]
    if out.kind == "mixture":
        blocks += [out.a1[..., None], out.a2[..., None], out.p[..., None],
                   out.delta.astype(np.float64)]
    else:
        blocks += [out.a[..., None]]
    return np.concatenate(blocks, axis=2)


def write_draws(path: str, out: ChainOutput, cfg_hash: str) -> None:
    """One ASCII header line (seed, config hash, shapes), then the
    little-endian float64 draw matrix in C order."""
    mat = _draws_matrix(out)
    header = (f"{_DRAWS_MAGIC} v{_DRAWS_VERSION} kind={out.kind} "
              f"seed={out.config.seed} config={cfg_hash} "
              f"chains={out.chains} retained={out.retained} "
              f"m={out.m} r={out.r}\n")
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(np.ascontiguousarray(mat, dtype="<f8").tobytes())


def read_draws(path: str) -> tuple[dict[str, str], dict[str, np.ndarray]]:
    """Returns (header fields, named draw arrays).  Array shapes are
    (chains, retained, .) as written."""
    try:
        fh = open(path, "rb")
    except OSError as exc:
        raise DataError(f"cannot open draws {path!r}: {exc}") from exc
    with fh:
        header = fh.readline().decode("ascii", errors="replace").rstrip("\n")
        body = fh.read()
    tokens = header.split()
    if len(tokens) < 2 or tokens[0] != _DRAWS_MAGIC or tokens[1] != f"v{_DRAWS_VERSION}":
        raise DataError(f"draws {path!r}: bad header {header!r}")
    fields: dict[str, str] = {}
    for tok in tokens[2:]:
        if "=" not in tok:
            raise DataError(f"draws {path!r}: malformed header token {tok!r}")
        k, v = tok.split("=", 1)
        fields[k] = v
    try:
        kind = fields["kind"]
        chains = int(fields["chains"])
        retained = int(fields["retained"])
        m = int(fields["m"])
        r = int(fields["r"])
    except (KeyError, ValueError) as exc:
        raise DataError(f"draws {path!r}: incomplete header: {exc}") from None
    if kind == "mixture":
        ncol = m + r + 3 + m
    elif kind == "fh":
        ncol = m + r + 1
    else:
        raise DataError(f"draws {path!r}: unknown kind {kind!r}")
    expect = chains * retained * ncol * 8
    if len(body) != expect:
        raise DataError(f"draws {path!r}: expected {expect} data bytes, "
                        f"got {len(body)}")
    mat = np.frombuffer(body, dtype="<f8").reshape(chains, retained, ncol)
    arrays = {"theta": mat[:, :, :m], "beta": mat[:, :, m:m + r]}
    if kind == "mixture":
        arrays["a1"] = mat[:, :, m + r]
        arrays["a2"] = mat[:, :, m + r + 1]
        arrays["p"] = mat[:, :, m + r + 2]
        arrays["delta"] = mat[:, :, m + r + 3:]
    else:
        arrays["a"] = mat[:, :, m + r]
    return fields, arrays


def resolve_seed(explicit: int | None) -> int:
    """CLI seed resolution: the flag wins, then SAE_SEED, then 0."""
    if explicit is not None:
        return explicit
    env = os.environ.get("SAE_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise ConfigError(f"SAE_SEED must be an integer (got {env!r})") from None


def chain_config_from(cfg: dict[str, str], seed: int) -> ChainConfig:
    """Build a ChainConfig from flat config keys, applying defaults."""
    kw: dict[str, int] = {}
    for key in ("iterations", "burn_in", "thin", "chains"):
        if key in cfg:
            try:
                kw[key] = int(cfg[key])
            except ValueError:
                raise ConfigError(f"config key {key} must be an integer "
                                  f"(got {cfg[key]!r})") from None
    return ChainConfig(seed=seed, **kw)


def prior_config_from(cfg: dict[str, str]) -> PriorConfig:
    kw: dict[str, float] = {}
    names = {"alpha1": "alpha1", "alpha2": "alpha2",
             "p_beta_a": "p_beta_a", "p_beta_b": "p_beta_b"}
    for key, attr in names.items():
        if key in cfg:
            try:
                kw[attr] = float(cfg[key])
            except ValueError:
                raise ConfigError(f"config key {key} must be a number "
                                  f"(got {cfg[key]!r})") from None
    kw.setdefault("alpha1", 0.3)
    kw.setdefault("alpha2", 1.3)
    return PriorConfig(**kw)
