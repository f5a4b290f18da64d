"""Core data containers for area-level models.

The observation model is

    y_i = theta_i + e_i,        e_i ~ N(0, d_i),  d_i known,
    theta_i = x_i' beta + v_i,

with v_i ~ N(0, a) in the classical fit, or a two-component normal
mixture v_i ~ (1 - delta_i) N(0, a1) + delta_i N(0, a2), a1 < a2, in the
robust extension.  delta_i = 1 marks the wide (outlier) component and
P(delta_i = 1) = p.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DataError


@dataclass(frozen=True, eq=False)
class AreaObservation:
    """One small area: direct estimate, its sampling variance, covariates.

    `se` is the sampling standard error as stored in source files; it is
    kept alongside `d_var` so that a dataset read from disk writes back
    byte-identically (squaring a rounded square root can drift an ulp).
    """

    area_id: str
    y: float
    d_var: float
    x: np.ndarray
    se: float | None = None

    def __post_init__(self):
        if not np.isfinite(self.y):
            raise DataError(f"area {self.area_id!r}: y is not finite")
        if not (np.isfinite(self.d_var) and self.d_var > 0):
            raise DataError(f"area {self.area_id!r}: d_var must be finite and > 0")
        x = np.asarray(self.x, dtype=np.float64)
        if x.ndim != 1 or not np.all(np.isfinite(x)):
            raise DataError(f"area {self.area_id!r}: covariate row must be a finite vector")
        object.__setattr__(self, "x", x)
        if self.se is None:
            object.__setattr__(self, "se", float(np.sqrt(self.d_var)))


class Dataset:
    """Immutable column store for m areas with an (m, r) design matrix.

    Validation happens once at construction: m > r, finite entries,
    strictly positive sampling variances, and a full-column-rank design.
    """

    def __init__(
        self,
        y: np.ndarray,
        d_var: np.ndarray,
        X: np.ndarray,
        area_ids: Sequence[str] | None = None,
        se: np.ndarray | None = None,
    ):
        y = np.ascontiguousarray(y, dtype=np.float64)
        d = np.ascontiguousarray(d_var, dtype=np.float64)
        X = np.ascontiguousarray(X, dtype=np.float64)
        if X.ndim != 2:
            raise DataError("design matrix must be two-dimensional")
        m, r = X.shape
        if y.shape != (m,) or d.shape != (m,):
            raise DataError("y, d_var and X row counts disagree")
        if m <= r:
            raise DataError(f"need more areas than regression coefficients (m={m}, r={r})")
        if not np.all(np.isfinite(y)):
            raise DataError("y contains non-finite values")
        if not np.all(np.isfinite(X)):
            raise DataError("design matrix contains non-finite values")
        bad = ~(np.isfinite(d) & (d > 0))
        if np.any(bad):
            i = int(np.flatnonzero(bad)[0])
            raise DataError(f"sampling variance must be finite and > 0 (row {i})")
        if np.linalg.matrix_rank(X) < r:
            raise DataError("design matrix is rank deficient")
        if area_ids is None:
            area_ids = [str(i + 1) for i in range(m)]
        ids = [str(a) for a in area_ids]
        if len(ids) != m:
            raise DataError("area_ids length disagrees with y")
        if len(set(ids)) != m:
            raise DataError("area_ids contains duplicates")
        if se is None:
            se_arr = np.sqrt(d)
        else:
            se_arr = np.ascontiguousarray(se, dtype=np.float64)
            if se_arr.shape != (m,):
                raise DataError("se length disagrees with y")
        self._y = y
        self._d = d
        self._X = X
        self._ids = ids
        self._se = se_arr
        for arr in (self._y, self._d, self._X, self._se):
            arr.setflags(write=False)

    @classmethod
    def from_areas(cls, areas: Sequence[AreaObservation]) -> "Dataset":
        if len(areas) == 0:
            raise DataError("empty dataset")
        r = areas[0].x.shape[0]
        for a in areas:
            if a.x.shape[0] != r:
                raise DataError(f"area {a.area_id!r}: covariate length {a.x.shape[0]} != {r}")
        return cls(
            y=np.array([a.y for a in areas]),
            d_var=np.array([a.d_var for a in areas]),
            X=np.array([a.x for a in areas]),
            area_ids=[a.area_id for a in areas],
            se=np.array([a.se for a in areas]),
        )

    @property
    def m(self) -> int:
        return self._X.shape[0]

    @property
    def r(self) -> int:
        return self._X.shape[1]

    @property
    def y(self) -> np.ndarray:
        return self._y

    @property
    def d_var(self) -> np.ndarray:
        return self._d

    @property
    def X(self) -> np.ndarray:
        return self._X

    @property
    def area_ids(self) -> list[str]:
        return list(self._ids)

    @property
    def se(self) -> np.ndarray:
        return self._se

    def areas(self) -> list[AreaObservation]:
        return [
            AreaObservation(self._ids[i], float(self._y[i]), float(self._d[i]),
                            self._X[i].copy(), float(self._se[i]))
            for i in range(self.m)
        ]


@dataclass(frozen=True)
class PriorConfig:
    """Hyperparameters of the mixture prior.

    pi(beta, a1, a2, p) is flat in beta, proportional to
    a1^(-alpha1) * a2^(-alpha2) on 0 < a1 < a2, and Beta(p_beta_a,
    p_beta_b) on p.  Whether (alpha1, alpha2) yields a proper posterior
    depends on (m, r), so that check lives in `validate_prior`, not here.
    """

    alpha1: float
    alpha2: float
    p_beta_a: float = 1.0
    p_beta_b: float = 1.0

    def __post_init__(self):
        for name in ("alpha1", "alpha2", "p_beta_a", "p_beta_b"):
            if not np.isfinite(getattr(self, name)):
                raise DataError(f"prior hyperparameter {name} must be finite")
        if self.p_beta_a <= 0 or self.p_beta_b <= 0:
            raise DataError("Beta hyperparameters for p must be > 0")


@dataclass(frozen=True, eq=False)
class FHParams:
    """Classical model parameters: regression coefficients and the
    random-effect variance a >= 0."""

    beta: np.ndarray
    a_var: float

    def __post_init__(self):
        beta = np.asarray(self.beta, dtype=np.float64)
        if beta.ndim != 1 or not np.all(np.isfinite(beta)):
            raise DataError("beta must be a finite vector")
        object.__setattr__(self, "beta", beta)
        if not (np.isfinite(self.a_var) and self.a_var >= 0):
            raise DataError("a_var must be finite and >= 0")


@dataclass(frozen=True, eq=False)
class MixtureParams:
    """Mixture model parameters.

    Ordered variances 0 < a1 <= a2 keep the components identified; the
    boundary a1 == a2 is admitted because evaluation functions are well
    defined there (the mixture collapses), while the samplers maintain
    the strict inequality by construction.
    """

    beta: np.ndarray
    a1: float
    a2: float
    p: float

    def __post_init__(self):
        beta = np.asarray(self.beta, dtype=np.float64)
        if beta.ndim != 1 or not np.all(np.isfinite(beta)):
            raise DataError("beta must be a finite vector")
        object.__setattr__(self, "beta", beta)
        if not (np.isfinite(self.a1) and self.a1 > 0):
            raise DataError("a1 must be finite and > 0")
        if not (np.isfinite(self.a2) and self.a2 >= self.a1):
            raise DataError("need a1 <= a2")
        if not (0.0 <= self.p <= 1.0):
            raise DataError("p must lie in [0, 1]")


@dataclass(frozen=True, eq=False)
class LatentState:
    """Per-area latent variables: true means theta and component labels
    delta (1 = wide component)."""

    theta: np.ndarray
    delta: np.ndarray

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=np.float64)
        delta = np.asarray(self.delta)
        if theta.ndim != 1 or not np.all(np.isfinite(theta)):
            raise DataError("theta must be a finite vector")
        if delta.shape != theta.shape or not np.all((delta == 0) | (delta == 1)):
            raise DataError("delta must be 0/1 and conformable with theta")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "delta", np.ascontiguousarray(delta, dtype=np.int8))


@dataclass(frozen=True)
class PriorCheck:
    """Outcome of the posterior-propriety check."""

    ok: bool
    violations: tuple[str, ...] = field(default_factory=tuple)

    def __bool__(self) -> bool:
        return self.ok
