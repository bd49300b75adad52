"""Core domain types, data simulation, and objective evaluation.

A switched-linear regression produces each output y_k from one of S linear
subsystems: y_k = x_k . theta_{z_k} + e_k, where z_k is the per-sample
subsystem label.  This module holds the value types (dataset, parameter
bank, label sequence, relaxed membership weights, noise description) and
the two objectives: the integer assignment objective and its penalty
relaxation over fractional memberships.

Conventions: regressors are stored row-major (one sample per row), labels
are 1-based everywhere they are exposed, and all types are immutable after
construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

COLUMN_SUM_TOL = 1e-12


def _as_matrix(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-D array, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must be nonempty, got shape {arr.shape}")
    return arr


@dataclass(frozen=True, eq=False)
class Assignment:
    """Per-sample subsystem labels, values in {1, ..., S}."""

    labels: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=int)
        if labels.ndim != 1 or labels.size < 1:
            raise ValueError("labels must be a nonempty 1-D integer array")
        if labels.min() < 1:
            raise ValueError("labels are 1-based; smallest allowed label is 1")
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return int(self.labels.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Assignment):
            return NotImplemented
        return np.array_equal(self.labels, other.labels)

    def indices_of(self, s: int) -> np.ndarray:
        """0-based positions of the samples assigned to subsystem ``s``."""
        return np.flatnonzero(self.labels == s)

    def cluster_sizes(self, S: int) -> tuple[int, ...]:
        return tuple(int(np.count_nonzero(self.labels == s)) for s in range(1, S + 1))


@dataclass(frozen=True)
class SLModel:
    """Bank of S subsystem parameter vectors, one row per subsystem."""

    params: np.ndarray

    def __post_init__(self):
        params = _as_matrix(self.params, "params")
        object.__setattr__(self, "params", params)

    @property
    def S(self) -> int:
        return self.params.shape[0]

    @property
    def n(self) -> int:
        return self.params.shape[1]


@dataclass(frozen=True)
class NoiseSpec:
    """Additive output noise; ``sigma`` is zero exactly when ``kind`` is "none"."""

    kind: str = "none"
    sigma: float = 0.0
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in ("none", "gaussian"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        if (self.sigma == 0.0) != (self.kind == "none"):
            raise ValueError("sigma must be 0 exactly when kind is 'none'")


@dataclass(frozen=True)
class Dataset:
    """Regressor rows, outputs, and (optionally) the true label sequence."""

    regressors: np.ndarray
    outputs: np.ndarray
    truth: Assignment | None = None

    def __post_init__(self):
        regressors = _as_matrix(self.regressors, "regressors")
        outputs = np.asarray(self.outputs, dtype=float)
        if outputs.ndim != 1:
            raise ValueError("outputs must be 1-D")
        if outputs.size != regressors.shape[0]:
            raise ValueError(
                f"outputs length {outputs.size} does not match "
                f"{regressors.shape[0]} regressor rows"
            )
        if self.truth is not None and len(self.truth) != regressors.shape[0]:
            raise ValueError("truth labels length does not match sample count")
        object.__setattr__(self, "regressors", regressors)
        object.__setattr__(self, "outputs", outputs)

    @property
    def N(self) -> int:
        return self.regressors.shape[0]

    @property
    def n(self) -> int:
        return self.regressors.shape[1]


@dataclass(frozen=True, eq=False)
class RelaxedMembership:
    """S x N fractional membership weights with unit column sums."""

    weights: np.ndarray

    def __post_init__(self):
        weights = _as_matrix(self.weights, "weights")
        if weights.min() < 0.0 or weights.max() > 1.0:
            raise ValueError("membership entries must lie in [0, 1]")
        colsums = weights.sum(axis=0)
        if np.max(np.abs(colsums - 1.0)) > COLUMN_SUM_TOL:
            raise ValueError("membership column sums must equal 1 within 1e-12")
        object.__setattr__(self, "weights", weights)

    @property
    def S(self) -> int:
        return self.weights.shape[0]

    @property
    def N(self) -> int:
        return self.weights.shape[1]

    @classmethod
    def from_assignment(cls, a: Assignment, S: int) -> "RelaxedMembership":
        if a.labels.max() > S:
            raise ValueError("assignment uses a label above S")
        w = np.zeros((S, len(a)))
        w[a.labels - 1, np.arange(len(a))] = 1.0
        return cls(w)

    def is_binary(self) -> bool:
        return bool(np.all((self.weights == 0.0) | (self.weights == 1.0)))

    def to_assignment(self) -> Assignment:
        if not self.is_binary():
            raise ValueError("membership is fractional; no assignment equivalent")
        return Assignment(np.argmax(self.weights, axis=0) + 1)


def _check_pair(data: Dataset, model: SLModel) -> None:
    if data.n != model.n:
        raise ValueError(
            f"regressor dimension {data.n} does not match model dimension {model.n}"
        )


def residual_matrix(data: Dataset, model: SLModel) -> np.ndarray:
    """S x N matrix of residuals y_k - x_k . theta_s."""
    _check_pair(data, model)
    return data.outputs[None, :] - model.params @ data.regressors.T


def simulate(
    model: SLModel,
    regressors,
    switching: Assignment,
    noise: NoiseSpec = NoiseSpec(),
) -> Dataset:
    """Generate outputs from a known model and switching sequence.

    Outputs are x_k . theta_{z_k} plus noise drawn per ``noise``; the
    returned dataset carries ``switching`` as its truth labels.  With a
    gaussian spec the draw is deterministic given ``noise.seed``.
    """
    regressors = _as_matrix(regressors, "regressors")
    if regressors.shape[1] != model.n:
        raise ValueError(
            f"regressor dimension {regressors.shape[1]} does not match model "
            f"dimension {model.n}"
        )
    if len(switching) != regressors.shape[0]:
        raise ValueError("switching length does not match regressor rows")
    if switching.labels.max() > model.S:
        raise ValueError(
            f"switching label {switching.labels.max()} out of range 1..{model.S}"
        )
    # same computation as residual_matrix, so noise-free truth residuals are
    # exactly zero bit for bit
    preds = model.params @ regressors.T
    y = preds[switching.labels - 1, np.arange(regressors.shape[0])]
    if noise.kind == "gaussian":
        rng = np.random.default_rng(noise.seed)
        y = y + rng.normal(0.0, noise.sigma, size=y.size)
    return Dataset(regressors, y, truth=switching)


def generate_random_scenario(
    n: int,
    S: int,
    N: int,
    param_range: tuple[float, float] = (-5.0, 5.0),
    noise: NoiseSpec = NoiseSpec(),
    seed: int | None = 0,
) -> tuple[SLModel, Dataset]:
    """Draw a random model and dataset, reproducibly from ``seed``.

    Parameter and regressor entries are iid uniform on ``param_range`` and
    labels iid uniform on {1, ..., S}.  When the noise spec carries no seed
    of its own, one is derived from ``seed`` so the whole scenario is a
    function of a single integer.
    """
    if n < 1 or S < 1 or N < 1:
        raise ValueError("n, S, N must all be >= 1")
    lo, hi = float(param_range[0]), float(param_range[1])
    if not lo < hi:
        raise ValueError(f"param_range ({lo}, {hi}) is an empty interval")
    rng = np.random.default_rng(seed)
    params = rng.uniform(lo, hi, size=(S, n))
    regressors = rng.uniform(lo, hi, size=(N, n))
    labels = rng.integers(1, S + 1, size=N)
    if noise.kind == "gaussian" and noise.seed is None:
        noise = NoiseSpec("gaussian", noise.sigma, seed=int(rng.integers(2**63)))
    model = SLModel(params)
    data = simulate(model, regressors, Assignment(labels), noise)
    return model, data


def objective_integer(data: Dataset, model: SLModel, a: Assignment) -> float:
    """Sum of squared residuals under a hard assignment.

    Computed from the same residual matrix as the relaxed objective so the
    two agree bitwise at binary memberships.
    """
    _check_pair(data, model)
    if len(a) != data.N:
        raise ValueError("assignment length does not match dataset")
    if a.labels.max() > model.S:
        raise ValueError("assignment uses a label above the model's S")
    r = residual_matrix(data, model)[a.labels - 1, np.arange(data.N)]
    return float(np.sum(r * r))


def objective_relaxed(data: Dataset, model: SLModel, w: RelaxedMembership) -> float:
    """Relaxed objective: weighted residuals plus the concave penalty.

    Per sample this is sum_s w_{s,k} (y_k - x_k.theta_s)^2 + (1 - sum_s
    w_{s,k}^2).  At binary weights the penalty vanishes and the value equals
    ``objective_integer`` exactly.
    """
    _check_pair(data, model)
    if w.S != model.S:
        raise ValueError("membership row count does not match model's S")
    if w.N != data.N:
        raise ValueError("membership column count does not match dataset")
    r = residual_matrix(data, model)
    fit = (w.weights * (r * r)).sum(axis=0)
    penalty = 1.0 - (w.weights * w.weights).sum(axis=0)
    return float(np.sum(fit + penalty))
