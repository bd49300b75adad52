"""Excitation certificates for labeled switched-linear data.

A labeled dataset identifies its generating model uniquely (up to relabeling
of subsystems) only when the regressors and the switching pattern are rich
enough.  This module implements the checkable conditions:

  1. all subsystem parameter vectors pairwise distinct;
  2. no regressor orthogonal to any parameter difference;
  3. an ordered-cluster partition condition: clusters can be arranged in a
     sequence so that, at position s of S, every split of that cluster into
     at most S - s + 1 nonempty blocks leaves at least one block with a
     full-rank Gram (at the last position this is plain nonsingularity of
     the whole cluster Gram).

It also provides the three competing minimum-sample-count formulas and a
sufficient certificate based on n-genericity plus cluster-size thresholds.
All verdicts are exact; when an enumeration guard is hit the result is an
explicit "undecided", never a guess.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .model import Assignment, Dataset, SLModel
from .partitions import GRAM_RTOL, gram_nonsingular, min_rank_deficient_partition

CERTIFIED = "certified"
REFUTED = "refuted"
UNDECIDED = "undecided"


@dataclass(frozen=True)
class Limits:
    """Enumeration guards for the combinatorial checks."""

    max_block_size: int = 14
    max_genericity_subsets: int = 200_000


@dataclass(frozen=True)
class SampleCounts:
    """Minimum sample counts required by the three excitation conditions."""

    ours: int
    bako: int
    vidal: int


def min_samples_ours(n: int, S: int) -> int:
    """((n-1)S^2 + (n+1)S)/2; the numerator is always even."""
    _check_ns(n, S)
    return ((n - 1) * S * S + (n + 1) * S) // 2


def min_samples_bako(n: int, S: int) -> int:
    """n S^2."""
    _check_ns(n, S)
    return n * S * S


def min_samples_vidal(n: int, S: int) -> int:
    """C(n+S, n) - 1, in exact integer arithmetic."""
    _check_ns(n, S)
    return math.comb(n + S, n) - 1


def min_samples_table(n_max: int, S_max: int) -> dict[tuple[int, int], SampleCounts]:
    """Grid of all three counts for 1 <= n <= n_max, 1 <= S <= S_max."""
    _check_ns(n_max, S_max)
    return {
        (n, S): SampleCounts(
            min_samples_ours(n, S), min_samples_bako(n, S), min_samples_vidal(n, S)
        )
        for n in range(1, n_max + 1)
        for S in range(1, S_max + 1)
    }


def _check_ns(n: int, S: int) -> None:
    if n < 1 or S < 1:
        raise ValueError("n and S must both be >= 1")


def check_distinct_params(model: SLModel, tol: float = 1e-9) -> bool:
    """True when all pairwise parameter differences have norm above tol."""
    for i, j in combinations(range(model.S), 2):
        if np.linalg.norm(model.params[i] - model.params[j]) <= tol:
            return False
    return True


def check_no_separating_regressor(
    data: Dataset, model: SLModel, tol: float = GRAM_RTOL
) -> tuple[bool, list[tuple[int, int, int]]]:
    """Check that no regressor separates a pair of subsystems.

    A sample k violates the condition when x_k is (numerically) orthogonal
    to theta_i - theta_j for some pair i < j, i.e. both subsystems predict
    the same output there.  Returns the verdict and the list of violating
    (k, i, j), all 1-based.
    """
    violations: list[tuple[int, int, int]] = []
    xnorm = np.linalg.norm(data.regressors, axis=1)
    for i, j in combinations(range(model.S), 2):
        diff = model.params[i] - model.params[j]
        dnorm = np.linalg.norm(diff)
        inner = np.abs(data.regressors @ diff)
        bad = np.flatnonzero(inner <= tol * xnorm * dnorm)
        violations.extend((int(k) + 1, i + 1, j + 1) for k in bad)
    violations.sort()
    return not violations, violations


def check_cluster_pe(
    data: Dataset, a: Assignment, s: int, tol: float = GRAM_RTOL
) -> bool:
    """Classical single-system excitation of cluster s: full-rank Gram."""
    if len(a) != data.N:
        raise ValueError("assignment length does not match dataset")
    if s < 1:
        raise ValueError("s is a 1-based subsystem label")
    rows = data.regressors[a.indices_of(s)]
    return gram_nonsingular(rows, data.n, tol)


@dataclass(frozen=True)
class PartitionWitness:
    """An all-rank-deficient split refuting one stage of the condition.

    ``cluster`` is the subsystem label, ``budget`` the block allowance at the
    stage where the cluster would be placed, and ``blocks`` the offending
    split as tuples of 1-based sample indices.
    """

    cluster: int
    budget: int
    blocks: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class PartitionCheck:
    """Outcome of the ordered-cluster partition condition."""

    status: str
    permutation: tuple[int, ...] | None = None
    witness: PartitionWitness | None = None
    # per cluster: smallest all-rank-deficient block count, or None when no
    # such split exists with at most S blocks
    min_deficient_blocks: dict[int, int | None] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == CERTIFIED


def check_partition_condition(
    data: Dataset,
    a: Assignment,
    S: int,
    tol: float = GRAM_RTOL,
    limits: Limits = Limits(),
) -> PartitionCheck:
    """Search for an ordering of clusters certifying the partition condition.

    For each cluster the adversary seeks a split into few all-rank-deficient
    blocks; a cluster whose smallest such split uses f blocks can safely
    occupy any stage s with block budget S - s + 1 < f.  The condition holds
    iff the clusters can be arranged so every stage is safe, which is decided
    from the f values alone; the reported permutation is the lexicographically
    smallest certificate.
    """
    if len(a) != data.N:
        raise ValueError("assignment length does not match dataset")
    if S < 1:
        raise ValueError("S must be >= 1")
    members = {s: a.indices_of(s) for s in range(1, S + 1)}
    oversized = [s for s, idx in members.items() if idx.size > limits.max_block_size]
    if oversized:
        return PartitionCheck(status=UNDECIDED)

    # f[s]: smallest all-rank-deficient block count (0 for an empty cluster,
    # which defeats every stage); None when no split with <= S blocks exists.
    f: dict[int, int | None] = {}
    splits: dict[int, list[list[int]]] = {}
    for s, idx in members.items():
        found = min_rank_deficient_partition(data.regressors[idx], S, tol)
        if found is None:
            f[s] = None
        else:
            count, blocks = found
            f[s] = count
            splits[s] = [[int(idx[i]) + 1 for i in block] for block in blocks]

    def safe(s: int, stage: int) -> bool:
        budget = S - stage + 1
        return f[s] is None or f[s] > budget

    def completable(chosen: list[int], stage: int) -> bool:
        # early stages have the largest block budgets, so the most
        # split-resistant clusters (largest f, None meaning unsplittable)
        # must take them; feasibility of that arrangement is necessary and
        # sufficient
        remaining = [s for s in members if s not in chosen]
        remaining.sort(key=lambda s: (f[s] is not None, -(f[s] or 0)))
        return all(safe(s, stage + i) for i, s in enumerate(remaining))

    if completable([], 1):
        perm: list[int] = []
        for stage in range(1, S + 1):
            for s in sorted(set(members) - set(perm)):
                if safe(s, stage) and completable(perm + [s], stage + 1):
                    perm.append(s)
                    break
        return PartitionCheck(
            status=CERTIFIED, permutation=tuple(perm), min_deficient_blocks=f
        )

    # No ordering works: in the best arrangement (f descending), report the
    # first stage whose cluster is defeated, with that cluster's split.
    order = sorted(members, key=lambda s: (f[s] is not None, -(f[s] or 0), s))
    for stage, s in enumerate(order, start=1):
        if not safe(s, stage):
            witness = PartitionWitness(
                cluster=s,
                budget=S - stage + 1,
                blocks=tuple(tuple(b) for b in splits.get(s, [])),
            )
            return PartitionCheck(
                status=REFUTED, witness=witness, min_deficient_blocks=f
            )
    raise AssertionError("infeasible ordering must have a defeated stage")


def check_genericity_sufficient(
    data: Dataset,
    a: Assignment,
    S: int | None = None,
    tol: float = GRAM_RTOL,
    limits: Limits = Limits(),
) -> bool | None:
    """Sufficient excitation certificate from n-genericity and cluster sizes.

    True when every n-subset of every cluster has a full-rank Gram and the
    cluster sizes, sorted descending, dominate n + (n-1)(S-s).  Returns None
    when the subset enumeration would exceed the guard.
    """
    if len(a) != data.N:
        raise ValueError("assignment length does not match dataset")
    n = data.n
    if S is None:
        S = int(a.labels.max())
    sizes = sorted(a.cluster_sizes(S), reverse=True)
    for s, size in enumerate(sizes, start=1):
        if size < n + (n - 1) * (S - s):
            return False
    total = sum(math.comb(size, n) for size in sizes)
    if total > limits.max_genericity_subsets:
        return None
    for s in range(1, S + 1):
        rows = data.regressors[a.indices_of(s)]
        for subset in combinations(range(rows.shape[0]), n):
            if not gram_nonsingular(rows[list(subset)], n, tol):
                return False
    return True


@dataclass(frozen=True)
class PEReport:
    """Aggregated excitation verdicts for a labeled dataset."""

    cond1_distinct_params: bool
    cond2_no_separating_regressor: bool
    cond2_violations: tuple[tuple[int, int, int], ...]
    cluster_pe: tuple[bool, ...]
    cond3_partition: PartitionCheck
    genericity_sufficient: bool | None
    sizes: tuple[int, ...]
    certified: bool
    undecided: bool

    def to_dict(self) -> dict:
        part = self.cond3_partition
        witness = None
        if part.witness is not None:
            witness = {
                "cluster": part.witness.cluster,
                "budget": part.witness.budget,
                "blocks": [list(b) for b in part.witness.blocks],
            }
        return {
            "cond1_distinct_params": self.cond1_distinct_params,
            "cond2_no_separating_regressor": self.cond2_no_separating_regressor,
            "cond2_violations": [list(v) for v in self.cond2_violations],
            "cluster_pe": list(self.cluster_pe),
            "cond3_status": part.status,
            "cond3_permutation": list(part.permutation) if part.permutation else None,
            "cond3_witness": witness,
            "genericity_sufficient": self.genericity_sufficient,
            "sizes": list(self.sizes),
            "certified": self.certified,
            "undecided": self.undecided,
        }


def pe_report(
    data: Dataset,
    model: SLModel,
    a: Assignment | None = None,
    tol: float = GRAM_RTOL,
    limits: Limits = Limits(),
) -> PEReport:
    """Run all excitation checks; certified iff conditions 1-3 all pass."""
    if a is None:
        a = data.truth
    if a is None:
        raise ValueError("no assignment given and dataset carries no truth labels")
    if len(a) != data.N:
        raise ValueError("assignment length does not match dataset")
    S = model.S
    cond1 = check_distinct_params(model)
    cond2, violations = check_no_separating_regressor(data, model, tol)
    cluster_pe = tuple(check_cluster_pe(data, a, s, tol) for s in range(1, S + 1))
    part = check_partition_condition(data, a, S, tol, limits)
    genericity = check_genericity_sufficient(data, a, S, tol, limits)
    return PEReport(
        cond1_distinct_params=cond1,
        cond2_no_separating_regressor=cond2,
        cond2_violations=tuple(violations),
        cluster_pe=cluster_pe,
        cond3_partition=part,
        genericity_sufficient=genericity,
        sizes=a.cluster_sizes(S),
        certified=cond1 and cond2 and part.status == CERTIFIED,
        undecided=part.status == UNDECIDED,
    )
