"""Typical-period aggregation of intra-year time series.

Full-year profiles are cut into periods of equal length, clustered with a
k-medoids heuristic and replaced by weighted representative periods. After
clustering, every profile is rescaled so that its weighted annual sum matches
the original exactly.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import DomainError, UnknownNameError

SUMS_TO_ONE = "sums_to_one"
CAPACITY_FACTOR = "capacity_factor"
NORMALIZATIONS = (SUMS_TO_ONE, CAPACITY_FACTOR)


@dataclass(frozen=True, eq=False)
class Profile:
    """A full-year series, e.g. an hourly load shape or a PV capacity factor."""

    id: str
    values: np.ndarray
    normalization: str = CAPACITY_FACTOR

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.normalization not in NORMALIZATIONS:
            raise DomainError(f"profile {self.id!r}: unknown normalization {self.normalization!r}")

    def __len__(self):
        return len(self.values)

    def problems(self) -> list[str]:
        out = []
        if not np.all(np.isfinite(self.values)):
            out.append("non-finite values")
        elif self.normalization == SUMS_TO_ONE and abs(self.values.sum() - 1.0) > 1e-9:
            out.append(f"sums to {self.values.sum()!r}, expected 1")
        return out


@dataclass(frozen=True, eq=False)
class TypicalPeriodSet:
    """Representative periods with their occurrence weights.

    Attributes
    ----------
    period_length : int
        Time steps per period.
    representatives : mapping of profile id to array of shape (k, period_length)
    weights : int array of shape (k,)
        Number of original periods represented by each representative.
    assignment : int array of shape (n_periods,)
        Representative index for each original period.
    medoids : int array of shape (k,)
        Original period index chosen as medoid for each representative.
    objective : float
        Sum of distances from each period to its medoid (normalized space).
    """

    period_length: int
    representatives: Mapping[str, np.ndarray]
    weights: np.ndarray
    assignment: np.ndarray
    medoids: np.ndarray
    objective: float = 0.0

    @property
    def k(self) -> int:
        return len(self.weights)

    @property
    def steps_per_year(self) -> int:
        return int(self.weights.sum()) * self.period_length

    @property
    def n_periods(self) -> int:
        return len(self.assignment)

    def step_weights(self) -> np.ndarray:
        """Weight of every (period, step) pair, flattened row-major."""
        return np.repeat(self.weights.astype(float), self.period_length)

    def series(self, profile_id: str) -> np.ndarray:
        """Flattened representative values of one profile (length k * period_length)."""
        try:
            return self.representatives[profile_id].ravel()
        except KeyError:
            raise UnknownNameError(f"profile {profile_id!r} not aggregated") from None

    @classmethod
    def single(cls, steps_per_year: int = 1) -> "TypicalPeriodSet":
        """One representative step standing for the whole year."""
        return cls(
            period_length=1,
            representatives={},
            weights=np.array([steps_per_year]),
            assignment=np.zeros(steps_per_year, dtype=int),
            medoids=np.array([0]),
        )


def _period_matrix(profile: Profile, period_length: int) -> np.ndarray:
    return profile.values.reshape(-1, period_length)


def _features(profiles: list[Profile], period_length: int) -> np.ndarray:
    blocks = []
    for p in profiles:
        m = _period_matrix(p, period_length)
        lo, hi = m.min(), m.max()
        blocks.append((m - lo) / (hi - lo) if hi > lo else np.zeros_like(m))
    return np.hstack(blocks)


def _distances(x: np.ndarray) -> np.ndarray:
    sq = (x * x).sum(axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * x @ x.T
    np.maximum(d2, 0.0, out=d2)
    d = np.sqrt(d2)
    np.fill_diagonal(d, 0.0)
    return d


def _cost(dist: np.ndarray, medoids: list[int]) -> float:
    return float(dist[:, medoids].min(axis=1).sum())


def _pam(dist: np.ndarray, k: int) -> list[int]:
    """Greedy-build then swap, grown one medoid at a time.

    Each size-j solution seeds the size-(j+1) search, so the objective is
    nonincreasing in k by construction.
    """
    n = len(dist)
    medoids: list[int] = []
    nearest = np.full(n, np.inf)
    for _ in range(k):
        # greedy addition
        gains = np.minimum(dist, nearest[None, :]).sum(axis=1)
        gains[medoids] = np.inf
        best = int(np.argmin(gains))
        medoids.append(best)
        nearest = np.minimum(nearest, dist[best])
        medoids = _swap(dist, medoids)
        nearest = dist[:, medoids].min(axis=1)
    return medoids


def _swap(dist: np.ndarray, medoids: list[int]) -> list[int]:
    medoids = list(medoids)
    current = _cost(dist, medoids)
    while True:
        best_cost, best_move = current, None
        for slot in range(len(medoids)):
            others = medoids[:slot] + medoids[slot + 1 :]
            base = dist[:, others].min(axis=1) if others else np.full(len(dist), np.inf)
            # cost of replacing this slot by each candidate, all candidates at once
            costs = np.minimum(base[:, None], dist).sum(axis=0)
            costs[medoids] = np.inf
            cand = int(np.argmin(costs))
            if costs[cand] < best_cost - 1e-12 * max(1.0, abs(best_cost)):
                best_cost, best_move = float(costs[cand]), (slot, cand)
        if best_move is None:
            return medoids
        slot, cand = best_move
        medoids[slot] = cand
        current = best_cost


def aggregate(profiles: Iterable[Profile], k: int, period_length: int = 24) -> TypicalPeriodSet:
    """Cluster the periods of all profiles jointly into ``k`` representatives.

    Periods are compared on concatenated, per-profile min-max normalized
    vectors. The clustering contains no random elements, so repeated calls
    return identical results.
    """
    profiles = sorted(profiles, key=lambda p: p.id)
    if not profiles:
        raise DomainError("no profiles to aggregate")
    steps = len(profiles[0])
    if any(len(p) != steps for p in profiles):
        raise DomainError("profiles differ in length")
    if period_length < 1 or steps % period_length:
        raise DomainError(f"{steps} steps are not divisible into periods of {period_length}")
    n_periods = steps // period_length
    if not 1 <= k <= n_periods:
        raise DomainError(f"k={k} outside 1..{n_periods}")

    dist = _distances(_features(profiles, period_length))
    medoids = sorted(_pam(dist, k))
    assignment = np.argmin(dist[:, medoids], axis=1)
    weights = np.bincount(assignment, minlength=k)
    objective = float(dist[np.arange(n_periods), np.asarray(medoids)[assignment]].sum())

    reps = {}
    for p in profiles:
        m = _period_matrix(p, period_length)
        rep = m[medoids].copy()
        target = p.values.sum()
        current = float(weights @ rep.sum(axis=1))
        if current != 0.0:
            rep *= target / current
        elif target != 0.0:
            rep += (target - current) / (weights.sum() * period_length)
        rep.setflags(write=False)
        reps[p.id] = rep
    return TypicalPeriodSet(
        period_length=period_length,
        representatives=reps,
        weights=weights,
        assignment=assignment,
        medoids=np.asarray(medoids),
        objective=objective,
    )


def expand(ts: TypicalPeriodSet, results: Mapping[int, np.ndarray] | np.ndarray) -> np.ndarray:
    """Map per-representative results back onto the full year."""
    table = {}
    for r in range(ts.k):
        try:
            values = np.asarray(results[r], dtype=float)
        except (KeyError, IndexError):
            raise UnknownNameError(f"missing result for representative {r}") from None
        if values.shape != (ts.period_length,):
            raise DomainError(f"representative {r}: expected {ts.period_length} values")
        table[r] = values
    return np.concatenate([table[r] for r in ts.assignment])


def dump(ts: TypicalPeriodSet) -> str:
    """Tabular text dump, stable across runs."""
    buf = io.StringIO()
    buf.write(f"period_length,{ts.period_length}\n")
    buf.write("representative,medoid,weight\n")
    for r, (m, w) in enumerate(zip(ts.medoids, ts.weights)):
        buf.write(f"{r},{int(m)},{int(w)}\n")
    buf.write("assignment," + ",".join(str(int(a)) for a in ts.assignment) + "\n")
    for pid in sorted(ts.representatives):
        for r, row in enumerate(ts.representatives[pid]):
            buf.write(f"{pid},{r}," + ",".join(repr(float(v)) for v in row) + "\n")
    return buf.getvalue()
