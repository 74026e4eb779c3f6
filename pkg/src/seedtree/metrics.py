"""Working-set ranks, MRU levels, the access-cost lower bound and cost ledgers."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .tree import AccessRecord

# Published competitive-ratio bound at f = 1/2.
HALF_OCCUPANCY_RATIO_BOUND = 43.0


class RankTracker:
    """Online working-set ranks in O(log m) per request.

    A Fenwick tree over request times marks each item's most recent request;
    the rank of ``v`` is one plus the number of marks strictly after v's last
    request.  Items never requested have rank ``n_items``.
    """

    def __init__(self, n_items: int, capacity: int = 1024):
        if n_items < 1:
            raise ValueError("n_items must be >= 1")
        self.n_items = n_items
        self.last_access: dict[int, int] = {}
        self.time = 0
        self._cap = max(16, capacity)
        self._tree = [0] * (self._cap + 1)

    def _add(self, pos: int, delta: int) -> None:
        tree = self._tree
        cap = self._cap
        while pos <= cap:
            tree[pos] += delta
            pos += pos & -pos

    def _prefix(self, pos: int) -> int:
        tree = self._tree
        s = 0
        while pos > 0:
            s += tree[pos]
            pos -= pos & -pos
        return s

    def _grow(self) -> None:
        self._cap *= 2
        self._tree = [0] * (self._cap + 1)
        for t in self.last_access.values():
            self._add(t, 1)

    def rank(self, item: int) -> int:
        """Rank of ``item`` if it were requested next (does not advance time)."""
        last = self.last_access.get(item)
        if last is None:
            return self.n_items
        return 1 + self._prefix(self.time) - self._prefix(last)

    def record(self, item: int) -> None:
        self.time += 1
        if self.time > self._cap:
            self._grow()
        last = self.last_access.get(item)
        if last is not None:
            self._add(last, -1)
        self._add(self.time, 1)
        self.last_access[item] = self.time

    def access(self, item: int) -> int:
        r = self.rank(item)
        self.record(item)
        return r


def rank_of(tracker: RankTracker, item: int) -> int:
    return tracker.rank(item)


def ranks(trace: Iterable[int], n_items: int) -> list[int]:
    """Rank of every request in ``trace``."""
    seq = list(trace)
    tracker = RankTracker(n_items, capacity=len(seq) + 1)
    return [tracker.access(v) for v in seq]


def mru_level(rank: int, capacity: int) -> int:
    """Level holding slot number ``rank`` in a complete tree with ``capacity``
    slots per node."""
    if rank < 1 or capacity < 1:
        raise ValueError("rank and capacity must be >= 1")
    return ((rank - 1) // capacity + 1).bit_length() - 1


def lower_bound_from_ranks(rank_seq: Iterable[int], capacity: int) -> float:
    return sum(mru_level(r, capacity) for r in rank_seq) / (1 + math.e)


def lower_bound(trace: Iterable[int], capacity: int, n_items: Optional[int] = None) -> float:
    """Access-cost lower bound: sum of MRU levels of request ranks over (1 + e)."""
    seq = list(trace)
    if n_items is None:
        n_items = len(set(seq))
    if not seq:
        return 0.0
    return lower_bound_from_ranks(ranks(seq, n_items), capacity)


@dataclass
class MruAudit:
    count: int
    mean: float
    max: int
    histogram: dict[int, int]


def mru_audit(stream: Iterable[tuple[int, int]], capacity: int) -> MruAudit:
    """Distribution of ``level_found - mru_level(rank)`` over (level, rank) pairs."""
    hist: Counter = Counter()
    total = 0
    n = 0
    worst: Optional[int] = None
    for level, rank in stream:
        slack = level - mru_level(rank, capacity)
        hist[slack] += 1
        total += slack
        n += 1
        worst = slack if worst is None or slack > worst else worst
    if n == 0:
        return MruAudit(0, 0.0, 0, {})
    return MruAudit(n, total / n, worst, dict(sorted(hist.items())))


@dataclass
class CostLedger:
    """Cumulative costs of one run, plus the per-request record log."""

    access: int = 0
    reconfig: int = 0
    reconfig_uncharged: int = 0
    attempts: int = 0
    requests: int = 0
    lower_bound_sum: int = 0
    records: list = field(default_factory=list)
    keep_records: bool = True

    @property
    def total(self) -> int:
        return self.access + self.reconfig

    @property
    def total_uncharged(self) -> int:
        return self.access + self.reconfig_uncharged

    @property
    def lower_bound(self) -> float:
        return self.lower_bound_sum / (1 + math.e)

    def add(self, record: AccessRecord, mru: int = 0) -> None:
        self.access += record.access_cost
        self.reconfig += record.reconfig_cost
        self.reconfig_uncharged += record.reconfig_uncharged
        self.attempts += record.push_down_attempts
        self.requests += 1
        self.lower_bound_sum += mru
        if self.keep_records:
            self.records.append(record)

    def add_static(self, level: int, mru: int = 0) -> None:
        """Charge a reconfiguration-free lookup at ``level``."""
        self.access += level
        self.requests += 1
        self.lower_bound_sum += mru


@dataclass(frozen=True)
class CompetitiveReport:
    total_ratio: float
    access_ratio: float


def competitive_report(ledger: CostLedger, lower_bound: Optional[float] = None) -> CompetitiveReport:
    lb = ledger.lower_bound if lower_bound is None else lower_bound
    if ledger.requests == 0 or lb <= 0:
        raise ZeroDivisionError("lower bound is zero; competitive ratio undefined")
    return CompetitiveReport(ledger.total / lb, ledger.access / lb)


def competitive_upper_bound(occupancy: float) -> float:
    """(1 + e) * 2 * (1 + ceil(1/(1-f))) * (2 - log2 f), as printed."""
    f = occupancy
    return (1 + math.e) * 2 * (1 + math.ceil(1 / (1 - f))) * (2 - math.log2(f))


def attempt_bound(occupancy: float) -> int:
    return math.ceil(1 / (1 - occupancy))


def mru_slack_bound(occupancy: float) -> float:
    return 2 - math.log2(occupancy)
