"""Simulation runs, parameter sweeps and CSV output."""
from __future__ import annotations

import csv
import io
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields, replace
from typing import Iterable, Optional, Sequence

from . import __version__
from .baselines import oblivious_cost, static_optimal_cost
from .metrics import CostLedger, RankTracker, mru_level
from .traces import Trace, generate_trace, ingest_trace
from .tree import SeedTree


class SweepError(RuntimeError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    capacity: int = 4
    occupancy: float = 0.5
    locality: float = 0.0
    n_items: int = 4095
    requests: int = 100_000
    seed: int = 0
    repeats: int = 1
    trace_path: Optional[str] = None
    trace_format: str = "items"

    def validate(self) -> None:
        if not isinstance(self.capacity, int) or not 1 <= self.capacity <= 64:
            raise ValueError(f"capacity must be an integer in [1, 64], got {self.capacity}")
        if not 0 < self.occupancy < 1:
            raise ValueError(f"occupancy must lie in (0, 1), got {self.occupancy}")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if self.trace_path is None:
            if self.n_items < 1 or self.requests < self.n_items:
                raise ValueError("need n_items >= 1 and requests >= n_items")
            if not 0 <= self.locality <= 0.9:
                raise ValueError(f"locality must lie in [0, 0.9], got {self.locality}")


@dataclass
class ResultRow:
    run: int
    c: int
    f: float
    locality: float
    m: int
    access_cost: int
    reconfig_cost: int
    total_cost: int
    mean_attempts: float
    mean_mru_slack: float
    lower_bound: float
    ratio: float
    oblivious_cost: int
    static_opt_cost: int


FIELDS = [f.name for f in fields(ResultRow)]


@dataclass
class RunResult:
    tree: SeedTree
    ledger: CostLedger
    oblivious: CostLedger
    static_opt: int
    pushdowns: int
    slack_sum: int
    max_slack: int

    @property
    def mean_attempts(self) -> float:
        return self.ledger.attempts / self.pushdowns if self.pushdowns else 0.0

    @property
    def mean_slack(self) -> float:
        return self.slack_sum / self.ledger.requests if self.ledger.requests else 0.0


def simulate(
    trace: Trace,
    capacity: int,
    occupancy: float,
    seed: int,
    keep_records: bool = False,
    audit: bool = False,
) -> RunResult:
    """Serve ``trace`` on a fresh tree over ids ``0..n_items-1`` and collect
    costs, the lower bound and both static baselines."""
    seq = trace.tolist()
    n = trace.n_items
    tree = SeedTree.build(range(n), capacity, occupancy, seed)
    obl = oblivious_cost(seq, capacity, occupancy, seed, tree=tree)
    static = static_optimal_cost(seq, capacity)

    ledger = CostLedger(keep_records=keep_records)
    tracker = RankTracker(n, capacity=len(seq) + 1)
    pushdowns = 0
    slack_sum = 0
    max_slack = None
    access = tree.access
    for v in seq:
        mru = mru_level(tracker.access(v), capacity)
        rec = access(v, audit=audit)
        ledger.add(rec, mru)
        if rec.level_found:
            pushdowns += 1
        s = rec.level_found - mru
        slack_sum += s
        if max_slack is None or s > max_slack:
            max_slack = s
    return RunResult(tree, ledger, obl, static, pushdowns, slack_sum, max_slack or 0)


def _load_trace(config: ExperimentConfig, seed: int) -> Trace:
    if config.trace_path is not None:
        return ingest_trace(config.trace_path, config.trace_format)
    return generate_trace(config.n_items, config.requests, config.locality, seed)


def run_one(config: ExperimentConfig, run: int) -> ResultRow:
    seed = config.seed + run
    trace = _load_trace(config, seed)
    res = simulate(trace, config.capacity, config.occupancy, seed)
    lb = res.ledger.lower_bound
    return ResultRow(
        run=run,
        c=config.capacity,
        f=config.occupancy,
        locality=config.locality,
        m=len(trace),
        access_cost=res.ledger.access,
        reconfig_cost=res.ledger.reconfig,
        total_cost=res.ledger.total,
        mean_attempts=res.mean_attempts,
        mean_mru_slack=res.mean_slack,
        lower_bound=lb,
        ratio=res.ledger.total / lb if lb > 0 else float("inf"),
        oblivious_cost=res.oblivious.access,
        static_opt_cost=res.static_opt,
    )


def _run_cell(args: tuple[ExperimentConfig, int]) -> ResultRow:
    return run_one(*args)


def _execute(tasks: list[tuple[ExperimentConfig, int]], jobs: int) -> list[ResultRow]:
    if jobs <= 1 or len(tasks) <= 1:
        return [_run_cell(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map() yields in submission order, independent of completion order
        return list(pool.map(_run_cell, tasks))


def run(config: ExperimentConfig, jobs: int = 1) -> list[ResultRow]:
    config.validate()
    return _execute([(config, i) for i in range(config.repeats)], jobs)


def sweep(
    base: ExperimentConfig,
    capacities: Sequence[int],
    occupancies: Sequence[float],
    localities: Sequence[float],
    jobs: int = 1,
) -> list[ResultRow]:
    """Cross product of the three value lists; rows ordered by (c, f, locality, run)."""
    cells = [
        replace(base, capacity=c, occupancy=f, locality=p)
        for c, f, p in itertools.product(sorted(capacities), sorted(occupancies), sorted(localities))
    ]
    if not cells:
        raise ValueError("empty sweep grid")
    for cell in cells:
        try:
            cell.validate()
        except ValueError as e:
            raise SweepError(f"cell c={cell.capacity} f={cell.occupancy} locality={cell.locality}: {e}") from e
    rows = []
    for cell in cells:
        try:
            rows.extend(_execute([(cell, i) for i in range(cell.repeats)], jobs))
        except Exception as e:
            raise SweepError(
                f"cell c={cell.capacity} f={cell.occupancy} locality={cell.locality} failed: {e}"
            ) from e
    rows.sort(key=lambda r: (r.c, r.f, r.locality, r.run))
    return rows


def _fmt(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def format_csv(rows: Iterable[ResultRow], meta: Optional[dict] = None) -> str:
    buf = io.StringIO()
    buf.write(f"# seedtree {__version__}\n")
    for k, v in (meta or {}).items():
        buf.write(f"# {k}: {v}\n")
    buf.write("# costs are raw edge counts; figure scalings: access/1e5 (oblivious comparison), total/1e6 (capacity, occupancy)\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FIELDS)
    for r in rows:
        w.writerow([_fmt(v) for v in asdict(r).values()])
    return buf.getvalue()


def parse_csv(text: str) -> list[dict]:
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))
