"""Synthetic Markovian request traces and ingestion of real trace files.

Canonical file format::

    #seedtree-trace v1 n=<n_items>
    <item id>
    ...

Pairs files hold ``src,dst`` per line; ``#`` lines are comments.
"""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Union

import numpy as np

MAX_LOCALITY = 0.9
HEADER = "#seedtree-trace v1 n={n}"
_HEADER_RE = re.compile(r"^#seedtree-trace v1 n=(\d+)\s*$")


class TraceFormatError(ValueError):
    pass


@dataclass(eq=False)
class Trace:
    requests: np.ndarray
    n_items: int
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.requests = np.asarray(self.requests, dtype=np.int64)

    def __len__(self) -> int:
        return len(self.requests)

    def __eq__(self, other):
        if not isinstance(other, Trace):
            return NotImplemented
        return self.n_items == other.n_items and np.array_equal(self.requests, other.requests)

    def tolist(self) -> list[int]:
        return self.requests.tolist()

    def repeat_fraction(self) -> float:
        r = self.requests
        if len(r) < 2:
            return 0.0
        return float(np.mean(r[1:] == r[:-1]))

    def validate(self) -> None:
        r = self.requests
        if len(r) == 0:
            raise TraceFormatError("trace is empty")
        if r.min() < 0 or r.max() >= self.n_items:
            raise TraceFormatError("item ids outside [0, n_items)")
        if len(np.unique(r)) != self.n_items:
            raise TraceFormatError("n_items differs from the number of distinct ids")


def _repeat_fraction(a: np.ndarray) -> float:
    return float(np.mean(a[1:] == a[:-1])) if len(a) > 1 else 0.0


def generate_trace(n_items: int, m: int, locality: float, seed: int) -> Trace:
    """Uniform draws, then each request overwritten by its predecessor with
    probability ``locality``, then repaired so all ``n_items`` ids appear."""
    if not 0 <= locality <= MAX_LOCALITY:
        raise ValueError(f"locality must lie in [0, {MAX_LOCALITY}], got {locality}")
    if n_items < 1:
        raise ValueError("n_items must be >= 1")
    if m < n_items:
        raise ValueError("m must be >= n_items")
    rng = np.random.default_rng(seed)

    seq = rng.integers(0, n_items, size=m, dtype=np.int64)

    overwrite = rng.random(m) < locality
    overwrite[0] = False
    src = np.where(overwrite, 0, np.arange(m))
    np.maximum.accumulate(src, out=src)
    seq = seq[src]
    stage2_repeat = _repeat_fraction(seq)

    seq = _repair_missing(seq, n_items, rng)

    return Trace(
        seq,
        n_items,
        {
            "source": "synthetic",
            "locality": locality,
            "seed": seed,
            "stage2_repeat_fraction": stage2_repeat,
            "repeat_fraction": _repeat_fraction(seq),
        },
    )


def _repair_missing(seq: np.ndarray, n_items: int, rng: np.random.Generator) -> np.ndarray:
    counts = np.bincount(seq, minlength=n_items)
    missing = np.flatnonzero(counts == 0)
    if len(missing) == 0:
        return seq
    seq = seq.copy()
    m = len(seq)
    # run interiors: equal to both neighbours; overwriting one splits a run
    interior = np.zeros(m, dtype=bool)
    if m > 2:
        interior[1:-1] = (seq[1:-1] == seq[:-2]) & (seq[1:-1] == seq[2:])
    candidates = np.flatnonzero(~interior)
    rng.shuffle(candidates)
    rng.shuffle(missing)
    k = 0
    for pos in candidates.tolist():
        if k == len(missing):
            break
        v = seq[pos]
        if counts[v] > 1:
            counts[v] -= 1
            seq[pos] = missing[k]
            counts[missing[k]] += 1
            k += 1
    if k < len(missing):
        # fall back to run interiors when the cheap positions run out
        for pos in rng.permutation(np.flatnonzero(interior)).tolist():
            if k == len(missing):
                break
            v = seq[pos]
            if counts[v] > 1:
                counts[v] -= 1
                seq[pos] = missing[k]
                counts[missing[k]] += 1
                k += 1
    if k < len(missing):
        raise RuntimeError("could not place every missing id")
    return seq


def emit_trace(trace: Trace, path: Union[str, Path]) -> None:
    """Write ``trace`` in the canonical text format."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        fh.write(HEADER.format(n=trace.n_items) + "\n")
        fh.write("\n".join(map(str, trace.tolist())))
        fh.write("\n")


def _dense(raw: Iterable[int]) -> tuple[list[int], int]:
    ids: dict[int, int] = {}
    out = [ids.setdefault(v, len(ids)) for v in raw]
    return out, len(ids)


def _lines(path: Path):
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            yield lineno, line.strip()


def _parse_uint(text: str, lineno: int) -> int:
    try:
        v = int(text)
    except ValueError:
        raise TraceFormatError(f"line {lineno}: not an integer: {text!r}") from None
    if v < 0:
        raise TraceFormatError(f"line {lineno}: negative id {v}")
    return v


def ingest_trace(path: Union[str, Path], format: str = "items") -> Trace:
    """Read a trace file.

    ``items``: one id per line.  A canonical header keeps ids as-is; otherwise
    ids are remapped densely by first appearance.
    ``pairs``: ``src,dst`` lines; keeps the dst sequence of the most frequent
    source (ties: smallest source id), remapped densely.
    """
    path = Path(path)
    if format == "items":
        return _ingest_items(path)
    if format == "pairs":
        return _ingest_pairs(path)
    raise ValueError(f"unknown trace format {format!r}")


def _ingest_items(path: Path) -> Trace:
    raw: list[int] = []
    declared = None
    for lineno, line in _lines(path):
        if not line:
            continue
        if line.startswith("#"):
            h = _HEADER_RE.match(line)
            if h and lineno == 1:
                declared = int(h.group(1))
            continue
        raw.append(_parse_uint(line, lineno))
    if not raw:
        raise TraceFormatError(f"{path}: no requests")
    if declared is not None:
        trace = Trace(np.array(raw), declared, {"source": "file", "path": str(path)})
        trace.validate()
        return trace
    dense, n = _dense(raw)
    return Trace(np.array(dense), n, {"source": "file", "path": str(path)})


def _ingest_pairs(path: Path) -> Trace:
    rows: list[tuple[int, int]] = []
    for lineno, line in _lines(path):
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise TraceFormatError(f"line {lineno}: expected 'src,dst', got {line!r}")
        rows.append((_parse_uint(parts[0].strip(), lineno), _parse_uint(parts[1].strip(), lineno)))
    if not rows:
        raise TraceFormatError(f"{path}: no requests")
    freq = Counter(src for src, _ in rows)
    best = min(freq, key=lambda s: (-freq[s], s))
    dense, n = _dense(dst for src, dst in rows if src == best)
    return Trace(np.array(dense), n, {"source": "file", "path": str(path), "src": best})
