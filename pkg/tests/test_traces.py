import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seedtree.traces import Trace, TraceFormatError, emit_trace, generate_trace, ingest_trace


def test_generate_deterministic():
    assert generate_trace(100, 1000, 0.5, 3) == generate_trace(100, 1000, 0.5, 3)
    assert generate_trace(100, 1000, 0.5, 3) != generate_trace(100, 1000, 0.5, 4)


@pytest.mark.parametrize("p", [-0.1, 0.95, 1.0])
def test_generate_rejects_locality(p):
    with pytest.raises(ValueError):
        generate_trace(10, 100, p, 0)


def test_generate_rejects_short_trace():
    with pytest.raises(ValueError):
        generate_trace(100, 99, 0.0, 0)


def test_zero_locality_is_uniform():
    from scipy import stats

    t = generate_trace(16, 160_000, 0.0, 1)
    assert stats.chisquare(np.bincount(t.requests, minlength=16)).pvalue > 0.001
    # only chance repeats remain
    assert t.metadata["stage2_repeat_fraction"] == pytest.approx(1 / 16, abs=0.005)


def test_high_locality_repeat_fraction():
    t = generate_trace(4095, 100_000, 0.9, 2)
    assert 0.888 <= t.metadata["stage2_repeat_fraction"] <= 0.912


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 300), st.integers(0, 2000), st.sampled_from([0.0, 0.3, 0.6, 0.9]), st.integers(0, 2**32))
def test_repair_yields_every_item(n, extra, p, seed):
    t = generate_trace(n, n + extra, p, seed)
    t.validate()
    assert len(t) == n + extra
    assert len(np.unique(t.requests)) == n


def test_ingest_items_dense_remap(tmp_path):
    f = tmp_path / "t.txt"
    f.write_text("7\n7\n3\n")
    t = ingest_trace(f)
    assert t.tolist() == [0, 0, 1]
    assert t.n_items == 2


def test_ingest_pairs_most_frequent_source(tmp_path):
    f = tmp_path / "p.csv"
    f.write_text("# comment\n5,10\n9,4\n5,11\n5,10\n")
    t = ingest_trace(f, "pairs")
    assert t.tolist() == [0, 1, 0]
    assert t.metadata["src"] == 5


def test_ingest_pairs_tie_smallest_source(tmp_path):
    f = tmp_path / "p.csv"
    f.write_text("9,1\n4,2\n9,3\n4,2\n")
    assert ingest_trace(f, "pairs").metadata["src"] == 4


@pytest.mark.parametrize(
    "text,fmt,lineno",
    [("1\nx\n", "items", 2), ("1,2\n3\n", "pairs", 2), ("1,2\n-1,2\n", "pairs", 2)],
)
def test_ingest_malformed_reports_line(tmp_path, text, fmt, lineno):
    f = tmp_path / "bad"
    f.write_text(text)
    with pytest.raises(TraceFormatError, match=f"line {lineno}"):
        ingest_trace(f, fmt)


def test_ingest_empty(tmp_path):
    f = tmp_path / "empty"
    f.write_text("# nothing\n")
    with pytest.raises(TraceFormatError):
        ingest_trace(f)


def test_round_trip(tmp_path):
    t = generate_trace(500, 3000, 0.6, 9)
    emit_trace(t, tmp_path / "c.txt")
    assert (tmp_path / "c.txt").read_text().startswith("#seedtree-trace v1 n=500\n")
    back = ingest_trace(tmp_path / "c.txt")
    assert back == t
    emit_trace(back, tmp_path / "d.txt")
    assert (tmp_path / "c.txt").read_bytes() == (tmp_path / "d.txt").read_bytes()


def test_canonical_header_validated(tmp_path):
    f = tmp_path / "c.txt"
    f.write_text("#seedtree-trace v1 n=3\n0\n1\n")
    with pytest.raises(TraceFormatError):
        ingest_trace(f)


def test_trace_equality_ignores_metadata():
    assert Trace([0, 1], 2, {"a": 1}) == Trace([0, 1], 2, {"b": 2})
