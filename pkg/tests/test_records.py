import json
import math
import multiprocessing as mp
import os

import pytest

from charpoly.fneval import FnEvaluation, Method
from charpoly.records import COLUMNS, FnCache, ResultRecord, read_results, write_results


def _rec(**kw):
    base = dict(command="mc-ratio", n=1, N=200, J=1.0, mu=0.0, omega=0.0, delta=1 / 3,
                eps=math.sqrt(2), method="mc-dense", value_re=math.pi, value_im=-1e-300,
                abs_error=0.1 / 7, samples=20000, seed=2 ** 64 - 1, stream=3, wall_ms=12.5)
    base.update(kw)
    return ResultRecord(**base)


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_round_trip_exact(tmp_path, fmt):
    recs = [_rec(), _rec(command="fn-eval", N=None, J=None, mu=None, omega=None, delta=None,
                         samples=None, seed=None, stream=None, value_re=1.1444630798069075)]
    path = tmp_path / f"out.{fmt}"
    write_results(recs, path, fmt)
    assert read_results(path, fmt) == recs


def test_csv_layout(tmp_path):
    path = tmp_path / "one.csv"
    write_results([_rec()], path)
    lines = path.read_text().splitlines()
    assert len(lines) == 2
    assert lines[0].split(",") == list(COLUMNS)
    assert "3.1415926535897931" in lines[1]


def test_empty(tmp_path):
    path = tmp_path / "empty.csv"
    write_results([], path)
    assert path.read_text().splitlines() == [",".join(COLUMNS)]
    jpath = tmp_path / "empty.json"
    write_results([], jpath, "json")
    assert json.loads(jpath.read_text()) == []


def test_json_keys(tmp_path):
    path = tmp_path / "r.json"
    write_results([_rec(value_re=math.nan)], path, "json")
    data = json.loads(path.read_text())
    assert list(data[0]) == list(COLUMNS)
    assert math.isnan(read_results(path)[0].value_re)


def _ev(value=1.5):
    return FnEvaluation(2, 0.1, value, 1e-9, Method.QUADRATURE)


def test_cache_store_lookup(tmp_path):
    cache = FnCache(tmp_path)
    assert cache.lookup(2, 0.1, "goe:auto", 1e-9) is None
    cache.store(2, 0.1, "goe:auto", 1e-9, _ev())
    assert cache.lookup(2, 0.1, "goe:auto", 1e-9) == _ev()
    assert cache.lookup(2, 0.1, "goe:auto", 1e-8) is None
    assert cache.lookup(2, 0.1 + 1e-16, "goe:auto", 1e-9) is None
    assert (cache.hits, cache.misses) == (1, 3)


def test_cache_env_default(tmp_path, monkeypatch):
    monkeypatch.setenv("CHARPOLY_CACHE", str(tmp_path / "c"))
    assert FnCache().path == str(tmp_path / "c")
    monkeypatch.delenv("CHARPOLY_CACHE")
    with pytest.raises(ValueError):
        FnCache()


def test_corrupt_entry_is_miss(tmp_path, caplog):
    cache = FnCache(tmp_path)
    cache.store(1, 1.0, "goe:auto", 1e-9, _ev())
    fname = os.path.join(cache.path, cache.key(1, 1.0, "goe:auto", 1e-9) + ".json")
    with open(fname, "w") as fh:
        fh.write('{"n_order": 1, "epsil')
    assert cache.lookup(1, 1.0, "goe:auto", 1e-9) is None
    assert "corrupt" in caplog.text


def _writer(path, value, rounds):
    cache = FnCache(path)
    for _ in range(rounds):
        cache.store(3, 0.5, "goe:quadrature", 1e-9, _ev(value))


def test_two_writers_no_torn_file(tmp_path):
    ctx = mp.get_context("spawn")
    procs = [ctx.Process(target=_writer, args=(str(tmp_path), v, 300)) for v in (1.0, 2.0)]
    for p in procs:
        p.start()
    reader = FnCache(tmp_path)
    seen = set()
    while any(p.is_alive() for p in procs):
        got = reader.lookup(3, 0.5, "goe:quadrature", 1e-9)
        if got is not None:
            seen.add(got.value)
    for p in procs:
        p.join()
        assert p.exitcode == 0
    final = reader.lookup(3, 0.5, "goe:quadrature", 1e-9)
    assert final.value in (1.0, 2.0)
    assert seen <= {1.0, 2.0}
    assert not [f for f in os.listdir(tmp_path) if f.endswith(".tmp")]
