import json

import numpy as np
import pytest

from nvlab.cache import CacheCorruptError, CacheEntry, LValueCache
from nvlab.characters import CharacterSet
from nvlab.lvalue import lvalues_for_modulus


def fill(cache, q):
    cs = CharacterSet(q)
    ev = np.nonzero(cs.even_primitive_mask)[0]
    od = np.nonzero(cs.odd_primitive_mask)[0]
    L = lvalues_for_modulus(cs)
    cache.store_modulus(q, cs, ev, od, L[ev], L[od])
    return np.concatenate([ev, od]), np.concatenate([L[ev], L[od]])


def test_round_trip_bit_identical(tmp_path):
    path = tmp_path / "c.jsonl"
    c = LValueCache(path, version="1")
    idx, vals = fill(c, 97)
    c.checkpoint()
    back = LValueCache(path, version="1").lookup_modulus(97, idx)
    assert back is not None and np.array_equal(back, vals)


def test_counters(tmp_path):
    c = LValueCache(tmp_path / "c.jsonl")
    assert c.lookup_modulus(11, [1, 2]) is None and c.misses == 1
    idx, _ = fill(c, 11)
    assert c.stores == 1
    assert c.lookup_modulus(11, idx) is not None and c.hits == 1


def test_entry_fields(tmp_path):
    path = tmp_path / "c.jsonl"
    c = LValueCache(path, version="9.9")
    fill(c, 15)
    c.checkpoint()
    rows = [json.loads(line) for line in path.read_text().splitlines()]
    assert {r["parity"] for r in rows} == {"even", "odd"}
    assert all(r["conductor"] == 15 and r["version"] == "9.9" and r["method"] == "direct" for r in rows)
    keys = {(r["q"], r["index"], r["method"], r["config_hash"]) for r in rows}
    assert len(keys) == len(rows)


def test_duplicate_store_ignored(tmp_path):
    path = tmp_path / "c.jsonl"
    c = LValueCache(path)
    fill(c, 13)
    fill(c, 13)
    c.checkpoint()
    assert len(path.read_text().splitlines()) == len(c)


def test_appending_checkpoints(tmp_path):
    path = tmp_path / "c.jsonl"
    c = LValueCache(path)
    fill(c, 13)
    c.checkpoint()
    fill(c, 17)
    c.checkpoint()
    assert len(LValueCache(path)) == len(c)
    assert not (tmp_path / "c.jsonl.tmp").exists()


@pytest.mark.parametrize("junk", ["{not json\n", '{"q": 1}\n', "[1, 2]\n", '{"q":5,"index":1'])
def test_corruption_truncates_with_warning(tmp_path, junk):
    path = tmp_path / "c.jsonl"
    c = LValueCache(path)
    fill(c, 13)
    c.checkpoint()
    good = path.read_bytes()
    with open(path, "a") as fh:
        fh.write(junk)
        fh.write(CacheEntry(17, 1, "odd", 17, "direct", 1.0, 0.0, "x", "").to_json() + "\n")
    with pytest.warns(RuntimeWarning, match="malformed"):
        again = LValueCache(path)
    assert len(again) == len(c) and again.corrupt_line is not None
    assert path.read_bytes() == good


def test_strict_mode_raises(tmp_path):
    path = tmp_path / "c.jsonl"
    path.write_text("garbage\n")
    with pytest.raises(CacheCorruptError):
        LValueCache(path, strict=True)
    assert path.read_text() == "garbage\n"


def test_non_finite_rejected():
    line = CacheEntry(5, 1, "even", 5, "direct", float("nan"), 0.0, "h", "v").to_json()
    with pytest.raises(ValueError):
        CacheEntry.from_json(line)


def test_memory_only_cache():
    c = LValueCache(None)
    idx, vals = fill(c, 23)
    c.checkpoint()
    assert np.array_equal(c.lookup_modulus(23, idx), vals)
