import logging
from concurrent.futures import ThreadPoolExecutor

from app.cache import ExperimentCache
from app.schemas import ExperimentRecord


def make_record(version: str = "v1", **params) -> ExperimentRecord:
    return ExperimentRecord(
        experiment="sweep",
        parameters={"n": [2, 4], "seed": 0, **params},
        outputs={"rows": [{"n": 2, "lower_bound": 0.0}]},
        wall_time_s=0.5,
        version=version,
    )


def test_cache_hit_and_miss(tmp_path):
    """
    Basic cache behavior:
    - First access should be a miss
    - After storing a record, the same parameters hit
    """
    cache = ExperimentCache(tmp_path / "c", version="v1")
    record = make_record()

    # Cache miss before storing
    assert cache.get("sweep", record.parameters) is None

    cache.put(record)
    hit = cache.get("sweep", record.parameters)
    assert hit is not None
    assert hit.outputs == record.outputs
    assert hit.cache_key == ExperimentRecord.key_for("sweep", record.parameters)


def test_cache_key_depends_on_every_parameter():
    a = ExperimentRecord.key_for("sweep", {"n": [2], "seed": 0})
    b = ExperimentRecord.key_for("sweep", {"seed": 0, "n": [2]})
    c = ExperimentRecord.key_for("sweep", {"n": [2], "seed": 1})
    assert a == b
    assert a != c
    assert a != ExperimentRecord.key_for("jn-check", {"n": [2], "seed": 0})


def test_version_change_is_a_miss(tmp_path):
    record = make_record(version="v1")
    ExperimentCache(tmp_path, version="v1").put(record)
    assert ExperimentCache(tmp_path, version="v2").get("sweep", record.parameters) is None


def test_corrupt_entry_is_ignored_with_warning(tmp_path, caplog):
    cache = ExperimentCache(tmp_path, version="v1")
    record = make_record()
    (tmp_path / f"{record.cache_key}.json").write_text("{not json", encoding="utf-8")

    with caplog.at_level(logging.WARNING):
        assert cache.get("sweep", record.parameters) is None
    assert any("corrupt cache entry" in r.getMessage() for r in caplog.records)

    # A fresh put overwrites the broken file
    cache.put(record)
    assert cache.get("sweep", record.parameters) is not None


def test_unusable_directory_disables_cache(tmp_path, caplog):
    blocker = tmp_path / "file"
    blocker.write_text("x", encoding="utf-8")

    with caplog.at_level(logging.WARNING):
        cache = ExperimentCache(blocker, version="v1")
    assert cache.enabled is False
    record = make_record()
    cache.put(record)
    assert cache.get("sweep", record.parameters) is None
    assert any("caching disabled" in r.getMessage() for r in caplog.records)


def test_concurrent_identical_puts_leave_one_entry(tmp_path):
    cache = ExperimentCache(tmp_path / "c", version="v1")
    record = make_record()
    with ThreadPoolExecutor(max_workers=4) as pool:
        list(pool.map(lambda _: cache.put(record), range(8)))
    assert len(list((tmp_path / "c").iterdir())) == 1
    assert cache.get("sweep", record.parameters).outputs == record.outputs
