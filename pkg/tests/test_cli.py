import json

import pytest
import yaml

from quasiloc.cli import config_hash, load_config, main, resolve
from quasiloc.errors import ConfigError


def write_cfg(tmp_path, cfg):
    p = tmp_path / "run.yaml"
    p.write_text(yaml.safe_dump(cfg))
    return str(p)


def test_unknown_keys_rejected(tmp_path):
    with pytest.raises(ConfigError):
        load_config(write_cfg(tmp_path, {"numerics": {"n": 10, "bogus": 1}}))
    with pytest.raises(ConfigError):
        load_config(write_cfg(tmp_path, {"extra": 1}))
    assert main(["cf", "--config", write_cfg(tmp_path, {"extra": 1}), "--out", str(tmp_path)]) == 2


def test_task_mismatch():
    with pytest.raises(ConfigError):
        resolve({"task": "zeros"}, "cf")


def test_hash_ignores_output_dir_but_not_precision():
    a = resolve({"output": {"dir": "a"}}, "cf")
    b = resolve({"output": {"dir": "b"}}, "cf")
    assert config_hash(a) == config_hash(b)
    assert config_hash(resolve({}, "cf", 60)) != config_hash(a)


def test_cf_csv_and_manifest(tmp_path):
    cfg = write_cfg(tmp_path, {"frequency": {"quotients": [1], "depth": 10}})
    assert main(["cf", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    lines = (tmp_path / "o" / "cf.csv").read_text().splitlines()
    assert lines[0].startswith("# config_hash=")
    assert lines[1].startswith("k,a_k,p_k,q_k")
    assert [int(r.split(",")[3]) for r in lines[2:]] == [1, 2, 3, 5, 8, 13, 21, 34, 55, 89]
    man = json.loads((tmp_path / "o" / "manifest.json").read_text())
    doc = json.loads((tmp_path / "o" / "cf.json").read_text())
    assert man["config_hash"] == doc["config_hash"]
    assert "metadata" in man and set(man["files"]) == {"cf.json", "cf.csv"}


def test_zeros_rational_13_21(tmp_path):
    cfg = write_cfg(tmp_path, {"energy": {"list": [0.0043850895679798]}, "numerics": {"q": 21, "rational": True}})
    assert main(["zeros", "--config", cfg, "--out", str(tmp_path)]) == 0
    res = json.loads((tmp_path / "zeros.json").read_text())["result"][0]
    assert res["count"] == 42 and res["count_over_2q"] == 1.0


def test_acceleration_task_and_byte_identical_reruns(tmp_path):
    cfg = write_cfg(tmp_path, {"energy": {"list": [0.0043850895679798, -4.2650959128957]},
                               "numerics": {"n": 2000, "grid": 64}})
    main(["acceleration", "--config", cfg, "--out", str(tmp_path / "a")])
    main(["acceleration", "--config", cfg, "--out", str(tmp_path / "b"), "--jobs", "2"])
    for name in ("acceleration.json", "acceleration.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    res = json.loads((tmp_path / "a" / "acceleration.json").read_text())["result"]
    assert [r["kappa_int"] for r in res] == [1, 1]


def test_regime_error_code(tmp_path, capsys):
    # L <= beta for the free operator: constants are not defined
    cfg = write_cfg(tmp_path, {"potential": {"cosine_coeffs": [0.0]}, "energy": {"list": [1.0]},
                               "numerics": {"n": 500, "m": 16, "K": 32}})
    assert main(["constants", "--config", cfg, "--out", str(tmp_path)]) == 2
    assert "model.not_in_regime" in capsys.readouterr().err
