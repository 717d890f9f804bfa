import json

import numpy as np
import pytest

from rrlpi.cli import main
from rrlpi.image import two_region_image


@pytest.fixture
def data(tmp_path):
    out = tmp_path / "syn"
    assert main(["synth", "--seed", "3", "--n-per-cluster", "20", "--out-dir", str(out)]) == 0
    return out


def test_synth_outputs(data):
    head = (data / "data.csv").read_text().splitlines()
    assert head[0] == "x1,x2,x3,x4,x5,x6" and len(head) == 61
    lab = (data / "labels.csv").read_text().splitlines()
    assert lab[0] == "label,outlier" and len(lab) == 61


def test_embed_auto_gamma(data, tmp_path):
    out = tmp_path / "emb"
    rc = main(["embed", str(data / "data.csv"), "--auto-gamma", "--labels", str(data / "labels.csv"),
               "--out-dir", str(out)])
    assert rc == 0
    diag = json.loads((out / "diagnostics.json").read_text())
    assert any(c["separated"] for c in diag["candidates"])
    summary = json.loads((out / "summary.json").read_text())
    assert summary["k"] == 3 and summary["p_acc"] >= 0.9
    assert (out / "embedding.svg").read_bytes().startswith(b"<?xml")
    assert len((out / "embedding.csv").read_text().splitlines()) == 61


@pytest.mark.parametrize("method", ["le", "lpi", "rlpi"])
def test_embed_fixed_methods(data, tmp_path, method):
    args = ["embed", str(data / "data.csv"), "--method", method, "--out-dir", str(tmp_path)]
    if method == "rlpi":
        args += ["--gamma", "0.1"]
    assert main(args) == 0
    assert json.loads((tmp_path / "summary.json").read_text())["method"] == method.upper()


def test_embed_is_byte_identical(data, tmp_path):
    for d in ("a", "b"):
        assert main(["embed", str(data / "data.csv"), "--auto-gamma", "--out-dir", str(tmp_path / d)]) == 0
    for f in ("embedding.csv", "diagnostics.json", "summary.json", "embedding.svg"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes(), f


def test_select_gamma(data, tmp_path):
    assert main(["select-gamma", str(data / "data.csv"), "--n-candidates", "5", "--out-dir", str(tmp_path)]) == 0
    diag = json.loads((tmp_path / "gamma_diagnostics.json").read_text())
    assert len(diag["candidates"]) == 5 and diag["gamma_hat"] in [c["gamma"] for c in diag["candidates"]]


def test_enumerate(data, tmp_path):
    assert main(["enumerate", str(data / "data.csv"), "--method", "le", "--k-max", "5",
                 "--out-dir", str(tmp_path)]) == 0
    rows = (tmp_path / "enumeration.csv").read_text().splitlines()
    assert rows[0] == "K,Q" and rows[1].startswith("1,0.0")
    res = json.loads((tmp_path / "enumeration.json").read_text())
    assert 1 <= res["k_hat"] <= 5


def test_segment(tmp_path):
    from PIL import Image

    grid, gt = two_region_image(16, 24)
    Image.fromarray((grid * 255).round().astype(np.uint8)).save(tmp_path / "img.png")
    Image.fromarray((gt * 100).astype(np.uint8)).convert("RGB").save(tmp_path / "gt.png")
    rc = main(["segment", str(tmp_path / "img.png"), "--ground-truth", str(tmp_path / "gt.png"),
               "--k", "2", "--noise-var", "1e-3", "--out-dir", str(tmp_path / "o")])
    assert rc == 0
    m = json.loads((tmp_path / "o" / "metrics.json").read_text())
    assert m["jaccard"] >= 0.9
    lab = np.asarray(Image.open(tmp_path / "o" / "labels.png"))
    assert lab.shape == gt.shape


def test_bench(tmp_path):
    rc = main(["bench", "--theta-o1-grid", "0,5", "--methods", "le,rrlpi", "--n-runs", "2",
               "--n-per-cluster", "15", "--n-out1", "3", "--out-dir", str(tmp_path)])
    assert rc == 0
    rows = (tmp_path / "bench.csv").read_text().splitlines()
    assert rows[0] == "theta_o1,method,mean,std,n_runs,n_failed" and len(rows) == 5


def test_verify_theory(tmp_path):
    assert main(["verify-theory", "--out-dir", str(tmp_path)]) == 0
    rows = (tmp_path / "theory.csv").read_text().splitlines()[1:]
    assert rows and all(r.endswith("true") for r in rows)


def test_config_file(data, tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text('method = "le"\n[search]\nn_candidates = 4\n')
    assert main(["embed", str(data / "data.csv"), "--config", str(cfg), "--out-dir", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "summary.json").read_text())["method"] == "LE"
    cfg.write_text("bogus_key = 1\n")
    assert main(["embed", str(data / "data.csv"), "--config", str(cfg), "--out-dir", str(tmp_path)]) == 1


def test_exit_codes(tmp_path, capsys):
    assert main(["embed", "--no-such-flag", "x.csv"]) == 1
    assert main([]) == 1
    assert main(["embed", str(tmp_path / "missing.csv"), "--out-dir", str(tmp_path)]) == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2\n3\n")
    assert main(["embed", str(bad), "--out-dir", str(tmp_path)]) == 2
    zero = tmp_path / "zero.csv"
    zero.write_text("0,0\n1,1\n2,0\n")
    assert main(["embed", str(zero), "--method", "le", "--out-dir", str(tmp_path)]) == 2
    assert "ZeroColumn" in capsys.readouterr().err
