import csv
import hashlib
import json

import pytest

from wishart_shocks.experiments_cli import (
    Check,
    RunConfig,
    UsageError,
    density_l1,
    export_characteristics,
    load_config,
    main,
    write_csv,
)
from wishart_shocks.analytic_spectrum import SpectralParams

SMALL_DENSITY = ["--set", "N=8", "--set", "M=16", "--set", "replicas=20", "--set", "bins=10"]
SMALL_SDE = ["--set", "N=3", "--set", "M=4", "--set", "replicas=50"]


def read_rows(path):
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.reader(fh))


def manifest(d):
    return json.loads((d / "manifest.json").read_text(encoding="utf-8"))


def test_rtransform_passes(tmp_path):
    assert main(["rtransform", "--outdir", str(tmp_path)]) == 0
    out = tmp_path / "rtransform"
    m = manifest(out)
    assert m["passed"] is True
    assert m["config"]["experiment"] == "rtransform"
    assert {"start", "end", "library_version", "seed", "checks"} <= set(m)


def test_manifest_hashes_cover_exactly_the_files(tmp_path):
    assert main(["characteristics", "--outdir", str(tmp_path), "--plot"]) == 0
    out = tmp_path / "characteristics"
    m = manifest(out)
    present = {p.name for p in out.iterdir() if p.name != "manifest.json"}
    assert set(m["files"]) == present
    assert any(name.endswith(".svg") for name in present)
    for name, digest in m["files"].items():
        assert hashlib.sha256((out / name).read_bytes()).hexdigest() == digest


def test_characteristics_skips_singular_lines(tmp_path):
    p = SpectralParams(1.0, 1.0)
    export_characteristics(p, [-1.0, 2.0 + 0.5j], tmp_path, n_samples=5)
    rows = read_rows(tmp_path / "characteristics.csv")
    status = {r[-1] for r in rows[1:]}
    assert "ok" in status
    assert any(s.startswith("skipped") for s in status)


def test_failing_check_exits_one(tmp_path, capsys):
    # the finite-N soft-edge data miss the decay-exponent window
    code = main(["edge-soft", "--outdir", str(tmp_path)])
    assert code == 1
    out = capsys.readouterr().out
    assert "[FAIL]" in out and "[PASS]" in out
    assert manifest(tmp_path / "edge-soft")["passed"] is False


def test_usage_errors_write_nothing(tmp_path):
    target = tmp_path / "out"
    assert main(["density", "--outdir", str(target), "--set", "N=10", "--set", "M=5"]) == 2
    assert main(["density", "--outdir", str(target), "--set", "bogus=1"]) == 2
    assert main(["density", "--outdir", str(target), "--set", "tau=-1"]) == 2
    assert main(["density", "--outdir", str(target), "--config", str(tmp_path / "missing.json")]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["no-such-experiment", "--outdir", str(target)])
    assert exc.value.code == 2
    assert not target.exists()


def test_config_precedence(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"N": 6, "M": 9, "seed": 5, "tau": 0.5}), encoding="utf-8")
    params = load_config(cfg)
    rc = RunConfig.build("density", params, {"seed": 9})
    assert (rc.get("N"), rc.get("M"), rc.get("tau"), rc.get("seed")) == (6, 9, 0.5, 9)
    assert rc.get("bins") == 60
    assert RunConfig.build("density").get("seed") == 7
    nested = tmp_path / "n.json"
    nested.write_text(json.dumps({"a": {"b": 1}}), encoding="utf-8")
    with pytest.raises(UsageError):
        load_config(nested)
    with pytest.raises(UsageError):
        RunConfig.build("density", {"format-version": 2})


def test_csv_format(tmp_path):
    path = write_csv(tmp_path / "x.csv", ["a", "b", "c"], [(1, 0.1, True), (2, 1 / 3, False)])
    raw = path.read_bytes()
    assert b"\r" not in raw
    assert raw.decode().splitlines() == ["a,b,c", "1,0.10000000000000001,1", "2,0.33333333333333331,0"]
    assert float(read_rows(path)[2][1]) == 1 / 3


def test_check_coerces():
    import numpy as np

    c = Check("x", np.float64(1.5), "<= 2", np.bool_(True))
    assert type(c.value) is float and c.passed is True
    assert Check("y", float("nan"), "-", False).as_dict()["value"] == "nan"


def test_density_l1_counts_outside_mass():
    p = SpectralParams(1.0, 1.0)
    l1, edges, emp, th = density_l1([1.0, 2.0, 10.0, 11.0], p, 4)
    assert emp.sum() == pytest.approx(0.5)
    assert l1 >= 0.5


@pytest.mark.parametrize("args", [["density"] + SMALL_DENSITY, ["sde-check"] + SMALL_SDE])
def test_rerun_byte_identical(tmp_path, args):
    a, b = tmp_path / "a", tmp_path / "b"
    main(args + ["--outdir", str(a), "--workers", "1"])
    main(args + ["--outdir", str(b), "--workers", "3"])
    name = args[0]
    for f in (a / name).glob("*.csv"):
        assert f.read_bytes() == (b / name / f.name).read_bytes()
    assert manifest(a / name)["files"] == manifest(b / name)["files"]


def test_seed_flag_changes_output(tmp_path):
    main(["density"] + SMALL_DENSITY + ["--outdir", str(tmp_path / "a"), "--seed", "1"])
    main(["density"] + SMALL_DENSITY + ["--outdir", str(tmp_path / "b"), "--seed", "2"])
    assert (tmp_path / "a/density/edge.csv").read_bytes() != (tmp_path / "b/density/edge.csv").read_bytes()
    assert manifest(tmp_path / "a/density")["seed"] == 1


def test_density_csv_columns(tmp_path):
    main(["density"] + SMALL_DENSITY + ["--outdir", str(tmp_path)])
    rows = read_rows(tmp_path / "density" / "density.csv")
    assert rows[0] == ["bin_center", "empirical", "mp_theory"]
    assert len(rows) == 11
