import json
import math
from fractions import Fraction

import pytest

from main import main
from src.core import ValidationError
from src.pipeline import RunConfig, load_conductances, load_config
from src.lattice import modular_ray, quadratic_growth


def _summary(out, command):
    files = sorted(p for p in out.glob(f"{command}-*.json"))
    assert len(files) == 1
    return json.loads(files[0].read_text(encoding="utf-8"))


def test_unknown_generator_exits_with_validation_code(tmp_path):
    assert main(["build", "--lattice", "nosuch", "--out", str(tmp_path)]) == 2
    assert not list(tmp_path.glob("build-*.json"))


def test_lattice_argument_accepts_config_file(tmp_path):
    config = tmp_path / "pair.json"
    config.write_text(json.dumps({
        "vertices": [{"id": "a", "factors": [3]}, {"id": "b", "factors": [3]}],
        "edges": [
            {"id": "e", "from": "a", "to": "b", "opposite": "f", "edge_factors": [], "mono_images": []},
            {"id": "f", "from": "b", "to": "a", "opposite": "e", "edge_factors": [], "mono_images": []},
        ],
        "base_vertex": "a",
    }), encoding="utf-8")
    assert main(["build", "--lattice", str(config), "--out", str(tmp_path)]) == 0
    assert _summary(tmp_path, "build")["result"]["pruned_vertices"] == 2


def test_stochastic_command_requires_seed(tmp_path):
    assert main(["sample", "--out", str(tmp_path)]) == 2
    with pytest.raises(ValidationError):
        load_config(command="mix")
    with pytest.raises(ValidationError):
        load_config(command="tails", window=(5, 3))
    with pytest.raises(ValidationError):
        load_config(command="delta", q=1)


def test_conductance_specs():
    gog = modular_ray(2, 4)
    assert load_conductances("zero", gog).is_zero
    assert set(load_conductances("constant:0.25", gog).values.values()) == {0.25}
    low, high = load_conductances("random:3", gog).bounds
    assert -0.5 <= low <= high <= 0.5
    visual = load_conductances("visual", quadratic_growth(2, 4))
    assert visual.bounds == pytest.approx((-math.log(3), -math.log(2)))
    with pytest.raises(ValidationError):
        load_conductances("constant:abc", gog)
    with pytest.raises(ValidationError):
        load_conductances("nowhere.json", gog)


def test_volume_command_brackets_ray_volume(tmp_path):
    assert main(["volume", "--lattice", "modular_ray", "--q", "2", "--depth", "40", "--out", str(tmp_path)]) == 0
    result = _summary(tmp_path, "volume")["result"]
    assert result["partial"] <= 4 / 3 + 1e-9
    assert Fraction(result["partial_exact"]) + Fraction(result["tail_bound"]) >= Fraction(4, 3) - Fraction(1, 10**9)
    assert list(tmp_path.glob("volume-*.csv"))
    (log,) = tmp_path.glob("volume-*.log")
    assert "✅ volume finished" in log.read_text(encoding="utf-8")


def test_delta_command_on_modular_ray(tmp_path):
    args = ["delta", "--lattice", "modular_ray", "--q", "3", "--depth", "10", "--radius", "14", "--out", str(tmp_path)]
    assert main(args) == 0
    result = _summary(tmp_path, "delta")["result"]
    assert result["delta_estimate"] == pytest.approx(math.log(3), abs=0.05)
    assert result["log_q"] == pytest.approx(math.log(3))


def test_degenerate_lattice_exit_code(tmp_path):
    config = tmp_path / "segment.json"
    config.write_text(json.dumps({
        "vertices": [{"id": "a", "factors": [2]}, {"id": "b", "factors": [4]}],
        "edges": [
            {"id": "e", "from": "a", "to": "b", "opposite": "f", "edge_factors": [2], "mono_images": [[1]]},
            {"id": "f", "from": "b", "to": "a", "opposite": "e", "edge_factors": [2], "mono_images": [[2]]},
        ],
        "base_vertex": "a",
    }), encoding="utf-8")
    assert main(["build", "--lattice", str(config), "--out", str(tmp_path / "runs")]) == 4


def test_stochastic_outputs_are_byte_identical(tmp_path):
    args = ["sample", "--lattice", "modular_ray", "--depth", "8", "--seed", "17", "--samples", "3000"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b")]) == 0

    for suffix in ("json", "csv", "tsv"):
        (first,) = (tmp_path / "a").glob(f"sample-*.{suffix}")
        (second,) = (tmp_path / "b").glob(f"sample-*.{suffix}")
        assert first.name == second.name
        assert first.read_bytes() == second.read_bytes()

    result = _summary(tmp_path / "a", "sample")["result"]
    assert result["seed"] == 17
    assert result["steps"] == 3000

    (trajectory,) = (tmp_path / "a").glob("sample-*.tsv")
    lines = trajectory.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 1000
    index, edge, letter = lines[0].split("\t")
    assert int(index) == -500
    assert letter.isdigit()


def test_different_seeds_give_different_files(tmp_path):
    base = ["markov", "--lattice", "modular_ray", "--depth", "8", "--samples", "2000", "--out", str(tmp_path)]
    assert main(base + ["--seed", "1"]) == 0
    assert main(base + ["--seed", "2"]) == 0
    files = sorted(tmp_path.glob("markov-*.json"))
    assert len(files) == 2
    result = json.loads(files[0].read_text(encoding="utf-8"))["result"]
    assert {"process", "iid_control", "markov_control"} <= set(result)
    assert result["samples"] == 2000


def test_tails_and_report(tmp_path):
    out = str(tmp_path)
    common = ["--lattice", "modular_ray", "--q", "2", "--depth", "12", "--out", out]
    assert main(["tails", *common, "--nmax", "20", "--window", "3:20", "--seed", "5", "--samples", "20000"]) == 0
    assert main(["gurevich", *common, "--nmax", "20"]) == 0
    assert main(["report", "--out", out]) == 0

    tails = _summary(tmp_path, "tails")["result"]
    assert tails["E"] == ["v0"]
    assert tails["exact"]["fit"]["window"] == [3, 20]
    assert tails["monte_carlo"]["samples"] == 20000
    assert len(list(tmp_path.glob("tails-*-monte_carlo.csv"))) == 1

    report = json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))
    commands = [e["command"] for e in report["entries"]]
    assert commands == ["gurevich", "tails"]
    assert (tmp_path / "report.md").exists()


def test_run_config_key_ignores_output_directory(tmp_path):
    a = RunConfig(command="delta", out=tmp_path / "a")
    b = RunConfig(command="delta", out=tmp_path / "b")
    assert a.key_fields() == b.key_fields()
    assert "out" not in a.key_fields()


def test_code_command_verifies_coding(tmp_path):
    args = ["code", "--lattice", "modular_ray", "--depth", "8", "--seed", "3", "--samples", "20", "--out", str(tmp_path)]
    assert main(args) == 0
    result = _summary(tmp_path, "code")["result"]
    assert result["segments"] == 20
    assert result["incomplete"] == 0
    assert result["roundtrip_failures"] == 0
    assert result["conjugacy_failures"] == 0
    assert result["deck_failures"] == 0
