import json

import pytest
import yaml

from rule184 import ExperimentManifest, __version__, run_manifest
from rule184.__main__ import (
    EXIT_OK,
    EXIT_TOLERANCE,
    EXIT_USAGE,
    FluxParams,
    main,
    rows_to_text,
    series_to_dat,
)
from rule184.components import ManifestError


def _run(tmp_path, *argv) -> int:
    return main(["--out", str(tmp_path), "--name", "run", *argv])


def _results(tmp_path, fmt="csv") -> str:
    return (tmp_path / "run" / f"results.{fmt}").read_text()


def test_transform(tmp_path):
    assert _run(tmp_path, "transform", "--config", "ca184:OPEN:0..3:0011") == EXIT_OK
    assert _results(tmp_path).splitlines() == [
        "input,output",
        "ca184:OPEN:0..3:0011,ba:OPEN:0..2:+0-",
    ]


def test_profile_file(tmp_path):
    assert _run(tmp_path, "transform", "--config", "ba:OPEN:0..2:+-+", "--op", "profile") == EXIT_OK
    assert (tmp_path / "run" / "profile.csv").read_text().splitlines() == [
        "k,height",
        "-1,0",
        "0,1",
        "1,0",
        "2,1",
    ]


def test_partners(tmp_path):
    assert _run(tmp_path, "partners", "--config", "ba:OPEN:0..3:++--") == EXIT_OK
    assert (tmp_path / "run" / "pairs.csv").read_text() == "pos_plus,pos_minus,time2\n0,3,3\n1,2,1\n"


def test_evolve_with_plot_data(tmp_path):
    code = _run(tmp_path, "--plot-data", "evolve", "--config", "ca184:RING:4:0101", "--steps", "2")
    assert code == EXIT_OK
    assert _results(tmp_path).splitlines() == [
        "t2,config",
        "0,ca184:RING:4:0101",
        "2,ca184:RING:4:1010",
        "4,ca184:RING:4:0101",
    ]
    dat = (tmp_path / "run" / "spacetime.dat").read_text().splitlines()
    assert dat[0] == "# spacetime"
    assert dat[1:3] == ["0 1 1", "0 3 1"]


def test_exact_statistics(tmp_path):
    assert _run(tmp_path, "--format", "jsonl", "stats", "--estimator", "u2n", "--n-list", "1,2,3") == EXIT_OK
    rows = [json.loads(line) for line in _results(tmp_path, "jsonl").splitlines()]
    assert [r["exact"] for r in rows] == ["1/2", "3/8", "5/16"]


def test_tolerance_passes_on_exact_values(tmp_path):
    argv = ["stats", "--estimator", "first_return", "--n-list", "1,2", "--mode", "exact_enumeration"]
    assert _run(tmp_path, *argv, "--tolerance-se", "1") == EXIT_OK


def test_tolerance_failure(tmp_path):
    argv = ["bench", "--size", "4096", "--steps", "2", "--scalar-steps", "1", "--min-speedup", "1e12"]
    assert _run(tmp_path, *argv) == EXIT_TOLERANCE
    kernels = [line.split(",")[0] for line in _results(tmp_path).splitlines()[1:]]
    assert kernels == ["lookup", "array", "bitparallel", "speedup"]


def test_phase_separation(tmp_path):
    assert _run(tmp_path, "--seed", "3", "phase-sep", "--half", "6") == EXIT_OK
    assert (tmp_path / "run" / "path.txt").read_text().startswith("path:HALF:0:")


def test_segments(tmp_path):
    argv = ["hydro", "--experiment", "segment", "--config", "ca184:OPEN:0..5:001011"]
    assert _run(tmp_path, *argv) == EXIT_OK
    assert _results(tmp_path).splitlines() == [
        "kind,start,length",
        "hole_dominated,0,2",
        "duce,2,2",
        "particle_dominated,4,2",
    ]


@pytest.mark.parametrize(
    "argv",
    [
        ["teleport"],
        ["transform"],
        ["transform", "--config", "ca184:RING:4:0101", "--op", "lambda"],
        ["transform", "--config", "ca184:RING:4:01x1"],
        ["flux", "--ring-size", "100", "--burn-in", "10"],
        ["stats", "--estimator", "u2n", "--n-list", "-1"],
        ["hydro", "--experiment", "plateau", "--walk", "brownian"],
    ],
)
def test_usage_errors(tmp_path, argv):
    assert _run(tmp_path, *argv) == EXIT_USAGE


def test_verify_reports_statements(tmp_path):
    assert _run(tmp_path, "verify", "--quick") == EXIT_OK
    lines = _results(tmp_path).splitlines()
    assert lines[0] == "check,statement,suite,passed,detail,seconds"
    assert lines[1].startswith("rule-table,rule 184 update,exact,")
    assert any(line.startswith("one-sided-shift,one-sided shift law,") for line in lines)


def test_help():
    assert main(["--help"]) == EXIT_OK


def test_replay(tmp_path, manifests):
    assert main(["--out", str(tmp_path), "run", str(manifests / "evolve.yaml")]) == EXIT_OK
    first = tmp_path / "sheet"
    assert len((first / "results.csv").read_text().splitlines()) == 1 + 9
    saved = yaml.safe_load((first / "manifest.yaml").read_text())
    assert saved["seed"] == 11
    assert saved["version"] == __version__
    code = main(["--out", str(tmp_path), "--name", "again", "run", str(first / "manifest.yaml")])
    assert code == EXIT_OK
    assert (tmp_path / "again" / "results.csv").read_text() == (first / "results.csv").read_text()


def test_seed_override_changes_the_run(tmp_path, manifests):
    main(["--out", str(tmp_path), "run", str(manifests / "evolve.yaml")])
    main(["--out", str(tmp_path), "--seed", "12", "--name", "other", "run", str(manifests / "evolve.yaml")])
    assert (tmp_path / "other" / "results.csv").read_text() != (tmp_path / "sheet" / "results.csv").read_text()


def test_manifest_in_code(tmp_path, manifests):
    manifest = ExperimentManifest.from_yaml(manifests / "partners.yaml").copy(update={"out": tmp_path})
    assert run_manifest(manifest) == EXIT_OK
    rows = (tmp_path / "brackets" / "results.csv").read_text().splitlines()
    assert rows[0] == "kind,pos_plus,pos_minus,time2"
    assert rows[1:] == ["pair,0,1,1", "pair,2,5,3", "pair,3,4,1"]


@pytest.mark.parametrize("name", ["unknown_param.yaml", "not_a_mapping.yaml", "missing.yaml"])
def test_bad_manifests(manifests, name):
    with pytest.raises(ManifestError):
        ExperimentManifest.from_yaml(manifests / name)


def test_bad_manifest_exit_code(tmp_path, manifests):
    assert main(["--out", str(tmp_path), "run", str(manifests / "unknown_param.yaml")]) == EXIT_USAGE


def test_params_are_normalized():
    manifest = ExperimentManifest(command="flux", params={"ring_size": 100})
    assert manifest.params == {"ring_size": 100}
    typed = manifest.typed_params
    assert isinstance(typed, FluxParams)
    assert typed.measure_steps == 200
    assert manifest.run_dir.name == f"flux-seed-{manifest.seed}"


def test_foreign_version_is_accepted():
    assert ExperimentManifest(command="verify", version="0.0.1").version == "0.0.1"


def test_rows_to_text():
    rows = [{"a": 1, "b": 0.5}, {"c": True}]
    assert rows_to_text(rows, "csv").splitlines() == ["a,b,c", "1,0.5,", ",,True"]
    assert rows_to_text([], "jsonl") == ""


def test_series_to_dat():
    assert series_to_dat("flux", [[0.1, 0.1, 0.1], [1, 2, 3]]) == "# flux\n0.1 0.1 0.1\n1 2 3\n"
