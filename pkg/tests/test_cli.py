import json

import pytest

from rotakit.cli import main
from test_serialize import ECONOMY_DOC, XYZ_ENV_DOC, JOBS_DOC


@pytest.fixture
def env_path(tmp_path):
    path = tmp_path / "ex2.json"
    path.write_text(json.dumps(XYZ_ENV_DOC))
    return str(path)


@pytest.fixture
def jobs_path(tmp_path):
    path = tmp_path / "jobs.json"
    path.write_text(json.dumps(JOBS_DOC))
    return str(path)


@pytest.fixture
def economy_path(tmp_path):
    path = tmp_path / "eco.json"
    path.write_text(json.dumps(ECONOMY_DOC))
    return str(path)


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_mss_environment(capsys, env_path):
    code, out, _ = _run(
        capsys, "solve", env_path, "--profile", "Rp", "--concept", "mss", "--format", "json"
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["outcomes"] == [["x", "y"]]


def test_solve_core_empty_gamma(capsys, tmp_path):
    doc = dict(XYZ_ENV_DOC)
    doc["rights"] = {"states": XYZ_ENV_DOC["rights"]["states"], "gamma": []}
    path = tmp_path / "empty.json"
    path.write_text(json.dumps(doc))
    code, out, _ = _run(
        capsys, "solve", str(path), "--profile", "R", "--concept", "core", "--format", "json"
    )
    assert code == 0
    assert json.loads(out)["sets"] == [["x", "y", "z"]]


def test_solve_absorbing_on_economy_document(capsys, economy_path):
    code, out, _ = _run(
        capsys, "solve", economy_path, "--profile", "R", "--concept", "absorbing",
        "--format", "json",
    )
    assert code == 0
    assert json.loads(out)["sets"] == [["h2,h3,h1"]]


def test_solve_partition_failure_exit_code(capsys, env_path):
    code, out, _ = _run(capsys, "solve", env_path, "--profile", "R", "--concept", "partition")
    assert code == 2
    assert "no partition" in out


def test_solve_rotation_verdict(capsys, env_path):
    code, out, _ = _run(
        capsys, "solve", env_path, "--profile", "Rp", "--concept", "rotation",
        "--order", "x,y",
    )
    assert code == 0
    assert out.strip() == "rotation program"


def test_check_rotation_violated(capsys, env_path):
    code, out, _ = _run(capsys, "check", env_path, "--condition", "rotation")
    assert code == 0
    assert "violated" in out


def test_check_maskin_constant_rule(capsys, tmp_path):
    doc = dict(XYZ_ENV_DOC)
    doc = {k: v for k, v in doc.items() if k != "rights"}
    doc["scr"] = {"R": ["x"], "Rp": ["x"]}
    path = tmp_path / "const.json"
    path.write_text(json.dumps(doc))
    code, out, _ = _run(capsys, "check", str(path), "--condition", "maskin")
    assert code == 0 and out.strip() == "ok"


def test_check_indirect_ok(capsys, env_path):
    code, out, _ = _run(capsys, "check", env_path, "--condition", "indirect")
    assert code == 0 and out.strip() == "ok"


def test_check_efficiency_and_domain(capsys, env_path):
    for condition in ("efficiency", "domain"):
        code, out, _ = _run(capsys, "check", env_path, "--condition", condition)
        assert code == 0 and out.strip() == "ok"


def test_check_cap_exceeded_exit_code(capsys, env_path, monkeypatch):
    monkeypatch.setenv("ROTAKIT_CAPS", "ordering=2")
    code, _, err = _run(capsys, "check", env_path, "--condition", "rotation")
    assert code == 3
    assert "truncated" in err


def test_construct_thm1_verify(capsys, env_path):
    code, out, _ = _run(
        capsys, "construct", env_path, "--theorem", "1", "--verify", "mss"
    )
    assert code == 0
    assert "R: pass" in out and "Rp: pass" in out


def test_construct_thm4_obstruction(capsys, env_path):
    code, out, _ = _run(capsys, "construct", env_path, "--theorem", "4")
    assert code == 4
    assert "no shared ordering" in out


def test_construct_thm4_jobs_domain_via_phi(capsys, tmp_path):
    doc = {
        "kind": "jobs",
        "jobs": ["j1", "j2", "j3"],
        "profiles": [
            {"id": "P", "orders": [["j1", "j2", "j3"], ["j1", "j3", "j2"], ["j2", "j1", "j3"]]},
            {"id": "Pp", "orders": [["j2", "j1", "j3"], ["j2", "j3", "j1"], ["j1", "j2", "j3"]]},
        ],
    }
    path = tmp_path / "hat.json"
    path.write_text(json.dumps(doc))
    code, out, _ = _run(
        capsys, "construct", str(path), "--theorem", "4", "--rule", "phi",
        "--verify", "rotation",
    )
    assert code == 0
    assert "P: pass" in out and "Pp: pass" in out


def test_domain_compile_jobs(capsys, jobs_path):
    code, out, _ = _run(capsys, "domain", jobs_path)
    assert code == 0
    payload = json.loads(out)
    assert set(payload["scr"]["Pp"]) >= {"j3,j1,j2", "j1,j2,j3"}


def test_export_dot(capsys, env_path):
    code, out, _ = _run(capsys, "export-dot", env_path, "--profile", "Rp", "--highlight", "mss")
    assert code == 0
    assert out.startswith("digraph") and "lightblue" in out


def test_input_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{]")
    code, _, err = _run(capsys, "check", str(bad), "--condition", "maskin")
    assert code == 1 and "error:" in err


def test_unknown_flag_rejected(capsys, env_path):
    code, _, err = _run(capsys, "check", env_path, "--condition", "maskin", "--bogus")
    assert code == 1


def test_out_file_written(tmp_path, capsys, env_path):
    target = tmp_path / "report.json"
    code, out, _ = _run(
        capsys, "solve", env_path, "--profile", "Rp", "--concept", "mss",
        "--format", "json", "--out", str(target),
    )
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["concept"] == "mss"


def test_round_trip_constructed_structure(capsys, env_path, tmp_path):
    target = tmp_path / "built.json"
    code, _, _ = _run(
        capsys, "construct", env_path, "--theorem", "1", "--format", "json",
        "--out", str(target),
    )
    assert code == 0
    # the emitted environment re-parses and solves identically
    code, out, _ = _run(
        capsys, "solve", str(target), "--profile", "Rp", "--concept", "mss",
        "--format", "json",
    )
    assert code == 0
    assert json.loads(out)["outcomes"] == [["x", "y"]]


def test_solve_rotation_backward_direction(capsys, env_path):
    code, out, _ = _run(
        capsys, "solve", env_path, "--profile", "Rp", "--concept", "rotation",
        "--order", "x,y", "--backward-iii",
    )
    assert code == 0
    assert "clause iii" in out


def test_domain_sample_round_trips_through_construct(capsys, tmp_path):
    target = tmp_path / "sampled.json"
    code, _, _ = _run(
        capsys, "domain", "--sample", "jobs-common-best", "--seed", "7",
        "--agents", "3", "--profiles", "2", "--out", str(target),
    )
    assert code == 0
    doc = json.loads(target.read_text())
    assert doc["kind"] == "jobs"
    code, out, _ = _run(
        capsys, "construct", str(target), "--theorem", "4", "--verify", "rotation",
        "--cap", "8",
    )
    assert code == 0 and "pass" in out


def test_domain_sample_is_seed_deterministic(capsys):
    _, out1, _ = _run(capsys, "domain", "--sample", "economy", "--seed", "5")
    _, out2, _ = _run(capsys, "domain", "--sample", "economy", "--seed", "5")
    assert out1 == out2


def test_export_dot_partition_clusters(capsys, env_path):
    code, out, _ = _run(
        capsys, "export-dot", env_path, "--profile", "Rp", "--partition"
    )
    assert code == 0 and "cluster_0" in out


def test_construct_thm4_common_best_uses_arrangement_beyond_cap(capsys, tmp_path):
    # four identical orders: the frontier has 24 allocations, far past any
    # search cap, so the arrangement ordering must carry the construction
    doc = {
        "kind": "jobs",
        "jobs": ["j1", "j2", "j3", "j4"],
        "profiles": [
            {"id": "P", "orders": [["j1", "j2", "j3", "j4"]] * 4},
        ],
    }
    path = tmp_path / "big.json"
    path.write_text(json.dumps(doc))
    code, out, _ = _run(
        capsys, "construct", str(path), "--theorem", "4", "--verify", "rotation"
    )
    assert code == 0 and "P: pass" in out


def test_shipped_fixture_documents(capsys):
    import pathlib

    root = pathlib.Path(__file__).resolve().parent.parent / "fixtures"
    code, out, _ = _run(
        capsys, "solve", str(root / "example-environment.json"),
        "--profile", "Rp", "--concept", "mss", "--format", "json",
    )
    assert code == 0 and json.loads(out)["outcomes"] == [["x", "y"]]
    code, out, _ = _run(
        capsys, "solve", str(root / "economy-domain.json"),
        "--profile", "R", "--concept", "absorbing", "--format", "json",
    )
    assert code == 0 and json.loads(out)["sets"] == [["h2,h3,h1"]]
    code, out, _ = _run(
        capsys, "construct", str(root / "marriage-domain.json"),
        "--theorem", "4", "--verify", "rotation",
    )
    assert code == 0 and "R: pass" in out and "Rp: pass" in out
    code, out, _ = _run(
        capsys, "check", str(root / "jobs-domain.json"), "--condition", "rotation"
    )
    assert code == 0 and "violated" in out


def test_check_shared_ordering_and_property_m(capsys, env_path):
    code, out, _ = _run(capsys, "check", env_path, "--condition", "shared-ordering")
    assert code == 0 and "no shared ordering" in out
    code, out, _ = _run(capsys, "check", env_path, "--condition", "property-m")
    assert code == 0 and "cannot evaluate" in out


def test_check_property_m_ok_on_marriage_fixture(capsys):
    import pathlib

    path = pathlib.Path(__file__).resolve().parent.parent / "fixtures" / "marriage-domain.json"
    code, out, _ = _run(capsys, "check", str(path), "--condition", "property-m")
    assert code == 0 and out.strip() == "ok"


def test_solve_generalized(capsys, env_path):
    code, out, _ = _run(
        capsys, "solve", env_path, "--profile", "Rp", "--concept", "generalized",
        "--format", "json",
    )
    assert code == 0
    sets = json.loads(out)["sets"]
    assert sets == [["x"], ["y"]]


def test_solve_rotation_semicolon_order_for_comma_state_ids(capsys, economy_path):
    # allocation ids contain commas, so the order list uses semicolons
    code, out, _ = _run(
        capsys, "solve", economy_path, "--profile", "R", "--concept", "rotation",
        "--order", "h2,h3,h1",
    )
    assert code == 1  # comma split shreds the id into unknown states
    code, out, _ = _run(
        capsys, "solve", economy_path, "--profile", "R", "--concept", "rotation",
        "--order", "h2,h3,h1;",
    )
    assert code == 1  # trailing empty chunk is rejected too
    code, out, _ = _run(
        capsys, "solve", economy_path, "--profile", "R", "--concept", "rotation",
        "--order", "h2,h3,h1;h2,h1,h3",
    )
    assert code == 0
    assert "not a rotation program" in out
