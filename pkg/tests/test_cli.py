"""End-to-end tests driving the command-line interface in process."""

import io
import json

import pytest

from momentsum.cli import main
from momentsum.jsonio import (
    load_document,
    mss_from_json,
    subset_from_json,
    witness_from_json,
)
from momentsum.pte import verify_pte

TINY = "p o13 2 1\n1 2 2 0\n"
UNSAT = "p o13 1 1\n1 1 1 0\n"


@pytest.fixture
def tiny_sat(tmp_path):
    path = tmp_path / "tiny.sat"
    path.write_text(TINY)
    return str(path)


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def _run(capsys, argv):
    rc = main(argv)
    out = capsys.readouterr()
    return rc, out.out, out.err


def _reduce(tmp_path, capsys, tiny_sat, name="inst.json", extra=()):
    out = str(tmp_path / name)
    rc, stdout, _ = _run(
        capsys, ["reduce", "--sat", tiny_sat, "--d", "2", "--out", out, *extra]
    )
    assert rc == 0 and stdout == ""
    return out


# --------------------------------------------------------------------------
# reduce


def test_reduce_writes_instance_with_provenance(tmp_path, capsys, tiny_sat):
    out = _reduce(tmp_path, capsys, tiny_sat)
    doc = load_document(open(out).read())
    assert doc["format"] == "mss-instance"
    inst = mss_from_json(doc)
    assert inst.size == 12 and inst.k == 6
    assert doc["provenance"]["sat"] == TINY
    assert doc["provenance"]["d"] == "2"
    assert doc["provenance"]["transport"] is None


def test_reduce_stdout_and_stdin(capsys, monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO(TINY))
    rc, stdout, stderr = _run(capsys, ["reduce", "--sat", "-", "--d", "1"])
    assert rc == 0
    assert load_document(stdout)["format"] == "mss-instance"
    assert "4 elements, subset size 2" in stderr


def test_reduce_is_byte_deterministic(tmp_path, capsys, tiny_sat):
    a = _reduce(tmp_path, capsys, tiny_sat, "a.json")
    b = _reduce(tmp_path, capsys, tiny_sat, "b.json")
    assert open(a).read() == open(b).read()


def test_reduce_prime_field(tmp_path, capsys, tiny_sat):
    out = _reduce(tmp_path, capsys, tiny_sat, extra=["--field", "fp", "--fast-bits", "16"])
    doc = load_document(open(out).read())
    assert doc["field"]["kind"] == "prime"
    assert doc["provenance"]["transport"]["kind"] == "prime"
    assert doc["provenance"]["transport"]["sound"] is False


def test_reduce_ext_field_picks_minimum_degree(tmp_path, capsys, tiny_sat):
    out = str(tmp_path / "ext.json")
    rc, _, stderr = _run(
        capsys,
        ["reduce", "--sat", tiny_sat, "--d", "1", "--field", "fq", "--p", "5",
         "--out", out],
    )
    assert rc == 0
    assert "using ell=7 (minimum is 7)" in stderr
    doc = load_document(open(out).read())
    assert doc["field"] == {
        "kind": "ext",
        "p": "5",
        "ell": "7",
        "modulus": [str(c) for c in doc["field"]["modulus"]],
    }


def test_reduce_flag_compatibility(capsys, tiny_sat):
    rc, _, stderr = _run(
        capsys, ["reduce", "--sat", tiny_sat, "--d", "1", "--fast-bits", "8"]
    )
    assert rc == 2 and "--fast-bits" in stderr
    rc, _, stderr = _run(
        capsys, ["reduce", "--sat", tiny_sat, "--d", "1", "--field", "fq"]
    )
    assert rc == 2 and "--p" in stderr
    rc, _, stderr = _run(
        capsys, ["reduce", "--sat", tiny_sat, "--d", "1", "--ell", "32"]
    )
    assert rc == 2


def test_reduce_rejects_bad_sat(tmp_path, capsys):
    bad = _write(tmp_path, "bad.sat", "p o13 2 1\n1 -1 2 0\n")
    rc, _, stderr = _run(capsys, ["reduce", "--sat", bad, "--d", "1"])
    assert rc == 2 and "error" in stderr


def test_missing_required_flag_exits_two(capsys, tiny_sat):
    with pytest.raises(SystemExit) as exc:
        main(["reduce", "--sat", tiny_sat])
    assert exc.value.code == 2


# --------------------------------------------------------------------------
# encode / extract / verify


def test_encode_extract_round_trip(tmp_path, capsys, tiny_sat):
    inst = _reduce(tmp_path, capsys, tiny_sat)
    assignment = _write(
        tmp_path,
        "assign.json",
        json.dumps({"format": "assignment", "version": "1", "bits": ["1", "0"]}),
    )
    subset = str(tmp_path / "subset.json")
    rc, _, _ = _run(
        capsys,
        ["encode", "--instance", inst, "--assignment", assignment, "--out", subset],
    )
    assert rc == 0
    positions = subset_from_json(load_document(open(subset).read()))
    assert len(positions) == 6

    rc, stdout, _ = _run(capsys, ["extract", "--instance", inst, "--subset", subset])
    assert rc == 0
    assert load_document(stdout)["bits"] == ["1", "0"]

    rc, stdout, _ = _run(capsys, ["verify", "--instance", inst, "--subset", subset])
    assert rc == 0
    assert load_document(stdout)["ok"] is True


def test_extract_and_verify_reject_wrong_subset(tmp_path, capsys, tiny_sat):
    inst = _reduce(tmp_path, capsys, tiny_sat)
    wrong = _write(
        tmp_path,
        "wrong.json",
        json.dumps(
            {
                "format": "subset",
                "version": "1",
                "positions": ["0", "1", "2", "3", "4", "5"],
            }
        ),
    )
    rc, _, stderr = _run(capsys, ["extract", "--instance", inst, "--subset", wrong])
    assert rc == 1 and "does not meet" in stderr
    rc, stdout, _ = _run(capsys, ["verify", "--instance", inst, "--subset", wrong])
    assert rc == 1
    assert load_document(stdout)["ok"] is False


def test_encode_without_provenance_exits_two(tmp_path, capsys, tiny_sat):
    inst = _reduce(tmp_path, capsys, tiny_sat)
    doc = load_document(open(inst).read())
    del doc["provenance"]
    stripped = _write(tmp_path, "bare.json", json.dumps(doc))
    assignment = _write(
        tmp_path,
        "assign.json",
        json.dumps({"format": "assignment", "version": "1", "bits": ["1", "0"]}),
    )
    rc, _, stderr = _run(
        capsys, ["encode", "--instance", stripped, "--assignment", assignment]
    )
    assert rc == 2 and "provenance" in stderr


def test_encode_doctored_instance_exits_three(tmp_path, capsys, tiny_sat):
    inst = _reduce(tmp_path, capsys, tiny_sat)
    doc = load_document(open(inst).read())
    doc["targets"][0] = "7"  # break the stored first target
    doctored = _write(tmp_path, "doctored.json", json.dumps(doc))
    assignment = _write(
        tmp_path,
        "assign.json",
        json.dumps({"format": "assignment", "version": "1", "bits": ["1", "0"]}),
    )
    rc, _, stderr = _run(
        capsys, ["encode", "--instance", doctored, "--assignment", assignment]
    )
    assert rc == 3 and "internal error" in stderr


def test_transported_instance_round_trip(tmp_path, capsys, tiny_sat):
    inst = _reduce(tmp_path, capsys, tiny_sat, extra=["--field", "fp", "--fast-bits", "16"])
    assignment = _write(
        tmp_path,
        "assign.json",
        json.dumps({"format": "assignment", "version": "1", "bits": ["1", "0"]}),
    )
    subset = str(tmp_path / "subset.json")
    rc, _, _ = _run(
        capsys,
        ["encode", "--instance", inst, "--assignment", assignment, "--out", subset],
    )
    assert rc == 0
    rc, stdout, _ = _run(capsys, ["extract", "--instance", inst, "--subset", subset])
    assert rc == 0 and load_document(stdout)["bits"] == ["1", "0"]


# --------------------------------------------------------------------------
# solve


def test_solve_satisfiable_and_unsat(tmp_path, capsys, tiny_sat):
    inst = _reduce(tmp_path, capsys, tiny_sat)
    rc, stdout, _ = _run(capsys, ["solve", "--instance", inst])
    assert rc == 0
    positions = subset_from_json(load_document(stdout))
    rc2, stdout2, _ = _run(
        capsys,
        ["verify", "--instance", inst, "--subset",
         _write(tmp_path, "sol.json", json.dumps(
             {"format": "subset", "version": "1",
              "positions": [str(p) for p in positions]}))],
    )
    assert rc2 == 0

    unsat_file = _write(tmp_path, "unsat.sat", UNSAT)
    u_inst = str(tmp_path / "unsat.json")
    rc, _, _ = _run(capsys, ["reduce", "--sat", unsat_file, "--d", "2", "--out", u_inst])
    assert rc == 0
    rc, _, stderr = _run(capsys, ["solve", "--instance", u_inst])
    assert rc == 1 and "no subset" in stderr


def test_solve_budget_exhaustion_exits_two(tmp_path, capsys, tiny_sat):
    inst = _reduce(tmp_path, capsys, tiny_sat)
    rc, _, stderr = _run(capsys, ["solve", "--instance", inst, "--budget", "3"])
    assert rc == 2 and "budget" in stderr


def test_solve_jobs_note(tmp_path, capsys, tiny_sat):
    inst = _reduce(tmp_path, capsys, tiny_sat)
    rc, _, stderr = _run(capsys, ["solve", "--instance", inst, "--jobs", "4"])
    assert rc == 0 and "single-threaded" in stderr


# --------------------------------------------------------------------------
# conversion chain and reconstruction


def test_symss_bdd_reconstruct_chain(tmp_path, capsys, tiny_sat):
    inst = str(tmp_path / "inst.json")
    rc, _, _ = _run(capsys, ["reduce", "--sat", tiny_sat, "--d", "1", "--out", inst])
    assert rc == 0
    sym = str(tmp_path / "sym.json")
    rc, _, _ = _run(capsys, ["to-symss", "--instance", inst, "--out", sym])
    assert rc == 0
    assert load_document(open(sym).read())["format"] == "symss-instance"

    rc, stdout, _ = _run(capsys, ["solve", "--instance", sym])
    assert rc == 0  # the symmetric view solves too

    bdd = str(tmp_path / "bdd.json")
    rc, _, stderr = _run(capsys, ["to-bdd", "--instance", sym, "--out", bdd])
    assert rc == 0 and "dimension K=2" in stderr

    rc, stdout, _ = _run(capsys, ["reconstruct", "--instance", bdd])
    assert rc == 0
    doc = load_document(stdout)
    assert doc["format"] == "reconstruction"
    assert int(doc["agreements"]) >= int(doc["threshold"])
    assert doc["polynomial"]["format"] == "polynomial"


def test_reconstruct_without_solution_exits_one(tmp_path, capsys):
    doc = {
        "format": "bdd-instance",
        "version": "1",
        "field": {"kind": "prime", "p": "13"},
        "points": ["1", "2", "0"],
        "targets": ["5", "6", "7"],
        "K": "1",
        "d": "2",
    }
    # degree-0 polynomial would need K + d = 3 agreements on distinct values
    path = _write(tmp_path, "bdd.json", json.dumps(doc))
    rc, _, stderr = _run(capsys, ["reconstruct", "--instance", path])
    assert rc == 1 and "threshold" in stderr


# --------------------------------------------------------------------------
# property checking


def test_check_props_rational(tmp_path, capsys, tiny_sat):
    inst = _reduce(tmp_path, capsys, tiny_sat)
    rc, stdout, _ = _run(
        capsys, ["check-props", "--instance", inst, "--trials", "50"]
    )
    assert rc == 0
    doc = load_document(stdout)
    assert doc["ok"] is True and doc["p3"]["probe_trials"] == "50"


def test_check_props_rejects_transported(tmp_path, capsys, tiny_sat):
    inst = _reduce(tmp_path, capsys, tiny_sat, extra=["--field", "fp", "--fast-bits", "16"])
    rc, _, stderr = _run(capsys, ["check-props", "--instance", inst])
    assert rc == 2 and "rational" in stderr


# --------------------------------------------------------------------------
# pte modes


def test_pte_prouhet(capsys):
    rc, stdout, stderr = _run(capsys, ["pte", "--mode", "prouhet", "--k", "2"])
    assert rc == 0
    assert "X={0,3,5,6} Y={1,2,4,7}" in stderr
    w = witness_from_json(load_document(stdout))
    assert verify_pte(w).ok


def test_pte_inhomogeneous(capsys):
    rc, stdout, _ = _run(
        capsys,
        ["pte", "--mode", "inhomogeneous", "--a", "3", "--b", "5", "--d", "3"],
    )
    assert rc == 0
    w = witness_from_json(load_document(stdout))
    assert w.degree == 3 and verify_pte(w).ok


def test_pte_sample_deterministic(capsys):
    argv = ["pte", "--mode", "sample", "--q", "101", "--d", "1", "--s", "4",
            "--residuals", "5", "--trials", "2000", "--seed", "7"]
    rc1, out1, _ = _run(capsys, argv)
    rc2, out2, _ = _run(capsys, argv)
    assert rc1 == rc2 == 0
    assert out1 == out2
    doc = load_document(out1)
    assert doc["found"] is True and doc["witness"] is not None


def test_pte_sample_miss_exits_one(capsys):
    rc, stdout, _ = _run(
        capsys,
        ["pte", "--mode", "sample", "--q", "101", "--d", "4", "--s", "4",
         "--residuals", "1,2,3,4", "--trials", "5", "--seed", "0"],
    )
    assert rc == 1
    assert load_document(stdout)["found"] is False


def test_pte_mode_validation(capsys):
    rc, _, stderr = _run(capsys, ["pte", "--mode", "prouhet"])
    assert rc == 2 and "--k" in stderr
    rc, _, stderr = _run(capsys, ["pte", "--mode", "sample", "--q", "10", "--d", "1"])
    assert rc == 2 and "prime" in stderr
    rc, _, stderr = _run(
        capsys,
        ["pte", "--mode", "sample", "--q", "101", "--d", "2", "--residuals", "1"],
    )
    assert rc == 2


# --------------------------------------------------------------------------
# selftest


def test_selftest_quick(capsys):
    rc, _, stderr = _run(capsys, ["selftest", "--quick"])
    assert rc == 0
    assert stderr.count("PASS") == 5 and "FAIL" not in stderr
