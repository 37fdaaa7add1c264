import json
import shutil
from pathlib import Path

from loghodge.cli import main

CORPUS = Path(__file__).resolve().parent.parent / "corpus"
J2 = CORPUS / "jordan2_weight1.json"


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr().out
    return code, out


def test_validate_pass(capsys):
    code, out = run_cli(["validate", str(J2)], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["verdict"] == "pass" and doc["verb"] == "validate"


def test_validate_noncommuting_exits_one(tmp_path, capsys):
    doc = {
        "branches": 2, "base_weight": 0, "perverse_shift": 0,
        "components": [{"alpha": ["0", "0"], "dim": 2,
                        "N": [[["0", "1"], ["0", "0"]],
                              [["0", "0"], ["1", "0"]]]}],
        "W": [{"weight": 0, "basis": [["1", "0"], ["0", "1"]]}],
    }
    path = tmp_path / "broken.json"
    path.write_text(json.dumps(doc))
    code, out = run_cli(["validate", str(path)], capsys)
    assert code == 1
    report = json.loads(out)
    assert report["verdict"] == "fail"
    assert any(c["name"] == "NonCommutingOperators" and c["status"] == "fail"
               for c in report["results"])


def test_parse_error_exits_two(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"branches": 1}')
    code, out = run_cli(["validate", str(path)], capsys)
    assert code == 2
    assert json.loads(out)["verdict"] == "error"


def test_purity_verb(capsys):
    code, out = run_cli(["purity", "--mode", "closed", "--z", "1", str(J2)],
                        capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["results"]["verdict"] == "pass"


def test_cohomology_zero_model(tmp_path, capsys):
    doc = {
        "branches": 1, "base_weight": 0, "perverse_shift": 0,
        "components": [{"alpha": ["0"], "dim": 0, "N": [[]]}],
        "W": [],
    }
    path = tmp_path / "empty.json"
    path.write_text(json.dumps(doc))
    code, out = run_cli(["cohomology", "--complex", "omega", str(path)], capsys)
    assert code == 0
    assert json.loads(out)["results"] == []


def test_imhs_missing_hodge_is_input_error(tmp_path, capsys):
    doc = json.loads(J2.read_text())
    doc.pop("F")
    path = tmp_path / "nof.json"
    path.write_text(json.dumps(doc))
    code, out = run_cli(["imhs", str(path)], capsys)
    assert code == 2
    assert "MissingHodgeFiltration" in json.loads(out)["error"]


def test_star_and_relmono_and_filtration(capsys):
    for verb in (["filtration", str(J2)],
                 ["star", "--branch", "1", str(J2)],
                 ["relmono", "--z", "1", str(J2)]):
        code, out = run_cli(verb, capsys)
        assert code == 0
        json.loads(out)


def test_decompose_and_duality_and_link(capsys):
    for verb in (["decompose", str(J2)],
                 ["duality", str(J2)],
                 ["link", str(J2)],
                 ["intersect", "--z", "1", str(J2)]):
        code, out = run_cli(verb, capsys)
        assert code == 0, (verb, out)
        assert json.loads(out)["verdict"] == "pass"


def test_text_format(capsys):
    code, out = run_cli(["validate", "--format", "text", str(J2)], capsys)
    assert code == 0
    assert "verdict" in out and "{" not in out.splitlines()[-1]


def test_round_trip_reserialization(tmp_path, capsys):
    from loghodge.model import canonical_json, load_model, model_to_json

    doc = canonical_json(model_to_json(load_model(str(J2))))
    path = tmp_path / "copy.json"
    path.write_text(doc)
    again = canonical_json(model_to_json(load_model(str(path))))
    assert again == doc


def test_corpus_replay(capsys):
    code, out = run_cli(["corpus", str(CORPUS)], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["verdict"] == "pass"
    assert all(r["status"] == "pass" for r in doc["results"])


def test_corpus_detects_drift(tmp_path, capsys):
    for p in CORPUS.glob("rank1_trivial*"):
        shutil.copy(p, tmp_path / p.name)
    expected = tmp_path / "rank1_trivial.expected.json"
    doc = json.loads(expected.read_text())
    doc["validate"]["verdict"] = "fail"
    expected.write_text(json.dumps(doc))
    code, out = run_cli(["corpus", str(tmp_path)], capsys)
    assert code == 1
    assert json.loads(out)["verdict"] == "fail"


def test_corpus_deterministic_across_jobs(capsys):
    outputs = []
    for jobs in ("1", "3"):
        code, out = run_cli(["corpus", "--jobs", jobs, str(CORPUS)], capsys)
        assert code == 0
        outputs.append(out)
    assert outputs[0] == outputs[1]
