import json

import pytest

from pedigree_infer import Pattern, pattern_log_marginal
from pedigree_infer.cli import main
from pedigree_infer.pedigree import pedigree_to_document

from _families import person, trio, union


@pytest.fixture
def trio_file(tmp_path):
    path = tmp_path / "trio.json"
    path.write_text(json.dumps(pedigree_to_document(trio())))
    return str(path)


@pytest.fixture
def xl_family_file(tmp_path):
    doc = {
        "persons": [person("mom", "female", "unobserved"),
                    person("dad", "male", "unaffected"),
                    person("son", "male", "unobserved")],
        "unions": [union("u", "mom", "dad", ["son"])],
    }
    path = tmp_path / "xl.json"
    path.write_text(json.dumps(doc))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestValidate:
    def test_valid_trio_exits_zero(self, capsys, trio_file):
        code, out, _ = run(capsys, "validate", "--input", trio_file, "--json")
        assert code == 0
        assert json.loads(out) == {"violations": []}

    def test_cycle_exits_one_with_report(self, capsys, tmp_path):
        doc = {
            "persons": [person(p, s) for p, s in
                        [("a", "female"), ("b", "male"), ("c", "female"),
                         ("d", "male")]],
            "unions": [union("e1", "a", "b", ["c"]),
                       union("e2", "c", "d", ["a"])],
        }
        path = tmp_path / "cyclic.json"
        path.write_text(json.dumps(doc))
        code, out, _ = run(capsys, "validate", "--input", str(path), "--json")
        assert code == 1
        report = json.loads(out)
        assert any(v["rule"] == "directed-cycle" for v in report["violations"])

    def test_unknown_id_exits_one(self, capsys, tmp_path):
        doc = {"persons": [person("a", "female"), person("b", "male")],
               "unions": [union("e", "a", "b", ["ghost"])]}
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc))
        code, out, _ = run(capsys, "validate", "--input", str(path), "--json")
        assert code == 1
        assert "ghost" in out

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "validate", "--input", "/nope/missing.json")
        assert code == 1


class TestPredict:
    def test_byte_identical_reruns(self, capsys, trio_file):
        code1, out1, _ = run(capsys, "predict", "--input", trio_file,
                             "--seed", "7", "--samples", "10", "--json")
        code2, out2, _ = run(capsys, "predict", "--input", trio_file,
                             "--seed", "7", "--samples", "10", "--json")
        assert code1 == code2 == 0
        assert out1 == out2
        doc = json.loads(out1)
        assert set(doc) == {"log_marginals", "posterior", "predicted",
                            "confident", "samples", "seed"}

    def test_single_sample_matches_library(self, capsys, trio_file):
        code, out, _ = run(capsys, "predict", "--input", trio_file,
                           "--seed", "3", "--samples", "1", "--json")
        assert code == 0
        doc = json.loads(out)
        expect = pattern_log_marginal(trio(), Pattern.AR, samples=1,
                                      strength=1e6, seed=3)
        assert doc["log_marginals"]["AR"] == expect

    def test_impossible_evidence_reports_neg_inf(self, capsys, trio_file):
        # the affected child cannot be mutation-free under any pattern
        code, out, _ = run(capsys, "predict", "--input", trio_file,
                           "--force", "kid=noncarrier", "--json",
                           "--samples", "2")
        assert code == 1
        doc = json.loads(out)
        assert doc["error"] == "impossible-evidence"
        assert set(doc["log_marginals"].values()) == {"-inf"}

    def test_human_output(self, capsys, trio_file):
        code, out, _ = run(capsys, "predict", "--input", trio_file,
                           "--samples", "5")
        assert code == 0
        assert "predicted:" in out


class TestSmooth:
    def test_forced_carrier_male_point_mass(self, capsys, xl_family_file):
        code, out, _ = run(capsys, "smooth", "--input", xl_family_file,
                           "--pattern", "XL", "--force", "son=xY", "--json")
        assert code == 0
        doc = json.loads(out)
        assert doc["posteriors"]["son"] == {"xY": 1.0, "XY": 0.0}
        assert doc["audit"]["anchor_spread"] <= 1e-10

    def test_audit_fields_present(self, capsys, trio_file):
        code, out, _ = run(capsys, "smooth", "--input", trio_file,
                           "--pattern", "AR", "--json")
        doc = json.loads(out)
        assert set(doc) == {"log_marginal", "posteriors", "audit"}
        assert set(doc["audit"]) == {"anchor_spread", "fvs"}

    def test_pairwise_tables_added(self, capsys, trio_file):
        code, out, _ = run(capsys, "smooth", "--input", trio_file,
                           "--pattern", "AR", "--pairwise", "--json")
        doc = json.loads(out)
        assert "parent_conditionals" in doc
        assert doc["parent_conditionals"]["kid"]["mother"] == "mom"

    def test_impossible_evidence_sentinel(self, capsys, trio_file):
        code, out, _ = run(capsys, "smooth", "--input", trio_file,
                           "--pattern", "AD", "--force", "kid=aa", "--json")
        assert code == 1
        doc = json.loads(out)
        assert doc["log_marginal"] == "-inf"
        assert doc["posteriors"] == {}

    def test_bad_state_label(self, capsys, trio_file):
        code, _, err = run(capsys, "smooth", "--input", trio_file,
                           "--pattern", "AD", "--force", "kid=xY")
        assert code == 1
        assert "does not resolve" in err

    def test_evidence_file(self, capsys, tmp_path, xl_family_file):
        evidence = tmp_path / "ev.json"
        evidence.write_text(json.dumps({"son": ["xY"]}))
        code, out, _ = run(capsys, "smooth", "--input", xl_family_file,
                           "--pattern", "XL", "--evidence", str(evidence),
                           "--json")
        assert code == 0
        assert json.loads(out)["posteriors"]["son"]["xY"] == 1.0


class TestSimulate:
    def test_structure_preserved_and_deterministic(self, capsys, trio_file):
        code1, out1, _ = run(capsys, "simulate", "--input", trio_file,
                             "--pattern", "AR", "--seed", "5", "--json")
        code2, out2, _ = run(capsys, "simulate", "--input", trio_file,
                             "--pattern", "AR", "--seed", "5", "--json")
        assert code1 == code2 == 0
        assert out1 == out2
        doc = json.loads(out1)
        assert [p["id"] for p in doc["persons"]] == ["dad", "kid", "mom"]
        assert doc["unions"] == [{"id": "u1", "mother": "mom", "father": "dad",
                                  "children": ["kid"]}]
        assert all(p["phenotype"] in ("affected", "unaffected")
                   for p in doc["persons"])

    def test_latents_flag(self, capsys, trio_file):
        code, out, _ = run(capsys, "simulate", "--input", trio_file,
                           "--pattern", "XL", "--seed", "1", "--latents",
                           "--json")
        doc = json.loads(out)
        assert set(doc) == {"pedigree", "latent_states"}
        assert set(doc["latent_states"]) == {"dad", "kid", "mom"}


class TestUsage:
    def test_missing_input_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["predict"])
        assert exc.value.code == 2

    def test_unknown_command(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

    def test_output_file_written(self, capsys, trio_file, tmp_path):
        out_path = tmp_path / "result.json"
        code, out, _ = run(capsys, "smooth", "--input", trio_file,
                           "--pattern", "AR", "--json",
                           "--output", str(out_path))
        assert code == 0
        assert out_path.read_text().strip() == out.strip()

    def test_dump_params_audit_file(self, capsys, trio_file, tmp_path):
        dump = tmp_path / "params.json"
        code, _, _ = run(capsys, "smooth", "--input", trio_file,
                         "--pattern", "XL", "--json",
                         "--dump-params", str(dump))
        assert code == 0
        doc = json.loads(dump.read_text())
        assert doc["pattern"] == "XL"
        assert doc["transition"]["male"]["shape"] == [3, 2, 2]
        assert doc["labels"]["female"] == ["xx", "Xx", "XX"]
