import json
from fractions import Fraction as F

import pytest

from lineactions import cli
from lineactions.errors import PreconditionError
from lineactions.maps import from_spec
from lineactions.words import BSWord, reduce as words_reduce


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


@pytest.fixture()
def action_file(tmp_path, capsys):
    path = tmp_path / "act.json"
    code, _ = run(capsys, "bs", "construct", str(path), "--m", "2", "--n", "3")
    assert code == 0
    return path


def test_rotnum_from_json_and_csv(tmp_path, capsys):
    spec = tmp_path / "rot.json"
    spec.write_text(json.dumps({"kind": "affine", "slope": "1", "offset": "1/3"}))
    code, out = run(capsys, "rotnum", "--map", str(spec), "--iters", "900")
    assert code == 0
    assert abs(float(out["estimate"]) - 1 / 3) < 1e-12
    csv = tmp_path / "rot.csv"
    csv.write_text("0,1/4\n1/2,3/4\n1,5/4\n")
    code, out = run(capsys, "rotnum", "--map", str(csv), "--iters", "400")
    assert code == 0
    assert abs(float(out["estimate"]) - 0.25) < 1e-12


def test_meantrans_cli(tmp_path, capsys):
    spec = tmp_path / "rot.json"
    spec.write_text(json.dumps({"kind": "affine", "slope": "1", "offset": "1/2"}))
    mu = tmp_path / "mu.json"
    mu.write_text(json.dumps({"atoms": [["0", "1/2"], ["1/2", "1/2"]]}))
    code, out = run(capsys, "meantrans", "--map", str(spec), "--measure", str(mu))
    assert code == 0 and out["tau_mu"] == "1/2"


def test_audit_commute_cli_exit_codes(tmp_path, capsys):
    n = 1001
    ok = tmp_path / "f.csv"
    ok.write_text("\n".join(f"{i/(n-1)},{(i/(n-1))**2}" for i in range(n)))
    code, out = run(capsys, "audit-commute", "--f", str(ok), "--g", str(ok),
                    "--tol", "1e-6")
    assert code == 0 and out["verdict"] == "consistent"
    moved = tmp_path / "g.csv"
    moved.write_text("\n".join(f"{i/(n-1)},{(i/(n-1))**4}" for i in range(n)))
    fixer = tmp_path / "fix.csv"
    fixer.write_text("\n".join(
        f"{x},{x + 0.05 * (x * (1 - x)) * (0.5 - x)}"
        for x in (i / (n - 1) for i in range(n))))
    code, out = run(capsys, "audit-commute", "--f", str(fixer), "--g", str(moved),
                    "--tol", "1e-7")
    assert code == 4 and out["verdict"] == "violations"


def test_words_cli(capsys):
    code, out = run(capsys, "words", "reduce", "--m", "2", "--n", "3",
                    "--word", "t a^2 t^-1", "--trace")
    assert code == 0 and out["normal_form"] == "a^3"
    assert out["steps"][0]["position"] == 0
    code, out = run(capsys, "words", "equal", "--m", "2", "--n", "3",
                    "--word", "t a^2 t^-1", "--word2", "a^3")
    assert code == 0 and out["equal"] is True
    code, out = run(capsys, "words", "enumerate", "--m", "2", "--n", "3",
                    "--max-syllables", "1", "--exponent-bound", "1")
    assert code == 0 and out["count_emitted"] == 20
    code, out = run(capsys, "words", "obstruction", "--m", "2", "--n", "3",
                    "--p", "5", "--q", "1")
    assert code == 0 and out["nontrivial"] is True


def test_words_cli_error_exit(capsys):
    code, _ = run(capsys, "words", "obstruction", "--m", "2", "--n", "3",
                  "--p", "6", "--q", "1")
    assert code == 2


def test_bs_action_file_roundtrip(action_file, capsys):
    act = cli.action_from_file(action_file)
    assert (act.m, act.n) == (2, 3)
    g_clone = from_spec(json.loads(action_file.read_text())["g_n"])
    assert g_clone.eval_float(0.3) == act.g_n.eval_float(0.3)


def test_bs_verify_and_certify(action_file, capsys):
    code, out = run(capsys, "bs", "verify-inclusions", str(action_file))
    assert code == 0 and out["verified"] is True
    data = json.loads(action_file.read_text())
    assert data["table"]["verified"] is True
    code, out = run(capsys, "bs", "certify", str(action_file),
                    "--word", "t a t^-1 a", "--x0", "3/4")
    assert code == 0 and out["verdict"] == "nontrivial"
    assert out["final_tag"] == "A^s + nZ"


def test_bs_verify_broken_parameter(tmp_path, capsys):
    path = tmp_path / "bad.json"
    code, _ = run(capsys, "bs", "construct", str(path), "--m", "2", "--n", "3",
                  "--a", "2/5")
    assert code == 0
    code, out = run(capsys, "bs", "verify-inclusions", str(path))
    assert code == 4 and out["verified"] is False


def test_pipeline_refuses_unverified(action_file, capsys):
    code, _ = run(capsys, "pipeline", "faithfulness",
                  "--action-file", str(action_file),
                  "--max-syllables", "1", "--exponent-bound", "1")
    assert code == 2


def test_pipeline_sweep_and_per_word(action_file, capsys):
    run(capsys, "bs", "verify-inclusions", str(action_file))
    code, out = run(capsys, "pipeline", "faithfulness",
                    "--action-file", str(action_file),
                    "--max-syllables", "2", "--exponent-bound", "2")
    assert code == 0
    assert out["total_words"] == 454 and out["inconclusive"] == 0
    code, out2 = run(capsys, "pipeline", "faithfulness",
                     "--action-file", str(action_file),
                     "--max-syllables", "2", "--exponent-bound", "2",
                     "--per-word")
    assert code == 0
    assert out2["total_words"] == 454 and out2["nontrivial"] == 454


def test_pipeline_trivial_box_all_nontrivial(action_file, capsys):
    run(capsys, "bs", "verify-inclusions", str(action_file))
    code, out = run(capsys, "pipeline", "faithfulness",
                    "--action-file", str(action_file),
                    "--max-syllables", "0", "--exponent-bound", "2")
    assert code == 0 and out["total_words"] == 4 and out["nontrivial"] == 4


def test_bs12_oracle_pipeline_small(capsys):
    code, out = run(capsys, "pipeline", "bs12-oracle", "--max-letters", "4")
    assert code == 0 and out["passed"] is True
    assert out["disagreement_count"] == 0
    assert out["letter_strings"] == (4 ** 5 - 1) // 3


def test_bs12_oracle_vacuous(capsys):
    code, out = run(capsys, "pipeline", "bs12-oracle", "--max-letters", "0")
    assert code == 0 and out["passed"] is True and out["distinct_words"] == 1


def test_bs12_oracle_mutation_emits_witness():
    """A rewriter with the divisibility test flipped must be caught."""
    from lineactions.words import BSWord, NormalForm

    def broken_reduce(w):
        # deliberately wrong: treats NON-multiples of m as pinches
        current = w
        changed = True
        while changed:
            changed = False
            syl = list(current.syllables)
            for i, (kind, exp) in enumerate(syl):
                if kind != 't':
                    continue
                j = i + 1
                r = 0
                if j < len(syl) and syl[j][0] == 'a':
                    r = syl[j][1]
                    j += 1
                if j < len(syl) and syl[j] == ('t', -exp):
                    if exp == 1 and r % current.m != 0:
                        new = syl[:i] + [('a', current.n * (r // current.m))] + syl[j + 1:]
                        current = BSWord(current.m, current.n, tuple(new))
                        changed = True
                        break
        return current

    report = cli.pipeline_bs12_oracle(3, random_pairs=200, _reduce=broken_reduce)
    assert not report["passed"]
    assert report["disagreement_count"] > 0
    assert report["disagreements"][0]["word"]


def test_manifest_append_only(tmp_path, capsys):
    spec = tmp_path / "rot.json"
    spec.write_text(json.dumps({"kind": "affine", "slope": "1", "offset": "0"}))
    for _ in range(2):
        code, _ = run(capsys, "rotnum", "--map", str(spec), "--iters", "10",
                      "--manifest-dir", str(tmp_path / "runs"),
                      "--out", str(tmp_path / "r.json"))
        assert code == 0
    lines = (tmp_path / "runs" / "manifest.jsonl").read_text().splitlines()
    assert len(lines) == 2
    rec = json.loads(lines[0])
    assert rec["subcommand"] == "rotnum"
    assert "map" in rec["input_hashes"]
    assert str(tmp_path / "r.json") in rec["outputs"]


def test_presentations_cli(tmp_path, capsys):
    schema = tmp_path / "mc3.json"
    code, _ = run(capsys, "presentations", "mc", "--n", "3",
                  "--emit", str(schema), "--out", str(tmp_path / "null.json"))
    assert code == 0
    code, out = run(capsys, "presentations", "commgraph", str(schema))
    assert code == 0 and out["connected"] is True
    code, out = run(capsys, "presentations", "braid-conjugator", str(schema),
                    "--x", "a_1", "--y", "b_1")
    assert code == 0 and out["equals"] == "a_1"
    code, out = run(capsys, "presentations", "autfn-verify", "--n", "4")
    assert code == 0 and out["total_failures"] == 0
    code, out = run(capsys, "presentations", "pin-convention")
    assert code == 0 and out["convention"] == "inverse-first"


def test_rigidity_cli(tmp_path, capsys):
    sine = {"kind": "sine_lift", "amplitude": "1/100"}
    data = {"n": 2,
            "g": {"kind": "compose",
                  "of": [{"kind": "inverse", "of": sine},
                         {"kind": "affine", "slope": "2", "offset": "0"}, sine]},
            "h": {"kind": "compose",
                  "of": [{"kind": "inverse", "of": sine},
                         {"kind": "affine", "slope": "1", "offset": "1"}, sine]}}
    path = tmp_path / "rig.json"
    path.write_text(json.dumps(data))
    csv = tmp_path / "phi.csv"
    code, out = run(capsys, "rigidity", "solve", "--action-file", str(path),
                    "--n", "2", "--window", "4", "--grid-step", "0.001",
                    "--tol", "1e-6", "--phi-csv", str(csv))
    assert code == 0 and out["verdict"] == "converged"
    assert csv.read_text().startswith("x,phi")
    code, out = run(capsys, "rigidity", "detect", "--action-file", str(path),
                    "--n", "2", "--window", "4")
    assert code == 0 and out["classification"] == "consistent_with_standard"


def test_json_reports_round_trip(action_file, capsys):
    run(capsys, "bs", "verify-inclusions", str(action_file))
    data = json.loads(action_file.read_text())
    act = cli.action_from_file(action_file)
    assert act.table.verified
    assert json.loads(json.dumps(data)) == data
