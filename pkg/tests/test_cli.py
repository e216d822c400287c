import json

import pytest

from almostctl.cli import MAX_HORIZON, main
from almostctl.corpus import default_corpus_dir

CORPUS = default_corpus_dir()


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_suite_idempotent_json(capsys):
    code, out, _ = run(capsys, "suite", "idempotent", "--report", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["suite"] == "idempotent"
    assert doc["summary"]["fail"] == 0
    assert doc["coverage"]["missing"] == []
    ids = [r["id"] for r in doc["records"]]
    assert ids == sorted(ids)


def test_suite_truncated_reports_failures(capsys):
    code, out, _ = run(capsys, "suite", "idempotent", "--ring", "truncated", "--report", "json")
    assert code == 1
    doc = json.loads(out)
    failed = {r["id"] for r in doc["records"] if r["verdict"]["status"] == "fail"}
    assert failed == {"idempotent.builtin-j", "idempotent.flatness-corpus"}
    for r in doc["records"]:
        if r["verdict"]["status"] == "fail":
            assert r["verdict"]["witness"]


def test_suite_text_table(capsys):
    code, out, _ = run(capsys, "suite", "theorem-b", "--horizon", "6")
    assert code == 0
    assert out.startswith("suite theorem-b")
    assert "theorem-b.roundtrip" in out
    assert "fail 0" in out


def test_timings_flag(capsys):
    code, out, _ = run(capsys, "suite", "quillen", "--max-n", "20", "--timings", "--report", "json")
    assert code == 0
    assert all("duration_s" in r for r in json.loads(out)["records"])


def test_horizon_limit(capsys):
    code, _, err = run(capsys, "suite", "idempotent", "--horizon", str(MAX_HORIZON + 1))
    assert code == 3
    assert "limit" in err


def test_negative_horizon(capsys):
    code, _, _ = run(capsys, "suite", "idempotent", "--horizon", "-1")
    assert code == 2


def test_size_limit(capsys):
    code, _, _ = run(capsys, "suite", "quillen", "--max-n", "20000")
    assert code == 3


def test_bad_file(tmp_path, capsys):
    f = tmp_path / "bad.alm"
    f.write_text("system A kind zero\nsystem B kind nonsense\n")
    code, _, err = run(capsys, "classify", str(f))
    assert code == 2
    assert "line 2" in err


def test_missing_file(capsys):
    code, _, err = run(capsys, "classify", "/nonexistent/x.alm")
    assert code == 2


def test_bad_seed_rejected(capsys):
    with pytest.raises(SystemExit) as ei:
        main(["suite", "idempotent", "--seed", str(1 << 64)])
    assert ei.value.code == 2


def test_classify_corpus_file(capsys):
    code, out, _ = run(capsys, "classify", str(CORPUS / "10-systems.alm"), "--report", "json")
    assert code == 0
    objs = json.loads(out)["objects"]
    assert "V" in objs and "Kh" not in objs
    assert objs["I"]["firm"]["status"] != "fail"
    assert objs["VmodI"]["almost_zero"]["status"] != "fail"
    assert objs["V"]["firm"]["status"] == "fail"


def test_classify_own_file_uses_corpus_names(tmp_path, capsys):
    f = tmp_path / "mine.alm"
    f.write_text("system W kind tensor It Qh\n")
    code, out, _ = run(capsys, "classify", str(f))
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("object")
    assert any(line.startswith("W ") for line in lines)
    assert len(lines) == 3


@pytest.mark.parametrize("op,names", [("cok", ["xh"]), ("ker", ["j"]), ("boxprod", ["j", "j"]),
                                      ("diagprod", ["xh", "xq"])])
def test_arrow_ops(capsys, op, names):
    code, out, _ = run(capsys, "arrow", op, str(CORPUS / "30-arrows.alm"), *names,
                       "--report", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["operation"] == op
    assert doc["chain_map"]["status"] != "fail"


def test_cok_homology_content(capsys):
    code, out, _ = run(capsys, "arrow", "cok", str(CORPUS / "30-arrows.alm"), "xh",
                       "--horizon", "3", "--report", "json")
    doc = json.loads(out)
    # target is cone(x^(1/2)), whose H0 at level 3 is k[y]/(y^4)
    assert doc["target"]["homology"]["0"] == ["y^4"]


def test_arrow_errors(capsys):
    f = str(CORPUS / "30-arrows.alm")
    assert run(capsys, "arrow", "cok", f, "nope")[0] == 2
    assert run(capsys, "arrow", "boxprod", f, "j")[0] == 2


def test_field_option(capsys):
    code, out, _ = run(capsys, "suite", "lemma-bar", "--field", "q", "--horizon", "4",
                       "--report", "json")
    assert code == 0
    assert json.loads(out)["config"]["field"] == "q"
    assert run(capsys, "suite", "lemma-bar", "--field", "fp:4")[0] == 2
