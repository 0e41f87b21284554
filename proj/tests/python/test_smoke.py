import json
import pathlib

import pytest

import stylodet

DATA = pathlib.Path(__file__).resolve().parents[1] / "data"


def test_parse_golden():
    source = (DATA / "golden" / "class_a.java").read_text()
    assert stylodet.dump_tree(source) == (DATA / "golden" / "class_a.tree").read_text()
    assert stylodet.has_parse_errors("class { int = ;")


def test_bigrams_and_groups():
    counts = stylodet.nested_bigrams("class A { void m() { if (x) { y(); } } }", 1, 1, compressed=True)
    assert counts["if_statement→parenthesized_expression@5"] == 1
    assert counts["if_statement→block@5"] == 1
    groups = stylodet.split_into_groups("".join(f"l{i}\n" for i in range(25)), 10)
    assert [(g[0], g[1]) for g in groups] == [(1, 10), (11, 20), (21, 25)]
    assert groups[-1][3] is True


def test_formulas():
    assert stylodet.bin_index(17, 5) == 11
    assert stylodet.bin_index(10, 5) == 10
    with pytest.raises(stylodet.InputError):
        stylodet.bin_index(9, 5)
    f = stylodet.lexical_features("a\n\n")
    assert f[0] == pytest.approx(0.5 / 3)
    assert f[6] == pytest.approx(1 / 3)
    assert stylodet.count_statement_tokens("if (a) { for (;;) {} }") == 2


def test_metrics():
    assert stylodet.rank_auc([0.8, 0.7, 0.4, 0.2], [1, 0, 1, 0]) == 0.75
    assert stylodet.rank_auc([0.1, 0.2], [1, 1]) is None
    m = stylodet.metrics([0.5, 0.5], [1, 0])
    assert m["accuracy"] == 0.5 and m["auc"] == 0.5 and m["f1"] == 0.0
    assert stylodet.welch_t_test([1, 2, 3], [1, 2, 3]) == 1.0


def test_train_and_predict():
    rows = [[float(i % 2), 0.5] for i in range(40)]
    labels = [i % 2 for i in range(40)]
    model = stylodet.train(rows, labels, kind="gbt", seed=42)
    assert model.kind == "gradient_boosted_trees"
    assert model.predict_score([1.0, 0.5]) > 0.5
    assert model.predict_score([0.0, 0.5]) < 0.5
    with pytest.raises(stylodet.ArtifactMismatch):
        model.predict_score([1.0])
    with pytest.raises(stylodet.InputError):
        stylodet.train(rows, [1] * 40)


def test_cli_pipeline(tmp_path):
    corpus = tmp_path / "corpus"
    assert stylodet.run_cli(["synth", str(corpus), "--files", "30"])[0] == 0
    manifest = stylodet.ingest(corpus)
    assert len(manifest["entries"]) == 30
    (tmp_path / "m.json").write_text(json.dumps(manifest))
    code, _, err = stylodet.run_cli(
        ["build", "--manifest", str(tmp_path / "m.json"), "--bin-width", "auto", "-o", str(tmp_path / "data")]
    )
    assert code == 0, err
    code, _, err = stylodet.run_cli(["train", "--data", str(tmp_path / "data"), "-o", str(tmp_path / "b.json")])
    assert code == 0, err
    bundle = stylodet.Bundle.load(str(tmp_path / "b.json"))
    assert bundle.family == "EWD-NB-F"
    llm_file = next((corpus / "llm").rglob("*.java"))
    groups = bundle.detect(llm_file.read_text(), str(llm_file))
    assert groups and all(g["positive"] for g in groups)
    assert stylodet.run_cli(["ingest", str(tmp_path / "missing")])[0] == 2
