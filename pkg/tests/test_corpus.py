import csv
import io
from pathlib import Path

from conftest import ANALYZER_DIR, filler, make_doc
from litscan.cli import main
from litscan.corpus import (
    CorpusResult,
    RunConfig,
    aggregate,
    aggregates_csv,
    classify_paper,
    emit_csv,
    run_corpus,
    tag_universe,
)
from litscan.ingest import SourceMeta, load_manifest


def _result(pid, journal, year, status="analyzed", verdicts=None, words=5000):
    return CorpusResult(
        meta=SourceMeta(pid, journal, year, ""),
        status=status,
        tag_verdicts=verdicts or {},
        per_analyzer={},
        word_count=words,
    )


def test_classify_paper_short_text(bundle):
    doc = make_doc(" ".join(filler(3000)))
    result, report = classify_paper(doc, bundle, RunConfig())
    assert result.status == "skipped_short"
    assert result.tag_verdicts == {}
    assert "skipped_short" in report


def test_classify_paper_secondary_exclusion(bundle):
    words = filler(5000)
    words[10:10] = "we present a systematic mapping study of research on testing".split()
    doc = make_doc(" ".join(words))
    result, report = classify_paper(doc, bundle, RunConfig())
    assert result.status == "excluded_secondary"
    assert result.tag_verdicts == {}
    assert result.per_analyzer.get("secondary_study") == "positive"
    assert "excluded" in report


def test_classify_paper_reports_evidence(bundle):
    words = filler(4500)
    words[200:200] = "We used a Student's t-test and also ran unit tests daily".split()
    doc = make_doc(" ".join(words))
    result, report = classify_paper(doc, bundle, RunConfig())
    assert result.status == "analyzed"
    assert result.tag_verdicts["parametric_test"] == "positive"
    assert "»" in report and "«" in report
    assert "supports: [used]" in report
    assert "skipped by" in report  # the unit-tests trap shows up separately


def test_emit_csv_worked_row_ordering():
    tags = sorted(["non_parametric_test", "parametric_test", "quantitative_analysis", "statistical_test"])
    assert tags == ["non_parametric_test", "parametric_test", "quantitative_analysis", "statistical_test"]
    verdicts = {
        "quantitative_analysis": "positive",
        "statistical_test": "positive",
        "non_parametric_test": "positive",
        "parametric_test": "negative",
    }
    out = emit_csv([_result("p1", "EMSE", 2015, verdicts=verdicts)], tags)
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["paper_id", "journal", "year", "words", "status"] + tags
    assert rows[1] == ["p1", "EMSE", "2015", "5000", "analyzed", "positive", "negative", "positive", "positive"]


def test_emit_csv_shapes_and_empty_cells():
    tags = ["ta", "tb"]
    results = [
        _result("p1", "J", 2001, verdicts={"ta": "positive", "tb": "none"}),
        _result("p2", "J", 2001, status="skipped_short", words=10),
    ]
    out = emit_csv(results, tags)
    rows = list(csv.reader(io.StringIO(out)))
    assert all(len(r) == 5 + len(tags) for r in rows)
    assert rows[2][5:] == ["", ""]
    assert out.endswith("\r\n")


def test_emit_csv_rfc4180_quoting():
    out = emit_csv([_result("p1", 'Jour,nal "X"', 2001, verdicts={})], [])
    assert '"Jour,nal ""X"""' in out


def test_aggregate_arithmetic():
    results = [
        _result(f"p{i}", "EMSE", 2015, verdicts={"non_parametric_test": "positive" if i < 4 else "none"})
        for i in range(10)
    ]
    (row,) = aggregate(results)
    assert row.papers_total == 10 and row.papers_analyzed == 10
    assert row.positives["non_parametric_test"] == 4
    assert row.scores["non_parametric_test"] == 0.4


def test_aggregate_degenerate_cell():
    results = [_result("p1", "J", 2001, status="excluded_secondary")]
    (row,) = aggregate(results)
    assert row.papers_total == 1 and row.papers_analyzed == 0
    assert all(v == 0.0 for v in row.scores.values())


def test_aggregate_row_per_journal_year():
    results = [
        _result(f"p{j}{y}", j, y)
        for j in ("A", "B", "C")
        for y in (2001, 2002)
    ]
    rows = aggregate(results)
    assert [(r.journal, r.year) for r in rows] == [
        ("A", 2001), ("A", 2002), ("B", 2001), ("B", 2002), ("C", 2001), ("C", 2002)
    ]


def _write_corpus(tmp_path: Path, texts: dict[str, str]) -> Path:
    docs = tmp_path / "docs"
    docs.mkdir(exist_ok=True)
    rows = ["paper_id,journal,year,path"]
    for i, (pid, text) in enumerate(texts.items()):
        (docs / f"{pid}.txt").write_text(text, encoding="utf-8")
        rows.append(f"{pid},EMSE,{2010 + i % 3},docs/{pid}.txt")
    manifest = tmp_path / "manifest.csv"
    manifest.write_text("\n".join(rows) + "\n", encoding="utf-8")
    return manifest


def test_run_corpus_isolates_per_paper_errors(bundle, tmp_path):
    manifest = _write_corpus(tmp_path, {"ok": "We used a Student's t-test. " + " ".join(filler(80))})
    metas = load_manifest(manifest) + [SourceMeta("missing", "J", 2011, str(tmp_path / "nope.txt"))]
    rows = run_corpus(metas, bundle, RunConfig(short_threshold=10), jobs=1)
    assert rows[0][3] is None
    assert rows[1][1] is None and "missing" in rows[1][3]


def test_cli_classify_end_to_end(bundle, tmp_path):
    texts = {
        "pos": "We used a Student's t-test for the comparison. " + " ".join(filler(120, seed=1)),
        "neg": "we have not conducted an effect size analysis on the data and results "
               + " ".join(filler(120, seed=2)),
        "plain": " ".join(filler(120, seed=3)),
        "short": "too small",
    }
    manifest = _write_corpus(tmp_path, texts)
    out = tmp_path / "out"
    rc = main([
        "classify", "--manifest", str(manifest), "--analyzers", str(ANALYZER_DIR),
        "--out", str(out), "--short-threshold", "50",
    ])
    assert rc == 0
    rows = list(csv.reader((out / "results.csv").open()))
    header = rows[0]
    tags = tag_universe(bundle)
    assert header == ["paper_id", "journal", "year", "words", "status"] + tags
    by_id = {r[0]: r for r in rows[1:]}
    assert [r[0] for r in rows[1:]] == ["pos", "neg", "plain", "short"]  # manifest order
    assert by_id["pos"][header.index("parametric_test")] == "positive"
    assert by_id["neg"][header.index("effect_size")] == "negative"
    assert by_id["plain"][header.index("parametric_test")] == "none"
    assert by_id["short"][4] == "skipped_short" and by_id["short"][5:] == [""] * len(tags)
    assert (out / "reports" / "pos.txt").exists()
    agg = (out / "aggregates.csv").read_text()
    assert agg.splitlines()[0].startswith("journal,year,papers_total,papers_analyzed")


def test_cli_aggregate_matches_classify_output(bundle, tmp_path):
    texts = {"a": "We used a Student's t-test. " + " ".join(filler(100, seed=4)),
             "b": " ".join(filler(100, seed=5))}
    manifest = _write_corpus(tmp_path, texts)
    out = tmp_path / "out"
    assert main(["classify", "--manifest", str(manifest), "--analyzers", str(ANALYZER_DIR),
                 "--out", str(out), "--short-threshold", "50"]) == 0
    import contextlib
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        assert main(["aggregate", "--results", str(out / "results.csv")]) == 0
    assert buf.getvalue().replace("\r\n", "\n") == (out / "aggregates.csv").read_text().replace("\r\n", "\n")


def test_cli_converter_template(tmp_path):
    texts = {"c": "placeholder"}
    manifest = _write_corpus(tmp_path, texts)
    real = tmp_path / "docs" / "c.txt"
    real.write_text("We used a Student's t-test today. " + " ".join(filler(100, seed=6)), encoding="utf-8")
    out = tmp_path / "out"
    rc = main([
        "classify", "--manifest", str(manifest), "--analyzers", str(ANALYZER_DIR),
        "--out", str(out), "--short-threshold", "50", "--converter", "cat {input}",
    ])
    assert rc == 0
    rows = list(csv.reader((out / "results.csv").open()))
    assert rows[1][4] == "analyzed"


def test_cli_partial_failure_exit_code(tmp_path):
    manifest = tmp_path / "manifest.csv"
    manifest.write_text(
        "paper_id,journal,year,path\ngone,EMSE,2011,missing.txt\n", encoding="utf-8"
    )
    out = tmp_path / "out"
    rc = main(["classify", "--manifest", str(manifest), "--analyzers", str(ANALYZER_DIR), "--out", str(out)])
    assert rc == 2
    assert (out / "errors.csv").exists()


def test_cli_config_error_exit_code(tmp_path):
    rc = main(["classify", "--manifest", str(tmp_path / "nope.csv"), "--analyzers", str(ANALYZER_DIR)])
    assert rc == 1
    rc = main(["check-analyzers", "--analyzers", str(tmp_path)])
    assert rc == 1


def test_cli_check_analyzers_and_report(capsys, tmp_path):
    assert main(["check-analyzers", "--analyzers", str(ANALYZER_DIR)]) == 0
    captured = capsys.readouterr().out
    assert "students_t_test" in captured and "analyzers OK" in captured

    paper = tmp_path / "solo.txt"
    paper.write_text("We used a Student's t-test. " + " ".join(filler(100, seed=7)), encoding="utf-8")
    assert main(["report", str(paper), "--analyzers", str(ANALYZER_DIR), "--short-threshold", "50"]) == 0
    report = capsys.readouterr().out
    assert "paper: solo" in report
    assert "students_t_test" in report


def test_jobs_parity_mini(bundle, tmp_path):
    texts = {
        f"p{i}": f"We used a Student's t-test in run {i}. " + " ".join(filler(90, seed=10 + i))
        for i in range(6)
    }
    manifest = _write_corpus(tmp_path, texts)
    metas = load_manifest(manifest)
    config = RunConfig(short_threshold=20)
    seq = run_corpus(metas, bundle, config, jobs=1)
    par = run_corpus(metas, bundle, config, jobs=3)
    assert [r[1] for r in seq] == [r[1] for r in par]
    assert [r[2] for r in seq] == [r[2] for r in par]


def test_aggregate_positive_counts_match_csv_cells():
    results = [
        _result("p1", "A", 2001, verdicts={"ta": "positive", "tb": "negative"}),
        _result("p2", "A", 2001, verdicts={"ta": "positive", "tb": "positive"}),
        _result("p3", "A", 2001, status="skipped_short", words=5),
        _result("p4", "B", 2002, verdicts={"ta": "none", "tb": "positive"}),
    ]
    tags = ["ta", "tb"]
    csv_rows = list(csv.reader(io.StringIO(emit_csv(results, tags))))[1:]
    for row in aggregate(results):
        cell_rows = [r for r in csv_rows if r[1] == row.journal and int(r[2]) == row.year]
        csv_positive = sum(r[5:].count("positive") for r in cell_rows)
        assert sum(row.positives.values()) == csv_positive
        assert row.papers_total == len(cell_rows)


def test_aggregates_csv_score_formatting():
    results = [
        _result(f"p{i}", "J", 2001, verdicts={"ta": "positive" if i == 0 else "none"})
        for i in range(3)
    ]
    text = aggregates_csv(aggregate(results), ["ta"])
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["journal", "year", "papers_total", "papers_analyzed", "ta_positive", "ta_score"]
    assert rows[1] == ["J", "2001", "3", "3", "1", "0.333333"]
