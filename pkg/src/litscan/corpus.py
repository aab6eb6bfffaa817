"""Corpus orchestration: run the full pipeline per paper and emit the
per-paper CSV plus journal-year aggregates.

Pipeline order per paper: short-text gate, then exclusion analyzers, then
(for surviving papers) all classification analyzers. Per-paper failures are
isolated so a batch run never aborts on one bad file.
"""

import csv
import io
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from .dsl import AnalyzerSpec
from .ingest import (
    DEFAULT_SHORT_THRESHOLD,
    STATUS_ANALYZED,
    STATUS_EXCLUDED_SECONDARY,
    DocumentText,
    SourceMeta,
    gate_short,
    load_document,
)
from .matching import MatchConfig, run_analyzer
from .report import render_report
from .scoring import (
    VERDICT_NONE,
    VERDICT_POSITIVE,
    AnalyzerEvidence,
    TagSummary,
    aggregate_tags,
    decide_exclusion,
    resolve_analyzer,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    match: MatchConfig = field(default_factory=MatchConfig)
    short_threshold: int = DEFAULT_SHORT_THRESHOLD
    converter: str | None = None


@dataclass(frozen=True)
class CorpusResult:
    meta: SourceMeta
    status: str
    tag_verdicts: dict[str, str]  # populated only for analyzed papers
    per_analyzer: dict[str, str]
    word_count: int


@dataclass(frozen=True)
class AggregateRow:
    journal: str
    year: int
    papers_total: int
    papers_analyzed: int
    positives: dict[str, int]
    scores: dict[str, float]


def tag_universe(bundle: list[AnalyzerSpec]) -> list[str]:
    return sorted({t for spec in bundle if spec.mode == "classify" for t in spec.tags})


def classify_paper(
    doc: DocumentText,
    bundle: list[AnalyzerSpec],
    config: RunConfig,
) -> tuple[CorpusResult, str]:
    """Classify one ingested document and render its report."""
    doc = gate_short(doc, config.short_threshold)
    evidences: list[AnalyzerEvidence] = []
    summaries: list[TagSummary] = []
    tag_verdicts: dict[str, str] = {}
    if doc.status == STATUS_ANALYZED:
        cache: dict = {}
        excluders = [s for s in bundle if s.mode == "exclude"]
        exclusion_evidence = [
            resolve_analyzer(run_analyzer(doc, s, config.match, cache), s) for s in excluders
        ]
        if decide_exclusion(exclusion_evidence):
            doc = replace(doc, status=STATUS_EXCLUDED_SECONDARY)
            evidences = exclusion_evidence
        else:
            classifiers = [s for s in bundle if s.mode == "classify"]
            class_evidence = [
                resolve_analyzer(run_analyzer(doc, s, config.match, cache), s) for s in classifiers
            ]
            summaries = aggregate_tags(class_evidence)
            tag_verdicts = {s.tag: s.verdict for s in summaries}
            evidences = exclusion_evidence + class_evidence
    result = CorpusResult(
        meta=doc.meta,
        status=doc.status,
        tag_verdicts=tag_verdicts,
        per_analyzer={ev.analyzer: ev.verdict for ev in evidences},
        word_count=doc.word_count,
    )
    return result, render_report(doc, evidences, summaries)


def classify_file(
    meta: SourceMeta,
    bundle: list[AnalyzerSpec],
    config: RunConfig,
) -> tuple[CorpusResult | None, str | None, str | None]:
    """Load and classify one paper; returns (result, report, error)."""
    try:
        doc = load_document(meta, config.converter)
    except Exception as exc:  # per-paper isolation: any load failure is recorded
        return None, None, f"{meta.paper_id}: {exc}"
    result, report = classify_paper(doc, bundle, config)
    return result, report, None


_WORKER_BUNDLE: list[AnalyzerSpec] | None = None
_WORKER_CONFIG: RunConfig | None = None


def _init_worker(bundle: list[AnalyzerSpec], config: RunConfig) -> None:
    global _WORKER_BUNDLE, _WORKER_CONFIG
    _WORKER_BUNDLE = bundle
    _WORKER_CONFIG = config


def _worker(meta: SourceMeta):
    return classify_file(meta, _WORKER_BUNDLE, _WORKER_CONFIG)


def run_corpus(
    metas: list[SourceMeta],
    bundle: list[AnalyzerSpec],
    config: RunConfig,
    jobs: int = 1,
) -> list[tuple[SourceMeta, CorpusResult | None, str | None, str | None]]:
    """Classify every manifest paper, preserving manifest order in the
    returned list regardless of worker count."""
    rows = []
    if jobs <= 1:
        for meta in metas:
            result, report, error = classify_file(meta, bundle, config)
            rows.append((meta, result, report, error))
        return rows
    with ProcessPoolExecutor(
        max_workers=jobs, initializer=_init_worker, initargs=(bundle, config)
    ) as pool:
        for meta, (result, report, error) in zip(metas, pool.map(_worker, metas)):
            rows.append((meta, result, report, error))
    return rows


def emit_csv(results: list[CorpusResult], tags: list[str]) -> str:
    """Per-paper results as RFC-4180 CSV; tag cells are empty for papers
    that were not analyzed."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(["paper_id", "journal", "year", "words", "status"] + list(tags))
    for r in results:
        if r.status == STATUS_ANALYZED:
            cells = [r.tag_verdicts.get(t, VERDICT_NONE) for t in tags]
        else:
            cells = ["" for _ in tags]
        writer.writerow([r.meta.paper_id, r.meta.journal, r.meta.year, r.word_count, r.status] + cells)
    return buf.getvalue()


def aggregate(results: list[CorpusResult]) -> list[AggregateRow]:
    """One row per (journal, year): paper counts, per-tag positive counts,
    and the positive count normalized by analyzed papers."""
    tags = sorted({t for r in results for t in r.tag_verdicts})
    cells: dict[tuple[str, int], list[CorpusResult]] = {}
    for r in results:
        cells.setdefault((r.meta.journal, r.meta.year), []).append(r)
    rows = []
    for journal, year in sorted(cells):
        group = cells[(journal, year)]
        analyzed = [r for r in group if r.status == STATUS_ANALYZED]
        positives = {
            t: sum(1 for r in analyzed if r.tag_verdicts.get(t) == VERDICT_POSITIVE) for t in tags
        }
        scores = {
            t: (positives[t] / len(analyzed) if analyzed else 0.0) for t in tags
        }
        rows.append(
            AggregateRow(
                journal=journal,
                year=year,
                papers_total=len(group),
                papers_analyzed=len(analyzed),
                positives=positives,
                scores=scores,
            )
        )
    return rows


def aggregates_csv(rows: list[AggregateRow], tags: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    header = ["journal", "year", "papers_total", "papers_analyzed"]
    for t in tags:
        header += [f"{t}_positive", f"{t}_score"]
    writer.writerow(header)
    for row in rows:
        cells = [row.journal, row.year, row.papers_total, row.papers_analyzed]
        for t in tags:
            cells += [row.positives.get(t, 0), format(row.scores.get(t, 0.0), ".6g")]
        writer.writerow(cells)
    return buf.getvalue()
