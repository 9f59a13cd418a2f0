"""
报告渲染
把审计报告、排名比较和标签冲突渲染为 json / csv / markdown 文本
"""

import csv
import io
import json
from typing import Any, List, Sequence, Union

from data_structures.results import ConflictReport
from evaluation.audit_report import AuditReport, NOT_AVAILABLE
from evaluation.rank_comparison import RankComparison
from utils.exceptions import ParameterError


RENDER_FORMATS = ("json", "csv", "markdown")

AUDIT_CSV_COLUMNS = (
    "corpus", "n_posts",
    "n_distinct_raw", "ratio_distinct_raw",
    "n_distinct_normalized", "ratio_distinct_normalized",
    "n_distinct_after_neardup", "ratio_distinct_after_neardup",
    "mean_tokens", "duplicate_clusters", "conflicting_clusters", "approximate",
)

AUDIT_MARKDOWN_HEADER = (
    "Dataset", "# of Post", "# of Distinct / Ratio %", "# of Distinct after Pre-proc. / Ratio %",
    "# of Distinct after Removing Near-Dupli. / Ratio %", "Mean Tokens",
)

APPROXIMATE_BANNER = ("> **Approximate**: near-duplicate candidates were pruned with a MinHash prefilter; "
                      "near-duplicate counts may be overestimated.")
MINOR_REDUCTION_MARK = "†"
MINOR_REDUCTION_LEGEND = f"{MINOR_REDUCTION_MARK} reduction below 0.1% of posts"

Renderable = Union[AuditReport, Sequence[AuditReport], RankComparison]


def render_report(report: Renderable, file_format: str = "markdown") -> str:
    """
    渲染报告

    Args:
        report: 单个或多个 AuditReport，或 RankComparison
        file_format: json / csv / markdown
    """
    if file_format not in RENDER_FORMATS:
        raise ParameterError("format", file_format, " / ".join(RENDER_FORMATS))

    if isinstance(report, RankComparison):
        renderers = {'json': _rank_json, 'csv': _rank_csv, 'markdown': _rank_markdown}
        return renderers[file_format](report)

    reports = [report] if isinstance(report, AuditReport) else list(report)
    renderers = {'json': _audit_json, 'csv': _audit_csv, 'markdown': _audit_markdown}
    return renderers[file_format](reports)


def _audit_json(reports: List[AuditReport]) -> str:
    payload: Any = reports[0].to_dict() if len(reports) == 1 else [r.to_dict() for r in reports]
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def _audit_csv(reports: List[AuditReport]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(AUDIT_CSV_COLUMNS)
    for report in reports:
        row = report.to_dict()
        writer.writerow(["" if row[column] is None else _csv_value(row[column]) for column in AUDIT_CSV_COLUMNS])
    return buffer.getvalue()


def _csv_value(value: Any) -> Any:
    if isinstance(value, bool):
        return "true" if value else "false"
    return value


def _count_cell(count: int, ratio: str, minor: bool = False) -> str:
    cell = f"{count:,} / {ratio}"
    return f"{cell} {MINOR_REDUCTION_MARK}" if minor else cell


def _audit_markdown(reports: List[AuditReport]) -> str:
    lines = []
    if any(report.approximate for report in reports):
        lines.extend([APPROXIMATE_BANNER, ""])

    lines.append(_markdown_row(AUDIT_MARKDOWN_HEADER))
    lines.append(_markdown_row(["---"] + ["---:"] * (len(AUDIT_MARKDOWN_HEADER) - 1)))
    for report in reports:
        minor = report.minor_reduction_stages
        lines.append(_markdown_row([
            _escape(report.corpus),
            f"{report.n_posts:,}",
            _count_cell(report.n_distinct_raw, report.ratio_distinct_raw,
                        "distinct_raw" in minor),
            _count_cell(report.n_distinct_normalized, report.ratio_distinct_normalized,
                        "distinct_normalized" in minor),
            _count_cell(report.n_distinct_after_neardup, report.ratio_distinct_after_neardup,
                        "distinct_after_neardup" in minor),
            str(report.mean_tokens),
        ]))
    if any(report.minor_reduction_stages for report in reports):
        lines.extend(["", MINOR_REDUCTION_LEGEND])

    lines.append("")
    for report in reports:
        near = report.near_dup
        setting = (f"threshold {near.get('threshold')}" if near.get("mode", "absolute") == "absolute"
                   else f"ratio {near.get('ratio')}")
        lines.append(f"- {_escape(report.corpus)}: duplicate clusters {report.duplicate_clusters:,}, "
                     f"conflicting clusters {report.conflicting_clusters:,}, near-duplicate {setting}")
    return "\n".join(lines) + "\n"


def _rank_json(comparison: RankComparison) -> str:
    return json.dumps(comparison.to_dict(), indent=2, ensure_ascii=False) + "\n"


def _rank_csv(comparison: RankComparison) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["rank", f"name_{comparison.label_a}", f"score_{comparison.label_a}",
                     f"name_{comparison.label_b}", f"score_{comparison.label_b}", "unchanged"])
    for row in comparison.rows():
        writer.writerow([row['rank'], row['name_a'], row['score_a'], row['name_b'], row['score_b'],
                         _csv_value(row['unchanged'])])
    return buffer.getvalue()


def _rank_markdown(comparison: RankComparison) -> str:
    lines = [
        _markdown_row(["Rank", _escape(comparison.label_a), _escape(comparison.label_b), "Unchanged"]),
        _markdown_row(["---:", "---", "---", ":---:"]),
    ]
    for row in comparison.rows():
        lines.append(_markdown_row([
            str(row['rank']),
            f"{_escape(row['name_a'])} ({row['score_a']:.2f})",
            f"{_escape(row['name_b'])} ({row['score_b']:.2f})",
            "yes" if row['unchanged'] else "no",
        ]))
    lines.append("")
    lines.append(f"Same order: {'yes' if comparison.same_order else 'no'}")
    return "\n".join(lines) + "\n"


def render_conflict_table(reports: Sequence[ConflictReport]) -> str:
    """标签冲突的 markdown 表格，每个冲突簇一行"""
    lines = [
        _markdown_row(["#", "Comparison key", "Members (id: label)", "Distinct labels"]),
        _markdown_row(["---:", "---", "---", "---:"]),
    ]
    for index, report in enumerate(reports, start=1):
        members = ", ".join(f"{_escape(i)}: {_escape(l) if l is not None else NOT_AVAILABLE}"
                            for i, l in zip(report.member_ids, report.member_labels))
        lines.append(_markdown_row([str(index), _escape(report.key), members, str(report.distinct_label_count)]))
    return "\n".join(lines) + "\n"


def _markdown_row(cells: Sequence[str]) -> str:
    return "| " + " | ".join(cells) + " |"


def _escape(text: str) -> str:
    return str(text).replace("\\", "\\\\").replace("|", "\\|").replace("\r", " ").replace("\n", " ")
