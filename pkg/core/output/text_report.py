"""
Human-readable rendering of verification reports.
"""
import pandas as pd

from core.output.csv_generator import report_frame
from core.verification.report import Report

TEXT_COLUMNS = ["check_id", "status", "instances", "violations", "complete", "description"]


def summary_line(report: Report) -> str:
    summary = report.summary()
    verdict = "PASS" if report.passed else "FAIL"
    line = (f"{verdict}: {report.fixture} [{report.suite}] {summary['total']} checks, "
            f"{summary['pass']} passed, {summary['fail']} failed, {summary['skipped']} skipped")
    if summary["incomplete"]:
        line += f", {summary['incomplete']} incomplete"
    return line


def render_text(report: Report, include_timing: bool = True) -> str:
    """The check table, then the first counterexample of every failed check, then the summary line."""
    frame = report_frame(report, include_timing)
    columns = TEXT_COLUMNS + (["elapsed_seconds"] if include_timing else [])
    with pd.option_context("display.max_colwidth", 80, "display.width", 200):
        table = frame[columns].to_string(index=False) if not frame.empty else "(no checks)"
    lines = [table, ""]
    for result in report.results:
        if result.failed:
            lines.append(f"{result.check_id}: {result.violation_count} violation(s)")
            for counterexample in result.counterexamples[:3]:
                lines.append(f"  - {counterexample['message']}")
    lines.append(summary_line(report))
    return "\n".join(lines) + "\n"
