"""
CSV output generator for verification reports.
"""
import os
from typing import List, Optional

import pandas as pd
from loguru import logger

from config.settings import OUTPUT_DIR, REPORT_CSV_FILENAME
from core.verification.report import Report

COLUMNS = [
    "check_id",
    "status",
    "instances",
    "violations",
    "complete",
    "description",
    "first_violation",
    "notes",
]


def report_frame(report: Report, include_timing: bool = True) -> pd.DataFrame:
    """One row per check result, in report order."""
    rows = []
    for result in report.results:
        row = {
            "check_id": result.check_id,
            "status": result.status.value,
            "instances": result.instances,
            "violations": result.violation_count,
            "complete": result.complete,
            "description": result.description,
            "first_violation": result.counterexamples[0]["message"] if result.counterexamples else "",
            "notes": "; ".join(result.notes),
        }
        if include_timing:
            row["elapsed_seconds"] = round(result.elapsed_seconds, 6)
        rows.append(row)
    columns: List[str] = COLUMNS + (["elapsed_seconds"] if include_timing else [])
    return pd.DataFrame(rows, columns=columns)


class CSVGenerator:
    """
    Generate CSV output from verification reports.

    Features:
    - One row per check with status, counts and the first counterexample
    - Column order fixed, row order the report's canonical order
    - Save CSV to file or return it as text
    """

    def __init__(self, filename: Optional[str] = None):
        """
        Initialize CSV generator.

        Args:
            filename: Output filename (default from config)
        """
        self.filename = filename or os.path.join(OUTPUT_DIR, REPORT_CSV_FILENAME)
        logger.debug(f"CSV Generator initialized with output file: {self.filename}")

    def render(self, report: Report, include_timing: bool = True) -> str:
        return report_frame(report, include_timing).to_csv(index=False)

    def generate_csv(self, report: Report, include_timing: bool = True) -> str:
        """
        Write the report as CSV.

        Returns:
            Path to generated CSV file, or "" on failure
        """
        try:
            directory = os.path.dirname(self.filename)
            if directory:
                os.makedirs(directory, exist_ok=True)
            report_frame(report, include_timing).to_csv(self.filename, index=False)
            logger.info(f"Successfully generated CSV output: {self.filename} ({len(report.results)} rows)")
            return self.filename
        except OSError as e:
            logger.error(f"Error generating CSV: {str(e)}")
            return ""
