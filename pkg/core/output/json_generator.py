"""
JSON output generator for verification reports and construction dumps.
"""
import json
import os
from typing import Any, Dict, Optional

import numpy as np
from loguru import logger

from config.settings import OUTPUT_DIR, REPORT_JSON_FILENAME
from core.verification.report import Report
from utils.helpers import to_jsonable


# Custom JSON encoder to handle numpy types
class NumpyEncoder(json.JSONEncoder):
    def default(self, obj):
        if isinstance(obj, np.integer):
            return int(obj)
        elif isinstance(obj, np.floating):
            return float(obj)
        elif isinstance(obj, np.ndarray):
            return obj.tolist()
        return super(NumpyEncoder, self).default(obj)


class JSONGenerator:
    """
    Generate JSON output from verification reports.

    Features:
    - {"metadata": ..., "checks": [...]} layout tagged with the report format
    - Sorted keys and no timing fields on request, for byte-identical reruns
    - Construction dumps with their provenance header
    - Save JSON to file or return it as text
    """

    def __init__(self, filename: Optional[str] = None):
        """
        Initialize JSON generator.

        Args:
            filename: Output filename (default from config)
        """
        self.filename = filename or os.path.join(OUTPUT_DIR, REPORT_JSON_FILENAME)
        logger.debug(f"JSON Generator initialized with output file: {self.filename}")

    @staticmethod
    def dumps(data: Any) -> str:
        return json.dumps(to_jsonable(data), indent=2, sort_keys=True, cls=NumpyEncoder) + "\n"

    def render(self, report: Report, include_timing: bool = True) -> str:
        return self.dumps(report.to_dict(include_timing=include_timing))

    def write(self, text: str) -> str:
        """
        Write rendered JSON to the output file.

        Returns:
            Path to the written file, or "" if it could not be written
        """
        try:
            directory = os.path.dirname(self.filename)
            if directory:
                os.makedirs(directory, exist_ok=True)
            with open(self.filename, "w") as f:
                f.write(text)
            logger.info(f"Successfully generated JSON output: {self.filename}")
            return self.filename
        except OSError as e:
            logger.error(f"Error writing JSON to {self.filename}: {str(e)}")
            return ""

    def generate_json(self, report: Report, include_timing: bool = True) -> str:
        return self.write(self.render(report, include_timing))

    def generate_dump(self, dump: Dict[str, Any]) -> str:
        return self.write(self.dumps(dump))
