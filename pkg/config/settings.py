"""
Configuration settings for the J-structure verification toolkit.
"""
import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Base directory
BASE_DIR = Path(__file__).resolve().parent.parent

# Output settings
OUTPUT_DIR = os.path.join(BASE_DIR, "output")
REPORT_JSON_FILENAME = os.getenv("REPORT_JSON_FILENAME", "verification_report.json")
REPORT_CSV_FILENAME = os.getenv("REPORT_CSV_FILENAME", "verification_report.csv")
FIXTURE_DIR = os.path.join(BASE_DIR, "fixtures")

# On-disk format tags
FIXTURE_FORMAT = "jcs-fixture/1"
REPORT_FORMAT = "jcs-report/1"
CONSTRUCT_FORMAT = "jcs-construct/1"
VERSION = "1.0.0"

# Enumeration bounds
CSYSTEM_LENGTH_BOUND = int(os.getenv("CSYSTEM_LENGTH_BOUND", "2"))
CSYSTEM_AXIOM_BOUND = int(os.getenv("CSYSTEM_AXIOM_BOUND", "3"))
CSYSTEM_SOURCE_BOUND = int(os.getenv("CSYSTEM_SOURCE_BOUND", "1"))
LIFTING_SET_BOUND = int(os.getenv("LIFTING_SET_BOUND", "4"))
CONDITION_CLAUSE_BOUND = int(os.getenv("CONDITION_CLAUSE_BOUND", "2"))
PULLBACK_PROBE_SIZE = int(os.getenv("PULLBACK_PROBE_SIZE", "1"))
CATEGORY_PROBE_SIZE = int(os.getenv("CATEGORY_PROBE_SIZE", "2"))

# Materialization and search limits
MAX_SET_SIZE = int(os.getenv("MAX_SET_SIZE", "64"))
MAX_CHECK_INSTANCES = int(os.getenv("MAX_CHECK_INSTANCES", "2000000"))
MAX_SEARCH_RESULTS = int(os.getenv("MAX_SEARCH_RESULTS", "100000"))
MAX_REPORTED_VIOLATIONS = int(os.getenv("MAX_REPORTED_VIOLATIONS", "20"))

# Parallel processing settings
MAX_THREADS = int(os.getenv("MAX_THREADS", "4"))

# Logging settings
LOG_DIR = os.path.join(BASE_DIR, "logs")
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
LOG_ROTATION = "1 day"
LOG_RETENTION = "1 month"

# Create directories if they don't exist
os.makedirs(OUTPUT_DIR, exist_ok=True)
os.makedirs(LOG_DIR, exist_ok=True)
