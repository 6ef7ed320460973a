import os
from pathlib import Path
from dotenv import load_dotenv

load_dotenv()

BASE_DIR = Path(__file__).resolve().parent.parent
FIXTURE_DIR = BASE_DIR / "lstab" / "fixtures"

DEFAULT_SEED = int(os.getenv("LSTAB_SEED", "0"))
WORKERS = int(os.getenv("LSTAB_WORKERS", "1"))
EXTERNAL_TIMEOUT = float(os.getenv("LSTAB_EXTERNAL_TIMEOUT", "60"))

LOG_LEVEL = os.getenv("LSTAB_LOG_LEVEL", "WARNING")
LOG_CONFIG = Path(os.getenv("LSTAB_LOG_CONFIG", str(BASE_DIR / "lstab" / "logging.ini")))

# Draws per vectorised rejection-sampling round.
REJECTION_CHUNK = int(os.getenv("LSTAB_REJECTION_CHUNK", "8192"))

# Engine defaults
CONSTRUCTION_SAMPLES_PER_ITER = 20_000
CONSTRUCTION_BUDGET_TOTAL = 750_455
MAX_ITERATIONS = 20
ETA = 0.01
DELTA = 0.05
ALPHA_TARGET = 0.05
TAU_V = 0.05
VOLUME_SAMPLES = 100_000
REJECTION_MAX_TRIES = 1_000
RC_REDUCTION_SAMPLES = 1_000
BINARY_SEARCH_STEPS = 1024

DENSE_REGION_SAMPLES = 20_000

# Percentage of each attribute range used when an RC spec is just `pct`.
DEFAULT_RC_PCT = 5.0
