import os
from dotenv import load_dotenv

load_dotenv()

# Logging
LOG_LEVEL = os.getenv("LAB_LOG_LEVEL", "INFO")

# Results database
DATABASE_PATH = os.getenv("LAB_DATABASE_PATH", "lab_results.db")

# Experiment scale
EPISODES = int(os.getenv("LAB_EPISODES", "3000"))
STEP_CAP = int(os.getenv("LAB_STEP_CAP", "100000"))
SEEDS = os.getenv("LAB_SEEDS", "1..30")

# Parallel runs - 1 runs everything in the calling process
WORKERS = int(os.getenv("LAB_WORKERS", "1"))

# Network and rehearsal
HIDDEN_WIDTH = int(os.getenv("LAB_HIDDEN_WIDTH", "16"))
BATCH_ITERATIONS = int(os.getenv("LAB_BATCH_ITERATIONS", "200"))

# Weights beyond this magnitude mark a run as diverged
DIVERGENCE_THRESHOLD = 1e12

# Episodes between progress log lines
PROGRESS_EVERY = 100
