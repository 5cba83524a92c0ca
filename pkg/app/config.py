import logging
import os

# Defaults for the engine; environment variables override the deployment keys
SETTINGS = {
    "service_name": "Periodic Ramsey Colorings",
    "database_url": os.environ.get("RAMSEY_DB_URL", "sqlite:///./ramsey_colorings.db"),
    "data_dir": os.environ.get("RAMSEY_DATA_DIR", "./colorings"),
    "threads": int(os.environ.get("RAMSEY_THREADS", os.cpu_count() or 1)),
    "log_level": os.environ.get("RAMSEY_LOG_LEVEL", "INFO"),
    "construction": {
        "t": 1.0 / 3.0,
        "tie_tol": 1e-9,
        "dart_batch": 8192,
        "max_darts": 2_000_000,
        "failure_factor": 10_000,  # consecutive dart failures per accepted point
        "refine_depth": 10,
        "grid_chunk": 1 << 18,
    },
    "search": {
        "chunk_size": 4096,
        "m_max": 1024,
        "exact_1d_m_max": 1_000_000,
        "red_trials": 1_000_000,
        "blue_trials": 10_000,
        "probability_trials": 10_000,
        "density_samples": 100_000,
    },
}

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level=None):
    """Configure root logging once; logs go to stderr"""
    logging.basicConfig(level=(level or SETTINGS["log_level"]).upper(), format=LOG_FORMAT)


def default_workers() -> int:
    return max(1, SETTINGS["threads"])
