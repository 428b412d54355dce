import logging
import os

from dotenv import load_dotenv

from src.errors import DataError

load_dotenv()

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def _int_env(name, default, minimum=None):
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError as exc:
        raise DataError(f"{name} must be an integer, got {raw!r}") from exc
    if minimum is not None and value < minimum:
        raise DataError(f"{name} must be >= {minimum}, got {value}")
    return value


def get_workers():
    """Worker processes for sweeps (ABLATE_WORKERS, default 1)."""
    return _int_env("ABLATE_WORKERS", 1, minimum=1)


def get_default_top_k():
    """Default k for top-k accuracy (ABLATE_TOP_K, default 5)."""
    return _int_env("ABLATE_TOP_K", 5, minimum=1)


def get_eval_batch_size():
    """Images per forward chunk during evaluation."""
    return _int_env("ABLATE_EVAL_BATCH_SIZE", 256, minimum=1)


def get_default_seed():
    return _int_env("ABLATE_SEED", 0, minimum=0)


def get_log_level():
    return os.getenv("ABLATE_LOG_LEVEL", "WARNING").upper()


def get_reference_manifest_path():
    """Path of the frozen reference desk manifest."""
    return os.getenv("ABLATE_MANIFEST", "data/manifests/desk.json")


def get_models_dir():
    return os.getenv("ABLATE_MODELS_DIR", "data/models")


def configure_logging(level=None):
    """Install the root handler. Only entry points call this."""
    level = (level or get_log_level()).upper()
    logging.basicConfig(level=level, format=LOG_FORMAT, force=True)
