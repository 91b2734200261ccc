"""Environment configuration and logging setup"""
import logging
import os

from dotenv import load_dotenv

REPO_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

_LOADED = False


def load_environment_variables():
    """Load environment variables from .env file once"""
    global _LOADED
    if not _LOADED:
        load_dotenv()
        _LOADED = True


def seed_override():
    """STYLE_TOKENS_SEED as an int, or None when unset"""
    load_environment_variables()
    value = os.getenv("STYLE_TOKENS_SEED")
    if value is None or value.strip() == "":
        return None
    try:
        return int(value)
    except ValueError:
        raise ValueError(f"STYLE_TOKENS_SEED must be an integer, got {value!r}")


def resolve_seed(seed):
    override = seed_override()
    return override if override is not None else seed


def log_level():
    load_environment_variables()
    return os.getenv("STYLE_TOKENS_LOG_LEVEL", "INFO").upper()


def data_dir():
    load_environment_variables()
    return os.getenv("STYLE_TOKENS_DATA_DIR", os.path.join(REPO_DIR, "data"))


def db_path():
    load_environment_variables()
    return os.getenv("STYLE_TOKENS_DB", os.path.join(data_dir(), "runs.db"))


def configure_logging(level=None):
    logging.basicConfig(
        level=level or log_level(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
