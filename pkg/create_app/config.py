import os

import dotenv

dotenv.load_dotenv()


def _env_flag(name: str, default: str) -> bool:
    return os.environ.get(name, default).strip().lower() in ("1", "true", "yes")


class Config:
    # The only environment override of an experiment file: where its
    # artifacts are written.
    CBVF_OUTPUT_DIR = os.environ.get("CBVF_OUTPUT_DIR")
    CBVF_LOG_LEVEL = os.environ.get("CBVF_LOG_LEVEL", "INFO").upper()
    # Reuse value functions already solved into the output directory.
    CBVF_CACHE_SOLVES = _env_flag("CBVF_CACHE_SOLVES", "1")
