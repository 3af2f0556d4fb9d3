"""
Configuration settings for the hmf-theta engine
"""
import os
from pathlib import Path
from typing import List
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


def _default_cache_dir() -> str:
    return str(Path.home() / ".cache" / "hmf-theta")


class Settings:
    """Engine settings"""

    APP_NAME: str = "hmf-theta"
    APP_VERSION: str = "1.0.0"

    def __init__(self):
        self.DEBUG: bool = os.getenv("DEBUG", "false").lower() == "true"

        # Cache Settings
        self.CACHE_DIR: str = os.getenv("HMF_CACHE_DIR", _default_cache_dir())

        # Arithmetic
        self.DEFAULT_FIELD: int = int(os.getenv("HMF_DEFAULT_FIELD", "2"))

        # Analytic evaluation
        self.EVAL_FLOOR: float = float(os.getenv("HMF_EVAL_FLOOR", "0.5"))
        self.PRECISION: int = int(os.getenv("HMF_PRECISION", "12"))
        self.MAX_LOWER_ENTRY: float = float(os.getenv("HMF_MAX_LOWER_ENTRY", "2500"))

        # Execution
        self.THREADS: int = int(os.getenv("HMF_THREADS", "1"))
        self.LOG_LEVEL: str = os.getenv("HMF_LOG_LEVEL", "WARNING").upper()

    @property
    def cache_enabled(self) -> bool:
        return bool(self.CACHE_DIR)

    def validate_settings(self) -> List[str]:
        """Return the names of settings holding unusable values"""
        invalid = []

        if self.EVAL_FLOOR <= 0:
            invalid.append("HMF_EVAL_FLOOR")
        if not 4 <= self.PRECISION <= 60:
            invalid.append("HMF_PRECISION")
        if self.THREADS < 1:
            invalid.append("HMF_THREADS")
        if self.MAX_LOWER_ENTRY <= 1:
            invalid.append("HMF_MAX_LOWER_ENTRY")

        return invalid


# Global settings instance
settings = Settings()


def get_settings() -> Settings:
    """Get engine settings"""
    return settings
