import os
from typing import Final

from pydantic import BaseModel, ConfigDict, Field, field_validator

KEEP_ARTIFACTS_ENV: Final[str] = "CHAOSMARK_KEEP_ARTIFACTS"
LOG_LEVEL_ENV: Final[str] = "CHAOSMARK_LOG_LEVEL"
WORKERS_ENV: Final[str] = "CHAOSMARK_WORKERS"

TRUTHY: Final = frozenset({"1", "true", "yes", "on"})


class Settings(BaseModel):
    """Process-wide settings read from the environment."""

    model_config = ConfigDict(frozen=True)

    keep_artifacts: bool = False
    workers: int = Field(default=1, ge=1)

    @field_validator("keep_artifacts", mode="before")
    @classmethod
    def parse_flag(cls, v: object) -> bool:
        if isinstance(v, str):
            return v.strip().lower() in TRUTHY
        return bool(v)


def load_settings() -> Settings:
    return Settings(
        keep_artifacts=os.getenv(KEEP_ARTIFACTS_ENV, ""),
        workers=os.getenv(WORKERS_ENV, "1"),
    )
