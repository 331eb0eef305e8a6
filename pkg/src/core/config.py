from typing import Annotated
import logging

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Settings for the unexpectedness engine."""

    model_config = SettingsConfigDict(env_file=".env", extra="ignore")

    log_level: Annotated[str, Field(default="INFO", description="The logging level for the application.")]
    max_sequence_atoms: Annotated[int, Field(default=8, ge=1, description="Largest atom count enumerate_sequences accepts.")]
    max_component_atoms: Annotated[int, Field(default=16, ge=1, description="Largest interaction component min_cost minimises over subsets.")]
    max_hypotheses: Annotated[int, Field(default=6, ge=0, description="Largest number of candidate causal hypotheses per scenario.")]
    oracle_budget_bits: Annotated[float, Field(default=48.0, gt=0, description="Default cost budget of the exhaustive program search.")]
    oracle_max_length: Annotated[int, Field(default=8, ge=1, description="Longest target string the exhaustive program search accepts.")]
    oracle_check_max_length: Annotated[int, Field(default=5, ge=1, description="Longest string length the oracle-check sweep accepts.")]

    @classmethod
    def configure_logging(cls, level: str = "INFO"):
        """Configures the logging for the application."""
        logging.basicConfig(
            level=level,
            format="%(asctime)s - %(levelname)s - %(module)s - %(message)s",
            datefmt="%Y-%m-%d %H:%M:%S"
        )

        # Add color-coding to log levels
        logging.addLevelName(logging.DEBUG, "\033[0;34m%s\033[0m" % "DEBUG")
        logging.addLevelName(logging.INFO, "\033[0;32m%s\033[0m" % "INFO")
        logging.addLevelName(logging.WARNING, "\033[0;33m%s\033[0m" % "WARNING")
        logging.addLevelName(logging.ERROR, "\033[0;31m%s\033[0m" % "ERROR")
        logging.addLevelName(logging.CRITICAL, "\033[0;31m%s\033[0m" % "CRITICAL")
