import os

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # Execution Settings
    threads: int = Field(default_factory=lambda: os.cpu_count() or 1, description="Worker threads for claim checks")
    default_n: int = Field(3, description="Default number of V_1 tensor factors")
    default_depth: int = Field(5, description="Default highest weight level checked")

    # Specialization Settings
    seed_mu0_floor: int = Field(20, description="Lowest mu0 drawn by seeded specialization")
    max_redraws: int = Field(5, description="Attempts at drawing a non-degenerate specialization point")

    # Logging Settings
    log_level: str = Field("WARNING", description="Logging level (DEBUG, INFO, WARNING, ERROR)")
    log_json: bool = Field(False, description="Enable JSON logging")

    model_config = SettingsConfigDict(env_file=".env", env_prefix="QJW_", extra="ignore")


settings = Settings()
