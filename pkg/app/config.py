"""
Application Configuration
"""
from pydantic_settings import BaseSettings, SettingsConfigDict
from typing import List


class Settings(BaseSettings):
    """Application settings loaded from environment variables"""

    model_config = SettingsConfigDict(env_file=".env", case_sensitive=True, extra="ignore")

    # API
    API_V1_PREFIX: str = "/api/v1"
    PROJECT_NAME: str = "Stratmon API"
    DEBUG: bool = False
    ALLOWED_ORIGINS: str = "*"
    RATE_LIMIT_VERIFY: str = "30/minute"

    @property
    def CORS_ORIGINS(self) -> List[str]:
        """Parse CORS origins from string"""
        if self.ALLOWED_ORIGINS == "*":
            return ["*"]
        return [origin.strip() for origin in self.ALLOWED_ORIGINS.split(",")]

    # Logging
    LOG_LEVEL: str = "INFO"

    # Model limits
    MAX_MODEL_STATES: int = 10000

    # Pipeline
    MAX_CANDIDATES: int = 256
    TRACE_LENGTH: int = 32  # default simulation steps
    MONITOR_CACHE_SIZE: int = 512
    WORKERS: int = 1  # candidate-level parallelism, 1 = sequential

    # Oracle (test evaluator) bounds
    ORACLE_MAX_STATES: int = 8
    ORACLE_MAX_AGENTS: int = 2
    ORACLE_MAX_ACTIONS: int = 3
    ORACLE_MAX_PROFILES: int = 65536  # bounded-recall strategy profiles per state

    # Random model generation
    INFO_RATIO_TOLERANCE: float = 0.05
    GENERATOR_MAX_RETRIES: int = 200

    # Experiment sweep defaults
    SWEEP_RATIOS: str = "0:1:0.1"
    MODELS_PER_RATIO: int = 100
    SWEEP_STATES: int = 20
    SWEEP_AGENTS: int = 2
    SWEEP_ACTIONS: int = 2
    SWEEP_ATOMS: int = 3
    SWEEP_DENSITY: float = 0.5
    SWEEP_MAX_MODELS_HTTP: int = 200  # cap for sweeps requested over HTTP

    # Server
    HOST: str = "0.0.0.0"
    PORT: int = 8001


# Global settings instance
settings = Settings()
