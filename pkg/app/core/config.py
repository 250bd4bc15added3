"""
Application configuration using Pydantic Settings
"""

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Application settings"""

    # Environment
    ENVIRONMENT: str = "development"
    DEBUG: bool = True

    # API Settings
    API_HOST: str = "0.0.0.0"
    API_PORT: int = 8000
    API_VERSION: str = "v1"

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_DIR: str = "logs"  # empty string disables the file handler

    # Enumeration caps
    # Every exact computation enumerates 2^bits values, so these keep runs in seconds.
    MAX_PARAM_BITS: int = 12
    MAX_RAND_BITS: int = 20
    MAX_OUT_BITS: int = 16
    MAX_TUPLE_BITS: int = 24

    # Randomness
    # Override with DEFAULT_SEED=<int> in the environment or .env
    DEFAULT_SEED: int = 20240917
    RNG_NAME: str = "philox4x64-v1"

    # Learner / reductions
    DIS_PRECISION_FACTOR: int = 500  # Estimate precision inside the distinguisher, times eps
    CHECK_REPS: int = 16  # Check repetitions per advice value
    SMOOTH_EXTRA_BITS: int = 8  # Random bits spent on the dyadic smoothing coin

    # Statistics
    WILSON_Z: float = 2.5758293035489004  # 99% two-sided

    # Monitoring
    SENTRY_DSN: str = ""

    class Config:
        env_file = ".env"
        case_sensitive = True


# Create settings instance
settings = Settings()
