from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    # Application
    APP_NAME: str = "Enriques Verifier"
    VERSION: str = "1.0.0"
    DEBUG: bool = False
    LOG_LEVEL: str = "INFO"

    # Brute force
    LEVEL_MULTIPLIER: int = 1  # scales the default E- and F-levels
    MAX_ENUMERATION: int = 5_000_000  # multisets visited per exhaustive run
    MAX_WORKERS: int = 1

    # Sampling
    RANDOM_SEED: int = 20100101

    # Numerics
    PHI_SEARCH_FACTOR: int = 2  # dMax = factor * b2^2

    # Lattices
    ROOT_BOX_BOUND: int = 1

    # Server
    HOST: str = "0.0.0.0"
    PORT: int = 8000

    # CORS
    CORS_ORIGINS: list = ["*"]

    class Config:
        env_file = ".env"
        case_sensitive = True


settings = Settings()
