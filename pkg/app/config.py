from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="PCM_", extra="ignore")

    database_url: str = "sqlite+aiosqlite:///./sweeps.db"
    log_level: str = "INFO"
    workers: int = Field(default=1, ge=1)
    host: str = "0.0.0.0"
    port: int = 2222


settings = Settings()
