import logging

from pydantic import Field, ValidationInfo, field_validator
from pydantic_settings import BaseSettings

from app.environment import EnvironmentName
from settings.log import LoggingSettings


class DataSettings(BaseSettings):
    # Root for dataset files; relative paths in run configs are resolved against it.
    data_dir: str = Field(alias="NFL_DATA_DIR", default="data")


class RuntimeSettings(BaseSettings):
    # Intra-op threads for torch. More than one thread can reorder float reductions,
    # which breaks byte-identical artifacts across runs.
    torch_num_threads: int = Field(alias="TORCH_NUM_THREADS", default=1, ge=1)


class SentrySettings(BaseSettings):
    is_enabled: bool = Field(alias="SENTRY_ENABLED", default=False)
    dsn: str = Field(alias="SENTRY_DSN", default="")


class Settings(BaseSettings):
    model_config = {"env_file": ".env", "extra": "allow"}

    environment: EnvironmentName = Field(alias="ENVIRONMENT", default=EnvironmentName.DEVELOPMENT)

    data: DataSettings = Field(default_factory=DataSettings)
    runtime: RuntimeSettings = Field(default_factory=RuntimeSettings)
    logging: LoggingSettings = Field(default_factory=LoggingSettings)
    sentry: SentrySettings = Field(default_factory=SentrySettings)

    @field_validator("environment", mode="before")
    def set_environment(cls, value: str | EnvironmentName, info: ValidationInfo) -> EnvironmentName:
        try:
            return EnvironmentName(value)
        except ValueError:
            logging.getLogger(__name__).warning(f"Invalid environment: {value}")
            return EnvironmentName.DEVELOPMENT
