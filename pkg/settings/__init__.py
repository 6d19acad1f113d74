import os
from typing import TYPE_CHECKING, cast

from pydantic_settings import BaseSettings

from app.environment import EnvironmentName

# "test" selects the mock-backed TestSettings; anything else reads the environment.
SETTINGS_ENV_VAR = "NFL_ENV"


def get_settings() -> BaseSettings:
    if os.getenv(SETTINGS_ENV_VAR) == EnvironmentName.TESTING.value:
        from .test_settings import TestSettings

        return TestSettings()

    from .settings import Settings

    return Settings()


if TYPE_CHECKING:
    from .settings import Settings

    settings = cast(Settings, get_settings())
else:
    settings = get_settings()
