from enum import Enum


class EnvironmentName(Enum):
    """Where a run happens; only DEVELOPMENT changes behaviour (pretty JSON logs)."""

    TESTING = "test"
    DEVELOPMENT = "development"
    RESEARCH = "research"
    PRODUCTION = "production"
