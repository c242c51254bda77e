"""Exception types for dickesim."""


class DickesimError(Exception):
    """Base class for all library errors."""


class CapacityError(DickesimError, ValueError):
    pass


class DimensionMismatchError(DickesimError, ValueError):
    pass


class NotHermitianError(DickesimError, ValueError):
    pass


class DegenerateOutcomeError(DickesimError, ValueError):
    """Raised when a projection or post-selection has zero probability."""


class DecompositionError(DickesimError, RuntimeError):
    def __init__(self, message: str, best_residual: float) -> None:
        super().__init__(f"{message} (best residual {best_residual:.3e})")
        self.best_residual = best_residual


class MissingSettingsError(DickesimError, KeyError):
    def __init__(self, missing: list[str]) -> None:
        super().__init__(f"Missing measurement settings: {', '.join(missing)}")
        self.missing = missing

    def __str__(self) -> str:
        return str(self.args[0])


class ConfigError(DickesimError, ValueError):
    def __init__(self, message: str, field: str | None = None) -> None:
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


class SchemaError(DickesimError, ValueError):
    def __init__(self, message: str, path: str = "$") -> None:
        super().__init__(f"{path}: {message}")
        self.path = path


class ConvergenceWarning(UserWarning):
    """See-saw restarts that hit the iteration cap before converging."""


EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_SCHEMA = 3
EXIT_NUMERICAL = 4


def exit_code(error: BaseException) -> int:
    if isinstance(error, ConfigError):
        return EXIT_CONFIG
    if isinstance(error, SchemaError):
        return EXIT_SCHEMA
    if isinstance(error, DecompositionError | DegenerateOutcomeError | CapacityError | FloatingPointError):
        return EXIT_NUMERICAL
    if type(error).__name__ == "LinAlgError":
        return EXIT_NUMERICAL
    return EXIT_FAILURE
