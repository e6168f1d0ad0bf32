from .exceptions import (
    PenPortraitError,
    ShapeError,
    ParameterError,
    UsageError,
    ConfigError,
    DataError,
    FormatError,
    PlotBoundsError,
)
from .response import ExitCode, EXIT_MESSAGES, get_exit_code, error_payload, stage_status, dump_json
