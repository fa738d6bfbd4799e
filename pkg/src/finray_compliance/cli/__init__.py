"""
Study configuration, reports and command handlers for the ``finray`` CLI.
"""

from .commands import COMMANDS, CommandOptions, CommandResult, exit_code_for
from .reports import read_records, trace_to_rows, write_records
from .study_config import StudyConfig, load_study_config, study_schema

__all__ = [
    "COMMANDS",
    "CommandOptions",
    "CommandResult",
    "exit_code_for",
    "read_records",
    "trace_to_rows",
    "write_records",
    "StudyConfig",
    "load_study_config",
    "study_schema",
]
