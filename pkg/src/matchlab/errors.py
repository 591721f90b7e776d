"""Exception hierarchy; the CLI maps these onto exit codes."""

import os


class MatchlabError(Exception):
    """Base class for all package errors."""


class ValidationError(MatchlabError, ValueError):
    """Malformed or inconsistent input (CLI exit code 2)."""


class InfeasibleError(MatchlabError):
    """The requested object does not exist for this input (CLI exit code 3)."""


class GuardError(InfeasibleError):
    """A combinatorial size guard was exceeded (CLI exit code 3).

    Setting ``MATCHLAB_GUARD_OVERRIDE=1`` lifts the guards.
    """


def guard_override():
    """True when ``MATCHLAB_GUARD_OVERRIDE=1`` is set."""
    return os.environ.get("MATCHLAB_GUARD_OVERRIDE", "") == "1"
