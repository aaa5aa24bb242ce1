"""DLCZ spin-wave memory: Monte-Carlo counts, estimators, decay fit and repeater rates."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401


def cli(*args):
    """Run the dlcz tool in-process; returns (exit_code, stdout, stderr)."""
    return run_cli([str(a) for a in args])  # noqa: F405
