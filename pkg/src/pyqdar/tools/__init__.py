"""Command-line tools bundled with pyqdar."""

from .cli import main as cli_main

__all__ = ["cli_main"]
