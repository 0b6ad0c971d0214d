"""Offline figure rendering for the gmmshock solver's text artifacts."""

from .render import render_bic, render_cost, render_fields
from .tables import TableFormatError, read_table

__all__ = ["render_bic", "render_cost", "render_fields", "TableFormatError",
           "read_table"]
