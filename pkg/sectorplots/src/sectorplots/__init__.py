"""Figure rendering for sector-domain Euler simulator outputs."""

from .figures import KINDS, PlotSpec, render, sidecar_path
from .io import (EmptyInputError, FieldSnapshot, ParseError, Table,
                 fit_blowup_time, read_field, read_manifest, read_table)

__all__ = [
    "KINDS", "PlotSpec", "render", "sidecar_path",
    "EmptyInputError", "FieldSnapshot", "ParseError", "Table",
    "fit_blowup_time", "read_field", "read_manifest", "read_table",
]
