"""Command-line grid runner."""

from .config import DataSource, RunConfig, load_config, parse_config
from .emit import render
from .runner import Cell, CellKey, ResultTable, run, run_calibration
from .tables import table_config
