"""Quantile forecast optimality tests.

Block-bootstrap tests of quantile forecast calibration across many levels
and horizons, a horizon-monotonicity test of expected loss, and a Monte
Carlo harness for size and power studies.
"""

from ._backend import kernels
from .errors import (
    BootstrapFailure,
    ConvergenceError,
    LoadError,
    QfoptError,
    SingularDesignError,
    ValidationError,
)
from .ext import amz_test, mmz_table, mmz_test, series_contributions
from .io import (dumps_panel, emit_mz_plotdata, emit_report, emit_summary_table,
                 load_panel, loads_panel, write_panel)
from .mbb import MbbConfig, draw_block_indices, resample
from .mono import HacConfig, hac_variance, loss_differences, mh_test
from .mz import fit_mz, mz_statistic, mz_test
from .qr import QrFit, pinball_loss, qr_fit
from .results import TestResult
from .samples import AugmentedSample, EvalSample, MultiSeriesSample
from .simlab import (
    ADL11,
    AR1,
    GARCH11,
    SimConfig,
    SizePowerReport,
    run_size_power,
    size_power_table,
)

__version__ = "0.1.0"
BACKEND = kernels.NAME

__all__ = [
    "ADL11", "AR1", "AugmentedSample", "BACKEND", "BootstrapFailure", "ConvergenceError",
    "EvalSample", "GARCH11", "HacConfig", "LoadError", "MbbConfig", "MultiSeriesSample",
    "QfoptError", "QrFit", "SimConfig", "SingularDesignError", "SizePowerReport", "TestResult",
    "ValidationError", "amz_test", "draw_block_indices", "dumps_panel", "emit_mz_plotdata",
    "emit_report", "emit_summary_table", "fit_mz", "hac_variance", "load_panel", "loads_panel", "loss_differences",
    "mh_test", "mmz_table", "mmz_test", "mz_statistic", "mz_test", "pinball_loss", "qr_fit",
    "resample", "run_size_power", "series_contributions", "size_power_table", "write_panel",
]
