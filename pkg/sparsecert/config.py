"""
Configuration management for the sparsecert analyzer.

This module handles the environment-driven run settings (tolerances, search
budgets, seeds) and the fixed numerical constants the modules share.
"""

import logging
import os
from typing import Any, Dict, Optional

import numpy as np
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


class AnalysisConfig:
    """Run settings read from the environment (or a local .env file)."""

    def __init__(self):
        """Initialize configuration with environment variables."""
        self.tie_tolerance = self._read_float("SPARSECERT_TIE_TOL", 1e-9)
        self.spark_budget = self._read_int("SPARSECERT_BUDGET", 2_000_000)
        self.seed = self._read_int("SPARSECERT_SEED", 0)
        self.search_trials = self._read_int("SPARSECERT_SEARCH_TRIALS", 0)
        self.lp_pair_budget = self._read_int("SPARSECERT_LP_BUDGET", 200_000)
        self.log_level = os.getenv("SPARSECERT_LOG_LEVEL", "WARNING").upper()

        self._validate_config()

    @staticmethod
    def _read_float(name: str, default: float) -> float:
        raw = os.getenv(name)
        if raw is None or raw.strip() == "":
            return default
        try:
            return float(raw)
        except ValueError:
            raise ValueError(f"{name}={raw!r} is not a number. Please check your .env file.")

    @staticmethod
    def _read_int(name: str, default: int) -> int:
        raw = os.getenv(name)
        if raw is None or raw.strip() == "":
            return default
        try:
            return int(raw)
        except ValueError:
            raise ValueError(f"{name}={raw!r} is not an integer. Please check your .env file.")

    def _validate_config(self):
        """Validate that the environment values are usable."""
        if not np.isfinite(self.tie_tolerance) or self.tie_tolerance < 0:
            raise ValueError("SPARSECERT_TIE_TOL must be a finite nonnegative number.")
        if self.spark_budget < 1:
            raise ValueError("SPARSECERT_BUDGET must be at least 1.")
        if self.search_trials < 0:
            raise ValueError("SPARSECERT_SEARCH_TRIALS must be nonnegative.")
        if self.lp_pair_budget < 1:
            raise ValueError("SPARSECERT_LP_BUDGET must be at least 1.")
        if self.log_level not in logging.getLevelNamesMapping():
            raise ValueError(f"SPARSECERT_LOG_LEVEL={self.log_level!r} is not a logging level.")

class ToleranceConfig:
    """Numerical constants shared by every module."""

    MACHINE_EPSILON = float(np.finfo(float).eps)

    # SVD
    ORTHOGONALITY_TOL = 1e-10
    SVD_SWEEP_FACTOR = 30

    # Coherence
    DEFAULT_TIE_TOL = 1e-9
    PRINTED_FIXTURE_TIE_TOL = 5e-4

    # Babel scans compare sums against 1 with this slack, lowering thresholds only
    THRESHOLD_SLACK = 1e-12

    # Spark / range property searches
    DEFAULT_SPARK_BUDGET = 2_000_000
    DEFAULT_LP_PAIR_BUDGET = 200_000
    STRICT_MARGIN = 1e-7

    # Simplex
    LP_PIVOT_TOL = 1e-12
    LP_FEASIBILITY_TOL = 1e-9
    LP_CERTIFICATE_TOL = 1e-8
    LP_MAX_SIZE = 500

    # Scaling
    MAX_CONDITION_NUMBER = 1e3
    RHS_SNAP_TOL = 1e-12
    DESCENT_SHRINK = 0.5
    DESCENT_LEVELS = 8

    # Verdicts
    CANDIDATE_RESIDUAL_TOL = 1e-9
    SPARSITY_RELATIVE_TOL = 1e-10
    VERDICT_SLACK = 1e-9

    @classmethod
    def rank_tolerance(cls, rows: int, cols: int, sigma_max: float) -> float:
        """Absolute cutoff below which a singular value counts as zero."""
        return max(rows, cols) * cls.MACHINE_EPSILON * sigma_max

    @classmethod
    def get_svd_settings(cls) -> Dict[str, Any]:
        return {
            "orthogonality_tol": cls.ORTHOGONALITY_TOL,
            "sweep_factor": cls.SVD_SWEEP_FACTOR,
        }

    @classmethod
    def get_lp_settings(cls) -> Dict[str, Any]:
        return {
            "pivot_tol": cls.LP_PIVOT_TOL,
            "feasibility_tol": cls.LP_FEASIBILITY_TOL,
            "certificate_tol": cls.LP_CERTIFICATE_TOL,
            "max_size": cls.LP_MAX_SIZE,
        }

    @classmethod
    def get_scaling_settings(cls) -> Dict[str, Any]:
        return {
            "max_condition_number": cls.MAX_CONDITION_NUMBER,
            "descent_shrink": cls.DESCENT_SHRINK,
            "descent_levels": cls.DESCENT_LEVELS,
        }


def configure_logging(level: Optional[str] = None) -> None:
    """Set the root logging format once; later calls only adjust the level."""
    level_name = (level or "WARNING").upper()
    root = logging.getLogger()
    if not root.handlers:
        logging.basicConfig(format="%(levelname)s %(name)s: %(message)s")
    root.setLevel(level_name)
