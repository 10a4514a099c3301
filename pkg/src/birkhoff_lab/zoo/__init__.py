"""Explicit function constructions with certified good sets."""

from .basic import (SmoothStepRecord, TransferResult, hilbert_example_eval, hilbert_example_mean,
                    smooth_step, step_function, trig_coboundary_transfer)
from .holder import HolderSpec, LevelReport, build_holder, random_cusp_function, unit_coefficient
from .noncoboundary import NonCoboundarySpec, Stage, build_noncoboundary, orbit_partial_sums
from .plateau import PlateauSpec, build_plateau, minimal_m
from .rademacher import RademacherStepSpec, bad_shift_set, build_rademacher_step

__all__ = [
    "SmoothStepRecord", "TransferResult", "hilbert_example_eval", "hilbert_example_mean",
    "smooth_step", "step_function", "trig_coboundary_transfer",
    "HolderSpec", "LevelReport", "build_holder", "random_cusp_function", "unit_coefficient",
    "NonCoboundarySpec", "Stage", "build_noncoboundary", "orbit_partial_sums",
    "PlateauSpec", "build_plateau", "minimal_m",
    "RademacherStepSpec", "bad_shift_set", "build_rademacher_step",
]
