"""Gibbs 测度模块：柱集质量、Gibbs 性质、总质量与采样"""

from src.thermo import MeasureEstimate

from .measure import GibbsMeasure, gibbs_property_check, path_stabiliser_order, total_mass
from .models import CylinderSpec, GibbsCheck, SampledGeodesic, TotalMass
from .sampler import (
    edge_frequencies,
    sample_geodesic,
    sample_letters,
    sample_tasks,
    spawn_seeds,
    trajectory_lines,
)

__all__ = [
    "GibbsMeasure",
    "CylinderSpec",
    "MeasureEstimate",
    "GibbsCheck",
    "SampledGeodesic",
    "TotalMass",
    "gibbs_property_check",
    "path_stabiliser_order",
    "total_mass",
    "sample_geodesic",
    "sample_letters",
    "sample_tasks",
    "spawn_seeds",
    "edge_frequencies",
    "trajectory_lines",
]
