from leo_spectra.experiments.builtin.bound_report import BoundReportExperiment
from leo_spectra.experiments.builtin.planar_vs_spherical import PlanarVsSphericalExperiment
from leo_spectra.experiments.builtin.random_sweep import RandomSweepExperiment
from leo_spectra.experiments.builtin.regular_sweep import RegularSweepExperiment
from leo_spectra.experiments.builtin.reuse_table import ReuseTableExperiment
from leo_spectra.experiments.builtin.shuffle_compare import ShuffleCompareExperiment

__all__ = [
    "RegularSweepExperiment",
    "RandomSweepExperiment",
    "ShuffleCompareExperiment",
    "PlanarVsSphericalExperiment",
    "ReuseTableExperiment",
    "BoundReportExperiment",
]


def get_all_builtin_experiments() -> list[type]:
    return [
        RegularSweepExperiment,
        RandomSweepExperiment,
        ShuffleCompareExperiment,
        PlanarVsSphericalExperiment,
        ReuseTableExperiment,
        BoundReportExperiment,
    ]
