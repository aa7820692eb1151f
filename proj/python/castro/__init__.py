from ._castro import (
    CastroError,
    ConfigError,
    DataError,
    DomainError,
    InfeasibleError,
    IoError,
    Problem,
    __version__,
    centered_l2_discrepancy,
    design_variance,
    farthest_from_data,
    latin_hypercube,
    pca_project_2d,
    round_and_renormalize,
    sample,
    wraparound_l2_discrepancy,
)

__all__ = [
    "CastroError",
    "ConfigError",
    "DataError",
    "DomainError",
    "InfeasibleError",
    "IoError",
    "Problem",
    "centered_l2_discrepancy",
    "design_variance",
    "farthest_from_data",
    "latin_hypercube",
    "pca_project_2d",
    "round_and_renormalize",
    "sample",
    "wraparound_l2_discrepancy",
]
