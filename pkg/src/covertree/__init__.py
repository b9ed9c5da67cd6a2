"""covertree: simulation laboratory for cover times of continuous-time
random walk on the rooted binary tree.

Three sampling engines share one reproducible replica contract: an exact
event-driven walk (the oracle), a fast recursive sampler of the local-time
field at an inverse local time, and a streaming Gaussian free field sampler
for the centering comparison.  An analytic layer supplies the PoiGamma law,
its densities, tails, and the closed-form centering/barrier curves; a Monte
Carlo harness adds deterministic parallel replication, KS tests, threshold
scans and centering fits.
"""

__version__ = "0.1.0"

from .analytic import (
    SQRT_LOG2,
    BarrierCurve,
    CenteringSet,
    PoiGammaParams,
    TailBounds,
    barrier,
    bessel_i1,
    bessel_i1_log,
    bridge_max_tail,
    centering,
    gaussian_half_density,
    path_likelihood_ratio,
    poigamma_cdf,
    poigamma_mgf_neg,
    poigamma_sample,
    poigamma_sample_many,
    poigamma_tail_bounds,
    sqrt_poigamma_cdf,
    sqrt_poigamma_density,
    sqrt_tail_bound,
)
from .backend import active_backend
from .gff import GffSummary, gff_leaf_variance_check, sample_gff_max, sample_gff_values
from .harness import (
    FitResult,
    ReplicaSummary,
    ScanResult,
    fit_centering,
    ks_critical_1pct,
    ks_statistic,
    run_replica_records,
    run_replicas,
    threshold_scan,
)
from .rayknight import (
    FieldSummary,
    conditional_zero_prob,
    sample_field,
    sample_field_values,
    uncover_probability,
)
from .replicas import replica_rng, replica_seed_seq
from .tree import TreeCounts, TreeParams, VertexRef, ancestor_at_level, counts, degree
from .walk import WalkOutcome, run_until_cover, run_until_inverse_local_time

__all__ = [
    "__version__",
    "active_backend",
    "SQRT_LOG2",
    "TreeParams",
    "TreeCounts",
    "VertexRef",
    "counts",
    "degree",
    "ancestor_at_level",
    "PoiGammaParams",
    "TailBounds",
    "CenteringSet",
    "BarrierCurve",
    "poigamma_sample",
    "poigamma_sample_many",
    "poigamma_mgf_neg",
    "poigamma_tail_bounds",
    "sqrt_tail_bound",
    "bessel_i1",
    "bessel_i1_log",
    "gaussian_half_density",
    "sqrt_poigamma_density",
    "sqrt_poigamma_cdf",
    "poigamma_cdf",
    "path_likelihood_ratio",
    "bridge_max_tail",
    "centering",
    "barrier",
    "WalkOutcome",
    "run_until_inverse_local_time",
    "run_until_cover",
    "FieldSummary",
    "sample_field",
    "sample_field_values",
    "conditional_zero_prob",
    "uncover_probability",
    "GffSummary",
    "sample_gff_max",
    "sample_gff_values",
    "gff_leaf_variance_check",
    "ReplicaSummary",
    "run_replicas",
    "run_replica_records",
    "replica_rng",
    "replica_seed_seq",
    "ks_statistic",
    "ks_critical_1pct",
    "ScanResult",
    "threshold_scan",
    "FitResult",
    "fit_centering",
]
