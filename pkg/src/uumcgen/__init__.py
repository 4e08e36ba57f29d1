"""Unitless, unrestricted, Markov-consistent random SCM and SVAR generation.

Also ships the standard baseline samplers (UVN, IPA, 50-50, iSCM), data
simulation, and var-/R^2-sortability auditing.
"""

__version__ = "0.1.0"

from .dataset import Dataset, read_csv, write_csv
from .errors import (
    DegenerateDataError,
    DegenerateDrawError,
    GenerationError,
    ParameterError,
    QueryError,
    StructuralError,
    UnstableError,
    UUMCError,
)
from .graph import (
    Dag,
    TsGraph,
    ancestral_closure,
    gen_er_dag,
    gen_er_ts_graph,
    summary_graph,
)
from .scmgen import (
    Scm,
    analytic_moments,
    gen_fifty_fifty,
    gen_ipa,
    gen_iscm,
    gen_uumc,
    gen_uvn,
)
from .simulate import simulate_static, simulate_svar, standardize_sample
from .sortability import (
    MetricVector,
    SortabilityResult,
    pairwise_sortability,
    r2_metric,
    r2_ts_metric,
    r2star_ts_metric,
    ts_sortability,
    var_metric,
)
from .svargen import (
    Svar,
    confounding_bound,
    cross_contribution_factor,
    gen_uumc_svar,
    parent_contribution,
    reduced_form,
    stability_check,
    stationary_covariance,
)
