"""Generalized spatial sign covariance matrices.

Robust scatter estimators that weight centred observations by a radial
function of their distance to a robust center, together with the k-step LTS
location, influence functions at the Gaussian, robust PCA, the gamma
convolution used to pick distance cutoffs, and the simulation harness.
"""

from .coga import CogaDistribution, coga_cdf, coga_pdf, coga_quantile, wh_experiment, wh_quantile_estimate
from .errors import (
    ConvergenceError,
    DataError,
    DegenerateColumnError,
    DegenerateScatterError,
    DimensionExceedsSampleError,
    EmptyInputError,
    GsscmError,
    InvalidMatrixError,
    NotPositiveDefiniteError,
    NumericError,
    SampleTooSmallError,
    SingularIFError,
    SingularScatterError,
)
from .influence import if_classical, if_grid, if_gsscm, if_sscm
from .location import LocationEstimate, c_step, kstep_lts, lts_objective, spatial_median
from .pca import PcaModel, fit_pca, orthogonal_distance, outlier_map, score_distance, standardize
from .radial import Cutoffs, RadialMethod, compute_cutoffs, hmad, hmed, xi
from .scatter import ScatterEstimate, consistency_factor, eigendecompose, gsscm, shape, symmetrized_gsscm
from .sim import SimConfig, SimRecord, StudyGrid, breakdown_experiment, kldiv, kldivshape, run_study

__version__ = "0.1.0"
