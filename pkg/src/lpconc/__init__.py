"""Exact sampling and concentration measurements for l_p^n spheres and balls."""

from .constants import CONSTANTS, FrozenConstants
from .distributions import (
    PExponentialSpec,
    TailBoundPair,
    expected_qnorm_envelope,
    laplace_transform_xp,
    ln_gamma,
    moment_xq,
    normalizing_constant,
    sample_p_exponential,
    tail_bounds_xp,
)
from .samplers import (
    BodyConvention,
    Normalization,
    Region,
    SpherePoint,
    big_l_norm,
    ratio_statistic,
    sample_ball,
    sample_full_sphere,
    sample_quadrant_sphere,
)
from .streams import make_stream
from .tails import (
    Body,
    BoundEnvelope,
    InsufficientDataError,
    TailEstimate,
    TailQuery,
    bound_envelope,
    estimate_tail,
    fit_exponent,
    infinity_norm_tail,
    threshold_T,
)

__version__ = "0.1.0"
