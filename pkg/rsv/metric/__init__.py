from .distance import (
    DiscreteDistribution,
    DistributionShapeError,
    family_distance,
    hamming_matrix,
    kernel_distance,
    tv_distance,
    wasserstein_hamming,
)
from .radius import AmbiguityRadius, RadiusDomainError, hoeffding_radius
