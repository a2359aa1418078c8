"""Light-line coordinate maps, blip-mode transformations and worldline densities
for an observer moving along an arbitrary time-like worldline in 1+1 dimensions."""

from .errors import (
    DomainError,
    EmptyRegion,
    NoIntersection,
    NumericalError,
    OutOfRange,
    ToleranceNotMet,
    TooFewRecords,
)
from .lightcone import (
    FrameMap,
    discretized_map,
    gamma_of,
    general_map,
    inertial_map,
    inverse_map,
    jacobian,
    kappa,
    map_points,
)
from .quadrature import QuadratureConfig
from .trajectory import (
    ConstantVelocity,
    Event,
    PiecewiseConstantVelocity,
    Sampled,
    UniformProperAcceleration,
    beta_at_chi,
    light_intersection,
    position_at,
    velocity_at,
)

__version__ = "0.1.0"
