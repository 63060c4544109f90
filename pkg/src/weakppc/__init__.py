"""Weak pair-correlation statistics of finite sequences on the unit circle."""
from ._backend import DEFAULT as BACKEND
from .errors import (GridMismatch, InvalidArgument, NoConvergedPoints, ScaleOverflow,
                     TooFewPoints, WeakPPCError)
from .metric import PairAggregate, circle_distance, pair_aggregate
from .sequences import (GenSpec, MultiplicityProfile, PointSet, gen_kronecker, gen_multiset,
                        gen_uniform, gen_vdc, multiplicity_profile, read_points, write_points)
from .statistics import (CoveringProfile, PairStatistic, SecondMoment, covering_profile,
                         i2_closed, i2_sweep, pcf, pcf_integral, triangle_kernel)

__version__ = "0.1.0"
