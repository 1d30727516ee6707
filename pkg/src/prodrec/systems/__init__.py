"""Dynamical-system engines and the return-time queries."""

from .base import (ETA, Ball, LimitSetProbe, ReturnTimeSet, System, Whole, cancel_token,
                   containment_times, distance_to_set, iterate, limit_set_probe, return_times,
                   transfer_times)
from .metric import (GOLDEN, Arc, Interval, IntervalSet, Rotation, TentMap, circle_distance,
                     fraction_text, tent, tent_image, tent_iterate_interval, tent_periodic_points,
                     tent_preimage, tent_preimages_in, to_fraction)
from .odometer import Odometer, OnePoint, Residue
from .product import Product, ProductBox
from .spec_io import SpecError, open_set_from_json, spec_hash, system_from_spec
from .subsets import (CylinderSubset, Fiber, FinitePoints, WholeSpace, is_perfect, meets, require_perfect,
                      restricted_transfer, sample_point)
from .symbolic import (CodedShift, Cylinder, FullShift, SampledShift, ShiftSpace, SymbolicPoint,
                       merge_constraints, rotation_coding, shift_distance)
from .toeplitz import (ToeplitzFlow, ToeplitzSpec, aperiodic_positions, aperiodic_readout,
                       hole_density, make_toeplitz, periodic_positions, skeleton)

__all__ = [name for name in dir() if not name.startswith("_")]
