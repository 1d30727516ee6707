"""Transcript-producing constructions and counterexamples."""

from .common import TRANSCRIPT_VERSION, Transcript, diagonal_order
from .disjointness import arc_grid, cylinder_grid, disjointness_probe, residue_grid
from .ip_ladder import (IpLadder, LadderStep, build_ip_return_point, diameter_radius, extend_ip_ladder,
                        sums_of)
from .md_point import (Block, MdConstruction, MdStage, ThickBlockSpec, build_md_point,
                       check_md_construction)
from .omega_escape import omega_limit_escape_example
from .toeplitz_counterexample import build_toeplitz_counterexample
from .weak_mixing import verify_weak_mixing_order_n
from .wpr_search import WprCandidate, search_wpr_points, synchronization_check

__all__ = [name for name in dir() if not name.startswith("_")]
