"""Ising machine built from stochastic SHE-MTJ spins."""

from .backends import CurveBackend, LLGBackend, MajorityBackend, TableBackend
from .core import (
    AnnealSchedule,
    VoteCurrentMap,
    as_spins,
    count_votes,
    hamiltonian,
    vote_to_current,
)
from .graph import CouplingGraph, GraphFileError
from .solver import ORDER_POLICIES, RunStats, SweepStats, random_state, run, sweep, update_spin

UA = 1e-6

# Phase 1 spans the currents where the device curve reads 2% and 96%.  Phase 2
# widens the window symmetrically about the 90 uA midpoint to the lower end of
# the calibrated range, which cools the vote dynamics almost to a strict
# majority rule.
PHASE_BOUNDARY = 400
PHASE1_LEVELS = (0.02, 0.96)
PHASE2_MAP = VoteCurrentMap(40 * UA, 140 * UA)


def default_schedule(curve=None):
    from ..device import load_shipped_curve

    curve = load_shipped_curve() if curve is None else curve
    phase1 = VoteCurrentMap.from_curve(curve, *PHASE1_LEVELS)
    return AnnealSchedule(((0, phase1), (PHASE_BOUNDARY, PHASE2_MAP)))


__all__ = [
    "AnnealSchedule",
    "CouplingGraph",
    "CurveBackend",
    "GraphFileError",
    "LLGBackend",
    "MajorityBackend",
    "ORDER_POLICIES",
    "PHASE1_LEVELS",
    "PHASE2_MAP",
    "PHASE_BOUNDARY",
    "RunStats",
    "SweepStats",
    "TableBackend",
    "VoteCurrentMap",
    "as_spins",
    "count_votes",
    "default_schedule",
    "hamiltonian",
    "random_state",
    "run",
    "sweep",
    "update_spin",
    "vote_to_current",
]
