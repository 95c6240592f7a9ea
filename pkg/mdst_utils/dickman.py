"""
Samplers for the max-Dickman law and for the longest-edge limit Q_max(1).

A max-Dickman variable M solves M = max{1 - U, U * M} in distribution and has
mean equal to Dickman's constant.
"""

import logging

import numpy as np

from mdst_utils.errors import InvalidParameterError
from mdst_utils.rng import SeedLike, as_generator

logger = logging.getLogger(__name__)

DICKMAN_CONSTANT = 0.6243299885435508

RECORDS = 'records'
FIXPOINT = 'fixpoint'
METHODS = (RECORDS, FIXPOINT)

DEFAULT_TAIL_TOL = 1e-12
FIXPOINT_ROUNDS = 64


def _check(tail_tol: float, method: str) -> None:
    if not tail_tol > 0:
        raise InvalidParameterError(f"Tail tolerance must be positive, got {tail_tol}")
    if method not in METHODS:
        raise InvalidParameterError(f"Unknown max-Dickman method '{method}', expected one of {METHODS}")


def sample_max_dickman_batch(size: int, seed: SeedLike, tail_tol: float = DEFAULT_TAIL_TOL,
                             method: str = RECORDS) -> np.ndarray:
    """
    Draw ``size`` max-Dickman variables.

    ``records`` returns max over i of (1 - V_i) * V_1 ... V_(i-1), stopping once
    the running product falls below ``tail_tol`` (later terms are bounded by
    it). ``fixpoint`` iterates M <- max{1 - U, U * M} from 0 a fixed number of
    rounds.
    """
    _check(tail_tol, method)
    rng = as_generator(seed)
    size = int(size)
    if method == FIXPOINT:
        result = np.zeros(size)
        for _ in range(FIXPOINT_ROUNDS):
            u = rng.random(size)
            result = np.maximum(1.0 - u, u * result)
        return result

    best = np.zeros(size)
    product = np.ones(size)
    active = np.arange(size)
    while active.size:
        v = rng.random(active.size)
        best[active] = np.maximum(best[active], product[active] * (1.0 - v))
        product[active] *= v
        active = active[product[active] >= tail_tol]
    return best


def sample_max_dickman(seed: SeedLike, tail_tol: float = DEFAULT_TAIL_TOL, method: str = RECORDS) -> float:
    return float(sample_max_dickman_batch(1, seed, tail_tol, method)[0])


def recompose_max_dickman(size: int, seed: SeedLike, tail_tol: float = DEFAULT_TAIL_TOL) -> np.ndarray:
    """One step of the defining equation, max{1 - U, U * M}, applied to records draws."""
    rng = as_generator(seed)
    m = sample_max_dickman_batch(size, rng, tail_tol, RECORDS)
    u = rng.random(int(size))
    return np.maximum(1.0 - u, u * m)


def sample_qmax1_batch(size: int, seed: SeedLike, tail_tol: float = DEFAULT_TAIL_TOL) -> np.ndarray:
    """Q_max(1) = max{U * M1, (1 - U) * M2} with independent max-Dickman M1, M2."""
    rng = as_generator(seed)
    u = rng.random(int(size))
    m1 = sample_max_dickman_batch(size, rng, tail_tol, RECORDS)
    m2 = sample_max_dickman_batch(size, rng, tail_tol, RECORDS)
    return np.maximum(u * m1, (1.0 - u) * m2)


def sample_qmax1(seed: SeedLike, tail_tol: float = DEFAULT_TAIL_TOL) -> float:
    return float(sample_qmax1_batch(1, seed, tail_tol)[0])
