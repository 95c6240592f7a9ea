"""
Samplers for the mean-zero fixed points J, H and G.

Each family satisfies X = A * Y1 + B * Y2 + drift(U), where U is uniform and
Y1, Y2 are independent copies of J, H or G:

    J:  J = A J + B J + drift_J(U)
    H:  H = A J + B H + drift_H(U)
    G:  G = A H + B H + drift_G(U)

with A = U, B = 1 - U at alpha = 1 and A = U^alpha, B = (1 - U)^alpha
otherwise. A draw unrolls the recursion into a random tree, breadth first and
vectorised over a block of draws. A subtree whose coefficient falls below the
cut is replaced by its mean, zero; the cut is chosen so that the squared
coefficients of the dropped subtrees sum to at most ``coeff_tol``.

Node uniforms are a hash of the draw's key and the node's path, so two runs
that differ only in ``coeff_tol`` see the same uniforms on every node they
both evaluate.
"""

import logging
from dataclasses import dataclass
from typing import Iterator, Tuple

import numpy as np
from scipy.special import xlogy

from mdst_utils.errors import DomainError, InvalidParameterError
from mdst_utils.rng import child_keys, keyed_uniforms, replicate_seed, sample_keys

logger = logging.getLogger(__name__)

J = 'J'
H = 'H'
G = 'G'
FAMILIES = (J, H, G)
_CODE = {J: 0, H: 1, G: 2}

# children (first, second) of each family
_CHILDREN = {0: (0, 0), 1: (0, 1), 2: (1, 1)}

DEFAULT_COEFF_TOL = 1e-4
_FRONTIER_NODES = 1 << 21
_MAX_NODES_PER_DRAW = 1 << 24


@dataclass
class FixedPointSample:
    value: float
    family: str
    alpha: float
    truncation_stats: Tuple[int, float]


@dataclass
class FixedPointBatch:
    """
    A block of draws with their truncation statistics.

    ``discarded`` is the sum of squared coefficients of the dropped subtrees,
    the L2 weight of the truncation error relative to the family's variance.
    """
    family: str
    alpha: float
    coeff_tol: float
    values: np.ndarray
    max_depth: np.ndarray
    discarded: np.ndarray

    def __len__(self) -> int:
        return len(self.values)

    def samples(self) -> Iterator[FixedPointSample]:
        for value, depth, mass in zip(self.values, self.max_depth, self.discarded):
            yield FixedPointSample(float(value), self.family, self.alpha, (int(depth), float(mass)))


def check_family(family: str, alpha: float) -> None:
    if family not in FAMILIES:
        raise InvalidParameterError(f"Unknown fixed-point family '{family}', expected one of {FAMILIES}")
    if family == G:
        if not alpha >= 1:
            raise DomainError(f"G is the boundary limit only for alpha >= 1, got {alpha}")
    elif not alpha > 0.5:
        raise DomainError(f"{family} is defined for alpha > 1/2, got {alpha}")


def coefficients(u: np.ndarray, alpha: float) -> Tuple[np.ndarray, np.ndarray]:
    if alpha == 1:
        return u, 1.0 - u
    return u ** alpha, (1.0 - u) ** alpha


def drift(codes: np.ndarray, u: np.ndarray, alpha: float) -> np.ndarray:
    """Additive term of each node's equation, chosen by family code."""
    v = 1.0 - u
    out = np.empty_like(u)
    is_j = codes == 0
    is_h = codes == 1
    is_g = codes == 2
    if alpha == 1:
        entropy = 0.5 * (xlogy(u, u) + xlogy(v, v))
        out[is_j] = np.minimum(u, v)[is_j]
        out[is_h] = 0.5 * u[is_h]
        out[is_g] = 0.25
        return out + entropy

    ua, va = u ** alpha, v ** alpha
    half = 2.0 ** -alpha / (alpha - 1)
    tail = 1.0 / alpha + half / alpha
    out[is_j] = (np.minimum(u, v) ** alpha + half * (ua + va - 1.0))[is_j]
    out[is_h] = (ua * (1.0 + half) + (va - 1.0) * tail)[is_h]
    out[is_g] = ((ua + va) * tail - 2.0 / (alpha * (alpha + 1)) * (1.0 + half))[is_g]
    return out


def _evaluate(codes: np.ndarray, keys: np.ndarray, alpha: float,
              cuts: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    size = len(keys)
    values = np.zeros(size)
    max_depth = np.zeros(size, dtype=np.int64)
    discarded = np.zeros(size)

    owner = np.arange(size)
    coeff = np.ones(size)
    depth = 0
    while owner.size:
        u = keyed_uniforms(keys)
        values += np.bincount(owner, weights=coeff * drift(codes, u, alpha), minlength=size)
        max_depth[owner] = depth

        first, second = coefficients(u, alpha)
        next_owner, next_codes, next_keys, next_coeff = [], [], [], []
        for branch, factor in ((0, first), (1, second)):
            child_coeff = coeff * factor
            keep = child_coeff >= cuts[owner]
            drop = ~keep
            if drop.any():
                discarded += np.bincount(owner[drop], weights=child_coeff[drop] ** 2, minlength=size)
            child_code = np.array([_CHILDREN[c][branch] for c in range(3)])[codes[keep]]
            next_owner.append(owner[keep])
            next_codes.append(child_code)
            next_keys.append(child_keys(keys[keep], branch + 1))
            next_coeff.append(child_coeff[keep])
        owner = np.concatenate(next_owner)
        codes = np.concatenate(next_codes)
        keys = np.concatenate(next_keys)
        coeff = np.concatenate(next_coeff)
        depth += 1
    return values, max_depth, discarded


def _cut_threshold(alpha: float, coeff_tol: float) -> float:
    """
    Coefficient cut expected to keep the discarded mass within ``coeff_tol``.

    At alpha >= 1 the coefficients of a generation sum to at most one, so
    cutting at ``coeff_tol`` bounds the squared mass by it. Below one the
    mass left behind by a cut at t scales as t^((2 alpha - 1) / alpha).
    """
    if alpha >= 1:
        return coeff_tol
    return min(coeff_tol, coeff_tol ** (alpha / (2 * alpha - 1)))


def _nodes_per_draw(threshold: float, alpha: float) -> float:
    return 2.0 * threshold ** (-1.0 / alpha)


def _check_reachable(family: str, alpha: float, coeff_tol: float, threshold: float) -> None:
    nodes = _nodes_per_draw(threshold, alpha)
    if nodes > _MAX_NODES_PER_DRAW:
        raise DomainError(
            f"Discarded mass of {family} at alpha={alpha} cannot be held below {coeff_tol}: "
            f"about {nodes:.3g} nodes per draw would be needed; raise coeff_tol")


def _evaluate_blocks(code: int, keys: np.ndarray, alpha: float,
                     cuts: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    size = len(keys)
    if size == 0:
        return np.zeros(0), np.zeros(0, dtype=np.int64), np.zeros(0)
    block = max(1, min(size, int(_FRONTIER_NODES / _nodes_per_draw(float(cuts.min()), alpha))))
    parts = []
    for start in range(0, size, block):
        stop = start + block
        parts.append(_evaluate(np.full(len(keys[start:stop]), code, dtype=np.int64),
                               keys[start:stop], alpha, cuts[start:stop]))
    values, depth, discarded = (np.concatenate(p) for p in zip(*parts))
    return values, depth, discarded


def sample_fixed_point_batch(family: str, alpha: float, size: int, seed: int = 0,
                             coeff_tol: float = DEFAULT_COEFF_TOL, offset: int = 0) -> FixedPointBatch:
    """
    Draw ``size`` samples of J, H or G.

    Every draw ends with a discarded mass of at most ``coeff_tol``. A draw
    that overshoots is evaluated again with a lower cut of its own, keeping
    the uniforms of the nodes it had already visited.

    Args:
        family: 'J', 'H' or 'G'
        alpha: Exponent; J and H need alpha > 1/2, G needs alpha >= 1
        size: Number of draws
        seed: Batch seed; draw i of a batch depends only on (seed, offset + i)
        coeff_tol: Bound on the discarded coefficient mass of each draw
        offset: Index of the first draw, for splitting a batch into parts

    Raises:
        DomainError: if the bound needs more than 2^24 nodes per draw
    """
    check_family(family, alpha)
    if not coeff_tol > 0:
        raise InvalidParameterError(f"Coefficient tolerance must be positive, got {coeff_tol}")
    size = int(size)
    keys = sample_keys(seed, size, offset)
    code = _CODE[family]
    cuts = np.full(size, _cut_threshold(alpha, coeff_tol))
    _check_reachable(family, alpha, coeff_tol, float(cuts.min(initial=coeff_tol)))
    values, depth, discarded = _evaluate_blocks(code, keys, alpha, cuts)

    over = np.flatnonzero(discarded > coeff_tol)
    while over.size:
        # discarded mass scales as cut^((2 alpha - 1) / alpha); aim 20% under the bound
        shrink = 0.8 * (coeff_tol / discarded[over]) ** (alpha / (2 * alpha - 1))
        cuts[over] *= np.minimum(0.5, shrink)
        _check_reachable(family, alpha, coeff_tol, float(cuts[over].min()))
        logger.debug("%s(alpha=%s): %d draws over %.3g, lowest cut now %.3g",
                     family, alpha, over.size, coeff_tol, float(cuts[over].min()))
        values[over], depth[over], discarded[over] = _evaluate_blocks(code, keys[over], alpha, cuts[over])
        over = over[discarded[over] > coeff_tol]

    logger.debug("%s(alpha=%s): %d draws, max depth %d, max discarded mass %.3g",
                 family, alpha, size, int(depth.max()) if size else 0,
                 float(discarded.max()) if size else 0.0)
    return FixedPointBatch(family, alpha, coeff_tol, values, depth, discarded)


def _sample(family: str, alpha: float, seed: int, coeff_tol: float) -> FixedPointSample:
    return next(sample_fixed_point_batch(family, alpha, 1, seed, coeff_tol).samples())


def sample_limit_J(alpha: float, seed: int = 0, coeff_tol: float = DEFAULT_COEFF_TOL) -> FixedPointSample:
    return _sample(J, alpha, seed, coeff_tol)


def sample_limit_H(alpha: float, seed: int = 0, coeff_tol: float = DEFAULT_COEFF_TOL) -> FixedPointSample:
    return _sample(H, alpha, seed, coeff_tol)


def sample_limit_G(alpha: float, seed: int = 0, coeff_tol: float = DEFAULT_COEFF_TOL) -> FixedPointSample:
    return _sample(G, alpha, seed, coeff_tol)


def recompose_fixed_point(family: str, alpha: float, size: int, seed: int = 0,
                          coeff_tol: float = DEFAULT_COEFF_TOL) -> np.ndarray:
    """
    Apply one step of the family's equation to independent direct draws.

    If the sampler is right, the result has the same law as direct draws.
    """
    check_family(family, alpha)
    code = _CODE[family]
    first_family, second_family = (FAMILIES[c] for c in _CHILDREN[code])
    u = keyed_uniforms(sample_keys(replicate_seed(seed, 0), int(size)))
    y1 = sample_fixed_point_batch(first_family, alpha, size, replicate_seed(seed, 1), coeff_tol).values
    y2 = sample_fixed_point_batch(second_family, alpha, size, replicate_seed(seed, 2), coeff_tol).values
    a, b = coefficients(u, alpha)
    return a * y1 + b * y2 + drift(np.full(len(u), code, dtype=np.int64), u, alpha)
