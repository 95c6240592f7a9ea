"""
Points, regions and random point clouds in the unit cube.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import special

from mdst_utils.errors import InvalidDimensionError, InvalidParameterError
from mdst_utils.rng import as_generator

logger = logging.getLogger(__name__)

Point = Tuple[float, ...]

POISSON = 'poisson'
BINOMIAL = 'binomial'
PROCESSES = (POISSON, BINOMIAL)


def _check_dim(dim: int) -> int:
    if int(dim) != dim or dim < 1:
        raise InvalidDimensionError(f"Dimension must be a positive integer, got {dim}")
    return int(dim)


def unit_ball_volume(d: int) -> float:
    """Volume of the unit ball in R^d, pi^(d/2) / Gamma(1 + d/2)."""
    d = _check_dim(d)
    return float(math.pi ** (d / 2) / special.gamma(1 + d / 2))


@dataclass
class PointCloud:
    """
    A finite point set in the unit cube together with how it was generated.

    ``coords`` has shape (size, dim). ``seed`` and ``intensity`` are None for
    clouds built by hand.
    """
    coords: np.ndarray
    seed: Optional[int] = None
    intensity: Optional[float] = None
    process: Optional[str] = None
    dim: int = field(init=False)

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=np.float64)
        if coords.ndim != 2:
            raise InvalidDimensionError(f"Point coordinates must form a 2-d array, got shape {coords.shape}")
        self.dim = _check_dim(coords.shape[1])
        self.coords = coords

    @classmethod
    def from_points(cls, points: Sequence[Sequence[float]], dim: Optional[int] = None) -> 'PointCloud':
        """Build a cloud from explicit points; ``dim`` is needed only when ``points`` is empty."""
        if len(points) == 0:
            return cls(np.empty((0, _check_dim(dim or 1))))
        return cls(np.asarray(points, dtype=np.float64))

    def __len__(self) -> int:
        return self.coords.shape[0]

    @property
    def size(self) -> int:
        return len(self)

    @property
    def heights(self) -> np.ndarray:
        """Last coordinates, the keys of the South order."""
        return self.coords[:, -1]

    def subset(self, mask: np.ndarray) -> 'PointCloud':
        """Points selected by a boolean mask, in their original order."""
        return PointCloud(self.coords[mask], seed=self.seed, intensity=self.intensity, process=self.process)

    def transformed(self, scale: float = 1.0, shift: Optional[Sequence[float]] = None) -> 'PointCloud':
        """Return scale * x + shift for every point."""
        coords = self.coords * scale
        if shift is not None:
            coords = coords + np.asarray(shift, dtype=np.float64)
        return PointCloud(coords, seed=self.seed, intensity=self.intensity, process=self.process)

    def has_distinct_heights(self) -> bool:
        if len(self) < 2:
            return True
        return bool(np.all(np.diff(np.sort(self.heights)) > 0))


@dataclass(frozen=True)
class Region:
    """
    Axis-aligned box inside the unit cube.

    Membership is closed-open on the first dim-1 coordinates and (lower, upper]
    on the last one, so slabs stacked on the last axis partition the cube.
    """
    lower: Point
    upper: Point

    def __post_init__(self):
        if len(self.lower) != len(self.upper):
            raise InvalidDimensionError("Region corners have different dimensions")
        _check_dim(len(self.lower))
        for lo, hi in zip(self.lower, self.upper):
            if lo > hi:
                raise InvalidParameterError(f"Region lower corner {self.lower} exceeds upper corner {self.upper}")

    @property
    def dim(self) -> int:
        return len(self.lower)

    @classmethod
    def slab(cls, d: int, bottom: float, top: float) -> 'Region':
        """The box (0,1)^(d-1) x (bottom, top]."""
        d = _check_dim(d)
        return cls((0.0,) * (d - 1) + (float(bottom),), (1.0,) * (d - 1) + (float(top),))

    @classmethod
    def whole(cls, d: int) -> 'Region':
        return cls.slab(d, 0.0, 1.0)

    @classmethod
    def gamma(cls, d: int, g_n: float) -> 'Region':
        """The cube without its base strip: last coordinate in (g_n, 1]."""
        return cls.slab(d, g_n, 1.0)

    @classmethod
    def boundary(cls, d: int, t_n: float) -> 'Region':
        """The thin base slab: last coordinate in (0, t_n]."""
        return cls.slab(d, 0.0, t_n)

    @classmethod
    def intermediate(cls, d: int, t_n: float, g_n: float) -> 'Region':
        """The layer between the base slab and the interior: (t_n, g_n]."""
        return cls.slab(d, t_n, g_n)

    def contains(self, coords: np.ndarray) -> np.ndarray:
        """Boolean membership mask for an (m, dim) coordinate array."""
        coords = np.asarray(coords, dtype=np.float64)
        if coords.ndim != 2 or coords.shape[1] != self.dim:
            raise InvalidDimensionError(f"Expected points of dimension {self.dim}, got shape {coords.shape}")
        lower = np.asarray(self.lower)
        upper = np.asarray(self.upper)
        inside = np.all((coords[:, :-1] >= lower[:-1]) & (coords[:, :-1] < upper[:-1]), axis=1)
        return inside & (coords[:, -1] > lower[-1]) & (coords[:, -1] <= upper[-1])


def _seed_record(seed) -> Optional[int]:
    if isinstance(seed, np.random.Generator):
        return None
    return int(seed)


def _uniform_interior(rng: np.random.Generator, shape) -> np.ndarray:
    # Generator.random draws from [0, 1); zero is the only value outside the open cube
    values = rng.random(shape)
    zeros = values == 0.0
    while np.any(zeros):
        values[zeros] = rng.random(int(zeros.sum()))
        zeros = values == 0.0
    return values


def _redraw_collisions(coords: np.ndarray, rng: np.random.Generator) -> None:
    """Redraw the later point's last coordinate until all last coordinates differ."""
    while len(coords) > 1:
        order = np.argsort(coords[:, -1], kind='stable')
        sorted_heights = coords[order, -1]
        equal = np.flatnonzero(sorted_heights[1:] == sorted_heights[:-1])
        if equal.size == 0:
            return
        later = np.maximum(order[equal], order[equal + 1])
        logger.debug("Redrawing %d colliding last coordinates", len(later))
        coords[later, -1] = _uniform_interior(rng, len(later))


def sample_binomial_cloud(count: int, dim: int, seed) -> PointCloud:
    """Exactly ``count`` independent uniform points in (0,1)^dim."""
    dim = _check_dim(dim)
    if int(count) != count or count < 1:
        raise InvalidParameterError(f"Point count must be a positive integer, got {count}")
    rng = as_generator(seed)
    coords = _uniform_interior(rng, (int(count), dim))
    _redraw_collisions(coords, rng)
    return PointCloud(coords, seed=_seed_record(seed),
                      intensity=float(count), process=BINOMIAL)


def sample_poisson_cloud(intensity: float, dim: int, seed) -> PointCloud:
    """Homogeneous Poisson process of the given intensity on (0,1)^dim."""
    dim = _check_dim(dim)
    if not intensity > 0:
        raise InvalidParameterError(f"Intensity must be positive, got {intensity}")
    rng = as_generator(seed)
    count = int(rng.poisson(intensity))
    logger.debug("Poisson cloud: intensity %s, %d points", intensity, count)
    coords = _uniform_interior(rng, (count, dim))
    _redraw_collisions(coords, rng)
    return PointCloud(coords, seed=_seed_record(seed),
                      intensity=float(intensity), process=POISSON)


def sample_cloud(process: str, intensity: float, dim: int, seed) -> PointCloud:
    """Dispatch on the process name; binomial clouds use round(intensity) points."""
    if process == POISSON:
        return sample_poisson_cloud(intensity, dim, seed)
    if process == BINOMIAL:
        return sample_binomial_cloud(max(1, int(round(intensity))), dim, seed)
    raise InvalidParameterError(f"Unknown point process '{process}', expected one of {PROCESSES}")


def arrival_order(cloud: PointCloud) -> np.ndarray:
    """Permutation listing point indices by ascending last coordinate."""
    return np.argsort(cloud.heights, kind='stable')


def project_drop_last(cloud: PointCloud) -> np.ndarray:
    """
    Project a cloud down the last axis.

    Returns an (m, dim-1) array ordered by ascending last coordinate, which is
    the arrival order of the on-line nearest-neighbour graph.
    """
    if cloud.dim < 2:
        raise InvalidDimensionError("Cannot project a 1-dimensional cloud")
    return cloud.coords[arrival_order(cloud), :-1]
