"""
Experiment configuration, with optional YAML files.

A YAML config is a mapping of ExperimentConfig field names, for example::

    d: 2
    alpha: 1.0
    intensity_grid: [1000, 10000]
    replicates: 50
    tolerances:
      ks_normal: 0.08
"""

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml

from mdst_utils.errors import InvalidParameterError
from mdst_utils.fixed_point import DEFAULT_COEFF_TOL
from mdst_utils.geometry import PROCESSES
from mdst_utils.graphs import STRATEGIES


@dataclass(frozen=True)
class Tolerances:
    """Acceptance thresholds for finite-n checks."""
    ks_normal: float = 0.08
    ks_limit: float = 0.15
    ks_longest: float = 0.1
    lln_relative: float = 0.03
    expectation_relative: float = 0.10


@dataclass(frozen=True)
class ExperimentConfig:
    d: int = 2
    alpha: float = 1.0
    intensity_grid: List[float] = field(default_factory=lambda: [10000.0])
    replicates: int = 100
    epsilon: float = 0.05
    process: str = 'poisson'
    master_seed: int = 0
    strategy: str = 'indexed'
    workers: int = 1
    boundary_height: Optional[float] = None
    coeff_tol: float = DEFAULT_COEFF_TOL
    reference_samples: int = 10000
    tolerances: Tolerances = field(default_factory=Tolerances)

    def gamma_floor(self, n: float) -> float:
        """g_n = n^(epsilon - 1/d), the bottom of the interior region."""
        return n ** (self.epsilon - 1.0 / self.d)

    def slab_height(self, n: float) -> float:
        """t_n = n^(-1/2 - epsilon), unless a fixed boundary height is configured."""
        if self.boundary_height is not None:
            return self.boundary_height
        return n ** (-0.5 - self.epsilon)

    @property
    def largest_intensity(self) -> float:
        return max(self.intensity_grid)

    def validate(self) -> 'ExperimentConfig':
        """Raise InvalidParameterError on the first broken constraint; return self otherwise."""
        if int(self.d) != self.d or self.d < 1:
            raise InvalidParameterError(f"d must be a positive integer, got {self.d}")
        if not self.alpha > 0:
            raise InvalidParameterError(f"alpha must be positive, got {self.alpha}")
        if int(self.replicates) != self.replicates or self.replicates < 1:
            raise InvalidParameterError(f"replicates must be a positive integer, got {self.replicates}")
        if int(self.workers) != self.workers or self.workers < 1:
            raise InvalidParameterError(f"workers must be a positive integer, got {self.workers}")
        if self.master_seed < 0:
            raise InvalidParameterError(f"seed must be non-negative, got {self.master_seed}")
        if self.process not in PROCESSES:
            raise InvalidParameterError(f"process must be one of {PROCESSES}, got '{self.process}'")
        if self.strategy not in STRATEGIES:
            raise InvalidParameterError(f"strategy must be one of {STRATEGIES}, got '{self.strategy}'")
        if not self.coeff_tol > 0:
            raise InvalidParameterError(f"coeff_tol must be positive, got {self.coeff_tol}")
        if self.reference_samples < 1:
            raise InvalidParameterError("reference_samples must be positive")
        if not self.intensity_grid:
            raise InvalidParameterError("intensity_grid must list at least one intensity")
        if not 0 < self.epsilon < 1.0 / (2 * self.d):
            raise InvalidParameterError(f"epsilon must lie in (0, 1/(2d)) = (0, {1.0 / (2 * self.d)}), got {self.epsilon}")
        if self.boundary_height is not None and not self.boundary_height > 0:
            raise InvalidParameterError(f"boundary_height must be positive, got {self.boundary_height}")
        for n in self.intensity_grid:
            if not n > 0:
                raise InvalidParameterError(f"intensities must be positive, got {n}")
            g_n = self.gamma_floor(n)
            if not g_n < 1:
                raise InvalidParameterError(f"g_n = {g_n:.4g} is not below 1 at n = {n}")
            if self.boundary_height is None and not self.slab_height(n) < g_n:
                raise InvalidParameterError(f"t_n = {self.slab_height(n):.4g} is not below g_n = {g_n:.4g} at n = {n}")
        return self

    def with_overrides(self, **overrides: Any) -> 'ExperimentConfig':
        """Copy with every non-None override applied."""
        return dataclasses.replace(self, **{k: v for k, v in overrides.items() if v is not None})


_FIELDS = {f.name for f in dataclasses.fields(ExperimentConfig)}
_TOLERANCE_FIELDS = {f.name for f in dataclasses.fields(Tolerances)}


def config_from_mapping(data: Dict[str, Any]) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise InvalidParameterError("Config must be a mapping of field names to values")
    unknown = set(data) - _FIELDS
    if unknown:
        raise InvalidParameterError(f"Unknown config keys: {', '.join(sorted(unknown))}")
    values = dict(data)
    if 'tolerances' in values:
        tolerances = values['tolerances'] or {}
        bad = set(tolerances) - _TOLERANCE_FIELDS
        if bad:
            raise InvalidParameterError(f"Unknown tolerance keys: {', '.join(sorted(bad))}")
        values['tolerances'] = Tolerances(**tolerances)
    if 'intensity_grid' in values:
        grid = values['intensity_grid']
        values['intensity_grid'] = [float(n) for n in (grid if isinstance(grid, list) else [grid])]
    return ExperimentConfig(**values)


def load_config(path) -> ExperimentConfig:
    """Read an ExperimentConfig from a YAML file."""
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = yaml.safe_load(f) or {}
    except (OSError, yaml.YAMLError) as e:
        raise InvalidParameterError(f"Could not read config {path}: {e}")
    return config_from_mapping(data)
