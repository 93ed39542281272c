"""Foundational types and the measure-estimation engine.

A deterministic two-wing model assigns outcomes A(a, b, lambda) and
B(a, b, lambda) in {+1, -1} to every pair of detector settings, where the
hidden variable lambda lives on the unit hypercube [0, 1)^d and carries a
probability density.  Everything downstream (transition sets, bound
evaluation, the communication game) reduces to measures of indicator-defined
subsets of the hypercube, so this module owns the two integration schemes:

* a midpoint grid, exact for the axis-aligned threshold geometry of the
  built-in models, and
* seeded Monte Carlo with counter-based streams, bit-reproducible and
  independent of how the sample range is partitioned into blocks.

Batch convention
----------------
Outcome functions, densities and indicators accept a numpy array whose last
axis holds the coordinates of one lambda (shape ``(..., d)``) and return an
array of the leading shape.  The engine always calls them with 2-D blocks of
at most ``2**20`` points.  Scalar single-point functions can be adapted with
:func:`vectorize_over_points` / :func:`vectorize_outcome`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator, Union

import numpy as np

TAU = 2.0 * math.pi

#: Fixed block size for grid and Monte Carlo sweeps.  Results do not depend
#: on it for the grid (pure summation) and not for Monte Carlo either, since
#: every block gets its own counter-derived stream; it is a constant so that
#: runs are bit-identical.
BLOCK_SIZE = 1 << 20

_MAX_GRID_CELLS = 1 << 26

# Grid sums of a rounded density may overshoot an exact unit measure by a few
# ulp; anything under this slack snaps back to 1, anything above it surfaces
# as an invalid measure downstream.
_UNIT_SNAP = 1e-9

#: Context labels in canonical order: (a,b), (a',b), (a',b'), (a,b').
CONTEXT_LABELS = ("ab", "a'b", "a'b'", "ab'")


class NumericalInvariantError(RuntimeError):
    """A built-in mathematical identity failed beyond tolerance.

    Raised when the data produced by a sweep contradicts an identity that
    holds for every deterministic model (for example the sign-parity rule),
    which signals a defect rather than a user error.
    """


def normalize_radians(radians: float) -> float:
    """Map a finite angle to its representative in [0, 2*pi)."""
    value = float(radians)
    if not math.isfinite(value):
        raise ValueError(f"angle must be finite, got {value!r}")
    value = math.fmod(value, TAU)
    if value < 0.0:
        value += TAU
    # adding TAU to a tiny negative rounds to TAU itself; fold it back
    if value >= TAU:
        value = 0.0
    return value


@dataclass(frozen=True)
class Angle:
    """A detector setting in radians, stored normalized into [0, 2*pi)."""

    radians: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "radians", normalize_radians(self.radians))


def make_angle(radians: float) -> Angle:
    """Return the normalized :class:`Angle` for any finite radian value."""
    return Angle(radians)


def theta_between(x: Angle, y: Angle) -> float:
    """Signed separation between two settings, as fed to cos(theta).

    The representative is the raw difference of the stored normalized
    values, a number in (-2*pi, 2*pi).  Only its cosine is consumed
    downstream, so the representative choice is immaterial as long as it is
    used consistently; this one is.
    """
    return x.radians - y.radians


@dataclass(frozen=True)
class AngleQuadruple:
    """The four settings a, a' (left wing) and b, b' (right wing).

    Degenerate quadruples with repeated angles are allowed.  The four
    measurement contexts are enumerated in the canonical order
    (a,b), (a',b), (a',b'), (a,b').
    """

    a: Angle
    a_prime: Angle
    b: Angle
    b_prime: Angle

    @classmethod
    def chain(cls, theta: float) -> "AngleQuadruple":
        """Quadruple with a-b = b-a' = a'-b' = theta, hence a-b' = 3*theta."""
        return cls(
            a=make_angle(3.0 * theta),
            a_prime=make_angle(theta),
            b=make_angle(2.0 * theta),
            b_prime=make_angle(0.0),
        )

    def contexts(self) -> tuple[tuple[Angle, Angle], ...]:
        """(alice, bob) setting pairs in canonical context order."""
        return (
            (self.a, self.b),
            (self.a_prime, self.b),
            (self.a_prime, self.b_prime),
            (self.a, self.b_prime),
        )

    def context_thetas(self) -> tuple[float, float, float, float]:
        """theta_between(alice, bob) for each context, canonical order."""
        ts = tuple(theta_between(alice, bob) for alice, bob in self.contexts())
        return ts  # type: ignore[return-value]

    def named_angles(self) -> dict[str, Angle]:
        return {"a": self.a, "a'": self.a_prime, "b": self.b, "b'": self.b_prime}


@dataclass(frozen=True)
class LambdaSpace:
    """The hidden-variable space [0, 1)^dimension."""

    dimension: int

    def __post_init__(self) -> None:
        if not isinstance(self.dimension, int) or self.dimension < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.dimension!r}")


DensityFn = Callable[[np.ndarray], np.ndarray]
SamplerFn = Callable[[np.random.Generator, int], np.ndarray]


@dataclass(frozen=True)
class Distribution:
    """A probability density on a :class:`LambdaSpace`.

    ``density`` follows the batch convention and must be non-negative with
    total mass 1 over the hypercube.  ``sampler``, when present, draws exact
    samples ``(rng, n) -> array (n, d)``; it is required only by consumers
    that need realized lambdas (the communication game) rather than
    integrals, which are always density-weighted uniform sweeps.
    """

    space: LambdaSpace
    density: DensityFn
    label: str
    sampler: SamplerFn | None = None


def uniform_distribution(space: LambdaSpace, label: str = "equilibrium") -> Distribution:
    def density(coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.float64)
        return np.ones(coords.shape[:-1], dtype=np.float64)

    def sampler(rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.random((n, space.dimension))

    return Distribution(space=space, density=density, label=label, sampler=sampler)


OutcomeFn = Callable[[Angle, Angle, np.ndarray], np.ndarray]

LOCALITY_TAGS = ("local", "nonlocal", "unknown")


@dataclass(frozen=True)
class HvModel:
    """A deterministic outcome-function pair over a hidden-variable space.

    ``outcome_a(a, b, coords)`` and ``outcome_b(a, b, coords)`` follow the
    batch convention and must return +1/-1 integer arrays.  The locality tag
    is metadata: "local" promises that outcome_a ignores b and outcome_b
    ignores a, which :func:`probe_locality` spot-checks.
    """

    name: str
    space: LambdaSpace
    outcome_a: OutcomeFn
    outcome_b: OutcomeFn
    equilibrium: Distribution
    locality_tag: str = "unknown"

    def __post_init__(self) -> None:
        if self.locality_tag not in LOCALITY_TAGS:
            raise ValueError(f"locality_tag must be one of {LOCALITY_TAGS}, got {self.locality_tag!r}")


@dataclass(frozen=True)
class GridScheme:
    """Midpoint rule on resolution^dimension cells; deterministic and exact
    for piecewise-constant integrands whose thresholds avoid cell centers."""

    resolution: int

    def __post_init__(self) -> None:
        if not isinstance(self.resolution, int) or self.resolution <= 0:
            raise ValueError(f"grid resolution must be a positive integer, got {self.resolution!r}")

    @property
    def seed(self) -> int | None:
        return None

    @property
    def label(self) -> str:
        return f"grid({self.resolution})"


@dataclass(frozen=True)
class MonteCarloScheme:
    """Mean over n uniform samples from a seeded counter-based generator."""

    n: int
    seed: int

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n <= 0:
            raise ValueError(f"sample count must be a positive integer, got {self.n!r}")
        _check_seed(self.seed)

    @property
    def label(self) -> str:
        return f"monte_carlo(n={self.n},seed={self.seed})"


Scheme = Union[GridScheme, MonteCarloScheme]


def default_grid_resolution(dimension: int) -> int:
    """1024 cells per axis up to dimension 2, shrinking powers of two above."""
    if dimension <= 2:
        return 1024
    return 2 ** max(1, 20 // dimension)


@dataclass(frozen=True)
class MeasureEstimate:
    """A measure value in [0, 1] with its standard error and scheme."""

    value: float
    std_error: float
    scheme: Scheme

    def __post_init__(self) -> None:
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"measure value must lie in [0, 1], got {self.value!r}")
        if self.std_error < 0.0:
            raise ValueError(f"std_error must be non-negative, got {self.std_error!r}")

    @property
    def seed(self) -> int | None:
        return self.scheme.seed if isinstance(self.scheme, MonteCarloScheme) else None


def _check_seed(seed: int) -> None:
    if not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ValueError(f"seed must be an integer in [0, 2**64), got {seed!r}")


def derived_stream(seed: int, domain: int, block_index: int) -> np.random.Generator:
    """Counter-based generator for one (seed, domain, block) triple.

    The key holds (seed, domain); the block index sits in the highest
    counter word, so the streams of different blocks can never overlap and
    the result of a partitioned sweep does not depend on the partitioning.
    """
    _check_seed(seed)
    key = np.array([seed, domain], dtype=np.uint64)
    counter = np.zeros(4, dtype=np.uint64)
    counter[3] = block_index
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def _grid_blocks(dimension: int, resolution: int) -> Iterator[np.ndarray]:
    total = resolution**dimension
    if total > _MAX_GRID_CELLS:
        raise ValueError(
            f"grid of {resolution}^{dimension} = {total} cells exceeds the "
            f"{_MAX_GRID_CELLS}-cell limit; lower the resolution"
        )
    for start in range(0, total, BLOCK_SIZE):
        stop = min(start + BLOCK_SIZE, total)
        flat = np.arange(start, stop, dtype=np.int64)
        coords = np.empty((stop - start, dimension), dtype=np.float64)
        for axis in range(dimension - 1, -1, -1):
            flat, remainder = np.divmod(flat, resolution)
            coords[:, axis] = (remainder + 0.5) / resolution
        yield coords


def _mc_blocks(dimension: int, n: int, seed: int, domain: int) -> Iterator[np.ndarray]:
    for block_index, start in enumerate(range(0, n, BLOCK_SIZE)):
        m = min(BLOCK_SIZE, n - start)
        rng = derived_stream(seed, domain, block_index)
        yield rng.random((m, dimension))


MasksFn = Callable[[np.ndarray], np.ndarray]


def sweep_statistics(
    dist: Distribution,
    scheme: Scheme,
    masks_fn: MasksFn,
    n_stats: int,
    *,
    domain: int = 0,
) -> tuple[np.ndarray, np.ndarray]:
    """Estimate several set measures in one pass over the hypercube.

    ``masks_fn(coords)`` receives a block of points with shape (m, d) and
    returns a boolean array of shape (n_stats, m); statistic k is the
    integral of ``density * masks[k]``.  Returns ``(values, std_errors)``.

    Grid scheme: values are sums of density over selected cells divided by
    the cell count once at the end, so uniform-density measures are exact
    ratios of integers; std_errors are 0.  Monte Carlo: values are
    density-weighted sample means clipped to [0, 1], std_errors the sample
    standard deviation (ddof=1) over sqrt(n).
    """
    dimension = dist.space.dimension
    sums = np.zeros(n_stats, dtype=np.float64)
    if isinstance(scheme, GridScheme):
        for coords in _grid_blocks(dimension, scheme.resolution):
            weights = _density_values(dist, coords)
            masks = _mask_values(masks_fn, coords, n_stats)
            for k in range(n_stats):
                sums[k] += weights[masks[k]].sum()
        total_cells = float(scheme.resolution) ** dimension
        values = sums / total_cells
        values = np.where((values > 1.0) & (values <= 1.0 + _UNIT_SNAP), 1.0, values)
        return values, np.zeros(n_stats, dtype=np.float64)
    if isinstance(scheme, MonteCarloScheme):
        squares = np.zeros(n_stats, dtype=np.float64)
        for coords in _mc_blocks(dimension, scheme.n, scheme.seed, domain):
            weights = _density_values(dist, coords)
            weights_sq = weights * weights
            masks = _mask_values(masks_fn, coords, n_stats)
            for k in range(n_stats):
                sums[k] += weights[masks[k]].sum()
                squares[k] += weights_sq[masks[k]].sum()
        n = scheme.n
        values = sums / n
        if n > 1:
            variances = np.maximum(squares - n * values * values, 0.0) / (n - 1)
            std_errors = np.sqrt(variances / n)
        else:
            std_errors = np.zeros(n_stats, dtype=np.float64)
        return np.clip(values, 0.0, 1.0), std_errors
    raise ValueError(f"unknown scheme {scheme!r}")


def _density_values(dist: Distribution, coords: np.ndarray) -> np.ndarray:
    weights = np.asarray(dist.density(coords), dtype=np.float64)
    if weights.shape != coords.shape[:-1]:
        raise ValueError(
            f"density returned shape {weights.shape} for a block of shape {coords.shape}"
        )
    if np.any(weights < 0.0):
        raise ValueError(f"density of {dist.label!r} is negative somewhere")
    return weights


def _mask_values(masks_fn: MasksFn, coords: np.ndarray, n_stats: int) -> np.ndarray:
    masks = np.asarray(masks_fn(coords))
    if masks.dtype != np.bool_ or masks.shape != (n_stats, coords.shape[0]):
        raise ValueError(
            f"masks function must return a ({n_stats}, m) boolean array, got "
            f"{masks.dtype} of shape {masks.shape}"
        )
    return masks


IndicatorFn = Callable[[np.ndarray], np.ndarray]


def estimate_measure(dist: Distribution, indicator: IndicatorFn, scheme: Scheme) -> MeasureEstimate:
    """Measure of ``{lambda : indicator(lambda)}`` under ``dist``."""

    def masks_fn(coords: np.ndarray) -> np.ndarray:
        mask = np.asarray(indicator(coords), dtype=bool)
        return mask.reshape(1, -1)

    values, std_errors = sweep_statistics(dist, scheme, masks_fn, 1)
    return MeasureEstimate(float(values[0]), float(std_errors[0]), scheme)


def check_normalization(dist: Distribution, scheme: Scheme) -> MeasureEstimate:
    """Total mass of the density; should be 1 within the scheme tolerance."""
    return estimate_measure(dist, lambda coords: np.ones(coords.shape[0], dtype=bool), scheme)


def as_lambda_point(lam: object, space: LambdaSpace) -> np.ndarray:
    """Validate one lambda as a float vector of the space's dimension."""
    point = np.asarray(lam, dtype=np.float64)
    if point.shape != (space.dimension,):
        raise ValueError(
            f"lambda has shape {point.shape}, expected ({space.dimension},)"
        )
    if np.any(point < 0.0) or np.any(point >= 1.0):
        raise ValueError(f"lambda coordinates must lie in [0, 1), got {point!r}")
    return point


def context_outcomes(
    model: HvModel, quadruple: AngleQuadruple, coords: np.ndarray
) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Evaluate (A, B) in all four contexts for a block of points."""
    results = []
    for alice, bob in quadruple.contexts():
        results.append(
            (
                _checked_outcomes(model.outcome_a, alice, bob, coords, model.name, "A"),
                _checked_outcomes(model.outcome_b, alice, bob, coords, model.name, "B"),
            )
        )
    return tuple(results)


def _checked_outcomes(
    fn: OutcomeFn, alice: Angle, bob: Angle, coords: np.ndarray, name: str, wing: str
) -> np.ndarray:
    values = np.asarray(fn(alice, bob, coords))
    if values.shape != coords.shape[:-1]:
        raise ValueError(
            f"{wing} outcomes of model {name!r} have shape {values.shape} "
            f"for a block of shape {coords.shape}"
        )
    if not np.all(np.abs(values) == 1):
        raise ValueError(f"{wing} outcomes of model {name!r} are not all +1/-1")
    return values


def evaluate_pair(model: HvModel, a: Angle, b: Angle, lam: object) -> tuple[int, int]:
    """Both wings' outcomes at one setting pair and one lambda."""
    point = as_lambda_point(lam, model.space)
    block = point.reshape(1, -1)
    value_a = _checked_outcomes(model.outcome_a, a, b, block, model.name, "A")
    value_b = _checked_outcomes(model.outcome_b, a, b, block, model.name, "B")
    return int(value_a[0]), int(value_b[0])


def probe_determinism(model: HvModel, n_probes: int = 1000, seed: int = 2024) -> bool:
    """Evaluate n random (angles, lambda) probes twice; True if all agree."""
    rng = derived_stream(seed, 101, 0)
    for _ in range(n_probes):
        a = make_angle(float(rng.random()) * TAU)
        b = make_angle(float(rng.random()) * TAU)
        lam = rng.random(model.space.dimension)
        if evaluate_pair(model, a, b, lam) != evaluate_pair(model, a, b, lam):
            return False
    return True


def probe_locality(model: HvModel, n_probes: int = 1000, seed: int = 2024) -> bool:
    """Check that each wing's outcome ignores the other wing's setting.

    Draws n random (a, a', b, b', lambda) tuples; True if outcome_a never
    responds to the b swap and outcome_b never responds to the a swap.
    """
    rng = derived_stream(seed, 102, 0)
    for _ in range(n_probes):
        a = make_angle(float(rng.random()) * TAU)
        a_alt = make_angle(float(rng.random()) * TAU)
        b = make_angle(float(rng.random()) * TAU)
        b_alt = make_angle(float(rng.random()) * TAU)
        lam = rng.random(model.space.dimension)
        point = as_lambda_point(lam, model.space).reshape(1, -1)
        same_a = model.outcome_a(a, b, point) == model.outcome_a(a, b_alt, point)
        same_b = model.outcome_b(a, b, point) == model.outcome_b(a_alt, b, point)
        if not (bool(np.all(same_a)) and bool(np.all(same_b))):
            return False
    return True


def vectorize_over_points(fn: Callable[[np.ndarray], object]) -> Callable[[np.ndarray], np.ndarray]:
    """Adapt a single-point function to the batch convention.

    ``fn`` receives one coordinate vector of shape (d,) and returns a
    scalar; the wrapper maps it over any (..., d) batch.  Intended for user
    densities or indicators written without numpy broadcasting.
    """

    def batched(coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.float64)
        flat = coords.reshape(-1, coords.shape[-1])
        out = np.asarray([fn(point) for point in flat])
        return out.reshape(coords.shape[:-1])

    return batched


def vectorize_outcome(fn: Callable[[Angle, Angle, np.ndarray], object]) -> OutcomeFn:
    """Adapt a single-point outcome function to the batch convention."""

    def batched(a: Angle, b: Angle, coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.float64)
        flat = coords.reshape(-1, coords.shape[-1])
        out = np.asarray([fn(a, b, point) for point in flat], dtype=np.int64)
        return out.reshape(coords.shape[:-1])

    return batched
