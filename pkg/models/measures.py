"""
This module contains finite atomic measures, homogeneous limit measures
and the tail sets their masses are evaluated on.
"""

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy.spatial.distance import cdist

from models.cone_space import as_points, cone_distance
from models.errors import InputError

INTEGER_TOLERANCE = 1e-9
DIRECTION_TOLERANCE = 1e-9


class Atom(NamedTuple):
    location: tuple
    weight: float


class Decomposition(NamedTuple):
    """
    Atomic plus diffuse split of a measure. ``diffuse`` is always None:
    diffuse components cannot be represented.
    """
    atomic: "AtomicMeasure"
    diffuse: None = None


def _frozen(array):
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class AtomicMeasure:
    """
    Class representing a finite weighted sum of point masses on O = S \\ C.

    Attributes:
        space (SpaceDescriptor): The space the atoms live in.
        locations (numpy.ndarray): One atom location per row.
        weights (numpy.ndarray): Positive atom weights.
    """

    space: object
    locations: np.ndarray
    weights: np.ndarray
    _cone_distances: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        locations = np.asarray(self.locations, dtype=float).reshape(
            -1, self.space.point_size)
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        if len(locations) != len(weights):
            raise InputError("one weight per atom is required")
        if np.any(~np.isfinite(weights)) or np.any(weights <= 0):
            raise InputError("atom weights must be positive and finite")
        locations = as_points(self.space, locations)
        distances = np.asarray(cone_distance(self.space, locations))
        if np.any(distances <= 0):
            raise InputError("atoms must lie outside the cone")
        object.__setattr__(self, "locations", _frozen(np.array(locations)))
        object.__setattr__(self, "weights", _frozen(np.array(weights)))
        object.__setattr__(self, "_cone_distances", _frozen(distances))

    @classmethod
    def from_atoms(cls, space, atoms):
        atoms = list(atoms)
        if not atoms:
            return cls.empty(space)
        locations = [np.ravel(np.asarray(loc, dtype=float))
                     for loc, _ in atoms]
        return cls(space, np.vstack(locations),
                   np.array([w for _, w in atoms], dtype=float))

    @classmethod
    def empty(cls, space):
        return cls(space, np.zeros((0, space.point_size)), np.zeros(0))

    def __len__(self):
        return len(self.weights)

    @property
    def atoms(self):
        return [Atom(tuple(loc.tolist()), float(w))
                for loc, w in zip(self.locations, self.weights)]

    @property
    def cone_distances(self):
        return self._cone_distances

    @property
    def total_mass(self):
        return math.fsum(self.weights)

    def subset(self, mask):
        """Measure made of the atoms selected by a boolean mask."""
        mask = np.asarray(mask, dtype=bool)
        return AtomicMeasure(self.space, self.locations[mask],
                             self.weights[mask])

    def canonical(self):
        """
        Merge atoms at equal locations and sort them lexicographically.
        """
        if len(self) == 0:
            return self
        unique, inverse = np.unique(self.locations, axis=0,
                                    return_inverse=True)
        weights = np.bincount(inverse.reshape(-1), weights=self.weights,
                              minlength=len(unique))
        return AtomicMeasure(self.space, unique, weights)

    def same_atoms(self, other):
        """True when both canonical forms have identical atoms."""
        a, b = self.canonical(), other.canonical()
        return (a.space == b.space
                and np.array_equal(a.locations, b.locations)
                and np.array_equal(a.weights, b.weights))


@dataclass(frozen=True, eq=False)
class HomogeneousMeasure:
    """
    Class representing a limit measure with tail index ``alpha`` and a
    discrete angular part: the mass of {cone_distance > u, direction
    omega_k} is w_k * u ** -alpha.

    Attributes:
        space (SpaceDescriptor): The S space (never product-time).
        alpha (float): Tail index.
        directions (numpy.ndarray): Angular atoms, cone_distance 1 each.
        weights (numpy.ndarray): Angular weights.
    """

    space: object
    alpha: float
    directions: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if self.space.has_time:
            raise InputError("homogeneous measures live on the S factor")
        if not self.alpha > 0:
            raise InputError(f"alpha must be positive, got {self.alpha}")
        directions = as_points(
            self.space, np.asarray(self.directions, dtype=float).reshape(
                -1, self.space.point_size))
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        if len(directions) == 0 or len(directions) != len(weights):
            raise InputError("angular part needs one weight per direction")
        if np.any(weights <= 0):
            raise InputError("angular weights must be positive")
        norms = np.asarray(cone_distance(self.space, directions))
        if np.any(np.abs(norms - 1.0) > 1e-12):
            raise InputError("angular directions must have cone distance 1")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "directions", _frozen(np.array(directions)))
        object.__setattr__(self, "weights", _frozen(np.array(weights)))

    @classmethod
    def from_angular(cls, space, alpha, angular):
        """
        Args:
            angular (list): ``(omega, w)`` pairs.
        """
        omegas, weights = zip(*angular)
        return cls(space, alpha, np.vstack(omegas), np.array(weights))

    @property
    def angular(self):
        return [(tuple(omega.tolist()), float(w))
                for omega, w in zip(self.directions, self.weights)]

    @property
    def total_weight(self):
        return math.fsum(self.weights)

    def radial_tail(self, u):
        """Mass of {cone_distance > u} over all directions."""
        return self.total_weight * u ** -self.alpha


@dataclass(frozen=True)
class TailSet:
    """
    Class representing a set bounded away from the cone:
    u_lo < cone_distance <= u_hi, optionally restricted to some angular
    directions and, on product-time spaces, to times t1 < t <= t2.
    """

    u_lo: float
    u_hi: float = math.inf
    directions: Optional[frozenset] = None
    time_window: Optional[tuple] = None

    def __post_init__(self):
        if self.u_hi is None:
            object.__setattr__(self, "u_hi", math.inf)
        if not 0 < self.u_lo < self.u_hi:
            raise InputError(
                f"tail set needs 0 < u_lo < u_hi, got ({self.u_lo}, "
                f"{self.u_hi})")
        if self.directions is not None:
            object.__setattr__(self, "directions",
                               frozenset(int(k) for k in self.directions))
        if self.time_window is not None:
            t1, t2 = (float(t) for t in self.time_window)
            if not 0 <= t1 < t2:
                raise InputError(f"time window needs 0 <= t1 < t2, got "
                                 f"({t1}, {t2})")
            object.__setattr__(self, "time_window", (t1, t2))

    def scaled(self, lam):
        """The set lam * A."""
        if not lam > 0:
            raise InputError("scaling factor must be positive")
        return TailSet(self.u_lo * lam, self.u_hi * lam, self.directions,
                       self.time_window)

    def window_length(self, horizon=None):
        if self.time_window is None:
            return 1.0 if horizon is None else float(horizon)
        t1, t2 = self.time_window
        hi = t2 if horizon is None else min(t2, horizon)
        return max(hi - t1, 0.0)

    def contains(self, space, points, reference=None):
        """
        Membership mask for a batch of points.

        Args:
            reference (HomogeneousMeasure): Needed to resolve directions.
        """
        points = np.asarray(points, dtype=float).reshape(-1, space.point_size)
        if self.time_window is not None and not space.has_time:
            raise InputError("time window given on a space without time")
        distances = np.asarray(cone_distance(space, points)) \
            if len(points) else np.zeros(0)
        mask = (distances > self.u_lo) & (distances <= self.u_hi)
        if self.time_window is not None:
            t1, t2 = self.time_window
            mask &= (points[:, 0] > t1) & (points[:, 0] <= t2)
        if self.directions is not None:
            if reference is None:
                raise InputError(
                    "a reference measure is needed to resolve directions")
            indices = direction_indices(reference, space, points)
            mask &= np.isin(indices, sorted(self.directions))
        return mask


def direction_indices(h, space, points):
    """
    Index of the angular atom of ``h`` each point lies on, or -1.
    """
    points = np.asarray(points, dtype=float).reshape(-1, space.point_size)
    if len(points) == 0:
        return np.zeros(0, dtype=int)
    coords = space.space_coords(points)
    distances = np.asarray(cone_distance(space, points))
    omegas = coords / distances[:, None]
    gaps = cdist(omegas, h.directions)
    nearest = np.argmin(gaps, axis=1)
    matched = gaps[np.arange(len(points)), nearest] <= DIRECTION_TOLERANCE
    return np.where(matched, nearest, -1)


def decompose(m):
    """
    Split ``m`` into its atomic and diffuse parts.

    The atomic part is the canonical form of ``m``; the diffuse part is
    always the null marker.
    """
    return Decomposition(m.canonical(), None)


def is_counting(m):
    """
    True iff every canonical weight is a positive integer (to 1e-9).
    """
    weights = m.canonical().weights
    rounded = np.round(weights)
    return bool(np.all(rounded >= 1)
                and np.all(np.abs(weights - rounded) <= INTEGER_TOLERANCE))


def restrict(m, r):
    """
    Restriction of ``m`` to the closed set S \\ C^r = {cone_distance >= r}.

    Raises:
        InputError: If r <= 0.
    """
    if not r > 0:
        raise InputError(f"restriction radius must be positive, got {r}")
    return m.subset(m.cone_distances >= r)


def tail_mass(h, A, time_horizon=None):
    """
    Exact mass of a tail set under ``h`` (times dt when A has a window).

    Args:
        h (HomogeneousMeasure): The limit measure.
        A (TailSet): The set.
        time_horizon (float): Clips the time window to [0, T].
    """
    if A.directions is None:
        weight = h.total_weight
    else:
        if any(k < 0 or k >= len(h.weights) for k in A.directions):
            raise InputError("tail set refers to an unknown direction")
        weight = math.fsum(h.weights[k] for k in sorted(A.directions))
    upper = 0.0 if math.isinf(A.u_hi) else A.u_hi ** -h.alpha
    radial = A.u_lo ** -h.alpha - upper
    return weight * radial * A.window_length(time_horizon)


def atomic_mass(m, A, reference=None):
    """Sum of the weights of the atoms of ``m`` inside ``A``."""
    if len(m) == 0:
        return 0.0
    mask = A.contains(m.space, m.locations, reference)
    return math.fsum(m.weights[mask])
