"""
This module contains the cone-punctured metric spaces (S, d, C) and their
scalar multiplication.

Three spaces are built in: R^dim with the origin removed, R^dim with the
coordinate hyperplanes removed, and the product [0, inf) x S whose first
coordinate is a time axis. Points are plain numpy vectors; batches of
points are 2-d arrays with one point per row.
"""

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial.distance import cdist

from models.errors import InputError, UnsupportedError


class SpaceKind(str, enum.Enum):
    EUCLIDEAN_ORIGIN = "euclidean-origin"
    EUCLIDEAN_AXES = "euclidean-axes"
    PRODUCT_TIME = "product-time"


@dataclass(frozen=True)
class SpaceDescriptor:
    """
    Class representing a metric space with a closed cone removed.

    Attributes:
        kind (SpaceKind): Which cone is removed.
        dim (int): Ambient dimension of the S factor.
        base (SpaceDescriptor): The S factor of a product-time space.
    """

    kind: SpaceKind
    dim: int
    base: Optional["SpaceDescriptor"] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", SpaceKind(self.kind))
        if int(self.dim) != self.dim or self.dim < 1:
            raise InputError(f"dimension must be a positive integer, "
                             f"got {self.dim}")
        if self.kind is SpaceKind.EUCLIDEAN_AXES and self.dim < 2:
            raise InputError("euclidean-axes needs dim >= 2")
        if self.kind is SpaceKind.PRODUCT_TIME:
            if self.base is None:
                raise InputError("product-time space needs a base space")
            if self.base.kind is SpaceKind.PRODUCT_TIME:
                raise UnsupportedError("nested product-time spaces")
            if self.base.dim != self.dim:
                raise InputError("product-time dim must equal base dim")
        elif self.base is not None:
            raise InputError(f"{self.kind.value} space takes no base")

    @property
    def has_time(self):
        return self.kind is SpaceKind.PRODUCT_TIME

    @property
    def point_size(self):
        """Length of a coordinate vector, time included."""
        return self.dim + 1 if self.has_time else self.dim

    @property
    def ground(self):
        """The S factor (the space itself unless product-time)."""
        return self.base if self.has_time else self

    def space_coords(self, points):
        """View of the S coordinates of a point or batch."""
        points = np.asarray(points, dtype=float)
        return points[..., 1:] if self.has_time else points


def euclidean_origin(dim=1):
    return SpaceDescriptor(SpaceKind.EUCLIDEAN_ORIGIN, dim)


def euclidean_axes(dim=2):
    return SpaceDescriptor(SpaceKind.EUCLIDEAN_AXES, dim)


def make_product_space(base):
    """
    Build [0, inf) x S with cone [0, inf) x C.

    Args:
        base (SpaceDescriptor): A euclidean-origin or euclidean-axes space.

    Returns:
        SpaceDescriptor: The product-time space over ``base``.

    Raises:
        UnsupportedError: If ``base`` is itself product-time.
    """
    if base.kind is SpaceKind.PRODUCT_TIME:
        raise UnsupportedError("cannot nest product-time spaces")
    return SpaceDescriptor(SpaceKind.PRODUCT_TIME, base.dim, base)


def as_points(space, points):
    """
    Validate a point or a batch of points against ``space``.

    Returns:
        numpy.ndarray: Float array, 1-d for a point, 2-d for a batch.

    Raises:
        InputError: On wrong length, non-finite entries or negative time.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim not in (1, 2) or points.shape[-1] != space.point_size:
        raise InputError(
            f"expected points of length {space.point_size} for "
            f"{space.kind.value} space, got shape {points.shape}")
    if not np.all(np.isfinite(points)):
        raise InputError("point coordinates must be finite")
    if space.has_time and np.any(points[..., 0] < 0):
        raise InputError("time coordinate must be nonnegative")
    return points


def _ground_cone_distance(kind, coords):
    if kind is SpaceKind.EUCLIDEAN_ORIGIN:
        return np.linalg.norm(coords, axis=-1)
    return np.min(np.abs(coords), axis=-1)


def cone_distance(space, x):
    """
    Exact distance d(x, C) from a point (or each row of a batch) to the cone.

    For product-time spaces only the S coordinates matter.
    """
    x = as_points(space, x)
    dist = _ground_cone_distance(space.ground.kind, space.space_coords(x))
    return float(dist) if x.ndim == 1 else dist


def scale(space, lam, x):
    """
    Scalar multiplication (lam, x) -> lam x.

    On product-time spaces the time coordinate is left unchanged.

    Raises:
        InputError: If ``lam`` is negative.
    """
    if lam < 0:
        raise InputError(f"scalar must be nonnegative, got {lam}")
    x = as_points(space, x)
    out = np.array(x, dtype=float)
    if space.has_time:
        out[..., 1:] *= lam
    else:
        out *= lam
    return out


def distance(space, x, y):
    """
    Metric d(x, y).

    Every supported space is Euclidean in its coordinates; on product-time
    spaces this is the square root of the summed squares of the time and
    S distances.
    """
    x = as_points(space, x)
    y = as_points(space, y)
    if x.ndim != 1 or y.ndim != 1:
        raise InputError("distance takes two single points")
    return float(np.linalg.norm(x - y))


def pairwise_distances(space, xs, ys):
    """Distance matrix between two batches of points."""
    xs = as_points(space, np.reshape(xs, (-1, space.point_size)))
    ys = as_points(space, np.reshape(ys, (-1, space.point_size)))
    if len(xs) == 0 or len(ys) == 0:
        return np.zeros((len(xs), len(ys)))
    return cdist(xs, ys)
