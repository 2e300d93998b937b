"""Box constraint set X and the Euclidean projection onto it."""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericError, ShapeError


@dataclass(frozen=True)
class Box:
    """Per-coordinate bounds; scalars broadcast to any dimension."""
    lower: object = -1000.0
    upper: object = 1000.0

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise DomainError("Box bounds must be finite")
        try:
            ok = np.all(lower < upper)
        except ValueError:
            raise ShapeError(f"Box bounds have mismatched shapes {lower.shape} and {upper.shape}")
        if not ok:
            raise DomainError(f"Box requires lower < upper, got [{self.lower}, {self.upper}]")

    def bounds(self, n):
        """Lower and upper bound vectors of length n."""
        lower = np.broadcast_to(np.asarray(self.lower, dtype=float), (n,))
        upper = np.broadcast_to(np.asarray(self.upper, dtype=float), (n,))
        return lower, upper

    @property
    def radius(self):
        """max |bound| over all coordinates, the b in the gradient bound."""
        return float(max(np.max(np.abs(self.lower)), np.max(np.abs(self.upper))))

    def contains(self, x, tol=0.0):
        lower, upper = self.bounds(np.shape(x)[-1])
        return bool(np.all(x >= lower - tol) and np.all(x <= upper + tol))

    def sample(self, rng, size):
        """Uniform points in the box; size is (count, n)."""
        lower, upper = self.bounds(size[-1])
        return rng.uniform(lower, upper, size=size)


def project_box(p, box):
    """Coordinatewise clamp of p (a vector or a stack of row vectors) onto the box."""
    p = np.asarray(p, dtype=float)
    if np.isnan(p).any():
        raise NumericError("Cannot project a point with NaN coordinates")
    lower, upper = box.bounds(p.shape[-1])
    return np.clip(p, lower, upper)
