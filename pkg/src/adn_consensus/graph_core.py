"""Star-graph Laplacians, their exact integer powers, and a dense symmetric
matrix exponential.

Node ids are 1-based in all public interfaces; matrices are plain numpy
arrays indexed from 0. Integer-valued matrices (Laplacians and their powers)
use int64, everything floating-point uses float64.
"""

from dataclasses import dataclass, field

import numpy as np

INT64_MAX = 2**63 - 1


@dataclass(frozen=True)
class StarSpec:
    """One activation event: a center node wired to m distinct neighbors."""

    n: int
    center: int
    neighbors: tuple = field(default=())

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"star needs n >= 2, got n={self.n}")
        ns = tuple(sorted(self.neighbors))
        object.__setattr__(self, "neighbors", ns)
        if len(ns) < 1 or len(set(ns)) != len(ns):
            raise ValueError("neighbors must be a nonempty set of distinct ids")
        if len(ns) > self.n - 1:
            raise ValueError(f"at most n-1={self.n - 1} neighbors, got {len(ns)}")
        if not (1 <= self.center <= self.n):
            raise ValueError(f"center {self.center} outside 1..{self.n}")
        if any(j < 1 or j > self.n for j in ns):
            raise ValueError(f"neighbor ids {ns} outside 1..{self.n}")
        if self.center in ns:
            raise ValueError(f"center {self.center} cannot be its own neighbor")

    @property
    def m(self) -> int:
        return len(self.neighbors)


def star_laplacian(spec: StarSpec) -> np.ndarray:
    """Laplacian of the star with the given center and neighbors (int64).

    Diagonal: m at the center, 1 at each neighbor, 0 elsewhere; -1 on each
    center-neighbor edge. Rows sum to zero.
    """
    L = np.zeros((spec.n, spec.n), dtype=np.int64)
    c = spec.center - 1
    L[c, c] = spec.m
    for j in spec.neighbors:
        L[j - 1, j - 1] = 1
        L[c, j - 1] = -1
        L[j - 1, c] = -1
    return L


def star_laplacian_power(spec: StarSpec, k: int) -> np.ndarray:
    """k-th power of a star Laplacian in exact integer arithmetic.

    Closed form: writing r = (m+1)**(k-1), the center diagonal is m*r, the
    center-neighbor entries are -r, and the neighbor block is
    I + (r-1)/m * J; rows and columns of untouched nodes are zero. The
    fraction (r-1)/m is an integer because (m+1)**(k-1) is 1 modulo m.
    Entries beyond the int64 range raise rather than wrap.
    """
    if k < 1:
        raise ValueError(f"power must be >= 1, got k={k}")
    m = spec.m
    r = (m + 1) ** (k - 1)
    off = (r - 1) // m
    if m * r > INT64_MAX:
        raise OverflowError(f"entry m*(m+1)**(k-1) = {m * r} exceeds int64")
    L = np.zeros((spec.n, spec.n), dtype=np.int64)
    c = spec.center - 1
    L[c, c] = m * r
    for j in spec.neighbors:
        L[c, j - 1] = -r
        L[j - 1, c] = -r
        for l in spec.neighbors:
            L[j - 1, l - 1] = off + (1 if j == l else 0)
    return L


def symmetrize(M: np.ndarray) -> np.ndarray:
    """(M + M.T) / 2, restoring exact symmetry after float computation."""
    return (M + M.T) / 2.0


def expm_sym(M: np.ndarray, t: float) -> np.ndarray:
    """e**(-t*M) for symmetric M, via eigendecomposition.

    Diagonalize, exponentiate the eigenvalues, recompose, then symmetrize.
    Max-abs accuracy 1e-12 against the true exponential for desk-scale
    matrices; used both as the multi-activation snapshot kernel and as the
    oracle for the closed-form star exponential.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if not np.isfinite(M).all():
        raise ValueError("matrix has non-finite entries")
    if not np.array_equal(M, M.T):
        raise ValueError("matrix is not exactly symmetric; symmetrize() first")
    if not (t >= 0.0):
        raise ValueError(f"time must be >= 0, got {t}")
    w, V = np.linalg.eigh(M)
    E = (V * np.exp(-t * w)) @ V.T
    return symmetrize(E)
