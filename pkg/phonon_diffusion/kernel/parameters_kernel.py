# Global imports
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

DEFAULT_QUAD_TOL = 1e-10
DEGENERACY_EXPONENT = 5.0 / 3.0


class WaveNumberDomainError(ValueError):
    """Raised when a quantity is requested at the singular point k = 0 mod 1."""


class KernelError(RuntimeError):
    """Base class for collision-kernel evaluation failures."""


class QuadratureError(KernelError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(
        self, message: str, achieved_tol: float, row: Optional[int] = None
    ) -> None:
        super().__init__(message)
        self.achieved_tol = achieved_tol
        self.row = row

    def with_row(self, row: int) -> "QuadratureError":
        return QuadratureError(
            f"row {row}: {self.args[0]}", achieved_tol=self.achieved_tol, row=row
        )


class SingularCurveError(KernelError):
    """The kernel was evaluated exactly on the curve F_-(k, k') = 0."""


class NoPartnerError(KernelError):
    """No non-trivial resonance partner exists for the given pair."""


# ---------------- WAVE NUMBERS ----------------
def reduce_unit(k):
    """Torus reduction to [0, 1)."""
    reduced = np.mod(k, 1.0)
    # np.mod rounds tiny negative inputs up to exactly 1.0
    reduced = np.where(reduced >= 1.0, 0.0, reduced)
    return reduced if np.ndim(k) else float(reduced)


def reduce_symmetric(k):
    """Torus reduction to (-1/2, 1/2]."""
    unit = np.asarray(reduce_unit(k))
    symmetric = np.where(unit > 0.5, unit - 1.0, unit)
    return symmetric if np.ndim(k) else float(symmetric)


# ---------------- GRID ----------------
@dataclass(frozen=True)
class WaveGrid:
    n: int
    nodes: np.ndarray = field(init=False, repr=False, compare=False)
    weights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.n < 2 or self.n % 2:
            raise ValueError(f"WaveGrid needs an even node count, got n={self.n}")
        nodes = -0.5 + (np.arange(self.n) + 0.5) / self.n
        weights = np.full(self.n, 1.0 / self.n)
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def edges(self) -> np.ndarray:
        """Cell boundaries -1/2 + i/n; edge n/2 is exactly 0."""
        return -0.5 + np.arange(self.n + 1) / self.n

    def mirror_index(self, i: int) -> int:
        return self.n - 1 - i

    def shared_node_indices(self, other: "WaveGrid") -> np.ndarray:
        """Indices i of this grid whose node also belongs to `other`.

        Midpoint grids n and m share nodes only when m/n is odd (e.g. n and 3n).
        """
        other_pos = (self.nodes + 0.5) * other.n - 0.5
        matches = np.abs(other_pos - np.round(other_pos)) < 1e-9
        return np.flatnonzero(matches)


# ---------------- KERNEL TABLE ----------------
@dataclass(frozen=True)
class KernelTable:
    grid: WaveGrid
    K: np.ndarray
    V: np.ndarray
    v0: float
    c1: float
    c2: float
    quad_tol: float
    v0_uncertainty: Optional[float] = None
    Wprof: np.ndarray = field(init=False, repr=False, compare=False)
    C0: float = field(init=False)

    def __post_init__(self) -> None:
        n = self.grid.n
        if self.K.shape != (n, n) or self.V.shape != (n,):
            raise ValueError(
                f"KernelTable shapes K{self.K.shape}, V{self.V.shape} do not match"
                f" n={n}"
            )
        wprof = self.V * np.abs(self.grid.nodes) ** (-DEGENERACY_EXPONENT)
        for array in (self.K, self.V, wprof):
            array.setflags(write=False)
        object.__setattr__(self, "Wprof", wprof)
        object.__setattr__(self, "C0", float(np.max(wprof)))

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def w0(self) -> float:
        return self.v0 * np.pi**DEGENERACY_EXPONENT

    def symmetry_defect(self) -> float:
        scale = float(np.max(np.abs(self.K))) or 1.0
        return float(np.max(np.abs(self.K - self.K.T))) / scale

    def central_symmetry_defect(self) -> float:
        scale = float(np.max(np.abs(self.K))) or 1.0
        flipped = self.K[::-1, ::-1]
        return float(np.max(np.abs(self.K - flipped))) / scale
