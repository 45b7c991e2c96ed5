"""Two-point kernels over generator slots.

:class:`Kernel` holds scalar-entry matrices (Green's functions, causal
propagator, free second derivatives).  :class:`ElementKernel` holds
sparse matrices with Grassmann-even element entries (interaction second
derivatives, interacting propagator corrections).
"""

from __future__ import annotations

import csv
import json

import numpy as np

from .algebra import Algebra, GrassmannElement
from .linalg import max_abs
from .scalars import Ring

__all__ = ["Kernel", "ElementKernel"]


class Kernel:
    """Scalar two-point kernel: a dense matrix plus support metadata.

    ``kind`` is one of ``retarded | advanced | causal | dirac | symmetric
    | operator``;  ``row_times``/``col_times`` give the time coordinate of
    each slot so support conditions can be validated structurally.
    ``exact_rows`` records the equation rows on which a defining identity
    (for instance S2 @ kernel = Id) holds exactly; rows whose difference
    stencil crosses the temporal boundary are excluded.
    """

    def __init__(self, mat: np.ndarray, ring: Ring, kind: str = "operator",
                 row_times: np.ndarray | None = None,
                 col_times: np.ndarray | None = None,
                 exact_rows: np.ndarray | None = None):
        self.mat = mat
        self.ring = ring
        self.kind = kind
        self.row_times = row_times
        self.col_times = col_times
        self.exact_rows = exact_rows

    @property
    def shape(self):
        return self.mat.shape

    def copy_with(self, mat, kind=None) -> "Kernel":
        return Kernel(mat, self.ring, kind or self.kind,
                      self.row_times, self.col_times, self.exact_rows)

    # -- algebra ---------------------------------------------------------
    def __sub__(self, other: "Kernel") -> "Kernel":
        if self.mat.shape != other.mat.shape:
            raise ValueError("kernel shape mismatch")
        return self.copy_with(self.mat - other.mat, kind="causal"
                              if {self.kind, other.kind} == {"retarded", "advanced"}
                              else self.kind)

    def transpose_neg(self, kind: str) -> "Kernel":
        """Kernel −K(y,x)^T: the argument-swapped, sign-flipped partner."""
        return Kernel(-self.mat.T.copy(), self.ring, kind,
                      self.col_times, self.row_times, self.exact_rows)

    def matmul(self, other: "Kernel") -> np.ndarray:
        return self.mat @ other.mat

    # -- checks ------------------------------------------------------------
    def support_violation(self) -> float:
        """Largest |entry| outside the kernel's causal support (0 if clean)."""
        if self.row_times is None or self.col_times is None:
            return 0.0
        if self.kind == "retarded":
            bad = self.row_times[:, None] < self.col_times[None, :]
        elif self.kind == "advanced":
            bad = self.row_times[:, None] > self.col_times[None, :]
        else:
            return 0.0
        worst = 0.0
        rows, cols = np.nonzero(bad)
        for i, j in zip(rows, cols):
            worst = max(worst, abs(complex(self.mat[i, j])))
        return worst

    def max_abs(self) -> float:
        return max_abs(self.mat)

    # -- export ------------------------------------------------------------
    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["row", "col", "re", "im"])
            n, m = self.mat.shape
            for i in range(n):
                for j in range(m):
                    c = complex(self.mat[i, j])
                    if c != 0:
                        writer.writerow([i, j, repr(c.real), repr(c.imag)])

    def to_json(self, path) -> None:
        n, m = self.mat.shape
        entries = []
        for i in range(n):
            for j in range(m):
                c = complex(self.mat[i, j])
                if c != 0:
                    entries.append([i, j, c.real, c.imag])
        payload = {"kind": self.kind, "shape": [n, m], "entries": entries}
        with open(path, "w") as fh:
            json.dump(payload, fh, sort_keys=True)
            fh.write("\n")

    def __repr__(self):
        return f"Kernel({self.kind}, shape={self.mat.shape})"


class ElementKernel:
    """Sparse two-point kernel with Grassmann-even element entries."""

    def __init__(self, algebra: Algebra, n: int,
                 entries: dict[tuple[int, int], GrassmannElement] | None = None):
        self.algebra = algebra
        self.n = n
        self.entries: dict[tuple[int, int], GrassmannElement] = {}
        if entries:
            for key, e in entries.items():
                if not e.is_zero():
                    if not e.is_even():
                        raise ValueError("kernel entries must be Grassmann-even")
                    self.entries[key] = e

    def get(self, i: int, j: int) -> GrassmannElement:
        e = self.entries.get((i, j))
        return e if e is not None else self.algebra.zero()

    def is_zero(self) -> bool:
        return not self.entries

    def scale(self, c) -> "ElementKernel":
        return ElementKernel(self.algebra, self.n,
                             {k: e.scale(c) for k, e in self.entries.items()})

    def __add__(self, other: "ElementKernel") -> "ElementKernel":
        out = dict(self.entries)
        for k, e in other.entries.items():
            out[k] = out[k] + e if k in out else e
        return ElementKernel(self.algebra, self.n, out)

    def __neg__(self) -> "ElementKernel":
        return self.scale(-1)

    def transpose(self) -> "ElementKernel":
        return ElementKernel(self.algebra, self.n,
                             {(j, i): e for (i, j), e in self.entries.items()})

    # -- compositions -------------------------------------------------------
    def compose_scalar_left(self, mat: np.ndarray) -> "ElementKernel":
        """mat @ self, entrywise scalar-times-element."""
        out: dict[tuple[int, int], GrassmannElement] = {}
        ring = self.algebra.ring
        for (k, j), e in self.entries.items():
            col = mat[:, k]
            for i in range(self.n):
                c = col[i]
                if ring.is_zero(c):
                    continue
                term = e.scale(c)
                key = (i, j)
                out[key] = out[key] + term if key in out else term
        return ElementKernel(self.algebra, self.n, out)

    def compose_scalar_right(self, mat: np.ndarray) -> "ElementKernel":
        """self @ mat."""
        out: dict[tuple[int, int], GrassmannElement] = {}
        ring = self.algebra.ring
        for (i, k), e in self.entries.items():
            row = mat[k, :]
            for j in range(self.n):
                c = row[j]
                if ring.is_zero(c):
                    continue
                term = e.scale(c)
                key = (i, j)
                out[key] = out[key] + term if key in out else term
        return ElementKernel(self.algebra, self.n, out)

    def compose(self, other: "ElementKernel") -> "ElementKernel":
        """self @ other with wedge-multiplied entries (even entries commute)."""
        out: dict[tuple[int, int], GrassmannElement] = {}
        by_row: dict[int, list] = {}
        for (k, j), e in other.entries.items():
            by_row.setdefault(k, []).append((j, e))
        for (i, k), e in self.entries.items():
            for j, f in by_row.get(k, ()):
                prod = e.wedge(f)
                if prod.is_zero():
                    continue
                key = (i, j)
                out[key] = out[key] + prod if key in out else prod
        return ElementKernel(self.algebra, self.n, out)

    def max_abs(self) -> float:
        return max((e.max_abs() for e in self.entries.values()), default=0.0)

    def frobenius(self) -> float:
        """Frobenius norm over all entry coefficients."""
        acc = 0.0
        for e in self.entries.values():
            for _, c in e.items():
                acc += abs(complex(c)) ** 2
        return acc ** 0.5

    def grades(self) -> set:
        gs: set = set()
        for e in self.entries.values():
            gs |= e.grades()
        return gs

    @classmethod
    def from_scalar(cls, algebra: Algebra, mat: np.ndarray) -> "ElementKernel":
        n = mat.shape[0]
        ring = algebra.ring
        entries = {}
        for i in range(n):
            for j in range(mat.shape[1]):
                c = mat[i, j]
                if not ring.is_zero(c):
                    entries[(i, j)] = algebra.scalar(c)
        return cls(algebra, n, entries)

    def __repr__(self):
        return f"ElementKernel(n={self.n}, nnz={len(self.entries)}, grades={sorted(self.grades())})"
