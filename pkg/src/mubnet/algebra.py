"""Finite-dimensional C*-algebras as direct sums of full matrix blocks.

An algebra is described by its block sizes ``(n_1, ..., n_m)``; elements are
tuples of dense complex blocks.  The commutative algebra C^X is the shape
with |X| blocks of size one, so the same code serves functions on a finite
set and matrix algebras.

Norms are Hilbert-Schmidt norms taken with the *normalised* trace
``tau = Tr / Tr(I)``, so ``||I||_2 == 1`` in every shape.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

DEFAULT_TOL = 1e-9


class ShapeMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class AlgebraShape:
    blocks: tuple[int, ...]

    def __post_init__(self) -> None:
        blocks = tuple(int(n) for n in self.blocks)
        if not blocks:
            raise ValueError("an algebra needs at least one block")
        if any(n < 1 for n in blocks):
            raise ValueError("block sizes must be positive")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def full(cls, n: int) -> "AlgebraShape":
        """M_n(C)."""
        return cls((n,))

    @classmethod
    def commutative(cls, npoints: int) -> "AlgebraShape":
        """C^X with |X| = npoints."""
        return cls((1,) * npoints)

    @property
    def dim(self) -> int:
        return sum(n * n for n in self.blocks)

    @property
    def trace_of_identity(self) -> int:
        # canonical trace gives 1 on minimal projections, so Tr(I) = sum n_j
        return sum(self.blocks)

    @property
    def flat_size(self) -> int:
        return self.dim

    @cached_property
    def groups(self) -> tuple[tuple[int, tuple[int, ...]], ...]:
        """Block indices grouped by block size, for batched products."""
        by_size: dict[int, list[int]] = {}
        for i, n in enumerate(self.blocks):
            by_size.setdefault(n, []).append(i)
        return tuple((n, tuple(idx)) for n, idx in sorted(by_size.items()))

    def is_commutative(self) -> bool:
        return all(n == 1 for n in self.blocks)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


class AlgebraElement:
    """Immutable block-diagonal element of an algebra of shape ``shape``."""

    __slots__ = ("shape", "blocks", "_flat")

    def __init__(self, shape: AlgebraShape, blocks: Sequence[np.ndarray]):
        if len(blocks) != len(shape.blocks):
            raise ShapeMismatchError(
                f"expected {len(shape.blocks)} blocks, got {len(blocks)}")
        frozen = []
        for n, b in zip(shape.blocks, blocks):
            b = np.asarray(b, dtype=complex)
            if b.shape != (n, n):
                raise ShapeMismatchError(f"block of shape {b.shape}, expected {(n, n)}")
            frozen.append(_frozen(b))
        self.shape = shape
        self.blocks = tuple(frozen)
        self._flat = None

    # constructors -----------------------------------------------------

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "AlgebraElement":
        m = np.asarray(m, dtype=complex)
        return cls(AlgebraShape.full(m.shape[0]), [m])

    @classmethod
    def from_function(cls, values: Sequence[complex]) -> "AlgebraElement":
        """Element of C^X given by its values on the points."""
        values = np.asarray(values, dtype=complex)
        shape = AlgebraShape.commutative(len(values))
        return cls(shape, [v.reshape(1, 1) for v in values])

    @classmethod
    def identity(cls, shape: AlgebraShape) -> "AlgebraElement":
        return cls(shape, [np.eye(n) for n in shape.blocks])

    @classmethod
    def zero(cls, shape: AlgebraShape) -> "AlgebraElement":
        return cls(shape, [np.zeros((n, n)) for n in shape.blocks])

    @classmethod
    def from_flat(cls, shape: AlgebraShape, flat: np.ndarray) -> "AlgebraElement":
        """Inverse of :attr:`flat` (HS coordinates)."""
        raw = np.asarray(flat, dtype=complex) * np.sqrt(shape.trace_of_identity)
        blocks, pos = [], 0
        for n in shape.blocks:
            blocks.append(raw[pos:pos + n * n].reshape(n, n))
            pos += n * n
        return cls(shape, blocks)

    # views --------------------------------------------------------------

    @property
    def flat(self) -> np.ndarray:
        """HS coordinates: ``vdot(A.flat, B.flat) == hs_inner(A, B)``."""
        if self._flat is None:
            raw = np.concatenate([b.ravel() for b in self.blocks])
            f = raw / np.sqrt(self.shape.trace_of_identity)
            f.setflags(write=False)
            self._flat = f
        return self._flat

    def to_dense(self) -> np.ndarray:
        """Block-diagonal dense matrix of size sum(n_j)."""
        size = self.shape.trace_of_identity
        out = np.zeros((size, size), dtype=complex)
        pos = 0
        for b in self.blocks:
            n = b.shape[0]
            out[pos:pos + n, pos:pos + n] = b
            pos += n
        return out

    # arithmetic ---------------------------------------------------------

    def _check(self, other: "AlgebraElement") -> None:
        if not isinstance(other, AlgebraElement):
            raise TypeError(f"expected AlgebraElement, got {type(other).__name__}")
        if other.shape != self.shape:
            raise ShapeMismatchError(f"{self.shape.blocks} vs {other.shape.blocks}")

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        return AlgebraElement(self.shape, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        return AlgebraElement(self.shape, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.shape, [-a for a in self.blocks])

    def __mul__(self, c: complex) -> "AlgebraElement":
        if isinstance(c, AlgebraElement):
            raise TypeError("use @ for the algebra product")
        return AlgebraElement(self.shape, [c * a for a in self.blocks])

    __rmul__ = __mul__

    def __truediv__(self, c: complex) -> "AlgebraElement":
        return self * (1.0 / c)

    def __matmul__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        return AlgebraElement(self.shape, [a @ b for a, b in zip(self.blocks, other.blocks)])

    @property
    def H(self) -> "AlgebraElement":
        """Adjoint."""
        return AlgebraElement(self.shape, [a.conj().T for a in self.blocks])

    def __repr__(self) -> str:
        return f"AlgebraElement(shape={self.shape.blocks})"


# ---------------------------------------------------------------------------
# traces and inner products


def canonical_trace(a: AlgebraElement) -> complex:
    """Tr: blockwise matrix trace, equal to 1 on minimal projections."""
    return complex(sum(np.trace(b) for b in a.blocks))


def normalized_trace(a: AlgebraElement) -> complex:
    """tau = Tr / Tr(I)."""
    return canonical_trace(a) / a.shape.trace_of_identity


def hs_inner(a: AlgebraElement, b: AlgebraElement) -> complex:
    """<A, B> = tau(A* B)."""
    a._check(b)
    return complex(np.vdot(a.flat, b.flat))


def hs_norm(a: AlgebraElement) -> float:
    return float(np.linalg.norm(a.flat))


def is_orthogonal_projection(a: AlgebraElement, tol: float = DEFAULT_TOL) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    if hs_norm(a - a.H) > tol:
        return False
    return hs_norm(a @ a - a) <= tol


def traceless_part(a: AlgebraElement) -> AlgebraElement:
    return a - normalized_trace(a) * AlgebraElement.identity(a.shape)


# ---------------------------------------------------------------------------
# subspaces


class Subspace:
    """Linear subspace with an HS-orthonormal basis.

    The basis is kept as a coordinate matrix whose rows are the ``flat``
    vectors of the basis elements.
    """

    __slots__ = ("shape", "coords")

    def __init__(self, shape: AlgebraShape, coords: np.ndarray):
        coords = np.asarray(coords, dtype=complex).reshape(-1, shape.flat_size)
        coords = np.array(coords, copy=True)
        coords.setflags(write=False)
        self.shape = shape
        self.coords = coords

    @property
    def dim(self) -> int:
        return self.coords.shape[0]

    @property
    def basis(self) -> list[AlgebraElement]:
        return [AlgebraElement.from_flat(self.shape, row) for row in self.coords]

    def gram(self) -> np.ndarray:
        return self.coords.conj() @ self.coords.T

    def project(self, a: AlgebraElement) -> AlgebraElement:
        if a.shape != self.shape:
            raise ShapeMismatchError(f"{a.shape.blocks} vs {self.shape.blocks}")
        c = self.coords.conj() @ a.flat
        return AlgebraElement.from_flat(self.shape, c @ self.coords)

    def contains_identity(self, tol: float = DEFAULT_TOL) -> bool:
        return span_residual(self, AlgebraElement.identity(self.shape)) <= tol

    def __repr__(self) -> str:
        return f"Subspace(shape={self.shape.blocks}, dim={self.dim})"


def _orthonormal_rows(rows: np.ndarray, tol: float, chunk: int = 64) -> np.ndarray:
    """Blocked Gram-Schmidt that drops rows whose residual norm is at most ``tol``.

    Each chunk is projected off the accepted rows twice (matrix products),
    then orthonormalised row by row against the rows accepted from the same
    chunk, again with two passes.
    """
    rows = np.asarray(rows, dtype=complex)
    n = rows.shape[1]
    cap = min(rows.shape[0], n)
    q = np.zeros((cap, n), dtype=complex)
    m = 0
    for s in range(0, rows.shape[0], chunk):
        block = rows[s:s + chunk].copy()
        if m:
            qm = q[:m]
            for _ in range(2):
                block -= (block @ qm.conj().T) @ qm
        local: list[np.ndarray] = []
        for v in block:
            r = v
            if local:
                L = np.array(local)
                for _ in range(2):
                    r = r - (L.conj() @ r) @ L
            nr = np.linalg.norm(r)
            if nr > tol and m + len(local) < cap:
                local.append(r / nr)
        if local:
            q[m:m + len(local)] = local
            m += len(local)
    return q[:m]


def orthonormalize(elements: Iterable[AlgebraElement], tol: float = DEFAULT_TOL) -> Subspace:
    if tol <= 0:
        raise ValueError("tol must be positive")
    elements = list(elements)
    if not elements:
        raise ValueError("need at least one element to fix the shape")
    shape = elements[0].shape
    for e in elements[1:]:
        elements[0]._check(e)
    rows = np.array([e.flat for e in elements])
    return Subspace(shape, _orthonormal_rows(rows, tol))


def subspace_sum(*spaces: Subspace, tol: float = DEFAULT_TOL) -> Subspace:
    shape = spaces[0].shape
    rows = np.concatenate([s.coords for s in spaces], axis=0)
    return Subspace(shape, _orthonormal_rows(rows, tol))


def span_residual(space: Subspace, a: AlgebraElement) -> float:
    """||A - P_S A||_2 for the orthogonal projection P_S onto the subspace."""
    if a.shape != space.shape:
        raise ShapeMismatchError(f"{a.shape.blocks} vs {space.shape.blocks}")
    f = a.flat
    r = f - (space.coords.conj() @ f) @ space.coords
    return float(np.linalg.norm(r))


def are_quasi_orthogonal(a: Subspace, b: Subspace, tol: float = DEFAULT_TOL) -> bool:
    """True iff tau(X* Y) = tau(X*) tau(Y) for all basis pairs.

    Both subspaces must contain the identity.
    """
    if a.shape != b.shape:
        raise ShapeMismatchError(f"{a.shape.blocks} vs {b.shape.blocks}")
    if not a.contains_identity(tol) or not b.contains_identity(tol):
        raise ValueError("quasi-orthogonality is defined for unital subspaces")
    return quasi_orthogonality_defect(a, b) <= tol


def quasi_orthogonality_defect(a: Subspace, b: Subspace) -> float:
    """max |tau(X* Y) - tau(X*) tau(Y)| over basis pairs."""
    one = AlgebraElement.identity(a.shape).flat
    # tau(X) = <I, X>, tau(X*) = conj(tau(X))
    ta = a.coords @ one.conj()
    tb = b.coords @ one.conj()
    cross = a.coords.conj() @ b.coords.T
    defect = cross - np.outer(ta.conj(), tb)
    return float(np.max(np.abs(defect))) if defect.size else 0.0


# ---------------------------------------------------------------------------
# batched helpers used by the k-net validator


def stack_groups(elements: Sequence[AlgebraElement]) -> list[np.ndarray]:
    """One array of shape (len(elements), count, n, n) per block-size group."""
    shape = elements[0].shape
    out = []
    for n, idx in shape.groups:
        out.append(np.array([[e.blocks[i] for i in idx] for e in elements], dtype=complex))
    return out


def flat_from_groups(shape: AlgebraShape, groups: Sequence[np.ndarray]) -> np.ndarray:
    """Rows of HS coordinates from grouped block stacks (inverse of stack_groups)."""
    count = groups[0].shape[0]
    raw = np.zeros((count, shape.flat_size), dtype=complex)
    offsets = np.cumsum([0] + [n * n for n in shape.blocks])
    for (n, idx), arr in zip(shape.groups, groups):
        for j, bi in enumerate(idx):
            raw[:, offsets[bi]:offsets[bi + 1]] = arr[:, j].reshape(count, n * n)
    return raw / np.sqrt(shape.trace_of_identity)


# ---------------------------------------------------------------------------
# JSON


def element_to_dict(a: AlgebraElement, with_shape: bool = True) -> dict:
    d = {"blocks": [[[[float(z.real), float(z.imag)] for z in row] for row in b]
                    for b in a.blocks]}
    if with_shape:
        d = {"shape": list(a.shape.blocks), **d}
    return d


def element_from_dict(d: dict, shape: AlgebraShape | None = None) -> AlgebraElement:
    if "shape" in d:
        s = AlgebraShape(tuple(d["shape"]))
        if shape is not None and s != shape:
            raise ShapeMismatchError(f"{s.blocks} vs {shape.blocks}")
        shape = s
    if shape is None:
        raise ValueError("element has no shape header")
    blocks = []
    for b in d["blocks"]:
        arr = np.asarray(b, dtype=float)
        if arr.ndim != 3 or arr.shape[-1] != 2:
            raise ValueError("blocks must be nested [re, im] pairs")
        blocks.append(arr[..., 0] + 1j * arr[..., 1])
    return AlgebraElement(shape, blocks)
