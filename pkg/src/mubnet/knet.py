"""k-nets over a finite-dimensional C*-algebra.

A k-net is a family of orthogonal projections ("lines") split into parallel
classes such that lines in one class are mutually orthogonal and sum to the
identity, while lines P, Q from different classes satisfy
``tau(PQ) = 1 / dim(A)``.  Classical k-nets are the case A = C^X (indicator
functions of lines); collections of MUBs are the case A = M_d(C)
(rank-one projections onto the basis vectors).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .algebra import (
    DEFAULT_TOL,
    AlgebraElement,
    AlgebraShape,
    Subspace,
    _orthonormal_rows,
    element_from_dict,
    element_to_dict,
    flat_from_groups,
    stack_groups,
)
from .classical import ClassicalNet, points_of
from .mubs import MubCollection


@dataclass(frozen=True, eq=False)
class GeneralizedKNet:
    shape: AlgebraShape
    classes: tuple[tuple[AlgebraElement, ...], ...]

    def __post_init__(self) -> None:
        classes = tuple(tuple(c) for c in self.classes)
        for c in classes:
            for line in c:
                if line.shape != self.shape:
                    raise ValueError(f"line of shape {line.shape.blocks} in a net over {self.shape.blocks}")
        object.__setattr__(self, "classes", classes)

    @property
    def k(self) -> int:
        return len(self.classes)

    def lines(self) -> list[AlgebraElement]:
        return [l for c in self.classes for l in c]

    def class_index(self) -> list[int]:
        return [j for j, c in enumerate(self.classes) for _ in c]

    def drop(self, idx: Sequence[int]) -> "GeneralizedKNet":
        gone = set(idx)
        return GeneralizedKNet(self.shape, tuple(c for j, c in enumerate(self.classes) if j not in gone))

    def select(self, idx: Sequence[int]) -> "GeneralizedKNet":
        return GeneralizedKNet(self.shape, tuple(self.classes[j] for j in idx))


@dataclass(frozen=True)
class Violation:
    clause: str
    where: tuple
    residual: float

    def to_dict(self) -> dict:
        return {"clause": self.clause, "where": list(self.where), "residual": self.residual}


@dataclass(frozen=True)
class NetSummary:
    k: int
    d: Optional[int]
    dim: int
    span_dim: int
    complete: bool
    violations: tuple[Violation, ...] = field(default=())

    @property
    def valid(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"k": self.k, "d": self.d, "dim": self.dim, "span_dim": self.span_dim,
                "complete": self.complete, "valid": self.valid,
                "violations": [v.to_dict() for v in self.violations]}


def _norms(shape: AlgebraShape, groups: Sequence[np.ndarray]) -> np.ndarray:
    """HS norms of a batch given as grouped block stacks."""
    sq = sum(np.sum(np.abs(g) ** 2, axis=(1, 2, 3)) for g in groups)
    return np.sqrt(sq / shape.trace_of_identity)


def _adj(groups: Sequence[np.ndarray]) -> list[np.ndarray]:
    return [np.conj(np.swapaxes(g, -1, -2)) for g in groups]


def validate_knet(net: GeneralizedKNet, tol: float = DEFAULT_TOL) -> NetSummary:
    """Check every k-net clause and report all violations.

    Clauses: ``projection`` (P = P* = P^2), ``orthogonal`` (||PQ||_2 within a
    class), ``sum`` (each class sums to I), ``order`` (equal class sizes),
    ``cross_trace`` (|tau(PQ) - 1/dim| across classes) and ``dimension``
    (dim = d^2 once k >= 2).
    """
    if not net.classes or any(len(c) == 0 for c in net.classes):
        raise ValueError("a net needs at least one class and no empty classes")
    shape = net.shape
    lines = net.lines()
    cls = np.array(net.class_index())
    L = len(lines)
    dim = shape.dim
    out: list[Violation] = []

    G = stack_groups(lines)
    GH = _adj(G)
    r_sa = _norms(shape, [a - b for a, b in zip(G, GH)])
    r_idem = _norms(shape, [a @ a - a for a in G])
    for i in range(L):
        r = max(r_sa[i], r_idem[i])
        if r > tol:
            out.append(Violation("projection", (int(cls[i]), i), float(r)))

    flatP = flat_from_groups(shape, G)
    flatPT = flat_from_groups(shape, [np.swapaxes(g, -1, -2) for g in G])
    start = 0
    starts = []
    for j, c in enumerate(net.classes):
        starts.append(start)
        n = len(c)
        ia, ib = np.triu_indices(n, 1)
        if len(ia):
            prods = [g[start + ia] @ g[start + ib] for g in G]
            r_pq = _norms(shape, prods)
            for a, b, r in zip(ia, ib, r_pq):
                if r > tol:
                    out.append(Violation("orthogonal", (j, int(a), int(b)), float(r)))
        total = flatP[start:start + n].sum(axis=0)
        r = float(np.linalg.norm(total - AlgebraElement.identity(shape).flat))
        if r > tol:
            out.append(Violation("sum", (j,), r))
        start += n

    sizes = [len(c) for c in net.classes]
    d = sizes[0] if len(set(sizes)) == 1 else None
    if d is None:
        out.append(Violation("order", tuple(sizes), float(max(sizes) - min(sizes))))

    if net.k >= 2:
        T = flatP @ flatPT.T  # tau(P_i P_j)
        dev = np.abs(T - 1.0 / dim)
        cross = cls[:, None] < cls[None, :]
        bad = np.argwhere(cross & (dev > tol))
        for i, j in bad:
            out.append(Violation("cross_trace",
                                 (int(cls[i]), i - starts[cls[i]], int(cls[j]), j - starts[cls[j]]),
                                 float(dev[i, j])))
        if d is not None and d * d != dim:
            out.append(Violation("dimension", (d, dim), float(abs(d * d - dim))))

    span_dim = _orthonormal_rows(flatP, tol).shape[0]
    complete = not out and d is not None and net.k == d + 1
    return NetSummary(net.k, d, dim, span_dim, complete, tuple(out))


class NetSpanError(ValueError):
    pass


def net_span(net: GeneralizedKNet, tol: float = DEFAULT_TOL) -> Subspace:
    """Orthonormal basis of span(lines); its dimension must be k(d-1)+1."""
    rows = np.array([l.flat for l in net.lines()])
    space = Subspace(net.shape, _orthonormal_rows(rows, tol))
    sizes = {len(c) for c in net.classes}
    if len(sizes) != 1:
        raise NetSpanError("classes of different sizes")
    d = sizes.pop()
    expected = net.k * (d - 1) + 1
    if space.dim != expected:
        raise NetSpanError(f"span has dimension {space.dim}, expected k(d-1)+1 = {expected}")
    return space


def class_span(net: GeneralizedKNet, j: int, tol: float = DEFAULT_TOL) -> Subspace:
    rows = np.array([l.flat for l in net.classes[j]])
    return Subspace(net.shape, _orthonormal_rows(rows, tol))


def is_complete(net: GeneralizedKNet, tol: float = DEFAULT_TOL) -> bool:
    return validate_knet(net, tol).complete


def classical_to_generalized(cnet: ClassicalNet) -> GeneralizedKNet:
    """Indicator functions of the lines, in C^X with one 1x1 block per point."""
    if not cnet.classes or any(not c for c in cnet.classes):
        raise ValueError("classical net has no lines")
    shape = AlgebraShape.commutative(cnet.n_points)
    classes = []
    for c in cnet.classes:
        lines = []
        for mask in c:
            if mask == 0:
                raise ValueError("empty line")
            v = np.zeros(cnet.n_points)
            v[list(points_of(mask))] = 1.0
            lines.append(indicator(shape, v))
        classes.append(tuple(lines))
    return GeneralizedKNet(shape, tuple(classes))


def indicator(shape: AlgebraShape, values: np.ndarray) -> AlgebraElement:
    return AlgebraElement(shape, [np.array([[v]], dtype=complex) for v in values])


def rank_one_projection(v: np.ndarray) -> AlgebraElement:
    v = np.asarray(v, dtype=complex)
    return AlgebraElement.from_matrix(np.outer(v, v.conj()))


def mubs_to_generalized(bases: MubCollection) -> GeneralizedKNet:
    """Rank-one projections onto the basis vectors; one class per basis."""
    shape = AlgebraShape.full(bases.d)
    classes = tuple(tuple(rank_one_projection(v) for v in b) for b in bases.bases)
    return GeneralizedKNet(shape, classes)


# ---------------------------------------------------------------------------
# JSON: {"shape": [...], "classes": [[element, ...], ...]}


def knet_to_dict(net: GeneralizedKNet) -> dict:
    return {"shape": list(net.shape.blocks),
            "classes": [[element_to_dict(l, with_shape=False) for l in c] for c in net.classes]}


def knet_from_dict(obj: dict) -> GeneralizedKNet:
    if "shape" not in obj or "classes" not in obj:
        raise ValueError("net needs 'shape' and 'classes'")
    shape = AlgebraShape(tuple(obj["shape"]))
    classes = tuple(tuple(element_from_dict(e, shape) for e in c) for c in obj["classes"])
    return GeneralizedKNet(shape, classes)
