"""Combinatorial k-nets: affine planes over F_q, fake parallel classes,
class removal and exhaustive transversal enumeration.

Lines are stored as integer bitmasks over the point indices.  Points of
F_q^2 are numbered ``index(x) * q + index(y)`` using the field's element
order, and lines inside a class are sorted by their sorted point tuples so
that every output is byte-stable.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from . import kernels
from .fields import QuadraticField, field_of_order

TRANSVERSAL_MAX_ORDER = 5

Transversal = tuple[int, ...]


class NetError(ValueError):
    pass


def mask_of(points: Iterable[int]) -> int:
    m = 0
    for p in points:
        m |= 1 << p
    return m


def points_of(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


@dataclass(frozen=True)
class ClassicalNet:
    n_points: int
    classes: tuple[tuple[int, ...], ...]
    labels: Optional[tuple[str, ...]] = field(default=None, compare=False)

    @classmethod
    def from_point_lists(cls, n_points: int, classes: Sequence[Sequence[Iterable[int]]],
                         labels: Optional[Sequence[str]] = None) -> "ClassicalNet":
        return cls(n_points, tuple(tuple(mask_of(l) for l in c) for c in classes),
                   None if labels is None else tuple(labels))

    @property
    def k(self) -> int:
        return len(self.classes)

    @property
    def order(self) -> int:
        return len(self.classes[0]) if self.classes else 0

    d = order

    def lines(self) -> list[int]:
        return [l for c in self.classes for l in c]

    def class_of(self) -> dict[int, int]:
        return {l: j for j, c in enumerate(self.classes) for l in c}

    def point_lists(self) -> list[list[tuple[int, ...]]]:
        return [[points_of(l) for l in c] for c in self.classes]

    def violations(self) -> list[str]:
        """Incidence-axiom failures (empty list for a valid k-net of order d)."""
        out = []
        if not self.classes or any(not c for c in self.classes):
            return ["net needs at least one non-empty class"]
        d = self.order
        if self.n_points != d * d:
            out.append(f"{self.n_points} points for order {d}")
        full = (1 << self.n_points) - 1
        for j, c in enumerate(self.classes):
            if len(c) != d:
                out.append(f"class {j} has {len(c)} lines, expected {d}")
            union = 0
            for i, l in enumerate(c):
                if bin(l).count("1") != d:
                    out.append(f"line {i} of class {j} has {bin(l).count('1')} points")
                if union & l:
                    out.append(f"class {j}: line {i} overlaps an earlier line")
                union |= l
            if union != full:
                out.append(f"class {j} does not cover every point")
        for a in range(self.k):
            for b in range(a + 1, self.k):
                for i, l1 in enumerate(self.classes[a]):
                    for i2, l2 in enumerate(self.classes[b]):
                        n = bin(l1 & l2).count("1")
                        if n != 1:
                            out.append(f"line {i} of class {a} meets line {i2} of class {b} in {n} points")
        return out

    def check(self) -> "ClassicalNet":
        v = self.violations()
        if v:
            raise NetError("; ".join(v[:5]) + (" ..." if len(v) > 5 else ""))
        return self

    def is_transversal(self, points: Iterable[int]) -> bool:
        m = mask_of(points)
        return all(bin(m & l).count("1") == 1 for l in self.lines())

    def render(self, side: Optional[int] = None) -> str:
        """Text grid per class: each point shows the index of its line."""
        d = self.order
        side = side or d
        blocks = []
        for j, c in enumerate(self.classes):
            where = {}
            for i, l in enumerate(c):
                for p in points_of(l):
                    where[p] = i
            width = len(str(max(len(c) - 1, 0)))
            rows = []
            for r in range(self.n_points // side):
                rows.append(" ".join(str(where.get(r * side + s, ".")).rjust(width) for s in range(side)))
            title = f"class {j}" + (f" ({self.labels[j]})" if self.labels else "")
            blocks.append(title + "\n" + "\n".join(rows))
        return "\n\n".join(blocks)


def affine_plane(q: int, D: Optional[int] = None) -> ClassicalNet:
    """The affine plane F_q^2 (q prime, p^2 with p odd, or 4).

    Classes are indexed by direction: (a, 1) for a in field order, then (1, 0).
    """
    F = field_of_order(q, D)
    elems = F.elements()
    idx = {e: F.index(e) for e in elems}

    def pt(x, y) -> int:
        return idx[x] * q + idx[y]

    classes = []
    labels = []
    for a in elems:
        lines = []
        for c in elems:
            lines.append(sorted(pt(c + a * t, t) for t in elems))
        lines.sort()
        classes.append(lines)
        labels.append(f"({a},1)")
    lines = sorted(sorted(pt(t, c) for t in elems) for c in elems)
    classes.append(lines)
    labels.append("(1,0)")
    return ClassicalNet.from_point_lists(q * q, classes, labels).check()


def remove_classes(net: ClassicalNet, idx: Iterable[int]) -> ClassicalNet:
    drop = set(idx)
    if any(j < 0 or j >= net.k for j in drop):
        raise NetError(f"class index out of range 0..{net.k - 1}")
    keep = [j for j in range(net.k) if j not in drop]
    if not keep:
        raise NetError("cannot remove every class")
    labels = None if net.labels is None else tuple(net.labels[j] for j in keep)
    return ClassicalNet(net.n_points, tuple(net.classes[j] for j in keep), labels).check()


def enumerate_transversals(net: ClassicalNet) -> list[Transversal]:
    """All d-point sets meeting every line exactly once, ascending."""
    d = net.order
    if d > TRANSVERSAL_MAX_ORDER:
        raise NetError(f"order {d} exceeds the exhaustive-search budget {TRANSVERSAL_MAX_ORDER}")
    return kernels.transversals(net.n_points, net.classes)


@dataclass(frozen=True)
class FakeClass:
    p: int
    D: int
    plane: ClassicalNet
    cosets: tuple[Transversal, ...]
    transversed: tuple[int, ...]
    not_transversed: tuple[int, ...]


def fake_parallel_class(p: int, D: Optional[int] = None) -> FakeClass:
    """Cosets of Z_p^2 inside F_{p^2}^2 and the classes they are transversal to."""
    F = QuadraticField.with_default_nonresidue(p) if D is None else QuadraticField(p, D)
    q = p * p
    plane = affine_plane(q, F.D)
    # element index a + p*b; coset (s, t) collects points whose coordinates have s*sqrt(D), t*sqrt(D) parts
    cosets = []
    for s in range(p):
        for t in range(p):
            pts = sorted((a1 + p * s) * q + (a2 + p * t) for a1 in range(p) for a2 in range(p))
            cosets.append(tuple(pts))
    masks = [mask_of(c) for c in cosets]
    lines = set(plane.lines())
    if masks[0] in lines:
        raise NetError("Z_p^2 is a line of the plane")
    transversed, not_transversed = [], []
    for j, cls in enumerate(plane.classes):
        ok = all(bin(m & l).count("1") == 1 for m in masks for l in cls)
        (transversed if ok else not_transversed).append(j)
    if len(transversed) != p * p - p:
        raise NetError(f"{len(transversed)} transversed classes, expected {p * p - p}")
    return FakeClass(p, F.D, plane, tuple(cosets), tuple(transversed), tuple(not_transversed))


# ---------------------------------------------------------------------------
# JSON: {"d": d, "classes": [[[point, ...], ...], ...]}


def net_to_dict(net: ClassicalNet) -> dict:
    out = {"d": net.order, "classes": [[list(points_of(l)) for l in c] for c in net.classes]}
    if net.labels is not None:
        out["labels"] = list(net.labels)
    return out


def net_from_dict(obj: dict) -> ClassicalNet:
    if "d" not in obj or "classes" not in obj:
        raise ValueError("classical net needs 'd' and 'classes'")
    d = int(obj["d"])
    classes = obj["classes"]
    for c in classes:
        for l in c:
            if not all(isinstance(p, int) and 0 <= p < d * d for p in l):
                raise ValueError("points must be integers in [0, d^2)")
    return ClassicalNet.from_point_lists(d * d, classes, obj.get("labels"))
