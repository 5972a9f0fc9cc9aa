"""Collections of orthonormal bases of C^d and unbiasedness measurements."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

ORTHONORMAL_TOL = 1e-10


class BasisError(ValueError):
    pass


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class MubCollection:
    """Bases of C^d; ``bases[j][i]`` is the i-th vector of the j-th basis."""

    d: int
    bases: tuple[np.ndarray, ...]
    provenance: Optional[tuple] = field(default=None)

    def __post_init__(self) -> None:
        frozen = tuple(_freeze(b) for b in self.bases)
        for j, b in enumerate(frozen):
            if b.shape != (self.d, self.d):
                raise BasisError(f"basis {j} has shape {b.shape}, expected {(self.d, self.d)}")
            err = float(np.max(np.abs(b.conj() @ b.T - np.eye(self.d))))
            if err > ORTHONORMAL_TOL:
                raise BasisError(f"basis {j} is not orthonormal (residual {err:.3e})")
        object.__setattr__(self, "bases", frozen)

    def __len__(self) -> int:
        return len(self.bases)

    def subset(self, indices: Sequence[int]) -> "MubCollection":
        prov = None
        if self.provenance is not None:
            prov = tuple(self.provenance[i] for i in indices)
        return MubCollection(self.d, tuple(self.bases[i] for i in indices), prov)

    def overlaps(self, i: int, j: int) -> np.ndarray:
        """|<e, f>|^2 for e in basis i (rows) and f in basis j (columns)."""
        return np.abs(self.bases[i].conj() @ self.bases[j].T) ** 2

    def max_bias(self) -> tuple[float, Optional[tuple[int, int, int, int]]]:
        """Largest | |<e,f>|^2 - 1/d | over cross pairs, with its witness
        (basis i, vector a, basis j, vector b)."""
        worst, witness = 0.0, None
        for i in range(len(self.bases)):
            for j in range(i + 1, len(self.bases)):
                dev = np.abs(self.overlaps(i, j) - 1.0 / self.d)
                a, b = np.unravel_index(int(np.argmax(dev)), dev.shape)
                if dev[a, b] > worst or witness is None:
                    worst, witness = float(dev[a, b]), (i, int(a), j, int(b))
        return worst, witness

    def axes(self) -> np.ndarray:
        """All basis vectors stacked, shape (len * d, d)."""
        return np.concatenate(self.bases, axis=0)


def projection_distance(v: np.ndarray, w: np.ndarray) -> float:
    """Frobenius distance ||vv* - ww*|| between rank-one projections of unit vectors."""
    ov = abs(np.vdot(v, w)) ** 2
    return float(np.sqrt(max(0.0, 2.0 - 2.0 * ov)))


def unbiasedness_residual(bases: MubCollection, v: np.ndarray) -> float:
    """max over all basis vectors e of | |<e, v>|^2 - 1/d |."""
    v = np.asarray(v, dtype=complex)
    if abs(np.linalg.norm(v) - 1.0) > 1e-10:
        raise ValueError("v must be a unit vector")
    if not len(bases):
        return 0.0
    ov = np.abs(bases.axes().conj() @ v) ** 2
    return float(np.max(np.abs(ov - 1.0 / bases.d)))


def match_axis(v: np.ndarray, bases: MubCollection, tol: float = 1e-6) -> Optional[tuple[int, int]]:
    """(basis index, vector index) of an axis within projection distance ``tol``."""
    v = np.asarray(v, dtype=complex)
    if abs(np.linalg.norm(v) - 1.0) > 1e-10:
        raise ValueError("v must be a unit vector")
    best = None
    best_dist = np.inf
    for j, b in enumerate(bases.bases):
        ov = np.abs(b.conj() @ v) ** 2
        dist = np.sqrt(np.maximum(0.0, 2.0 - 2.0 * ov))
        i = int(np.argmin(dist))
        if dist[i] < best_dist:
            best_dist, best = float(dist[i]), (j, i)
    if best is not None and best_dist <= tol:
        return best
    return None


def min_axis_distance(v: np.ndarray, bases: MubCollection) -> float:
    v = np.asarray(v, dtype=complex)
    ov = np.abs(bases.axes().conj() @ v) ** 2
    return float(np.sqrt(max(0.0, 2.0 - 2.0 * float(np.max(ov)))))


# ---------------------------------------------------------------------------
# JSON: {"d": d, "bases": [[[ [re, im] x d ] x d ] x k]}


def mubs_to_dict(m: MubCollection) -> dict:
    out = {
        "d": m.d,
        "bases": [[[[float(z.real), float(z.imag)] for z in vec] for vec in b] for b in m.bases],
    }
    if m.provenance is not None:
        out["provenance"] = [p.to_dict() if hasattr(p, "to_dict") else p for p in m.provenance]
    return out


def mubs_from_dict(obj: dict) -> MubCollection:
    if "d" not in obj or "bases" not in obj:
        raise ValueError("MUB collection needs 'd' and 'bases'")
    d = int(obj["d"])
    bases = []
    for b in obj["bases"]:
        arr = np.asarray(b, dtype=float)
        if arr.shape != (d, d, 2):
            raise ValueError(f"basis entry of shape {arr.shape}, expected {(d, d, 2)}")
        bases.append(arr[..., 0] + 1j * arr[..., 1])
    return MubCollection(d, tuple(bases))
