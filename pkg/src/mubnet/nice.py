"""Nice error bases with abelian index groups.

A nice error basis is a family of unitaries ``U(g)`` indexed by an abelian
group ``G`` of order d^2 with ``U(e) = I``, ``Tr U(g) = 0`` for ``g != e``
and ``U(g) U(h) = lambda(g, h) U(g + h)``.  Order-d subgroups on which the
commutator map is trivial give orthonormal bases (common eigenbases), and
pairwise trivially intersecting such subgroups give mutually unbiased bases.

The phase ``lambda`` and the commutator ``sigma`` are measured numerically
from the unitaries, so the same code works for any supplied basis.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from . import kernels
from .fields import check_nonresidue, is_prime, smallest_nonresidue
from .mubs import MubCollection

SIGMA_TOL = 1e-9
DIAGONAL_TOL = 1e-8
MASA_RETRIES = 8
# eigenvalue gap below which the generic element is treated as degenerate
SPECTRAL_GAP_MIN = 1e-6
ENUMERATION_BUDGET = 6561

Element = tuple[int, ...]


class SubgroupError(ValueError):
    pass


class MubConstructionError(ValueError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class BudgetExceededError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# groups


@dataclass(frozen=True)
class AbelianGroup:
    moduli: tuple[int, ...]

    def __post_init__(self) -> None:
        mods = tuple(int(m) for m in self.moduli)
        if not mods or any(m < 1 for m in mods):
            raise ValueError("moduli must be positive")
        object.__setattr__(self, "moduli", mods)

    @property
    def order(self) -> int:
        return int(np.prod(self.moduli))

    @property
    def zero(self) -> Element:
        return tuple(0 for _ in self.moduli)

    def reduce(self, g: Sequence[int]) -> Element:
        if len(g) != len(self.moduli):
            raise ValueError(f"element {tuple(g)} has wrong length for moduli {self.moduli}")
        return tuple(int(a) % m for a, m in zip(g, self.moduli))

    def add(self, g: Element, h: Element) -> Element:
        return tuple((a + b) % m for a, b, m in zip(g, h, self.moduli))

    def neg(self, g: Element) -> Element:
        return tuple((-a) % m for a, m in zip(g, self.moduli))

    def elements(self) -> list[Element]:
        return list(itertools.product(*(range(m) for m in self.moduli)))


class Subgroup:
    """A subgroup given by generators, with its sorted element list."""

    __slots__ = ("group", "generators", "elements", "_set", "label")

    def __init__(self, group: AbelianGroup, generators: Iterable[Sequence[int]],
                 elements: Optional[Sequence[Element]] = None, label: Optional[str] = None):
        self.group = group
        self.generators = tuple(group.reduce(g) for g in generators)
        if elements is None:
            elements = kernels.subgroup_closure(group.moduli, self.generators)
        self.elements = tuple(tuple(int(a) for a in e) for e in elements)
        self._set = frozenset(self.elements)
        self.label = label

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def element_set(self) -> frozenset:
        return self._set

    def __contains__(self, g) -> bool:
        return tuple(g) in self._set

    def __eq__(self, other) -> bool:
        return isinstance(other, Subgroup) and self.group == other.group and self._set == other._set

    def __hash__(self) -> int:
        return hash((self.group, self._set))

    def __repr__(self) -> str:
        name = self.label or "Subgroup"
        return f"{name}<{', '.join(map(str, self.generators))}> (order {self.order})"

    def to_dict(self) -> dict:
        out = {"moduli": list(self.group.moduli), "generators": [list(g) for g in self.generators]}
        if self.label:
            out["label"] = self.label
        return out

    @classmethod
    def from_dict(cls, obj: dict) -> "Subgroup":
        return subgroup_closure(AbelianGroup(tuple(obj["moduli"])), obj["generators"],
                                label=obj.get("label"))


def subgroup_closure(group: AbelianGroup, generators: Iterable[Sequence[int]],
                     label: Optional[str] = None) -> Subgroup:
    """The subgroup generated by ``generators`` (breadth-first closure)."""
    return Subgroup(group, list(generators), label=label)


def trivially_intersect(h1: Subgroup, h2: Subgroup) -> bool:
    if h1.group != h2.group:
        raise ValueError("subgroups of different groups")
    return h1.element_set & h2.element_set == {h1.group.zero}


# ---------------------------------------------------------------------------
# nice error bases


def shift_matrix(d: int) -> np.ndarray:
    """X_d e_j = e_{j+1 mod d}."""
    return np.roll(np.eye(d, dtype=complex), 1, axis=0)


def clock_matrix(d: int) -> np.ndarray:
    """Z_d e_j = omega^(j-1) e_j for j = 1..d."""
    return np.diag(np.exp(2j * np.pi * np.arange(d) / d))


class NiceErrorBasis:
    """Unitaries ``U(g)`` on C^d indexed by an abelian group of order d^2.

    ``factory`` builds the unitary for a reduced group element; results are
    cached.  ``descriptor`` is a JSON-able recipe for rebuilding the basis.
    """

    def __init__(self, group: AbelianGroup, d: int, factory: Callable[[Element], np.ndarray],
                 descriptor: dict):
        if group.order != d * d:
            raise ValueError(f"index group of order {group.order} for d={d}")
        self.group = group
        self.d = d
        self._factory = factory
        self._cache: dict[Element, np.ndarray] = {}
        self._sigma: dict[tuple[Element, Element], complex] = {}
        self.descriptor = dict(descriptor)

    def unitary(self, g: Sequence[int]) -> np.ndarray:
        g = self.group.reduce(g)
        u = self._cache.get(g)
        if u is None:
            u = np.array(self._factory(g), dtype=complex)
            u.setflags(write=False)
            self._cache[g] = u
        return u

    def phase(self, g: Sequence[int], h: Sequence[int]) -> complex:
        """lambda(g, h) from U(g) U(h) U(g+h)* = lambda I."""
        g, h = self.group.reduce(g), self.group.reduce(h)
        prod = self.unitary(g) @ self.unitary(h) @ self.unitary(self.group.add(g, h)).conj().T
        return complex(np.trace(prod) / self.d)

    def commutator(self, g: Sequence[int], h: Sequence[int]) -> complex:
        """sigma(g, h) = lambda(g, h) / lambda(h, g), i.e. U(g)U(h) = sigma U(h)U(g)."""
        g, h = self.group.reduce(g), self.group.reduce(h)
        key = (g, h)
        s = self._sigma.get(key)
        if s is None:
            ug, uh = self.unitary(g), self.unitary(h)
            s = complex(np.vdot(uh @ ug, ug @ uh) / self.d)
            self._sigma[key] = s
        return s

    def commutes(self, g: Sequence[int], h: Sequence[int], tol: float = SIGMA_TOL) -> bool:
        return abs(self.commutator(g, h) - 1.0) <= tol

    @cached_property
    def _elements(self) -> list[Element]:
        return self.group.elements()

    def stacked(self, elements: Optional[Sequence[Element]] = None) -> np.ndarray:
        elements = self._elements if elements is None else elements
        return np.array([self.unitary(g) for g in elements])

    def check_axioms(self, tol: float = 1e-10, full_products: Optional[bool] = None) -> list[dict]:
        """Evaluate the nice-error-basis axioms.

        Returns ``[{"name", "pass", "residual"}, ...]``.  The product rule is
        checked on all pairs when ``|G| <= 200`` (or ``full_products``), and
        otherwise on (generator, h) pairs for the standard generators of G,
        which implies it for all pairs.
        """
        G = self.group
        elems = self._elements
        stack = self.stacked(elems)
        d = self.d
        eye = np.eye(d)
        zero = G.zero
        checks = []

        r_id = float(np.max(np.abs(self.unitary(zero) - eye)))
        checks.append({"name": "identity", "pass": r_id <= tol, "residual": r_id})

        unit = np.einsum("gij,gkj->gik", stack, stack.conj()) - eye
        r_unit = float(np.max(np.abs(unit)))
        checks.append({"name": "unitary", "pass": r_unit <= tol, "residual": r_unit})

        traces = np.abs(np.einsum("gii->g", stack))
        nz = [i for i, g in enumerate(elems) if g != zero]
        r_tr = float(np.max(traces[nz])) if nz else 0.0
        checks.append({"name": "traceless", "pass": r_tr <= tol, "residual": r_tr})

        flat = stack.reshape(len(elems), -1)
        gram = flat.conj() @ flat.T / d
        r_orth = float(np.max(np.abs(gram - np.eye(len(elems)))))
        checks.append({"name": "orthonormal", "pass": r_orth <= tol, "residual": r_orth})

        if full_products is None:
            full_products = len(elems) <= 200
        if full_products:
            lefts = elems
        else:
            lefts = [tuple(1 if i == j else 0 for i in range(len(G.moduli))) for j in range(len(G.moduli))]
        index = {g: i for i, g in enumerate(elems)}
        r_prod = 0.0
        r_abs = 0.0
        for g in lefts:
            prods = self.unitary(g) @ stack
            targets = stack[[index[G.add(g, h)] for h in elems]]
            lam = np.einsum("hij,hij->h", targets.conj(), prods) / d
            r_prod = max(r_prod, float(np.max(np.abs(prods - lam[:, None, None] * targets))))
            r_abs = max(r_abs, float(np.max(np.abs(np.abs(lam) - 1.0))))
        checks.append({"name": "projective_product", "pass": r_prod <= tol, "residual": r_prod,
                       "mode": "all_pairs" if full_products else "generators"})
        checks.append({"name": "unit_phase", "pass": r_abs <= tol, "residual": r_abs})
        return checks

    def __repr__(self) -> str:
        return f"NiceErrorBasis({self.descriptor})"


def weyl_basis(d: int) -> NiceErrorBasis:
    """Discrete Weyl operators U(j, l) = X_d^j Z_d^l on C^d, index group Z_d^2."""
    if d < 2:
        raise ValueError("d must be at least 2")
    X, Z = shift_matrix(d), clock_matrix(d)
    xp = [np.linalg.matrix_power(X, j) for j in range(d)]
    zp = [np.linalg.matrix_power(Z, j) for j in range(d)]

    def factory(g: Element) -> np.ndarray:
        return xp[g[0]] @ zp[g[1]]

    return NiceErrorBasis(AbelianGroup((d, d)), d, factory, {"kind": "weyl", "d": d})


def tensor_weyl(p: int) -> NiceErrorBasis:
    """U(j, l, r, s) = X^j Z^l (x) X^r Z^s on C^{p^2}, index group Z_p^4."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    X, Z = shift_matrix(p), clock_matrix(p)
    w = [[np.linalg.matrix_power(X, j) @ np.linalg.matrix_power(Z, l) for l in range(p)]
         for j in range(p)]

    def factory(g: Element) -> np.ndarray:
        return np.kron(w[g[0]][g[1]], w[g[2]][g[3]])

    return NiceErrorBasis(AbelianGroup((p, p, p, p)), p * p, factory,
                          {"kind": "tensor_weyl", "p": p})


def basis_from_descriptor(desc: dict) -> NiceErrorBasis:
    kind = desc.get("kind")
    if kind == "weyl":
        return weyl_basis(int(desc["d"]))
    if kind == "tensor_weyl":
        return tensor_weyl(int(desc["p"]))
    raise ValueError(f"unknown nice error basis kind {kind!r}")


# ---------------------------------------------------------------------------
# subgroups and MASAs


def is_sigma_trivial(basis: NiceErrorBasis, H: Subgroup, tol: float = SIGMA_TOL) -> bool:
    return sigma_violation(basis, H, tol) is None


def sigma_violation(basis: NiceErrorBasis, H: Subgroup, tol: float = SIGMA_TOL):
    """First pair (g, h, sigma) in H x H with sigma != 1, or None (exhaustive)."""
    elems = H.elements
    for i, g in enumerate(elems):
        for h in elems[i + 1:]:
            s = basis.commutator(g, h)
            if abs(s - 1.0) > tol:
                return g, h, s
    return None


def _canonical_phase(v: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(v) > 1e-6))
    return v * (abs(v[i]) / v[i])


def masa_basis_from_subgroup(basis: NiceErrorBasis, H: Subgroup, seed: int = 0,
                             tol: float = DIAGONAL_TOL) -> np.ndarray:
    """Common eigenbasis of {U(h) : h in H}; rows are the basis vectors.

    A generic self-adjoint element of span{U(h)} is diagonalised; its spectrum
    must be simple, otherwise the coefficients are redrawn with the next seed
    (at most ``MASA_RETRIES`` draws).  Vectors are ordered by their tuple of
    U(h)-eigenvalues (descending) and phased so the first non-negligible
    coordinate is real positive.
    """
    d = basis.d
    if H.order != d:
        raise SubgroupError(f"subgroup of order {H.order}, need {d}")
    bad = sigma_violation(basis, H)
    if bad is not None:
        raise SubgroupError(f"sigma is not trivial on {H}: sigma{bad[:2]} = {bad[2]:.6f}")
    us = [basis.unitary(h) for h in H.elements]
    herm = []
    for u in us:
        herm.append(0.5 * (u + u.conj().T))
        herm.append((u - u.conj().T) / 2j)
    herm = np.array(herm)
    for attempt in range(MASA_RETRIES):
        rng = np.random.default_rng(seed + attempt)
        coeffs = rng.standard_normal(len(herm))
        A = np.einsum("k,kij->ij", coeffs, herm)
        A = 0.5 * (A + A.conj().T)
        evals, vecs = np.linalg.eigh(A)
        if np.min(np.diff(evals)) < SPECTRAL_GAP_MIN:
            continue
        V = vecs.T  # rows are eigenvectors
        worst = 0.0
        labels = []
        for u in us:
            D = V.conj() @ u @ V.T
            off = D - np.diag(np.diag(D))
            worst = max(worst, float(np.max(np.abs(off))))
            labels.append(np.diag(D))
        if worst > tol:
            raise SubgroupError(f"U(h) not diagonal in the computed basis (residual {worst:.2e})")
        labels = np.array(labels).T  # row i: eigenvalues of each U(h) on vector i
        keys = [tuple((round(float(z.real), 6), round(float(z.imag), 6)) for z in row) for row in labels]
        order = sorted(range(d), key=lambda i: keys[i], reverse=True)
        return np.array([_canonical_phase(V[i]) for i in order])
    raise SubgroupError(f"degenerate generic spectrum after {MASA_RETRIES} attempts")


def check_mub_subgroups(basis: NiceErrorBasis, subgroups: Sequence[Subgroup]) -> list[dict]:
    """Hypotheses for generating MUBs from subgroups, each with a witness."""
    d = basis.d
    out = []
    for j, H in enumerate(subgroups):
        out.append({"name": f"order[{j}]", "pass": H.order == d, "residual": float(abs(H.order - d))})
        bad = sigma_violation(basis, H)
        out.append({"name": f"sigma_trivial[{j}]", "pass": bad is None,
                    "residual": 0.0 if bad is None else float(abs(bad[2] - 1.0)),
                    **({} if bad is None else {"witness": [list(bad[0]), list(bad[1])]})})
    for i in range(len(subgroups)):
        for j in range(i + 1, len(subgroups)):
            common = sorted(subgroups[i].element_set & subgroups[j].element_set - {basis.group.zero})
            out.append({"name": f"trivial_intersection[{i},{j}]", "pass": not common,
                        "residual": float(len(common)),
                        **({} if not common else {"witness": list(common[0])})})
    return out


def mubs_from_subgroups(basis: NiceErrorBasis, subgroups: Sequence[Subgroup], seed: int = 0,
                        tol: float = 1e-10) -> MubCollection:
    """One basis per subgroup; preconditions and unbiasedness are verified."""
    for h in check_mub_subgroups(basis, subgroups):
        if not h["pass"]:
            raise MubConstructionError(f"hypothesis {h['name']} fails", h.get("witness"))
    bases = tuple(masa_basis_from_subgroup(basis, H, seed=seed) for H in subgroups)
    coll = MubCollection(basis.d, bases, tuple(subgroups))
    worst, witness = coll.max_bias()
    if len(bases) > 1 and worst > tol:
        raise MubConstructionError(f"bases are not unbiased (deviation {worst:.3e})", witness)
    return coll


# ---------------------------------------------------------------------------
# subgroup catalogue


def _resolve_D(p: int, D: Optional[int]) -> int:
    if p == 2 or not is_prime(p):
        raise ValueError("this construction needs an odd prime p")
    return smallest_nonresidue(p) if D is None else check_nonresidue(D, p)


def catalog(name: str, p: int, D: Optional[int] = None, params: Sequence[int] = ()) -> Subgroup:
    """Named subgroups of Z_p^4: R (x, y), R_inf, S, T, A (x, y), B (x)."""
    G = AbelianGroup((p, p, p, p))
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    params = tuple(int(v) for v in params)

    def need(n: int) -> None:
        if len(params) != n:
            raise ValueError(f"{name} takes {n} parameter(s), got {len(params)}")

    if name == "R_inf":
        need(0)
        return subgroup_closure(G, [(0, 1, 0, 0), (0, 0, 1, 0)], label="R_inf")
    if name == "S":
        need(0)
        return subgroup_closure(G, [(1, 0, 0, 0), (0, 0, 1, 0)], label="S")
    if name == "T":
        need(0)
        return subgroup_closure(G, [(1, 0, 0, 1), (0, 1, -1, 0)], label="T")
    if name == "R":
        need(2)
        Dv = _resolve_D(p, D)
        x, y = params
        return subgroup_closure(G, [(1, x, y, 0), (0, -y, -Dv * x, 1)], label=f"R_{x % p},{y % p}")
    if name == "A":
        need(2)
        Dv = _resolve_D(p, D)
        x, y = params
        if y % p == 0:
            raise ValueError("A_{x,y} needs y != 0")
        yinv = pow(y, -1, p)
        return subgroup_closure(G, [(0, 1, x, yinv * (1 - Dv * x * x)), (1, 0, -y, Dv * x)],
                                label=f"A_{x % p},{y % p}")
    if name == "B":
        need(1)
        Dv = _resolve_D(p, D)
        (x,) = params
        return subgroup_closure(G, [(0, 1, x, 0), (1, 0, 0, -x * Dv)], label=f"B_{x % p}")
    raise ValueError(f"unknown catalogue subgroup {name!r}")


def parse_catalog_spec(spec: str, p: int, D: Optional[int] = None) -> list[Subgroup]:
    """Parse ``"R:0,1;R_inf;S"`` style lists (``;``-separated)."""
    out = []
    for item in spec.split(";"):
        item = item.strip()
        if not item:
            continue
        if ":" in item:
            name, args = item.split(":", 1)
            params = [int(a) for a in args.split(",") if a.strip()]
        else:
            name, params = item, []
        out.append(catalog(name.strip(), p, D, params))
    return out


def standard_weyl_subgroups(d: int) -> list[Subgroup]:
    """<(1, c)> for c in Z_d, then <(0, 1)>; d+1 MUB subgroups when d is prime."""
    G = AbelianGroup((d, d))
    subs = [subgroup_closure(G, [(1, c)], label=f"W_{c}") for c in range(d)]
    subs.append(subgroup_closure(G, [(0, 1)], label="W_inf"))
    return subs


def prime_square_completion(p: int, D: Optional[int] = None) -> list[Subgroup]:
    """R_inf followed by R_{x,y} in lexicographic (x, y) order: p^2 + 1 subgroups."""
    D = _resolve_D(p, D)
    return [catalog("R_inf", p)] + [catalog("R", p, D, (x, y)) for x in range(p) for y in range(p)]


def szanto_q(p: int, D: int) -> int:
    """Smallest q with q^2 = -1/D mod p; exists iff p = 3 mod 4."""
    if p % 4 != 3:
        raise ValueError("the B_q, B_{p-q} choice needs p = 3 (mod 4)")
    target = (-pow(D, -1, p)) % p
    for q in range(1, p):
        if (q * q) % p == target:
            return q
    raise AssertionError("unreachable: -1/D is a square when p = 3 mod 4")


def szanto_system(p: int, D: Optional[int] = None) -> tuple[list[Subgroup], list[Subgroup]]:
    """(A_{x,y} for y != 0, [B_q, B_{p-q}])."""
    D = _resolve_D(p, D)
    q = szanto_q(p, D)
    a_subs = [catalog("A", p, D, (x, y)) for x in range(p) for y in range(1, p)]
    return a_subs, [catalog("B", p, D, (q,)), catalog("B", p, D, (p - q,))]


# ---------------------------------------------------------------------------
# exhaustive enumeration


def enumerate_abelian_order_d_subgroups(basis: NiceErrorBasis,
                                        budget: int = ENUMERATION_BUDGET) -> list[Subgroup]:
    """All order-d subgroups on which sigma is trivial.

    Subgroups are grown one generator at a time, only ever adding elements
    that commute with the current generators; intermediate subgroups are
    de-duplicated by element set.  Output is sorted by element tuple.
    """
    G = basis.group
    d = basis.d
    if G.order > budget:
        raise BudgetExceededError(f"index group of order {G.order} exceeds budget {budget}")
    elems = G.elements()
    zero = G.zero
    comm: dict[tuple[Element, Element], bool] = {}

    def commute(g: Element, h: Element) -> bool:
        key = (g, h) if g <= h else (h, g)
        c = comm.get(key)
        if c is None:
            c = basis.commutes(g, h)
            comm[key] = c
        return c

    found: dict[frozenset, Subgroup] = {}
    level = {frozenset([zero]): Subgroup(G, [], [zero])}
    while level:
        nxt: dict[frozenset, Subgroup] = {}
        for key, K in level.items():
            for g in elems:
                if g in key:
                    continue
                if not commute(g, g) or not all(commute(g, k) for k in K.generators):
                    continue
                gens = K.generators + (g,)
                K2 = Subgroup(G, gens)
                if K2.order > d or d % K2.order:
                    continue
                if K2.element_set in found or K2.element_set in nxt:
                    continue
                if K2.order == d:
                    if is_sigma_trivial(basis, K2):
                        found[K2.element_set] = K2
                else:
                    nxt[K2.element_set] = K2
        level = nxt
    return sorted(found.values(), key=lambda H: H.elements)


def complete_subgroup_sets(basis: NiceErrorBasis, subgroups: Optional[Sequence[Subgroup]] = None,
                           limit: Optional[int] = None) -> list[tuple[Subgroup, ...]]:
    """Sets of d+1 pairwise trivially intersecting sigma-trivial order-d subgroups.

    Depth-first over the (sorted) candidate list, so the output order is
    lexicographic in candidate index.  ``limit`` stops after that many sets.
    """
    if subgroups is None:
        subgroups = enumerate_abelian_order_d_subgroups(basis)
    subs = list(subgroups)
    n = len(subs)
    ok = [[i != j and trivially_intersect(subs[i], subs[j]) for j in range(n)] for i in range(n)]
    target = basis.d + 1
    out: list[tuple[Subgroup, ...]] = []

    def grow(chosen: list[int], start: int) -> bool:
        if len(chosen) == target:
            out.append(tuple(subs[i] for i in chosen))
            return limit is not None and len(out) >= limit
        for i in range(start, n):
            if all(ok[i][j] for j in chosen):
                chosen.append(i)
                if grow(chosen, i + 1):
                    return True
                chosen.pop()
        return False

    grow([], 0)
    return out
