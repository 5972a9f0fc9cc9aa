"""Rigidity of MUB collections: eigenvalue gap bounds, numerical search for
unbiased vectors, and certificates for the prime-square counterexample and
for uncompletable nice collections.

A :class:`Certificate` is a plain value: a list of named hypotheses, each with
a pass flag and a residual, plus witnesses.  Its verdict is the conjunction
of the hypotheses.  The ``evidence`` field says how the verdict was obtained:
``"construction"`` (explicit objects checked numerically), ``"enumeration"``
(exhaustive finite search) or ``"numerical_search"`` (randomised evidence,
not a proof).
"""
from __future__ import annotations

import hashlib
import itertools
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .algebra import _orthonormal_rows
from .classical import affine_plane, enumerate_transversals, points_of, remove_classes
from .knet import mubs_to_generalized, validate_knet
from .mubs import (
    MubCollection,
    match_axis,
    min_axis_distance,
    projection_distance,
    unbiasedness_residual,
)
from .nice import (
    NiceErrorBasis,
    Subgroup,
    _resolve_D,
    catalog,
    check_mub_subgroups,
    complete_subgroup_sets,
    enumerate_abelian_order_d_subgroups,
    masa_basis_from_subgroup,
    mubs_from_subgroups,
    prime_square_completion,
    sigma_violation,
    szanto_system,
    tensor_weyl,
    trivially_intersect,
)

__all__ = [
    "GapBounds", "lambda_gap", "unbiasedness_residual", "match_axis", "objective", "gradient",
    "riemannian_gradient", "SearchResult", "SearchReport", "unbiased_vector_search", "Certificate",
    "mub_certificate", "verify_counterexample", "uncompletability_certificate",
    "nice_extension_scan", "weak_unextendibility_certificate", "weakly_unextendible_d4_scenario",
    "rigidity_search_certificate", "classical_rigidity_certificate", "uncompletable_example",
]

SEARCH_GTOL = 1e-10
DEDUP_TOL = 1e-6
ARMIJO_C = 1e-4
STEP_SHRINK = 0.5
MAX_HALVINGS = 60
SEARCH_CHUNK = 64
# relative objective decrease treated as rounding noise, and how many such steps end a run
FLOOR_EPS = 1e-13
STALL_ITERS = 25
SPAN_TOL = 1e-8
UNBIASED_TOL = 1e-10
AXIS_GAP = 0.1


# ---------------------------------------------------------------------------
# eigenvalue gap


@dataclass(frozen=True)
class GapBounds:
    """Roots of x^2 - ((d-2)/d) x + ((d-1)/d^2)(k - 3 + 1/k) = 0.

    ``discriminant`` is exact; when it is negative the roots are not real and
    ``lambda_minus``/``lambda_plus`` are NaN (see :meth:`complex_roots`).
    """

    d: int
    k: int
    discriminant: Fraction
    lambda_minus: float
    lambda_plus: float

    @property
    def real(self) -> bool:
        return self.discriminant >= 0

    def complex_roots(self) -> tuple[complex, complex]:
        s = complex(float(self.discriminant)) ** 0.5
        base = self.d - 2
        return (base - s) / (2 * self.d), (base + s) / (2 * self.d)

    def to_dict(self) -> dict:
        return {"d": self.d, "k": self.k, "discriminant": str(self.discriminant),
                "real": self.real, "lambda_minus": self.lambda_minus,
                "lambda_plus": self.lambda_plus}


def lambda_gap(d: int, k: int) -> GapBounds:
    """lambda_pm = (d - 2 +- sqrt((d-2)^2 - 4(d-1)(k-3+1/k))) / (2d)."""
    if d < 2 or k < 1:
        raise ValueError("need d >= 2 and k >= 1")
    disc = Fraction((d - 2) ** 2) - 4 * (d - 1) * (Fraction(k - 3) + Fraction(1, k))
    if disc < 0:
        return GapBounds(d, k, disc, math.nan, math.nan)
    s = math.sqrt(disc)
    return GapBounds(d, k, disc, (d - 2 - s) / (2 * d), (d - 2 + s) / (2 * d))


# ---------------------------------------------------------------------------
# unbiased-vector search


def objective(axes: np.ndarray, v: np.ndarray) -> float:
    """F(v) = sum over axes e of (|<e, v>|^2 - 1/d)^2."""
    d = axes.shape[1]
    c = axes.conj() @ v
    return float(np.sum((np.abs(c) ** 2 - 1.0 / d) ** 2))


def gradient(axes: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Euclidean gradient of F on C^d = R^{2d}: 4 sum (|c_e|^2 - 1/d) c_e e."""
    d = axes.shape[1]
    c = axes.conj() @ v
    return 4.0 * ((np.abs(c) ** 2 - 1.0 / d) * c) @ axes


def riemannian_gradient(axes: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Gradient projected to the tangent space of the unit sphere at v."""
    g = gradient(axes, v)
    return g - np.real(np.vdot(v, g)) * v


def _batch(axes: np.ndarray, V: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d = axes.shape[1]
    C = V @ axes.conj().T
    W = np.abs(C) ** 2 - 1.0 / d
    F = np.sum(W * W, axis=1)
    G = 4.0 * (W * C) @ axes
    G -= np.real(np.sum(V.conj() * G, axis=1))[:, None] * V
    return F, G


def _descend(axes: np.ndarray, V: np.ndarray, max_iter: int, gtol: float):
    """Projected gradient descent with backtracking, row-wise, in place.

    Status codes: 0 running, 1 converged, 2 line search failed, 3 out of
    iterations, 4 stalled at the precision floor (``STALL_ITERS`` consecutive
    accepted steps whose decrease is at rounding level).
    """
    n = V.shape[0]
    status = np.zeros(n, dtype=int)
    iters = np.zeros(n, dtype=int)
    flat = np.zeros(n, dtype=int)
    for it in range(max_iter):
        act = np.flatnonzero(status == 0)
        if not len(act):
            break
        Va = V[act]
        F, G = _batch(axes, Va)
        gn = np.linalg.norm(G, axis=1)
        conv = gn <= gtol
        status[act[conv]] = 1
        keep = ~conv
        act, Va, F, G, gn = act[keep], Va[keep], F[keep], G[keep], gn[keep]
        iters[act] = it + 1
        t = np.ones(len(act))
        Fnew = F.copy()
        pending = np.ones(len(act), dtype=bool)
        for _ in range(MAX_HALVINGS):
            idx = np.flatnonzero(pending)
            if not len(idx):
                break
            trial = Va[idx] - t[idx, None] * G[idx]
            trial /= np.linalg.norm(trial, axis=1)[:, None]
            Ft, _ = _batch(axes, trial)
            ok = Ft <= F[idx] - ARMIJO_C * t[idx] * gn[idx] ** 2
            V[act[idx[ok]]] = trial[ok]
            Fnew[idx[ok]] = Ft[ok]
            pending[idx[ok]] = False
            t[idx[~ok]] *= STEP_SHRINK
        status[act[pending]] = 2
        noise = (F - Fnew) <= FLOOR_EPS * np.maximum(F, 1e-300)
        flat[act] = np.where(noise, flat[act] + 1, 0)
        status[act[(status[act] == 0) & (flat[act] >= STALL_ITERS)]] = 4
    status[status == 0] = 3
    F, G = _batch(axes, V)
    return status, iters, np.linalg.norm(G, axis=1), F


_STATUS = {1: "converged", 2: "line_search_failed", 3: "max_iter", 4: "stalled"}


def _canonical(v: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(v) > 1e-6))
    return v * (abs(v[i]) / v[i])


@dataclass(frozen=True, eq=False)
class SearchResult:
    vector: np.ndarray
    residual: float
    objective: float
    starts: tuple[int, ...]

    def to_dict(self) -> dict:
        return {"vector": [[float(z.real), float(z.imag)] for z in self.vector],
                "residual": self.residual, "objective": self.objective,
                "starts": list(self.starts)}


@dataclass(frozen=True, eq=False)
class SearchReport:
    d: int
    n_starts: int
    seed: int
    minima: tuple[SearchResult, ...]
    failures: tuple[dict, ...] = field(default=())

    def near_zero(self, tol: float = 1e-8) -> list[SearchResult]:
        return [m for m in self.minima if m.residual <= tol]

    def to_dict(self) -> dict:
        return {"d": self.d, "n_starts": self.n_starts, "seed": self.seed,
                "minima": [m.to_dict() for m in self.minima],
                "failures": list(self.failures)}


def unbiased_vector_search(bases: MubCollection, n_starts: int, seed: int = 42,
                           max_iter: int = 5000, jobs: int = 1,
                           gtol: float = SEARCH_GTOL) -> SearchReport:
    """Multi-start minimisation of F over the unit sphere of C^d.

    Starts are Gaussian vectors drawn up front from ``seed`` and processed in
    fixed-size chunks, so the result does not depend on ``jobs``.  Converged
    starts (gradient norm <= ``gtol``) are merged when their projections are
    within ``DEDUP_TOL``; the rest are reported as failures.
    """
    if n_starts < 1:
        raise ValueError("n_starts must be at least 1")
    d = bases.d
    axes = bases.axes()
    rng = np.random.default_rng(seed)
    V0 = rng.standard_normal((n_starts, d)) + 1j * rng.standard_normal((n_starts, d))
    V0 /= np.linalg.norm(V0, axis=1)[:, None]
    chunks = [V0[s:s + SEARCH_CHUNK].copy() for s in range(0, n_starts, SEARCH_CHUNK)]

    def run(V):
        return V, _descend(axes, V, max_iter, gtol)

    if jobs > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            done = list(pool.map(run, chunks))
    else:
        done = [run(V) for V in chunks]

    reps: list[list] = []  # [vector, starts]
    failures = []
    start = 0
    for V, (status, iters, gn, F) in done:
        for r in range(V.shape[0]):
            s = start + r
            if status[r] != 1:
                failures.append({"start": s, "status": _STATUS[int(status[r])],
                                 "iterations": int(iters[r]), "grad_norm": float(gn[r]),
                                 "objective": float(F[r])})
                continue
            v = V[r]
            for rep in reps:
                if projection_distance(rep[0], v) <= DEDUP_TOL:
                    rep[1].append(s)
                    break
            else:
                reps.append([v, [s]])
        start += V.shape[0]

    minima = []
    for v, starts in reps:
        v = _canonical(v / np.linalg.norm(v))
        minima.append(SearchResult(v, unbiasedness_residual(bases, v), objective(axes, v),
                                   tuple(starts)))
    minima.sort(key=lambda m: (round(m.residual, 12),
                               tuple(np.round(np.concatenate([m.vector.real, m.vector.imag]), 8))))
    return SearchReport(d, n_starts, seed, tuple(minima), tuple(failures))


# ---------------------------------------------------------------------------
# certificates


def _digest(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True).encode()).hexdigest()


def _collection_digest(bases: MubCollection) -> str:
    h = hashlib.sha256()
    h.update(str(bases.d).encode())
    for b in bases.bases:
        h.update(np.ascontiguousarray(b).tobytes())
    return h.hexdigest()


def _hyp(name: str, ok: bool, residual: float, **extra) -> dict:
    return {"name": name, "pass": bool(ok), "residual": float(residual), **extra}


@dataclass(frozen=True)
class Certificate:
    kind: str
    hypotheses: tuple[dict, ...]
    witnesses: dict
    tolerances: dict
    evidence: str
    inputs_digest: str
    seed: Optional[int] = None

    @property
    def verdict(self) -> bool:
        return bool(self.hypotheses) and all(h["pass"] for h in self.hypotheses)

    def failed(self) -> list[str]:
        return [h["name"] for h in self.hypotheses if not h["pass"]]

    def to_dict(self) -> dict:
        return {"kind": self.kind, "verdict": self.verdict, "evidence": self.evidence,
                "hypotheses": [dict(h) for h in self.hypotheses], "witnesses": self.witnesses,
                "tolerances": dict(self.tolerances), "seed": self.seed,
                "inputs_digest": self.inputs_digest}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, obj: dict) -> "Certificate":
        cert = cls(obj["kind"], tuple(obj["hypotheses"]), obj.get("witnesses", {}),
                   obj.get("tolerances", {}), obj.get("evidence", ""),
                   obj.get("inputs_digest", ""), obj.get("seed"))
        if "verdict" in obj and bool(obj["verdict"]) != cert.verdict:
            raise ValueError("stored verdict disagrees with the hypotheses")
        return cert


def _sub_witness(H: Subgroup) -> dict:
    out = {"generators": [list(g) for g in H.generators]}
    if H.label:
        out["label"] = H.label
    return out


def mub_certificate(bases: MubCollection, tol: float = 1e-9) -> Certificate:
    """Validity (and completeness when there are d+1 bases) of a MUB collection."""
    summary = validate_knet(mubs_to_generalized(bases), tol)
    worst, witness = bases.max_bias()
    hyps = [_hyp("unbiased", len(bases) < 2 or worst <= tol, worst,
                 **({} if witness is None else {"witness": list(witness)}))]
    bad = {}
    for v in summary.violations:
        bad.setdefault(v.clause, max(bad.get(v.clause, 0.0), v.residual))
    for clause in ("projection", "orthogonal", "sum", "order", "cross_trace", "dimension"):
        hyps.append(_hyp(f"knet_{clause}", clause not in bad, bad.get(clause, 0.0)))
    complete = len(bases) == bases.d + 1
    if complete:
        hyps.append(_hyp("complete", summary.complete, 0.0 if summary.complete else 1.0))
    return Certificate("complete" if complete else "mub_valid", tuple(hyps),
                       {"k": len(bases), "d": bases.d, "span_dim": summary.span_dim},
                       {"tol": tol}, "construction", _collection_digest(bases))


def _projection_rows(vectors: np.ndarray) -> np.ndarray:
    """HS coordinates of vv* for each row v (normalised trace on M_d)."""
    d = vectors.shape[1]
    return np.einsum("ni,nj->nij", vectors, vectors.conj()).reshape(len(vectors), -1) / np.sqrt(d)


def verify_counterexample(p: int, D: Optional[int] = None, seed: int = 0,
                          tol: float = 1e-9) -> Certificate:
    """The prime-square system {R_inf, R_{x,y}} together with S.

    (a) the p^2 + 1 subgroups give a complete set of MUBs in C^{p^2};
    (b) S's rank-one projections lie in the span of the R_inf and R_{0,y} MASAs;
    (c) S's basis is unbiased to the bases R_{x,y} with x != 0;
    (d) no S vector is within ``AXIS_GAP`` (projection distance) of a completion axis.
    """
    D = _resolve_D(p, D)
    basis = tensor_weyl(p)
    d = p * p
    subs = prime_square_completion(p, D)
    hyps = []
    mubs = mubs_from_subgroups(basis, subs, seed=seed)
    full = mub_certificate(mubs, tol)
    hyps.append(_hyp("count", len(mubs) == d + 1, abs(len(mubs) - (d + 1))))
    hyps.extend({**h, "name": f"system_{h['name']}"} for h in full.hypotheses)

    S = catalog("S", p)
    s_checks = check_mub_subgroups(basis, [S])
    hyps.extend({**h, "name": f"S_{h['name'].split('[')[0]}"} for h in s_checks)
    s_basis = masa_basis_from_subgroup(basis, S, seed=seed)

    # (b) span of the p + 1 MASAs R_inf, R_{0,y}; indices 0..p in the completion order
    rows = _projection_rows(np.concatenate([mubs.bases[i] for i in range(p + 1)]))
    Q = _orthonormal_rows(rows, SPAN_TOL)
    srows = _projection_rows(s_basis)
    resid = srows - (srows @ Q.conj().T) @ Q
    r_span = float(np.max(np.linalg.norm(resid, axis=1)))
    hyps.append(_hyp("span_dimension", Q.shape[0] == (p + 1) * (d - 1) + 1,
                     abs(Q.shape[0] - ((p + 1) * (d - 1) + 1))))
    hyps.append(_hyp("S_in_span", r_span <= SPAN_TOL, r_span))

    # (c) unbiased to the p^2 - p bases with x != 0
    far = mubs.subset(range(p + 1, d + 1))
    r_unb = max(unbiasedness_residual(far, v) for v in s_basis)
    hyps.append(_hyp("S_unbiased", r_unb <= UNBIASED_TOL, r_unb))

    # (d) S is not part of the completion
    gap = min(min_axis_distance(v, mubs) for v in s_basis)
    hyps.append(_hyp("S_not_axes", gap > AXIS_GAP, gap))

    return Certificate(
        "counterexample_confirmed", tuple(hyps),
        {"S": _sub_witness(S), "span_dim": int(Q.shape[0]),
         "near_bases": [subs[i].label for i in range(p + 1)],
         "far_bases": len(far), "min_axis_distance": gap},
        {"tol": tol, "span": SPAN_TOL, "unbiased": UNBIASED_TOL, "axis_gap": AXIS_GAP},
        "construction", _digest({"op": "counterexample", "p": p, "D": D, "seed": seed}), seed)


def _size_threshold(d: int) -> float:
    return d + 1 - math.sqrt(d)


def _collection_hypotheses(basis: NiceErrorBasis, collection: Sequence[Subgroup]) -> list[dict]:
    d = basis.d
    need = _size_threshold(d)
    hyps = [_hyp("size", len(collection) >= need - 1e-12, max(0.0, need - len(collection)),
                 threshold=need)]
    for h in check_mub_subgroups(basis, collection):
        hyps.append({**h, "name": f"collection_{h['name']}"})
    return hyps


def uncompletability_certificate(basis: NiceErrorBasis, collection: Sequence[Subgroup],
                                 witness: Subgroup) -> Certificate:
    """Hypotheses of the non-commuting witness criterion.

    A collection of at least d + 1 - sqrt(d) nice MUBs together with an
    order-d subgroup that meets every member trivially but on which sigma is
    not identically 1 cannot be completed.
    """
    d = basis.d
    hyps = _collection_hypotheses(basis, collection)
    hyps.append(_hyp("witness_order", witness.order == d, abs(witness.order - d)))
    common = [(j, sorted(witness.element_set & H.element_set - {basis.group.zero}))
              for j, H in enumerate(collection)]
    common = [(j, c) for j, c in common if c]
    hyps.append(_hyp("witness_trivial_intersections", not common, len(common),
                     **({} if not common else {"witness": [common[0][0], list(common[0][1][0])]})))
    bad = sigma_violation(basis, witness)
    hyps.append(_hyp("witness_sigma_nontrivial", bad is not None,
                     0.0 if bad is None else abs(bad[2] - 1.0)))
    wit = {"witness": _sub_witness(witness),
           "collection": [_sub_witness(H) for H in collection]}
    if bad is not None:
        wit["violating_pair"] = {"g": list(bad[0]), "h": list(bad[1]),
                                 "sigma": [bad[2].real, bad[2].imag]}
    gens = witness.generators
    if len(gens) >= 2:
        s = basis.commutator(gens[0], gens[1])
        wit["generator_sigma"] = {"g": list(gens[0]), "h": list(gens[1]),
                                  "sigma": [s.real, s.imag],
                                  "exponent": _root_exponent(s, basis.group.moduli[0])}
    return Certificate("uncompletable", tuple(hyps), wit, {"sigma": 1e-9},
                       "construction",
                       _digest({"op": "uncompletable", "basis": basis.descriptor,
                                "collection": [H.to_dict() for H in collection],
                                "witness": witness.to_dict()}))


def _root_exponent(z: complex, n: int) -> Optional[int]:
    """j with z = exp(2 pi i j / n), if z is an n-th root of unity."""
    j = round(np.angle(z) * n / (2 * np.pi)) % n
    if abs(z - np.exp(2j * np.pi * j / n)) <= 1e-9:
        return int(j)
    return None


def uncompletable_example(p: int, variant: str = "T", D: Optional[int] = None) -> Certificate:
    """The two prime-square uncompletable collections.

    ``T``: {S} and the R_{x,y} with x != 0, witness T.
    ``szanto``: the A_{x,y} with y != 0 plus B_q, witness B_0.
    """
    D = _resolve_D(p, D)
    basis = tensor_weyl(p)
    if variant == "T":
        coll = [catalog("S", p)] + [catalog("R", p, D, (x, y)) for x in range(1, p) for y in range(p)]
        witness = catalog("T", p)
    elif variant == "szanto":
        a_subs, b_subs = szanto_system(p, D)
        coll = a_subs + b_subs[:1]
        witness = catalog("B", p, D, (0,))
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return uncompletability_certificate(basis, coll, witness)


_ENUM_CACHE: dict[str, list[Subgroup]] = {}


def _all_nice_subgroups(basis: NiceErrorBasis) -> list[Subgroup]:
    key = json.dumps(basis.descriptor, sort_keys=True)
    if key not in _ENUM_CACHE:
        _ENUM_CACHE[key] = enumerate_abelian_order_d_subgroups(basis)
    return _ENUM_CACHE[key]


def nice_extension_scan(basis: NiceErrorBasis, collection: Sequence[Subgroup]) -> list[Subgroup]:
    """Every sigma-trivial order-d subgroup meeting each collection member trivially."""
    return [H for H in _all_nice_subgroups(basis)
            if all(trivially_intersect(H, K) for K in collection)]


def weak_unextendibility_certificate(basis: NiceErrorBasis,
                                     collection: Sequence[Subgroup]) -> Certificate:
    """Empty nice-extension scan plus the size bound implies uncompletability."""
    hyps = _collection_hypotheses(basis, collection)
    ext = nice_extension_scan(basis, collection)
    hyps.append(_hyp("no_nice_extension", not ext, len(ext)))
    return Certificate("uncompletable", tuple(hyps),
                       {"collection": [_sub_witness(H) for H in collection],
                        "extensions": [_sub_witness(H) for H in ext],
                        "candidates": len(_all_nice_subgroups(basis))},
                       {"sigma": 1e-9}, "enumeration",
                       _digest({"op": "extension-scan", "basis": basis.descriptor,
                                "collection": [H.to_dict() for H in collection]}))


@dataclass(frozen=True)
class UnextendibleScenario:
    complete: tuple[Subgroup, ...]
    extra: Subgroup
    collection: tuple[Subgroup, ...]
    certificate: Certificate
    counts: tuple[int, ...]


def weakly_unextendible_d4_scenario(basis: Optional[NiceErrorBasis] = None) -> UnextendibleScenario:
    """The d = 4 uncompletable collection built from a complete nice set.

    For a complete set H_1..H_5 of sigma-trivial subgroups, exactly one other
    sigma-trivial order-4 subgroup H lies inside H_1 u H_2 u H_3; the
    collection {H, H_4, H_5} then has an empty nice-extension scan.
    ``counts`` records, over every complete set and every choice of three of
    its members, how many such H exist (all entries are 1).
    """
    basis = tensor_weyl(2) if basis is None else basis
    subs = _all_nice_subgroups(basis)
    sets = complete_subgroup_sets(basis, subs)
    if not sets:
        raise ValueError("no complete nice set")
    counts = []
    first = None
    for cs in sets:
        for trio in itertools.combinations(range(len(cs)), 3):
            union = frozenset().union(*(cs[i].element_set for i in trio))
            inside = [H for H in subs if H not in cs and H.element_set <= union]
            counts.append(len(inside))
            if first is None and trio == (0, 1, 2) and len(inside) == 1:
                first = (cs, inside[0])
    if first is None:
        raise ValueError("no subgroup inside the union of three members")
    cs, H = first
    coll = (H, cs[3], cs[4])
    cert = weak_unextendibility_certificate(basis, coll)
    return UnextendibleScenario(cs, H, coll, cert, tuple(counts))


# ---------------------------------------------------------------------------
# rigidity at k = sqrt(d)


def rigidity_search_certificate(kept: MubCollection, withheld: MubCollection, n_starts: int = 200,
                                seed: int = 42, residual_tol: float = 1e-8,
                                match_tol: float = 1e-6, jobs: int = 1) -> Certificate:
    """Numerical evidence that unbiased vectors to ``kept`` are axes of ``withheld``."""
    report = unbiased_vector_search(kept, n_starts, seed, jobs=jobs)
    near = report.near_zero(residual_tol)
    matched, unmatched = set(), []
    for m in near:
        hit = match_axis(m.vector, withheld, match_tol)
        if hit is None:
            unmatched.append(m)
        else:
            matched.add(hit)
    n_axes = len(withheld) * withheld.d
    hyps = [_hyp("only_withheld_axes", not unmatched, len(unmatched)),
            _hyp("found_minima", bool(near), 0.0 if near else 1.0)]
    return Certificate(
        "rigidity_confirmed", tuple(hyps),
        {"matched_axes": sorted(list(h) for h in matched), "withheld_axes": n_axes,
         "near_zero": len(near), "minima": len(report.minima), "failures": len(report.failures),
         "unmatched": [m.to_dict() for m in unmatched]},
        {"residual": residual_tol, "match": match_tol, "gtol": SEARCH_GTOL, "dedup": DEDUP_TOL},
        "numerical_search",
        _digest({"op": "search", "kept": _collection_digest(kept),
                 "withheld": _collection_digest(withheld), "n_starts": n_starts}), seed)


def classical_rigidity_certificate(q: int, drop: Sequence[int], D: Optional[int] = None) -> Certificate:
    """Exhaustive check that every transversal of the plane minus ``drop`` is a removed line."""
    plane = affine_plane(q, D)
    net = remove_classes(plane, drop)
    trans = enumerate_transversals(net)
    removed = sorted(points_of(l) for j in sorted(set(drop)) for l in plane.classes[j])
    extra = [t for t in trans if t not in set(removed)]
    missing = [r for r in removed if r not in set(trans)]
    hyps = [_hyp("transversals_are_removed_lines", not extra, len(extra)),
            _hyp("removed_lines_are_transversals", not missing, len(missing))]
    return Certificate("rigidity_confirmed", tuple(hyps),
                       {"transversals": [list(t) for t in trans], "removed": len(removed)},
                       {}, "enumeration", _digest({"op": "plane", "q": q, "drop": sorted(drop)}))
