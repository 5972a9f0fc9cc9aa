import json
import math
from fractions import Fraction

import numpy as np
import pytest

from mubnet.mubs import MubCollection, match_axis, projection_distance, unbiasedness_residual
from mubnet.nice import (
    catalog,
    complete_subgroup_sets,
    mubs_from_subgroups,
    prime_square_completion,
    standard_weyl_subgroups,
    szanto_system,
    tensor_weyl,
    weyl_basis,
)
from mubnet.rigidity import (
    Certificate,
    classical_rigidity_certificate,
    gradient,
    lambda_gap,
    mub_certificate,
    nice_extension_scan,
    objective,
    riemannian_gradient,
    rigidity_search_certificate,
    weakly_unextendible_d4_scenario,
    uncompletability_certificate,
    uncompletable_example,
    unbiased_vector_search,
    verify_counterexample,
    weak_unextendibility_certificate,
)


def fourier(d):
    j = np.arange(d)
    return np.exp(2j * np.pi * np.outer(j, j) / d) / np.sqrt(d)


@pytest.fixture(scope="module")
def d4_complete():
    basis = tensor_weyl(2)
    return mubs_from_subgroups(basis, complete_subgroup_sets(basis)[0])


# ---------------------------------------------------------------------------
# eigenvalue gap


def test_lambda_gap_against_polynomial_roots():
    for d in range(4, 1601):
        for k in range(2, math.isqrt(d) + 1):
            if d > 40 and d % 37:
                continue
            g = lambda_gap(d, k)
            roots = np.roots([1.0, -(d - 2) / d, (d - 1) / d ** 2 * (k - 3 + 1 / k)])
            if g.real:
                lo, hi = sorted(roots.real)
                assert abs(g.lambda_minus - lo) <= 1e-12 * max(1.0, abs(lo)) + 1e-12
                assert abs(g.lambda_plus - hi) <= 1e-12 * max(1.0, abs(hi)) + 1e-12


def test_lambda_gap_examples():
    g = lambda_gap(4, 2)
    assert g.discriminant == 10
    assert g.lambda_plus == pytest.approx((2 + math.sqrt(10)) / 8, abs=1e-12)
    assert g.lambda_minus == pytest.approx((2 - math.sqrt(10)) / 8, abs=1e-12)
    assert g.lambda_plus == pytest.approx(0.64528, abs=1e-5)


def test_lambda_gap_d4_k3_double_root():
    g = lambda_gap(4, 3)
    assert g.discriminant == Fraction(0)
    assert g.real
    assert g.lambda_minus == g.lambda_plus == 0.25


def test_lambda_gap_negative_discriminant():
    g = lambda_gap(4, 4)
    assert not g.real
    assert math.isnan(g.lambda_plus)
    lo, hi = g.complex_roots()
    assert abs(lo.imag) > 0 and lo == pytest.approx(hi.conjugate())
    with pytest.raises(ValueError):
        lambda_gap(1, 2)


# ---------------------------------------------------------------------------
# residuals and matching


def test_unbiasedness_residual_examples():
    m = MubCollection(3, (np.eye(3, dtype=complex), fourier(3).T))
    flat = np.ones(3) / np.sqrt(3)
    assert unbiasedness_residual(m.subset([0]), flat) <= 1e-15
    assert unbiasedness_residual(m, np.eye(3)[0].astype(complex)) == pytest.approx(2 / 3)
    with pytest.raises(ValueError):
        unbiasedness_residual(m, np.ones(3))


def test_match_axis_examples():
    m = MubCollection(2, (np.eye(2, dtype=complex), np.array([[1, 1], [1, -1]]) / np.sqrt(2)))
    assert match_axis(np.array([0, 1j]), m) == (0, 1)
    assert match_axis(np.array([1, -1]) * 1j / np.sqrt(2), m) == (1, 1)
    v = np.array([np.cos(0.3), np.sin(0.3)], dtype=complex)
    assert match_axis(v, m) is None
    assert projection_distance(np.array([1, 0j]), np.array([0, 1j])) == pytest.approx(math.sqrt(2))


# ---------------------------------------------------------------------------
# objective and search


def test_gradient_matches_finite_differences(rng, d4_complete):
    axes = d4_complete.subset([0, 1, 2]).axes()
    d = axes.shape[1]
    h = 1e-6
    for _ in range(100):
        v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        g = gradient(axes, v)
        fd = np.zeros(d, dtype=complex)
        for i in range(d):
            for unit, part in ((1.0, 1.0), (1j, 1j)):
                e = np.zeros(d, dtype=complex)
                e[i] = unit
                diff = (objective(axes, v + h * e) - objective(axes, v - h * e)) / (2 * h)
                fd[i] += part * diff
        assert np.linalg.norm(fd - g) <= 1e-6 * max(np.linalg.norm(g), 1e-3)


def test_riemannian_gradient_is_tangent(rng, d4_complete):
    axes = d4_complete.axes()
    v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    v /= np.linalg.norm(v)
    assert abs(np.real(np.vdot(v, riemannian_gradient(axes, v)))) <= 1e-14


def test_objective_zero_on_unbiased(d4_complete):
    kept = d4_complete.subset([0, 1, 2])
    for b in d4_complete.bases[3:]:
        for v in b:
            assert objective(kept.axes(), v) <= 1e-20


def test_search_is_deterministic_and_jobs_invariant(d4_complete):
    kept = d4_complete.subset([0, 1, 2])
    a = unbiased_vector_search(kept, 150, seed=7)
    b = unbiased_vector_search(kept, 150, seed=7)
    c = unbiased_vector_search(kept, 150, seed=7, jobs=3)
    assert json.dumps(a.to_dict()) == json.dumps(b.to_dict()) == json.dumps(c.to_dict())


def test_search_rejects_zero_starts(d4_complete):
    with pytest.raises(ValueError):
        unbiased_vector_search(d4_complete, 0)


def test_d4_rigidity_search(d4_complete):
    cert = rigidity_search_certificate(d4_complete.subset([0, 1, 2]), d4_complete.subset([3, 4]))
    assert cert.verdict
    assert cert.evidence == "numerical_search"
    assert len(cert.witnesses["matched_axes"]) == 8


def test_classical_rigidity():
    cert = classical_rigidity_certificate(3, [0])
    assert cert.verdict and cert.evidence == "enumeration"
    assert len(cert.witnesses["transversals"]) == 3


# ---------------------------------------------------------------------------
# certificates


def test_mub_certificate_complete():
    cert = mub_certificate(mubs_from_subgroups(weyl_basis(5), standard_weyl_subgroups(5)))
    assert cert.kind == "complete" and cert.verdict


def test_mub_certificate_detects_bias():
    m = MubCollection(2, (np.eye(2, dtype=complex),
                          np.array([[np.cos(0.3), np.sin(0.3)], [-np.sin(0.3), np.cos(0.3)]], dtype=complex)))
    cert = mub_certificate(m)
    assert not cert.verdict
    assert "unbiased" in cert.failed()


def test_certificate_phase_and_order_invariance(rng):
    m = mubs_from_subgroups(weyl_basis(3), standard_weyl_subgroups(3))
    ref = mub_certificate(m)
    bases = []
    for b in reversed(m.bases):
        phases = np.exp(2j * np.pi * rng.random(3))
        bases.append((b * phases[:, None])[rng.permutation(3)])
    other = mub_certificate(MubCollection(3, tuple(bases)))
    assert other.verdict == ref.verdict
    assert [h["name"] for h in other.hypotheses] == [h["name"] for h in ref.hypotheses]


def test_certificate_json_round_trip():
    cert = uncompletable_example(3, "T")
    back = Certificate.from_dict(json.loads(cert.to_json()))
    assert back == Certificate.from_dict(cert.to_dict())
    assert back.verdict == cert.verdict
    tampered = cert.to_dict()
    tampered["verdict"] = not tampered["verdict"]
    with pytest.raises(ValueError):
        Certificate.from_dict(tampered)


@pytest.mark.parametrize("p", [3, 5])
def test_counterexample(p):
    cert = verify_counterexample(p)
    assert cert.verdict, cert.failed()
    hyp = {h["name"]: h for h in cert.hypotheses}
    assert hyp["S_in_span"]["residual"] <= 1e-8
    assert hyp["S_unbiased"]["residual"] <= 1e-10
    assert cert.witnesses["span_dim"] == (p + 1) * (p * p - 1) + 1
    assert cert.witnesses["far_bases"] == p * p - p


def test_counterexample_nonresidue_invariance_p5():
    assert all(verify_counterexample(5, D).verdict for D in (2, 3))


@pytest.mark.slow
def test_counterexample_nonresidue_invariance_p7():
    assert all(verify_counterexample(7, D).verdict for D in (3, 5, 6))


def test_counterexample_rejects_residue():
    with pytest.raises(ValueError):
        verify_counterexample(3, 1)


@pytest.mark.parametrize("p,variant", [(3, "T"), (5, "T"), (3, "szanto"), (7, "szanto")])
def test_uncompletable_examples(p, variant):
    cert = uncompletable_example(p, variant)
    assert cert.verdict, cert.failed()
    assert cert.witnesses["violating_pair"]


def test_uncompletable_generator_sigma_p3():
    cert = uncompletable_example(3, "T")
    # sigma(T generators) = w^-2, which is w^1 for p = 3
    assert cert.witnesses["generator_sigma"]["exponent"] == 1
    assert uncompletable_example(5, "T").witnesses["generator_sigma"]["exponent"] == 3


def test_uncompletable_fails_on_small_collection():
    basis = tensor_weyl(3)
    cert = uncompletability_certificate(basis, [catalog("S", 3)], catalog("T", 3))
    assert not cert.verdict
    assert cert.failed() == ["size"]


def test_uncompletable_fails_on_commuting_witness():
    basis = tensor_weyl(3)
    subs = prime_square_completion(3, 2)
    cert = uncompletability_certificate(basis, subs[1:8], subs[0])
    assert "witness_sigma_nontrivial" in cert.failed()


def test_szanto_rejects_p_1_mod_4():
    with pytest.raises(ValueError):
        szanto_system(5)


def test_extension_scan_weyl3():
    basis = weyl_basis(3)
    subs = standard_weyl_subgroups(3)
    ext = nice_extension_scan(basis, subs[:3])
    assert [H.element_set for H in ext] == [subs[3].element_set]


def test_extension_scan_full_system_empty():
    assert nice_extension_scan(tensor_weyl(3), prime_square_completion(3, 2)) == []


def test_weak_unextendibility_needs_size():
    basis = weyl_basis(3)
    cert = weak_unextendibility_certificate(basis, standard_weyl_subgroups(3)[:1])
    assert not cert.verdict


def test_weakly_unextendible_d4_scenario():
    sc = weakly_unextendible_d4_scenario()
    assert sc.certificate.verdict
    assert sc.certificate.evidence == "enumeration"
    assert len(sc.counts) == 60 and set(sc.counts) == {1}
    union = frozenset().union(*(H.element_set for H in sc.complete[:3]))
    assert sc.extra.element_set <= union
    assert sc.extra not in sc.complete
    assert sc.collection == (sc.extra, sc.complete[3], sc.complete[4])


def test_szanto_system_has_no_unbiased_vector():
    """Numerical evidence only: no residual <= 1e-8 among 500 starts."""
    a_subs, b_subs = szanto_system(3)
    coll = mubs_from_subgroups(tensor_weyl(3), a_subs + b_subs)
    assert len(coll) == 8
    report = unbiased_vector_search(coll, 500, seed=42)
    assert report.near_zero(1e-8) == []
    assert len(report.minima) + len(report.failures) > 0
