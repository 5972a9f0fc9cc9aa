import itertools
import math

import numpy as np
import pytest

from mubnet.algebra import orthonormalize, span_residual
from mubnet.classical import (
    ClassicalNet,
    NetError,
    affine_plane,
    enumerate_transversals,
    fake_parallel_class,
    mask_of,
    net_from_dict,
    net_to_dict,
    points_of,
    remove_classes,
)
from mubnet.knet import classical_to_generalized, indicator


@pytest.mark.parametrize("q,lines,classes", [(2, 6, 3), (3, 12, 4), (4, 20, 5), (5, 30, 6), (9, 90, 10)])
def test_affine_plane_counts(q, lines, classes):
    net = affine_plane(q)
    assert net.n_points == q * q
    assert len(net.lines()) == lines
    assert net.k == classes
    assert net.order == q
    assert net.violations() == []


def _brute_incidence(net):
    """Independent check of the incidence axioms on explicit point sets."""
    d = net.order
    pts = net.point_lists()
    for cls in pts:
        assert sorted(p for line in cls for p in line) == list(range(d * d))
        assert all(len(line) == d for line in cls)
    for a, b in itertools.combinations(range(net.k), 2):
        for l1 in pts[a]:
            for l2 in pts[b]:
                assert len(set(l1) & set(l2)) == 1


@pytest.mark.parametrize("q", [2, 3, 4, 5, 9])
def test_plane_incidence_oracle(q):
    _brute_incidence(affine_plane(q))


def test_plane_lines_are_sorted_and_stable():
    a, b = affine_plane(5), affine_plane(5)
    assert a == b
    for cls in a.point_lists():
        assert cls == sorted(cls)


def test_invalid_nets_are_reported():
    bad = ClassicalNet.from_point_lists(4, [[[0, 1], [2, 3]], [[0, 1], [2, 3]]])
    assert bad.violations()
    with pytest.raises(NetError):
        bad.check()
    assert ClassicalNet(4, ()).violations()


def test_complete_order_three_plane_has_no_transversals():
    assert enumerate_transversals(affine_plane(3)) == []


def test_order_four_minus_two_classes():
    plane = affine_plane(4)
    net = remove_classes(plane, [0, 1])
    assert net.k == 3 and net.order == 4
    trans = enumerate_transversals(net)
    removed = sorted(points_of(l) for j in (0, 1) for l in plane.classes[j])
    assert trans == removed
    assert len(trans) == 8


def test_order_two_minus_one_class():
    plane = affine_plane(2)
    trans = enumerate_transversals(remove_classes(plane, [2]))
    assert trans == sorted(points_of(l) for l in plane.classes[2])


def test_remove_classes_edge_cases():
    plane = affine_plane(3)
    assert remove_classes(plane, []) == plane
    assert remove_classes(plane, [3]).k == 3
    with pytest.raises(NetError):
        remove_classes(plane, range(4))
    with pytest.raises(NetError):
        remove_classes(plane, [7])


def test_transversal_budget():
    with pytest.raises(NetError):
        enumerate_transversals(affine_plane(7))


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_transversal_count_bound(d):
    """At most kd transversals after removing k < sqrt(d) + 1 classes."""
    plane = affine_plane(d)
    for k in range(1, d + 1):
        if not k < math.sqrt(d) + 1:
            continue
        for drop in itertools.combinations(range(d + 1), k):
            trans = enumerate_transversals(remove_classes(plane, drop))
            assert len(trans) <= k * d


@pytest.mark.parametrize("d", [3, 4, 5])
def test_transversals_are_removed_lines(d):
    plane = affine_plane(d)
    for k in range(1, math.isqrt(d) + 1):
        for drop in itertools.combinations(range(d + 1), k):
            trans = enumerate_transversals(remove_classes(plane, drop))
            removed = sorted(points_of(l) for j in drop for l in plane.classes[j])
            assert trans == removed


def test_transversal_enumeration_matches_brute_force():
    net = remove_classes(affine_plane(3), [1, 3])
    brute = [c for c in itertools.combinations(range(9), 3) if net.is_transversal(c)]
    assert enumerate_transversals(net) == brute


@pytest.mark.parametrize("p,transversed", [(3, 6), (5, 20)])
def test_fake_parallel_class(p, transversed):
    fc = fake_parallel_class(p)
    assert len(fc.cosets) == p * p
    assert len(fc.transversed) == transversed
    assert len(fc.not_transversed) == p + 1
    lines = set(fc.plane.lines())
    for coset in fc.cosets:
        assert mask_of(coset) not in lines
    # the cosets partition the points
    assert sorted(x for c in fc.cosets for x in c) == list(range(p ** 4))


def test_fake_class_untransversed_directions_p3():
    fc = fake_parallel_class(3)
    labels = [fc.plane.labels[j] for j in fc.not_transversed]
    assert labels == ["(0+0*s,1)", "(1+0*s,1)", "(2+0*s,1)", "(1,0)"]


def _span_residuals(fc, classes):
    gen = classical_to_generalized(fc.plane)
    space = orthonormalize([l for j in classes for l in gen.classes[j]])
    shape = gen.shape
    out = []
    for coset in fc.cosets:
        v = np.zeros(shape.trace_of_identity)
        v[list(coset)] = 1.0
        out.append(span_residual(space, indicator(shape, v)))
    return out


def test_fake_class_span():
    """Each coset indicator lies in the span of the p + 1 classes it does not
    transverse; against the transversed classes the residual is large."""
    fc = fake_parallel_class(3)
    assert max(_span_residuals(fc, fc.not_transversed)) <= 1e-10
    assert min(_span_residuals(fc, fc.transversed)) > 0.1


def test_fake_class_invariant_under_nonresidue():
    a, b = fake_parallel_class(5, 2), fake_parallel_class(5, 3)
    assert len(a.transversed) == len(b.transversed) == 20


def test_render_and_json_round_trip():
    net = remove_classes(affine_plane(3), [0])
    text = net.render()
    assert text.count("class") == 3
    back = net_from_dict(net_to_dict(net))
    assert back == net
    with pytest.raises(ValueError):
        net_from_dict({"d": 2, "classes": [[[0, 9]]]})
    with pytest.raises(ValueError):
        net_from_dict({"classes": []})
