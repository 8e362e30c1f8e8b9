import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conekit import TAU, Cone, ConeError, DimensionError, validate_cone


finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


@pytest.mark.parametrize(
    "cone, y, expected",
    [
        (Cone.orthant(2), (1, 2), True),
        (Cone.orthant(2), (1, -1), False),
        (Cone.lorentz(3), (3, 4, 5), True),
    ],
)
def test_contains_examples(cone, y, expected):
    assert cone.contains(y) is expected


def test_lorentz_boundary_by_direct_norm():
    # math.hypot(3, 4) == 5 exactly, so the slack is zero
    assert 5 - math.hypot(3, 4) == 0
    c = Cone.lorentz(3)
    assert c.slack((3, 4, 5)) == 0
    assert c.contains((3, 4, 5))
    assert not c.in_interior((3, 4, 5))


@pytest.mark.parametrize(
    "cone, y, expected",
    [
        (Cone.orthant(2), (1, 1), True),
        (Cone.orthant(2), (1, 0), False),
        (Cone.lorentz(3), (3, 4, 5), False),
    ],
)
def test_in_interior_examples(cone, y, expected):
    assert cone.in_interior(y) is expected


@pytest.mark.parametrize(
    "x, y, expected",
    [((1, 1), (2, 3), True), ((1, 1), (1, 1), True), ((2, 0), (1, 5), False)],
)
def test_leq_examples(x, y, expected):
    assert Cone.orthant(2).leq(x, y) is expected


@pytest.mark.parametrize(
    "cone, x, y, expected",
    [
        (Cone.orthant(2), (0, 0), (1, 1), True),
        (Cone.orthant(2), (0, 0), (1, 0), False),
        (Cone.lorentz(3), (0, 0, 0), (0, 0, 1), True),
    ],
)
def test_ll_examples(cone, x, y, expected):
    assert cone.ll(x, y) is expected


def test_dimension_mismatch():
    c = Cone.orthant(2)
    for op in (c.contains, c.in_interior, c.slack):
        with pytest.raises(DimensionError):
            op((1, 2, 3))
    with pytest.raises(DimensionError):
        c.leq((1, 2), (1, 2, 3))
    with pytest.raises(DimensionError):
        c.ll((1,), (1, 2))


def test_tolerance_band_is_relative():
    c = Cone.orthant(2)
    big = 1e6
    # inside tau * (1 + ||y||) of the boundary counts as a member
    assert c.contains((big, -0.5 * TAU * big))
    assert not c.contains((big, -2 * TAU * big))
    assert not c.in_interior((big, 0.5 * TAU * big))


def test_batched_predicates():
    c = Cone.orthant(2)
    Y = np.array([[1, 2], [1, -1], [0, 0]])
    assert c.contains(Y).tolist() == [True, False, True]
    assert c.in_interior(Y).tolist() == [True, False, False]


@pytest.mark.parametrize(
    "build",
    [
        lambda: Cone.halfspace([[1, 0], [0, 0]]),
        lambda: Cone.halfspace([[1, 0], [0, 1]], e=[1, -1]),
        lambda: Cone.halfspace([[1, 0], [0, 1]], e=[1, 0]),
        lambda: Cone.lorentz(1),
        lambda: Cone.lorentz(3, e=[1, 0, 1]),
        lambda: Cone.orthant(2, e=[1, 0]),
        lambda: Cone.orthant(0),
        lambda: Cone.orthant(2, e=[1, 1, 1]),
    ],
)
def test_construction_rejects_invalid(build):
    with pytest.raises(ConeError):
        build()


def test_halfspace_default_e_falls_back_to_lp():
    # (1, 1) violates the first row; an interior point still exists
    A = [[1, -2], [0, 1]]
    c = Cone.halfspace(A)
    assert np.all(np.asarray(A) @ c.e > 0)
    assert c.in_interior(c.e)


def test_json_defaults():
    assert Cone.from_dict({"kind": "orthant", "dim": 3}).e.tolist() == [1, 1, 1]
    assert Cone.from_dict({"kind": "lorentz", "dim": 3}).e.tolist() == [0, 0, 1]
    h = Cone.from_dict({"kind": "halfspace", "dim": 2, "A": [[1, 0], [0, 1]]})
    assert h.e.tolist() == [1, 1]
    assert Cone.from_dict(h.to_dict()) == h
    with pytest.raises(ConeError):
        Cone.from_dict({"kind": "halfspace", "dim": 3, "A": [[1, 0], [0, 1]]})
    with pytest.raises(ConeError):
        Cone.from_dict({"kind": "simplex", "dim": 2})


def test_validate_orthant_and_identity_halfspace_pass():
    assert validate_cone(Cone.orthant(2), 1000, seed=1).passed
    assert validate_cone(Cone.halfspace([[1, 0], [0, 1]]), 1000, seed=1).passed


def test_validate_line_cone_fails_pointedness():
    A = np.array([[1.0, 0.0], [-1.0, 0.0]])
    # brute force: both (0, 1) and (0, -1) satisfy A y >= 0
    assert np.all(A @ [0, 1] >= 0) and np.all(A @ [0, -1] >= 0)
    rep = validate_cone(Cone.halfspace(A, strict=False), 1000, seed=1)
    assert not rep["pointedness"].passed
    w = np.array(rep["pointedness"].witness["y"])
    assert w[0] == 0 and w[1] != 0
    assert np.all(A @ w >= 0) and np.all(A @ -w >= 0)
    # the line has no interior either
    assert not rep["interior_point"].passed


def test_validate_lorentz_sample_members_are_members():
    c = Cone.lorentz(4)
    Y = c.sample(np.random.default_rng(0), 500)
    assert len(Y) == 500
    assert np.all(c.contains(Y))
    assert np.any(np.abs(c.slack(Y)) < 1e-12)  # some boundary draws
    assert validate_cone(c, 500, seed=3).passed


def test_leq_reflexive_transitive_and_ll_implies_leq(cone, rng):
    X = cone.sample(rng, 2000)
    Y = X + cone.sample(rng, 2000)
    Z = Y + cone.sample(rng, 2000)
    assert np.all(cone.leq(X, X))
    assert np.all(cone.leq(X, Y)) and np.all(cone.leq(Y, Z))
    assert np.all(cone.leq(X, Z))
    P = rng.standard_normal((5000, cone.dim))
    Q = rng.standard_normal((5000, cone.dim))
    strict = cone.ll(P, Q)
    assert np.all(cone.leq(P, Q)[strict])


def test_orthant_matches_identity_halfspace(rng):
    for n in (1, 2, 5):
        o = Cone.orthant(n)
        h = Cone.halfspace(np.eye(n))
        Y = rng.standard_normal((10_000, n))
        Y[::7] = np.abs(Y[::7])
        assert np.array_equal(o.contains(Y), h.contains(Y))
        assert np.array_equal(o.in_interior(Y), h.in_interior(Y))
        assert np.array_equal(o.contains(Y), Y.min(axis=1) >= -TAU * (1 + np.linalg.norm(Y, axis=1)))


def test_origin_is_member_not_interior(cone):
    theta = np.zeros(cone.dim)
    assert cone.contains(theta)
    assert not cone.in_interior(theta)


def test_interior_radius_ball_fits(cone, rng):
    rho = cone.interior_radius()
    U = rng.standard_normal((2000, cone.dim))
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    assert np.all(cone.contains(cone.e + 0.999 * rho * U))
    # and it is tight: some direction leaves K slightly further out
    assert not np.all(cone.contains(cone.e + 1.5 * rho * U))


@settings(max_examples=200, deadline=None)
@given(arrays(float, 3, elements=finite))
def test_lorentz_membership_matches_definition(y):
    c = Cone.lorentz(3)
    expected = y[2] - math.hypot(y[0], y[1]) >= -TAU * (1 + np.linalg.norm(y))
    assert c.contains(y) == expected


def test_cone_equality():
    assert Cone.orthant(2) == Cone.orthant(2)
    assert Cone.orthant(2) != Cone.orthant(2, e=[2, 1])
    assert Cone.orthant(2) != Cone.halfspace(np.eye(2))
