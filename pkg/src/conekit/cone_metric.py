"""Cone-valued metric spaces and the scalar metric they induce.

Two back-ends:

* :class:`TableSpace` -- finitely many labelled points with an explicit
  ``N x N x n`` distance table; every check over it is exhaustive (up to
  :data:`EXHAUSTIVE_CAP` points).
* :class:`WeightedLine` -- the real line with ``p(x, y) = |x - y| w`` for a
  fixed nonzero ``w`` in K; checks over it are sampled.
"""

from __future__ import annotations

from typing import Any, Sequence, Union

import numpy as np

from .cone import TAU, Cone
from .report import SuiteReport
from .scalarize import Scalarizer

EXHAUSTIVE_CAP = 100
#: Half-width of the box that sampled points of the line are drawn from.
LINE_RADIUS = 1e3


class UnknownPointError(KeyError):
    pass


class TableSpace:
    """Finite cone metric space given by a distance table."""

    is_finite = True

    def __init__(self, cone: Cone, labels: Sequence[str], p):
        labels = [str(x) for x in labels]
        if len(set(labels)) != len(labels):
            raise ValueError("point labels must be unique")
        p = np.array(p, dtype=float)
        N = len(labels)
        if N == 0:
            raise ValueError("a space needs at least one point")
        if p.shape != (N, N, cone.dim):
            raise ValueError(f"distance table must have shape {(N, N, cone.dim)}, got {p.shape}")
        if not np.all(np.isfinite(p)):
            raise ValueError("distance table entries must be finite")
        p.setflags(write=False)
        self.cone = cone
        self.labels = labels
        self.p = p
        self._index = {lab: i for i, lab in enumerate(labels)}

    def __repr__(self):
        return f"TableSpace({len(self.labels)} points over {self.cone!r})"

    @property
    def points(self) -> list[str]:
        return list(self.labels)

    def __len__(self):
        return len(self.labels)

    def index(self, x) -> int:
        try:
            return self._index[str(x)]
        except KeyError:
            raise UnknownPointError(x) from None

    def distance(self, x, y) -> np.ndarray:
        return self.p[self.index(x), self.index(y)]

    def distances(self, xs, ys) -> np.ndarray:
        i = np.array([self.index(x) for x in xs], dtype=int)
        j = np.array([self.index(y) for y in ys], dtype=int)
        return self.p[i, j]

    def to_dict(self) -> dict[str, Any]:
        return {
            "cone": self.cone.to_dict(),
            "space": {"type": "table", "points": self.labels, "p": self.p.tolist()},
        }


class WeightedLine:
    """The real line with cone metric ``p(x, y) = |x - y| w``."""

    is_finite = False

    def __init__(self, cone: Cone, w):
        w = np.array(w, dtype=float)
        if w.shape != (cone.dim,):
            raise ValueError(f"w must have shape ({cone.dim},)")
        if not cone.contains(w) or np.linalg.norm(w) <= TAU:
            raise ValueError("w must be a nonzero member of the cone")
        w.setflags(write=False)
        self.cone = cone
        self.w = w

    def __repr__(self):
        return f"WeightedLine(w={self.w.tolist()})"

    @staticmethod
    def _point(x) -> float:
        try:
            v = float(x)
        except (TypeError, ValueError):
            raise UnknownPointError(x) from None
        if not np.isfinite(v):
            raise UnknownPointError(x)
        return v

    def distance(self, x, y) -> np.ndarray:
        return abs(self._point(x) - self._point(y)) * self.w

    def distances(self, xs, ys) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        return np.abs(xs - ys)[..., None] * self.w

    def sample_points(self, rng: np.random.Generator, size, radius: float = LINE_RADIUS):
        return rng.uniform(-radius, radius, size)

    def to_dict(self) -> dict[str, Any]:
        return {"cone": self.cone.to_dict(), "space": {"type": "weighted_line", "w": self.w.tolist()}}


ConeMetricSpace = Union[TableSpace, WeightedLine]


def space_from_dict(spec: dict[str, Any]) -> ConeMetricSpace:
    cone = Cone.from_dict(spec["cone"])
    body = spec["space"]
    kind = body.get("type")
    if kind == "table":
        return TableSpace(cone, body["points"], body["p"])
    if kind == "weighted_line":
        return WeightedLine(cone, body["w"])
    raise ValueError(f"unknown space type {kind!r}")


class InducedMetric:
    """``d_p = xi_e o p``, a real-valued metric on the same point set."""

    def __init__(self, space: ConeMetricSpace, scalarizer: Scalarizer | None = None):
        if scalarizer is None:
            scalarizer = Scalarizer(space.cone)
        elif scalarizer.cone != space.cone:
            raise ValueError("scalarizer and space must share a cone")
        self.space = space
        self.scalarizer = scalarizer

    def distance(self, x, y) -> float:
        return float(self.scalarizer.xi(self.space.distance(x, y)))

    __call__ = distance

    def distances(self, xs, ys) -> np.ndarray:
        return np.asarray(self.scalarizer.xi(self.space.distances(xs, ys)))

    def table(self) -> np.ndarray:
        """Full ``N x N`` matrix of induced distances (finite spaces only)."""
        if not self.space.is_finite:
            raise TypeError("distance table needs a finite space")
        return np.asarray(self.scalarizer.xi(self.space.p))


def _triples(space: ConeMetricSpace, samples: int, rng):
    """Index (finite) or coordinate (line) triples, plus whether exhaustive."""
    if space.is_finite:
        N = len(space)
        if N <= EXHAUSTIVE_CAP:
            g = np.indices((N, N, N)).reshape(3, -1)
            return g[0], g[1], g[2], True
        return tuple(rng.integers(0, N, (3, samples))) + (False,)
    x, y, z = space.sample_points(rng, (3, samples))
    # a slice of repeated points exercises the identity clauses
    rep = rng.random(samples) < 0.05
    y = np.where(rep, x, y)
    return x, y, z, False


def _dist(space, a, b):
    if space.is_finite:
        return space.p[a, b]
    return space.distances(a, b)


def _label(space, a):
    return space.labels[int(a)] if space.is_finite else float(a)


def verify_cone_metric_axioms(space: ConeMetricSpace, samples: int = 10_000, seed: int = 0) -> SuiteReport:
    """Check positivity, identity, symmetry and the vector triangle inequality.

    Exhaustive over all ordered triples for finite spaces of at most
    :data:`EXHAUSTIVE_CAP` points, sampled otherwise.
    """
    cone = space.cone
    rng = np.random.default_rng(seed)
    x, y, z, exhaustive = _triples(space, samples, rng)
    rep = SuiteReport("cone_metric_axioms")
    rep.extra["exhaustive"] = exhaustive
    if space.is_finite and not exhaustive:
        rep.extra["coverage"] = samples / len(space) ** 3

    def lab(*pts):
        return {k: _label(space, v) for k, v in zip("xyz", pts)}

    Pxy = _dist(space, x, y)
    Pyx = _dist(space, y, x)
    rep.add("positivity").record_batch(
        np.asarray(cone.contains(Pxy)), -cone.slack(Pxy), lambda i: {**lab(x[i], y[i]), "p": Pxy[i]}
    )
    same = np.asarray(x == y)
    norms = np.linalg.norm(Pxy, axis=-1)
    ok = np.where(same, norms <= TAU, norms > TAU)
    rep.add("identity").record_batch(
        ok, np.where(same, norms, TAU - norms), lambda i: {**lab(x[i], y[i]), "p": Pxy[i]}
    )
    asym = np.linalg.norm(Pxy - Pyx, axis=-1)
    rep.add("symmetry").record_batch(
        asym <= TAU * (1 + norms), asym, lambda i: {**lab(x[i], y[i]), "p(x,y)": Pxy[i], "p(y,x)": Pyx[i]}
    )
    rhs = _dist(space, x, z) + _dist(space, z, y)
    gap = rhs - Pxy
    rep.add("triangle").record_batch(
        np.asarray(cone.contains(gap)),
        -cone.slack(gap),
        lambda i: {**lab(x[i], y[i], z[i]), "p(x,y)": Pxy[i], "p(x,z)+p(z,y)": rhs[i]},
    )
    return rep


def verify_induced_metric(m: InducedMetric, samples: int = 10_000, seed: int = 0) -> SuiteReport:
    """The scalar metric axioms for ``d_p`` on the same triple set, triangle slack 1e-9."""
    space = m.space
    rng = np.random.default_rng(seed)
    x, y, z, exhaustive = _triples(space, samples, rng)
    xi = m.scalarizer.xi
    dxy = np.asarray(xi(_dist(space, x, y)))
    dyx = np.asarray(xi(_dist(space, y, x)))
    dxz = np.asarray(xi(_dist(space, x, z)))
    dzy = np.asarray(xi(_dist(space, z, y)))
    rep = SuiteReport("induced_metric")
    rep.extra["exhaustive"] = exhaustive

    def lab(i, with_z=False):
        out = {"x": _label(space, x[i]), "y": _label(space, y[i]), "d(x,y)": dxy[i]}
        if with_z:
            out.update(z=_label(space, z[i]), **{"d(x,z)": dxz[i], "d(z,y)": dzy[i]})
        return out

    # 1e-9 absorbs bisection error when xi has no closed form
    rep.add("positivity").record_batch(dxy >= -1e-9, -dxy, lab)
    same = np.asarray(x == y)
    rep.add("identity").record_batch(np.where(same, np.abs(dxy) <= 1e-9, dxy > 1e-9), np.abs(dxy), lab)
    rep.add("symmetry").record_batch(np.abs(dxy - dyx) <= 1e-9, np.abs(dxy - dyx), lab)
    excess = dxy - (dxz + dzy)
    rep.add("triangle").record_batch(excess <= 1e-9, excess, lambda i: lab(i, True))
    return rep


def random_table_space(
    cone: Cone, n_points: int, rng: np.random.Generator, k: int | None = None
) -> TableSpace:
    """Random finite cone metric space ``p(x, y) = L |x - y|``.

    Points live in R^k and the columns of ``L`` are interior members of K,
    so ``L`` maps the nonnegative orthant of R^k into K.  Callers should
    still run :func:`verify_cone_metric_axioms` on the result.
    """
    if k is None:
        k = int(rng.integers(1, 4))
    cols = []
    while len(cols) < k:
        cand = cone.sample(rng, 4 * k, boundary=0.0)
        cols.extend(c for c in cand if cone.in_interior(c))
    L = np.column_stack(cols[:k])
    X = rng.standard_normal((n_points, k)) * 3
    diff = np.abs(X[:, None, :] - X[None, :, :])
    p = diff @ L.T
    return TableSpace(cone, [f"p{i}" for i in range(n_points)], p)
