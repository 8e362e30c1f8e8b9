"""Computable convex cones in R^n and the orders they induce.

Three families are supported, each given by a slack function whose
nonnegativity defines membership:

* ``orthant``   -- ``min_i y_i``
* ``halfspace`` -- ``min_i (A y)_i``   (polyhedral cone ``{y : A y >= 0}``)
* ``lorentz``   -- ``y_n - ||y_{1..n-1}||``

All predicates accept a single vector of shape ``(n,)`` or a batch of shape
``(..., n)`` and broadcast over the leading axes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog

from .report import SuiteReport

#: Membership tolerance, applied relative to ``1 + ||y||``.
TAU = 1e-9

KINDS = ("orthant", "halfspace", "lorentz")


class ConeError(ValueError):
    """Invalid cone data."""


class DimensionError(ValueError):
    """Vector dimension does not match the cone's ambient dimension."""


def _as_vectors(y, dim: int) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.ndim == 0 or y.shape[-1] != dim:
        raise DimensionError(f"expected vectors of dimension {dim}, got shape {y.shape}")
    return y


def _bool(v):
    return bool(v) if np.ndim(v) == 0 else v


@dataclass(frozen=True, eq=False)
class Cone:
    """A closed convex pointed cone with a designated interior point ``e``.

    Build instances with :meth:`orthant`, :meth:`halfspace` or
    :meth:`lorentz`.  Passing ``strict=False`` skips the construction-time
    invariants so that defective candidates can still be handed to
    :func:`validate_cone` for a diagnostic report.
    """

    kind: str
    dim: int
    e: np.ndarray
    A: np.ndarray | None = None
    strict: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConeError(f"unknown cone kind {self.kind!r}")
        self.e.setflags(write=False)
        if self.A is not None:
            self.A.setflags(write=False)
        if self.strict:
            self._check()

    # -- constructors -----------------------------------------------------

    @classmethod
    def orthant(cls, n: int, e=None, strict: bool = True) -> Cone:
        if n < 1:
            raise ConeError("dimension must be >= 1")
        e = np.ones(n) if e is None else np.array(e, dtype=float)
        return cls("orthant", int(n), e, strict=strict)

    @classmethod
    def halfspace(cls, A, e=None, strict: bool = True) -> Cone:
        A = np.array(A, dtype=float)
        if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
            raise ConeError("A must be a non-empty m x n matrix")
        if e is None:
            e = _default_halfspace_e(A)
        return cls("halfspace", A.shape[1], np.array(e, dtype=float), A=A, strict=strict)

    @classmethod
    def lorentz(cls, n: int, e=None, strict: bool = True) -> Cone:
        if n < 2:
            raise ConeError("lorentz cone needs n >= 2")
        if e is None:
            e = np.zeros(n)
            e[-1] = 1.0
        return cls("lorentz", int(n), np.array(e, dtype=float), strict=strict)

    @classmethod
    def from_dict(cls, spec: dict[str, Any], strict: bool = True) -> Cone:
        kind = spec.get("kind")
        e = spec.get("e")
        if kind == "orthant":
            return cls.orthant(int(spec["dim"]), e, strict=strict)
        if kind == "lorentz":
            return cls.lorentz(int(spec["dim"]), e, strict=strict)
        if kind == "halfspace":
            A = spec["A"]
            cone = cls.halfspace(A, e, strict=strict)
            if "dim" in spec and int(spec["dim"]) != cone.dim:
                raise ConeError(f"dim {spec['dim']} does not match A with {cone.dim} columns")
            return cone
        raise ConeError(f"unknown cone kind {kind!r}")

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind, "dim": self.dim}
        if self.A is not None:
            out["A"] = self.A.tolist()
        out["e"] = self.e.tolist()
        return out

    def _check(self) -> None:
        if self.e.shape != (self.dim,):
            raise ConeError(f"e must have shape ({self.dim},), got {self.e.shape}")
        if not np.all(np.isfinite(self.e)):
            raise ConeError("e must be finite")
        if self.kind == "halfspace":
            if not np.all(np.isfinite(self.A)):
                raise ConeError("A must be finite")
            if np.any(np.linalg.norm(self.A, axis=1) == 0):
                raise ConeError("halfspace rows must be nonzero")
            if np.any(self.A @ self.e <= 0):
                raise ConeError("halfspace cone needs A @ e > 0 componentwise")
        if not self.in_interior(self.e):
            raise ConeError(f"e = {self.e.tolist()} is not an interior point of the {self.kind} cone")

    # -- predicates -------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Cone):
            return NotImplemented
        if (self.kind, self.dim) != (other.kind, other.dim):
            return False
        if not np.array_equal(self.e, other.e):
            return False
        if self.A is None or other.A is None:
            return self.A is other.A
        return self.A.shape == other.A.shape and np.array_equal(self.A, other.A)

    __hash__ = None

    def __repr__(self) -> str:
        return f"Cone({self.kind}, dim={self.dim}, e={self.e.tolist()})"

    def slack(self, y) -> np.ndarray | float:
        """Signed margin of the defining inequalities; ``>= 0`` iff in K."""
        y = _as_vectors(y, self.dim)
        if self.kind == "orthant":
            return y.min(axis=-1)
        if self.kind == "halfspace":
            return (y @ self.A.T).min(axis=-1)
        return y[..., -1] - np.linalg.norm(y[..., :-1], axis=-1)

    def _scale(self, y: np.ndarray):
        return 1.0 + np.linalg.norm(y, axis=-1)

    def contains(self, y, tol: float = TAU):
        y = _as_vectors(y, self.dim)
        return _bool(self.slack(y) >= -tol * self._scale(y))

    def in_interior(self, y, tol: float = TAU):
        y = _as_vectors(y, self.dim)
        return _bool(self.slack(y) > tol * self._scale(y))

    def leq(self, x, y):
        """``x <=_K y``, i.e. ``y - x`` in K."""
        return self.contains(_as_vectors(y, self.dim) - _as_vectors(x, self.dim))

    def ll(self, x, y):
        """``x << y``, i.e. ``y - x`` in int K."""
        return self.in_interior(_as_vectors(y, self.dim) - _as_vectors(x, self.dim))

    def lt(self, x, y):
        """Strict order ``x <_K y``: ``x <=_K y`` and ``||y - x|| > TAU``."""
        x = _as_vectors(x, self.dim)
        y = _as_vectors(y, self.dim)
        return _bool(np.logical_and(self.leq(x, y), np.linalg.norm(y - x, axis=-1) > TAU))

    def interior_radius(self) -> float:
        """Radius of the largest Euclidean ball around ``e`` inside K.

        ``1 / interior_radius()`` is a global Lipschitz constant for the
        scalarization with respect to ``e``.
        """
        if self.kind == "orthant":
            return float(self.e.min())
        if self.kind == "halfspace":
            return float(np.min(self.A @ self.e / np.linalg.norm(self.A, axis=1)))
        return float((self.e[-1] - np.linalg.norm(self.e[:-1])) / np.sqrt(2.0))

    def lineality(self) -> np.ndarray:
        """Orthonormal basis (columns) of ``K ∩ -K``; empty for pointed cones."""
        if self.kind == "halfspace":
            return null_space(self.A)
        return np.zeros((self.dim, 0))

    # -- sampling ---------------------------------------------------------

    def sample(self, rng: np.random.Generator, size: int, boundary: float = 0.25) -> np.ndarray:
        """Draw ``size`` members of K, roughly a ``boundary`` fraction on ∂K.

        Magnitudes are log-normally spread.  Candidates that fail
        :meth:`contains` are dropped, so fewer than ``size`` rows may come
        back for degenerate (non-strict) cones.
        """
        n = self.dim
        on_bd = rng.random(size) < boundary
        if self.kind == "orthant":
            Y = np.abs(rng.standard_normal((size, n)))
            if n > 1:
                zero = rng.integers(0, n, size)
                Y[on_bd, zero[on_bd]] = 0.0
            else:
                Y[on_bd] = 0.0
        elif self.kind == "lorentz":
            x = rng.standard_normal((size, n - 1))
            h = np.where(on_bd, 0.0, np.abs(rng.standard_normal(size)))
            Y = np.column_stack([x, np.linalg.norm(x, axis=1) + h])
        else:
            Y = self._shoot_rays(rng, size, on_bd)
            N = self.lineality()
            if N.shape[1]:
                lin = rng.random(size) < 0.25
                Y[lin] = rng.standard_normal((int(lin.sum()), N.shape[1])) @ N.T
        Y *= np.exp(rng.standard_normal(size))[:, None]
        return Y[np.asarray(self.contains(Y), dtype=bool)]

    def _shoot_rays(self, rng, size, on_bd):
        # Walk from e along a random direction, stopping before (or exactly on) the boundary.
        G = rng.standard_normal((size, self.dim))
        Ae = self.A @ self.e
        AG = G @ self.A.T
        with np.errstate(divide="ignore", invalid="ignore"):
            steps = np.where(AG < 0, Ae / -AG, np.inf)
        t_max = steps.min(axis=1)
        frac = np.where(on_bd, 1.0, rng.random(size))
        t = np.where(np.isfinite(t_max), frac * t_max, rng.exponential(1.0, size))
        return self.e + t[:, None] * G


def _default_halfspace_e(A: np.ndarray) -> np.ndarray:
    ones = np.ones(A.shape[1])
    if np.all(A @ ones > 0):
        return ones
    # Chebyshev-style centre: maximise s subject to A e >= s ||A_i||, |e_j| <= 1.
    m, n = A.shape
    norms = np.linalg.norm(A, axis=1)
    c = np.zeros(n + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-A, norms[:, None]])
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(m), bounds=[(-1, 1)] * n + [(None, 1)])
    if res.status == 0 and res.x[-1] > 1e-9:
        return res.x[:n]
    return ones


def validate_cone(cone: Cone, samples: int = 1000, seed: int = 0) -> SuiteReport:
    """Sampled check of the cone axioms.

    Items: ``nonempty`` (e is a nonzero member), ``interior_point``
    (e in int K), ``closure`` (``a x + b y`` in K for a, b >= 0) and
    ``pointedness`` (no sampled nonzero member has its negation in K).
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    rep = SuiteReport(f"validate_cone[{cone.kind}]")

    nonempty = rep.add("nonempty")
    nonempty.record(
        bool(cone.contains(cone.e)) and np.linalg.norm(cone.e) > TAU,
        witness={"e": cone.e.tolist()},
    )
    interior = rep.add("interior_point")
    interior.record(bool(cone.in_interior(cone.e)), float(-cone.slack(cone.e)), {"e": cone.e.tolist()})

    X = cone.sample(rng, samples)
    Y = cone.sample(rng, samples)
    k = min(len(X), len(Y))
    X, Y = X[:k], Y[:k]
    a = rng.exponential(1.0, k)
    b = rng.exponential(1.0, k)
    a[rng.random(k) < 0.1] = 0.0
    Z = a[:, None] * X + b[:, None] * Y
    closure = rep.add("closure")
    if k:
        closure.record_batch(
            cone.contains(Z),
            -cone.slack(Z) / (1 + np.linalg.norm(Z, axis=1)),
            lambda i: {"a": a[i], "b": b[i], "x": X[i], "y": Y[i], "ax+by": Z[i]},
        )

    members = np.vstack([X, Y]) if k else np.zeros((0, cone.dim))
    members = members[np.linalg.norm(members, axis=1) > 1e-6]
    pointed = rep.add("pointedness")
    if len(members):
        neg = -members
        norms = np.linalg.norm(members, axis=1)
        pointed.record_batch(
            ~np.atleast_1d(cone.contains(neg)),
            norms,
            lambda i: {"y": members[i], "-y": neg[i]},
        )
    rep.extra["members_sampled"] = int(len(members))
    return rep
