"""Nonlinear scalarization ``xi_e(y) = inf{r : r e - y in K}`` and ``M(r) = r e``.

Closed forms are used for every cone family where one is cheap; a
bisection on the membership predicate serves both as the fallback and as an
independent oracle for the closed forms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cone import TAU, Cone, _as_vectors
from .report import SuiteReport

#: Bracket doublings allowed before the oracle gives up.
MAX_DOUBLINGS = 200


class ScalarizationError(ArithmeticError):
    """The bisection bracket could not be established."""


def _scalar(v):
    return float(v) if np.ndim(v) == 0 else v


@dataclass(frozen=True)
class Scalarizer:
    cone: Cone

    def __post_init__(self):
        if not self.cone.in_interior(self.cone.e):
            raise ValueError("scalarization needs e in int K")

    @property
    def e(self) -> np.ndarray:
        return self.cone.e

    @property
    def dim(self) -> int:
        return self.cone.dim

    def xi(self, y):
        """Scalarize ``y`` (shape ``(n,)`` or ``(..., n)``)."""
        cone = self.cone
        y = _as_vectors(y, cone.dim)
        e = cone.e
        if cone.kind == "orthant":
            return _scalar((y / e).max(axis=-1))
        if cone.kind == "halfspace":
            return _scalar(((y @ cone.A.T) / (cone.A @ e)).max(axis=-1))
        # lorentz: closed form only when e points along the axis
        if np.all(e[:-1] == 0):
            return _scalar((y[..., -1] + np.linalg.norm(y[..., :-1], axis=-1)) / e[-1])
        return self.xi_oracle(y, tol=1e-12)

    __call__ = xi

    def xi_oracle(self, y, tol: float = 1e-10):
        """Bisection on ``r`` for the membership transition of ``r e - y``.

        Uses exact membership (zero tolerance) and no closed form.  Returns
        the bracket midpoint once the bracket is narrower than ``tol``.
        """
        if tol <= 0:
            raise ValueError("tol must be positive")
        cone = self.cone
        y = _as_vectors(y, cone.dim)
        if not np.all(np.isfinite(y)):
            raise ScalarizationError("non-finite input")
        batch = y.shape[:-1]
        Y = y.reshape(-1, cone.dim)
        e = cone.e

        def member(r, rows):
            return cone.slack(r[:, None] * e - Y[rows]) >= 0

        start = 1.0 + np.linalg.norm(Y, axis=1)
        hi = start.copy()
        lo = -start.copy()
        idx = np.arange(len(Y))
        for bound, want in ((hi, True), (lo, False)):
            todo = idx[member(bound, idx) != want]
            for _ in range(MAX_DOUBLINGS):
                if todo.size == 0:
                    break
                bound[todo] *= 2.0
                todo = todo[member(bound[todo], todo) != want]
            else:
                if todo.size:
                    raise ScalarizationError(
                        f"bracket not found after {MAX_DOUBLINGS} doublings (is e interior?)"
                    )
        active = idx[hi - lo >= tol]
        while active.size:
            mid = 0.5 * (lo[active] + hi[active])
            inside = member(mid, active)
            hi[active[inside]] = mid[inside]
            lo[active[~inside]] = mid[~inside]
            active = active[hi[active] - lo[active] >= tol]
        out = (0.5 * (lo + hi)).reshape(batch)
        return _scalar(out)

    def embed(self, r):
        """``M(r) = r e``; ``r`` may be a scalar or an array."""
        r = np.asarray(r, dtype=float)
        return r[..., None] * self.cone.e


def _sample_vectors(cone: Cone, rng: np.random.Generator, size: int) -> np.ndarray:
    """Arbitrary vectors of R^n: a mix of Gaussians, members and negated members."""
    Y = rng.standard_normal((size, cone.dim)) * np.exp(rng.standard_normal(size))[:, None]
    kind = rng.random(size)
    pos = cone.sample(rng, size)
    neg = -cone.sample(rng, size)
    take_pos = np.flatnonzero(kind < 0.2)[: len(pos)]
    take_neg = np.flatnonzero(kind > 0.8)[: len(neg)]
    Y[take_pos] = pos[: len(take_pos)]
    Y[take_neg] = neg[: len(take_neg)]
    return Y


def _interior_members(cone: Cone, rng, size: int, margin: float) -> np.ndarray:
    out = []
    while sum(len(o) for o in out) < size:
        K = cone.sample(rng, 2 * size, boundary=0.0)
        out.append(K[cone.slack(K) > margin])
    return np.vstack(out)[:size]


def check_oracle(s: Scalarizer, samples: int = 10_000, seed: int = 0, tol: float = 1e-10) -> SuiteReport:
    """Closed form against bisection: ``|xi - oracle| <= 1e-8 (1 + |xi|)``."""
    rng = np.random.default_rng(seed)
    Y = _sample_vectors(s.cone, rng, samples)
    a = np.asarray(s.xi(Y))
    b = np.asarray(s.xi_oracle(Y, tol))
    bound = 1e-8 * (1 + np.abs(a))
    rep = SuiteReport(f"xi_oracle[{s.cone.kind}]")
    rep.add("xi_vs_oracle").record_batch(
        np.abs(a - b) <= bound,
        np.abs(a - b) - bound,
        lambda i: {"y": Y[i], "xi": a[i], "oracle": b[i]},
    )
    return rep


def _ambiguity_band(s: Scalarizer, r, Y) -> np.ndarray:
    # Width in r-units of the membership tolerance zone around the transition.
    scale = 1 + np.abs(r) * np.linalg.norm(s.e) + np.linalg.norm(Y, axis=-1)
    return 1e3 * TAU * scale / s.cone.slack(s.e)


def check_lemma1(s: Scalarizer, samples: int = 10_000, seed: int = 0) -> SuiteReport:
    """Sampled check of the scalarization's order, homogeneity, continuity,
    monotonicity and subadditivity properties.

    Items ``i``-``iv`` compare ``xi(y)`` against ``r`` and membership of
    ``r e - y``.  Draws with ``r`` inside the tolerance zone around ``xi(y)``
    (but not exactly equal) are skipped and counted in ``extra``.  There is
    no item ``v``.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    cone = s.cone
    rng = np.random.default_rng(seed)
    rep = SuiteReport(f"lemma1[{cone.kind}]")
    Y = _sample_vectors(cone, rng, samples)
    xi_y = np.asarray(s.xi(Y))

    # r: exact ties, near offsets on both sides, and broad uniform draws
    mode = rng.integers(0, 3, samples)
    offset = np.exp(rng.uniform(np.log(1e-5), np.log(10.0), samples)) * rng.choice([-1.0, 1.0], samples)
    r = np.where(mode == 0, xi_y, np.where(mode == 1, xi_y + offset, rng.uniform(-10, 10, samples)))
    gap = np.abs(r - xi_y)
    keep = (gap == 0) | (gap > _ambiguity_band(s, r, Y))
    rep.extra["ambiguous_skipped"] = int((~keep).sum())
    Yk, rk, xk = Y[keep], r[keep], xi_y[keep]
    Z = s.embed(rk) - Yk
    member = np.asarray(cone.contains(Z))
    interior = np.asarray(cone.in_interior(Z))

    def wit(i):
        return {"y": Yk[i], "r": rk[i], "xi": xk[i], "r*e-y": Z[i]}

    dist = np.abs(xk - rk)
    rep.add("i").record_batch((xk <= rk) == member, dist, wit)
    rep.add("ii").record_batch((xk > rk) == ~member, dist, wit)
    rep.add("iii").record_batch((xk >= rk) == ~interior, dist, wit)
    rep.add("iv").record_batch((xk < rk) == interior, dist, wit)

    lam = np.exp(rng.uniform(-3, 3, samples))
    lhs = np.asarray(s.xi(lam[:, None] * Y))
    err = np.abs(lhs - lam * xi_y)
    bound = 1e-8 * (1 + np.abs(xi_y))
    rep.add("vi_homogeneity").record_batch(
        err <= bound, err - bound, lambda i: {"y": Y[i], "lambda": lam[i], "xi(lambda*y)": lhs[i]}
    )

    H = rng.standard_normal(Y.shape)
    H *= 1e-6 / np.linalg.norm(H, axis=1, keepdims=True)
    lip = 1.0 / cone.interior_radius()
    moved = np.asarray(s.xi(Y + H))
    err = np.abs(moved - xi_y)
    bound = lip * 1e-6 * (1 + 1e-6) + 1e-12 * (1 + np.abs(xi_y))
    rep.add("vi_continuity").record_batch(
        err <= bound, err - bound, lambda i: {"y": Y[i], "h": H[i], "lipschitz": lip}
    )
    rep.extra["lipschitz_estimate"] = lip

    # (vii): y2 <=_K y1 by construction, y1 = y2 + k with k in K
    K = cone.sample(rng, samples)
    Y2 = Y[: len(K)]
    Y1 = Y2 + K
    x1 = np.asarray(s.xi(Y1))
    x2 = xi_y[: len(K)]
    comparable = np.asarray(cone.leq(Y2, Y1))
    rep.add("vii").record_batch(
        (x2 <= x1 + 1e-9)[comparable],
        (x2 - x1)[comparable],
        lambda i: {"y1": Y1[comparable][i], "y2": Y2[comparable][i]},
    )

    # (viii): independent pairs plus collinear pairs, where equality holds
    W = _sample_vectors(cone, rng, samples)
    collinear = rng.random(samples) < 0.1
    W[collinear] = Y[collinear] * rng.exponential(1.0, int(collinear.sum()))[:, None]
    lhs = np.asarray(s.xi(Y + W))
    rhs = xi_y + np.asarray(s.xi(W))
    rep.add("viii").record_batch(
        lhs <= rhs + 1e-9, lhs - rhs, lambda i: {"y1": Y[i], "y2": W[i], "xi(y1+y2)": lhs[i], "sum": rhs[i]}
    )
    return rep


def check_lemma2(s: Scalarizer, samples: int = 10_000, seed: int = 0) -> SuiteReport:
    """Sampled check of the embedding ``M(r) = r e`` against ``xi``.

    Item ``v`` asserts ``xi(y2) - xi(y1) > 1e-12`` only for pairs whose
    difference has interior slack above ``1e-6``.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    cone = s.cone
    rng = np.random.default_rng(seed)
    rep = SuiteReport(f"lemma2[{cone.kind}]")

    zero = s.embed(0.0)
    rep.add("i").record(bool(np.all(zero == 0.0)), float(np.abs(zero).max()), {"M(0)": zero})

    r1 = rng.uniform(-10, 10, samples)
    r2 = r1 + np.where(rng.random(samples) < 0.1, 0.0, rng.exponential(1.0, samples))
    ok = np.asarray(cone.leq(s.embed(r1), s.embed(r2)))
    rep.add("ii").record_batch(ok, r2 - r1, lambda i: {"r1": r1[i], "r2": r2[i]})

    Y = _sample_vectors(cone, rng, samples)
    xi_y = np.asarray(s.xi(Y))
    top = s.embed(xi_y)
    ok = np.asarray(cone.leq(Y, top))
    rep.add("iii").record_batch(
        ok, -cone.slack(top - Y), lambda i: {"y": Y[i], "xi": xi_y[i], "M(xi(y))": top[i]}
    )

    r = np.concatenate([rng.uniform(-10, 10, samples // 2), rng.standard_normal(samples - samples // 2) * 1e3])
    back = np.asarray(s.xi(s.embed(r)))
    rep.add("iv").record_batch(back <= r + 1e-9, back - r, lambda i: {"r": r[i], "xi(M(r))": back[i]})

    margin = 1e-6
    K = _interior_members(cone, rng, samples, margin)
    Y1 = _sample_vectors(cone, rng, samples)
    Y2 = Y1 + K
    strictly = np.asarray(cone.ll(Y1, Y2))
    d = np.asarray(s.xi(Y2)) - np.asarray(s.xi(Y1))
    rep.add("v").record_batch(
        (d > 1e-12)[strictly],
        (1e-12 - d)[strictly],
        lambda i: {"y1": Y1[strictly][i], "y2": Y2[strictly][i], "gap": d[strictly][i]},
    )
    return rep
