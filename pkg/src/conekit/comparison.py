"""Vectorial and scalar comparison functions, and the transfer between them.

A vectorial comparison function ``phi: K -> K`` is monotone for the cone
order, fixes ``0``, sits strictly below the identity, preserves the
interior gap and is right-continuous along the ray ``t e``.  Scalarizing it
along that ray, ``psi(t) = xi_e(phi(t e))``, yields a scalar comparison
function: increasing, with ``psi^n(t) -> 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .cone import TAU, Cone, _as_vectors
from .report import SuiteReport
from .scalarize import Scalarizer, _interior_members

#: Right-limit ladder for the ray-continuity check.
DELTAS = 10.0 ** -np.arange(1, 9)
DEFAULT_RAY_POINTS = (0.0, 1e-3, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0)


class DomainError(ValueError):
    """Argument lies outside the cone."""


# -- componentwise building blocks ------------------------------------------


@dataclass(frozen=True)
class Scale:
    c: float

    def __call__(self, t):
        return self.c * np.asarray(t, dtype=float)

    def to_dict(self):
        return {"type": "scale", "c": self.c}


@dataclass(frozen=True)
class RationalDecay:
    """``t / (1 + t)``."""

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return t / (1.0 + t)

    def to_dict(self):
        return {"type": "rational_decay"}


@dataclass(frozen=True)
class Power:
    """``c t^p``; only a comparison function on bounded ranges, so verify it."""

    p: float
    c: float = 1.0

    def __call__(self, t):
        return self.c * np.asarray(t, dtype=float) ** self.p

    def to_dict(self):
        return {"type": "pow", "p": self.p, "c": self.c}


@dataclass(frozen=True)
class Step:
    """``c t + jump [t > at]``: increasing, below the identity past ``at``,
    but only left-continuous at ``at``."""

    c: float = 0.5
    at: float = 1.0
    jump: float = 0.25

    @property
    def breakpoints(self):
        return (self.at,)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.c * t + self.jump * (t > self.at)

    def to_dict(self):
        return {"type": "step", "c": self.c, "at": self.at, "jump": self.jump}


def component_from_dict(spec: dict[str, Any]):
    kind = spec.get("type")
    if kind == "scale":
        return Scale(float(spec["c"]))
    if kind == "rational_decay":
        return RationalDecay()
    if kind == "pow":
        return Power(float(spec["p"]), float(spec.get("c", 1.0)))
    if kind == "step":
        return Step(float(spec.get("c", 0.5)), float(spec.get("at", 1.0)), float(spec.get("jump", 0.25)))
    raise ValueError(f"unknown component type {kind!r}")


# -- vectorial comparison ---------------------------------------------------


class VectorialComparison:
    """``phi: K -> K``, either ``lambda k`` or ``(phi_1(k_1), ..., phi_n(k_n))``.

    Component callables must accept numpy arrays.  The componentwise form
    is restricted to orthant cones, where componentwise monotonicity is the
    cone order's monotonicity.
    """

    def __init__(self, cone: Cone, kind: str, lam: float | None = None, components: Sequence = ()):
        self.cone = cone
        self.kind = kind
        self.lam = lam
        self.components = tuple(components)

    @classmethod
    def linear(cls, cone: Cone, lam: float) -> VectorialComparison:
        lam = float(lam)
        if not 0.0 <= lam < 1.0:
            raise ValueError("linear comparison needs 0 <= lambda < 1")
        return cls(cone, "linear", lam=lam)

    @classmethod
    def componentwise(cls, cone: Cone, components: Sequence[Callable]) -> VectorialComparison:
        if cone.kind != "orthant":
            raise ValueError("componentwise comparison functions need an orthant cone")
        if len(components) != cone.dim:
            raise ValueError(f"need {cone.dim} components, got {len(components)}")
        return cls(cone, "componentwise", components=components)

    @classmethod
    def from_dict(cls, spec: dict[str, Any], cone: Cone) -> VectorialComparison:
        kind = spec.get("kind")
        if kind == "linear":
            return cls.linear(cone, spec["lambda"])
        if kind == "componentwise":
            return cls.componentwise(cone, [component_from_dict(c) for c in spec["components"]])
        raise ValueError(f"unknown comparison kind {kind!r}")

    def to_dict(self) -> dict[str, Any]:
        if self.kind == "linear":
            return {"kind": "linear", "lambda": self.lam}
        return {"kind": "componentwise", "components": [c.to_dict() for c in self.components]}

    def __repr__(self):
        if self.kind == "linear":
            return f"VectorialComparison(linear, lambda={self.lam})"
        return f"VectorialComparison(componentwise, {list(self.components)})"

    def __call__(self, k):
        k = _as_vectors(k, self.cone.dim)
        if not np.all(self.cone.contains(k)):
            raise DomainError("argument is outside the cone")
        if self.kind == "linear":
            return self.lam * k
        k = np.maximum(k, 0.0)
        return np.stack([np.broadcast_to(f(k[..., i]), k.shape[:-1]) for i, f in enumerate(self.components)], axis=-1)

    apply = __call__

    def ray_breakpoints(self) -> list[float]:
        """Parameters ``t`` where some component of ``phi(t e)`` may jump."""
        out = []
        for i, f in enumerate(self.components):
            for b in getattr(f, "breakpoints", ()):
                out.append(b / self.cone.e[i])
        return out


def verify_vectorial(
    vc: VectorialComparison, samples: int = 1000, seed: int = 0, ray_points: Sequence[float] | None = None
) -> SuiteReport:
    """Sampled check of the four defining conditions.

    ``ii`` uses a non-strict lower bound ``0 <=_K phi(k)``; values with
    ``phi(k) = 0`` for nonzero ``k`` are counted in ``extra`` rather than
    failed.  ``iii`` is only asserted for ``k`` with interior slack above
    ``1e-6``.  ``iv`` walks ``delta = 1e-1 .. 1e-8`` to the right of each ray
    point and needs a gap below ``1e-6`` at the finest step.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    cone = vc.cone
    rng = np.random.default_rng(seed)
    rep = SuiteReport(f"vectorial[{vc.kind}]")

    K1 = cone.sample(rng, samples)
    K2 = K1 + cone.sample(rng, samples)[: len(K1)]
    F1, F2 = vc(K1), vc(K2)
    gap = F2 - F1
    rep.add("i").record_batch(
        np.asarray(cone.contains(gap)), -cone.slack(gap), lambda i: {"k1": K1[i], "k2": K2[i]}
    )

    item = rep.add("ii")
    zero = vc(np.zeros(cone.dim))
    item.record(bool(np.all(zero == 0)), float(np.abs(zero).max()), {"k": "0", "phi(k)": zero})
    K = cone.sample(rng, samples)
    K = K[np.linalg.norm(K, axis=1) >= 1e-3]
    F = vc(K)
    lower = np.asarray(cone.contains(F))
    upper = np.asarray(cone.lt(F, K))
    item.record_batch(
        lower & upper,
        np.maximum(-cone.slack(F), -cone.slack(K - F)),
        lambda i: {"k": K[i], "phi(k)": F[i]},
    )
    rep.extra["phi_zero_on_nonzero"] = int(np.sum(np.linalg.norm(F, axis=1) <= TAU))

    Ki = _interior_members(cone, rng, samples, 1e-6)
    D = Ki - vc(Ki)
    rep.add("iii").record_batch(
        np.asarray(cone.in_interior(D)), -cone.slack(D), lambda i: {"k": Ki[i], "k-phi(k)": D[i]}
    )

    pts = list(DEFAULT_RAY_POINTS if ray_points is None else ray_points)
    pts += vc.ray_breakpoints()
    if ray_points is None:
        pts += list(rng.uniform(0, 10, 8))
    item = rep.add("iv")
    e = cone.e
    for t0 in sorted(set(float(t) for t in pts if t >= 0)):
        base = vc(t0 * e)
        ladder = np.linalg.norm(vc((t0 + DELTAS)[:, None] * e) - base, axis=1)
        item.record(bool(ladder[-1] < 1e-6), float(ladder[-1]), {"t0": t0, "deltas": DELTAS, "gaps": ladder})
    return rep


# -- scalar comparison ------------------------------------------------------


@dataclass(frozen=True)
class ScalarComparison:
    """A function ``R_+ -> R_+`` with declared regularity flags.

    ``increasing`` and ``right_usc`` record what the caller asserts; the
    checkers report when observed behaviour contradicts them.
    """

    fn: Callable
    provenance: str = "builtin"
    name: str = ""
    increasing: bool = True
    right_usc: bool = True
    source: Any = field(default=None, repr=False, compare=False)

    def __call__(self, t):
        out = self.fn(t)
        return float(out) if np.ndim(out) == 0 else out

    @classmethod
    def linear(cls, c: float) -> ScalarComparison:
        return cls(lambda t: c * np.asarray(t, dtype=float), name=f"{c}*t")

    @classmethod
    def rational_decay(cls) -> ScalarComparison:
        return cls(RationalDecay(), name="t/(1+t)")

    @classmethod
    def identity(cls) -> ScalarComparison:
        return cls(lambda t: np.asarray(t, dtype=float), name="t")


def transfer_psi(vc: VectorialComparison, s: Scalarizer, verify: bool = False) -> ScalarComparison:
    """``psi(t) = xi_e(phi(t e))``, evaluated lazily; accepts arrays of ``t``.

    With ``verify=True`` the vectorial conditions are checked first and a
    failure raises ``ValueError``.
    """
    if vc.cone != s.cone:
        raise ValueError("comparison function and scalarizer must share a cone")
    if verify:
        rep = verify_vectorial(vc)
        if not rep.passed:
            raise ValueError(f"not a vectorial comparison function: {rep.failed_items()}")

    def psi(t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise DomainError("psi is defined on t >= 0")
        return s.xi(vc(s.embed(t)))

    return ScalarComparison(psi, provenance="transferred", name=f"xi_e o {vc!r} o M", source=vc)


def _orbit_decays(sc: ScalarComparison, t: float, n_max: int):
    """Iterate ``sc`` from ``t``; return (decayed, nonincreasing, n, last)."""
    v = t
    target = 1e-6 * t
    monotone = True
    for n in range(1, n_max + 1):
        nxt = sc(v)
        if nxt > v * (1 + 1e-12) + 1e-15:
            monotone = False
        v = nxt
        if v < target or v == 0.0:
            return True, monotone, n, v
    return False, monotone, n_max, v


def verify_scalar(sc: ScalarComparison, t_grid: Sequence[float], n_max: int = 1000) -> SuiteReport:
    """Monotonicity on the sorted grid and decay of ``psi^n(t)`` below ``1e-6 t``."""
    grid = np.sort(np.asarray(t_grid, dtype=float))
    if np.any(grid <= 0) or n_max < 1:
        raise ValueError("grid points must be > 0 and n_max >= 1")
    vals = np.array([sc(t) for t in grid])
    rep = SuiteReport(f"scalar[{sc.name or sc.provenance}]")
    drop = vals[:-1] - vals[1:]
    rep.add("monotone").record_batch(
        drop <= 1e-12 * (1 + np.abs(vals[:-1])), drop, lambda i: {"t1": grid[i], "t2": grid[i + 1]}
    )
    item = rep.add("decay")
    steps = {}
    for t in grid:
        decayed, monotone, n, last = _orbit_decays(sc, float(t), n_max)
        steps[float(t)] = n
        item.record(decayed and monotone, last / t, {"t": t, "iterations": n, "last": last, "nonincreasing": monotone})
    rep.extra["iterations"] = steps
    return rep


def check_lemma21(sc: ScalarComparison, t_grid: Sequence[float], n_max: int = 1000) -> SuiteReport:
    """Both directions of "``psi(t) < t`` on the grid iff iterates vanish".

    Either direction failing means a declared hypothesis (increasing, right
    upper semicontinuous) does not actually hold; ``extra['verdict']`` says
    which situation was observed.
    """
    grid = np.sort(np.asarray(t_grid, dtype=float))
    if np.any(grid <= 0):
        raise ValueError("grid points must be > 0")
    below = np.array([sc(t) < t - 1e-12 for t in grid])
    orbits = [_orbit_decays(sc, float(t), n_max) for t in grid]
    decays = np.array([o[0] and o[1] for o in orbits])
    rep = SuiteReport(f"lemma21[{sc.name or sc.provenance}]")
    a = rep.add("below_implies_decay")
    if below.all():
        for t, ok, o in zip(grid, decays, orbits):
            a.record(bool(ok), o[3] / t, {"t": t, "iterations": o[2], "last": o[3]})
    b = rep.add("decay_implies_below")
    if decays.all():
        for t, ok in zip(grid, below):
            b.record(bool(ok), sc(t) - t, {"t": t, "psi(t)": sc(t)})
    rep.extra["declared"] = {"increasing": sc.increasing, "right_usc": sc.right_usc}
    if rep.passed:
        rep.extra["verdict"] = "consistent" if below.all() else "consistent (vacuous)"
    else:
        rep.extra["verdict"] = "hypothesis violation: a declared flag does not hold"
    return rep


def check_transfer(vc: VectorialComparison, s: Scalarizer, t_grid: Sequence[float]) -> SuiteReport:
    """Properties of the transferred ``psi`` on a grid of ``t > 0``.

    ``chain``: ``0 <= psi(t) <= xi(M(t)) <= t``; ``strict_drop``:
    ``psi(t) < t``; ``monotone`` on the sorted grid; and for linear ``phi``,
    ``linear``: ``|psi(t) - lambda t| <= 1e-9 (1 + t)``.
    """
    psi = transfer_psi(vc, s)
    t = np.sort(np.asarray(t_grid, dtype=float))
    p = np.asarray(psi(t))
    m = np.asarray(s.xi(s.embed(t)))
    rep = SuiteReport(f"transfer[{vc!r}]")

    def wit(i):
        return {"t": t[i], "psi(t)": p[i], "xi(M(t))": m[i]}

    worst = np.maximum.reduce([-p, p - m, m - t])
    rep.add("chain").record_batch(
        (p >= -1e-12) & (p <= m + 1e-12) & (m <= t + 1e-9), worst, wit
    )
    rep.add("strict_drop").record_batch(p < t, p - t, wit)
    rep.add("monotone").record_batch(np.diff(p) >= -1e-12, -np.diff(p), wit)
    if vc.kind == "linear":
        err = np.abs(p - vc.lam * t)
        bound = 1e-9 * (1 + t)
        rep.add("linear").record_batch(err <= bound, err - bound, wit)
    return rep
