"""Contraction checks, Picard iteration and the (C)/(C1) pair conditions.

Pair sweeps work on "internal" points: indices into the table for finite
spaces, raw floats for the weighted line.  Reports translate them back to
labels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .comparison import ScalarComparison, VectorialComparison, transfer_psi
from .cone_metric import LINE_RADIUS, ConeMetricSpace, InducedMetric, _dist, _label
from .report import SuiteReport
from .scalarize import Scalarizer

#: Orbits longer than this are truncated in the report (iteration continues).
ORBIT_CAP = 10_000
SCALAR_SLACK = 1e-9


class SelfMap:
    """``f: X -> X`` on a table space (assignment) or the weighted line."""

    def __init__(self, domain: ConeMetricSpace, rule: Callable, name: str = "f", spec: dict | None = None):
        self.domain = domain
        self._rule = rule
        self.name = name
        self.spec = spec

    @classmethod
    def table(cls, domain, mapping) -> SelfMap:
        if not domain.is_finite:
            raise TypeError("table maps need a finite space")
        if isinstance(mapping, dict):
            missing = set(domain.labels) - set(map(str, mapping))
            if missing:
                raise ValueError(f"map is undefined at {sorted(missing)}")
            idx = np.array([domain.index(mapping[lab]) for lab in domain.labels], dtype=int)
        else:
            if len(mapping) != len(domain):
                raise ValueError("assignment list must have one entry per point")
            idx = np.array([domain.index(v) if not isinstance(v, (int, np.integer)) else int(v) for v in mapping])
            if np.any((idx < 0) | (idx >= len(domain))):
                raise ValueError("assignment index out of range")
        spec = {"type": "table", "map": {lab: domain.labels[j] for lab, j in zip(domain.labels, idx)}}
        return cls(domain, lambda a: idx[a], "table map", spec)

    @classmethod
    def affine(cls, domain, a: float, b: float) -> SelfMap:
        if domain.is_finite:
            raise TypeError("affine maps live on the weighted line")
        a, b = float(a), float(b)
        return cls(domain, lambda x: a * np.asarray(x, dtype=float) + b, f"{a}*x+{b}", {"type": "affine", "a": a, "b": b})

    @classmethod
    def identity(cls, domain) -> SelfMap:
        return cls(domain, lambda a: a, "identity", {"type": "identity"})

    @classmethod
    def constant(cls, domain, value) -> SelfMap:
        if domain.is_finite:
            j = domain.index(value)
            return cls(domain, lambda a: np.full(np.shape(a), j), f"const {value}", {"type": "constant", "value": value})
        v = float(value)
        return cls(domain, lambda a: np.full(np.shape(a), v), f"const {v}", {"type": "constant", "value": v})

    @classmethod
    def from_dict(cls, spec: dict[str, Any], domain) -> SelfMap:
        kind = spec.get("type")
        if kind == "table":
            return cls.table(domain, spec["map"])
        if kind == "affine":
            return cls.affine(domain, spec["a"], spec["b"])
        if kind == "identity":
            return cls.identity(domain)
        if kind == "constant":
            return cls.constant(domain, spec["value"])
        raise ValueError(f"unknown map type {kind!r}")

    def __repr__(self):
        return f"SelfMap({self.name})"

    def _internal(self, x):
        return self.domain.index(x) if self.domain.is_finite else self.domain._point(x)

    def _external(self, a):
        return _label(self.domain, a)

    def apply_internal(self, a):
        out = self._rule(a)
        if np.shape(out) != np.shape(a):
            out = np.array([self._rule(v) for v in np.ravel(a)]).reshape(np.shape(a))
        return out

    def __call__(self, x):
        return self._external(self.apply_internal(np.asarray(self._internal(x))))


def _pairs(space: ConeMetricSpace, pairs, samples: int, seed: int):
    """Internal arrays (a, b) for an explicit pair list, or the default sweep.

    Default: all pairs ``i <= j`` of a finite space, else ``samples`` pairs
    uniform on ``[-R, R]^2``.
    """
    if pairs is not None:
        if space.is_finite:
            a = np.array([space.index(x) for x, _ in pairs], dtype=int)
            b = np.array([space.index(y) for _, y in pairs], dtype=int)
        else:
            a = np.array([space._point(x) for x, _ in pairs])
            b = np.array([space._point(y) for _, y in pairs])
        return a, b
    if space.is_finite:
        a, b = np.triu_indices(len(space))
        return a, b
    rng = np.random.default_rng(seed)
    a, b = space.sample_points(rng, (2, samples), LINE_RADIUS)
    return a, b


def _psi_many(sc: ScalarComparison, t: np.ndarray) -> np.ndarray:
    out = np.asarray(sc(t), dtype=float)
    if out.shape != t.shape:
        out = np.array([sc(float(v)) for v in t.ravel()]).reshape(t.shape)
    return out


def _check_domains(*maps: SelfMap):
    d = maps[0].domain
    if any(m.domain is not d for m in maps[1:]):
        raise ValueError("maps must share a domain")


def _vector_mask(f: SelfMap, vc: VectorialComparison, a, b):
    space = f.domain
    if vc.cone != space.cone:
        raise ValueError("comparison function and space must share a cone")
    fa, fb = f.apply_internal(a), f.apply_internal(b)
    lhs = _dist(space, fa, fb)
    rhs = vc(_dist(space, a, b))
    gap = rhs - lhs
    return np.asarray(space.cone.contains(gap)), -space.cone.slack(gap), lhs, rhs


def _scalar_mask(f: SelfMap, sc: ScalarComparison, m: InducedMetric, a, b):
    space = f.domain
    xi = m.scalarizer.xi
    fa, fb = f.apply_internal(a), f.apply_internal(b)
    lhs = np.asarray(xi(_dist(space, fa, fb)))
    rhs = _psi_many(sc, np.asarray(xi(_dist(space, a, b))))
    return lhs <= rhs + SCALAR_SLACK, lhs - rhs, lhs, rhs


def _pair_witness(space, a, b, i, **vals):
    return {"x": _label(space, a[i]), "y": _label(space, b[i]), **{k: v[i] for k, v in vals.items()}}


def verify_vector_contraction(
    f: SelfMap, vc: VectorialComparison, samples: int = 10_000, seed: int = 0, pairs=None
) -> SuiteReport:
    """``p(fx, fy) <=_K phi(p(x, y))`` over the pair sweep."""
    a, b = _pairs(f.domain, pairs, samples, seed)
    ok, viol, lhs, rhs = _vector_mask(f, vc, a, b)
    rep = SuiteReport("vector_contraction")
    rep.add("contraction").record_batch(
        ok, viol, lambda i: _pair_witness(f.domain, a, b, i, **{"p(fx,fy)": lhs, "phi(p(x,y))": rhs})
    )
    return rep


def verify_scalar_contraction(
    f: SelfMap, sc: ScalarComparison, m: InducedMetric, samples: int = 10_000, seed: int = 0, pairs=None
) -> SuiteReport:
    """``d_p(fx, fy) <= psi(d_p(x, y)) + 1e-9`` over the pair sweep."""
    if m.space is not f.domain:
        raise ValueError("induced metric must be built over the map's domain")
    a, b = _pairs(f.domain, pairs, samples, seed)
    ok, viol, lhs, rhs = _scalar_mask(f, sc, m, a, b)
    rep = SuiteReport("scalar_contraction")
    rep.add("contraction").record_batch(
        ok, viol, lambda i: _pair_witness(f.domain, a, b, i, **{"d(fx,fy)": lhs, "psi(d(x,y))": rhs})
    )
    return rep


def theorem21_implication(
    f: SelfMap, vc: VectorialComparison, s: Scalarizer, samples: int = 10_000, seed: int = 0, pairs=None
) -> SuiteReport:
    """Every pair passing the vector contraction must pass the scalar one
    with ``psi = transfer_psi(vc, s)``.  ``extra['crosstab']`` counts pairs
    by (vector outcome, scalar outcome)."""
    a, b = _pairs(f.domain, pairs, samples, seed)
    m = InducedMetric(f.domain, s)
    psi = transfer_psi(vc, s)
    vok, _, _, _ = _vector_mask(f, vc, a, b)
    sok, sviol, lhs, rhs = _scalar_mask(f, psi, m, a, b)
    rep = SuiteReport("theorem21_implication")
    sel = np.flatnonzero(vok)
    rep.add("vector_implies_scalar").record_batch(
        sok[sel],
        sviol[sel],
        lambda i: _pair_witness(f.domain, a[sel], b[sel], i, **{"d(fx,fy)": lhs[sel], "psi(d(x,y))": rhs[sel]}),
    )
    rep.extra["crosstab"] = {
        f"vector_{'pass' if v else 'fail'}/scalar_{'pass' if s_ else 'fail'}": int(np.sum((vok == v) & (sok == s_)))
        for v in (True, False)
        for s_ in (True, False)
    }
    return rep


@dataclass
class FixedPointReport:
    orbit: list = field(default_factory=list)
    residuals: list[float] = field(default_factory=list)
    converged: bool = False
    fixed_point: Any = None
    iterations: int = 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "converged": self.converged,
            "fixed_point": self.fixed_point,
            "iterations": self.iterations,
            "final_residual": self.residuals[-1] if self.residuals else None,
            "orbit": self.orbit,
            "residuals": self.residuals,
        }


def picard_solve(f: SelfMap, m: InducedMetric, x0, tol: float = 1e-10, max_iter: int = 10_000) -> FixedPointReport:
    """Iterate ``x_{n+1} = f(x_n)`` until ``d_p(x_n, x_{n+1}) < tol``.

    Running out of iterations is reported through ``converged=False``.
    """
    if tol <= 0 or max_iter < 1:
        raise ValueError("tol must be > 0 and max_iter >= 1")
    if m.space is not f.domain:
        raise ValueError("induced metric must be built over the map's domain")
    x = f._external(f._internal(x0))
    rep = FixedPointReport(orbit=[x])
    for n in range(1, max_iter + 1):
        nxt = f(x)
        r = m.distance(x, nxt)
        rep.iterations = n
        if len(rep.residuals) < ORBIT_CAP:
            rep.residuals.append(r)
            rep.orbit.append(nxt)
        x = nxt
        if r < tol:
            rep.converged = True
            rep.fixed_point = x
            break
    return rep


def verify_uniqueness(
    f: SelfMap, m: InducedMetric, starts: Sequence, tol: float = 1e-10, max_iter: int = 10_000
) -> SuiteReport:
    """Picard from every start; all limits must agree within ``10 tol`` in ``d_p``."""
    if len(starts) < 2:
        raise ValueError("need at least two starting points")
    runs = [picard_solve(f, m, x0, tol, max_iter) for x0 in starts]
    rep = SuiteReport("uniqueness")
    conv = rep.add("converged")
    for x0, run in zip(starts, runs):
        conv.record(run.converged, run.residuals[-1] if run.residuals else 0.0, {"start": x0, "iterations": run.iterations})
    same = rep.add("same_limit")
    done = [(x0, run.fixed_point) for x0, run in zip(starts, runs) if run.converged]
    if done:
        ref_start, ref = done[0]
        for x0, lim in done[1:]:
            d = m.distance(ref, lim)
            same.record(d <= 10 * tol, d, {"start_a": ref_start, "limit_a": ref, "start_b": x0, "limit_b": lim})
    rep.extra["limits"] = {str(x0): run.fixed_point for x0, run in zip(starts, runs)}
    rep.extra["iterations"] = {str(x0): run.iterations for x0, run in zip(starts, runs)}
    return rep


def _candidates(f: SelfMap, g: SelfMap, a, b):
    """``(fx, fy)`` and the three candidate pairs of (C): (gx,gy), (gx,fx), (gy,fy)."""
    fa, fb = f.apply_internal(a), f.apply_internal(b)
    ga, gb = g.apply_internal(a), g.apply_internal(b)
    return (fa, fb), [(ga, gb), (ga, fa), (gb, fb)]


def _condition_report(name, space, a, b, witnessed: np.ndarray) -> SuiteReport:
    rep = SuiteReport(name)
    holds = witnessed.any(axis=1)
    rep.add("condition").record_batch(
        holds, np.ones(len(holds)), lambda i: {"x": _label(space, a[i]), "y": _label(space, b[i])}
    )
    rep.extra["cases"] = [
        {"x": _label(space, a[i]), "y": _label(space, b[i]), "cases": [k + 1 for k in np.flatnonzero(witnessed[i])]}
        for i in range(len(a))
    ]
    return rep


def condition_C_cases(f, g, vc, a, b) -> np.ndarray:
    """Boolean ``(pairs, 3)`` matrix: which cases witness (C)."""
    _check_domains(f, g)
    space = f.domain
    if vc.cone != space.cone:
        raise ValueError("comparison function and space must share a cone")
    (fa, fb), cands = _candidates(f, g, a, b)
    lhs = _dist(space, fa, fb)
    return np.column_stack([space.cone.leq(lhs, vc(_dist(space, u, v))) for u, v in cands])


def condition_C1_cases(f, g, sc, m, a, b) -> np.ndarray:
    _check_domains(f, g)
    space = f.domain
    xi = m.scalarizer.xi
    (fa, fb), cands = _candidates(f, g, a, b)
    lhs = np.asarray(xi(_dist(space, fa, fb)))
    return np.column_stack(
        [lhs <= _psi_many(sc, np.asarray(xi(_dist(space, u, v)))) + SCALAR_SLACK for u, v in cands]
    )


def check_condition_C(
    f: SelfMap, g: SelfMap, vc: VectorialComparison, pairs=None, samples: int = 10_000, seed: int = 0
) -> SuiteReport:
    """Vector condition: some ``u`` among ``p(gx,gy), p(gx,fx), p(gy,fy)``
    has ``p(fx, fy) <=_K phi(u)``.  ``extra['cases']`` lists the witnessing
    case numbers (1, 2, 3) per pair."""
    a, b = _pairs(f.domain, pairs, samples, seed)
    return _condition_report("condition_C", f.domain, a, b, condition_C_cases(f, g, vc, a, b))


def check_condition_C1(
    f: SelfMap, g: SelfMap, sc: ScalarComparison, m: InducedMetric, pairs=None, samples: int = 10_000, seed: int = 0
) -> SuiteReport:
    """Scalar condition with ``d_p`` and ``psi``, slack ``1e-9``."""
    a, b = _pairs(f.domain, pairs, samples, seed)
    return _condition_report("condition_C1", f.domain, a, b, condition_C1_cases(f, g, sc, m, a, b))


def remark23_implication(
    f: SelfMap, g: SelfMap, vc: VectorialComparison, s: Scalarizer, pairs=None, samples: int = 10_000, seed: int = 0
) -> SuiteReport:
    """Case-preserving transfer: whenever case k witnesses (C) for a pair,
    case k must witness (C1) with ``psi = transfer_psi(vc, s)``."""
    space = f.domain
    a, b = _pairs(space, pairs, samples, seed)
    m = InducedMetric(space, s)
    c = condition_C_cases(f, g, vc, a, b)
    c1 = condition_C1_cases(f, g, transfer_psi(vc, s), m, a, b)
    rep = SuiteReport("remark23")
    rows, cols = np.nonzero(c)
    rep.add("case_preserving").record_batch(
        c1[rows, cols],
        np.ones(len(rows)),
        lambda i: {"x": _label(space, a[rows[i]]), "y": _label(space, b[rows[i]]), "case": int(cols[i]) + 1},
    )
    c_holds = bool(c.any(axis=1).all())
    item = rep.add("C_implies_C1")
    if c_holds:
        c1_rows = c1.any(axis=1)
        item.record_batch(c1_rows, np.ones(len(c1_rows)), lambda i: {"x": _label(space, a[i]), "y": _label(space, b[i])})
    rep.extra["C_holds"] = c_holds
    rep.extra["C1_holds"] = bool(c1.any(axis=1).all())
    return rep
