"""Odd power-sum nonlinearities and the truncation / epsilon machinery.

A spec describes ``f(t) = sum_i c_i |t|^{p_i - 1} t`` together with the
optional post-processing used to reach a well-posed variational problem:

* splitting ``f = f_+ - f_-`` with ``f_pm = max(+-f, 0)`` on ``t >= 0``,
* truncation ``f = 0`` above a zero ``zeta2`` of ``f``,
* the lower-branch clamp ``f_{eps,-} = min(f_-, t^{q*} / eps)`` on
  ``[0, xi0]`` with ``q* = 2*_s - 1``.

Everything is odd in ``t`` and the primitives are even.  All primitives
are closed form: between consecutive sign changes of ``f`` (and crossings
of the clamp) each branch is a sum of powers.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from .errors import BadCaseClassification, ConditionF3Violated, NoZeroAtZeta, ValidationError
from .spectral import FracParams

ZERO_TOL = 1e-10


class MassCase(enum.Enum):
    ZERO = "zero"
    POSITIVE = "positive"


def _power_sum(terms, t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    for c, p in terms:
        out = out + c * np.abs(t) ** p
    return out


def _signed_power_roots(func, lo, hi, samples=4000):
    """Sign changes of ``func`` on ``(lo, hi)``, refined by brentq."""
    ts = np.geomspace(lo, hi, samples)
    vals = func(ts)
    roots = []
    for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
        roots.append(brentq(lambda x: float(func(x)), ts[i], ts[i + 1], xtol=1e-15, rtol=1e-15))
    roots.extend(float(t) for t, v in zip(ts, vals) if v == 0.0)
    return sorted(roots)


@dataclass(frozen=True)
class NonlinearitySpec:
    """Power-sum nonlinearity with optional truncation and epsilon clamp.

    ``crit_exp`` is ``2*_s - 1``; it is only needed by the epsilon clamp and
    by :meth:`certify`.  ``func``/``prim`` replace the power sum by arbitrary
    callables (odd ``f`` and its primitive); such specs skip certification
    and do not support splitting-based modifications.
    """

    terms: tuple = ()
    mass_case: MassCase = MassCase.ZERO
    zeta2: Optional[float] = None
    eps: Optional[float] = None
    xi0: Optional[float] = None
    crit_exp: Optional[float] = None
    func: Optional[Callable] = None
    prim: Optional[Callable] = None

    def __post_init__(self):
        terms = tuple((float(c), float(p)) for c, p in self.terms)
        object.__setattr__(self, "terms", terms)
        if isinstance(self.mass_case, str):
            object.__setattr__(self, "mass_case", MassCase(self.mass_case))
        if self.func is None:
            if not terms:
                raise ValueError("a power-sum nonlinearity needs at least one term")
            if any(p <= 0 for _, p in terms):
                raise ValueError("exponents must be positive")
        elif self.eps is not None or self.zeta2 is not None:
            raise ValueError("callable nonlinearities do not support truncation or eps")
        if self.eps is not None:
            if not (0.0 < self.eps <= 1.0):
                raise ValueError(f"eps must lie in (0, 1], got {self.eps}")
            if self.crit_exp is None:
                raise ValueError("eps modification needs crit_exp = 2*_s - 1")
        if self.zeta2 is not None:
            if abs(float(self._raw_f(self.zeta2))) > ZERO_TOL * max(1.0, self._scale(self.zeta2)):
                raise NoZeroAtZeta(f"f({self.zeta2}) = {float(self._raw_f(self.zeta2)):.3e} is not zero")
        object.__setattr__(self, "_tables", _build_tables(self))

    # -- raw power sum -------------------------------------------------------
    def _raw_f(self, t):
        t = np.asarray(t, dtype=float)
        if self.func is not None:
            return np.asarray(self.func(t), dtype=float)
        return np.sign(t) * _power_sum([(c, p) for c, p in self.terms], t)

    def _raw_F(self, t):
        t = np.asarray(t, dtype=float)
        if self.func is not None:
            if self.prim is not None:
                return np.asarray(self.prim(t), dtype=float)
            return _quad_primitive(self.func, t)
        return _power_sum([(c / (p + 1.0), p + 1.0) for c, p in self.terms], t)

    def _scale(self, t):
        return float(sum(abs(c) * abs(t) ** p for c, p in self.terms)) if self.terms else 1.0

    # -- public evaluation ---------------------------------------------------
    def f(self, t):
        """``f_plus - f_minus`` after truncation and clamping."""
        return self.f_plus(t) - self.f_minus(t)

    def F(self, t):
        return self.F_plus(t) - self.F_minus(t)

    def f_plus(self, t):
        return self._branch(t, "f", +1)

    def f_minus(self, t):
        return self._branch(t, "f", -1)

    def F_plus(self, t):
        return self._branch(t, "F", +1)

    def F_minus(self, t):
        return self._branch(t, "F", -1)

    def _branch(self, t, which, sign):
        t = np.asarray(t, dtype=float)
        a = np.abs(t)
        tab = self._tables
        if self.func is not None:
            if which == "f":
                v = self._raw_f(a)
                return np.sign(t) * np.maximum(sign * v, 0.0)
            # primitive of a callable's branches by quadrature
            return _quad_primitive(lambda s: np.maximum(sign * self._raw_f(s), 0.0), a)
        out = np.zeros_like(a)
        for piece in tab:
            if piece.sign != sign:
                continue
            lo, hi = piece.lo, piece.hi
            if which == "f":
                inside = (a > lo) & (a <= hi) if lo > 0 else (a >= lo) & (a <= hi)
                out = out + np.where(inside, piece.value(a), 0.0)
            else:
                tt = np.clip(a, lo, hi)
                out = out + piece.primitive(tt) - piece.primitive(np.asarray(lo))
        return np.sign(t) * out if which == "f" else out

    # -- derived specs -------------------------------------------------------
    def with_eps(self, eps, xi0=None, crit_exp=None):
        return modify_eps(self, eps, xi0 if xi0 is not None else self.xi0, crit_exp)

    def without_modification(self):
        return replace(self, eps=None)

    @property
    def is_power_sum(self) -> bool:
        return self.func is None

    def positive_zeros(self, hi=None):
        """Sign changes of the untruncated ``f`` on ``(0, hi]``."""
        hi = hi if hi is not None else (self.zeta2 if self.zeta2 is not None else 1e4)
        return [z for z in _signed_power_roots(self._raw_f, 1e-9, hi) if z < hi * (1 - 1e-12)]

    def certify(self, dim: int, fp: FracParams):
        """Check the structural growth and sign conditions; raise ValidationError."""
        errs = self.violations(dim, fp)
        if errs:
            raise ValidationError(errs)

    def violations(self, dim: int, fp: FracParams) -> list:
        if not self.is_power_sum:
            return []
        errs = []
        qstar = fp.critical_exponent(dim) - 1.0
        for c, p in self.terms:
            # above a truncation level the growth of f is irrelevant
            if self.zeta2 is None and not p < qstar:
                errs.append(f"exponent {p:g} must be < 2*_s - 1 = {qstar:g}")
        lead_c, lead_p = min(self.terms, key=lambda cp: cp[1])
        if self.mass_case is MassCase.ZERO:
            lowest = [c for c, p in self.terms if p == lead_p]
            if sum(lowest) > 0 and lead_p < qstar:
                errs.append("zero mass needs the lowest-order term to be nonpositive (f1)")
        else:
            if lead_p < 1.0:
                errs.append("positive mass needs all exponents >= 1 so f(t)/t has a limit at 0 (F1)")
            c0 = sum(c for c, p in self.terms if p == 1.0)
            if not c0 < fp.a**fp.s:
                errs.append(f"lim f(t)/t = {c0:g} must be < a^s = {fp.a ** fp.s:g} (F1)")
        return errs


@dataclass(frozen=True)
class _Piece:
    lo: float
    hi: float
    sign: int
    kind: str  # "power" or "clamp"
    terms: tuple = ()
    inv_eps: float = 0.0
    qstar: float = 0.0

    def value(self, a):
        if self.kind == "clamp":
            return self.inv_eps * a**self.qstar
        return np.abs(_power_sum(self.terms, a))

    def primitive(self, a):
        a = np.asarray(a, dtype=float)
        if self.kind == "clamp":
            return self.inv_eps * a ** (self.qstar + 1.0) / (self.qstar + 1.0)
        return self.sign * _power_sum([(c / (p + 1.0), p + 1.0) for c, p in self.terms], a)


def _build_tables(spec: NonlinearitySpec):
    """Partition ``[0, inf)`` into intervals with closed-form branches."""
    if spec.func is not None:
        return ()
    terms = spec.terms
    top = spec.zeta2 if spec.zeta2 is not None else np.inf
    zeros = spec.positive_zeros(hi=top if np.isfinite(top) else None)
    edges = [0.0] + [z for z in zeros if z < top] + [top]
    pieces = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        if np.isfinite(hi):
            mid = 0.5 * (lo + hi)
        else:
            mid = 2.0 * lo + 1.0
        sign = 1 if float(spec._raw_f(mid)) > 0 else -1
        pieces.append(_Piece(lo, hi, sign, "power", terms))
    if spec.eps is not None and spec.xi0 is not None:
        pieces = _apply_clamp(pieces, spec)
    return tuple(pieces)


def _apply_clamp(pieces, spec):
    """Replace ``f_-`` on ``[0, xi0]`` by ``min(f_-, t^{q*} / eps)``."""
    xi0 = spec.xi0
    inv_eps = 1.0 / spec.eps
    q = spec.crit_exp
    out = []
    for pc in pieces:
        if pc.sign > 0 or pc.lo >= xi0:
            out.append(pc)
            continue
        hi = min(pc.hi, xi0)

        def diff(t, pc=pc):
            return np.abs(_power_sum(pc.terms, t)) - inv_eps * np.asarray(t, dtype=float) ** q

        lo_probe = max(pc.lo, 1e-12)
        cuts = [c for c in _signed_power_roots(diff, lo_probe, hi) if pc.lo < c < hi]
        bounds = [pc.lo] + cuts + [hi]
        for a, b in zip(bounds[:-1], bounds[1:]):
            mid = 0.5 * (a + b)
            if float(diff(mid)) > 0:
                out.append(_Piece(a, b, -1, "clamp", inv_eps=inv_eps, qstar=q))
            else:
                out.append(_Piece(a, b, -1, "power", pc.terms))
        if pc.hi > xi0:
            out.append(_Piece(xi0, pc.hi, -1, "power", pc.terms))
    return out


def _quad_primitive(func, t):
    from scipy.integrate import quad

    t = np.asarray(t, dtype=float)
    flat = np.abs(t).ravel()
    out = np.array([quad(lambda s: float(func(np.asarray(s))), 0.0, x, epsabs=1e-12, epsrel=1e-12, limit=200)[0]
                    for x in flat])
    return out.reshape(t.shape)


# -- module-level operations -------------------------------------------------

def f_eval(spec: NonlinearitySpec, t):
    return spec.f(t)


def F_eval(spec: NonlinearitySpec, t):
    return spec.F(t)


def split_pm(spec: NonlinearitySpec):
    """Callable views ``(f_plus, f_minus)`` with ``f = f_plus - f_minus``."""
    return spec.f_plus, spec.f_minus


def truncate_above(spec: NonlinearitySpec, zeta2: float, fp: Optional[FracParams] = None) -> NonlinearitySpec:
    """Set ``f = 0`` above the zero ``zeta2``, which must lie beyond zeta1."""
    if abs(float(spec._raw_f(zeta2))) > ZERO_TOL * max(1.0, spec._scale(zeta2)):
        raise NoZeroAtZeta(f"f({zeta2}) = {float(spec._raw_f(zeta2)):.3e} is not zero")
    try:
        z1 = find_zeta1(spec, fp, t_scan=zeta2)
    except ConditionF3Violated:
        raise NoZeroAtZeta(f"the primitive is nonpositive up to zeta2 = {zeta2}") from None
    if not zeta2 > z1:
        raise NoZeroAtZeta(f"zeta2 = {zeta2} must exceed zeta1 = {z1}")
    return replace(spec, zeta2=float(zeta2))


def modify_eps(spec: NonlinearitySpec, eps: float, xi0: Optional[float], crit_exp: Optional[float] = None,
               fp: Optional[FracParams] = None) -> NonlinearitySpec:
    """Clamp the negative branch near zero.

    With ``xi0=None`` the nonlinearity is in the case where ``f > 0`` on
    ``(0, zeta1)`` and the clamp is the identity.
    """
    q = crit_exp if crit_exp is not None else spec.crit_exp
    if xi0 is None:
        return replace(spec, eps=float(eps), xi0=None, crit_exp=q)
    if abs(float(spec._raw_f(xi0))) > 1e-8 * max(1.0, spec._scale(xi0)):
        raise BadCaseClassification(f"f(xi0) = {float(spec._raw_f(xi0)):.3e}; xi0 must be a zero of f")
    base = replace(spec, eps=None, xi0=None)
    if not (xi0 > 0.0 and _positive_beyond(base, xi0, fp)):
        raise BadCaseClassification(f"xi0 = {xi0} must lie below some zeta1 with F(zeta1) > 0")
    return replace(spec, eps=float(eps), xi0=float(xi0), crit_exp=q)


def _positive_beyond(spec, t0, fp, t_scan=10.0):
    ts = np.linspace(t0, max(t_scan, 2 * t0), 20001)[1:]
    return bool(np.any(_f3_profile(spec, fp)(ts) > 0))


def classify_case(spec: NonlinearitySpec, fp: Optional[FracParams] = None) -> Optional[float]:
    """Return the interior zero used by the clamp, or None when f > 0 below zeta1."""
    z1 = find_zeta1(replace(spec, eps=None, xi0=None), fp)
    zs = [z for z in spec.positive_zeros(hi=z1) if z < z1]
    return max(zs) if zs else None


def _f3_profile(spec, fp):
    if spec.mass_case is MassCase.POSITIVE:
        if fp is None:
            raise ValueError("positive mass needs FracParams to form F - a^s t^2 / 2")
        m = fp.a**fp.s
        return lambda t: spec.F(t) - 0.5 * m * np.asarray(t) ** 2
    return spec.F


def find_zeta1(spec: NonlinearitySpec, fp: Optional[FracParams] = None, t_scan: float = 10.0,
               samples: int = 10000) -> float:
    """Smallest point where the (mass-shifted) primitive turns positive."""
    prof = _f3_profile(spec, fp)
    ts = np.linspace(0.0, t_scan, samples + 1)[1:]
    vals = prof(ts)
    pos = np.nonzero(vals > 0)[0]
    if pos.size == 0:
        raise ConditionF3Violated(f"primitive is nonpositive on (0, {t_scan}]")
    i = int(pos[0])
    if i == 0:
        return float(ts[0])
    lo, hi = float(ts[i - 1]), float(ts[i])
    while hi - lo > 1e-10:
        mid = 0.5 * (lo + hi)
        if float(prof(mid)) > 0:
            hi = mid
        else:
            lo = mid
    return hi
