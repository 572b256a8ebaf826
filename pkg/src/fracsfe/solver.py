"""Scaling-augmented descent for mountain-pass and nodal solutions.

The ground-state solver minimizes the fibered energy

    Phi(u) = max_theta J(theta, u)

over fields on a fixed base grid.  By the envelope theorem the gradient of
``Phi`` is ``grad_u J(theta*(u), u)``, so a critical point of ``Phi`` is a
critical point of ``J`` in both variables: the field realized on the box of
side ``e^{theta*} L`` solves the discrete equation and has zero Pohozaev
functional on that box.

Sign-changing starts use an amplitude fiber instead: each nodal part of ``u``
is rescaled to maximize ``J``, and ``(theta, u)`` descend jointly.

Energy decreases are measured with cancellation-free increments so that the
line search keeps working when the gradient is near round-off level.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq
from scipy.special import genlaguerre

from .errors import (
    NoBracket,
    NoPositivePotential,
    NotConverged,
    StepUnderflow,
    SupportOverflow,
    ValidationError,
)
from .functionals import (
    AugmentedPoint,
    EnergyBreakdown,
    FiberModel,
    energy,
    pde_residual_norm,
    pohozaev,
    potential,
)
from .nonlinearity import MassCase, NonlinearitySpec, classify_case, find_zeta1, modify_eps
from .spectral import Field, FracParams, Grid, dilate_resample, hsa_norm_sq, shell_power_from_rfft, symbol
from .symmetry import RADIAL, SymmetryClass, antisymmetry_defect, project, radial_defect

log = logging.getLogger(__name__)

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(4)
_GL_NODES = 0.5 * (_GL_NODES + 1.0)
_GL_WEIGHTS = 0.5 * _GL_WEIGHTS


@dataclass(frozen=True)
class SolverConfig:
    step: float = 1e-2
    backtrack: float = 0.5
    growth: float = 1.1
    max_step: float = 4.0
    armijo: float = 1e-4
    tol_grad: float = 1e-8
    tol_pohozaev: float = 1e-6
    tol_gap: float = 1e-8
    max_iter: int = 50000
    eps_schedule: tuple = (1.0, 0.3, 0.1, 0.03, 0.01)
    theta_bracket: tuple = (-5.0, 5.0)
    theta_scan: int = 201
    seed: int = 0
    step_floor: float = 1e-15
    dedup_tol: float = 1e-3
    amplitude_range: tuple = (0.5, 8.0)
    theta_max: float = 1.0
    recenter: float = 0.25
    box_iter: int = 30
    strategy: str = "auto"

    def __post_init__(self):
        object.__setattr__(self, "eps_schedule", tuple(float(e) for e in self.eps_schedule))
        object.__setattr__(self, "theta_bracket", tuple(float(t) for t in self.theta_bracket))
        errs = self.violations()
        if errs:
            raise ValidationError(errs)

    def violations(self) -> list:
        errs = []
        for name in ("step", "tol_grad", "tol_pohozaev", "tol_gap", "step_floor", "dedup_tol"):
            if not getattr(self, name) > 0:
                errs.append(f"{name} must be positive")
        if not 0 < self.backtrack < 1:
            errs.append("backtrack must lie in (0, 1)")
        if not self.growth >= 1:
            errs.append("growth must be >= 1")
        if not self.max_iter >= 1:
            errs.append("max_iter must be >= 1")
        eps = self.eps_schedule
        if any(not 0 < e <= 1 for e in eps):
            errs.append("eps_schedule entries must lie in (0, 1]")
        if any(b >= a for a, b in zip(eps, eps[1:])):
            errs.append("eps_schedule must be strictly decreasing")
        if self.strategy not in ("auto", "fibered", "box"):
            errs.append("strategy must be auto, fibered or box")
        lo, hi = self.theta_bracket
        if not lo < 0 < hi:
            errs.append("theta_bracket must contain 0 in its interior")
        return errs


@dataclass(frozen=True)
class SolutionReport:
    u: Field
    energy: EnergyBreakdown
    pohozaev: float
    pde_residual: float
    fibering_gap: float
    theta_star: float
    sup_norm: float
    symmetry: SymmetryClass
    defects: tuple
    iterations: int
    converged: bool
    l2_norm: float = 0.0
    norm_sq: float = 0.0
    eps: float | None = None
    nodes: int = 0
    least_energy: bool = False
    history: list = field(default_factory=list, repr=False, compare=False)

    def certification(self) -> dict:
        """Numbers that depend only on the field, for reports and re-verification."""
        return {
            "energy": self.energy.total,
            "quad": self.energy.quad,
            "pot_plus": self.energy.pot_plus,
            "pot_minus": self.energy.pot_minus,
            "pohozaev": self.pohozaev,
            "pde_residual": self.pde_residual,
            "fibering_gap": self.fibering_gap,
            "theta_star": self.theta_star,
            "sup_norm": self.sup_norm,
            "l2_norm": self.l2_norm,
            "norm_sq": self.norm_sq,
            "radial_defect": self.defects[0],
            "antisymmetry_defect": self.defects[1],
        }


# -- fibering -----------------------------------------------------------------
def _fiber_max(fm: FiberModel, fp: FracParams, bracket, scan: int = 201) -> float:
    if not fm.pot > 0.0:
        raise NoPositivePotential(f"int F(u) = {fm.pot:.6g} is not positive")
    if fp.a == 0.0:
        A = fm.quad(0.0)
        N, s = fm.dim, fp.s
        if not A > 0.0:
            raise NoBracket("zero quadratic part: the dilation ray has no maximum")
        return float(np.log((N - 2.0 * s) * A / (2.0 * N * fm.pot)) / (2.0 * s))
    lo, hi = bracket
    ts = np.linspace(lo, hi, scan)
    ds = np.array([fm.derivative(t) for t in ts])
    idx = np.nonzero((ds[:-1] > 0) & (ds[1:] <= 0))[0]
    if idx.size == 0:
        raise NoBracket(f"d_theta J does not change sign from + to - on [{lo}, {hi}]")
    roots = [brentq(fm.derivative, ts[i], ts[i + 1], xtol=1e-14, rtol=4 * np.finfo(float).eps) for i in idx]
    if len(roots) > 1:
        log.info("dilation ray has %d local maxima; taking the global one", len(roots))
    return float(max(roots, key=fm.value))


def optimal_dilation(u: Field, spec: NonlinearitySpec, fp: FracParams,
                     bracket: tuple = (-5.0, 5.0)) -> float:
    """Maximizer of ``theta -> J(theta, u)``.

    Closed form for zero mass; for ``a > 0`` the largest of the maxima located
    by bracketed root finding on ``d_theta J``.
    """
    return _fiber_max(FiberModel.of(u, spec, fp), fp, bracket)


def fibering_gap(u: Field, spec: NonlinearitySpec, fp: FracParams, bracket=(-5.0, 5.0)):
    """``(max_theta J(theta, u) - J(0, u), theta*)``.

    The ray of the zero field is identically zero; its gap and maximizer are 0.
    """
    if not np.any(u.values):
        return 0.0, 0.0
    fm = FiberModel.of(u, spec, fp)
    theta = _fiber_max(fm, fp, bracket)
    return fm.increment(0.0, theta), theta


# -- energy landscape on a fixed grid ----------------------------------------
class _State:
    __slots__ = ("values", "rfft", "sp", "pot", "fiber")

    def __init__(self, values, rfft, sp, pot, fiber):
        self.values = values
        self.rfft = rfft
        self.sp = sp
        self.pot = pot
        self.fiber = fiber


def _precond_shift(spec: NonlinearitySpec, fp: FracParams) -> float:
    lin = sum(c for c, p in spec.terms if p == 1.0) if spec.is_power_sum else 0.0
    shift = max(-lin, 0.0)
    if shift == 0.0 and fp.a == 0.0:
        shift = 1.0
    return shift


class _Landscape:
    """``J`` on a fixed base grid with cached transforms."""

    def __init__(self, grid: Grid, spec: NonlinearitySpec, fp: FracParams, sc: SymmetryClass, cfg: SolverConfig):
        self.grid, self.spec, self.fp, self.sc, self.cfg = grid, spec, fp, sc, cfg
        self.N = grid.dim
        self.axes = tuple(range(grid.dim))
        self.xi_sq = grid.xi_sq_rfft()
        self.shift = _precond_shift(spec, fp)

    def state(self, values: np.ndarray) -> _State:
        rfft = np.fft.rfftn(values)
        sp = shell_power_from_rfft(self.grid, rfft)
        pot = self.grid.integrate(self.spec.F(values))
        return _State(values, rfft, sp, pot, FiberModel(self.N, self.fp, sp, pot))

    def theta_star(self, st: _State) -> float:
        return _fiber_max(st.fiber, self.fp, self.cfg.theta_bracket, self.cfg.theta_scan)

    def grad(self, st: _State, theta: float) -> np.ndarray:
        mult = symbol(self.xi_sq, self.fp, theta)
        au = np.fft.irfftn(st.rfft * mult, s=self.grid.shape, axes=self.axes)
        return float(np.exp(self.N * theta)) * (au - self.spec.f(st.values))

    def precondition(self, g: np.ndarray, theta: float) -> np.ndarray:
        mult = float(np.exp(self.N * theta)) * (symbol(self.xi_sq, self.fp, theta) + self.shift)
        return np.fft.irfftn(np.fft.rfftn(g) / mult, s=self.grid.shape, axes=self.axes)

    def project(self, values: np.ndarray) -> np.ndarray:
        return project(Field(self.grid, values), self.sc).values

    def inner(self, a: np.ndarray, b: np.ndarray) -> float:
        return float(np.sum(a * b)) * self.grid.cell_volume

    def potential_increment(self, u0: np.ndarray, u1: np.ndarray) -> float:
        """``int F(u1) - F(u0)`` as a Gauss rule along the segment."""
        du = u1 - u0
        acc = np.zeros_like(du)
        for t, w in zip(_GL_NODES, _GL_WEIGHTS):
            acc += w * self.spec.f(u0 + t * du)
        return self.grid.integrate(acc * du)

    def increment(self, s0: _State, th0: float, s1: _State, th1: float) -> float:
        """``J(th1, u1) - J(th0, u0)`` without cancellation."""
        ray = s1.fiber.increment(th0, th1)
        diff = np.fft.rfftn(s1.values - s0.values)
        dsp = shell_power_from_rfft(self.grid, s1.rfft + s0.rfft, diff)
        quad = float(np.sum(symbol(dsp.xi_sq, self.fp, th0) * dsp.power))
        e0 = float(np.exp(self.N * th0))
        return ray + e0 * (0.5 * quad - self.potential_increment(s0.values, s1.values))

    def realized(self, values: np.ndarray, theta: float) -> Field:
        return Field(self.grid.dilated(theta), values)

    def metrics(self, st: _State, theta: float, g: np.ndarray):
        """``(|residual|, |u|, P, |u|_{s,a}^2)`` of the field realized at ``theta``."""
        e = float(np.exp(self.N * theta))
        vol = self.grid.cell_volume * e
        resid = float(np.sqrt(np.sum((g / e) ** 2) * vol))
        unorm = float(np.sqrt(np.sum(st.values**2) * vol))
        norm_sq = e * float(np.sum(symbol(st.sp.xi_sq, self.fp, theta) * st.sp.power))
        return resid, unorm, st.fiber.derivative(theta), norm_sq


# -- fibered descent ----------------------------------------------------------
class _FiberedDescent:
    """Preconditioned gradient descent on ``Phi(u) = max_theta J(theta, u)``."""

    def __init__(self, land: _Landscape, values: np.ndarray, step: float):
        self.land = land
        self.values = land.project(np.array(values, dtype=float))
        self.state = land.state(self.values)
        self.theta = land.theta_star(self.state)
        self.J = self.state.fiber.value(self.theta)
        self.g = land.grad(self.state, self.theta)
        self.tau = step
        self.last_step = 0.0

    def gradient_norm(self) -> float:
        return float(np.sqrt(self.land.inner(self.g, self.g)))

    def step(self) -> bool:
        """One line-searched step; False when the gradient vanishes."""
        land, cfg = self.land, self.land.cfg
        d = -land.precondition(self.g, self.theta)
        slope = land.inner(self.g, d)
        if not slope < 0.0:
            return False
        tau = self.tau
        while True:
            trial = land.project(self.values + tau * d)
            st = land.state(trial)
            try:
                th = land.theta_star(st)
                dJ = land.increment(self.state, self.theta, st, th)
            except (NoPositivePotential, NoBracket):
                dJ = np.inf
            if dJ <= cfg.armijo * tau * slope:
                break
            tau *= cfg.backtrack
            if tau < cfg.step_floor:
                raise StepUnderflow(f"step fell below {cfg.step_floor:g}")
        self.values, self.state, self.theta = trial, st, th
        self.J = st.fiber.value(th)
        self.g = land.grad(st, th)
        self.last_step = tau
        self.tau = min(tau * cfg.growth, cfg.max_step)
        return True

    def metrics(self):
        return self.land.metrics(self.state, self.theta, self.g)


def descent_step(p: AugmentedPoint, spec: NonlinearitySpec, fp: FracParams, sc: SymmetryClass,
                 cfg: SolverConfig = SolverConfig()) -> AugmentedPoint:
    """One fibered descent step from ``p``.

    The dilation is first moved to the maximizer of ``J`` along the ray of
    ``u``; then ``u`` takes a backtracked preconditioned gradient step and
    the dilation is moved to the maximizer for the new field.  ``J`` at the
    returned point is below ``J`` at the re-centered input.
    """
    land = _Landscape(p.u.grid, spec, fp, sc, cfg)
    run = _FiberedDescent(land, p.u.values, cfg.step)
    if run.gradient_norm() == 0.0 or not run.step():
        return p
    return AugmentedPoint(run.theta, Field(p.u.grid, run.values))


# -- certification ------------------------------------------------------------
def certify(u: Field, spec: NonlinearitySpec, fp: FracParams, sc: SymmetryClass, cfg: SolverConfig,
            iterations: int = 0, history=None, **extra) -> SolutionReport:
    """Recompute every certificate of ``u`` from the functionals."""
    en = energy(u, spec, fp)
    P = pohozaev(u, spec, fp)
    resid = pde_residual_norm(u, spec, fp)
    try:
        gap, th = fibering_gap(u, spec, fp, cfg.theta_bracket)
    except (NoPositivePotential, NoBracket):
        gap, th = float("inf"), float("nan")
    l2 = u.l2_norm()
    nsq = hsa_norm_sq(u, fp)
    defects = (radial_defect(u), antisymmetry_defect(u, sc) if sc.is_block else 0.0)
    ok = (resid <= cfg.tol_grad * l2 and abs(P) <= cfg.tol_pohozaev * (1.0 + nsq)
          and gap <= cfg.tol_gap * (1.0 + abs(en.total)) and l2 > 0.0)
    return SolutionReport(u, en, P, resid, gap, th, u.sup_norm(), sc, defects, iterations, bool(ok),
                          l2, nsq, history=list(history or []), **extra)


# -- initialization -------------------------------------------------------------
def _f3_integral(u: Field, spec: NonlinearitySpec, fp: FracParams) -> float:
    pot = potential(u, spec)
    if spec.mass_case is MassCase.POSITIVE:
        pot -= 0.5 * fp.a**fp.s * u.l2_norm_sq()
    return pot


def prepare_init(init: Field, spec: NonlinearitySpec, fp: FracParams, sc: SymmetryClass,
                 cfg: SolverConfig) -> Field:
    """Project, rescale the amplitude until the dilation ray has a maximum, and re-center.

    Multipliers from ``cfg.amplitude_range`` are tried in increasing order
    starting from 1.  Re-centering resamples ``u(e^-theta* x)`` when the field
    decays inside the box so that the solve starts near ``theta = 0``.
    """
    u = project(init, sc)
    lo, hi = cfg.amplitude_range
    ladder = [1.0] + [c for c in np.geomspace(lo, hi, 13) if c != 1.0]
    for c in sorted(ladder, key=lambda c: (c < 1.0, abs(np.log(c)))):
        if _f3_integral(u * c, spec, fp) > 0.0:
            u = u * c
            break
    else:
        raise NoPositivePotential(f"no amplitude in [{lo}, {hi}] makes the potential positive")
    for _ in range(3):
        try:
            th = optimal_dilation(u, spec, fp, cfg.theta_bracket)
        except NoBracket:
            break
        th = float(np.clip(th, -cfg.theta_max, cfg.theta_max))
        if abs(th) < 1e-3:
            break
        try:
            u = project(dilate_resample(u, th, cfg.theta_max, decay_tol=1e-6), sc)
        except SupportOverflow:
            break
    return u


# -- fixed-box amplitude descent ---------------------------------------------------
def nodal_seed(grid: Grid, nodes: int, width: float, amplitude: float = 1.0) -> Field:
    """Radial seed with exactly ``nodes`` sign changes: a Laguerre polynomial times a Gaussian."""
    r2 = grid.radius() ** 2 / width**2
    poly = genlaguerre(nodes, 0.5 * grid.dim - 1.0)
    vals = poly(r2) * np.exp(-0.5 * r2)
    vals = vals / np.max(np.abs(vals))
    return Field(grid, amplitude * vals)


def _radial_parts(u: Field, nodes: int) -> np.ndarray:
    """Label each lattice point by the nodal annulus it belongs to.

    Annuli are cut at the sign changes of the radial profile.  A point whose
    sign disagrees with its annulus (the lattice is only nearly radial close
    to a nodal line) joins the neighbouring annulus across the nearer cut, so
    every part keeps one sign and scaling a part leaves ``u`` continuous.
    """
    rho = np.sqrt(u.grid.radius_sq_index())
    bins = np.rint(rho).astype(np.int64)
    if nodes == 0:
        return np.zeros(bins.shape, dtype=np.int64)
    prof = np.bincount(bins.ravel(), weights=u.values.ravel()) / np.maximum(np.bincount(bins.ravel()), 1)
    peak = np.max(np.abs(prof))
    signif = np.nonzero(np.abs(prof) > 1e-6 * peak)[0]
    cuts = []
    for a, b in zip(signif[:-1], signif[1:]):
        if prof[a] * prof[b] < 0:
            cuts.append(0.5 * (a + b))
            if len(cuts) == nodes:
                break
    if len(cuts) < nodes:
        raise NoBracket(f"profile has {len(cuts)} sign changes, expected {nodes}")
    cuts = np.asarray(cuts)
    labels = np.searchsorted(cuts, rho, side="right")
    part_sign = np.sign(prof[signif[0]]) * (-1.0) ** labels
    wrong = np.sign(u.values) * part_sign < 0
    inner_gap = np.abs(rho - cuts[np.maximum(labels - 1, 0)])
    outer_gap = np.abs(cuts[np.minimum(labels, nodes - 1)] - rho)
    go_in = (labels == nodes) | ((labels > 0) & (inner_gap < outer_gap))
    return np.where(wrong, np.where(go_in, labels - 1, labels + 1), labels)


def _first_peak(vals, default: int) -> int:
    """Index of the first interior local maximum of a sampled curve, else ``default``."""
    v = np.asarray(vals)
    peaks = np.nonzero((v[1:-1] >= v[:-2]) & (v[1:-1] > v[2:]))[0]
    return int(peaks[0] + 1) if peaks.size else default


class _AmplitudeDescent:
    """Descent in ``u`` on ``max_alpha J(theta, sum_i alpha_i u_i)`` with ``theta`` held fixed.

    The parts ``u_i`` are the restrictions of ``u`` to the annuli between
    the sign changes of its radial profile.  After each step the optimal
    amplitudes are absorbed into ``u``, so the gradient of the reduced
    functional is the plain ``grad_u J``.  Steps follow preconditioned
    nonlinear conjugate gradients: nodal profiles have a soft mode (the
    position of each ring) on which plain gradient steps crawl.
    """

    def __init__(self, land: _Landscape, values: np.ndarray, theta: float, nodes: int, step: float):
        self.land = land
        self.nodes = nodes
        self.theta = theta
        self.values = land.project(np.array(values, dtype=float))
        self._repartition()
        self.values = self._fit(self.values)
        self.state = land.state(self.values)
        self._refresh()
        self.tau = step
        self.last_step = 0.0
        self.prev = None

    def _repartition(self):
        labels = _radial_parts(Field(self.land.grid, self.values), self.nodes)
        self.masks = [labels == i for i in range(self.nodes + 1)]

    def _refresh(self):
        self.J = self.state.fiber.value(self.theta)
        self.g = self.land.grad(self.state, self.theta)

    def _fit(self, values):
        land, theta = self.land, self.theta
        parts = [np.where(m, values, 0.0) for m in self.masks]
        rf = [np.fft.rfftn(p) for p in parts]
        k = len(parts)
        e = float(np.exp(land.N * theta))
        Q = np.empty((k, k))
        for i in range(k):
            for j in range(i, k):
                sp = shell_power_from_rfft(land.grid, rf[i], rf[j])
                Q[i, j] = Q[j, i] = e * float(np.sum(symbol(sp.xi_sq, land.fp, theta) * sp.power))
        sub = [values[m] for m in self.masks]
        scale = land.grid.cell_volume * e
        f, F = land.spec.f, land.spec.F

        def grad(al):
            return Q @ al - scale * np.array([np.sum(f(a * v) * v) for a, v in zip(al, sub)])

        def value(al):
            return 0.5 * al @ Q @ al - scale * sum(np.sum(F(a * v)) for a, v in zip(al, sub))

        def hessian(al, gr):
            H = Q.copy()
            for i in range(k):
                h = 1e-6 * max(abs(al[i]), 1.0)
                up, dn = al.copy(), al.copy()
                up[i] += h
                dn[i] -= h
                H[i, i] = (grad(up)[i] - grad(dn)[i]) / (2.0 * h)
            return H

        alpha = np.ones(k)
        if np.any(np.linalg.eigvalsh(hessian(alpha, grad(alpha))) >= 0.0):
            # outside the concave region: coarse coordinate scans first
            ladder = np.geomspace(0.05, 20.0, 81)
            one = int(np.argmin(np.abs(np.log(ladder))))
            for _ in range(2):
                for i in range(k):
                    trials = np.tile(alpha, (ladder.size, 1))
                    trials[:, i] = alpha[i] * ladder
                    alpha = trials[_first_peak([value(t) for t in trials], one)]
        for _ in range(50):
            gr = grad(alpha)
            H = hessian(alpha, gr)
            if np.any(np.linalg.eigvalsh(H) >= 0.0):
                break
            delta = np.linalg.solve(H, -gr)
            lam = 1.0
            while np.any(alpha + lam * delta <= 0.0) and lam > 1e-6:
                lam *= 0.5
            alpha = alpha + lam * delta
            if np.max(np.abs(lam * delta)) < 1e-14:
                break
        return np.sum([a * p for a, p in zip(alpha, parts)], axis=0)

    def _direction(self):
        """Preconditioned Polak-Ribiere direction, restarted whenever it fails to descend."""
        land = self.land
        pg = land.precondition(self.g, self.theta)
        d = -pg
        if self.prev is not None:
            g0, pg0, d0 = self.prev
            beta = max(0.0, land.inner(self.g - g0, pg) / land.inner(g0, pg0))
            d = -pg + beta * d0
            if not land.inner(self.g, d) < 0.0:
                d = -pg
        return pg, d

    def step(self) -> bool:
        land, cfg = self.land, self.land.cfg
        pg, d = self._direction()
        slope = land.inner(self.g, d)
        if not slope < 0.0:
            return False
        tau = self.tau
        while True:
            trial = self._fit(land.project(self.values + tau * d))
            st = land.state(trial)
            dJ = land.increment(self.state, self.theta, st, self.theta)
            if dJ <= cfg.armijo * tau * slope:
                break
            tau *= cfg.backtrack
            if tau < cfg.step_floor:
                if self.prev is not None:
                    self.prev = None
                    return self.step()
                raise StepUnderflow(f"step fell below {cfg.step_floor:g}")
        self.prev = (self.g, pg, d)
        self.values, self.state = trial, st
        self._refresh()
        self.last_step = tau
        self.tau = min(tau * cfg.growth, cfg.max_step)
        self._repartition()
        return True

    def metrics(self):
        return self.land.metrics(self.state, self.theta, self.g)


# -- drivers -------------------------------------------------------------------
_BUDGET = "budget"


def _iterate(run, cfg: SolverConfig, history: list, it0: int, budget: int, pohozaev: bool = True):
    """Step ``run`` until its certificates hold.

    Returns ``(iterations, reason)`` with ``reason`` None on success,
    ``_BUDGET`` when ``budget`` steps were taken, or a failure message.
    """
    it = 0
    while True:
        resid, unorm, P, nsq = run.metrics()
        history.append((it0 + it, run.J, resid, P, run.theta, run.last_step))
        ok = resid <= cfg.tol_grad * unorm
        if pohozaev:
            ok = ok and abs(P) <= cfg.tol_pohozaev * (1.0 + nsq)
        if ok:
            return it, None
        if it >= budget:
            return it, _BUDGET
        try:
            if not run.step():
                return it, "stationary point without certificates"
        except StepUnderflow as exc:
            return it, str(exc)
        it += 1


def _budget_message(cfg):
    return f"iteration budget {cfg.max_iter} exhausted"


def _fibered_solve(land: _Landscape, values: np.ndarray, cfg: SolverConfig, history: list):
    """Fibered descent; large early drifts of the dilation are resampled back into the field.

    A resampled field is kept only if its fibered energy is not above the
    current one, so the recorded energies stay nonincreasing.
    """
    run = _FiberedDescent(land, values, cfg.step)
    total = 0
    recenter = True
    while True:
        chunk = min(cfg.max_iter - total, 25)
        it, reason = _iterate(run, cfg, history, total, chunk)
        total += it
        if reason is None:
            return run, total, None
        if reason != _BUDGET:
            return run, total, reason
        if total >= cfg.max_iter:
            return run, total, _budget_message(cfg)
        resid, unorm, _, _ = run.metrics()
        if recenter and abs(run.theta) > cfg.recenter and resid > 1e-3 * unorm:
            try:
                moved = dilate_resample(Field(land.grid, run.values), run.theta, cfg.theta_max, decay_tol=1e-4)
            except SupportOverflow:
                continue
            try:
                fresh = _FiberedDescent(land, moved.values, run.tau)
            except (NoPositivePotential, NoBracket):
                continue
            if fresh.J <= run.J:
                run = fresh
            else:
                recenter = False


def _box_search(land: _Landscape, values: np.ndarray, nodes: int, cfg: SolverConfig, history: list,
                theta0: float | None = None):
    """Solve at fixed dilation, then adjust the dilation by a secant search until the
    optimal dilation of the realized field is zero (equivalently ``P = 0``)."""
    total = 0

    def inner(vals, theta, step):
        nonlocal total
        run = _AmplitudeDescent(land, vals, theta, nodes, step)
        it, reason = _iterate(run, cfg, history, total, cfg.max_iter - total, pohozaev=False)
        total += it
        return run, (_budget_message(cfg) if reason == _BUDGET else reason)

    if theta0 is None:
        try:
            theta0 = land.theta_star(land.state(land.project(values)))
        except (NoPositivePotential, NoBracket):
            theta0 = 0.0
    run, reason = inner(values, theta0, cfg.step)
    pts = []
    for _ in range(cfg.box_iter):
        if reason is not None:
            return run, total, reason
        _, _, P, nsq = run.metrics()
        if abs(P) <= 0.1 * cfg.tol_pohozaev * (1.0 + nsq):
            return run, total, None
        try:
            off = land.theta_star(run.state) - run.theta
        except (NoPositivePotential, NoBracket) as exc:
            return run, total, str(exc)
        pts.append((run.theta, off))
        if len(pts) == 1 or pts[-1][1] == pts[-2][1]:
            new = run.theta + off
        else:
            (t0, o0), (t1, o1) = pts[-2], pts[-1]
            new = t1 - o1 * (t1 - t0) / (o1 - o0)
        new = float(np.clip(new, run.theta - 0.5, run.theta + 0.5))
        run, reason = inner(run.values, new, max(run.tau, cfg.step))
    return run, total, "dilation search did not settle the Pohozaev functional"


def _finish(land, run, total, reason, spec, fp, sc, cfg, history, **extra) -> SolutionReport:
    report = certify(land.realized(run.values, run.theta), spec, fp, sc, cfg, total, history, **extra)
    if not report.converged:
        raise NotConverged(reason or "certificates not met", report)
    return report


def _strategy(fp: FracParams, cfg: SolverConfig) -> str:
    if cfg.strategy != "auto":
        return cfg.strategy
    return "fibered" if fp.a > 0.0 else "box"


def solve_ground_state(init: Field, spec: NonlinearitySpec, fp: FracParams, sc: SymmetryClass = RADIAL,
                       cfg: SolverConfig = SolverConfig(), prepared: bool = False, **extra) -> SolutionReport:
    """Mountain-pass solution from ``init``.

    With positive mass the fibered energy ``max_theta J`` is minimized
    directly.  With zero mass the slowly decaying tails make that energy
    drift toward ever smaller boxes, so the field is solved at a fixed
    dilation and the dilation is updated until the realized field is its
    own fibering maximizer.  Returns a certified report; raises NotConverged
    (carrying the best report) otherwise.
    """
    u0 = init if prepared else prepare_init(init, spec, fp, sc, cfg)
    land = _Landscape(u0.grid, spec, fp, sc, cfg)
    history = []
    if _strategy(fp, cfg) == "fibered":
        run, total, reason = _fibered_solve(land, u0.values, cfg, history)
    else:
        run, total, reason = _box_search(land, u0.values, 0, cfg, history)
    return _finish(land, run, total, reason, spec, fp, sc, cfg, history, **extra)


def solve_nodal(init: Field, nodes: int, spec: NonlinearitySpec, fp: FracParams, sc: SymmetryClass = RADIAL,
                cfg: SolverConfig = SolverConfig(), theta0: float | None = None) -> SolutionReport:
    """Radial solution with ``nodes`` sign changes, from a seed with that many.

    ``theta0`` is the dilation of the first fixed-box solve; by default the
    optimal dilation of the seed.
    """
    u0 = project(init, sc)
    land = _Landscape(u0.grid, spec, fp, sc, cfg)
    history = []
    run, total, reason = _box_search(land, u0.values, nodes, cfg, history, theta0)
    return _finish(land, run, total, reason, spec, fp, sc, cfg, history, nodes=nodes)


# -- epsilon continuation ------------------------------------------------------------
def solve_with_continuation(init: Field, spec: NonlinearitySpec, fp: FracParams, sc: SymmetryClass = RADIAL,
                            cfg: SolverConfig = SolverConfig()) -> list:
    """Warm-started solves along ``cfg.eps_schedule`` followed by the unmodified problem.

    When ``f > 0`` below its first positive-primitive point the clamp is the
    identity and a single solve is returned.
    """
    base = spec.without_modification()
    xi0 = classify_case(base, fp) if base.mass_case is MassCase.ZERO else None
    if xi0 is None:
        return [solve_ground_state(init, base, fp, sc, cfg)]
    crit = fp.critical_exponent(init.grid.dim) - 1.0
    reports = []
    u = init
    prepared = False
    stages = [(e, modify_eps(base, e, xi0, crit, fp)) for e in cfg.eps_schedule] + [(None, base)]
    for e, stage in stages:
        rep = solve_ground_state(u, stage, fp, sc, cfg, prepared=prepared, eps=e)
        reports.append(rep)
        u = rep.u
        prepared = True
    return reports


# -- multi-start ---------------------------------------------------------------
def field_distance(u: Field, v: Field) -> float:
    """Relative L2 distance between ``u`` and ``+-v`` after mapping ``v`` onto ``u``'s box."""
    vv = v.values
    if u.grid != v.grid:
        moved = Field(u.grid, v.values)
        try:
            vv = dilate_resample(moved, float(np.log(v.grid.side / u.grid.side)), decay_tol=1e-4).values
        except SupportOverflow:
            pass
    diff = min(np.linalg.norm(u.values - vv), np.linalg.norm(u.values + vv))
    return float(diff / max(np.linalg.norm(u.values), np.finfo(float).tiny))


def multi_start_search(k: int, grid: Grid, spec: NonlinearitySpec, fp: FracParams, sc: SymmetryClass = RADIAL,
                       cfg: SolverConfig = SolverConfig(), width: float | None = None) -> list:
    """Solve from ``k`` radial seeds with ``0, 1, ..., k-1`` nodes and keep distinct certified solutions.

    Reports are sorted by energy; the lowest converged one is flagged
    ``least_energy``.  Failed starts are logged and dropped.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    width = width if width is not None else grid.side / 16.0
    rng = np.random.default_rng(cfg.seed)
    reports = []
    for nodes in range(k):
        seed = nodal_seed(grid, nodes, width * (1.0 + 0.5 * nodes))
        seed = seed * (1.0 + 0.01 * rng.standard_normal())
        try:
            if nodes == 0:
                rep = solve_ground_state(seed, spec, fp, sc, cfg)
            else:
                amp = prepare_amplitude(seed, spec, fp, cfg)
                rep = solve_nodal(amp, nodes, spec, fp, sc, cfg)
        except (NotConverged, NoPositivePotential, NoBracket, StepUnderflow) as exc:
            log.warning("start with %d nodes dropped: %s", nodes, exc)
            continue
        if any(field_distance(r.u, rep.u) < cfg.dedup_tol for r in reports):
            log.info("start with %d nodes reproduced an earlier solution", nodes)
            continue
        reports.append(rep)
    reports.sort(key=lambda r: r.energy.total)
    if reports:
        reports[0] = replace(reports[0], least_energy=True)
    return reports


def prepare_amplitude(init: Field, spec: NonlinearitySpec, fp: FracParams, cfg: SolverConfig) -> Field:
    lo, hi = cfg.amplitude_range
    for c in [1.0] + list(np.geomspace(lo, hi, 13)):
        if _f3_integral(init * c, spec, fp) > 0.0:
            return init * c
    raise NoPositivePotential(f"no amplitude in [{lo}, {hi}] makes the potential positive")


def default_zeta1(spec: NonlinearitySpec, fp: FracParams) -> float:
    return find_zeta1(spec.without_modification(), fp if spec.mass_case is MassCase.POSITIVE else None)
