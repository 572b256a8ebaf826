"""Energy, Pohozaev functional and the dilation-augmented energy ``J``.

``J(theta, u) = I(u(e^-theta .))`` is evaluated in closed form from the
shell power spectrum of ``u``:

    J = e^{N theta} [ 1/2 int (4 pi^2 e^{-2 theta} |xi|^2 + a)^s |Fu|^2 dxi
                      - int F(u) dx ].

Gradients are L2 Riesz representatives on the lattice of the grid that
carries ``u``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .nonlinearity import NonlinearitySpec
from .spectral import (
    TWO_PI_SQ,
    Field,
    FracParams,
    ShellPower,
    apply_fractional,
    apply_multiplier,
    shell_power,
    symbol,
)


@dataclass(frozen=True)
class AugmentedPoint:
    """A dilation parameter together with a field on its base grid."""

    theta: float
    u: Field

    def realize(self) -> Field:
        """The dilated field, represented exactly on a rescaled box."""
        return Field(self.u.grid.dilated(self.theta), self.u.values)


@dataclass(frozen=True)
class EnergyBreakdown:
    quad: float
    pot_plus: float
    pot_minus: float
    total: float

    @property
    def potential(self) -> float:
        """``int F(u) dx``."""
        return self.pot_plus - self.pot_minus


def potential_parts(u: Field, spec: NonlinearitySpec):
    """``(int F_+(u), int F_-(u))`` with any eps clamp or truncation applied."""
    g = u.grid
    return g.integrate(spec.F_plus(u.values)), g.integrate(spec.F_minus(u.values))


def potential(u: Field, spec: NonlinearitySpec) -> float:
    plus, minus = potential_parts(u, spec)
    return plus - minus


def energy(u: Field, spec: NonlinearitySpec, fp: FracParams) -> EnergyBreakdown:
    sp = shell_power(u)
    quad = 0.5 * sp.integrate(symbol(sp.xi_sq, fp))
    plus, minus = potential_parts(u, spec)
    return EnergyBreakdown(quad, plus, minus, quad - plus + minus)


class FiberModel:
    """``theta -> J(theta, u)`` and its derivatives for a fixed field.

    Holds the shell spectrum and the potential so that evaluating the ray
    costs only a sum over shells.
    """

    def __init__(self, dim: int, fp: FracParams, sp: ShellPower, pot: float):
        self.dim = dim
        self.fp = fp
        self.sp = sp
        self.pot = float(pot)
        keep = sp.power != 0.0
        self._xi = TWO_PI_SQ * sp.xi_sq[keep]
        self._w = sp.power[keep]

    @classmethod
    def of(cls, u: Field, spec: NonlinearitySpec, fp: FracParams) -> "FiberModel":
        return cls(u.grid.dim, fp, shell_power(u), potential(u, spec))

    def _m(self, theta):
        return np.exp(-2.0 * theta) * self._xi + self.fp.a

    def quad(self, theta: float) -> float:
        """``sum m_theta^s |Fu|^2`` without the ``e^{N theta}`` factor."""
        return float(np.sum(self._m(theta) ** self.fp.s * self._w))

    def value(self, theta: float) -> float:
        return float(np.exp(self.dim * theta)) * (0.5 * self.quad(theta) - self.pot)

    def derivative(self, theta: float) -> float:
        N, s, a = self.dim, self.fp.s, self.fp.a
        m = self._m(theta)
        main = 0.5 * (N - 2.0 * s) * float(np.sum(m**s * self._w))
        if a > 0.0:
            main += a * s * float(np.sum(m ** (s - 1.0) * self._w))
        return float(np.exp(N * theta)) * (main - N * self.pot)

    def second_derivative(self, theta: float) -> float:
        N, s, a = self.dim, self.fp.s, self.fp.a
        m = self._m(theta)
        # dm/dtheta = -2 (m - a) = -2 e^{-2 theta} |2 pi xi|^2
        dm = -2.0 * (m - a)
        safe = np.where(m > 0.0, m, 1.0)
        val = 0.5 * (N - 2.0 * s) * float(np.sum((N * m**s + s * dm * safe ** (s - 1.0)) * self._w))
        if a > 0.0:
            val += a * s * float(np.sum((N * m ** (s - 1.0) + (s - 1.0) * dm * m ** (s - 2.0)) * self._w))
        return float(np.exp(N * theta)) * (val - N * N * self.pot)

    def increment(self, theta0: float, theta1: float) -> float:
        """``J(theta1) - J(theta0)`` evaluated without cancellation."""
        N, s = self.dim, self.fp.s
        dt = theta1 - theta0
        m0 = self._m(theta0)
        pos = m0 > 0.0
        ratio = np.zeros_like(m0)
        ratio[pos] = self._xi[pos] * np.exp(-2.0 * theta0) * np.expm1(-2.0 * dt) / m0[pos]
        growth = np.zeros_like(m0)
        growth[pos] = m0[pos] ** s * np.expm1(N * dt + s * np.log1p(ratio[pos]))
        e0 = float(np.exp(N * theta0))
        return e0 * (0.5 * float(np.sum(growth * self._w)) - self.pot * float(np.expm1(N * dt)))


def augmented_energy(p: AugmentedPoint, spec: NonlinearitySpec, fp: FracParams) -> float:
    return FiberModel.of(p.u, spec, fp).value(p.theta)


def pohozaev(u: Field, spec: NonlinearitySpec, fp: FracParams) -> float:
    """``(N-2s)/2 ||u||^2 + a s int (a + 4pi^2|xi|^2)^{s-1} |Fu|^2 - N int F(u)``.

    The middle term is dropped when ``a = 0`` (its prefactor vanishes).
    """
    N, s, a = u.grid.dim, fp.s, fp.a
    sp = shell_power(u)
    val = 0.5 * (N - 2.0 * s) * sp.integrate(symbol(sp.xi_sq, fp))
    if a > 0.0:
        val += a * s * sp.integrate((a + TWO_PI_SQ * sp.xi_sq) ** (s - 1.0))
    return val - N * potential(u, spec)


def augmented_gradient(p: AugmentedPoint, spec: NonlinearitySpec, fp: FracParams):
    """``(d_theta J, grad_u J)`` at ``(theta, u)``.

    ``grad_u J = e^{N theta} ((4 pi^2 e^{-2 theta}|xi|^2 + a)^s u - f(u))``.
    """
    u, theta = p.u, p.theta
    g = u.grid
    scale = float(np.exp(g.dim * theta))
    mult = symbol(g.xi_sq_rfft(), fp, theta)
    du = scale * (apply_multiplier(u.values, g, mult) - spec.f(u.values))
    dtheta = FiberModel.of(u, spec, fp).derivative(theta)
    return dtheta, Field(g, du)


def residual_field(u: Field, spec: NonlinearitySpec, fp: FracParams) -> Field:
    return Field(u.grid, apply_fractional(u, fp).values - spec.f(u.values))


def pde_residual_norm(u: Field, spec: NonlinearitySpec, fp: FracParams) -> float:
    """L2 norm of ``(-Delta + a)^s u - f(u)``."""
    return residual_field(u, spec, fp).l2_norm()
