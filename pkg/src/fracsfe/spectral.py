"""Periodic-box discretization and Fourier-multiplier operators.

The box is ``[-L/2, L/2)^N`` sampled at ``x_j = -L/2 + j h`` with ``h = L/n``.
The continuum transform ``Fu(xi) = int exp(-2 pi i x.xi) u(x) dx`` is
approximated at the lattice frequencies ``xi_k = k / L`` by ``h^N`` times the
DFT, with the phase factor coming from the box offset ``-L/2``.  With this
normalization every integral over ``x`` or ``xi`` becomes a plain lattice
sum: ``int g dx ~ h^N sum g_j`` and ``int G dxi ~ L^-N sum G_k``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import NonRealResult, SupportOverflow

TWO_PI_SQ = 4.0 * np.pi**2
NONREAL_TOL = 1e-10


@dataclass(frozen=True)
class FracParams:
    """Exponent ``s`` and mass ``a`` of ``(-Delta + a)^s``."""

    s: float
    a: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.s <= 1.0):
            raise ValueError(f"s must lie in (0, 1], got {self.s}")
        if not (self.a >= 0.0) or not np.isfinite(self.a):
            raise ValueError(f"a must be a nonnegative real, got {self.a}")

    def critical_exponent(self, dim: int) -> float:
        """``2*_s = 2N / (N - 2s)``; infinite when ``N <= 2s``."""
        if dim <= 2 * self.s:
            return np.inf
        return 2.0 * dim / (dim - 2.0 * self.s)


@dataclass(frozen=True)
class Grid:
    dim: int
    side: float
    pts: int

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim}")
        if int(self.pts) != self.pts or self.pts < 4 or self.pts % 2:
            raise ValueError(f"pts must be an even integer >= 4, got {self.pts}")
        if not (self.side > 0.0) or not np.isfinite(self.side):
            raise ValueError(f"side must be a positive real, got {self.side}")

    @property
    def spacing(self) -> float:
        return self.side / self.pts

    @property
    def shape(self) -> tuple:
        return (self.pts,) * self.dim

    @property
    def size(self) -> int:
        return self.pts**self.dim

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    def axis(self) -> np.ndarray:
        return (np.arange(self.pts) - self.pts // 2) * self.spacing

    def coords(self) -> list:
        """Broadcastable coordinate arrays, one per axis."""
        x = self.axis()
        out = []
        for i in range(self.dim):
            shp = [1] * self.dim
            shp[i] = self.pts
            out.append(x.reshape(shp))
        return out

    def radius_sq_index(self) -> np.ndarray:
        """Integer ``|x|^2 / h^2`` on the lattice (exact, tie-friendly)."""
        j = np.arange(self.pts) - self.pts // 2
        r2 = np.zeros(self.shape, dtype=np.int64)
        for i in range(self.dim):
            shp = [1] * self.dim
            shp[i] = self.pts
            r2 = r2 + (j**2).reshape(shp)
        return r2

    def radius(self) -> np.ndarray:
        return np.sqrt(self.radius_sq_index()) * self.spacing

    def dilated(self, theta: float) -> "Grid":
        """Box of side ``e^theta L`` with the same samples.

        A field with unchanged values on the dilated grid is exactly the
        dilation ``u(e^-theta x)`` of the field on this grid.
        """
        return Grid(self.dim, self.side * float(np.exp(theta)), self.pts)

    def integrate(self, values: np.ndarray) -> float:
        return float(np.sum(np.ravel(values))) * self.cell_volume

    @cached_property
    def _rfft_shells(self):
        n = self.pts
        k_full = np.rint(np.fft.fftfreq(n) * n).astype(np.int64)
        k_half = np.arange(n // 2 + 1, dtype=np.int64)
        ksq = np.zeros(self.shape[:-1] + (n // 2 + 1,), dtype=np.int64)
        for i in range(self.dim):
            k = k_half if i == self.dim - 1 else k_full
            shp = [1] * self.dim
            shp[i] = k.size
            ksq = ksq + (k**2).reshape(shp)
        # multiplicity of each rfft coefficient in the full spectrum
        mult = np.full(n // 2 + 1, 2.0)
        mult[0] = 1.0
        mult[-1] = 1.0
        weight = np.broadcast_to(mult, ksq.shape)
        shells, inverse = np.unique(ksq.ravel(), return_inverse=True)
        return shells, inverse, np.ascontiguousarray(weight).ravel()

    def shell_ksq(self) -> np.ndarray:
        """Distinct integer values of ``|k|^2`` on the frequency lattice."""
        return self._rfft_shells[0]

    def xi_sq_rfft(self) -> np.ndarray:
        """``|xi|^2`` on the rfft layout."""
        shells, inverse, _ = self._rfft_shells
        shape = self.shape[:-1] + (self.pts // 2 + 1,)
        return (shells[inverse] / self.side**2).reshape(shape)

    def xi_sq_full(self) -> np.ndarray:
        """``|xi|^2`` on the full fftn layout."""
        f = np.fft.fftfreq(self.pts, d=self.spacing)
        xs = np.zeros(self.shape)
        for i in range(self.dim):
            shp = [1] * self.dim
            shp[i] = self.pts
            xs = xs + (f**2).reshape(shp)
        return xs


@dataclass(frozen=True, eq=False)
class Field:
    """Real samples of ``u`` on a grid, stored with shape ``grid.shape``."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.size != self.grid.size:
            raise ValueError(f"field has {v.size} values, grid needs {self.grid.size}")
        v = v.reshape(self.grid.shape)
        if not np.all(np.isfinite(v)):
            raise ValueError("field values must be finite")
        object.__setattr__(self, "values", v)

    @classmethod
    def zeros(cls, grid: Grid) -> "Field":
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def from_function(cls, grid: Grid, func) -> "Field":
        return cls(grid, np.broadcast_to(func(*grid.coords()), grid.shape).copy())

    def with_values(self, values) -> "Field":
        return Field(self.grid, values)

    def l2_norm_sq(self) -> float:
        return self.grid.integrate(self.values**2)

    def l2_norm(self) -> float:
        return float(np.sqrt(self.l2_norm_sq()))

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def inner(self, other: "Field") -> float:
        return self.grid.integrate(self.values * other.values)

    def __add__(self, other):
        return Field(self.grid, self.values + other.values)

    def __sub__(self, other):
        return Field(self.grid, self.values - other.values)

    def __mul__(self, c):
        return Field(self.grid, self.values * c)

    __rmul__ = __mul__

    def __neg__(self):
        return Field(self.grid, -self.values)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Continuum-normalized Fourier coefficients in numpy fft order."""

    grid: Grid
    coeffs: np.ndarray = field(repr=False)


def _box_phase(grid: Grid) -> np.ndarray:
    # exp(-2 pi i x0 xi_k) with x0 = -L/2 equals (-1)^k per axis
    k = np.rint(np.fft.fftfreq(grid.pts) * grid.pts).astype(np.int64)
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    ph = np.ones(grid.shape)
    for i in range(grid.dim):
        shp = [1] * grid.dim
        shp[i] = grid.pts
        ph = ph * sign.reshape(shp)
    return ph


def forward_transform(u: Field) -> Spectrum:
    g = u.grid
    coeffs = np.fft.fftn(u.values) * (_box_phase(g) * g.cell_volume)
    return Spectrum(g, coeffs)


def inverse_transform(U: Spectrum) -> Field:
    """Back to a real field; raises NonRealResult for asymmetric spectra."""
    g = U.grid
    raw = np.fft.ifftn(U.coeffs * (_box_phase(g) / g.cell_volume))
    scale = max(float(np.max(np.abs(raw.real))), np.finfo(float).tiny)
    resid = float(np.max(np.abs(raw.imag)))
    if resid > NONREAL_TOL * scale and resid > np.finfo(float).tiny:
        raise NonRealResult(f"imaginary residue {resid:.3e} exceeds {NONREAL_TOL:g} relative")
    return Field(g, raw.real)


def symbol(xi_sq, fp: FracParams, theta: float = 0.0):
    """``(4 pi^2 e^{-2 theta} |xi|^2 + a)^s``."""
    return (TWO_PI_SQ * np.exp(-2.0 * theta) * xi_sq + fp.a) ** fp.s


def apply_multiplier(values: np.ndarray, grid: Grid, mult: np.ndarray) -> np.ndarray:
    """Apply a real, even Fourier multiplier given on the rfft layout.

    ``values`` may carry extra leading batch axes.
    """
    axes = tuple(range(-grid.dim, 0))
    spec = np.fft.rfftn(values, axes=axes)
    return np.fft.irfftn(spec * mult, s=grid.shape, axes=axes)


def apply_fractional(u: Field, fp: FracParams) -> Field:
    """``(-Delta + a)^s u`` as a Fourier multiplier."""
    mult = symbol(u.grid.xi_sq_rfft(), fp)
    return Field(u.grid, apply_multiplier(u.values, u.grid, mult))


@dataclass(frozen=True)
class ShellPower:
    """``|Fu|^2`` summed over shells of constant integer ``|k|^2``.

    ``power[q]`` is the continuum measure of the shell, so that
    ``int g(|xi|^2) |Fu|^2 dxi ~ sum_q g(ksq[q] / L^2) power[q]``.
    """

    grid: Grid
    xi_sq: np.ndarray
    power: np.ndarray

    def integrate(self, weights: np.ndarray) -> float:
        return float(np.sum(weights * self.power))


def shell_power_from_rfft(grid: Grid, su: np.ndarray, sv: np.ndarray | None = None) -> ShellPower:
    """Shell sums of ``Re(su conj(sv))`` for raw rfftn coefficients of the samples."""
    shells, inverse, weight = grid._rfft_shells
    if sv is None:
        dens = su.real**2 + su.imag**2
    else:
        dens = su.real * sv.real + su.imag * sv.imag
    power = np.bincount(inverse, weights=dens.ravel() * weight, minlength=shells.size)
    power *= grid.cell_volume**2 / grid.side**grid.dim
    return ShellPower(grid, shells / grid.side**2, power)


def shell_power(u: Field) -> ShellPower:
    return shell_power_from_rfft(u.grid, np.fft.rfftn(u.values))


def cross_shell_power(u: Field, v: Field) -> ShellPower:
    """Shell sums of ``Re(Fu conj(Fv))``."""
    return shell_power_from_rfft(u.grid, np.fft.rfftn(u.values), np.fft.rfftn(v.values))


def ds_seminorm_sq(u: Field, s: float) -> float:
    """``int (4 pi^2 |xi|^2)^s |Fu|^2 dxi``."""
    sp = shell_power(u)
    return sp.integrate((TWO_PI_SQ * sp.xi_sq) ** s)


def hsa_norm_sq(u: Field, fp: FracParams) -> float:
    sp = shell_power(u)
    return sp.integrate(symbol(sp.xi_sq, fp))


def scaled_hsa_norm_sq(u: Field, fp: FracParams, theta: float) -> float:
    """``||T_theta u||_{s,a}^2`` in closed form, without resampling.

    Equals ``e^{N theta} int (4 pi^2 e^{-2 theta} |xi|^2 + a)^s |Fu|^2 dxi``.
    """
    sp = shell_power(u)
    return float(np.exp(u.grid.dim * theta)) * sp.integrate(symbol(sp.xi_sq, fp, theta))


def outer_shell_mask(grid: Grid, fraction: float = 0.1) -> np.ndarray:
    """Points whose sup-norm coordinate lies in the outer ``fraction`` of the side."""
    lim = (0.5 - fraction / 2.0) * grid.side
    mask = np.zeros(grid.shape, dtype=bool)
    for x in grid.coords():
        mask = mask | (np.abs(x) >= lim - 1e-12 * grid.side)
    return mask


def decays_in_shell(u: Field, tol: float = 1e-8) -> bool:
    peak = u.sup_norm()
    if peak == 0.0:
        return True
    return float(np.max(np.abs(u.values[outer_shell_mask(u.grid)]))) <= tol * peak


def dilate_resample(u: Field, theta: float, theta_max: float = 1.0, decay_tol: float = 1e-8) -> Field:
    """Trigonometric interpolation of ``u(e^-theta x)`` on the same grid.

    Sample points falling outside the box are set to zero, which is exact
    up to ``decay_tol`` for fields that decay inside the outer shell.  The
    unmatched Nyquist row is dropped so the interpolant stays real.
    """
    if abs(theta) > theta_max:
        raise SupportOverflow(f"|theta| = {abs(theta):.3g} exceeds theta_max = {theta_max:g}")
    if not decays_in_shell(u, decay_tol):
        raise SupportOverflow("field does not decay below tolerance in the outer shell")
    if theta == 0.0:
        return Field(u.grid, u.values.copy())
    g = u.grid
    n, L = g.pts, g.side
    coeffs = np.fft.fftn(u.values)
    y = np.exp(-theta) * g.axis()
    f = np.fft.fftfreq(n, d=g.spacing)
    mat = np.exp(2j * np.pi * np.outer(y + L / 2.0, f)) / n
    mat[:, n // 2] = 0.0
    mat[(y < -L / 2.0) | (y >= L / 2.0), :] = 0.0
    out = coeffs
    for ax in range(g.dim):
        out = np.moveaxis(np.tensordot(mat, out, axes=([1], [ax])), 0, ax)
    res = Field(g, out.real)
    if theta > 0 and not decays_in_shell(res, decay_tol):
        raise SupportOverflow("dilated field reaches the outer shell; enlarge the box")
    return res
