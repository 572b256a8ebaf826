"""Symmetry classes on the lattice, projections and rearrangement.

Rotation groups are represented by their grid-compatible subgroup: sign
flips of single axes and permutations of axes inside a block.  The block
classes split ``x = (x1, x2, x3)`` with ``x1, x2`` of the same size ``m``
and carry the character ``-1`` on the swap ``x1 <-> x2``.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import BoxTooSmall, IncompatibleGrid
from .spectral import Field, Grid

NORM_FLOOR = 1e-300


class SymmetryKind(enum.Enum):
    NONE = "none"
    RADIAL = "radial"
    BLOCK1 = "block1"
    BLOCK2 = "block2"


@dataclass(frozen=True)
class SymmetryClass:
    kind: SymmetryKind = SymmetryKind.RADIAL
    m: int = 0

    def __post_init__(self):
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", SymmetryKind(self.kind))
        if self.is_block and self.m < 1:
            raise ValueError("block classes need a block size m >= 1")

    @classmethod
    def parse(cls, text: str) -> "SymmetryClass":
        """``"radial"``, ``"none"``, ``"block1:2"`` or ``"block2:m2=2"``."""
        text = text.strip().strip('"').lower()
        if ":" not in text:
            return cls(SymmetryKind(text))
        kind, m = text.split(":", 1)
        m = m.split("=", 1)[-1]
        return cls(SymmetryKind(kind), int(m))

    def __str__(self):
        return self.kind.value if not self.is_block else f"{self.kind.value}:{self.m}"

    @property
    def is_block(self) -> bool:
        return self.kind in (SymmetryKind.BLOCK1, SymmetryKind.BLOCK2)

    def violations(self, dim: int) -> list:
        """Dimension arithmetic required by the class."""
        errs = []
        if self.kind is SymmetryKind.BLOCK1:
            if dim < 4:
                errs.append(f"block1 requires N >= 4, got N = {dim}")
            if self.m < 2:
                errs.append(f"block1 requires m1 >= 2, got m1 = {self.m}")
            if 2 * self.m > dim:
                errs.append(f"block1 requires 2*m1 <= N, got m1 = {self.m}, N = {dim}")
        elif self.kind is SymmetryKind.BLOCK2:
            rest = dim - 2 * self.m
            if rest < 0 or rest == 1:
                errs.append(f"block2 requires N-2*m2 = 0 or >= 2, got {rest}")
            elif rest >= 2 and not (dim == 4 or dim >= 6):
                errs.append(f"block2 requires N=4 or N>=6, got N = {dim}")
        return errs

    def blocks(self, dim: int):
        """Axis groups that are rotated independently, and whether each is flipped."""
        self.check(dim)
        if self.kind is SymmetryKind.NONE:
            return []
        if self.kind is SymmetryKind.RADIAL:
            return [tuple(range(dim))]
        m = self.m
        groups = [tuple(range(m)), tuple(range(m, 2 * m))]
        if self.kind is SymmetryKind.BLOCK2 and dim > 2 * m:
            groups.append(tuple(range(2 * m, dim)))
        return groups

    def check(self, dim: int):
        errs = self.violations(dim)
        if errs:
            raise IncompatibleGrid("; ".join(errs))


RADIAL = SymmetryClass(SymmetryKind.RADIAL)
NO_SYMMETRY = SymmetryClass(SymmetryKind.NONE)


def _flip(v: np.ndarray, axis: int) -> np.ndarray:
    # lattice reflection x -> -x, i.e. index j -> -j mod n
    return np.roll(np.flip(v, axis), 1, axis)


def _permute_axes(v: np.ndarray, perm) -> np.ndarray:
    lead = v.ndim - len(perm)
    return np.transpose(v, tuple(range(lead)) + tuple(lead + p for p in perm))


def block_swap(u: Field, sc: SymmetryClass) -> Field:
    """``u(x2, x1, x3)``."""
    N, m = u.grid.dim, sc.m
    if not sc.is_block:
        raise IncompatibleGrid("swap is only defined for block classes")
    sc.check(N)
    perm = list(range(m, 2 * m)) + list(range(m)) + list(range(2 * m, N))
    return u.with_values(_permute_axes(u.values, perm))


def _average_block(v: np.ndarray, axes: tuple, dim: int) -> np.ndarray:
    lead = v.ndim - dim
    for ax in axes:
        v = 0.5 * (v + _flip(v, lead + ax))
    perms = list(itertools.permutations(axes))
    if len(perms) > 1:
        acc = np.zeros_like(v)
        for p in perms:
            full = list(range(dim))
            for src, dst in zip(axes, p):
                full[src] = dst
            acc += _permute_axes(v, full)
        v = acc / len(perms)
    return v


def project(u: Field, sc: SymmetryClass) -> Field:
    """Orthogonal L2 projection onto the invariant subspace of ``sc``."""
    dim = u.grid.dim
    v = u.values
    for axes in sc.blocks(dim):
        v = _average_block(v, axes, dim)
    out = u.with_values(v)
    if sc.is_block:
        out = (out - block_swap(out, sc)) * 0.5
    return out


def antisymmetry_defect(u: Field, sc: SymmetryClass) -> float:
    """``||u o swap + u|| / ||u||``; zero exactly for swap-odd fields."""
    num = (block_swap(u, sc) + u).l2_norm()
    return num / max(u.l2_norm(), NORM_FLOOR) if num > 0 else 0.0


def radial_average(u: Field) -> Field:
    """Average over shells of lattice points with equal rounded ``|x| / h``."""
    bins = np.rint(np.sqrt(u.grid.radius_sq_index())).astype(np.int64).ravel()
    vals = u.values.ravel()
    sums = np.bincount(bins, weights=vals)
    counts = np.bincount(bins)
    means = sums / np.maximum(counts, 1)
    return u.with_values(means[bins])


def radial_defect(u: Field) -> float:
    norm = u.l2_norm()
    if norm == 0.0:
        return 0.0
    return (u - radial_average(u)).l2_norm() / norm


def schwarz_rearrange(u: Field) -> Field:
    """Symmetric decreasing rearrangement of ``|u|`` on the lattice.

    Lattice points are ordered by ``|x|`` with ties in row-major order;
    the values of ``|u|`` are placed on them in decreasing order.
    """
    order = np.argsort(u.grid.radius_sq_index().ravel(), kind="stable")
    vals = np.sort(np.abs(u.values.ravel()))[::-1]
    out = np.empty_like(vals)
    out[order] = vals
    return u.with_values(out)


def _smooth_cutoff(t: np.ndarray, r0: float, r1: float) -> np.ndarray:
    """C^1 function equal to 1 below ``r0`` and 0 above ``r1``."""
    z = np.clip((t - r0) / (r1 - r0), 0.0, 1.0)
    return 1.0 - z * z * (3.0 - 2.0 * z)


def _tent_profile(t: np.ndarray, R: float, height: float) -> np.ndarray:
    return height * np.clip(R + 1.0 - t, 0.0, 1.0)


def build_block_tent(grid: Grid, sc: SymmetryClass, R: float, zeta1: float, R_cut: float | None = None) -> Field:
    """Swap-odd plateau field ``phi(|x1|)phi(|x2|)phi(|x3|)(omega(|x1|) - omega(|x2|))``.

    ``omega`` equals ``zeta1`` up to radius ``R`` and falls linearly to 0 at
    ``R + 1``; ``phi`` is a C^1 cutoff from 1 at ``R_cut`` to 0 at ``R_cut + 1``.
    """
    if not sc.is_block:
        raise IncompatibleGrid("tent construction needs a block class")
    N, m = grid.dim, sc.m
    sc.check(N)
    R_cut = R + 1.0 if R_cut is None else R_cut
    if R_cut < R + 1.0:
        raise ValueError("R_cut must be at least R + 1")
    if R_cut + 1.0 >= 0.5 * grid.side:
        raise BoxTooSmall(f"cutoff radius {R_cut + 1.0} does not fit in half side {0.5 * grid.side}")
    xs = grid.coords()

    def block_norm(axes):
        if not axes:
            return np.zeros((1,) * N)
        return np.sqrt(sum(xs[a] ** 2 for a in axes))

    r1 = block_norm(range(m))
    r2 = block_norm(range(m, 2 * m))
    r3 = block_norm(range(2 * m, N))
    cut = (_smooth_cutoff(r1, R_cut, R_cut + 1.0) * _smooth_cutoff(r2, R_cut, R_cut + 1.0)
           * _smooth_cutoff(r3, R_cut, R_cut + 1.0))
    w = cut * (_tent_profile(r1, R, zeta1) - _tent_profile(r2, R, zeta1))
    return Field(grid, np.broadcast_to(w, grid.shape))


def choose_tent_radius(grid: Grid, sc: SymmetryClass, zeta1: float, potential, gaps=(1.0, 2.0, 3.0, 4.0)):
    """Smallest ``R`` on a lattice-spacing ladder with ``potential(w_R) > 0``.

    ``potential`` maps a Field to the integral that must be positive (``int F``
    for zero mass, ``int F - a^s/2 |u|^2`` for positive mass).  For each ``R``
    the cutoff gaps ``R_cut - R`` are tried in order.  Returns ``(R, R_cut, w_R)``.
    """
    h = grid.spacing
    R = h
    while R + min(gaps) + 1.0 < 0.5 * grid.side:
        for gap in gaps:
            if R + gap + 1.0 >= 0.5 * grid.side:
                break
            w = build_block_tent(grid, sc, R, zeta1, R + gap)
            if potential(w) > 0.0:
                return R, R + gap, w
        R += h
    raise BoxTooSmall("no tent radius inside the box makes the potential positive")


def group_order(sc: SymmetryClass, dim: int) -> int:
    """Size of the lattice group used for averaging (including the swap)."""
    order = 1
    for axes in sc.blocks(dim):
        order *= 2 ** len(axes) * math.factorial(len(axes))
    return order * (2 if sc.is_block else 1)
