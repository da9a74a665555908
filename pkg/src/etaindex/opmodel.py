"""Model self-adjoint operators on the circle.

Two spectral backings are supported:

* ``LatticeSpectrumModel`` -- an exact symbolic spectrum: scaled shifted
  integer lattices ``c (Z + t)`` composed with a signed power map, plus finite
  removed/added exception multisets.  Exact tails make zeta-type
  regularization closed-form.
* ``DenseHermitian`` -- a truncated matrix discretization.  Supports spectral
  flow and relative indices but (deliberately) not eta/zeta regularization.

Offsets live in ``(0, 1]``, with the integer lattice represented by ``t = 1``,
so "0 is an eigenvalue" is a structural fact rather than a float test.
Truncation windows are symmetric ``[-W, W]`` in the lattice variable, i.e.
before the power map, which keeps symmetric-tail cancellations exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DiscontinuousCurve,
    LoopMismatch,
    MatrixBackingUnsupported,
    UnsupportedBacking,
)
from .linalg import DenseHermitian, Spectrum, eigh

LOOP_TOL = 1e-9
VALUE_MATCH_TOL = 1e-12


def frac_star(t: float) -> float:
    """Reduce t mod 1 into (0, 1]; integers map to 1."""
    f = t - np.floor(t)
    return 1.0 if f == 0.0 else float(f)


@dataclass(frozen=True)
class LatticeSpectrumModel:
    """Spectrum ``sgn(mu) |mu|^p`` over lattice points ``mu in c (Z + t_j)``.

    ``definite`` selects the sign map: 0 keeps the lattice sign, +1 yields
    ``|mu|^p`` (nonnegative spectrum), -1 yields ``-|mu|^p``.  ``removed`` and
    ``added`` are finite eigenvalue multisets applied after the sign map.
    """

    scale: float
    offsets: tuple[float, ...]
    power: int = 1
    removed: tuple[float, ...] = ()
    added: tuple[float, ...] = ()
    definite: int = 0

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("lattice scale must be positive")
        if self.power < 1:
            raise ValueError("power must be a positive integer")
        if self.definite not in (-1, 0, 1):
            raise ValueError("definite must be -1, 0 or +1")
        offs = tuple(float(t) for t in self.offsets)
        if not offs:
            raise ValueError("at least one offset required")
        if any(not (0.0 < t <= 1.0) for t in offs):
            raise ValueError("offsets must lie in (0, 1]")
        object.__setattr__(self, "offsets", offs)
        object.__setattr__(self, "removed", tuple(float(v) for v in self.removed))
        object.__setattr__(self, "added", tuple(float(v) for v in self.added))

    # -- structure ---------------------------------------------------------

    def _sign_map(self, mu: float) -> float:
        mag = abs(mu) ** self.power
        if self.definite == 0:
            return float(np.sign(mu)) * mag if mu != 0.0 else 0.0
        return self.definite * mag

    def kernel_dim(self) -> int:
        """Exact multiplicity of the eigenvalue 0."""
        k = sum(1 for t in self.offsets if t == 1.0)
        k -= sum(1 for v in self.removed if v == 0.0)
        k += sum(1 for v in self.added if v == 0.0)
        if k < 0:
            raise ValueError("removed zeros exceed the lattice kernel")
        return k

    def enumerate(self, window: float) -> list[float]:
        """All eigenvalues whose lattice variable satisfies |mu| <= window.

        Added exceptions are included when they fall inside the mapped bound
        ``window**power``; every removed value inside the window must match a
        generated eigenvalue.
        """
        if window <= 0:
            raise ValueError("window must be positive")
        values: list[float] = []
        for t in self.offsets:
            m_lo = int(np.ceil(-window / self.scale - t - 1))
            m_hi = int(np.floor(window / self.scale - t + 1))
            for m in range(m_lo, m_hi + 1):
                mu = self.scale * (m + t)
                if abs(mu) <= window * (1 + 1e-15):
                    values.append(self._sign_map(mu))
        bound = window ** self.power
        for r in self.removed:
            if abs(r) > bound:
                continue
            tol = VALUE_MATCH_TOL * max(1.0, abs(r))
            for i, v in enumerate(values):
                if abs(v - r) <= tol:
                    del values[i]
                    break
            else:
                raise UnsupportedBacking(
                    f"removed value {r!r} is not a generated lattice eigenvalue"
                )
        values.extend(v for v in self.added if abs(v) <= bound)
        values.sort()
        return values

    def spectrum(self, window: float) -> Spectrum:
        return Spectrum(tuple(self.enumerate(window)), source="lattice-truncation")


@dataclass(frozen=True)
class OperatorMeta:
    """Order/dimension bookkeeping used by parity-sensitive invariants."""

    order: int = 1
    base_dimension: int = 1
    parity_class: str = "none"  # "even" | "odd" | "none"
    rstar_invariant: bool = False

    def parity_condition_holds(self) -> bool:
        return (self.order + self.base_dimension) % 2 == 1


@dataclass(frozen=True)
class ModelOperator:
    """A self-adjoint model operator with exactly one spectral backing."""

    lattice: LatticeSpectrumModel | None = None
    matrix: DenseHermitian | None = None
    meta: OperatorMeta = field(default_factory=OperatorMeta)

    def __post_init__(self):
        if (self.lattice is None) == (self.matrix is None):
            raise ValueError("exactly one of lattice/matrix backing must be present")

    @property
    def is_lattice(self) -> bool:
        return self.lattice is not None

    def require_lattice(self) -> LatticeSpectrumModel:
        if self.lattice is None:
            raise MatrixBackingUnsupported(
                "operation needs an exact lattice spectrum; matrix truncations "
                "do not determine spectral tails"
            )
        return self.lattice

    def spectrum(self, window: float = 0.0) -> Spectrum:
        if self.matrix is not None:
            return eigh(self.matrix).spectrum
        return self.require_lattice().spectrum(window)


@dataclass(frozen=True)
class CoverConfig:
    """An n-sheeted covering of the circle; trivial means n disjoint copies."""

    sheets: int
    trivial: bool = False

    def __post_init__(self):
        if self.sheets < 1:
            raise ValueError("sheets must be >= 1")


# --------------------------------------------------------------------------
# constructors and transforms
# --------------------------------------------------------------------------

def lattice_operator(c: float, t: float, p: int = 1) -> ModelOperator:
    """Operator with spectrum ``sgn(mu)|mu|^p`` over ``mu in c (Z + t)``.

    ``t`` is reduced mod 1 into ``(0, 1]``; for p = 1 this is the first-order
    model ``-i d/dphi + t`` on the unit-spacing circle, whose spectrum is the
    shifted lattice ``c (Z + t)``.
    """
    model = LatticeSpectrumModel(scale=c, offsets=(frac_star(t),), power=p)
    meta = OperatorMeta(
        order=p,
        base_dimension=1,
        parity_class="even" if p % 2 == 0 else "odd",
        rstar_invariant=True,
    )
    return ModelOperator(lattice=model, meta=meta)


def positive_power_operator(a: ModelOperator, negate: bool = False) -> ModelOperator:
    """Replace the signed spectrum by ``|mu|^p`` (times -1 when negate).

    The kernel is unchanged; only the sign map off the kernel flips.
    """
    model = a.require_lattice()
    return replace_backing(a, replace(model, definite=-1 if negate else 1))


def pullback_cover(a0: ModelOperator, cover: CoverConfig) -> ModelOperator:
    """Inverse image of a first-order lattice operator under an n-cover.

    The base spectrum ``c (Z + t)`` pulls back to ``(c/n)(Z + n t)``, i.e. the
    refined set ``{c (m/n + t)}``.  For trivial covers use
    :func:`pushforward_trivial` instead (n disjoint copies).
    """
    model = a0.require_lattice()
    if len(model.offsets) != 1 or model.power != 1 or model.definite != 0:
        raise UnsupportedBacking("pullback needs a single-offset first-order lattice")
    if model.removed or model.added:
        raise UnsupportedBacking("pullback does not transport finite exceptions")
    n = cover.sheets
    new = LatticeSpectrumModel(
        scale=model.scale / n,
        offsets=(frac_star(n * model.offsets[0]),),
        power=1,
    )
    return replace_backing(a0, new)


def pushforward_trivial(a0: ModelOperator, n: int) -> ModelOperator:
    """Direct sum of n copies: every multiplicity is scaled by n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    model = a0.require_lattice()
    new = replace(
        model,
        offsets=model.offsets * n,
        removed=model.removed * n,
        added=model.added * n,
    )
    return replace_backing(a0, new)


def twist_flat(a0: ModelOperator, holonomy: float) -> ModelOperator:
    """Tensor with the flat line bundle of holonomy exp(2 pi i t).

    For first-order lattice models the twist shifts every offset by t
    (reduced into (0, 1]).
    """
    if not (0.0 <= holonomy < 1.0):
        raise ValueError("holonomy parameter must lie in [0, 1)")
    model = a0.require_lattice()
    if model.power != 1 or model.definite != 0:
        raise UnsupportedBacking("flat twist is defined for first-order lattice models")
    if model.removed or model.added:
        raise UnsupportedBacking("flat twist does not transport finite exceptions")
    if holonomy == 0.0:
        return a0
    new = replace(model, offsets=tuple(frac_star(t + holonomy) for t in model.offsets))
    return replace_backing(a0, new)


def negate_operator(a: ModelOperator) -> ModelOperator:
    """Spectrum of -A; lattice offsets map t -> 1 - t (t = 1 fixed)."""
    model = a.require_lattice()
    if model.definite != 0:
        new = replace(
            model,
            definite=-model.definite,
            removed=tuple(-v for v in model.removed),
            added=tuple(-v for v in model.added),
        )
    else:
        new = replace(
            model,
            offsets=tuple(1.0 if t == 1.0 else 1.0 - t for t in model.offsets),
            removed=tuple(-v for v in model.removed),
            added=tuple(-v for v in model.added),
        )
    return replace_backing(a, new)


def replace_backing(a: ModelOperator, model: LatticeSpectrumModel) -> ModelOperator:
    order = model.power
    meta = replace(
        a.meta,
        order=order,
        parity_class="even" if order % 2 == 0 else "odd",
    )
    return ModelOperator(lattice=model, meta=meta)


# --------------------------------------------------------------------------
# parametrized families
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralFamily:
    """A continuous path of self-adjoint operators over a parameter grid.

    Backed either by labeled piecewise-linear eigenvalue curves or by
    Hermitian matrices at the grid points (entries interpolated linearly in
    between).  ``loop = True`` asserts the endpoint spectra agree as
    multisets; for windowed curve families the comparison is restricted to
    the overlap of the endpoint value ranges, so curves may relabel by
    sliding out of the window.
    """

    grid: tuple[float, ...]
    curves: tuple[tuple[float, ...], ...] | None = None
    matrices: tuple[DenseHermitian, ...] | None = None
    loop: bool = False

    def __post_init__(self):
        if (self.curves is None) == (self.matrices is None):
            raise ValueError("exactly one of curves/matrices must be given")

    @property
    def domain(self) -> tuple[float, float]:
        return self.grid[0], self.grid[-1]

    @property
    def is_curve_backed(self) -> bool:
        return self.curves is not None

    # -- evaluation ---------------------------------------------------------

    def _bracket(self, tau: float) -> tuple[int, float]:
        g = self.grid
        if not (g[0] - 1e-12 <= tau <= g[-1] + 1e-12):
            raise ValueError(f"parameter {tau} outside family domain {self.domain}")
        tau = min(max(tau, g[0]), g[-1])
        i = int(np.searchsorted(g, tau, side="right")) - 1
        i = min(max(i, 0), len(g) - 2)
        span = g[i + 1] - g[i]
        w = 0.0 if span == 0 else (tau - g[i]) / span
        return i, w

    def curve_values(self, tau: float) -> np.ndarray:
        if self.curves is None:
            raise UnsupportedBacking("family is not curve-backed")
        i, w = self._bracket(tau)
        arr = np.asarray(self.curves)
        return (1.0 - w) * arr[:, i] + w * arr[:, i + 1]

    def matrix_at(self, tau: float) -> DenseHermitian:
        if self.matrices is None:
            raise UnsupportedBacking("family is not matrix-backed")
        i, w = self._bracket(tau)
        m = (1.0 - w) * self.matrices[i].entries + w * self.matrices[i + 1].entries
        return DenseHermitian(m)

    def spectrum_at(self, tau: float) -> np.ndarray:
        """Sorted eigenvalues at parameter tau."""
        if self.curves is not None:
            return np.sort(self.curve_values(tau))
        return np.asarray(eigh(self.matrix_at(tau)).spectrum.eigenvalues)


def _loop_multiset_gap(start: np.ndarray, end: np.ndarray) -> float:
    lo = max(start.min(), end.min()) - LOOP_TOL
    hi = min(start.max(), end.max()) + LOOP_TOL
    a = np.sort(start[(start >= lo) & (start <= hi)])
    b = np.sort(end[(end >= lo) & (end <= hi)])
    if len(a) != len(b):
        return np.inf
    if len(a) == 0:
        return 0.0
    return float(np.max(np.abs(a - b)))


def family_from_curves(
    grid: Sequence[float],
    curves: Sequence[Sequence[float]],
    loop: bool = False,
) -> SpectralFamily:
    """Build a curve-backed family; validates monotone grid and loop closure."""
    g = tuple(float(t) for t in grid)
    if len(g) < 2:
        raise ValueError("grid needs at least two points")
    if any(g[i + 1] <= g[i] for i in range(len(g) - 1)):
        raise DiscontinuousCurve(
            "grid must be strictly increasing; repeated parameter values "
            "encode a jump discontinuity"
        )
    cs = tuple(tuple(float(v) for v in c) for c in curves)
    if not cs or any(len(c) != len(g) for c in cs):
        raise ValueError("each curve must provide one value per grid point")
    fam = SpectralFamily(grid=g, curves=cs, loop=loop)
    if loop:
        gap = _loop_multiset_gap(fam.spectrum_at(g[0]), fam.spectrum_at(g[-1]))
        if gap > LOOP_TOL:
            raise LoopMismatch(f"endpoint spectra differ by {gap:.3e} on the shared window")
    return fam


def family_from_matrices(
    grid: Sequence[float],
    matrices: Sequence[DenseHermitian | np.ndarray],
    loop: bool = False,
) -> SpectralFamily:
    g = tuple(float(t) for t in grid)
    if len(g) < 2 or any(g[i + 1] <= g[i] for i in range(len(g) - 1)):
        raise DiscontinuousCurve("grid must be strictly increasing with >= 2 points")
    ms = tuple(m if isinstance(m, DenseHermitian) else DenseHermitian(np.asarray(m)) for m in matrices)
    if len(ms) != len(g):
        raise ValueError("one matrix per grid point required")
    if len({m.dim for m in ms}) != 1:
        raise ValueError("all matrices must share one dimension")
    fam = SpectralFamily(grid=g, matrices=ms, loop=loop)
    if loop:
        gap = _loop_multiset_gap(fam.spectrum_at(g[0]), fam.spectrum_at(g[-1]))
        if gap > LOOP_TOL:
            raise LoopMismatch(f"endpoint spectra differ by {gap:.3e}")
    return fam


def lattice_shift_family(
    window: int,
    shift: Callable[[float], float] | None = None,
    grid: Sequence[float] | None = None,
    loop: bool = False,
) -> SpectralFamily:
    """Curves ``n + shift(tau)`` for n in [-window, window] (default shift tau)."""
    g = tuple(grid) if grid is not None else tuple(np.linspace(0.0, 1.0, 9))
    f = shift if shift is not None else (lambda tau: tau)
    curves = [[n + f(t) for t in g] for n in range(-window, window + 1)]
    return family_from_curves(g, curves, loop=loop)
