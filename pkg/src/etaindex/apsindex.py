"""Per-mode index of spectral boundary value problems on a cylinder.

A product-type first-order problem on ``S^1 x [0, T]`` separates into scalar
mode problems ``u' + mu_n(t) u = f`` with spectral boundary conditions.  Each
mode contributes ``1 - k_n``, where ``k_n`` counts its active boundary
constraints: the near end (t = 0) constrains modes in the range of the
nonnegative spectral projection (``mu_n(0) >= 0``), the far end is
orientation-reversed, so its tangential operator is ``-A(T)`` and the
constraint reads ``-mu_n(T) >= 0``.  Zero membership at both ends follows the
nonnegative-projection convention; all three choices are explicit,
reproducible config.

No differential equation is ever solved: the index is exact counting, which
is what makes the spectral-flow comparison and the mod-n defect checks
bit-exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .defaults import GAP_TOL, KERNEL_TOL, MODE_WINDOW
from .errors import NotCoverCompatible, TailViolation, UnsupportedBacking
from .etazeta import eta_invariant
from .opmodel import (
    CoverConfig,
    LatticeSpectrumModel,
    ModelOperator,
    SpectralFamily,
    family_from_curves,
    frac_star,
    negate_operator,
    pullback_cover,
    pushforward_trivial,
)
from .specflow import crossing_count_oracle, spectral_flow

_TAIL_CHECK = 3  # edge modes that must be singly constrained


@dataclass(frozen=True)
class ApsConventions:
    """Boundary-projection conventions for the two cylinder ends.

    The far end carries the orientation-reversed tangential operator when
    ``far_flip`` is set.  Both ends include the zero eigenvalue by default,
    matching the nonnegative spectral projection at each boundary component;
    this is also what reproduces the doubly constrained zero mode (index -1)
    at the crossing parameter of the standard cylinder family.
    """

    near_includes_zero: bool = True
    far_flip: bool = True
    far_includes_zero: bool = True


@dataclass(frozen=True)
class ModeProblem:
    """Coefficient curves mu_n(t) on [0, T] plus boundary conventions.

    ``labels`` identify the modes (lattice integers for cylinder problems
    built from lattice slices).  Slice metadata records the structural
    origin of problems built from a lattice profile, which is what the
    cover-compatibility validation inspects.
    """

    labels: tuple[int, ...]
    grid: tuple[float, ...]
    curves: tuple[tuple[float, ...], ...]
    conventions: ApsConventions = field(default_factory=ApsConventions)
    slice_scale: float | None = None
    slice_profile: tuple[float, ...] | None = None  # raw offset u(t) at grid points
    slice_multiplicity: int = 1
    cover: CoverConfig | None = None
    base: "ModeProblem | None" = None

    def __post_init__(self):
        if len(self.labels) != len(self.curves):
            raise ValueError("one label per curve required")
        if any(len(c) != len(self.grid) for c in self.curves):
            raise ValueError("each curve must provide one value per grid point")

    @property
    def window(self) -> int:
        return (len(self.labels) - 1) // 2

    def slice_operator(self, end: str) -> ModelOperator:
        """The lattice operator whose spectrum is the mode values at an end."""
        if self.slice_scale is None or self.slice_profile is None:
            raise UnsupportedBacking("problem was not built from a lattice profile")
        if end not in ("near", "far"):
            raise ValueError("end must be 'near' or 'far'")
        u = self.slice_profile[0] if end == "near" else self.slice_profile[-1]
        model = LatticeSpectrumModel(
            scale=self.slice_scale,
            offsets=(frac_star(u),) * self.slice_multiplicity,
        )
        return ModelOperator(lattice=model)


def lattice_cylinder(
    window: int,
    profile_grid,
    profile_values,
    scale: float = 1.0,
    conventions: ApsConventions | None = None,
) -> ModeProblem:
    """Cylinder problem with mode curves ``scale * (m + u(t))``.

    ``u`` is the piecewise-linear offset profile given on ``profile_grid``;
    the mode window is ``m in [-window, window]``.
    """
    g = tuple(float(t) for t in profile_grid)
    u = tuple(float(v) for v in profile_values)
    if len(g) != len(u) or len(g) < 2:
        raise ValueError("profile grid and values must align (>= 2 points)")
    labels = tuple(range(-window, window + 1))
    curves = tuple(tuple(scale * (m + uv) for uv in u) for m in labels)
    return ModeProblem(
        labels=labels,
        grid=g,
        curves=curves,
        conventions=conventions or ApsConventions(),
        slice_scale=scale,
        slice_profile=u,
    )


def lift_problem(base: ModeProblem, cover: CoverConfig) -> ModeProblem:
    """The problem upstairs: refine the mode lattice (nontrivial cover) or
    duplicate every mode (trivial cover)."""
    n = cover.sheets
    if cover.trivial:
        return replace(
            base,
            labels=base.labels * n,
            curves=base.curves * n,
            slice_multiplicity=base.slice_multiplicity * n,
            cover=cover,
            base=base,
        )
    if base.slice_scale is None or base.slice_profile is None:
        raise NotCoverCompatible("only lattice-profile problems can be lifted")
    if base.slice_multiplicity != 1:
        raise NotCoverCompatible("lift of multi-component slices is not supported")
    window = base.window * n
    labels = tuple(range(-window, window + 1))
    scale = base.slice_scale / n
    profile = tuple(n * u for u in base.slice_profile)
    curves = tuple(tuple(scale * (m + n * u) for u in base.slice_profile) for m in labels)
    return ModeProblem(
        labels=labels,
        grid=base.grid,
        curves=curves,
        conventions=base.conventions,
        slice_scale=scale,
        slice_profile=profile,
        cover=cover,
        base=base,
    )


# --------------------------------------------------------------------------
# the index
# --------------------------------------------------------------------------

def _constraint_active(v: float, include_zero: bool, tol: float) -> int:
    if abs(v) <= tol:
        return 1 if include_zero else 0
    return 1 if v > 0 else 0


def mode_constraints(p: ModeProblem, kernel_tol: float = KERNEL_TOL) -> list[int]:
    conv = p.conventions
    ks = []
    for curve in p.curves:
        near = _constraint_active(curve[0], conv.near_includes_zero, kernel_tol)
        far_value = -curve[-1] if conv.far_flip else curve[-1]
        far = _constraint_active(far_value, conv.far_includes_zero, kernel_tol)
        ks.append(near + far)
    return ks


def aps_index(p: ModeProblem, kernel_tol: float = KERNEL_TOL) -> int:
    """Index of the spectral boundary value problem: sum of (1 - k_n).

    Requires the tail condition: the modes nearest the window edge must all
    be singly constrained, so that modes outside the window contribute
    nothing and the value is window stable.
    """
    ks = mode_constraints(p, kernel_tol)
    order = np.argsort([c[0] for c in p.curves], kind="stable")
    edge = list(order[:_TAIL_CHECK]) + list(order[-_TAIL_CHECK:])
    for idx in edge:
        if ks[idx] != 1:
            raise TailViolation(
                f"edge mode {p.labels[idx]} has {ks[idx]} active constraints; "
                "enlarge the mode window"
            )
    return int(sum(1 - k for k in ks))


# --------------------------------------------------------------------------
# the spectral flow theorem check
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CylinderFamily:
    """One-parameter deformation mu_m(t; tau) = scale * (m + tau * chi(t)).

    ``chi`` is the deformation profile along the cylinder; the tangential
    family at the near end is ``scale * (m + tau * chi(0))`` and at the far
    end (orientation-reversed when flipped) ``-scale * (m + tau * chi(T))``.
    """

    window: int
    chi_grid: tuple[float, ...]
    chi_values: tuple[float, ...]
    scale: float = 1.0
    conventions: ApsConventions = field(default_factory=ApsConventions)

    def problem(self, tau: float) -> ModeProblem:
        values = tuple(tau * v for v in self.chi_values)
        return lattice_cylinder(
            self.window, self.chi_grid, values, self.scale, self.conventions
        )

    def tangential_family(self, tau_a: float, tau_b: float) -> SpectralFamily:
        """Total boundary tangential family over [tau_a, tau_b]."""
        grid = (tau_a, tau_b)
        chi0, chi1 = self.chi_values[0], self.chi_values[-1]
        sgn = -1.0 if self.conventions.far_flip else 1.0
        curves = []
        for m in range(-self.window, self.window + 1):
            curves.append([self.scale * (m + t * chi0) for t in grid])
            curves.append([sgn * self.scale * (m + t * chi1) for t in grid])
        return family_from_curves(grid, curves)

    def near_family(self, tau_a: float, tau_b: float) -> SpectralFamily:
        grid = (tau_a, tau_b)
        chi0 = self.chi_values[0]
        curves = [
            [self.scale * (m + t * chi0) for t in grid]
            for m in range(-self.window, self.window + 1)
        ]
        return family_from_curves(grid, curves)


@dataclass(frozen=True)
class SfTheoremReport:
    index_a: int
    index_b: int
    sf: int
    sf_engine: int | None
    holds: bool


def verify_sf_theorem(
    fam: CylinderFamily,
    tau_a: float,
    tau_b: float,
    kernel_tol: float = KERNEL_TOL,
    gap_tol: float = GAP_TOL,
) -> SfTheoremReport:
    """Check index(a) - index(b) == spectral flow of the tangential family.

    The flow is counted by the crossing oracle on the assembled boundary
    family (near end plus reversed far end); when the near family has
    invertible endpoints the partition engine is run on it as a second,
    independent count (the far family is constant in tau whenever the
    deformation profile vanishes at the far end).
    """
    if not tau_a < tau_b:
        raise ValueError("need tau_a < tau_b")
    ind_a = aps_index(fam.problem(tau_a), kernel_tol)
    ind_b = aps_index(fam.problem(tau_b), kernel_tol)
    sf = crossing_count_oracle(fam.tangential_family(tau_a, tau_b))
    sf_engine = None
    near = fam.near_family(tau_a, tau_b)
    far_constant = fam.chi_values[-1] == 0.0
    ends_ok = all(
        float(np.min(np.abs(near.spectrum_at(t)))) > gap_tol for t in (tau_a, tau_b)
    )
    if far_constant and ends_ok:
        sf_engine = spectral_flow(near, gap_tol=gap_tol).value
    holds = (ind_a - ind_b) == sf and (sf_engine is None or sf_engine == sf)
    return SfTheoremReport(ind_a, ind_b, sf, sf_engine, holds)


# --------------------------------------------------------------------------
# mod-n index and the defect invariant
# --------------------------------------------------------------------------

def _require_lifted(p: ModeProblem, cover: CoverConfig) -> None:
    if p.cover != cover or p.base is None:
        raise NotCoverCompatible(
            "problem does not carry the structure of a lift through this cover"
        )


def modn_index(p: ModeProblem, cover: CoverConfig, kernel_tol: float = KERNEL_TOL) -> int:
    """The index reduced modulo the sheet count of the cover."""
    _require_lifted(p, cover)
    return aps_index(p, kernel_tol) % cover.sheets


@dataclass(frozen=True)
class InvResult:
    """Mod-n index plus the relative-eta defect, reduced into [0, n)."""

    index: int
    modn: int
    eta_total: float
    eta_base: float
    inv: float
    sheets: int


def inv_invariant(
    p: ModeProblem,
    cover: CoverConfig,
    a0: ModelOperator,
    kernel_tol: float = KERNEL_TOL,
) -> InvResult:
    """The homotopy-invariant residue: mod-n index + eta(A) - n eta(A_0).

    ``A`` is the tangential operator of the whole boundary (near end plus
    orientation-reversed far end) of the lifted problem, ``A_0`` the
    corresponding total boundary operator downstairs; ``a0`` must match the
    near-end base slice.  The combination is reduced into [0, n), values
    within 1e-9 of n folding to 0.
    """
    _require_lifted(p, cover)
    n = cover.sheets
    base = p.base
    base_near = base.slice_operator("near")
    expected = a0.require_lattice()
    got = base_near.require_lattice()
    if (
        abs(expected.scale - got.scale) > 1e-12
        or len(expected.offsets) != len(got.offsets)
        or any(abs(x - y) > 1e-12 for x, y in zip(sorted(expected.offsets), sorted(got.offsets)))
    ):
        raise NotCoverCompatible(
            "base operator does not match the near-end slice of the problem"
        )
    if not p.conventions.far_flip:
        raise UnsupportedBacking("the defect invariant assumes the reversed far end")
    lifted_near = (
        pushforward_trivial(a0, n) if cover.trivial else pullback_cover(a0, cover)
    ).require_lattice()
    near = p.slice_operator("near").require_lattice()
    if abs(lifted_near.scale - near.scale) > 1e-12 or any(
        abs(x - y) > 1e-12
        for x, y in zip(sorted(lifted_near.offsets), sorted(near.offsets))
    ):
        raise NotCoverCompatible("near-end slice is not the lift of the base operator")

    eta_base = (
        eta_invariant(base_near).eta
        + eta_invariant(negate_operator(base.slice_operator("far"))).eta
    )
    if cover.trivial:
        # additivity over direct sums is exact: n identical copies
        eta_total = n * eta_base
    else:
        eta_total = (
            eta_invariant(p.slice_operator("near")).eta
            + eta_invariant(negate_operator(p.slice_operator("far"))).eta
        )
    ind = aps_index(p, kernel_tol)
    modn = ind % n
    raw = modn + eta_total - n * eta_base
    inv = math.fmod(raw, n)
    if inv < 0:
        inv += n
    if n - inv < 1e-9:
        inv = 0.0
    return InvResult(
        index=ind, modn=modn, eta_total=eta_total, eta_base=eta_base, inv=inv, sheets=n
    )
