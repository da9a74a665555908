"""Spectral flow via relative indices of spectral projections.

The engine follows the partition/weight construction: choose parameter values
``a = tau_0 < ... < tau_N = b`` and weights ``w_0, ..., w_N`` with
``w_0 = w_N = 0`` such that ``w_i`` is never an eigenvalue on
``[tau_i, tau_{i+1}]`` (margin >= ``gap_tol``).  The flow is the sum over the
junctions ``i = 1..N`` of the relative index of the projections onto
eigenvalues ``>= w_i`` versus ``>= w_{i-1}`` at ``tau_i``; each term is a
signed eigenvalue count in the half-open window ``[min(w), max(w))``.  The
result is independent of the admissible partition chosen.

An independent crossing-count oracle (sign-change scan over labeled curves)
is provided for cross-checking; the two must agree exactly on families with
transversal crossings.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .defaults import (
    DENSIFY_FACTOR,
    GAP_TOL,
    LADDER_GAPS,
    LADDER_RADIUS,
    LADDER_SENTINEL,
    MAX_PARTITION_DEPTH,
    SEGMENT_SAMPLES,
)
from .errors import (
    EndpointNotInvertible,
    LoopMismatch,
    NoGapFound,
    NowhereInvertible,
    PartitionDepthExceeded,
    TangencyDetected,
    UnsupportedBacking,
)
from .linalg import Spectrum
from .opmodel import ModelOperator, SpectralFamily

_ZERO_TOL = 1e-13


@dataclass(frozen=True)
class Partition:
    """Parameter breakpoints and the weight ladder used for one flow value."""

    taus: tuple[float, ...]
    weights: tuple[float, ...]  # one per tau; first and last are 0


@dataclass(frozen=True)
class SfReport:
    value: int
    partition: Partition
    junction_terms: tuple[int, ...]


def rel_index(s, lam: float, mu: float) -> int:
    """Relative index of the projections onto eigenvalues >= lam vs >= mu.

    Equals ``sgn(mu - lam)`` times the eigenvalue count in the half-open
    window ``[min(lam, mu), max(lam, mu))``.  Antisymmetric in (lam, mu).
    """
    if lam == mu:
        return 0
    values = _as_values(s, lam, mu)
    lo, hi = (lam, mu) if lam < mu else (mu, lam)
    count = int(np.count_nonzero((values >= lo) & (values < hi)))
    return count if mu > lam else -count


def _as_values(s, lam: float, mu: float) -> np.ndarray:
    if isinstance(s, Spectrum):
        return np.asarray(s.eigenvalues)
    if isinstance(s, ModelOperator):
        window = (abs(lam) + abs(mu) + 1.0) / s.require_lattice().scale + 2.0
        return np.asarray(s.require_lattice().enumerate(window))
    return np.asarray(s, dtype=float)


# --------------------------------------------------------------------------
# family adapters: uniform spectra + exact level-distance over segments
# --------------------------------------------------------------------------

class _Adapter:
    def __init__(self, family: SpectralFamily):
        self.family = family

    @property
    def domain(self):
        return self.family.domain

    def base_intervals(self, lo, hi):
        return [(lo, hi)]

    def to_base(self, tau):
        return tau

    def spectrum(self, tau: float) -> np.ndarray:
        return self.family.spectrum_at(self.to_base(tau))

    def segment(self, lo: float, hi: float) -> "_Segment":
        return _Segment(self, lo, hi)


class _RotatedAdapter(_Adapter):
    """View of a loop family re-based at tau_star, on the unit interval."""

    def __init__(self, family: SpectralFamily, tau_star: float):
        super().__init__(family)
        a, b = family.domain
        self.a, self.span, self.tau_star = a, b - a, tau_star
        self.seam = (b - tau_star) / self.span  # sigma where the base wraps

    @property
    def domain(self):
        return (0.0, 1.0)

    def to_base(self, sigma):
        u = self.tau_star + sigma * self.span
        b = self.a + self.span
        if u > b:
            u -= self.span
        return min(max(u, self.a), b)

    def base_intervals(self, lo, hi):
        if hi <= self.seam:
            return [(self.to_base(lo), self.to_base(hi))]
        if lo >= self.seam:
            # a left endpoint exactly on the seam belongs to the early part
            start = self.a if lo == self.seam else self.to_base(lo)
            return [(start, self.to_base(hi))]
        return [
            (self.to_base(lo), self.a + self.span),
            (self.a, self.to_base(hi)),
        ]


class _Segment:
    """One partition segment: cached sample spectra and level distances."""

    def __init__(self, adapter: _Adapter, lo: float, hi: float):
        self.adapter = adapter
        self.lo, self.hi = lo, hi
        fam = adapter.family
        self.intervals = adapter.base_intervals(lo, hi)
        self._pieces = self._linear_pieces(fam) if fam.is_curve_backed else None
        self._samples = self._sample_spectra(fam, SEGMENT_SAMPLES)
        self._dense = None

    def _linear_pieces(self, fam: SpectralFamily):
        pieces = []  # (va, vb) per curve per clipped grid interval
        grid = fam.grid
        for a, b in self.intervals:
            if b <= a:
                continue
            cuts = [a] + [g for g in grid if a < g < b] + [b]
            for i in range(len(cuts) - 1):
                va = fam.curve_values(cuts[i])
                vb = fam.curve_values(cuts[i + 1])
                pieces.append((va, vb))
        return pieces

    def _sample_spectra(self, fam: SpectralFamily, n: int) -> np.ndarray:
        out = []
        for a, b in self.intervals:
            taus = np.linspace(a, b, max(2, n))
            taus = np.unique(np.concatenate([taus, [g for g in fam.grid if a <= g <= b]]))
            for t in taus:
                out.append(fam.spectrum_at(t))
        return np.concatenate(out) if out else np.empty(0)

    @property
    def sampled_values(self) -> np.ndarray:
        return self._samples

    def min_distance(self, w: float) -> float:
        if self._pieces is not None:
            # exact on piecewise-linear curves: a linear piece attains zero
            # distance iff its endpoints straddle the level
            best = np.inf
            for va, vb in self._pieces:
                da, db = va - w, vb - w
                if np.any(da * db <= 0.0):
                    return 0.0
                best = min(best, float(np.min(np.abs(da))), float(np.min(np.abs(db))))
            return best
        return float(np.min(np.abs(self._samples - w))) if len(self._samples) else np.inf

    def valid(self, w: float, gap_tol: float) -> bool:
        if self.min_distance(w) < gap_tol:
            return False
        if self._pieces is not None:
            return True
        if self._dense is None:
            self._dense = self._sample_spectra(self.adapter.family, SEGMENT_SAMPLES * DENSIFY_FACTOR)
        return float(np.min(np.abs(self._dense - w))) >= gap_tol


def find_weight(
    f: SpectralFamily,
    a: float,
    b: float,
    hint: float = 0.0,
    gap_tol: float = GAP_TOL,
) -> float:
    """A level at distance >= gap_tol from the spectrum everywhere on [a, b].

    The hint is tried first; otherwise the candidates are midpoints of the
    largest gaps of the sampled spectra near the hint (with sentinel gaps
    beyond the extreme values), validated against the exact piecewise-linear
    curves or a densified sampling.
    """
    if not (a < b):
        raise ValueError("need a < b")
    return _segment_weight(_Adapter(f).segment(a, b), hint, gap_tol)


def _segment_weight(seg: _Segment, hint: float, gap_tol: float) -> float:
    if seg.valid(hint, gap_tol):
        return hint
    vals = np.unique(np.asarray(seg.sampled_values, dtype=float))
    if len(vals) == 0:
        raise NoGapFound(f"no spectral data near hint {hint}")
    pts = np.concatenate([[vals[0] - LADDER_SENTINEL], vals, [vals[-1] + LADDER_SENTINEL]])
    gaps = pts[1:] - pts[:-1]
    mids = 0.5 * (pts[1:] + pts[:-1])
    keep = np.abs(mids - hint) <= LADDER_RADIUS
    gaps, mids = gaps[keep], mids[keep]
    # near-the-hint midpoints of comfortably wide gaps first, then by width
    wide = [i for i in range(len(gaps)) if gaps[i] >= 10 * gap_tol]
    wide.sort(key=lambda i: (abs(mids[i] - hint), mids[i]))
    by_width = sorted(range(len(gaps)), key=lambda i: (-gaps[i], abs(mids[i] - hint), mids[i]))
    seen: set[int] = set()
    for i in wide[:LADDER_GAPS] + by_width[:LADDER_GAPS]:
        if i in seen or gaps[i] < 2 * gap_tol:
            continue
        seen.add(i)
        if seg.valid(float(mids[i]), gap_tol):
            return float(mids[i])
    raise NoGapFound(
        f"no weight with gap {gap_tol:g} on [{seg.lo:g}, {seg.hi:g}]; refine the partition"
    )


# --------------------------------------------------------------------------
# the flow engine
# --------------------------------------------------------------------------

def spectral_flow(
    f: SpectralFamily,
    gap_tol: float = GAP_TOL,
    initial_breaks: Sequence[float] | None = None,
    max_depth: int = MAX_PARTITION_DEPTH,
) -> SfReport:
    """Spectral flow of a family with invertible endpoints.

    The interval is bisected adaptively until every segment admits a valid
    weight; the returned value is the junction sum and does not depend on the
    partition (``initial_breaks`` only forces extra breakpoints, useful for
    independence tests).
    """
    return _flow_on_adapter(_Adapter(f), gap_tol, initial_breaks, max_depth)


def _flow_on_adapter(adapter, gap_tol, initial_breaks, max_depth) -> SfReport:
    a, b = adapter.domain
    for endpoint in (a, b):
        spec = adapter.spectrum(endpoint)
        if len(spec) and float(np.min(np.abs(spec))) <= gap_tol:
            raise EndpointNotInvertible(
                f"eigenvalue within {gap_tol:g} of 0 at parameter {endpoint:g}"
            )
    breaks = [a, b]
    if initial_breaks is not None:
        breaks += [float(t) for t in initial_breaks if a < float(t) < b]
    breaks = sorted(set(breaks))
    queue = [(breaks[i], breaks[i + 1], 0) for i in range(len(breaks) - 1)]

    taus = [a]
    weights: list[float] = []
    while queue:
        lo, hi, depth = queue.pop(0)
        seg = adapter.segment(lo, hi)
        try:
            if not weights:
                # the first weight is pinned to 0 by the endpoint convention
                if not seg.valid(0.0, gap_tol):
                    raise NoGapFound("zero weight invalid on the first segment")
                w = 0.0
            else:
                w = _segment_weight(seg, weights[-1], gap_tol)
        except NoGapFound:
            if depth >= max_depth:
                raise PartitionDepthExceeded(
                    f"no valid weight after {max_depth} bisections on [{lo:g}, {hi:g}]"
                )
            mid = 0.5 * (lo + hi)
            queue.insert(0, (mid, hi, depth + 1))
            queue.insert(0, (lo, mid, depth + 1))
            continue
        weights.append(w)
        taus.append(hi)

    full_weights = weights + [0.0]
    terms = []
    for i in range(1, len(taus)):
        w_new, w_old = full_weights[i], full_weights[i - 1]
        if w_new == w_old:
            terms.append(0)
            continue
        terms.append(rel_index(adapter.spectrum(taus[i]), w_new, w_old))
    partition = Partition(taus=tuple(taus), weights=tuple(weights + [0.0]))
    return SfReport(value=int(sum(terms)), partition=partition, junction_terms=tuple(terms))


# --------------------------------------------------------------------------
# crossing-count oracle
# --------------------------------------------------------------------------

def crossing_count_oracle(f: SpectralFamily) -> int:
    """Signed zero crossings (up minus down) of the labeled eigenvalue curves.

    Independent of the partition engine: a plain sign-change scan over the
    piecewise-linear curve data.  Curves that touch zero without changing
    sign raise TangencyDetected; identically-zero curves contribute nothing.
    """
    return sum(d for _, d in crossing_events(f))


def crossing_events(f: SpectralFamily) -> list[tuple[float, int]]:
    """Zero crossings as (parameter, direction) pairs, refined per linear piece."""
    if not f.is_curve_backed:
        raise UnsupportedBacking("crossing oracle needs labeled curves")
    grid = np.asarray(f.grid)
    events: list[tuple[float, int]] = []
    for curve in f.curves:
        v = np.asarray(curve, dtype=float)
        signs = np.where(np.abs(v) <= _ZERO_TOL, 0, np.sign(v)).astype(int)
        last = 0
        last_idx = -1
        touched = False
        for i, s in enumerate(signs):
            if s == 0:
                if last != 0:
                    touched = True
                continue
            if last == 0:
                last, last_idx = s, i
                touched = False
                continue
            if s != last:
                tau = _refine_root(grid, v, last_idx, i)
                events.append((tau, 1 if s > 0 else -1))
                last, last_idx, touched = s, i, False
            else:
                if touched:
                    raise TangencyDetected(
                        f"curve touches zero near tau={grid[i - 1]:g} without crossing"
                    )
                last_idx = i
    events.sort(key=lambda e: e[0])
    return events


def _refine_root(grid, values, i_neg_side, i_pos_side) -> float:
    # linear interpolation on the last sign-definite bracket
    i, j = i_neg_side, i_pos_side
    for k in range(i, j):
        if values[k] != 0 and values[k + 1] != 0 and np.sign(values[k]) != np.sign(values[k + 1]):
            i, j = k, k + 1
            break
    va, vb = values[i], values[j]
    if va == vb:
        return float(grid[i])
    t = va / (va - vb)
    return float(grid[i] + t * (grid[j] - grid[i]))


def loop_spectral_flow(f: SpectralFamily, gap_tol: float = GAP_TOL) -> int:
    """Spectral flow around a loop, independent of the basepoint.

    The parameterization is rotated to start at an invertible spectrum, then
    the partition engine runs on the rotated path (it needs only spectra, so
    label reshuffling at the seam is harmless).
    """
    if not f.loop:
        raise LoopMismatch("family is not a validated loop")
    a, b = f.domain
    taus = np.unique(np.concatenate([np.asarray(f.grid), np.linspace(a, b, 257)]))
    best_tau, best_gap = None, -1.0
    for t in taus:
        spec = f.spectrum_at(float(t))
        gap = float(np.min(np.abs(spec))) if len(spec) else np.inf
        if gap > best_gap:
            best_tau, best_gap = float(t), gap
    if best_gap <= gap_tol:
        raise NowhereInvertible("every parameter value has a near-zero eigenvalue")
    report = _flow_on_adapter(_RotatedAdapter(f, best_tau), gap_tol, None, MAX_PARTITION_DEPTH)
    return report.value
