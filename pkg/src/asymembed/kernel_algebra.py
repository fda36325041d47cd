"""Kernel tables, spectral certificates, and the two translations between
distortion envelopes and decay profiles.

Two table types: a distance-like kernel (symmetric, nonnegative, zero
diagonal) and a similarity-like positive kernel (values in [0,1], unit
diagonal).  The exponential map e^(-t*K) turns the first into the second;
certified conditional negative definiteness of K makes the result positive
semidefinite at every t (Schoenberg's theorem), which is the property the
verification stages certify.

Certificates never assert from theory alone: ``is_cnd`` and ``is_pt``
measure eigenvalues and hand back an offending mean-zero vector when the
claim fails.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .graph_core import DomainError, MetricTable

SYM_TOL = 1e-9


def _as_table(obj) -> np.ndarray:
    if isinstance(obj, Kernel) or isinstance(obj, PositiveKernel):
        return obj.table
    a = np.asarray(obj, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"kernel table must be square, got shape {a.shape}")
    return a


@dataclass(frozen=True)
class Kernel:
    """Symmetric nonnegative table with zero diagonal."""

    table: np.ndarray

    def __post_init__(self) -> None:
        a = self.table
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DomainError(f"kernel table must be square, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise DomainError("kernel table must be finite")
        if np.abs(a - a.T).max(initial=0.0) > SYM_TOL:
            raise DomainError("kernel table must be symmetric")
        if np.abs(np.diag(a)).max(initial=0.0) > SYM_TOL:
            raise DomainError("kernel diagonal must be zero")
        if a.min(initial=0.0) < -SYM_TOL:
            raise DomainError("kernel values must be nonnegative")

    @property
    def size(self) -> int:
        return self.table.shape[0]

    @staticmethod
    def from_metric(metric: MetricTable, power: float = 1.0) -> "Kernel":
        d = metric.dist
        if not np.all(np.isfinite(d)):
            raise DomainError("metric has infinite distances (disconnected space)")
        return Kernel(table=np.asarray(d, dtype=float) ** power)

    def restrict(self, idx: Sequence[int]) -> "Kernel":
        ix = list(idx)
        return Kernel(table=self.table[np.ix_(ix, ix)])


@dataclass(frozen=True)
class PositiveKernel:
    """Symmetric table with values in [0,1] and unit diagonal."""

    table: np.ndarray

    def __post_init__(self) -> None:
        a = self.table
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DomainError(f"kernel table must be square, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise DomainError("kernel table must be finite")
        if np.abs(a - a.T).max(initial=0.0) > SYM_TOL:
            raise DomainError("kernel table must be symmetric")
        if np.abs(np.diag(a) - 1.0).max(initial=0.0) > SYM_TOL:
            raise DomainError("kernel diagonal must be one")
        if a.min(initial=1.0) < -SYM_TOL or a.max(initial=0.0) > 1.0 + SYM_TOL:
            raise DomainError("kernel values must lie in [0,1]")

    @property
    def size(self) -> int:
        return self.table.shape[0]

    def restrict(self, idx: Sequence[int]) -> "PositiveKernel":
        ix = list(idx)
        return PositiveKernel(table=self.table[np.ix_(ix, ix)])

    def deficit(self) -> np.ndarray:
        """1 - k, entrywise."""
        return 1.0 - self.table


# ---------------------------------------------------------------------------
# spectral certificates


@dataclass(frozen=True)
class SpectralVerdict:
    ok: bool
    min_eig: float
    tol_used: float
    witness: np.ndarray | None = None
    witness_value: float | None = None


def is_cnd(kernel, tol: float = 1e-8) -> SpectralVerdict:
    """Conditional negative definiteness certificate.

    Anchors at the last point: G_ij = K(i,m) + K(j,m) - K(i,j) must be
    positive semidefinite, up to -tol * (1 + max |K|).  On failure the
    verdict carries a mean-zero vector z with z^T K z > 0.
    """
    k = _as_table(kernel)
    m = k.shape[0]
    if m <= 2:
        return SpectralVerdict(ok=True, min_eig=0.0, tol_used=tol)
    g = k[:-1, -1][:, None] + k[-1, :-1][None, :] - k[:-1, :-1]
    g = (g + g.T) / 2.0
    eigvals, eigvecs = np.linalg.eigh(g)
    lo = float(eigvals[0])
    slack = tol * (1.0 + float(np.abs(k).max(initial=0.0)))
    if lo >= -slack:
        return SpectralVerdict(ok=True, min_eig=lo, tol_used=slack)
    v = eigvecs[:, 0]
    z = np.append(v, -v.sum())
    value = float(z @ k @ z)
    return SpectralVerdict(ok=False, min_eig=lo, tol_used=slack, witness=z, witness_value=value)


def is_pt(kernel, tol: float = 1e-8) -> SpectralVerdict:
    """Positive semidefiniteness certificate for a full kernel table:
    min eigenvalue at least -tol * size."""
    k = _as_table(kernel)
    k = (k + k.T) / 2.0
    m = k.shape[0]
    if m == 0:
        return SpectralVerdict(ok=True, min_eig=0.0, tol_used=tol)
    eigvals, eigvecs = np.linalg.eigh(k)
    lo = float(eigvals[0])
    slack = tol * m
    if lo >= -slack:
        return SpectralVerdict(ok=True, min_eig=lo, tol_used=slack)
    v = eigvecs[:, 0]
    return SpectralVerdict(
        ok=False, min_eig=lo, tol_used=slack, witness=v, witness_value=float(v @ k @ v)
    )


def schoenberg_transform(kernel, t: float) -> PositiveKernel:
    """k = e^(-t*K).  Defined for every symmetric zero-diagonal table; the
    result is positive semidefinite exactly when K is conditionally negative
    definite, which callers certify separately."""
    if t < 0:
        raise DomainError(f"rate must be >= 0, got {t}")
    k = _as_table(kernel)
    out = np.exp(-t * k)
    np.fill_diagonal(out, 1.0)
    return PositiveKernel(table=out)


# ---------------------------------------------------------------------------
# piecewise-linear envelopes


@dataclass(frozen=True)
class PiecewiseLinear:
    """Nondecreasing piecewise-linear function on [0, inf).

    Constant at the first knot's value before it, interpolated between
    knots, extended beyond the last knot with ``terminal_slope``.
    """

    knots: tuple[tuple[float, float], ...]
    terminal_slope: float

    def __post_init__(self) -> None:
        if not self.knots:
            raise DomainError("need at least one knot")
        xs = [x for x, _ in self.knots]
        ys = [y for _, y in self.knots]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise DomainError("knot positions must be strictly increasing")
        if xs[0] < 0:
            raise DomainError("knot positions must be nonnegative")
        if any(y < 0 for y in ys):
            raise DomainError("values must be nonnegative")
        if any(b < a for a, b in zip(ys, ys[1:])):
            raise DomainError("values must be nondecreasing")
        if self.terminal_slope < 0:
            raise DomainError("terminal slope must be nonnegative")

    def __call__(self, s):
        xs = np.array([x for x, _ in self.knots])
        ys = np.array([y for _, y in self.knots])
        s_arr = np.asarray(s, dtype=float)
        base = np.interp(np.minimum(s_arr, xs[-1]), xs, ys)
        extra = self.terminal_slope * np.maximum(s_arr - xs[-1], 0.0)
        out = base + extra
        return float(out) if np.isscalar(s) or s_arr.ndim == 0 else out


def identity_envelope() -> PiecewiseLinear:
    return PiecewiseLinear(knots=((0.0, 0.0),), terminal_slope=1.0)


@dataclass(frozen=True)
class DistortionPair:
    """Lower and upper monotone envelopes with the lower never above the
    upper and both eventually strictly increasing."""

    lower: PiecewiseLinear
    upper: PiecewiseLinear

    def __post_init__(self) -> None:
        if self.lower.terminal_slope <= 0 or self.upper.terminal_slope <= 0:
            raise DomainError("terminal slopes must be positive")
        if self.lower.terminal_slope > self.upper.terminal_slope + 1e-12:
            raise DomainError("lower envelope eventually overtakes the upper")
        xs = sorted({x for x, _ in self.lower.knots} | {x for x, _ in self.upper.knots} | {0.0})
        for x in xs:
            if self.lower(x) > self.upper(x) + 1e-12:
                raise DomainError(f"lower envelope exceeds upper at {x}")

    def envelopes(self, kernel, dist: np.ndarray, tol: float = 1e-9) -> tuple[bool, float]:
        """Check lower(d) <= K <= upper(d) entrywise; returns pass flag and
        the worst signed violation (positive means broken)."""
        k = _as_table(kernel)
        d = np.asarray(dist, dtype=float)
        lo = self.lower(d)
        hi = self.upper(d)
        worst = max(float((lo - k).max(initial=0.0)), float((k - hi).max(initial=0.0)))
        return worst <= tol, worst


def identity_pair() -> DistortionPair:
    return DistortionPair(lower=identity_envelope(), upper=identity_envelope())


@dataclass(frozen=True)
class DecayFunction:
    """Nonincreasing nonnegative profile reaching zero.

    Interpolated on its knots; past the last knot it ramps linearly to zero
    over one unit and stays there, so it always tends to zero and every
    positive level is crossed at a finite point.
    """

    knots: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if not self.knots:
            raise DomainError("need at least one knot")
        xs = [x for x, _ in self.knots]
        ys = [y for _, y in self.knots]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise DomainError("knot positions must be strictly increasing")
        if xs[0] < 0:
            raise DomainError("knot positions must be nonnegative")
        if any(y < 0 for y in ys):
            raise DomainError("values must be nonnegative")
        if any(b > a for a, b in zip(ys, ys[1:])):
            raise DomainError("values must be nonincreasing")

    def _extended(self) -> tuple[np.ndarray, np.ndarray]:
        xs = [x for x, _ in self.knots]
        ys = [y for _, y in self.knots]
        xs.append(xs[-1] + 1.0)
        ys.append(0.0)
        return np.array(xs), np.array(ys)

    def __call__(self, s):
        xs, ys = self._extended()
        s_arr = np.asarray(s, dtype=float)
        out = np.interp(s_arr, xs, ys)
        return float(out) if np.isscalar(s) or s_arr.ndim == 0 else out

    def crossing(self, level: float) -> float:
        """Smallest s >= 0 with value(s) <= level; inf for negative levels."""
        if level < 0:
            return math.inf
        xs, ys = self._extended()
        if ys[0] <= level:
            return 0.0
        for i in range(len(xs) - 1):
            if ys[i + 1] <= level:
                # ys[i] > level >= ys[i+1], so the segment is strictly falling
                frac = (ys[i] - level) / (ys[i] - ys[i + 1])
                return float(xs[i] + frac * (xs[i + 1] - xs[i]))
        return float(xs[-1])


# ---------------------------------------------------------------------------
# translations


@dataclass(frozen=True)
class SmoothedKernel:
    """Output of :func:`distortion_to_decay`: the exponentially smoothed
    kernel, its certified decay profile, and the rate used."""

    kernel: PositiveKernel
    decay: DecayFunction
    rate: float


def distortion_to_decay(
    pair: DistortionPair,
    kernel,
    radius: float,
    delta: float,
    dist: np.ndarray | None = None,
) -> SmoothedKernel:
    """Smooth a kernel so its deficit within ``radius`` stays below
    ``delta``, and certify an upper decay profile.

    The rate is t = ln(1/(1-delta)) / (2 * upper(radius)); then
    k = e^(-t*K) satisfies 1 - k <= delta wherever d <= radius and
    k <= gamma(d) for gamma(s) = e^(-t*lower(s)), provided the envelope
    pair actually brackets the kernel (verified when ``dist`` is given).
    The returned profile is the piecewise-linear chord interpolation of
    gamma at the lower envelope's breakpoints, which lies above gamma by
    convexity on each piece.
    """
    if not (0.0 < delta <= 1.0):
        raise DomainError(f"delta must lie in (0,1], got {delta}")
    if radius < 0:
        raise DomainError(f"radius must be >= 0, got {radius}")
    k = _as_table(kernel)
    up_r = pair.upper(radius)
    if delta < 1.0:
        rate = math.log(1.0 / (1.0 - delta)) / (2.0 * up_r) if up_r > 0 else 1.0
    else:
        rate = 1.0 / max(up_r, 1.0)
    smoothed = schoenberg_transform(k, rate)

    xs = sorted({0.0} | {x for x, _ in pair.lower.knots})
    horizon = xs[-1] + 1.0
    if dist is not None:
        d = np.asarray(dist, dtype=float)
        finite = d[np.isfinite(d)]
        if finite.size:
            horizon = max(horizon, float(finite.max()))
    xs.append(horizon)
    decay = DecayFunction(knots=tuple((x, math.exp(-rate * pair.lower(x))) for x in xs))

    if dist is not None:
        ok, worst = pair.envelopes(k, dist)
        if not ok:
            raise DomainError(f"envelope pair does not bracket the kernel (violation {worst:.3g})")
        d = np.asarray(dist, dtype=float)
        within = d <= radius
        if within.any():
            worst_deficit = float((1.0 - smoothed.table)[within].max())
            if worst_deficit > delta + 1e-12:
                raise AssertionError("deficit guarantee failed after envelope check")
        over = smoothed.table - decay(d)
        if float(over.max(initial=0.0)) > 1e-12:
            raise AssertionError("decay profile fails to dominate the smoothed kernel")
    return SmoothedKernel(kernel=smoothed, decay=decay, rate=rate)


@dataclass(frozen=True)
class RecoveredKernel:
    """Output of :func:`decay_to_distortion`: the summed kernel, its
    distortion envelopes, and the tail bound left by truncation."""

    kernel: Kernel
    pair: DistortionPair
    truncation_bound: float
    level_starts: tuple[float, ...]


def decay_to_distortion(
    family: Mapping[int, tuple[PositiveKernel, DecayFunction]],
    n_max: int,
    dist: np.ndarray | None = None,
) -> RecoveredKernel:
    """Sum a graded kernel family back into a distance-like kernel with
    certified envelopes.

    ``family`` maps grade n (1-based) to a kernel whose deficit within
    radius n is at most 2^-n, plus its decay profile.  The sum
    K = sum of (1 - k_n) over n <= n_max is bracketed by
    lower(s) = (N(s) - 1) / 2 interpolated at the level starts
    s_N = max over n <= N of the half-level crossing of grade n's profile,
    and upper(s) = s + 1.  Dropping grades beyond n_max changes the sum by
    at most 2^(1 - n_max).
    """
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    missing = [n for n in range(1, n_max + 1) if n not in family]
    if missing:
        raise DomainError(f"family missing grades {missing}")
    size = family[1][0].size
    total = np.zeros((size, size))
    for n in range(1, n_max + 1):
        kn, _ = family[n]
        if kn.size != size:
            raise DomainError(f"grade {n} has size {kn.size}, expected {size}")
        total += kn.deficit()
    np.fill_diagonal(total, 0.0)
    total = np.maximum((total + total.T) / 2.0, 0.0)
    kernel = Kernel(table=total)

    starts: list[float] = []
    running = 0.0
    for n in range(1, n_max + 1):
        running = max(running, family[n][1].crossing(0.5))
        starts.append(running)
    knots: list[tuple[float, float]] = []
    for idx, s in enumerate(starts):
        y = idx / 2.0
        if knots and s <= knots[-1][0]:
            # tied level starts: keep the earlier, lower knot
            continue
        knots.append((s, y))
    if not knots or knots[0][0] > 0.0:
        knots.insert(0, (0.0, 0.0))
    lower = PiecewiseLinear(knots=tuple(knots), terminal_slope=1e-6)
    upper = PiecewiseLinear(knots=((0.0, 1.0),), terminal_slope=1.0)
    pair = DistortionPair(lower=lower, upper=upper)
    if dist is not None:
        ok, worst = pair.envelopes(kernel, dist)
        if not ok:
            raise AssertionError(f"recovered envelopes fail on the summed kernel ({worst:.3g})")
    return RecoveredKernel(
        kernel=kernel,
        pair=pair,
        truncation_bound=2.0 ** (1 - n_max),
        level_starts=tuple(starts),
    )
