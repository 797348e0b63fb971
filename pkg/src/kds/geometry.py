"""Exact Kerr-de Sitter geometry in Boyer-Lindquist and horizon-penetrating charts.

Everything downstream (geodesic flow, trapping certificates, mode spectra)
consumes the closed forms defined here: the horizon polynomial ``mu`` and its
roots, both metric charts with their inverses, the gauge profile used to
extend across the horizons, the causal character of the stationarity
generator, and the Fredholm threshold ``beta``.

Conventions: geometric units, coordinate order ``(t, r, phi, theta)`` in the
Boyer-Lindquist chart and ``(t*, r, phi*, theta)`` in the starred chart.
All objects are immutable after construction and all functions are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage, optimize

from .errors import (
    ChartDomainError,
    FrameMismatchError,
    GaugeInvalidError,
    KdsError,
    NotSubextremalError,
)

BL = "boyer-lindquist"
STARRED = "starred"

_ROOT_DISTINCT_REL = 1e-8


def _quartic_roots(lam: float, a: float, mass: float):
    """Roots of mu via companion-matrix eigenvalues plus Newton polishing.

    Returns (real_roots_sorted, all_roots, min_separation).
    """
    coeffs = np.array([-lam / 3.0, 0.0, 1.0 - lam * a * a / 3.0, -2.0 * mass, a * a])
    roots = np.roots(coeffs)
    scale = max(1.0, np.max(np.abs(roots)))
    real = np.sort(roots[np.abs(roots.imag) < 1e-7 * scale].real)

    def mu(r):
        return -lam * r**4 / 3.0 + (1.0 - lam * a * a / 3.0) * r * r - 2.0 * mass * r + a * a

    def mu_p(r):
        return -4.0 * lam * r**3 / 3.0 + 2.0 * (1.0 - lam * a * a / 3.0) * r - 2.0 * mass

    for _ in range(4):
        real = real - mu(real) / mu_p(real)
    sep = np.min(np.diff(real)) if len(real) > 1 else 0.0
    return real, roots, sep


@dataclass(frozen=True)
class SpacetimeParams:
    """The triple (Lambda, a, m) plus derived constants; single source of truth.

    Subextremality (four distinct real roots of mu) is checked at
    construction and :class:`NotSubextremalError` is raised otherwise.
    """

    lam: float
    a: float
    mass: float
    b: float = field(init=False)

    def __post_init__(self):
        if self.lam <= 0.0:
            raise KdsError("cosmological constant must be positive")
        if self.mass <= 0.0:
            raise KdsError("black-hole mass must be positive")
        object.__setattr__(self, "b", 1.0 + self.lam * self.a * self.a / 3.0)
        real, allroots, sep = _quartic_roots(self.lam, self.a, self.mass)
        scale = max(abs(r) for r in allroots.tolist() + [1.0])
        if len(real) != 4 or sep <= _ROOT_DISTINCT_REL * abs(scale):
            raise NotSubextremalError(
                "horizon polynomial lacks four distinct real roots: "
                f"real roots {real.tolist()}, full root set {allroots.tolist()}, "
                f"min separation {sep:.3e}"
            )
        object.__setattr__(self, "_roots", tuple(real.tolist()))

    # -- polynomial and auxiliary scalars ------------------------------------

    def mu(self, r):
        r = np.asarray(r, dtype=float)
        return -self.lam * r**4 / 3.0 + (1.0 - self.lam * self.a**2 / 3.0) * r**2 - 2.0 * self.mass * r + self.a**2

    def mu_prime(self, r):
        r = np.asarray(r, dtype=float)
        return -4.0 * self.lam * r**3 / 3.0 + 2.0 * (1.0 - self.lam * self.a**2 / 3.0) * r - 2.0 * self.mass

    def mu_second(self, r):
        r = np.asarray(r, dtype=float)
        return -4.0 * self.lam * r**2 + 2.0 * (1.0 - self.lam * self.a**2 / 3.0)

    def c_theta(self, theta):
        return 1.0 + (self.lam * self.a**2 / 3.0) * np.cos(np.asarray(theta, dtype=float)) ** 2

    def c_theta_prime(self, theta):
        return -(self.lam * self.a**2 / 3.0) * np.sin(2.0 * np.asarray(theta, dtype=float))

    def rho2(self, r, theta):
        r = np.asarray(r, dtype=float)
        return r * r + self.a**2 * np.cos(np.asarray(theta, dtype=float)) ** 2

    @property
    def roots(self):
        return self._roots


def mu_eval(params: SpacetimeParams, r):
    """Horizon polynomial mu(r); zero exactly at the four horizon radii."""
    return params.mu(r)


@dataclass(frozen=True)
class HorizonStructure:
    """Ordered roots of mu, surface-gravity scales, and chart half-width delta."""

    r_neg: float
    r_C: float
    r_e: float
    r_c: float
    kappa_e: float
    kappa_c: float
    delta: float
    mu_crit: float  # unique interior root of mu', the maximum of mu

    @property
    def width(self):
        return self.r_c - self.r_e

    def midpoint(self):
        return 0.5 * (self.r_e + self.r_c)

    def band(self, epsilon: float):
        """Closed radial band [r_e + epsilon, r_c - epsilon]."""
        return (self.r_e + epsilon, self.r_c - epsilon)

    def chart_domain(self):
        return (self.r_e - self.delta, self.r_c + self.delta)


def horizon_structure(params: SpacetimeParams, delta_request: float | None = None) -> HorizonStructure:
    """Isolate the four roots, fill surface gravities, and shrink delta.

    delta is halved (at most 20 times) until both boundary hypersurfaces
    {r = r_e - delta} and {r = r_c + delta} are spacelike, i.e. the inverse
    metric applied to dr is negative there, and r_e - delta stays above r_C.
    """
    real, _, _ = _quartic_roots(params.lam, params.a, params.mass)
    r_neg, r_C, r_e, r_c = (float(x) for x in real)
    # Extra Newton polish to ~1e-14 relative.
    for _ in range(3):
        r_e = r_e - float(params.mu(r_e) / params.mu_prime(r_e))
        r_c = r_c - float(params.mu(r_c) / params.mu_prime(r_c))

    def kappa(r):
        return abs(float(params.mu_prime(r))) / (2.0 * params.b * (r * r + params.a**2))

    if delta_request is None:
        delta_request = 0.05 * (r_c - r_e)
    delta = float(delta_request)
    for _ in range(21):
        ok = (
            r_e - delta > r_C
            and float(params.mu(r_e - delta)) < 0.0
            and float(params.mu(r_c + delta)) < 0.0
        )
        if ok:
            break
        delta *= 0.5
    else:
        raise KdsError("no admissible delta found after 20 halvings")

    mu_crit = float(optimize.brentq(lambda r: float(params.mu_prime(r)), r_e, r_c, xtol=1e-14))
    return HorizonStructure(
        r_neg=r_neg, r_C=r_C, r_e=r_e, r_c=r_c,
        kappa_e=kappa(r_e), kappa_c=kappa(r_c),
        delta=delta, mu_crit=mu_crit,
    )


@dataclass(frozen=True)
class GaugeFunction:
    """Radial gauge profile f with f(r_e) = -1, f(r_c) = +1.

    ``kind`` is "affine" or "cubic"; the cubic adds kappa*(r-r_e)(r_c-r)/w^2
    on top of the affine profile, which preserves the endpoint values.  The
    combination h = (1 - f^2)/mu is stored in closed form so that the starred
    metric and the flow stay smooth across both horizons.  Every level set
    {t* = const} must be spacelike; :func:`build_gauge` verifies this by a
    numeric scan and rejects the profile otherwise.
    """

    kind: str
    kappa: float
    r_neg: float
    r_C: float
    r_e: float
    r_c: float
    lam: float
    a: float
    b: float

    def f(self, r):
        r = np.asarray(r, dtype=float)
        w = self.r_c - self.r_e
        aff = (2.0 * r - self.r_e - self.r_c) / w
        if self.kind == "affine":
            return aff
        return aff + self.kappa * (r - self.r_e) * (self.r_c - r) / w**2

    def f_prime(self, r):
        r = np.asarray(r, dtype=float)
        w = self.r_c - self.r_e
        if self.kind == "affine":
            return np.full_like(r, 2.0 / w)
        return 2.0 / w + self.kappa * (self.r_e + self.r_c - 2.0 * r) / w**2

    def h(self, r):
        """(1 - f^2)/mu, analytic across both horizons."""
        r = np.asarray(r, dtype=float)
        w = self.r_c - self.r_e
        ghat = (r - self.r_e) * (self.r_c - r) / w**2
        aff = (2.0 * r - self.r_e - self.r_c) / w
        num = 4.0 - 2.0 * self.kappa * aff - self.kappa**2 * ghat
        den = (self.lam / 3.0) * (r - self.r_neg) * (r - self.r_C) * w**2
        return num / den

    def h_prime(self, r):
        r = np.asarray(r, dtype=float)
        w = self.r_c - self.r_e
        ghat = (r - self.r_e) * (self.r_c - r) / w**2
        ghat_p = (self.r_e + self.r_c - 2.0 * r) / w**2
        aff = (2.0 * r - self.r_e - self.r_c) / w
        num = 4.0 - 2.0 * self.kappa * aff - self.kappa**2 * ghat
        num_p = -4.0 * self.kappa / w - self.kappa**2 * ghat_p
        den = (self.lam / 3.0) * (r - self.r_neg) * (r - self.r_C) * w**2
        den_p = (self.lam / 3.0) * ((r - self.r_neg) + (r - self.r_C)) * w**2
        return (num_p * den - num * den_p) / den**2

    def phi_prime(self, params: SpacetimeParams, r):
        return self.b * (np.asarray(r, dtype=float) ** 2 + self.a**2) * self.f(r) / params.mu(r)

    def psi_prime(self, params: SpacetimeParams, r):
        return self.b * self.a * self.f(r) / params.mu(r)


def build_gauge(
    params: SpacetimeParams,
    horizons: HorizonStructure,
    kind: str = "affine",
    coefficients: tuple = (),
    validate: bool = True,
    scan_shape: tuple = (400, 64),
) -> GaugeFunction:
    """Construct a gauge profile and verify the spacelike-slice invariant.

    The scan checks G*(dt*, dt*) < 0 on the full extended chart; a failure
    raises :class:`GaugeInvalidError` with the worst grid location.
    """
    if kind not in ("affine", "cubic"):
        raise GaugeInvalidError(f"unknown gauge kind {kind!r}")
    kappa = float(coefficients[0]) if (kind == "cubic" and coefficients) else 0.0
    gauge = GaugeFunction(
        kind=kind, kappa=kappa,
        r_neg=horizons.r_neg, r_C=horizons.r_C, r_e=horizons.r_e, r_c=horizons.r_c,
        lam=params.lam, a=params.a, b=params.b,
    )
    if validate:
        nr, nth = scan_shape
        lo, hi = horizons.chart_domain()
        r = np.linspace(lo, hi, nr)[:, None]
        th = np.linspace(1e-4, math.pi - 1e-4, nth)[None, :]
        gtt = _inv_tt_starred(params, gauge, r, th)
        worst = float(np.max(gtt))
        if worst >= 0.0:
            idx = np.unravel_index(np.argmax(gtt), gtt.shape)
            raise GaugeInvalidError(
                "level sets of t* are not spacelike for this gauge: "
                f"G*(dt*,dt*) = {worst:.3e} at r = {float(r[idx[0], 0]):.6f}, "
                f"theta = {float(th[0, idx[1]]):.6f}"
            )
    return gauge


def _inv_tt_starred(params: SpacetimeParams, gauge: GaugeFunction, r, theta):
    """G*(dt*, dt*) in the starred chart."""
    s2 = np.sin(theta) ** 2
    c = params.c_theta(theta)
    rho2 = params.rho2(r, theta)
    b = params.b
    h = gauge.h(r)
    r2a2 = np.asarray(r, dtype=float) ** 2 + params.a**2
    return (b * b * params.a**2 * s2 / c - b * b * h * r2a2**2) / rho2


@dataclass(frozen=True)
class StationaryFrame:
    """Frame parameter r0 in [r_e, r_c] and the angular rate a/(r0^2+a^2)."""

    r0: float
    omega: float

    @classmethod
    def build(cls, params: SpacetimeParams, horizons: HorizonStructure, r0: float) -> "StationaryFrame":
        slack = 1e-12 * horizons.r_c
        if not (horizons.r_e - slack <= r0 <= horizons.r_c + slack):
            raise KdsError(f"r0 = {r0} outside [{horizons.r_e}, {horizons.r_c}]")
        return cls(r0=float(r0), omega=params.a / (r0 * r0 + params.a**2))


def frame_set(params: SpacetimeParams, horizons: HorizonStructure) -> dict:
    """The four frames used throughout the certification matrices."""
    return {
        "re": StationaryFrame.build(params, horizons, horizons.r_e),
        "mid": StationaryFrame.build(params, horizons, horizons.midpoint()),
        "mucrit": StationaryFrame.build(params, horizons, horizons.mu_crit),
        "rc": StationaryFrame.build(params, horizons, horizons.r_c),
    }


# ---------------------------------------------------------------------------
# Metric samples
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MetricSample:
    """Metric, inverse, and volume density at one event of a named chart."""

    chart: str
    point: tuple
    g: np.ndarray
    g_inv: np.ndarray
    sqrt_det: float


def _metric_bl(params: SpacetimeParams, r: float, theta: float):
    a, b = params.a, params.b
    s2 = math.sin(theta) ** 2
    c = float(params.c_theta(theta))
    mu = float(params.mu(r))
    rho2 = float(params.rho2(r, theta))
    r2a2 = r * r + a * a
    g = np.zeros((4, 4))
    g[0, 0] = (c * a * a * s2 - mu) / (b * b * rho2)
    g[0, 2] = g[2, 0] = a * s2 * (mu - c * r2a2) / (b * b * rho2)
    g[2, 2] = s2 * (c * r2a2**2 - mu * a * a * s2) / (b * b * rho2)
    g[1, 1] = rho2 / mu
    g[3, 3] = rho2 / c
    gi = np.zeros((4, 4))
    gi[0, 0] = (b * b * a * a * s2 / c - b * b * r2a2**2 / mu) / rho2
    gi[0, 2] = gi[2, 0] = (a * b * b / c - a * b * b * r2a2 / mu) / rho2
    gi[2, 2] = (b * b / (c * s2) - a * a * b * b / mu) / rho2
    gi[1, 1] = mu / rho2
    gi[3, 3] = c / rho2
    return g, gi, rho2


def _metric_starred(params: SpacetimeParams, gauge: GaugeFunction, r: float, theta: float):
    a, b = params.a, params.b
    s2 = math.sin(theta) ** 2
    c = float(params.c_theta(theta))
    mu = float(params.mu(r))
    rho2 = float(params.rho2(r, theta))
    r2a2 = r * r + a * a
    f = float(gauge.f(r))
    h = float(gauge.h(r))
    g = np.zeros((4, 4))
    g[0, 0] = (c * a * a * s2 - mu) / (b * b * rho2)
    g[0, 2] = g[2, 0] = a * s2 * (mu - c * r2a2) / (b * b * rho2)
    g[2, 2] = s2 * (c * r2a2**2 - mu * a * a * s2) / (b * b * rho2)
    g[0, 1] = g[1, 0] = -f / b
    g[1, 2] = g[2, 1] = f * a * s2 / b
    g[1, 1] = rho2 * h
    g[3, 3] = rho2 / c
    gi = np.zeros((4, 4))
    gi[0, 0] = (b * b * a * a * s2 / c - b * b * h * r2a2**2) / rho2
    gi[0, 2] = gi[2, 0] = (a * b * b / c - a * b * b * h * r2a2) / rho2
    gi[2, 2] = (b * b / (c * s2) - a * a * b * b * h) / rho2
    gi[0, 1] = gi[1, 0] = -b * f * r2a2 / rho2
    gi[1, 2] = gi[2, 1] = -a * b * f / rho2
    gi[1, 1] = mu / rho2
    gi[3, 3] = c / rho2
    return g, gi, rho2


def metric_at(
    params: SpacetimeParams,
    horizons: HorizonStructure,
    gauge: GaugeFunction | None,
    chart: str,
    point,
) -> MetricSample:
    """Metric components, inverse, and sqrt|det g| at one event.

    The Boyer-Lindquist chart is only valid strictly between the horizons;
    the starred chart covers (r_e - delta, r_c + delta).  Both spherical
    charts degenerate on the polar axis, which is rejected.
    """
    t, r, phi, theta = (float(x) for x in point)
    if not (0.0 < theta < math.pi):
        raise ChartDomainError(f"theta = {theta} on or beyond the polar axis")
    if chart == BL:
        if not (horizons.r_e < r < horizons.r_c):
            raise ChartDomainError(f"r = {r} outside ({horizons.r_e}, {horizons.r_c})")
        g, gi, rho2 = _metric_bl(params, r, theta)
    elif chart == STARRED:
        lo, hi = horizons.chart_domain()
        if not (lo < r < hi):
            raise ChartDomainError(f"r = {r} outside ({lo}, {hi})")
        if gauge is None:
            raise ChartDomainError("starred chart requires a gauge function")
        g, gi, rho2 = _metric_starred(params, gauge, r, theta)
    else:
        raise ChartDomainError(f"unknown chart {chart!r}")
    sqrt_det = rho2 * math.sin(theta) / params.b**2
    return MetricSample(chart=chart, point=(t, r, phi, theta), g=g, g_inv=gi, sqrt_det=sqrt_det)


# ---------------------------------------------------------------------------
# Causal character of the stationarity generator
# ---------------------------------------------------------------------------

def t_norm(params: SpacetimeParams, frame: StationaryFrame, r, theta):
    """g(T, T) for T = d_t + omega d_phi, in closed form, vectorized.

    Identical in both charts since T involves no dr component.  Negative
    where T is timelike, positive in the ergoregions.
    """
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    a, b = params.a, params.b
    s2 = np.sin(theta) ** 2
    c = params.c_theta(theta)
    rho2 = params.rho2(r, theta)
    r0 = frame.r0
    rho0_sq = r0 * r0 + a * a * np.cos(theta) ** 2
    denom = b * b * rho2 * (r0 * r0 + a * a) ** 2
    return (c * s2 * a * a * (r0 * r0 - r * r) ** 2 - params.mu(r) * rho0_sq**2) / denom


def t_norm_radial_derivative(
    params: SpacetimeParams,
    horizons: HorizonStructure,
    frame: StationaryFrame,
    horizon: str,
    theta=math.pi / 2,
):
    """d/dr of g(T,T) at the chosen horizon, valid only when r0 sits there.

    Equals -mu'(r_h) (r_h^2 + a^2 cos^2 theta) / (b^2 (r_h^2 + a^2)^2);
    negative at the event horizon, positive at the cosmological one.
    """
    if horizon not in ("event", "cosmological"):
        raise KdsError(f"unknown horizon {horizon!r}")
    r_h = horizons.r_e if horizon == "event" else horizons.r_c
    if not math.isclose(frame.r0, r_h, rel_tol=1e-12, abs_tol=1e-12):
        raise FrameMismatchError(
            f"radial-derivative formula requires r0 = {r_h}, got {frame.r0}"
        )
    theta = np.asarray(theta, dtype=float)
    rho0_sq = r_h * r_h + params.a**2 * np.cos(theta) ** 2
    return -params.mu_prime(r_h) * rho0_sq / (params.b**2 * (r_h * r_h + params.a**2) ** 2)


@dataclass(frozen=True)
class ErgoregionMap:
    """Sign classification of g(T,T) on a (r, theta) grid over the DOC."""

    r_grid: np.ndarray
    theta_grid: np.ndarray
    g_tt: np.ndarray           # shape (nr, ntheta)
    labels: np.ndarray         # +1 spacelike, -1 timelike, 0 null-threshold
    n_spacelike_components: int
    collar_r_lo: float
    collar_r_hi: float

    @property
    def collar_width(self):
        return self.collar_r_hi - self.collar_r_lo


def ergoregion_map(
    params: SpacetimeParams,
    horizons: HorizonStructure,
    frame: StationaryFrame,
    nr: int = 200,
    ntheta: int = 100,
) -> ErgoregionMap:
    """Classify the DOC grid by the sign of g(T,T) and measure the collar.

    Radial nodes are cosine-clustered toward both horizons, since the
    ergoregions hug them and would slip between cells of a uniform grid at
    moderate resolution.  Spacelike components are counted with
    4-connectivity; the collar is the maximal contiguous radial run around
    r0 on which T is timelike for every sampled theta.
    """
    u = (np.arange(nr) + 0.5) / nr
    r = horizons.r_e + 0.5 * (horizons.r_c - horizons.r_e) * (1.0 - np.cos(math.pi * u))
    dr = (horizons.r_c - horizons.r_e) / nr
    th = (np.arange(ntheta) + 0.5) * (math.pi / ntheta)
    vals = t_norm(params, frame, r[:, None], th[None, :])
    scale = float(np.max(np.abs(vals)))
    null_tol = 1e-12 * scale
    labels = np.zeros(vals.shape, dtype=np.int8)
    labels[vals > null_tol] = 1
    labels[vals < -null_tol] = -1
    n_comp = int(ndimage.label(labels == 1)[1])

    timelike_col = np.all(labels == -1, axis=1)
    if frame.r0 <= horizons.r_e + dr:
        anchor = 0
    elif frame.r0 >= horizons.r_c - dr:
        anchor = nr - 1
    else:
        anchor = int(np.argmin(np.abs(r - frame.r0)))
    lo = hi = anchor
    if timelike_col[anchor]:
        while lo > 0 and timelike_col[lo - 1]:
            lo -= 1
        while hi < nr - 1 and timelike_col[hi + 1]:
            hi += 1
        left = horizons.r_e if lo == 0 else 0.5 * (r[lo - 1] + r[lo])
        right = horizons.r_c if hi == nr - 1 else 0.5 * (r[hi] + r[hi + 1])
        collar = (left, right)
    else:
        collar = (frame.r0, frame.r0)
    return ErgoregionMap(
        r_grid=r, theta_grid=th, g_tt=vals, labels=labels,
        n_spacelike_components=n_comp,
        collar_r_lo=float(collar[0]), collar_r_hi=float(collar[1]),
    )


# ---------------------------------------------------------------------------
# Fredholm threshold
# ---------------------------------------------------------------------------

def beta_threshold(params: SpacetimeParams, horizons: HorizonStructure) -> float:
    """beta = 2b max over both horizons of (r^2 + a^2)/|mu'(r)|."""
    vals = [
        (r * r + params.a**2) / abs(float(params.mu_prime(r)))
        for r in (horizons.r_e, horizons.r_c)
    ]
    return 2.0 * params.b * max(vals)


def fredholm_window(beta: float, s: float) -> float:
    """Lower boundary (1 - 2s)/(2 beta) of the admissible Im sigma half-plane."""
    if s < 0.5:
        raise KdsError("regularity parameter s must be at least 1/2")
    return (1.0 - 2.0 * s) / (2.0 * beta)
