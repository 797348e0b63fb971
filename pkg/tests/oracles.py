"""Independent oracles used to freeze or cross-check expected values.

Every routine here deliberately avoids the code paths it is used to check:
roots come from mpmath's polynomial solver instead of the numpy companion
matrix, derivatives come from finite differences instead of the closed
forms, chart transfer comes from adaptive quadrature, and the radial mode
solver integrates the separated ODE directly instead of assembling the
collocation pencil.
"""

from __future__ import annotations

import math

import mpmath as mp
import numpy as np
from scipy.integrate import quad, solve_ivp


def quartic_roots_oracle(lam, a, mass, dps=40):
    """All roots of the horizon polynomial via mpmath; reals sorted first."""
    with mp.workdps(dps):
        lamm, aa, mm = mp.mpf(lam), mp.mpf(a), mp.mpf(mass)
        coeffs = [-lamm / 3, mp.mpf(0), 1 - lamm * aa**2 / 3, -2 * mm, aa**2]
        roots = mp.polyroots(coeffs, maxsteps=300, extraprec=200)
        reals = sorted(float(mp.re(r)) for r in roots if abs(mp.im(r)) < mp.mpf("1e-25"))
        return reals, [complex(r) for r in roots]


def fd_gradient(func, x, h=1e-6):
    """Fourth-order central finite-difference gradient of a scalar function."""
    x = np.asarray(x, dtype=float)
    grad = np.zeros_like(x)
    for i in range(x.size):
        hp = h * max(1.0, abs(x[i]))
        e = np.zeros_like(x)
        e[i] = 1.0
        grad[i] = (
            -func(x + 2 * hp * e) + 8 * func(x + hp * e)
            - 8 * func(x - hp * e) + func(x - 2 * hp * e)
        ) / (12.0 * hp)
    return grad


def fd_scalar_derivative(func, x, h=1e-6):
    """Fourth-order central derivative of a scalar function of one variable."""
    return (-func(x + 2 * h) + 8 * func(x + h) - 8 * func(x - h) + func(x - 2 * h)) / (12.0 * h)


def chart_shift_oracle(params, gauge, r_from, r_to, tol=1e-12):
    """(Phi, Psi) increments between two interior radii by adaptive quadrature."""
    phi_val, _ = quad(lambda r: float(gauge.phi_prime(params, r)), r_from, r_to,
                      epsabs=tol, epsrel=tol, limit=400)
    psi_val, _ = quad(lambda r: float(gauge.psi_prime(params, r)), r_from, r_to,
                      epsabs=tol, epsrel=tol, limit=400)
    return phi_val, psi_val


def circular_null_radius_oracle(params, xi_t, xi_phi, r_lo, r_hi, n=4001):
    """Critical radius of F(r) = ((r^2+a^2) xi_t + a xi_phi)^2 / mu(r).

    Pure sampling plus bisection on a dense grid; independent of the closed
    form used by the library.
    """
    rs = np.linspace(r_lo, r_hi, n)
    a = params.a

    def F(r):
        return ((r * r + a * a) * xi_t + a * xi_phi) ** 2 / params.mu(r)

    vals = F(rs)
    i = int(np.argmin(vals))
    if i == 0 or i == n - 1:
        return None
    lo, hi = rs[i - 1], rs[i + 1]
    for _ in range(200):
        m1 = lo + (hi - lo) / 3
        m2 = hi - (hi - lo) / 3
        if F(m1) < F(m2):
            hi = m2
        else:
            lo = m1
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Separated radial mode solver for a = 0 (independent 1D cross-check)
# ---------------------------------------------------------------------------

class RadialModeOracle:
    """Direct integration of the separated radial mode equation at a = 0.

    For the spherically symmetric case the stationary operator splits per
    angular sector l; the eigenfunction is the unique solution analytic at
    both horizons.  We start the integration at each horizon with the
    second-order Taylor expansion of the analytic branch, integrate toward
    the interior with a high-order solver, and define a Wronskian mismatch
    whose zeros in sigma are the mode frequencies.
    """

    def __init__(self, params, horizons, gauge, ell, potential=0.0, eta=1e-6):
        if params.a != 0.0:
            raise ValueError("oracle only valid for a = 0")
        self.params = params
        self.h = horizons
        self.g = gauge
        self.ell = ell
        self.A = potential
        self.eta = eta * (horizons.r_c - horizons.r_e)

    # ODE: mu R'' + (mu' + 2 i sigma f r^2) R' + c0(r) R = 0
    def _c0(self, r, sigma):
        p, g = self.params, self.g
        return (
            1j * sigma * (2.0 * r * g.f(r) + r * r * g.f_prime(r))
            + sigma**2 * g.h(r) * r**4
            - self.ell * (self.ell + 1)
            + self.A * r * r
        )

    def _c0_prime(self, r, sigma, h=1e-6):
        return (self._c0(r + h, sigma) - self._c0(r - h, sigma)) / (2.0 * h)

    def _taylor_start(self, r_h, sigma):
        p, g = self.params, self.g
        mu_p = float(p.mu_prime(r_h))
        mu_pp = float(p.mu_second(r_h))
        f_h = float(g.f(r_h))
        b1 = mu_p + 2j * sigma * f_h * r_h * r_h
        c0 = self._c0(r_h, sigma)
        R0 = 1.0 + 0.0j
        R1 = -c0 * R0 / b1
        d_fr2 = float(g.f_prime(r_h)) * r_h * r_h + 2.0 * r_h * f_h
        b1_p = mu_pp + 2j * sigma * d_fr2
        c0_p = self._c0_prime(r_h, sigma)
        R2 = -(b1_p * R1 + c0_p * R0 + c0 * R1) / (mu_p + b1)
        return R0, R1, R2

    def _shoot(self, r_h, r_stop, sigma):
        p = self.params
        sgn = 1.0 if r_stop > r_h else -1.0
        r_start = r_h + sgn * self.eta
        R0, R1, R2 = self._taylor_start(r_h, sigma)
        d = sgn * self.eta
        y0 = np.array([R0 + R1 * d + 0.5 * R2 * d * d, R1 + R2 * d], dtype=complex)

        def rhs(r, y):
            R, Rp = y
            mu = float(p.mu(r))
            mu_p = float(p.mu_prime(r))
            f = float(self.g.f(r))
            return [Rp, -((mu_p + 2j * sigma * f * r * r) * Rp + self._c0(r, sigma) * R) / mu]

        sol = solve_ivp(rhs, (r_start, r_stop), y0, method="DOP853",
                        rtol=1e-12, atol=1e-14, dense_output=False)
        if not sol.success:
            raise RuntimeError(f"radial shooting failed at sigma={sigma}: {sol.message}")
        return sol.y[0, -1], sol.y[1, -1]

    def mismatch(self, sigma):
        """Wronskian of the two horizon-analytic branches at the midpoint."""
        r_mid = 0.5 * (self.h.r_e + self.h.r_c)
        RL, RLp = self._shoot(self.h.r_e, r_mid, sigma)
        RR, RRp = self._shoot(self.h.r_c, r_mid, sigma)
        nrm = max(abs(RL), abs(RR), abs(RLp), abs(RRp), 1e-300)
        return (RL * RRp - RR * RLp) / nrm**2 * max(abs(RL), abs(RR)) ** 2

    def refine(self, sigma0, tol=1e-10, maxiter=60):
        """Secant iteration on the mismatch from a starting guess."""
        s0 = complex(sigma0)
        s1 = s0 + 1e-4 * (1 + abs(s0))
        w0, w1 = self.mismatch(s0), self.mismatch(s1)
        for _ in range(maxiter):
            if w1 == w0:
                break
            s2 = s1 - w1 * (s1 - s0) / (w1 - w0)
            if not np.isfinite(s2):
                break
            s0, w0, s1, w1 = s1, w1, s2, self.mismatch(s2)
            if abs(s1 - s0) < tol * (1 + abs(s1)):
                return s1
        return s1 if abs(w1) < 1e-6 else None

    def enumerate(self, window, n_re=7, n_im=5, tol=1e-10):
        """Distinct converged roots found from a grid of secant starts."""
        re_lo, re_hi, im_lo, im_hi = window
        found = []
        for re in np.linspace(re_lo, re_hi, n_re):
            for im in np.linspace(im_lo, im_hi, n_im):
                try:
                    root = self.refine(complex(re, im), tol=tol)
                except RuntimeError:
                    continue
                if root is None:
                    continue
                if not (re_lo - 1e-8 <= root.real <= re_hi + 1e-8
                        and im_lo - 1e-8 <= root.imag <= im_hi + 1e-8):
                    continue
                if all(abs(root - f) > 1e-6 * (1 + abs(f)) for f in found):
                    found.append(root)
        return sorted(found, key=lambda z: (round(z.imag, 8), z.real))
