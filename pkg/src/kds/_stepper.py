"""Jitted Dormand-Prince 5(4) bicharacteristic stepper.

One right-hand side serves both charts: the Boyer-Lindquist Hamiltonian is
the starred one with (f, h) = (0, 1/mu).  State layout is
``y = (t, r, phi, theta, xi_t, xi_r, xi_phi, xi_theta)``; xi_t and xi_phi
are structurally constant (their velocities are identically zero).

Control vector layout (see ``CTRL_*`` indices) carries tolerances, the
terminal radial band, the polar guard, conserved-drift budgets, and the
segment bounds used by the chart hand-off logic in :mod:`kds.flow`.
"""

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

# geo layout
G_LAM, G_A, G_MASS, G_B, G_RNEG, G_RC2, G_RE, G_RC, G_KAPPA = range(9)

# ctrl layout
(CTRL_RTOL, CTRL_ATOL, CTRL_HINIT, CTRL_HMIN, CTRL_SMAX,
 CTRL_EXIT_LO, CTRL_EXIT_HI, CTRL_POLE, CTRL_DRIFT,
 CTRL_QREF, CTRL_KREF, CTRL_SCALE0,
 CTRL_SEG_LO, CTRL_SEG_HI, CTRL_SEG_MODE, CTRL_FIXED_H, CTRL_DIR) = range(17)

# terminal / hand-off statuses
ST_EXIT_LOW = 1
ST_EXIT_HIGH = 2
ST_MAX_PARAM = 3
ST_POLE_GUARD = 4
ST_STEP_FAIL = 5
ST_HANDOFF = 6

CHART_BL = 0
CHART_STARRED = 1


@njit(cache=True)
def _mu(geo, r):
    return (-geo[G_LAM] * r**4 / 3.0
            + (1.0 - geo[G_LAM] * geo[G_A] ** 2 / 3.0) * r * r
            - 2.0 * geo[G_MASS] * r + geo[G_A] ** 2)


@njit(cache=True)
def _mu_p(geo, r):
    return (-4.0 * geo[G_LAM] * r**3 / 3.0
            + 2.0 * (1.0 - geo[G_LAM] * geo[G_A] ** 2 / 3.0) * r
            - 2.0 * geo[G_MASS])


@njit(cache=True)
def _gauge_vals(geo, r, chart):
    """Return (f, f', h, h') for the requested chart."""
    if chart == CHART_BL:
        mu = _mu(geo, r)
        return 0.0, 0.0, 1.0 / mu, -_mu_p(geo, r) / (mu * mu)
    r_e, r_c = geo[G_RE], geo[G_RC]
    w = r_c - r_e
    kap = geo[G_KAPPA]
    aff = (2.0 * r - r_e - r_c) / w
    ghat = (r - r_e) * (r_c - r) / (w * w)
    f = aff + kap * ghat
    fp = 2.0 / w + kap * (r_e + r_c - 2.0 * r) / (w * w)
    num = 4.0 - 2.0 * kap * aff - kap * kap * ghat
    nump = -4.0 * kap / w - kap * kap * (r_e + r_c - 2.0 * r) / (w * w)
    den = (geo[G_LAM] / 3.0) * (r - geo[G_RNEG]) * (r - geo[G_RC2]) * w * w
    denp = (geo[G_LAM] / 3.0) * ((r - geo[G_RNEG]) + (r - geo[G_RC2])) * w * w
    h = num / den
    hp = (nump * den - num * denp) / (den * den)
    return f, fp, h, hp


@njit(cache=True)
def _q_value(geo, y, chart):
    """Conformally rescaled Hamiltonian rho^2 G(xi, xi)."""
    r, th = y[1], y[3]
    xt, xr, xp, xth = y[4], y[5], y[6], y[7]
    a, b = geo[G_A], geo[G_B]
    s = np.sin(th)
    s2 = s * s
    c = 1.0 + (geo[G_LAM] * a * a / 3.0) * np.cos(th) ** 2
    mu = _mu(geo, r)
    f, _, h, _ = _gauge_vals(geo, r, chart)
    W = (r * r + a * a) * xt + a * xp
    P = a * s2 * xt + xp
    return (mu * xr * xr - 2.0 * b * f * W * xr
            + b * b * P * P / (c * s2) - b * b * h * W * W + c * xth * xth)


@njit(cache=True)
def _carter(geo, y):
    """Theta-separated conserved quantity c xi_th^2 + b^2 P^2/(c sin^2)."""
    th = y[3]
    xt, xp, xth = y[4], y[6], y[7]
    a, b = geo[G_A], geo[G_B]
    s2 = np.sin(th) ** 2
    c = 1.0 + (geo[G_LAM] * a * a / 3.0) * np.cos(th) ** 2
    P = a * s2 * xt + xp
    return c * xth * xth + b * b * P * P / (c * s2)


@njit(cache=True)
def _rhs(geo, y, chart, dy):
    r, th = y[1], y[3]
    xt, xr, xp, xth = y[4], y[5], y[6], y[7]
    a, b = geo[G_A], geo[G_B]
    s = np.sin(th)
    co = np.cos(th)
    s2 = s * s
    sin2t = 2.0 * s * co
    lam3 = geo[G_LAM] * a * a / 3.0
    c = 1.0 + lam3 * co * co
    cp = -lam3 * sin2t
    mu = _mu(geo, r)
    mup = _mu_p(geo, r)
    f, fp, h, hp = _gauge_vals(geo, r, chart)
    r2a2 = r * r + a * a
    W = r2a2 * xt + a * xp
    P = a * s2 * xt + xp
    cs2 = c * s2
    b2 = b * b

    # dq/dxi
    dq_dxt = -2.0 * b * f * r2a2 * xr + 2.0 * a * b2 * P / c - 2.0 * b2 * h * r2a2 * W
    dq_dxr = 2.0 * mu * xr - 2.0 * b * f * W
    dq_dxp = -2.0 * a * b * f * xr + 2.0 * b2 * P / cs2 - 2.0 * a * b2 * h * W
    dq_dxth = 2.0 * c * xth

    # dq/dx
    dq_dr = (mup * xr * xr - 2.0 * b * (fp * W + 2.0 * r * f * xt) * xr
             - b2 * (hp * W * W + 4.0 * r * h * W * xt))
    dP = a * sin2t * xt
    dcs2 = cp * s2 + c * sin2t
    dq_dth = b2 * (2.0 * P * dP * cs2 - P * P * dcs2) / (cs2 * cs2) + cp * xth * xth

    dy[0] = dq_dxt
    dy[1] = dq_dxr
    dy[2] = dq_dxp
    dy[3] = dq_dxth
    dy[4] = 0.0
    dy[5] = -dq_dr
    dy[6] = 0.0
    dy[7] = -dq_dth


# Dormand-Prince 5(4) coefficients.
_C = np.array([0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0])
_A = np.array([
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
])
_B5 = np.array([35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0])
_E = np.array([71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0,
               -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0])


@njit(cache=True)
def _dp_step(geo, y, h, chart, k, ynew, ytmp):
    """One Dormand-Prince step; fills ynew, returns scaled error vector in k[6] row reuse."""
    _rhs(geo, y, chart, k[0])
    for i in range(1, 6):
        for j in range(8):
            acc = 0.0
            for l in range(i):
                acc += _A[i, l] * k[l, j]
            ytmp[j] = y[j] + h * acc
        _rhs(geo, ytmp, chart, k[i])
    for j in range(8):
        acc = 0.0
        for l in range(6):
            acc += _B5[l] * k[l, j]
        ynew[j] = y[j] + h * acc
    _rhs(geo, ynew, chart, k[6])


@njit(cache=True)
def _err_norm(y, ynew, k, h, rtol, atol):
    err = 0.0
    for j in range(8):
        e = 0.0
        for l in range(7):
            e += _E[l] * k[l, j]
        e *= h
        sc = atol + rtol * max(abs(y[j]), abs(ynew[j]))
        ratio = e / sc
        err += ratio * ratio
    return np.sqrt(err / 8.0)


@njit(cache=True)
def integrate_segment(geo, y, s0, chart, ctrl, rec_s, rec_y, rec_chart, n_rec0):
    """Advance one chart segment until a terminal event or a hand-off.

    Returns (status, s_end, n_rec, n_accept, n_reject, max_dq, max_dK, h_next).
    ``y`` is updated in place to the final state.
    """
    rtol, atol = ctrl[CTRL_RTOL], ctrl[CTRL_ATOL]
    h_min, s_max = ctrl[CTRL_HMIN], ctrl[CTRL_SMAX]
    exit_lo, exit_hi = ctrl[CTRL_EXIT_LO], ctrl[CTRL_EXIT_HI]
    pole = ctrl[CTRL_POLE]
    drift_budget = ctrl[CTRL_DRIFT] * ctrl[CTRL_SCALE0]
    q_ref, k_ref = ctrl[CTRL_QREF], ctrl[CTRL_KREF]
    seg_lo, seg_hi = ctrl[CTRL_SEG_LO], ctrl[CTRL_SEG_HI]
    seg_mode = int(ctrl[CTRL_SEG_MODE])
    fixed_h = ctrl[CTRL_FIXED_H]
    direction = 1.0 if ctrl[CTRL_DIR] >= 0.0 else -1.0

    k = np.zeros((7, 8))
    ynew = np.zeros(8)
    ytmp = np.zeros(8)
    yprev = np.zeros(8)

    s = s0
    h = abs(ctrl[CTRL_HINIT]) * direction
    errold = 1e-4
    n_acc = 0
    n_rej = 0
    n_rec = n_rec0
    max_dq = 0.0
    max_dk = 0.0
    cap = rec_s.shape[0]

    for _ in range(200_000_000):
        if direction * (s - s_max) >= 0.0:
            return ST_MAX_PARAM, s, n_rec, n_acc, n_rej, max_dq, max_dk, h
        if fixed_h > 0.0:
            h = fixed_h * direction
        if direction * (s + h - s_max) > 0.0:
            h = s_max - s

        _dp_step(geo, y, h, chart, k, ynew, ytmp)
        accept = True
        if fixed_h <= 0.0:
            err = _err_norm(y, ynew, k, h, rtol, atol)
            if err > 1.0:
                accept = False
            else:
                dq = abs(_q_value(geo, ynew, chart) - q_ref)
                dk = abs(_carter(geo, ynew) - k_ref)
                if (dq > drift_budget or dk > drift_budget) and abs(h) > 4.0 * h_min:
                    accept = False
                    err = 2.0
            # PI controller (Gustafsson)
            fac = 0.9 * err ** (-0.14) * errold ** 0.08 if err > 0.0 else 5.0
            if fac > 5.0:
                fac = 5.0
            if fac < 0.2:
                fac = 0.2
            if not accept:
                n_rej += 1
                h *= min(fac, 0.5)
                if abs(h) < h_min:
                    return ST_STEP_FAIL, s, n_rec, n_acc, n_rej, max_dq, max_dk, h
                continue
            errold = max(err, 1e-10)
            h_next = h * fac
        else:
            h_next = h

        # accepted
        for j in range(8):
            yprev[j] = y[j]
        s_prev = s
        for j in range(8):
            y[j] = ynew[j]
        s = s + h
        n_acc += 1
        dq = abs(_q_value(geo, y, chart) - q_ref)
        dk = abs(_carter(geo, y) - k_ref)
        if dq > max_dq:
            max_dq = dq
        if dk > max_dk:
            max_dk = dk

        status = 0
        if y[1] <= exit_lo:
            status = ST_EXIT_LOW
        elif y[1] >= exit_hi:
            status = ST_EXIT_HIGH
        elif y[3] <= pole or y[3] >= np.pi - pole:
            status = ST_POLE_GUARD
        elif seg_mode == 0:
            if y[1] <= seg_lo or y[1] >= seg_hi:
                status = ST_HANDOFF
        else:
            if seg_lo < y[1] < seg_hi:
                status = ST_HANDOFF

        if status == ST_EXIT_LOW or status == ST_EXIT_HIGH:
            # land on the boundary by bisection over the step size
            bound = exit_lo if status == ST_EXIT_LOW else exit_hi
            lo_f = 0.0
            hi_f = h
            for _ in range(60):
                mid = 0.5 * (lo_f + hi_f)
                _dp_step(geo, yprev, mid, chart, k, ynew, ytmp)
                crossed = (ynew[1] <= bound) if status == ST_EXIT_LOW else (ynew[1] >= bound)
                if crossed:
                    hi_f = mid
                else:
                    lo_f = mid
            _dp_step(geo, yprev, hi_f, chart, k, ynew, ytmp)
            for j in range(8):
                y[j] = ynew[j]
            s = s_prev + hi_f

        if status != 0 or n_rec < cap:
            if n_rec < cap:
                rec_s[n_rec] = s
                for j in range(8):
                    rec_y[n_rec, j] = y[j]
                rec_chart[n_rec] = chart
                n_rec += 1
        if status != 0:
            return status, s, n_rec, n_acc, n_rej, max_dq, max_dk, h_next
        h = h_next
        if abs(h) < h_min:
            return ST_STEP_FAIL, s, n_rec, n_acc, n_rej, max_dq, max_dk, h

    return ST_STEP_FAIL, s, n_rec, n_acc, n_rej, max_dq, max_dk, h
