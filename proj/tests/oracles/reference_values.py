"""Reference values for the C++ test suite.

Independent of the C++ implementation: mpmath supplies arbitrary-precision
special functions, scipy's DOP853 integrates the wave equation directly.
Run once; the printed JSON is frozen into tests/data/golden.json.
"""
import json

import mpmath as mp
import numpy as np
from scipy.integrate import solve_ivp

mp.mp.dps = 40


def well_coupling(x, q, alpha, strength):
    # strength * e^{-2 alpha |x|} / (1 + q e^{-2 alpha |x|})^2
    u = np.exp(-2.0 * alpha * abs(x))
    return strength * u / (1.0 + q * u) ** 2


def scatter_direct(E, m, lam, q, alpha, rtol=1e-13, atol=1e-15):
    k = np.sqrt(E * E - m * m)
    L = max(25.0 / alpha, 25.0 / k)
    amp = 4.0 * lam * (lam - 1.0)

    def rhs(x, y):
        psi = y[0] + 1j * y[1]
        w = 2.0 * (E + m) * well_coupling(x, q, alpha, amp) - k * k
        d2 = w * psi
        return [y[2], y[3], d2.real, d2.imag]

    psi0 = np.exp(1j * k * L)
    dpsi0 = 1j * k * psi0
    sol = solve_ivp(rhs, (L, -L), [psi0.real, psi0.imag, dpsi0.real, dpsi0.imag],
                    method="DOP853", rtol=rtol, atol=atol)
    y = sol.y[:, -1]
    x = -L
    psi = y[0] + 1j * y[1]
    dpsi = y[2] + 1j * y[3]
    ap = 0.5 * (psi + dpsi / (1j * k)) * np.exp(-1j * k * x)
    am = 0.5 * (psi - dpsi / (1j * k)) * np.exp(1j * k * x)
    return float(abs(am / ap) ** 2), float(1.0 / abs(ap) ** 2)


def left_basis(mu, nu, q, alpha):
    """u(0) and u'(0) for |z|^mu (1-z)^nu 2F1(nu+2mu, nu; 1+2mu; z), z=-q e^{2 alpha x}."""
    z = mp.mpf(-q)
    a, b, c = nu + 2 * mu, nu, 1 + 2 * mu
    F = mp.hyp2f1(a, b, c, z, zeroprec=400)
    dF = a * b / c * mp.hyp2f1(a + 1, b + 1, c + 1, z, zeroprec=400)
    pre = mp.power(q, mu) * mp.power(1 - z, nu)
    u = pre * F
    du = pre * (2 * alpha * mu * F - 2 * alpha * z * nu / (1 - z) * F + 2 * alpha * z * dF)
    return u, du


def scatter_closed(E, m, lam, q, alpha):
    E, m, lam, q, alpha = map(mp.mpf, (E, m, lam, q, alpha))
    k = mp.sqrt(E * E - m * m)
    mu = 1j * k / (2 * alpha)
    nu = mp.mpf(1) / 2 - mp.sqrt(1 - 8 * (E + m) * lam * (lam - 1) / (alpha ** 2 * q)) / 2
    u1, du1 = left_basis(mu, nu, q, alpha)
    u2, du2 = left_basis(-mu, nu, q, alpha)
    w2, dw2 = u2, -du2
    # u1 + B u2 = D w2 ; du1 + B du2 = D dw2
    M = mp.matrix([[u2, -w2], [du2, -dw2]])
    rhs = mp.matrix([-u1, -du1])
    B, D = mp.lu_solve(M, rhs)
    return float(abs(B) ** 2), float(abs(D) ** 2)


def bound_residual(E, m, v0, q, alpha):
    E, m, v0, q, alpha = map(mp.mpf, (E, m, v0, q, alpha))
    kappa = mp.sqrt(m * m - E * E)
    mu = kappa / (2 * alpha)
    nu = mp.mpf(1) / 2 - mp.sqrt(1 + (E + m) * v0 / (alpha ** 2 * q)) / 2
    u, du = left_basis(mu, nu, q, alpha)
    return -2 * u * du


def bound_states_closed(m, v0, q, alpha, n=600):
    eps = 1e-6 * m
    grid = np.linspace(-m + eps, m - eps, n)
    vals = [bound_residual(e, m, v0, q, alpha) for e in grid]
    roots = []
    for i in range(n - 1):
        if vals[i] == 0:
            roots.append(float(grid[i]))
        elif vals[i] * vals[i + 1] < 0:
            from scipy.optimize import brentq
            r = brentq(lambda e: float(bound_residual(e, m, v0, q, alpha)),
                       grid[i], grid[i + 1], xtol=1e-14, rtol=1e-15)
            roots.append(float(r))
    return roots


def bound_states_shooting(m, v0, q, alpha, n=600):
    def mismatch(E):
        kappa = np.sqrt(m * m - E * E)
        L = max(25.0 / alpha, 25.0 / kappa)

        def rhs(x, y):
            w = m * m - E * E - (E + m) * well_coupling(x, q, alpha, v0)
            return [y[1], w * y[0]]

        s = solve_ivp(rhs, (-L, 0.0), [1.0, kappa], method="DOP853", rtol=1e-12, atol=1e-300)
        psi, dpsi = s.y[:, -1]
        # even potential: right solution is the mirror image
        return psi * dpsi

    eps = 1e-6 * m
    grid = np.linspace(-m + eps, m - eps, n)
    vals = [mismatch(e) for e in grid]
    roots = []
    from scipy.optimize import brentq
    for i in range(n - 1):
        if vals[i] * vals[i + 1] < 0:
            roots.append(brentq(mismatch, grid[i], grid[i + 1], xtol=1e-13))
    return roots


def main():
    out = {}
    out["log_gamma_0p5_2i"] = [float(mp.re(mp.loggamma(mp.mpc(0.5, 2)))),
                               float(mp.im(mp.loggamma(mp.mpc(0.5, 2))))]
    lg = {}
    for re, im in [(0.5, 2.0), (-2.5, 0.3), (3.7, -8.0), (0.01, 0.0), (-0.5, -0.5), (12.0, 40.0)]:
        v = mp.loggamma(mp.mpc(re, im))
        lg[f"{re},{im}"] = [float(mp.re(v)), float(mp.im(v))]
    out["log_gamma_table"] = lg

    f = mp.hyp2f1(mp.mpc(0.5, 1), mp.mpc(1, -0.5), 1.5, -3)
    out["hyp2f1_m3"] = [float(mp.re(f)), float(mp.im(f))]
    # Pfaff cross-check of the reference value itself
    a, b, c, z = mp.mpc(0.5, 1), mp.mpc(1, -0.5), mp.mpf(1.5), mp.mpf(-3)
    g = (1 - z) ** (-a) * mp.hyp2f1(a, c - b, c, z / (z - 1))
    assert abs(f - g) < 1e-30

    table = []
    for a, b, c, z in [((0.25, 0.1), (1.5, -0.7), (2.2, 0.3), (-5.0, 0.0)),
                       ((0.5, -31.0), (0.5, -29.0), (1.0, 2.0), (-0.5, 0.0)),
                       ((0.5, -31.0), (0.5, -29.0), (1.0, 2.0), (-5.0, 0.0)),
                       ((1.3, 0.0), (2.3, 0.0), (0.7, 0.0), (-40.0, 0.0)),
                       ((-0.4, 0.2), (0.9, 0.0), (1.1, -0.5), (0.5, 0.8)),
                       ((0.7, 0.0), (1.2, 0.0), (2.5, 0.0), (0.95, 0.0)),
                       ((0.3, 0.4), (0.3, -0.6), (1.2, 0.0), (3.0, 0.9)),
                       ((-1.35, 0.0), (1.0, 0.0), (2.0, 0.0), (-3.0, 0.0)),
                       ((1.0, 0.0), (3.0, 0.0), (2.5, 0.0), (-2.0, 0.0))]:
        v = mp.hyp2f1(mp.mpc(*a), mp.mpc(*b), mp.mpc(*c), mp.mpc(*z))
        table.append({"a": a, "b": b, "c": c, "z": z, "f": [float(mp.re(v)), float(mp.im(v))]})
    out["hyp2f1_table"] = table

    R_d, T_d = scatter_direct(1.5, 1.0, 2.0, 1.0, 1.0)
    R_c, T_c = scatter_closed(1.5, 1.0, 2.0, 1.0, 1.0)
    assert abs(R_d - R_c) < 1e-9 and abs(T_d - T_c) < 1e-9, (R_d, R_c, T_d, T_c)
    out["scatter_m1_a1_q1_l2_E1p5"] = {"R": R_c, "T": T_c, "R_direct": R_d, "T_direct": T_d}

    sc = []
    for E, lam, q, alpha in [(1.2, 3.0, 5.0, 0.5), (3.0, 1.5, 0.5, 2.0), (2.2, 4.0, 0.5, 0.5)]:
        R_c, T_c = scatter_closed(E, 1.0, lam, q, alpha)
        R_d, T_d = scatter_direct(E, 1.0, lam, q, alpha)
        assert abs(R_d - R_c) < 1e-8, (E, lam, q, alpha, R_d, R_c)
        sc.append({"E": E, "lambda": lam, "q": q, "alpha": alpha, "R": R_c, "T": T_c})
    out["scatter_table"] = sc

    bs = {}
    for v0 in [2.0, 10.0, 50.0]:
        closed = bound_states_closed(1.0, v0, 1.0, 1.0)
        shoot = bound_states_shooting(1.0, v0, 1.0, 1.0)
        assert len(closed) == len(shoot), (v0, closed, shoot)
        for x, y in zip(closed, shoot):
            assert abs(x - y) < 1e-8, (v0, x, y)
        bs[str(v0)] = closed
    out["bound_m1_a1_q1"] = bs
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
