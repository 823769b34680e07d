"""Independent re-derivation of the frozen reference values in ``values.py``.

Nothing from the package is imported here. Run ``python tests/oracles/derive.py``
to print the numbers; they were pasted into ``values.py`` once.
"""

import math

import mpmath as mp
from scipy import integrate

mp.mp.dps = 30


def debye(f_ghz, t_c):
    theta = mp.mpf(300) / (mp.mpf("273.15") + t_c)
    eps_s = mp.mpf("77.66") + mp.mpf("103.3") * (theta - 1)
    eps_inf = mp.mpf("5.48")
    f_d = mp.mpf("20.09") - mp.mpf("142.4") * (theta - 1) + 294 * (theta - 1) ** 2
    return eps_inf + (eps_s - eps_inf) / (1 + 1j * mp.mpf(f_ghz) / f_d)


def depolarization_quadrature(e):
    """L along the symmetry axis of an oblate spheroid with semi-axes a < b = c."""
    b = 1.0
    a = math.sqrt(1.0 - e * e)
    f = lambda s: 1.0 / ((s + a * a) ** 1.5 * (s + b * b))
    val, _ = integrate.quad(f, 0, math.inf, epsabs=1e-14, epsrel=1e-13)
    return a * b * b / 2.0 * val


def sphere_alpha(d_mm, eps, denom_sign):
    r3 = (mp.mpf(d_mm) * mp.mpf("1e-3") / 2) ** 3
    return 4 * mp.pi * (eps - 1) / (eps + denom_sign * 2) * r3


def ellipsoid_alpha(d_mm, eps, l, base):
    v = mp.mpf(4) / 3 * mp.pi * (mp.mpf(d_mm) * mp.mpf("1e-3") / 2) ** 3
    return v * (eps - 1) / (base + l * (eps - 1))


def p838_horizontal(f):
    """ITU-R P.838-3 horizontal-polarization regression for k and alpha."""
    aj = [-5.33980, -0.35351, -0.23789, -0.94158]
    bj = [-0.10008, 1.26970, 0.86036, 0.64552]
    cj = [1.13098, 0.45400, 0.15354, 0.16817]
    mk, ck = -0.18961, 0.71147
    aa = [-0.14318, 0.29591, 0.32177, -5.37610, 16.1721]
    ba = [1.82442, 0.77564, 0.63773, -0.96230, -3.29980]
    ca = [-0.55187, 0.19822, 0.13164, 1.47828, 3.43990]
    ma, calpha = 0.67849, -1.95537
    lf = math.log10(f)
    logk = sum(a * math.exp(-(((lf - b) / c) ** 2)) for a, b, c in zip(aj, bj, cj)) + mk * lf + ck
    alpha = sum(a * math.exp(-(((lf - b) / c) ** 2)) for a, b, c in zip(aa, ba, ca)) + ma * lf + calpha
    return 10**logk, alpha


if __name__ == "__main__":
    eps49 = debye("4.9", 20)
    print("eps_w(4.9 GHz, 20 C) =", mp.nstr(eps49, 17))
    eps10 = debye(10, 20)
    print("eps_w(10 GHz, 20 C) =", mp.nstr(eps10, 17))
    print("L_a(e=0.6) quadrature =", repr(depolarization_quadrature(0.6)))
    print("L_a(e=0.3) quadrature =", repr(depolarization_quadrature(0.3)))
    print("L_a(e=0.9) quadrature =", repr(depolarization_quadrature(0.9)))
    with mp.workdps(50):
        for e in (1e-3, 0.02, 0.0499, 0.05, 0.2):
            x = mp.mpf(e)
            print(f"L_a(e={e}) closed form at 50 digits =", repr(float((1 - mp.sqrt(1 - x * x) / x * mp.asin(x)) / (x * x))))
    print("sphere alpha printed (1 mm, 4.9 GHz) =", mp.nstr(sphere_alpha(1, eps49, -1), 17))
    print("sphere alpha textbook (1 mm, 4.9 GHz) =", mp.nstr(sphere_alpha(1, eps49, +1), 17))
    e = math.sqrt(1 - 0.9**2)
    la = depolarization_quadrature(e)
    print("L_a(axis ratio 0.9) =", repr(la))
    print("ellipsoid alpha printed (2 mm, 10 GHz, L_a) =", mp.nstr(ellipsoid_alpha(2, eps10, la, eps10), 17))
    print("ellipsoid alpha textbook (2 mm, 10 GHz, L_a) =", mp.nstr(ellipsoid_alpha(2, eps10, la, 1), 17))
    for d in (0.1, 5.8):
        print(f"v({d} mm) =", repr(9.65 - 10.3 * math.exp(-0.6 * d)))
    for f in (10, 20, 30):
        k, a = p838_horizontal(f)
        print(f"ITU {f} GHz: k={k!r} alpha={a!r} gamma(12.5)={k * 12.5**a!r}")
    w0 = 0.5
    print("squared continuum L2 norm of exp(-x^2/w0^2), w0=0.5:", repr(w0 * math.sqrt(math.pi / 2)))
