"""Closed-form reference values, independent of the package's numerics.

Everything here works in mpmath at 80 digits from the characteristic
polynomial, so it shares no code path with the power-iteration brackets
it is used to check.
"""

from __future__ import annotations

import mpmath as mp

mp.mp.dps = 80


def _m(a):
    return [[mp.mpf(float(x)) for x in row] for row in a]


def r2(a) -> mp.mpf:
    """Perron root of a nonnegative 2x2 matrix: (tr + sqrt(tr^2 - 4 det)) / 2."""
    (p, q), (s, t) = _m(a)
    tr, det = p + t, p * t - q * s
    disc = tr * tr - 4 * det  # = (p - t)^2 + 4 q s >= 0 for nonnegative entries
    return (tr + mp.sqrt(max(disc, mp.mpf(0)))) / 2


def sym_max_eig2(p, q, t) -> mp.mpf:
    """Largest eigenvalue of the symmetric 2x2 matrix [[p, q], [q, t]]."""
    return (p + t) / 2 + mp.sqrt(((p - t) / 2) ** 2 + q * q)


def op2_2(a) -> mp.mpf:
    """Spectral norm of a 2x2 matrix from the eigenvalues of A^T A."""
    (p, q), (s, t) = _m(a)
    g11, g12, g22 = p * p + s * s, p * q + s * t, q * q + t * t
    return mp.sqrt(sym_max_eig2(g11, g12, g22))


def w2(a) -> mp.mpf:
    """Numerical radius of a nonnegative 2x2 matrix: top eigenvalue of (A + A^T)/2."""
    (p, q), (s, t) = _m(a)
    return sym_max_eig2(p, (q + s) / 2, t)


def r3(a) -> mp.mpf:
    """Perron root of a nonnegative 3x3 matrix via the cubic formula.

    The characteristic polynomial ``x^3 - c2 x^2 + c1 x - c0`` is depressed
    with ``x = y + c2/3`` and solved with Cardano's formula in complex
    arithmetic; the Perron root is the largest real part among the roots.
    """
    m = _m(a)
    c2 = m[0][0] + m[1][1] + m[2][2]
    c1 = (
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
        + m[0][0] * m[2][2] - m[0][2] * m[2][0]
        + m[1][1] * m[2][2] - m[1][2] * m[2][1]
    )
    c0 = (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )
    # y^3 + p y + q with x = y + c2/3
    p = c1 - c2 * c2 / 3
    q = -2 * c2**3 / 27 + c2 * c1 / 3 - c0
    shift = c2 / 3
    if p == 0 and q == 0:
        return max(shift, mp.mpf(0))
    disc = mp.mpc(q * q / 4 + p**3 / 27)
    u = mp.cbrt(-q / 2 + mp.sqrt(disc)) if abs(-q / 2 + mp.sqrt(disc)) > 0 else mp.cbrt(-q / 2 - mp.sqrt(disc))
    omega = mp.mpc(-0.5, mp.sqrt(3) / 2)
    roots = []
    for k in range(3):
        uk = u * omega**k
        y = uk - p / (3 * uk) if uk != 0 else mp.mpc(0)
        roots.append(y + shift)
    # r is itself a root and every root has real part <= |root| <= r, so the
    # largest real part is r; near a double root the imaginary parts are only
    # ~sqrt(eps) small, so filtering on them would be fragile
    return max(max(z.real for z in roots), mp.mpf(0))
