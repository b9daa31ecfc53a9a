"""Elliptic integrals, Jacobi elliptic functions, Neville thetas, Jacobi zeta.

Conventions
-----------
Everything takes the *parameter* m, never the modulus k (m = k^2).  The
quarter periods are K := K(m) and K' := K(1-m).  Neville thetas are
normalized so that

    theta_S(z) = (2K/pi) * theta_1(pi z / 2K) / theta_1'(0),
    theta_N(z) = theta_4(pi z / 2K) / theta_4(0),

which gives sn(z,m) = theta_S(z)/theta_N(z) * (theta_N/theta_S scale free),
theta_S(0) = 0, theta_S'(0) = 1 and theta_N(0) = 1.

Real arguments go through the descending Landen (AGM) transform; complex
arguments are split into real and imaginary parts via the addition
formulas, with the imaginary part handled by functions of the
complementary parameter.  Theta series run in the nome q = exp(-pi K'/K),
truncated when a term falls below 1e-16 of the accumulated sum; for
m > 0.999 the series are evaluated in the complementary nome via the
Jacobi imaginary transformation instead.

All functions here are pure; arrays broadcast elementwise in z.
"""

import numpy as np

from .errors import DomainError, NumericalError, PoleError

# Above this parameter the direct nome q = exp(-pi K'/K) converges too
# slowly (q -> 1 as m -> 1), so theta evaluation switches to the
# complementary-nome representation.
COMPLEMENTARY_SWITCH = 0.999

# Arguments closer than this to a lattice pole, measured relative to the
# period cell, raise PoleError: cancellation dominates below it.
POLE_TOL = 1e-10

_EPS = np.finfo(float).eps


def complete_K(m):
    """Complete elliptic integral of the first kind, parameter m in [0,1).

    Computed by the arithmetic-geometric mean, K = pi / (2 AGM(1, sqrt(1-m))).
    """
    m = float(m)
    if m < 0.0 or m >= 1.0:
        raise DomainError(f"complete_K requires 0 <= m < 1, got m={m}")
    a, b = 1.0, np.sqrt(1.0 - m)
    while abs(a - b) > _EPS * a:
        a, b = 0.5 * (a + b), np.sqrt(a * b)
    return np.pi / (2.0 * a)


def complete_K_complement(m1):
    """K(1 - m1) given the complementary parameter m1 = 1 - m.

    Identical to complete_K(1 - m1) in exact arithmetic, but keeps full
    relative accuracy when m1 is so small that 1 - m1 rounds to 1.0
    (K then grows only like log(16/m1), which double handles fine).
    """
    m1 = float(m1)
    if m1 <= 0.0 or m1 > 1.0:
        raise DomainError(f"complete_K_complement requires 0 < m1 <= 1, got m1={m1}")
    a, b = 1.0, np.sqrt(m1)
    while abs(a - b) > _EPS * a:
        a, b = 0.5 * (a + b), np.sqrt(a * b)
    return np.pi / (2.0 * a)


def complete_E(m):
    """Complete elliptic integral of the second kind, parameter m in [0,1]."""
    m = float(m)
    if m < 0.0 or m > 1.0:
        raise DomainError(f"complete_E requires 0 <= m <= 1, got m={m}")
    if m == 1.0:
        return 1.0
    # AGM with the c-sum: E = K (1 - sum 2^(n-1) c_n^2), c_0^2 = m.
    a, b = 1.0, np.sqrt(1.0 - m)
    csum = 0.5 * m
    pow2 = 0.5
    while abs(a - b) > _EPS * a:
        c = 0.5 * (a - b)
        a, b = 0.5 * (a + b), np.sqrt(a * b)
        pow2 *= 2.0
        csum += pow2 * c * c
    K = np.pi / (2.0 * a)
    return K * (1.0 - csum)


def _quarter_periods(m):
    """(K, K') allowing the infinite complement at m=0; m=1 is rejected.

    K' comes from complete_K_complement(m) rather than complete_K(1-m):
    the two agree to roundoff in mid range, but for small m the rounding
    of 1-m perturbs the complement by up to eps/2 absolute, which is a
    large relative error in m itself and detunes K' by ~eps/(2m).
    """
    K = complete_K(m)
    Kp = np.inf if m == 0.0 else complete_K_complement(m)
    return K, Kp


def _reduce(u, period):
    n = np.round(u / period)
    return u - n * period, n


def _sncndn_real(u, m):
    """Jacobi sn, cn, dn for real array u and parameter m in [0,1]."""
    u = np.asarray(u, dtype=float)
    if m == 0.0:
        return np.sin(u), np.cos(u), np.ones_like(u)
    if m == 1.0:
        sech = 1.0 / np.cosh(u)
        return np.tanh(u), sech, sech
    K = complete_K(m)
    u, _ = _reduce(u, 4.0 * K)  # exact period; keeps sin/cos args small
    a, b = 1.0, np.sqrt(1.0 - m)
    a_seq, c_seq = [a], [np.sqrt(m)]
    while abs(a - b) > _EPS * a and len(a_seq) < 32:
        c = 0.5 * (a - b)
        a, b = 0.5 * (a + b), np.sqrt(a * b)
        a_seq.append(a)
        c_seq.append(c)
    N = len(a_seq) - 1
    phi = (2.0 ** N) * a_seq[N] * u
    for n in range(N, 0, -1):
        s = np.clip(c_seq[n] / a_seq[n] * np.sin(phi), -1.0, 1.0)
        phi = 0.5 * (phi + np.arcsin(s))
    sn = np.sin(phi)
    cn = np.cos(phi)
    dn = np.sqrt(np.maximum(1.0 - m * sn * sn, 0.0))
    return sn, cn, dn


def _pole_distance(x, y, m):
    """Distance to the nearest sn/cn/dn pole, in period-cell units."""
    if m == 0.0:
        return np.full(np.shape(x), np.inf)
    if m == 1.0:
        # poles of tanh/sech at z = i pi (n + 1/2)
        dy, _ = _reduce(np.asarray(y) - 0.5 * np.pi, np.pi)
        return np.hypot(np.asarray(x) / np.pi, dy / np.pi)
    K, Kp = _quarter_periods(m)
    dx, _ = _reduce(np.asarray(x), 2.0 * K)
    dy, _ = _reduce(np.asarray(y) - Kp, 2.0 * Kp)
    return np.hypot(dx / (2.0 * K), dy / (2.0 * Kp))


def jacobi_sn_cn_dn(z, m):
    """Jacobi elliptic triple (sn, cn, dn) at complex z, parameter m in [0,1].

    Real and imaginary parts are evaluated separately through the Landen
    transform and recombined with the addition formulas.  For m > 0.999
    the Landen chain loses accuracy (its arcsin steps become
    ill-conditioned), so evaluation switches to theta-function ratios in
    the complementary nome, which stay at machine precision as m -> 1.
    Arguments within POLE_TOL of the pole lattice z = i K' (mod 2K, 2iK')
    raise PoleError.

    Parameters
    ----------
    z : complex scalar or array
    m : real parameter, 0 <= m <= 1

    Returns
    -------
    (sn, cn, dn) : complex scalars or arrays matching z
    """
    m = float(m)
    if m < 0.0 or m > 1.0:
        raise DomainError(f"jacobi_sn_cn_dn requires 0 <= m <= 1, got m={m}")
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    if np.any(_pole_distance(x, y, m) < POLE_TOL):
        raise PoleError(f"jacobi_sn_cn_dn: argument within {POLE_TOL} of a pole")
    if m == 0.0:
        out = (np.sin(z), np.cos(z), np.ones_like(z))
    elif m == 1.0:
        sech = 1.0 / np.cosh(z)
        out = (np.tanh(z), sech, sech)
    elif m > COMPLEMENTARY_SWITCH:
        out = _sncndn_theta(z, m)
    else:
        s1, c1, d1 = _sncndn_real(x, m)
        s2, c2, d2 = _sncndn_real(y, 1.0 - m)
        delta = c2 * c2 + m * (s1 * s2) ** 2
        sn = (s1 * d2 + 1j * c1 * d1 * s2 * c2) / delta
        cn = (c1 * c2 - 1j * s1 * d1 * s2 * d2) / delta
        dn = (d1 * c2 * d2 - 1j * m * s1 * c1 * s2) / delta
        out = (sn, cn, dn)
    if z.ndim == 0:
        return complex(out[0]), complex(out[1]), complex(out[2])
    return out


def _sncndn_theta(z, m):
    K, Kp = _quarter_periods(m)
    return _sncndn_cnome(z, K, Kp)


def _sncndn_cnome(z, K, Kp):
    """sn, cn, dn from theta ratios in the complementary nome (m near 1).

    Takes the quarter periods directly so that callers working from the
    complementary parameter m1 = 1 - m (which can sit far below the
    double-precision resolution of m itself) are not forced through a
    lossy 1 - m1 round trip.  All Jacobi-transformation prefactors cancel
    in the three ratios, so only the reduction signs survive:

        sn = -(2K'/pi) i (-1)^n2 S1(w) C20 / (C2(w) D1)
        cn = (-1)^(n1+n2) theta4(w) C20 / (theta4(0) C2(w))
        dn = (-1)^n1 theta3(w) C20 / (theta3(0) C2(w))

    with w the reduced image of i pi z / (2K').
    """
    q1 = np.exp(-np.pi * K / Kp)
    w_full = 1j * np.pi * z / (2.0 * Kp)
    w, _, n1, n2 = _lattice_reduce(w_full, K / Kp)
    c2w = _theta2_ratio(w, q1)
    c20 = _theta2_ratio(0.0, q1)
    sn = (-2j * Kp / np.pi) * (-1.0) ** n2 * _theta1_ratio(w, q1) * c20 \
        / (c2w * _theta1p0_ratio(q1))
    cn = (-1.0) ** (n1 + n2) * _theta4(w, q1) * c20 / (_theta4(0.0, q1) * c2w)
    dn = (-1.0) ** n1 * _theta3(w, q1) * c20 / (_theta3(0.0, q1) * c2w)
    return sn, cn, dn


# --- theta series ----------------------------------------------------------
#
# theta_1(v) = 2 q^{1/4} sum_{n>=0} (-1)^n q^{n(n+1)} sin((2n+1) v)
# theta_2(v) = 2 q^{1/4} sum_{n>=0}        q^{n(n+1)} cos((2n+1) v)
# theta_4(v) = 1 + 2 sum_{n>=1} (-1)^n q^{n^2} cos(2 n v)
#
# The q^{1/4} prefactor of theta_1 and theta_2 cancels in every ratio used
# here, so the series below omit it.

_TRUNC = 1e-16
_MAX_TERMS = 64


def _series(term_fn, start, first):
    """Sum term_fn(n) from n=start until |term| < _TRUNC * |sum|, twice."""
    total = np.asarray(first, dtype=complex)
    small = 0
    for n in range(start, start + _MAX_TERMS):
        t = term_fn(n)
        total = total + t
        if np.all(np.abs(t) <= _TRUNC * np.maximum(np.abs(total), 1e-300)):
            small += 1
            if small >= 2:
                return total
        else:
            small = 0
    raise NumericalError("theta_series", "no convergence within 64 terms")


def _theta1_ratio(v, q):
    """theta_1(v)/(2 q^{1/4}) as a series in q^{n(n+1)}."""
    return _series(lambda n: (-1.0) ** n * q ** (n * (n + 1)) * np.sin((2 * n + 1) * v),
                   1, np.sin(v))


def _theta1p0_ratio(q):
    """theta_1'(0)/(2 q^{1/4})."""
    return _series(lambda n: (-1.0) ** n * (2 * n + 1) * q ** (n * (n + 1)), 1, 1.0)


def _theta2_ratio(v, q):
    return _series(lambda n: q ** (n * (n + 1)) * np.cos((2 * n + 1) * v), 1, np.cos(v))


def _theta2p_ratio(v, q):
    """theta_2'(v)/(2 q^{1/4})."""
    return _series(lambda n: -(2 * n + 1) * q ** (n * (n + 1)) * np.sin((2 * n + 1) * v),
                   1, -np.sin(v))


def _theta3(v, q):
    return _series(lambda n: 2.0 * q ** (n * n) * np.cos(2 * n * v),
                   2, 1.0 + 2.0 * q * np.cos(2.0 * v))


def _theta4(v, q):
    return _series(lambda n: 2.0 * (-1.0) ** n * q ** (n * n) * np.cos(2 * n * v),
                   2, 1.0 + (-2.0) * q * np.cos(2.0 * v))


def _theta4p(v, q):
    return _series(lambda n: 4.0 * n * (-1.0) ** (n + 1) * q ** (n * n) * np.sin(2 * n * v),
                   2, 4.0 * q * np.sin(2.0 * v))


def _lattice_reduce(v, tau_im):
    """Shift v into the fundamental strip of the lattice (pi, i pi tau_im).

    Returns (v_reduced, base, n1, n2) where n1, n2 are the real and
    imaginary shift counts and base = q^{-n2^2} e^{-2 i n2 v_reduced} is
    the sign-free quasi-periodicity factor, so that

        theta_1(v) = (-1)^(n1+n2) * base * theta_1(v_reduced)
        theta_2(v) = (-1)^(n1)    * base * theta_2(v_reduced)
        theta_4(v) = (-1)^(n2)    * base * theta_4(v_reduced)
    """
    v = np.asarray(v, dtype=complex)
    vr, n1 = _reduce(v.real, np.pi)
    v1 = vr + 1j * v.imag
    if np.isinf(tau_im):
        return v1, np.ones_like(v1), n1, np.zeros_like(n1)
    n2 = np.round(v1.imag / (np.pi * tau_im))
    v2 = v1 - 1j * n2 * np.pi * tau_im
    log_mag = np.pi * tau_im * n2 * n2 + 2.0 * n2 * v2.imag
    if np.any(log_mag > 700.0):
        raise NumericalError("theta_lattice_reduce",
                             "quasi-periodicity factor overflows; |Im z| too large")
    base = np.exp(np.pi * tau_im * n2 * n2 - 2j * n2 * v2)
    return v2, base, n1, n2


def _theta_pair(z, m):
    """(theta_S(z,m), theta_N(z,m)) with the direct/complementary switch."""
    z = np.asarray(z, dtype=complex)
    K, Kp = _quarter_periods(m)
    if m <= COMPLEMENTARY_SWITCH:
        return _theta_pair_direct(z, K, Kp)
    return _theta_pair_cnome(z, K, Kp)


def _theta_pair_direct(z, K, Kp):
    """(theta_S, theta_N) in the direct nome exp(-pi K'/K), explicit periods.

    Kp may be inf (m = 0), in which case the nome is exactly zero and the
    pair degenerates to (sin, 1) scaled by 2K/pi.
    """
    z = np.asarray(z, dtype=complex)
    q = np.exp(-np.pi * Kp / K)
    v = np.pi * z / (2.0 * K)
    v2, base, n1, n2 = _lattice_reduce(v, Kp / K)
    th_s = (2.0 * K / np.pi) * (-1.0) ** (n1 + n2) * base \
        * _theta1_ratio(v2, q) / _theta1p0_ratio(q)
    th_n = (-1.0) ** n2 * base * _theta4(v2, q) / _theta4(0.0, q)
    return th_s, th_n


def _theta_pair_cnome(z, K, Kp):
    """(theta_S, theta_N) via the Jacobi imaginary transformation.

    Period-parametrized so the m1-below-double regime (K from
    complete_K_complement) can reach it; the nome is exp(-pi K/K').
    """
    z = np.asarray(z, dtype=complex)
    q1 = np.exp(-np.pi * K / Kp)
    w = 1j * np.pi * z / (2.0 * Kp)
    gauss = np.exp(-np.pi * z * z / (4.0 * K * Kp))
    w2, base, n1, n2 = _lattice_reduce(w, K / Kp)
    th_s = (2.0 * Kp / np.pi) * (-1j) * gauss * (-1.0) ** (n1 + n2) * base \
        * _theta1_ratio(w2, q1) / _theta1p0_ratio(q1)
    th_n = gauss * (-1.0) ** n1 * base * _theta2_ratio(w2, q1) / _theta2_ratio(0.0, q1)
    return th_s, th_n


def neville_theta(kind, z, m):
    """Neville theta function theta_S or theta_N at complex z.

    kind is "S" (odd; vanishes on the real period lattice, sn numerator)
    or "N" (even, zero-free on the real axis, sn denominator).

    Normalization: theta_S(z) ~ z near 0 and theta_N(0) = 1, so
    sn(z,m) = theta_S(z,m)/theta_N(z,m).
    """
    m = float(m)
    if m < 0.0 or m >= 1.0:
        raise DomainError(f"neville_theta requires 0 <= m < 1, got m={m}")
    kind = str(kind).upper()
    if kind not in ("S", "N"):
        raise DomainError(f"neville_theta kind must be 'S' or 'N', got {kind!r}")
    th_s, th_n = _theta_pair(z, m)
    out = th_s if kind == "S" else th_n
    if np.ndim(z) == 0:
        return complex(out)
    return out


def jacobi_zeta(z, m):
    """Jacobi zeta: Z(z,m) = d/dz log theta_N(z,m).

    Odd in z, vanishes at z = K, and picks up the constant -i pi / K on
    crossing the imaginary period (quasi-periodicity of theta_N).
    """
    m = float(m)
    if m < 0.0 or m >= 1.0:
        raise DomainError(f"jacobi_zeta requires 0 <= m < 1, got m={m}")
    z = np.asarray(z, dtype=complex)
    if m > 0.0 and np.any(_pole_distance(z.real, z.imag, m) < POLE_TOL):
        raise PoleError(f"jacobi_zeta: argument within {POLE_TOL} of a pole")
    K, Kp = _quarter_periods(m)
    if m == 0.0:
        out = np.zeros_like(z)
    elif m <= COMPLEMENTARY_SWITCH:
        out = _zeta_direct(z, K, Kp)
    else:
        out = _zeta_cnome(z, K, Kp)
    if z.ndim == 0:
        return complex(out)
    return out


def _zeta_direct(z, K, Kp):
    """d/dz log theta_N in the direct nome, explicit periods."""
    z = np.asarray(z, dtype=complex)
    q = np.exp(-np.pi * Kp / K)
    v = np.pi * z / (2.0 * K)
    v2, _, _, n2 = _lattice_reduce(v, Kp / K)
    return (np.pi / (2.0 * K)) * (_theta4p(v2, q) / _theta4(v2, q) - 2j * n2)


def _zeta_cnome(z, K, Kp):
    """d/dz log theta_N in the complementary nome, explicit periods."""
    z = np.asarray(z, dtype=complex)
    q1 = np.exp(-np.pi * K / Kp)
    w = 1j * np.pi * z / (2.0 * Kp)
    w2, _, _, n2 = _lattice_reduce(w, K / Kp)
    ratio = _theta2p_ratio(w2, q1) / _theta2_ratio(w2, q1)
    return -np.pi * z / (2.0 * K * Kp) + (1j * np.pi / (2.0 * Kp)) * (ratio - 2j * n2)


class EllipticModulus:
    """Parameter m with its cached quarter periods and E.

    Small convenience bundle used by the model modules; enforces
    0 <= m <= 1 once so downstream code does not re-validate.
    """

    def __init__(self, m):
        m = float(m)
        if m < 0.0 or m > 1.0:
            raise DomainError(f"elliptic parameter must lie in [0,1], got {m}")
        self.m = m

    @property
    def K(self):
        return complete_K(self.m)

    @property
    def K_prime(self):
        return complete_K(1.0 - self.m) if self.m > 0.0 else np.inf

    @property
    def E(self):
        return complete_E(self.m)

    def __repr__(self):
        return f"EllipticModulus(m={self.m})"
