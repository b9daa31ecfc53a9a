"""Heisenberg-magnet states and their spectral data.

The field is the stereographic projection zeta(x) of the unit spin
vector; zeta = 0 is the north-pole vacuum, zeta = infinity the south
pole.  Three closed-form families live here:

  * the genus-one elliptic travelling wave, parametrized by a modulus m,
    an inverse width alpha and two complex half-period offsets c, d,
    with its four branch points, quasi-periodicity angle lambda,
    charges, action variables and direction (divisor) function;
  * spin waves of constant amplitude, the small-amplitude corner;
  * the one-soliton state on the infinite line, reachable from the
    elliptic family by the pinching limit m -> 1 at fixed alpha L.

Charge conventions follow the defining densities

    lambda = -i int dx zeta'/zeta                               (winding)
    P   = int dx (i zeta zbar' - i zeta' zbar)/(1 + zeta zbar)
    E   = int dx 2 zeta' zbar' / (1 + zeta zbar)^2
    J   = int dx (1 - zeta zbar)/(1 + zeta zbar)
    P~  = P - 2 lambda

with lambda reported as the closed-form representative (the raw winding
integral can differ from it by 2 pi in the omega > 0 class).  The
quasi-momentum is anchored by q(z=K) = -lambda/2 and carries the tails
q = L/u - P/2 + (E/4) u + O(u^2) at the u -> 0 puncture and
q = J/u + O(u^-2) at u -> infinity.

The complement 1 - m is stored explicitly (m_complement) so that the
pinching limit, where 1 - m falls far below the double-precision
resolution of m itself, keeps full accuracy in every K-sized quantity.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .elliptic import (COMPLEMENTARY_SWITCH, POLE_TOL, _reduce,
                       _sncndn_cnome, _theta_pair, _theta_pair_cnome,
                       _theta_pair_direct, _zeta_cnome, _zeta_direct,
                       complete_E, complete_K,
                       complete_K_complement, jacobi_sn_cn_dn, jacobi_zeta)
from .errors import DomainError, PoleError, ValidationError

# Small-m threshold under which (2/m)(1 - E/K) switches to its series,
# avoiding the cancellation in 1 - E/K.
_SMALL_M_SERIES = 1e-5


@dataclass(frozen=True)
class ChmEllipticParams:
    """Elliptic travelling-wave parameters.

    alpha is the inverse width, m the elliptic parameter, c and d the
    two complex offsets (real parts on the half-integer K lattice),
    beta a spatial shift and phi the initial angle.  m_complement
    defaults to 1 - m; pass it explicitly when the state is so close
    to the soliton limit that 1 - m underflows in double precision
    (m may then round to exactly 1.0).
    """

    alpha: float
    m: float
    c: complex
    d: complex
    beta: float = 0.0
    phi: float = 0.0
    m_complement: float = None

    def __post_init__(self):
        if not self.alpha > 0.0:
            raise ValidationError(f"alpha must be positive, got {self.alpha}")
        if self.m_complement is None:
            object.__setattr__(self, "m_complement", 1.0 - self.m)
        m1 = self.m_complement
        if not m1 > 0.0:
            raise ValidationError(f"modulus m must lie in [0,1), got m={self.m}")
        if not 0.0 <= self.m <= 1.0 or abs((1.0 - self.m) - m1) > 1e-15:
            raise ValidationError(
                f"inconsistent modulus: m={self.m}, m_complement={m1}")
        K, Kp = self.K, self.K_prime
        for name, val in (("c", self.c), ("d", self.d)):
            frac = np.real(val) / K - 0.5
            if abs(frac - round(frac)) > 1e-9:
                raise ValidationError(
                    f"Re({name}) must sit on the half-integer K lattice, "
                    f"got {name}={val} with K={K}")
        # the combination d+c or d-c with Re on the even lattice is the
        # constrained one; its imaginary part must stay inside the strip
        constrained = self.d + self.c if self.omega_positive else self.d - self.c
        if np.isfinite(Kp) and abs(constrained.imag) >= Kp * (1.0 - 1e-12):
            raise ValidationError(
                f"|Im(d{'+' if self.omega_positive else '-'}c)| = "
                f"{abs(constrained.imag)} leaves the fundamental strip K' = {Kp}")

    @property
    def K(self):
        m1 = self.m_complement
        return complete_K_complement(m1) if m1 < 0.5 else complete_K(self.m)

    @property
    def K_prime(self):
        m1 = self.m_complement
        if m1 >= 1.0:
            return np.inf
        # mirror of K: for small m the AGM over the exact m is the
        # full-precision route, complete_K(m1) would re-round 1 - m1
        return complete_K_complement(self.m) if self.m < 0.5 else complete_K(m1)

    @property
    def E(self):
        return complete_E(self.m)

    @property
    def L(self):
        """Spatial period 2K/alpha."""
        return 2.0 * self.K / self.alpha

    @property
    def omega_positive(self):
        """True when Re(d+c) sits on the even K lattice (omega > 0 class)."""
        return round((self.d + self.c).real / self.K) % 2 == 0


class ChmDerived(NamedTuple):
    """Derived constants of one elliptic state (see derive_params)."""

    g1: complex
    g2: complex
    g3: complex
    g4: complex
    omega: float
    v: float
    lam: float
    L: float


@dataclass(frozen=True)
class ChmCurveData:
    """Branch points, quasi-periodicity angle, charges and actions.

    u_hat is (u1, u2, u3, u4) with u3 = u1*, u4 = u2*; charges holds
    (P, E, J) and alt_P the boost-related P~; actions are the two cut
    integrals (I1, I2) and alt_actions their south-pole counterparts
    (I~1, I~2) = (I1 + 2J, I2).  mode_numbers = (-lam/2pi, -(lam+2pi)/2pi).
    """

    u_hat: tuple
    lam: float
    charges: tuple
    alt_P: float
    actions: tuple
    alt_actions: tuple
    mode_numbers: tuple


class _PeriodCell:
    """Quarter periods plus function dispatch for one parameter value.

    Past the complementary switch the public API would recompute the
    quarter periods from the rounded 1 - m_complement, detuning the
    lattice; calling the complementary-nome internals with the periods
    derived from the exact complement keeps the pinching regime at
    machine precision (m there may even round to 1.0).  The mirrored
    regime m < 1 - switch has the same disease in the addition-formula
    branch (it evaluates the imaginary part at the rounded 1 - m), so
    there sn, cn, dn go through the imaginary transform of the
    complementary-nome ratios and the thetas through the direct nome,
    all parametrized by the exact-m periods.
    """

    def __init__(self, p):
        self.m, self.m1 = p.m, p.m_complement
        self.K, self.Kp = p.K, p.K_prime
        self.Em = complete_E(self.m)
        self.deep = self.m1 < 1.0 - COMPLEMENTARY_SWITCH
        self.shallow = 0.0 < self.m < 1.0 - COMPLEMENTARY_SWITCH

    def sncndn(self, z):
        z = np.asarray(z, dtype=complex)
        if self.deep:
            return _sncndn_cnome(z, self.K, self.Kp)
        if self.shallow:
            # sn(iu,m) = i sn/cn(u,m1) etc. with (K1, K1') = (K', K)
            s1, c1, d1 = _sncndn_cnome(1j * z, self.Kp, self.K)
            return -1j * s1 / c1, 1.0 / c1, d1 / c1
        return jacobi_sn_cn_dn(z, self.m)

    def theta_pair(self, z):
        z = np.asarray(z, dtype=complex)
        if self.deep:
            return _theta_pair_cnome(z, self.K, self.Kp)
        if self.shallow:
            return _theta_pair_direct(z, self.K, self.Kp)
        return _theta_pair(z, self.m)

    def zeta_fn(self, z):
        z = np.asarray(z, dtype=complex)
        if self.deep:
            return _zeta_cnome(z, self.K, self.Kp)
        if self.shallow:
            return _zeta_direct(z, self.K, self.Kp)
        return jacobi_zeta(z, self.m)


def _assert_real(value, scale, what):
    if abs(np.imag(value)) > 1e-10 * max(1.0, scale):
        raise ValidationError(
            f"reality violation: {what} = {value} is not real; "
            "parameters leave the reality class")
    return float(np.real(value))


def derive_params(p):
    """Constants of the curve: g1..g4, omega, v, lambda, L.

    The four g_k are the roots of the quartic G'^2 = -(G-g1)...(G-g4)
    satisfied by G = -i zeta'/zeta; omega = alpha^2 m (sn^2(d-c) -
    sn^2(d+c)), v the transport velocity, lambda the quasi-periodicity
    angle 2i[Z(d-c) - Z(d+c)]K.  Raises when the conjugation pairing
    {g3,g4} = {g1*,g2*} fails beyond 1e-10.
    """
    cell = _PeriodCell(p)
    a, m = p.alpha, p.m
    sd, cd_, dd = cell.sncndn(p.d)
    sc, cc, dc = cell.sncndn(p.c)
    smin, _, _ = cell.sncndn(p.d - p.c)
    splus, _, _ = cell.sncndn(p.d + p.c)
    g1 = 1j * a * (dd / cd_) * (dc / cc) * (smin - splus)
    g2 = 1j * a * m * (cd_ / dd) * (cc / dc) * (smin - splus)
    g3 = 1j * a * (smin + splus) / (sd * sc)
    g4 = 1j * a * m * sd * sc * (smin + splus)
    scale = max(abs(g1), abs(g2), abs(g3), abs(g4), 1.0)
    direct = max(abs(g3 - np.conj(g1)), abs(g4 - np.conj(g2)))
    swapped = max(abs(g3 - np.conj(g2)), abs(g4 - np.conj(g1)))
    if min(direct, swapped) > 1e-10 * scale:
        raise ValidationError(
            "reality violation: {g3,g4} do not pair with {g1*,g2*} "
            f"(residual {min(direct, swapped):.3e})")
    den = smin ** 2 - splus ** 2
    omega = _assert_real(a ** 2 * m * den, scale ** 2, "omega")
    fmin = np.prod(cell.sncndn(p.d - p.c))
    fplus = np.prod(cell.sncndn(p.d + p.c))
    v = _assert_real(2j * a * (fmin - fplus) / den, scale, "v")
    lam_val = 2j * (cell.zeta_fn(p.d - p.c) - cell.zeta_fn(p.d + p.c)) * cell.K
    lam = _assert_real(lam_val, 2.0 * np.pi, "lambda")
    return ChmDerived(g1=g1, g2=g2, g3=g3, g4=g4,
                      omega=omega, v=v, lam=lam, L=p.L)


def _theta_s_pole_mask(w, im_part, K, Kp):
    """True where theta_S(w + i im_part) sits on its zero lattice."""
    dx, _ = _reduce(np.asarray(w, dtype=float), 2.0 * K)
    if np.isinf(Kp):
        return np.hypot(dx / (2.0 * K), im_part) < POLE_TOL
    dy, _ = _reduce(im_part, 2.0 * Kp)
    return np.hypot(dx / (2.0 * K), dy / (2.0 * Kp)) < POLE_TOL


def evaluate_state(p, x):
    """Stereographic field zeta(x); vectorized over x.

    zeta(x) = e^{i lambda w / 2K + i phi} [theta_N(d+c)/theta_N(d-c)]
              [theta_S(w+d-c)/theta_S(w+d+c)],  w = alpha x + beta,

    quasi-periodic with multiplier e^{i lambda} over one period L.
    Points where the denominator theta hits its zero lattice raise
    PoleError (the spin there points to the south pole).
    """
    cell = _PeriodCell(p)
    lam = derive_params(p).lam
    x = np.asarray(x, dtype=float)
    w = p.alpha * x + p.beta
    if np.any(_theta_s_pole_mask(w + (p.d + p.c).real, (p.d + p.c).imag,
                                 cell.K, cell.Kp)):
        raise PoleError("evaluate_state: theta_S argument on its zero lattice")
    _, n_plus = cell.theta_pair(p.d + p.c)
    _, n_min = cell.theta_pair(p.d - p.c)
    s_num, _ = cell.theta_pair(w + p.d - p.c)
    s_den, _ = cell.theta_pair(w + p.d + p.c)
    out = np.exp(1j * lam * w / (2.0 * cell.K) + 1j * p.phi) \
        * (n_plus / n_min) * (s_num / s_den)
    return complex(out) if out.ndim == 0 else out


def _j_ratio(m, Em, K):
    # (2/m)(1 - E/K) without the small-m cancellation
    if m < _SMALL_M_SERIES:
        return 1.0 + m / 8.0 + m * m / 16.0
    return 2.0 * (1.0 - Em / K) / m


def curve_data(p):
    """Closed-form spectral data of one elliptic state.

    Branch points u_hat_k = -(2/omega) g_k; charges

        P = L(-v - 2 i alpha Z(d+c)) + 2 pi,   P~ = P - 2 lambda,
        E = 2 alpha^2 L (E(m)/K + cs^2(2d)),
        J = L [(2/m)(1-E(m)/K) - sn^2(d+c) - sn^2(d-c)]
              / (sn^2(d-c) - sn^2(d+c)),

    and actions I1 = (-LP + (L-J)(lambda+2pi))/2pi, I2 = (LP -
    (L-J)lambda)/2pi, with the south-pole pair (I1 + 2J, I2).  In the
    degenerate vacuum omega = 0 the branch points run off to infinity.
    """
    der = derive_params(p)
    cell = _PeriodCell(p)
    a, m, L, lam = p.alpha, p.m, der.L, der.lam
    if der.omega != 0.0:
        u_hat = tuple(-2.0 / der.omega * g for g in
                      (der.g1, der.g2, der.g3, der.g4))
    else:
        u_hat = (complex(np.inf, 0.0),) * 4
    z_plus = cell.zeta_fn(p.d + p.c)
    P = _assert_real(L * (-der.v - 2j * a * z_plus) + 2.0 * np.pi,
                     abs(L * der.v) + 1.0, "P")
    s2d, c2d, _ = cell.sncndn(2.0 * p.d)
    E_val = _assert_real(
        2.0 * a ** 2 * L * (cell.Em / cell.K + (c2d / s2d) ** 2),
        a ** 2 * L, "E")
    smin, _, _ = cell.sncndn(p.d - p.c)
    splus, _, _ = cell.sncndn(p.d + p.c)
    den = smin ** 2 - splus ** 2
    J = _assert_real(
        L * (_j_ratio(m, cell.Em, cell.K) - splus ** 2 - smin ** 2) / den,
        L, "J")
    I1 = (-L * P + (L - J) * (lam + 2.0 * np.pi)) / (2.0 * np.pi)
    I2 = (L * P - (L - J) * lam) / (2.0 * np.pi)
    return ChmCurveData(
        u_hat=u_hat, lam=lam, charges=(P, E_val, J), alt_P=P - 2.0 * lam,
        actions=(I1, I2), alt_actions=(I1 + 2.0 * J, I2),
        mode_numbers=(-lam / (2.0 * np.pi), -(lam + 2.0 * np.pi) / (2.0 * np.pi)))


def _lattice_distance(z, K, Kp):
    """Distance of z to the origin lattice (2K, 2iK'), in cell units."""
    z = np.asarray(z, dtype=complex)
    dx, _ = _reduce(z.real, 2.0 * K)
    dy, _ = _reduce(z.imag, 2.0 * Kp)
    return np.hypot(dx / (2.0 * K), dy / (2.0 * Kp))


def uniformize(p, z):
    """Spectral parameter u(z) and quasi-momentum q(z); needs 0 < m < 1.

    u(z) = (i/(alpha m)) [(1 - m sn^2 d sn^2 c)/(sn d cn d dn d)]
           [(1 - m sn^2 d sn^2 z)/(sn^2 c - sn^2 z)]
    q(z) = i [Z(d-z) - Z(d-c) - Z(d+z) + Z(d+c)] K

    Symmetries: u(-z) = u(z), q(-z) = -lambda - q(z), q(z+2K) = q(z),
    q(z+2iK') = q(z) - 2 pi; anchors q(K) = -lambda/2, q(c) = 0.  At
    z = +-c (mod lattice) u has its pole and (inf, q) is returned; the
    q poles at z = +-(d - iK') raise PoleError.
    """
    if p.m == 0.0:
        raise DomainError("uniformize requires 0 < m < 1")
    cell = _PeriodCell(p)
    a, m, K, Kp = p.alpha, p.m, cell.K, cell.Kp
    z = np.asarray(z, dtype=complex)
    for sgn in (1.0, -1.0):
        if np.any(_lattice_distance(z - sgn * (p.d - 1j * Kp), K, Kp) < POLE_TOL):
            raise PoleError("uniformize: q has a pole at z = +-(d - iK')")
    sd, cd_, dd = cell.sncndn(p.d)
    sc, _, _ = cell.sncndn(p.c)
    pref = (1j / (a * m)) * (1.0 - m * sd ** 2 * sc ** 2) / (sd * cd_ * dd)
    # near the sn pole lattice switch to ns^2 = m^2 sn^2(z - iK'),
    # which the ratio below carries without cancellation
    near_pole = _lattice_distance(z - 1j * Kp, K, Kp) < 0.25
    z_safe = np.where(near_pole, z - 1j * Kp, z)
    sn_z, _, _ = cell.sncndn(z_safe)
    sn_z = np.asarray(sn_z)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio_direct = (1.0 - m * sd ** 2 * sn_z ** 2) / (sc ** 2 - sn_z ** 2)
        ns2 = m ** 2 * sn_z ** 2
        ratio_shift = (ns2 - m * sd ** 2) / (sc ** 2 * ns2 - 1.0)
        u = pref * np.where(near_pole, ratio_shift, ratio_direct)
    at_c = (_lattice_distance(z - p.c, K, Kp) < POLE_TOL) \
        | (_lattice_distance(z + p.c, K, Kp) < POLE_TOL)
    u = np.where(at_c, complex(np.inf, 0.0), u)
    q = 1j * (cell.zeta_fn(p.d - z) - cell.zeta_fn(p.d - p.c)
              - cell.zeta_fn(p.d + z) + cell.zeta_fn(p.d + p.c)) * K
    if z.ndim == 0:
        return complex(u), complex(q)
    return u, q


def direction_function(p, x, z):
    """Divisor (direction) function varpi(x, z); vectorized over x.

    varpi = e^{i lambda w/2K + i phi} theta_S(z-c) theta_N(w-c-z)
            / (theta_S(z+c) theta_N(w+c-z)),  w = alpha x + beta.

    Quasi-periodic like the state, varpi(x+L) = e^{i lambda} varpi(x);
    at z = -d + iK' it reduces to zeta(x) and at z = d - iK' to
    -1/conj(zeta(x)) for real x.
    """
    cell = _PeriodCell(p)
    lam = derive_params(p).lam
    K, Kp = cell.K, cell.Kp
    z = complex(z)
    if _lattice_distance(z + p.c, K, Kp) < POLE_TOL:
        raise PoleError("direction_function: theta_S(z+c) zero")
    x = np.asarray(x, dtype=float)
    w = p.alpha * x + p.beta
    arg_den = w + (p.c - z).real + 1j * (p.c - z).imag
    if np.any(_lattice_distance(arg_den - 1j * Kp, K, Kp) < POLE_TOL):
        raise PoleError("direction_function: theta_N(w+c-z) zero")
    s_num, _ = cell.theta_pair(z - p.c)
    s_den, _ = cell.theta_pair(z + p.c)
    _, n_num = cell.theta_pair(w - p.c - z)
    _, n_den = cell.theta_pair(arg_den)
    out = np.exp(1j * lam * w / (2.0 * K) + 1j * p.phi) \
        * (s_num / s_den) * (n_num / n_den)
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ChmSpinWaveState:
    """Constant-amplitude wave zeta(x) = tan(theta/2) e^{-i kappa x + i phi}."""

    theta: float
    n: int
    L: float
    phi: float

    @property
    def kappa(self):
        return 2.0 * np.pi * self.n / self.L

    @property
    def amplitude(self):
        return np.tan(self.theta / 2.0)

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        out = self.amplitude * np.exp(-1j * self.kappa * x + 1j * self.phi)
        return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ChmSpinWaveCurve:
    """One-cut curve of a spin wave.

    The single pair (u_hat, u_hat*) bounds a vertical cut; lam is the
    quasi-periodicity representative -2 pi n, so the cut carries mode
    number n and the whole action I = L(1 - cos theta) sits on it:
    actions = (I, 0).
    """

    u_hat: complex
    lam: float
    charges: tuple
    action: float
    actions: tuple
    mode_numbers: tuple

    def q_of(self, u):
        """Closed-form quasi-momentum q(u) = pi n + (pi n/u) sqrt((u-u_hat)(u-u_hat*)).

        The square root takes the principal branch in each factor (cut
        on the vertical segment, real-positive on the real axis), which
        fixes one sheet; cos(q) is branch-independent.
        """
        u = np.asarray(u, dtype=complex)
        n = self.mode_numbers[0]
        root = np.sqrt(u - self.u_hat) * np.sqrt(u - np.conj(self.u_hat))
        out = np.pi * n + (np.pi * n / u) * root
        return complex(out) if out.ndim == 0 else out


def spin_wave(theta, n, L, phi=0.0):
    """Spin-wave state and curve for amplitude theta, mode n, period L.

    Charges: P = -2 pi n (1 - cos theta), E = (2 pi^2 n^2/L) sin^2 theta,
    J = L cos theta; action I = L(1 - cos theta); branch point
    u_hat = (L/pi n) e^{i sign(n) theta}.
    """
    if not L > 0:
        raise ValidationError(f"length L must be positive, got {L}")
    if int(n) != n or n == 0:
        raise ValidationError(f"mode number n must be a nonzero integer, got {n}")
    if not 0.0 <= theta <= np.pi:
        raise ValidationError(f"theta must lie in [0, pi], got {theta}")
    n = int(n)
    state = ChmSpinWaveState(theta=float(theta), n=n, L=float(L), phi=float(phi))
    u_hat = (L / (np.pi * n)) * np.exp(1j * np.sign(n) * theta)
    P = -2.0 * np.pi * n * (1.0 - np.cos(theta))
    E = (2.0 * np.pi ** 2 * n ** 2 / L) * np.sin(theta) ** 2
    J = L * np.cos(theta)
    action = L * (1.0 - np.cos(theta))
    curve = ChmSpinWaveCurve(
        u_hat=u_hat, lam=-2.0 * np.pi * n, charges=(P, E, J), action=action,
        actions=(action, 0.0), mode_numbers=(n, n - 1))
    return state, curve


@dataclass(frozen=True)
class ChmSolitonState:
    """One soliton on the infinite line: momentum kappa_hat, centre y, phase phi.

    zeta(x) = e^{2i Re(k)(x-y) + i phi} i sin(arg k) / cosh(2 Im(k)(x-y) - i arg k)

    with k = kappa_hat.  The angular momentum deficit relative to the
    north-pole background is delta_J; P and E are absolute.
    """

    kappa_hat: complex
    y: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        if not self.kappa_hat.imag > 0:
            raise ValidationError(
                f"Im(kappa_hat) must be positive, got {self.kappa_hat}")

    @property
    def P(self):
        return 4.0 * np.angle(self.kappa_hat)

    @property
    def E(self):
        return 8.0 * self.kappa_hat.imag

    @property
    def delta_J(self):
        return -2.0 * self.kappa_hat.imag / abs(self.kappa_hat) ** 2

    @property
    def charges(self):
        return (self.P, self.E, self.delta_J)

    @property
    def u_hat(self):
        """Pinched branch-point pair location -1/kappa_hat."""
        return -1.0 / self.kappa_hat

    def evaluate(self, x):
        k = self.kappa_hat
        arg = np.angle(k)
        x = np.asarray(x, dtype=float)
        out = np.exp(2j * k.real * (x - self.y) + 1j * self.phi) \
            * 1j * np.sin(arg) / np.cosh(2.0 * k.imag * (x - self.y) - 1j * arg)
        return complex(out) if out.ndim == 0 else out


def soliton(kappa_hat, y=0.0, phi=0.0):
    """Infinite-line soliton state for momentum kappa_hat (Im > 0)."""
    return ChmSolitonState(kappa_hat=complex(kappa_hat), y=float(y),
                           phi=float(phi))


@dataclass(frozen=True)
class ChmScatterPoint:
    """Discrete scattering datum: soliton momentum, multiplicity, coefficient.

    mu is the dynamical coefficient; it locates the soliton but does
    not enter conserved quantities, so it is stored without validation.
    """

    kappa_hat: complex
    multiplicity: int = 1
    mu: complex = 0.0

    def __post_init__(self):
        if not self.kappa_hat.imag > 0:
            raise ValidationError(
                f"Im(kappa_hat) must be positive, got {self.kappa_hat}")
        if int(self.multiplicity) != self.multiplicity or self.multiplicity < 1:
            raise ValidationError(
                f"multiplicity must be a positive integer, got {self.multiplicity}")


def soliton_limit_params(kappa_hat, L, gamma=0.0, delta=0.0):
    """Elliptic parameters pinching to the soliton of momentum kappa_hat.

    Along the family m = 1 - 16 e^{-alpha L} with alpha = 2 Im kappa_hat;
    the offsets spiral as

        d = -K/2 + i (delta alpha L/4 + gamma/2 + pi/2 - arg kappa_hat)
        c = +K/2 - i (delta alpha L/4 + gamma/2)

    so that the branch-point pair u_hat_2,4 closes on -1/kappa_hat with
    separation ~ 4 |Im(-1/kappa_hat)| e^{-alpha L/2}.  With delta =
    -cot(arg kappa_hat) the quasi-periodicity angle is pinned at
    lambda = 2 gamma for every length.
    """
    kappa_hat = complex(kappa_hat)
    if not kappa_hat.imag > 0:
        raise ValidationError(f"Im(kappa_hat) must be positive, got {kappa_hat}")
    if not L > 0:
        raise ValidationError(f"length L must be positive, got {L}")
    alpha = 2.0 * kappa_hat.imag
    aL = alpha * L
    m1 = 16.0 * np.exp(-aL)
    if m1 >= 1.0:
        raise ValidationError(
            f"alpha L = {aL} too short for the pinching regime (needs m < 1)")
    K = complete_K_complement(m1)
    shift = delta * aL / 4.0 + gamma / 2.0
    d = -K / 2.0 + 1j * (shift + np.pi / 2.0 - np.angle(kappa_hat))
    c = K / 2.0 - 1j * shift
    return ChmEllipticParams(alpha=alpha, m=1.0 - m1, c=c, d=d,
                             beta=0.0, phi=0.0, m_complement=m1)
