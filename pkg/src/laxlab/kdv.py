"""KdV elliptic travelling waves and their spectral data.

The family is the cnoidal wave

    phi(x) = -v/6 - (2/3) alpha^2 (1-2m) - 2 alpha^2 m cn(alpha x + beta, m)^2

solving phi_dot = 6 phi phi' - phi''' in the frame moving with velocity v.
This module provides the closed-form side of the laboratory: branch
points, critical point, local charges, action variable, the dynamical
divisor, the m -> 1 soliton limit and the m -> 0 small-amplitude limit.

Sign conventions for the charges follow the defining integrals

    Q = int dx phi/2,  P = int dx phi^2/2,  E = int dx [phi'^2/2 + phi^3],

which fix the large-u expansion q(u) = L sqrt(u) - Q u^{-1/2}
- (P/4) u^{-3/2} - (E/16) u^{-5/2} - ...
"""

from dataclasses import dataclass

import numpy as np

from .elliptic import complete_E, complete_K, jacobi_sn_cn_dn, jacobi_zeta, _reduce
from .errors import DomainError, NumericalError, PoleError, ValidationError


@dataclass(frozen=True)
class KdvEllipticParams:
    """Cnoidal-wave parameters: velocity, modulus, inverse width, offset."""

    v: float
    m: float
    alpha: float
    beta: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.m <= 1.0):
            raise ValidationError(f"modulus m must lie in [0,1], got {self.m}")
        if not self.alpha > 0.0:
            raise ValidationError(f"alpha must be positive, got {self.alpha}")

    @property
    def K(self):
        return complete_K(self.m) if self.m < 1.0 else np.inf

    @property
    def K_prime(self):
        return complete_K(1.0 - self.m) if self.m > 0.0 else np.inf

    @property
    def E(self):
        return complete_E(self.m)

    @property
    def L(self):
        """Spatial period 2K/alpha; infinite in the soliton limit m=1."""
        return 2.0 * self.K / self.alpha


@dataclass(frozen=True)
class KdvCurveData:
    """Branch points, critical point, charges and action of one state.

    u_hat is (u1, u2, u3) with u1 < u2 <= u3; the semi-infinite cut
    (-inf, u1] is implicit.  galilei holds the boost-invariant (P~, E~).
    Divergent entries (m=1 at fixed alpha) are +-inf.
    """

    u_hat: tuple
    u_crit: float
    phi0: float
    charges: tuple
    action: float
    galilei: tuple


@dataclass(frozen=True)
class KdvUniformized:
    """Point of the uniformized curve: z with u(z), q(z), q~(z), k(z)."""

    z: complex
    u: complex
    q: complex
    q_tilde: complex
    k: complex


def evaluate_state(p, x):
    """Field value phi(x); vectorized over x, L-periodic for m < 1."""
    x = np.asarray(x, dtype=float)
    _, cn, _ = jacobi_sn_cn_dn(p.alpha * x + p.beta + 0j, p.m)
    out = np.asarray(-p.v / 6.0 - (2.0 / 3.0) * p.alpha ** 2 * (1.0 - 2.0 * p.m)
                     - 2.0 * p.alpha ** 2 * p.m * np.real(cn) ** 2)
    return float(out) if out.ndim == 0 else out


def divisor_pole(p, x):
    """Dynamical divisor position u^(x), oscillating in [u2, u3]."""
    x = np.asarray(x, dtype=float)
    _, cn, _ = jacobi_sn_cn_dn(p.alpha * x + p.beta + 0j, p.m)
    out = np.asarray(-p.v / 6.0 + (1.0 - 2.0 * p.m) * p.alpha ** 2 / 3.0
                     + p.alpha ** 2 * p.m * np.real(cn) ** 2)
    return float(out) if out.ndim == 0 else out


def _branch_points(v, m, alpha):
    u1 = -v / 6.0 + (m - 2.0) * alpha ** 2 / 3.0
    u2 = -v / 6.0 + (1.0 - 2.0 * m) * alpha ** 2 / 3.0
    u3 = -v / 6.0 + (m + 1.0) * alpha ** 2 / 3.0
    return u1, u2, u3


def _diverging(bracket, K_over_alpha):
    # bracket * K/alpha with the convention 0 * inf = 0 (charge stays finite)
    if np.isinf(K_over_alpha):
        return 0.0 if bracket == 0.0 else np.sign(bracket) * np.inf
    return bracket * K_over_alpha


def curve_data(p):
    """Closed-form spectral data of the state.

    Charges use the complete-integral expressions consistent with the
    defining densities (checked against direct quadrature); the action
    I = (1/i pi) oint_A u dq has the standard elliptic closed form.
    """
    v, m, a = p.v, p.m, p.alpha
    u1, u2, u3 = _branch_points(v, m, a)
    E = complete_E(m)
    if m < 1.0:
        K = complete_K(m)
        Ka = K / a
        u_crit = u1 + (E / K) * a ** 2
    else:
        K, Ka = np.inf, np.inf
        u_crit = u1
    phi0 = -v / 6.0 - (2.0 / 3.0) * (1.0 - 2.0 * m) * a ** 2

    Q = _diverging(-v / 6.0 + (2.0 / 3.0) * (2.0 - m) * a ** 2, Ka) - 2.0 * a * E
    P = _diverging(v ** 2 / 36.0 - (2.0 / 9.0) * (2.0 - m) * v * a ** 2
                   + (4.0 / 9.0) * (1.0 - m + m ** 2) * a ** 4, Ka) \
        + (2.0 / 3.0) * v * a * E
    En = _diverging(-(v ** 3 / 108.0 - (1.0 / 9.0) * (2.0 - m) * v ** 2 * a ** 2
                      + (4.0 / 9.0) * (1.0 - m + m ** 2) * v * a ** 4
                      - (16.0 / 135.0) * (4.0 - 6.0 * m + 12.0 * m ** 2
                                          - 5.0 * m ** 3) * a ** 6), Ka) \
        + (-v ** 2 / 3.0 - (16.0 / 15.0) * (1.0 - m + m ** 2) * a ** 4) * a * E

    if m < 1.0:
        action = (4.0 * a ** 2 / np.pi) * (
            -E ** 2 + (2.0 / 3.0) * (2.0 - m) * K * E - (1.0 / 3.0) * (1.0 - m) * K ** 2)
        L = 2.0 * K / a
        P_t = P - 2.0 * Q ** 2 / L
        E_t = En - 12.0 * P * Q / L + 16.0 * Q ** 3 / L ** 2
    else:
        action = np.inf
        # infinite-line limit: the boost-invariant charges stay finite
        P_t = (8.0 / 3.0) * a ** 3
        E_t = -(32.0 / 5.0) * a ** 5
    return KdvCurveData(u_hat=(u1, u2, u3), u_crit=u_crit, phi0=phi0,
                        charges=(Q, P, En), action=action, galilei=(P_t, E_t))


def uniformize(p, z):
    """Map a uniformizing parameter z to (u, q, q~, k) on the curve.

    u(z) = -v/6 + (alpha^2/3)(m-2) - alpha^2 cs(z)^2
    q(z) = 2i (Z(z) + cs(z) dn(z)) K
    q~(z) = -2 (Z(z) + cs(z) dn(z)) K' - (pi/K) z
    k(z) = i alpha / sn(z), so that k^2 = u - u3.

    Shifts act as q(z + 2iK' n') = q(z) + 2 pi n' and
    q~(z + 2K n) = q~(z) - 2 pi n.  Requires 0 < m < 1.
    """
    if not (0.0 < p.m < 1.0):
        raise DomainError("uniformize requires 0 < m < 1")
    z = np.asarray(z, dtype=complex)
    K, Kp, a = p.K, p.K_prime, p.alpha
    # poles of cs at the lattice z = 0 (mod 2K, 2iK')
    dx, _ = _reduce(z.real, 2.0 * K)
    dy, _ = _reduce(z.imag, 2.0 * Kp)
    if np.any(np.hypot(dx / (2 * K), dy / (2 * Kp)) < 1e-10):
        raise PoleError("uniformize: z on the pole lattice of cs (z=0 mod periods)")
    sn, cn, dn = jacobi_sn_cn_dn(z, p.m)
    cs = cn / sn
    u = -p.v / 6.0 + a ** 2 * (p.m - 2.0) / 3.0 - a ** 2 * cs ** 2
    zeta = jacobi_zeta(z, p.m)
    core = zeta + cs * dn
    q = 2j * core * K
    q_tilde = -2.0 * core * Kp - (np.pi / K) * z
    k = 1j * a / sn
    if z.ndim == 0:
        return KdvUniformized(z=complex(z), u=complex(u), q=complex(q),
                              q_tilde=complex(q_tilde), k=complex(k))
    return KdvUniformized(z=z, u=u, q=q, q_tilde=q_tilde, k=k)


def invert_u(p, u, prefer_upper=True):
    """Uniformizing z with u(z) = u, by Newton seeded from the m=1 limit.

    The two solutions are +-z (mod lattice); the returned representative
    has Im z in [0, K'] when prefer_upper, with real-z results folded to
    Re z in [0, K].  du/dz = 2 alpha^2 cn dn / sn^3 is exact.
    """
    if not (0.0 < p.m < 1.0):
        raise DomainError("invert_u requires 0 < m < 1")
    a, K, Kp = p.alpha, p.K, p.K_prime
    u = complex(u)
    if not np.isfinite(u):
        raise ValidationError(f"invert_u needs finite u, got {u}")
    phi0 = -p.v / 6.0 + 2.0 * a ** 2 / 3.0
    # m=1 seed: u = phi0 - alpha^2 coth^2(z)
    w = np.sqrt((phi0 - u) / a ** 2 + 0j)
    if abs(w) < 1e-9:
        z = 1j * Kp / 2.0  # u near u3: coth ~ 0 at z ~ iK'... use midpoint seed
    else:
        z = np.arctanh(1.0 / w)
    candidates = [z, -z, np.conj(z), z + 0.3j, z - 0.3j, 0.7 * z + 0.2]
    for z0 in candidates:
        zn = complex(z0)
        ok = False
        for _ in range(60):
            try:
                sn, cn, dn = jacobi_sn_cn_dn(zn, p.m)
            except PoleError:
                break
            if abs(sn) < 1e-12:
                break
            cs = cn / sn
            f = (-p.v / 6.0 + a ** 2 * (p.m - 2.0) / 3.0 - a ** 2 * cs ** 2) - u
            if abs(f) < 1e-12 * max(1.0, abs(u)):
                ok = True
                break
            df = 2.0 * a ** 2 * cn * dn / sn ** 3
            if df == 0:
                break
            step = f / df
            if abs(step) > K:
                step *= K / abs(step)
            zn = zn - step
        if ok:
            # fold into the fundamental cell and fix the +-z ambiguity
            zr, _ = _reduce(zn.real, 2.0 * K)
            zi, _ = _reduce(zn.imag, 2.0 * Kp)
            zn = complex(zr, zi)
            if prefer_upper:
                if zn.imag < -1e-14 * Kp:
                    zn = -zn
                if abs(zn.imag) <= 1e-14 * Kp and zn.real < 0:
                    zn = -zn
            return zn
    raise NumericalError("invert_u", f"Newton failed for u={u}")


@dataclass(frozen=True)
class KdvSolitonData:
    """Infinite-line single soliton: pole of tau, background, charges.

    Q diverges with the window length as Q = Q_rate * L + Q_offset;
    the boost invariants P~ and E~ are finite.
    """

    tau_pole: complex
    phi0: float
    Q_rate: float
    Q_offset: float
    P_tilde: float
    E_tilde: float

    @property
    def charges(self):
        return (self.Q_rate, self.P_tilde, self.E_tilde)


def soliton_data(v, alpha):
    """Closed-form scattering data of the m=1 state on the infinite line."""
    if not alpha > 0:
        raise ValidationError(f"alpha must be positive, got {alpha}")
    phi0 = -v / 6.0 + 2.0 * alpha ** 2 / 3.0
    return KdvSolitonData(
        tau_pole=1j * alpha,
        phi0=phi0,
        Q_rate=phi0 / 2.0,
        Q_offset=-2.0 * alpha,
        P_tilde=(8.0 / 3.0) * alpha ** 3,
        E_tilde=-(32.0 / 5.0) * alpha ** 5,
    )


@dataclass(frozen=True)
class KdvSmallAmplitudeState:
    """Leading Fourier data of the m -> 0 state at fixed (Q, I, L)."""

    mean: float
    fundamental: float       # coefficient of cos(kappa x + 2 beta)
    second_harmonic: float   # coefficient of cos(2 kappa x + 4 beta)
    kappa: float
    m: float
    alpha: float
    v: float


@dataclass(frozen=True)
class KdvSmallAmplitudeCurve:
    """Perturbative curve points and invariant charges at m -> 0."""

    u1: float
    u_crit: float
    u2: float
    u3: float
    P_tilde: float
    E_tilde: float


def small_amplitude(Q, I, L):
    """Plane-wave degeneration at fixed potential shift, action and length.

    Expansions in the action variable I (kappa = 2 pi / L):
        m     = (8/kappa) sqrt(I/2pi)
        v     = -6 kappa Q/pi - kappa^2 + 3 I/pi
        alpha = kappa/2 + sqrt(I/2pi) + 9 I/(4 pi kappa)
        phi   = kappa Q/pi - 2 kappa sqrt(I/2pi) cos(kappa x + 2 beta)
                - (I/pi) cos(2 kappa x + 4 beta) + ...
    """
    if I < 0:
        raise ValidationError(f"action I must be non-negative, got {I}")
    if not L > 0:
        raise ValidationError(f"length L must be positive, got {L}")
    kappa = 2.0 * np.pi / L
    root = np.sqrt(I / (2.0 * np.pi))
    state = KdvSmallAmplitudeState(
        mean=kappa * Q / np.pi,
        fundamental=-2.0 * kappa * root,
        second_harmonic=-I / np.pi,
        kappa=kappa,
        m=8.0 * root / kappa,
        alpha=kappa / 2.0 + root + 9.0 * I / (4.0 * np.pi * kappa),
        v=-6.0 * kappa * Q / np.pi - kappa ** 2 + 3.0 * I / np.pi,
    )
    u1 = kappa * Q / np.pi
    u_crit = u1 + kappa ** 2 / 4.0
    curve = KdvSmallAmplitudeCurve(
        u1=u1,
        u_crit=u_crit,
        u2=u_crit - kappa * root,
        u3=u_crit + kappa * root,
        P_tilde=kappa * I,
        E_tilde=kappa ** 3 * I,
    )
    return state, curve
