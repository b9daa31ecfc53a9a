"""Parallel transport of the 2x2 auxiliary linear problems.

Both models reduce to the same mechanics: a StateProfile carries the
field and its periodicity data, an adaptive Dormand-Prince RK5(4)
integrator moves the 2x2 frame W along x with W' = A(u;x) W, and the
derived quantities are questions asked of W: the monodromy trace (with
the quasi-periodicity twist absorbed, so it is base-point independent),
branch points where the trace reaches +-1, and the dynamical divisor
where the monodromy eigenvector aligns with a reference direction.

Connections:

    KdV (schroedinger basis)      A = [[0, 1], [phi - u, 0]]
    KdV (asymptotic-diagonal)     M A M^-1 with M = [[-ik, 1], [ik, 1]],
                                  k = sqrt(u - phi0)
    CHM (natural basis)           A = i/(u(1+|z|^2)) [[1-|z|^2, 2 conj z],
                                                      [2z, |z|^2-1]],
                                  k = -1/u

For |Im k| (x_plus - x_minus) > 30 the free phases e^{-+ikx} are factored
out and the reduced system is integrated instead; the reduced matrix is
exposed on the result since it is exactly the window scattering matrix
E(-x_plus) W E(x_minus).
"""
import logging
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (LowConfidenceWarning, NumericalError, PoleError,
                     ValidationError, WindowTooShortWarning)
from . import chm as chm_model
from . import kdv as kdv_model

log = logging.getLogger(__name__)

SCHROEDINGER = "schroedinger"
DIAGONAL = "asymptotic-diagonal"
NATURAL = "natural"

# window scattering regime: strip free phases beyond this exponent
REDUCE_THRESHOLD = 30.0
# det drift can only be measured while the entries stay O(1)
_DET_CHECK_CAP = 1e3
_DET_TOL = 1e-8


@dataclass(frozen=True)
class StateProfile:
    """A field configuration ready for transport.

    eval maps a real x to the field value: real phi for KdV, complex
    zeta for CHM.  Periodic profiles carry period; windowed profiles
    (a decayed field periodized over one window) carry both period and
    window and are flagged, which marks divisor scans far from the
    window centre as low-confidence.  background is the KdV reference
    level phi0 entering k = sqrt(u - phi0); the CHM background is
    implicitly zeta -> 0.  quasi_angle is the CHM angle lam with
    eval(x+L) = e^{i lam} eval(x); strictly periodic profiles use 0.
    """

    model: str
    eval: object
    period: float = None
    window: tuple = None
    background: float = 0.0
    quasi_angle: float = 0.0
    windowed: bool = False

    def __post_init__(self):
        if self.model not in ("kdv", "chm"):
            raise ValidationError(f"unknown model {self.model!r}")
        if self.period is None and self.window is None:
            raise ValidationError("profile needs a period or a window")
        if self.period is not None and not self.period > 0.0:
            raise ValidationError(f"period must be positive, got {self.period}")
        if self.window is not None:
            lo, hi = self.window
            if not lo < hi:
                raise ValidationError(f"empty window {self.window}")
        if self.model == "kdv" and self.quasi_angle != 0.0:
            raise ValidationError("quasi_angle is a CHM notion")
        if self.period is not None:
            self._check_periodicity()

    def _check_periodicity(self):
        x_lo = self.window[0] if self.window is not None else 0.0
        factor = np.exp(1j * self.quasi_angle) if self.model == "chm" else 1.0
        xs = x_lo + self.period * np.array([0.11, 0.37, 0.58, 0.83])
        vals = [complex(self.eval(x)) for x in xs]
        shifted = [complex(self.eval(x + self.period)) for x in xs]
        scale = max(1.0, max(abs(v) for v in vals))
        worst = max(abs(s - factor * v) for s, v in zip(shifted, vals))
        if worst > 1e-12 * scale:
            raise ValidationError(
                f"profile is not periodic: residual {worst:.3e} over one "
                f"period (declared quasi-periodicity angle {self.quasi_angle})")


@dataclass(frozen=True)
class TransportMatrix:
    """W(x_plus, x_minus) for one spectral parameter.

    entries is the assembled transport.  When the reduced path ran
    (free phases factored out), reduced_entries holds the bounded
    matrix E(-x_plus) W E(x_minus); for KdV it is always expressed in
    the asymptotic-diagonal basis regardless of the requested one.
    The integrator renormalizes det to 1 when the drift is measurable
    (entries of order one) and raises past 1e-8 drift.
    """

    entries: np.ndarray
    u: complex
    k: complex
    x_minus: float
    x_plus: float
    basis: str
    reduced_entries: np.ndarray = None

    def scattering_normalized(self):
        """E(-x_plus) W E(x_minus): free evolution stripped off both ends."""
        if self.reduced_entries is not None:
            return self.reduced_entries
        if self.basis == SCHROEDINGER:
            raise ValidationError(
                "scattering normalization lives in the asymptotic-diagonal "
                "basis; request that basis from parallel_transport")
        dxp = np.exp(1j * self.k * self.x_plus)
        dxm = np.exp(-1j * self.k * self.x_minus)
        pre = np.array([[dxp, 0.0], [0.0, 1.0 / dxp]])
        post = np.array([[dxm, 0.0], [0.0, 1.0 / dxm]])
        return pre @ self.entries @ post


@dataclass(frozen=True)
class BranchPoint:
    u: complex
    parity: int


@dataclass(frozen=True)
class DivisorSample:
    x: float
    points: tuple
    low_confidence: bool = False


# ---------------------------------------------------------------------------
# profile constructors

def kdv_profile(p):
    """Periodic profile of a KdV elliptic travelling wave."""
    if not np.isfinite(p.L):
        raise ValidationError("state has infinite period; use window_profile")
    phi0 = kdv_model.curve_data(p).phi0
    return StateProfile(model="kdv", eval=lambda x: kdv_model.evaluate_state(p, x),
                        period=p.L, background=phi0)


def constant_profile(phi0, L):
    """KdV profile pinned at the background level."""
    return StateProfile(model="kdv", eval=lambda x: phi0, period=float(L),
                        background=float(phi0))


def chm_profile(p):
    """Quasi-periodic profile of a CHM elliptic state.

    The curve constants and theta prefactors are bound once; evaluation
    costs two theta pairs per point, which is what makes transport-based
    root finding affordable.
    """
    cell = chm_model._PeriodCell(p)
    der = chm_model.derive_params(p)
    _, n_plus = cell.theta_pair(p.d + p.c)
    _, n_min = cell.theta_pair(p.d - p.c)
    pref = n_plus / n_min
    two_k = 2.0 * cell.K
    shift_re, shift_im = (p.d + p.c).real, (p.d + p.c).imag

    def zeta(x):
        w = p.alpha * x + p.beta
        if chm_model._theta_s_pole_mask(w + shift_re, shift_im, cell.K, cell.Kp):
            raise PoleError("chm profile: field pole (south pole) at "
                            f"x = {float(x)}")
        s_num, _ = cell.theta_pair(w + p.d - p.c)
        s_den, _ = cell.theta_pair(w + p.d + p.c)
        return complex(np.exp(1j * der.lam * w / two_k + 1j * p.phi)
                       * pref * (s_num / s_den))

    return StateProfile(model="chm", eval=zeta, period=der.L,
                        quasi_angle=der.lam)


def chm_spin_wave_profile(state):
    """Profile of a spin wave; integer mode number makes it periodic."""
    return StateProfile(model="chm", eval=lambda x: state.evaluate(x),
                        period=state.L)


def vacuum_profile(L):
    """CHM profile with the spin aligned to the north pole."""
    return StateProfile(model="chm", eval=lambda x: 0.0j, period=float(L))


def window_profile(model, fn, x_minus, x_plus, background=0.0,
                   decay_tol=1e-8):
    """Periodize a decayed field over one window [x_minus, x_plus].

    The wrapped eval is exactly periodic; the seam mismatch is the decay
    residue of fn at the window ends, checked against decay_tol (warns
    WindowTooShortWarning beyond it).  Divisor scans on the result flag
    base points farther than L/4 from the window centre.
    """
    x_minus, x_plus = float(x_minus), float(x_plus)
    if not x_minus < x_plus:
        raise ValidationError("window_profile needs x_minus < x_plus")
    L = x_plus - x_minus
    dev = max(abs(complex(fn(x_minus)) - background),
              abs(complex(fn(x_plus)) - background))
    if dev > decay_tol * max(1.0, abs(background)):
        warnings.warn(
            f"field at the window ends is {dev:.3e} from the background",
            WindowTooShortWarning, stacklevel=2)

    def wrapped(x):
        return fn(x_minus + np.mod(x - x_minus, L))

    return StateProfile(model=model, eval=wrapped, period=L,
                        window=(x_minus, x_plus),
                        background=float(background), windowed=True)


# ---------------------------------------------------------------------------
# Dormand-Prince RK5(4), batched over the spectral parameter

_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = (19372.0 / 6561.0, -25360.0 / 2187.0,
                          64448.0 / 6561.0, -212.0 / 729.0)
_A61, _A62, _A63, _A64, _A65 = (9017.0 / 3168.0, -355.0 / 33.0,
                                46732.0 / 5247.0, 49.0 / 176.0,
                                -5103.0 / 18656.0)
_B1, _B3, _B4, _B5, _B6 = (35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0,
                           -2187.0 / 6784.0, 11.0 / 84.0)
_E1, _E3, _E4, _E5, _E6, _E7 = (71.0 / 57600.0, -71.0 / 16695.0,
                                71.0 / 1920.0, -17253.0 / 339200.0,
                                22.0 / 525.0, -1.0 / 40.0)

_MAX_STEPS = 2_000_000


def _integrate(rhs, x0, x1, y0, rtol, atol):
    """y(x1) for y' = rhs(x, y), y(x0) = y0, elementwise error control."""
    span = x1 - x0
    x, y = x0, y0
    k1 = rhs(x, y)
    d1 = np.max(np.abs(k1))
    h = min(span, 0.1 / d1) if d1 > 0.0 else span
    steps = 0
    while x1 - x > 1e-14 * span:
        h = min(h, x1 - x)
        if h < 1e-14 * max(abs(x), span):
            raise NumericalError(
                "parallel_transport",
                f"step size underflow at x = {x:.6g} (stiff connection)")
        steps += 1
        if steps > _MAX_STEPS:
            raise NumericalError("parallel_transport", "step budget exhausted")
        k2 = rhs(x + h / 5.0, y + (h * _A21) * k1)
        k3 = rhs(x + 0.3 * h, y + h * (_A31 * k1 + _A32 * k2))
        k4 = rhs(x + 0.8 * h, y + h * (_A41 * k1 + _A42 * k2 + _A43 * k3))
        k5 = rhs(x + (8.0 / 9.0) * h,
                 y + h * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4))
        k6 = rhs(x + h, y + h * (_A61 * k1 + _A62 * k2 + _A63 * k3
                                 + _A64 * k4 + _A65 * k5))
        y_new = y + h * (_B1 * k1 + _B3 * k3 + _B4 * k4 + _B5 * k5 + _B6 * k6)
        k7 = rhs(x + h, y_new)
        err = h * (_E1 * k1 + _E3 * k3 + _E4 * k4 + _E5 * k5
                   + _E6 * k6 + _E7 * k7)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        enorm = np.max(np.abs(err) / scale)
        if enorm <= 1.0:
            x += h
            y = y_new
            k1 = k7
        factor = 5.0 if enorm == 0.0 else 0.9 * enorm ** -0.2
        h *= min(5.0, max(0.2, factor))
    return y


def _make_rhs(profile, us, ks, basis, reduced):
    ev = profile.eval
    if profile.model == "kdv":
        if basis == SCHROEDINGER:
            def rhs(x, y):
                out = np.empty_like(y)
                out[:, 0, :] = y[:, 1, :]
                out[:, 1, :] = (ev(x) - us)[:, None] * y[:, 0, :]
                return out
            return rhs
        phi0 = profile.background
        ik = (1j * ks)[:, None]
        if not reduced:
            def rhs(x, y):
                c = (0.5j * (ev(x) - phi0) / ks)[:, None]
                out = np.empty_like(y)
                out[:, 0, :] = (c - ik) * y[:, 0, :] - c * y[:, 1, :]
                out[:, 1, :] = c * y[:, 0, :] + (ik - c) * y[:, 1, :]
                return out
            return rhs

        def rhs(x, y):
            c = (0.5j * (ev(x) - phi0) / ks)[:, None]
            e2 = np.exp((2j * x) * ks)[:, None]
            out = np.empty_like(y)
            out[:, 0, :] = c * (y[:, 0, :] - e2 * y[:, 1, :])
            out[:, 1, :] = c * (y[:, 0, :] / e2 - y[:, 1, :])
            return out
        return rhs

    iu = (1j / us)[:, None]
    if not reduced:
        def rhs(x, y):
            z = ev(x)
            a2 = z.real * z.real + z.imag * z.imag
            pre = iu / (1.0 + a2)
            n11, n12 = 1.0 - a2, 2.0 * z.conjugate()
            out = np.empty_like(y)
            out[:, 0, :] = pre * (n11 * y[:, 0, :] + n12 * y[:, 1, :])
            out[:, 1, :] = pre * (2.0 * z * y[:, 0, :] - n11 * y[:, 1, :])
            return out
        return rhs

    ks_col = ks[:, None]

    def rhs(x, y):
        z = ev(x)
        a2 = z.real * z.real + z.imag * z.imag
        pre = iu / (1.0 + a2)
        d11 = -pre * a2 * 2.0  # (i/u)((1-a2)/(1+a2) - 1)
        e2 = np.exp((2j * x) * ks_col)
        off_p = pre * (2.0 * z.conjugate()) * e2
        off_m = pre * (2.0 * z) / e2
        out = np.empty_like(y)
        out[:, 0, :] = d11 * y[:, 0, :] + off_p * y[:, 1, :]
        out[:, 1, :] = off_m * y[:, 0, :] - d11 * y[:, 1, :]
        return out
    return rhs


def _resolve_basis(profile, basis):
    if basis is None:
        return SCHROEDINGER if profile.model == "kdv" else NATURAL
    if profile.model == "kdv":
        if basis not in (SCHROEDINGER, DIAGONAL):
            raise ValidationError(f"KdV basis must be {SCHROEDINGER!r} or "
                                  f"{DIAGONAL!r}, got {basis!r}")
    elif basis != NATURAL:
        raise ValidationError(f"CHM transport uses the {NATURAL!r} basis")
    return basis


def _momenta(profile, us):
    if profile.model == "kdv":
        return np.sqrt(us - profile.background)
    if np.any(us == 0.0):
        raise PoleError("the CHM connection has a pole at u = 0")
    return -1.0 / us


def _normalize_det(Y, tol):
    """Check the unimodularity drift and renormalize it away.

    The determinant of a float 2x2 with entries of size S carries a
    rounding floor of order S^2 eps, so past S ~ 1e3 the drift cannot
    be measured at the 1e-8 gate and the entries are left alone (the
    reduced-path matrix, which is O(1), has been checked by then).
    For loosened step tolerances the drift budget loosens with them.
    """
    det = Y[:, 0, 0] * Y[:, 1, 1] - Y[:, 0, 1] * Y[:, 1, 0]
    big = np.max(np.abs(Y), axis=(1, 2)) > _DET_CHECK_CAP
    drift = np.abs(det - 1.0)
    gate = max(_DET_TOL, 100.0 * tol)
    bad = (~big) & (drift > gate)
    if np.any(bad):
        raise NumericalError(
            "parallel_transport",
            f"unimodularity drift {drift[bad].max():.3e} exceeds {gate:g}; "
            "tighten tol")
    fix = np.where(big, 1.0 + 0.0j, np.sqrt(det))
    return Y / fix[:, None, None]


def _transport_core(profile, us, x_minus, x_plus, tol, atol, basis, reduced):
    """Batched transport; returns (W batch, reduced batch or None, k batch)."""
    us = np.atleast_1d(np.asarray(us, dtype=complex))
    if not x_minus < x_plus:
        raise ValidationError("parallel_transport needs x_minus < x_plus")
    if not tol > 0.0:
        raise ValidationError("tol must be positive")
    if not np.all(np.isfinite(us)):
        raise ValidationError("spectral parameter must be finite")
    basis = _resolve_basis(profile, basis)
    ks = _momenta(profile, us)
    span = x_plus - x_minus
    if reduced is None:
        reduced = float(np.max(np.abs(ks.imag))) * span > REDUCE_THRESHOLD
    if reduced and profile.model == "kdv":
        if np.any(np.abs(ks) < 1e-12):
            raise PoleError("reduced KdV transport needs k away from 0")
        run_basis = DIAGONAL
    else:
        run_basis = basis
    rhs = _make_rhs(profile, us, ks, run_basis, reduced)
    y0 = np.zeros((us.size, 2, 2), dtype=complex)
    y0[:, 0, 0] = 1.0
    y0[:, 1, 1] = 1.0
    Y = _integrate(rhs, x_minus, x_plus, y0, rtol=tol, atol=atol)
    if not reduced:
        return _normalize_det(Y, tol), None, ks
    R = _normalize_det(Y, tol)
    fp = np.exp(-1j * ks * x_plus)
    fm = np.exp(-1j * ks * x_minus)
    W = np.empty_like(R)
    W[:, 0, 0] = R[:, 0, 0] * fp / fm
    W[:, 0, 1] = R[:, 0, 1] * fp * fm
    W[:, 1, 0] = R[:, 1, 0] / (fp * fm)
    W[:, 1, 1] = R[:, 1, 1] * fm / fp
    if not np.all(np.isfinite(W)):
        raise NumericalError(
            "parallel_transport",
            "assembled transport overflows double range; work with the "
            "reduced entries instead")
    if profile.model == "kdv" and basis == SCHROEDINGER:
        M = np.zeros_like(W)
        M[:, 0, 0], M[:, 0, 1] = -1j * ks, 1.0
        M[:, 1, 0], M[:, 1, 1] = 1j * ks, 1.0
        Minv = np.empty_like(M)
        dets = M[:, 0, 0] * M[:, 1, 1] - M[:, 0, 1] * M[:, 1, 0]
        Minv[:, 0, 0], Minv[:, 0, 1] = M[:, 1, 1], -M[:, 0, 1]
        Minv[:, 1, 0], Minv[:, 1, 1] = -M[:, 1, 0], M[:, 0, 0]
        Minv /= dets[:, None, None]
        W = Minv @ W @ M
    return W, R, ks


def parallel_transport(s, u, x_minus, x_plus, tol=1e-10, *, basis=None,
                       atol=1e-12, reduced=None):
    """Transport matrix W(x_plus, x_minus) at spectral parameter u.

    tol is the per-step relative error target of the integrator; atol
    the absolute floor (pass 0.0 to track exponentially small entries).
    basis selects the KdV frame (schroedinger by default); CHM always
    runs in its natural frame.  reduced forces or suppresses the
    factored-phase path, which otherwise switches on automatically
    when |Im k| (x_plus - x_minus) > 30.
    """
    W, R, ks = _transport_core(s, complex(u), float(x_minus), float(x_plus),
                               tol, atol, basis, reduced)
    return TransportMatrix(
        entries=W[0], u=complex(u), k=complex(ks[0]), x_minus=float(x_minus),
        x_plus=float(x_plus), basis=_resolve_basis(s, basis),
        reduced_entries=None if R is None else R[0])


def parallel_transport_batch(s, us, x_minus, x_plus, tol=1e-10, *, basis=None,
                             atol=1e-12, reduced=None):
    """Shared-step transport over a batch of spectral parameters.

    One adaptive integration drives the whole batch (the error control
    takes the worst element), so the field is evaluated once per stage
    instead of once per u; the savings make dense u-grids affordable.
    """
    us = np.asarray(us, dtype=complex)
    W, R, ks = _transport_core(s, us, float(x_minus), float(x_plus),
                               tol, atol, basis, reduced)
    basis = _resolve_basis(s, basis)
    return [TransportMatrix(entries=W[i], u=complex(us[i]), k=complex(ks[i]),
                            x_minus=float(x_minus), x_plus=float(x_plus),
                            basis=basis,
                            reduced_entries=None if R is None else R[i])
            for i in range(us.size)]


# ---------------------------------------------------------------------------
# monodromy

def _require_periodic(s, op):
    if s.period is None:
        raise ValidationError(f"{op} needs a periodic profile")


def _base_point(s):
    return s.window[0] if s.window is not None else 0.0


def _twisted_half_trace(s, W):
    """(1/2) tr of the monodromy with the quasi-periodicity twist.

    For CHM the connection is periodic only up to conjugation by
    D = diag(e^{-i lam/2}, e^{+i lam/2}); the object whose trace is
    base-point independent is D^-1 W, giving cos(q + lam/2).
    """
    half = 0.5 * s.quasi_angle
    tw1, tw2 = np.exp(1j * half), np.exp(-1j * half)
    return 0.5 * (tw1 * W[:, 0, 0] + tw2 * W[:, 1, 1])


def _trace_batch(s, us, tol, x0=None):
    us = np.asarray(us, dtype=complex)
    x0 = _base_point(s) if x0 is None else float(x0)
    W, R, ks = _transport_core(s, us, x0, x0 + s.period, tol, 1e-12,
                               None, None)
    if R is not None and s.model == "kdv":
        # trace straight from the bounded entries; basis is irrelevant
        ph = np.exp(-1j * ks * s.period)
        half = 0.5 * (R[:, 0, 0] * ph + R[:, 1, 1] / ph)
        return half
    if R is not None:
        ph = np.exp(-1j * ks * s.period)
        tw1 = np.exp(0.5j * s.quasi_angle)
        return 0.5 * (tw1 * R[:, 0, 0] * ph + R[:, 1, 1] / (tw1 * ph))
    return _twisted_half_trace(s, W)


def monodromy_trace(s, u, x0=None, tol=1e-10):
    """Half trace of the one-period transport starting at x0.

    Quasi-periodic CHM profiles get the diagonal twist D^-1 folded in,
    which is what makes the value independent of x0; the vacuum limit
    is cos(L/u) and the KdV value is cos q(u).
    """
    _require_periodic(s, "monodromy_trace")
    return complex(_trace_batch(s, [u], tol, x0)[0])


# ---------------------------------------------------------------------------
# branch points

def _golden_min(f, a, b, iters=70):
    """Golden-section minimizer; f evaluated ~iters times."""
    inv = (np.sqrt(5.0) - 1.0) / 2.0
    c = b - inv * (b - a)
    d = a + inv * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = f(d)
    return (c, fc) if fc < fd else (d, fd)


def _bisect_edge(f, a, b, ga, gb, tol):
    """Root of g = |f| - 1 by bisection; returns (u, f(u))."""
    fm = None
    for _ in range(200):
        mid = 0.5 * (a + b)
        fm = f(mid)
        gm = abs(fm) - 1.0
        if abs(gm) < tol or (b - a) < 1e-12 * max(1.0, abs(mid)):
            break
        if (gm > 0.0) == (ga > 0.0):
            a, ga = mid, gm
        else:
            b, gb = mid, gm
    mid = 0.5 * (a + b)
    return mid, (f(mid) if fm is None else fm)


_TANGENT_TOL = 1e-9


def _branch_points_real(s, lo, hi, tol, n_grid):
    trace_tol = min(tol * 1e-2, 1e-10)

    def f(u):
        return _trace_batch(s, [u], trace_tol)[0].real

    def gfun(u):
        return abs(f(u)) - 1.0

    us = np.linspace(lo, hi, n_grid)
    g = np.abs(_trace_batch(s, us, trace_tol).real) - 1.0
    found = []
    # sign transitions of |f| - 1 bracket the generic edges
    for j in np.nonzero(np.sign(g[:-1]) * np.sign(g[1:]) < 0)[0]:
        u_root, f_root = _bisect_edge(f, us[j], us[j + 1], g[j], g[j + 1], tol)
        found.append((u_root, 1 if f_root > 0 else -1))
    # features narrower than the grid hide between the nodes: a band
    # inside a forbidden zone is a positive local minimum of |f| - 1
    # (the trace is V-shaped toward it, so a line search walks in), a
    # gap inside a band is a negative local maximum, and a value of
    # zero at the extremum is a double point where the gap has closed
    for j in range(1, n_grid - 1):
        if g[j - 1] >= g[j] <= g[j + 1] and g[j] > 0.0:
            u_ext, g_ext = _golden_min(gfun, us[j - 1], us[j + 1])
            sides = ((us[j - 1], u_ext, g[j - 1], g_ext),
                     (u_ext, us[j + 1], g_ext, g[j + 1]))
        elif g[j - 1] <= g[j] >= g[j + 1] and g[j] < 0.0:
            u_ext, neg = _golden_min(lambda u: -gfun(u), us[j - 1], us[j + 1])
            g_ext = -neg
            sides = ((us[j - 1], u_ext, g[j - 1], g_ext),
                     (u_ext, us[j + 1], g_ext, g[j + 1]))
        else:
            continue
        if abs(g_ext) <= _TANGENT_TOL:
            found.append((u_ext, 1 if f(u_ext) > 0 else -1))
        elif (g_ext < 0.0) != (g[j] < 0.0):
            for a, b, ga, gb in sides:
                u_root, f_root = _bisect_edge(f, a, b, ga, gb, tol)
                found.append((u_root, 1 if f_root > 0 else -1))
    dedup = []
    for u_root, parity in sorted(found):
        if dedup and abs(u_root - dedup[-1].u) < 1e-10 * max(1.0, abs(u_root)):
            continue
        dedup.append(BranchPoint(u=float(u_root), parity=parity))
    return dedup


def _newton_root(f, target, seed, tol, scale):
    """Complex Newton for f(u) = target with finite-difference slope."""
    u = seed
    best_u, best_r = u, abs(f(u) - target)
    for _ in range(60):
        fu = f(u)
        r = abs(fu - target)
        if r < best_r:
            best_u, best_r = u, r
        if r < tol:
            return u, r, True
        h = 1e-6 * max(1.0, abs(u))
        slope = (f(u + h) - f(u - h)) / (2.0 * h)
        if slope == 0.0:
            break
        du = -(fu - target) / slope
        if abs(du) > scale:
            du *= scale / abs(du)
        u = u + du
        if abs(du) < 1e-12 * max(1.0, abs(u)):
            return u, abs(f(u) - target), True
    return best_u, best_r, best_r < 1e-6


def _branch_points_complex(s, lo, hi, tol, n_grid):
    nr, ni = n_grid if isinstance(n_grid, tuple) else (n_grid, n_grid)
    res = np.linspace(lo.real, hi.real, nr)
    ims = np.linspace(lo.imag, hi.imag, ni)
    grid = res[None, :] + 1j * ims[:, None]
    flat = grid.ravel()
    keep = np.abs(flat) > 1e-8 if s.model == "chm" else np.ones(flat.size, bool)
    traces = np.full(flat.shape, np.nan + 0j)
    traces[keep] = _trace_batch(s, flat[keep], min(tol * 1e-2, 1e-10))
    traces = traces.reshape(grid.shape)
    span = max(hi.real - lo.real, hi.imag - lo.imag)
    scale = 0.5 * span

    def f(u):
        return complex(_trace_batch(s, [u], min(tol * 1e-2, 1e-10))[0])

    roots = []
    for target in (1.0, -1.0):
        r = np.abs(traces - target)
        for i in range(ni):
            for j in range(nr):
                if not np.isfinite(r[i, j]):
                    continue
                neigh = [r[a, b] for a, b in ((i - 1, j), (i + 1, j),
                                              (i, j - 1), (i, j + 1))
                         if 0 <= a < ni and 0 <= b < nr
                         and np.isfinite(r[a, b])]
                if neigh and r[i, j] > min(neigh):
                    continue
                u_root, resid, ok = _newton_root(f, target, complex(grid[i, j]),
                                                 tol, scale)
                if not ok:
                    log.warning("branch-point seed %s (target %+d) stalled at "
                                "residual %.2e", complex(grid[i, j]),
                                int(target), resid)
                    continue
                margin = 1e-6 * max(1.0, span)
                if not (lo.real - margin <= u_root.real <= hi.real + margin
                        and lo.imag - margin <= u_root.imag <= hi.imag + margin):
                    continue
                pt = BranchPoint(u=u_root, parity=int(target))
                if all(abs(pt.u - q.u) > 1e-8 * max(1.0, abs(pt.u))
                       for q in roots):
                    roots.append(pt)
    return sorted(roots, key=lambda p: (round(p.u.real, 9), p.u.imag))


def find_branch_points(s, search, tol=1e-10, n_grid=None):
    """Points where the monodromy trace reaches +-1 inside the region.

    search is (lo, hi): a real interval for KdV, scanned on a grid and
    refined by bisection on sign changes of |trace| - 1 (with a local
    minimization pass that digs out bands narrower than the grid), or
    two complex corners of a rectangle for CHM, where Newton runs from
    every grid-local minimum of |trace -+ 1|.  Seeds that fail to
    converge are logged and skipped; an empty region returns [].
    """
    _require_periodic(s, "find_branch_points")
    lo, hi = search
    if s.model == "kdv":
        lo, hi = float(lo), float(hi)
        if not lo < hi:
            raise ValidationError("empty search interval")
        return _branch_points_real(s, lo, hi, tol, n_grid or 400)
    lo, hi = complex(lo), complex(hi)
    if not (lo.real < hi.real and lo.imag < hi.imag):
        raise ValidationError("search corners must satisfy lo < hi "
                              "componentwise")
    return _branch_points_complex(s, lo, hi, tol, n_grid or (24, 24))


# ---------------------------------------------------------------------------
# divisor

def _reference_vector(reference):
    """Normalize a projective reference to a unit 2-vector (p1, p2)."""
    if np.ndim(reference) == 1 and len(reference) == 2:
        p1, p2 = complex(reference[0]), complex(reference[1])
    else:
        w0 = complex(reference)
        p1, p2 = (0.0, 1.0) if np.isinf(abs(w0)) else (1.0, w0)
    norm = np.hypot(abs(p1), abs(p2))
    if norm == 0.0 or not np.isfinite(norm):
        raise ValidationError("reference direction must be a nonzero "
                              "finite vector or a ratio (inf allowed)")
    return p1 / norm, p2 / norm


def _chordal(p, v):
    """Chordal distance between two projective directions."""
    num = abs(p[0] * v[1] - p[1] * v[0])
    return num / (np.hypot(abs(p[0]), abs(p[1]))
                  * np.hypot(abs(v[0]), abs(v[1])))


def _eigen_mismatch(T, p):
    """Smallest chordal distance from the reference to an eigenvector."""
    half = 0.5 * (T[0, 0] + T[1, 1])
    disc = np.sqrt(half * half - (T[0, 0] * T[1, 1] - T[0, 1] * T[1, 0]))
    best = np.inf
    for mu in (half + disc, half - disc):
        for v in ((T[0, 1], mu - T[0, 0]), (mu - T[1, 1], T[1, 0])):
            n = np.hypot(abs(v[0]), abs(v[1]))
            if n > 1e-60:
                best = min(best, _chordal(p, v))
    return best


def _mat_inv(M):
    det = M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]
    out = np.empty_like(M)
    out[..., 0, 0], out[..., 0, 1] = M[..., 1, 1], -M[..., 0, 1]
    out[..., 1, 0], out[..., 1, 1] = -M[..., 1, 0], M[..., 0, 0]
    return out / det[..., None, None]


def _alignment(T, p1, p2):
    """Zero iff (p1, p2) is an eigenvector of T."""
    return (T[..., 1, 0] * p1 * p1
            + (T[..., 1, 1] - T[..., 0, 0]) * p1 * p2
            - T[..., 0, 1] * p2 * p2)


def _twist_matrix(s):
    half = 0.5 * s.quasi_angle
    return np.array([[np.exp(-1j * half), 0.0], [0.0, np.exp(1j * half)]])


def _monodromy_at(s, u, x_base, tol):
    """Twisted monodromy D^-1 W(x+L, x) as a 2x2 array."""
    tm = parallel_transport(s, u, x_base, x_base + s.period, tol)
    return _mat_inv(_twist_matrix(s)) @ tm.entries


def _divisor_roots_kdv(s, x, lo, hi, p1, p2, tol, n_grid):
    def g(u):
        T = _monodromy_at(s, u, x, tol)
        return _alignment(T, p1, p2).real

    us = np.linspace(lo, hi, n_grid)
    Ws = parallel_transport_batch(s, us, x, x + s.period, tol)
    vals = np.array([_alignment(w.entries, p1, p2).real for w in Ws])
    roots = []
    for j in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
        a, b = us[j], us[j + 1]
        ga, gb = vals[j], vals[j + 1]
        mid = 0.5 * (a + b)
        # Illinois variant of regula falsi: superlinear, bracket-safe
        side = 0
        for _ in range(80):
            if gb == ga:
                break
            mid = (a * gb - b * ga) / (gb - ga)
            gm = g(mid)
            if abs(gm) < 1e-13 or abs(b - a) < 1e-12 * max(1.0, abs(mid)):
                break
            if (gm > 0.0) == (ga > 0.0):
                a, ga = mid, gm
                if side == -1:
                    gb *= 0.5
                side = -1
            else:
                b, gb = mid, gm
                if side == 1:
                    ga *= 0.5
                side = 1
        roots.append(float(mid))
    return roots


def divisor_scan(s, u_region, reference_direction, x_grid, tol=1e-10,
                 n_grid=None):
    """Divisor points: where the monodromy eigenvector hits the reference.

    For each base point x in x_grid, finds the u inside u_region where
    an eigenvector of the (twisted) monodromy at base x aligns with
    reference_direction, given as a ratio psi2/psi1 (inf allowed) or a
    2-vector.  KdV roots come from sign changes of the real alignment
    form on a grid; CHM roots from Newton seeded on grid minima of its
    modulus plus continuation from the previous base point.  Samples
    with a chordal eigenvector mismatch above 1e-6 are dropped with a
    log entry.  On windowed profiles, base points farther than L/4 from
    the window centre are flagged low-confidence: there the periodized
    monodromy stops resembling the infinite-line problem.
    """
    _require_periodic(s, "divisor_scan")
    p1, p2 = _reference_vector(reference_direction)
    lo, hi = u_region
    samples = []
    prev_roots = []
    centre = 0.5 * (s.window[0] + s.window[1]) if s.windowed else None
    for x in np.asarray(x_grid, dtype=float):
        if s.model == "kdv":
            roots = _divisor_roots_kdv(s, x, float(lo), float(hi), p1, p2,
                                       tol, n_grid or 48)
        else:
            roots = _divisor_roots_chm(s, x, complex(lo), complex(hi), p1, p2,
                                       tol, n_grid or (16, 16), prev_roots)
        kept = []
        for u_root in roots:
            T = _monodromy_at(s, u_root, x, tol)
            mism = _eigen_mismatch(T, (p1, p2))
            if mism > 1e-6:
                log.warning("divisor root %s at x=%.6g rejected: eigenvector "
                            "mismatch %.2e", u_root, x, mism)
                continue
            kept.append(u_root)
        prev_roots = kept
        low = False
        if s.windowed:
            dx = np.mod(x - centre + 0.5 * s.period, s.period) - 0.5 * s.period
            low = abs(dx) > 0.25 * s.period
        samples.append(DivisorSample(x=float(x), points=tuple(kept),
                                     low_confidence=low))
    if any(smp.low_confidence for smp in samples):
        warnings.warn(
            "divisor samples beyond L/4 from the window centre are "
            "low-confidence", LowConfidenceWarning, stacklevel=2)
    return samples


def _divisor_roots_chm(s, x, lo, hi, p1, p2, tol, n_grid, seeds):
    def g(u):
        T = _monodromy_at(s, u, x, tol)
        return complex(_alignment(T, p1, p2))

    span = max(hi.real - lo.real, hi.imag - lo.imag)
    margin = 1e-6 * max(1.0, span)

    def run(seed_list, roots):
        for seed in seed_list:
            u_root, resid, ok = _newton_root(g, 0.0, complex(seed),
                                             1e-11 * max(1.0, span),
                                             0.5 * span)
            if not ok:
                log.warning("divisor seed %s at x=%.6g stalled at %.2e",
                            seed, x, resid)
                continue
            if not (lo.real - margin <= u_root.real <= hi.real + margin
                    and lo.imag - margin <= u_root.imag <= hi.imag + margin):
                continue
            if all(abs(u_root - q) > 1e-8 * max(1.0, abs(u_root))
                   for q in roots):
                roots.append(u_root)
        return roots

    # continuation from the previous base point is usually enough; the
    # grid pass pays for itself only when tracking starts or breaks
    roots = run(list(seeds), [])
    if roots and len(roots) >= len(seeds):
        return roots
    nr, ni = n_grid if isinstance(n_grid, tuple) else (n_grid, n_grid)
    res = np.linspace(lo.real, hi.real, nr)
    ims = np.linspace(lo.imag, hi.imag, ni)
    grid = (res[None, :] + 1j * ims[:, None]).ravel()
    keep = np.abs(grid) > 1e-8
    D = _mat_inv(_twist_matrix(s))
    Ws = parallel_transport_batch(s, grid[keep], x, x + s.period, tol)
    vals = np.full(grid.shape, np.inf)
    vals[keep] = [abs(_alignment(D @ w.entries, p1, p2)) for w in Ws]
    order = np.argsort(vals)
    return run([complex(grid[j]) for j in order[:4]], roots)
