"""Closed-form and continuum expressions for the Ramsey interaction factor G(tau)."""

from __future__ import annotations

import cmath
import math
import warnings

import numpy as np

from ..errors import ConvergenceWarning, DomainError, PreconditionError
from ..specfun import (
    DEFAULT_QUADRATURE,
    FRESNEL_LIMIT,
    QuadratureConfig,
    cos_integral,
    cos_integral_mod,
    f_tau,
    fresnel,
    sin_integral,
    sin_integral_mod,
)

__all__ = [
    "contrast_all_to_all",
    "gamma_continuum",
    "gamma_largeN",
    "contrast_asymptotic",
    "free_space_contrast",
    "ramsey_signal",
    "fringe_frequency",
]


def contrast_all_to_all(N: int, p_g: float, p_d: float, C0: float, tau):
    """Contrast and phase for a distance-independent coupling C0.

    contrast = [p_g^2 + p_d^2 + 2 p_g p_d cos(C0 tau)]^((N-1)/2) and
    phase = (N-1) * atan2(p_d sin(C0 tau), p_g + p_d cos(C0 tau)).
    """
    tau = np.asarray(tau, dtype=float)
    ct = np.cos(C0 * tau)
    # p_g^2 + p_d^2 + 2 p_g p_d cos x written to stay exact near the revivals
    half = np.sin(0.5 * C0 * tau)
    base = np.maximum((p_g + p_d) ** 2 - 4.0 * p_g * p_d * half * half, 0.0)
    contrast = base ** (0.5 * (N - 1))
    zeta = np.arctan2(p_d * np.sin(C0 * tau), p_g + p_d * ct)
    phase = (N - 1) * zeta
    if contrast.ndim == 0:
        return float(contrast), float(phase)
    return contrast, phase


# ---------------------------------------------------------------- continuum --

def _gamma_closed(tau, w0, wB, eta, cfg):
    phi0 = (w0 + eta * w0 * w0) * tau
    rt_eta = math.sqrt(eta)
    hat0 = (w0 * rt_eta + 0.5 / rt_eta) * math.sqrt(tau)
    beta = 4.0 * eta / tau
    S0, Cf0 = fresnel(hat0)
    if math.isinf(wB):
        pref = w0
        first = cmath.exp(1j * phi0)
        SB = CfB = FRESNEL_LIMIT
        ciB = ciMB = 0.0
        phiB = math.inf
    else:
        phiB = (wB + eta * wB * wB) * tau
        pref = w0 * wB / (wB - w0)
        first = (wB * cmath.exp(1j * phi0) - w0 * cmath.exp(1j * phiB)) / (wB - w0)
        SB, CfB = fresnel((wB * rt_eta + 0.5 / rt_eta) * math.sqrt(tau))
        ciB = cos_integral(phiB)
        ciMB = cos_integral_mod(beta, phiB, cfg)
    siB = sin_integral(phiB)
    siMB = sin_integral_mod(beta, phiB, cfg)
    theta = tau / (4.0 * eta)
    fres = 2.0 * math.sqrt(eta * tau) * cmath.exp(-1j * theta) * (1j * (CfB - Cf0) - (SB - S0))
    si_part = -0.5 * tau * (siB + siMB - sin_integral(phi0) - sin_integral_mod(beta, phi0, cfg))
    ci_part = 0.5j * tau * (ciB + ciMB - cos_integral(phi0) - cos_integral_mod(beta, phi0, cfg))
    return first + pref * (fres + si_part + ci_part)


def _gamma_quadrature(tau, w0, wB, eta, max_panels=2_000_000):
    """Composite Gauss-Legendre on panels of bounded phase advance and bounded w ratio."""
    if math.isinf(wB):
        raise DomainError("quadrature route needs a finite upper frequency")
    phi0 = (w0 + eta * w0 * w0) * tau
    phiB = (wB + eta * wB * wB) * tau
    n_phase = int(math.ceil((phiB - phi0) / (0.5 * math.pi)))
    n_geo = int(math.ceil(math.log2(wB / w0)))
    if n_phase + n_geo > max_panels:
        raise DomainError(f"integrand too oscillatory for direct quadrature ({n_phase} panels)")
    phis = phi0 + (phiB - phi0) * np.arange(1, n_phase) / n_phase
    # invert phi = (w + eta w^2) tau
    w_phase = 2.0 * (phis / tau) / (1.0 + np.sqrt(1.0 + 4.0 * eta * phis / tau))
    w_geo = w0 * 2.0 ** np.arange(1, n_geo)
    edges = np.unique(np.concatenate(([w0], w_phase, w_geo[w_geo < wB], [wB])))
    x, wts = np.polynomial.legendre.leggauss(20)
    a, b = edges[:-1, None], edges[1:, None]
    w = 0.5 * (b - a) * x[None, :] + 0.5 * (a + b)
    f = np.exp(1j * (w + eta * w * w) * tau) / (w * w)
    integral = np.sum(0.5 * (b - a)[:, 0] * (f @ wts))
    return w0 * wB / (wB - w0) * integral


def gamma_continuum(tau, omega0: float, omegaB: float, eta: float, C0: float = 0.0,
                    method: str = "closed_form", cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """Average of exp(i U~(r) tau) over a homogeneous shell r_B < r < r_0.

    In terms of omega = C3/r^3 the shell is omega0 = C3/r_0^3 < omega < omegaB =
    C3/r_B^3; ``omegaB = inf`` means no exclusion radius (closed form only).
    ``method`` is ``"closed_form"`` (Fresnel and (modified) trigonometric
    integrals) or ``"quadrature"`` (direct integration over omega).
    """
    scalar = np.ndim(tau) == 0
    taus = np.atleast_1d(np.asarray(tau, dtype=float))
    if not eta > 0:
        raise DomainError(f"eta must be positive, got {eta}")
    if not 0 < omega0 <= omegaB:
        if omega0 == omegaB == 0:
            out = np.exp(1j * C0 * taus)
            return complex(out[0]) if scalar else out
        raise DomainError(f"need 0 < omega0 <= omegaB, got {omega0}, {omegaB}")
    out = np.empty(taus.shape, dtype=complex)
    for k, t in enumerate(taus):
        if t < 0:
            raise DomainError("tau must be >= 0")
        if t == 0:
            out[k] = 1.0
            continue
        if omega0 == omegaB:
            val = cmath.exp(1j * (omega0 + eta * omega0**2) * t)
        elif method == "closed_form":
            try:
                val = _gamma_closed(t, omega0, omegaB, eta, cfg)
            except DomainError as exc:
                raise DomainError(f"gamma_continuum(tau={t}): {exc}") from exc
        elif method == "quadrature":
            val = _gamma_quadrature(t, omega0, omegaB, eta)
        else:
            raise ValueError(f"unknown method {method!r}")
        out[k] = cmath.exp(1j * C0 * t) * val
    return complex(out[0]) if scalar else out


def _fresnel_brackets(tau, eta):
    theta = tau / (4.0 * eta)
    S, C = fresnel(math.sqrt(theta))
    a = FRESNEL_LIMIT - C
    b = FRESNEL_LIMIT - S
    return theta, a, b


def gamma_largeN(tau, kappa: float, eta: float, N: int, C0: float = 0.0,
                 cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """First-order-in-1/N continuum average with omega0 = kappa/N and no exclusion radius.

    The imaginary part contains Ci(kappa tau / N), which diverges logarithmically;
    below ``kappa tau / N = 1e-12`` it is returned as NaN with a
    :class:`ConvergenceWarning`.
    """
    scalar = np.ndim(tau) == 0
    taus = np.atleast_1d(np.asarray(tau, dtype=float))
    out = np.empty(taus.shape, dtype=complex)
    for k, t in enumerate(taus):
        if t == 0:
            out[k] = 1.0
            continue
        theta, a, b = _fresnel_brackets(t, eta)
        w = 2.0 * math.sqrt(eta * t) * kappa / N
        x = kappa * t / N
        re = 1.0 - 0.5 * x * (0.5 * math.pi + f_tau(eta, t, cfg)) - w * (b * math.cos(theta) - a * math.sin(theta))
        if abs(x) < 1e-12:
            warnings.warn(f"phase of gamma diverges at kappa*tau/N={x:.1e}", ConvergenceWarning, stacklevel=2)
            im = math.nan
        else:
            beta = 4.0 * eta / t
            im = x * (1.0 - 0.5 * cos_integral(x) - 0.5 * cos_integral_mod(beta, x, cfg))
            im += w * (a * math.cos(theta) + b * math.sin(theta))
        # complex multiplication would spread a NaN phase into the real part
        out[k] = complex(re, im) if C0 == 0 else cmath.exp(1j * C0 * t) * complex(re, im)
    return complex(out[0]) if scalar else out


def contrast_asymptotic(tau, kappa: float, eta: float, p_d: float,
                        cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """Large-N contrast at the revival times tau = 2 pi k / C0.

    Product of a long-time factor exp(-p_d kappa tau (pi/2 + F(tau)) / 2) and two
    Fresnel factors that govern the early decay.
    """
    scalar = np.ndim(tau) == 0
    taus = np.atleast_1d(np.asarray(tau, dtype=float))
    out = np.empty(taus.shape)
    for k, t in enumerate(taus):
        if t < 0:
            raise DomainError("tau must be >= 0")
        if t == 0:
            out[k] = 1.0
            continue
        theta, a, b = _fresnel_brackets(t, eta)
        w = 2.0 * p_d * math.sqrt(eta * t) * kappa
        long_time = -0.5 * p_d * kappa * t * (0.5 * math.pi + f_tau(eta, t, cfg))
        out[k] = math.exp(long_time) * math.exp(-w * b * math.cos(theta)) * math.exp(w * a * math.sin(theta))
    return float(out[0]) if scalar else out


def free_space_contrast(tau, kappa: float, eta: float, p_d: float):
    """Large-N contrast for a pure C6/r^6 interaction: exp(-2 p_d sqrt(pi/8) kappa sqrt(eta tau)).

    Only the product kappa*sqrt(eta) = 4 pi n sqrt(C6) / 3 matters.
    """
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise DomainError("tau must be >= 0")
    out = np.exp(-2.0 * p_d * FRESNEL_LIMIT * kappa * np.sqrt(eta * tau))
    return float(out) if out.ndim == 0 else out


def ramsey_signal(tau, G, omega_fringe, xi: float = 0.0, p_g: float = 0.5, p_d: float = 0.5,
                  domain: str = "time"):
    """Excited population P = 2 p_g p_d Re{1 + exp(i (omega_fringe tau + xi)) G}.

    In the time domain ``tau`` is swept and ``omega_fringe`` is the Stark-shifted
    transition frequency.  In the frequency domain ``tau`` is the fixed pulse
    separation and ``omega_fringe`` the (swept) laser detuning.  Inputs broadcast.
    """
    if domain not in ("time", "frequency"):
        raise ValueError(f"domain must be 'time' or 'frequency', got {domain!r}")
    tau = np.asarray(tau, dtype=float)
    G = np.asarray(G, dtype=complex)
    if np.any(np.abs(G) > 1.0 + 1e-12):
        raise PreconditionError("|G| must not exceed 1")
    w = np.asarray(omega_fringe, dtype=float)
    P = 2.0 * p_g * p_d * np.real(1.0 + np.exp(1j * (w * tau + xi)) * G)
    return float(P) if P.ndim == 0 else P


def fringe_frequency(params, g: float | None = None, domain: str = "time",
                     omega_laser: float | None = None) -> float:
    """Stark-shifted d-g frequency, or the laser detuning from it for ``domain="frequency"``."""
    from ..params import cavity_coupling

    if g is None:
        g = cavity_coupling(params, "a")
    d = params.delta
    omega_d_tilde = params.omega_d + (g * g / d - g**4 / d**3 if d != 0 else 0.0)
    omega_dg = omega_d_tilde - params.omega_g
    if domain == "time":
        return omega_dg
    if domain == "frequency":
        if omega_laser is None:
            raise ValueError("frequency-domain fringes need omega_laser")
        return omega_laser - omega_dg
    raise ValueError(f"domain must be 'time' or 'frequency', got {domain!r}")
