"""Fresnel integrals, trigonometric integrals and their square-root damped variants.

Conventions::

    S(x)  = int_0^x sin(t^2) dt          C(x)  = int_0^x cos(t^2) dt
    Si(x) = int_0^x sin(t)/t dt          Ci(x) = -int_x^inf cos(t)/t dt
    SiM(b, x) = int_0^x sin(t) / (t sqrt(1 + b t)) dt
    CiM(b, x) = -int_x^inf cos(t) / (t sqrt(1 + b t)) dt
    F(eta, tau) = SiM(4 eta / tau, inf)

Fresnel, Si and Ci use power series for small arguments and complex continued
fractions otherwise.  The damped integrals are integrated panel by panel between
consecutive zeros of the trigonometric factor; the resulting alternating partial
sums are accelerated by repeated averaging.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from .errors import DomainError

__all__ = [
    "QuadratureConfig",
    "DEFAULT_QUADRATURE",
    "fresnel_s",
    "fresnel_c",
    "fresnel",
    "sin_integral",
    "cos_integral",
    "sici",
    "sin_integral_mod",
    "cos_integral_mod",
    "f_tau",
    "FRESNEL_LIMIT",
]

EULER_GAMMA = 0.57721566490153286061
FRESNEL_LIMIT = math.sqrt(math.pi / 8.0)
_EPS = 1e-16
_FPMIN = 1e-300


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 200
    tail_panels: int = 48
    tail_strategy: str = "between_zeros_accelerated"

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.tail_strategy != "between_zeros_accelerated":
            raise ValueError(f"unknown tail strategy {self.tail_strategy!r}")

    def refined(self, factor: float = 10.0) -> "QuadratureConfig":
        return QuadratureConfig(self.abs_tol / factor, self.rel_tol / factor,
                                self.max_subdivisions * 2, self.tail_panels + 16)


DEFAULT_QUADRATURE = QuadratureConfig()


# ---------------------------------------------------------------- Fresnel --

def _fresnel_series(x):
    x2 = x * x
    x4 = x2 * x2
    c = s = 0.0
    term = x  # x^(4k+1) / (2k)!  with alternating sign
    k = 0
    while True:
        tc = term / (4 * k + 1)
        term_s = term * x2 / (2 * k + 1)
        ts = term_s / (4 * k + 3)
        c += tc
        s += ts
        if abs(tc) < _EPS * abs(c) and abs(ts) < _EPS * max(abs(s), _FPMIN):
            break
        term = -term * x4 / ((2 * k + 1) * (2 * k + 2))
        k += 1
        if k > 200:
            break
    return s, c


def _erfc_cf(z):
    """erfc(z) for Re z > 0 and |z| >~ 2 by the Laplace continued fraction (Lentz)."""
    # erfc z = exp(-z^2)/sqrt(pi) * 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))
    f = z
    C = z
    D = 0.0
    for n in range(1, 500):
        a = 0.5 * n
        D = z + a * D
        if D == 0:
            D = _FPMIN
        C = z + a / C
        if C == 0:
            C = _FPMIN
        D = 1.0 / D
        delta = C * D
        f *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return np.exp(-z * z) / (math.sqrt(math.pi) * f)


def fresnel(x: float) -> tuple[float, float]:
    """Return ``(S(x), C(x))``; odd in ``x``."""
    x = float(x)
    sign = -1.0 if x < 0 else 1.0
    ax = abs(x)
    if ax == math.inf:
        return sign * FRESNEL_LIMIT, sign * FRESNEL_LIMIT
    if ax < 2.0:
        s, c = _fresnel_series(ax)
    else:
        # C + iS = sqrt(pi)/2 e^{i pi/4} erf(e^{-i pi/4} x)
        w = complex(math.sqrt(0.5), math.sqrt(0.5))
        z = ax * w.conjugate()
        val = 0.5 * math.sqrt(math.pi) * w * (1.0 - _erfc_cf(z))
        c, s = val.real, val.imag
    return sign * s, sign * c


def fresnel_s(x: float) -> float:
    return fresnel(x)[0]


def fresnel_c(x: float) -> float:
    return fresnel(x)[1]


# ------------------------------------------------------------ Si and Ci ---

def _sici_series(x):
    # Si = sum (-1)^k x^(2k+1) / ((2k+1)(2k+1)!),  Ci = gamma + ln x + sum_{k>=1} (-1)^k x^(2k) / (2k (2k)!)
    si = 0.0
    ci = 0.0
    term = 1.0  # x^n / n!
    for n in range(1, 120):
        term *= x / n
        sign = -1.0 if (n // 2) % 2 else 1.0
        if n % 2:
            si += sign * term / n
        else:
            ci += sign * term / n
        if n > 3 and term / n < _EPS * max(abs(si), _FPMIN):
            break
    return si, EULER_GAMMA + math.log(x) + ci


def _sici_cf(x):
    # E1(ix) = -Ci(x) + i(Si(x) - pi/2), continued fraction in Lentz form
    b = complex(1.0, x)
    c = 1.0 / _FPMIN
    d = h = 1.0 / b
    for i in range(2, 1000):
        a = -(i - 1) ** 2
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta.real - 1.0) + abs(delta.imag) < _EPS:
            break
    h *= complex(math.cos(x), -math.sin(x))
    return 0.5 * math.pi + h.imag, -h.real


def sici(x: float) -> tuple[float, float]:
    """Return ``(Si(x), Ci(x))`` for ``x > 0``."""
    x = float(x)
    if not x > 0:
        raise DomainError(f"Ci requires x > 0, got {x}")
    if x == math.inf:
        return 0.5 * math.pi, 0.0
    if x < 4.0:
        return _sici_series(x)
    return _sici_cf(x)


def sin_integral(x: float) -> float:
    """Si(x), odd in ``x``; Si(inf) = pi/2."""
    x = float(x)
    if x == 0.0:
        return 0.0
    if x < 0:
        return -sin_integral(-x)
    return sici(x)[0]


def cos_integral(x: float) -> float:
    """Ci(x) for x > 0 (log-divergent at 0)."""
    return sici(x)[1]


# ------------------------------------------------ damped trig integrals ---

@lru_cache(maxsize=4)
def _gauss_legendre(n):
    return np.polynomial.legendre.leggauss(n)


def _repeated_average(partial):
    """Accelerate alternating partial sums; returns (limit, error estimate)."""
    s = np.asarray(partial, dtype=float)
    prev = s[-1]
    est = abs(s[-1] - s[-2])
    while len(s) > 2:
        s = 0.5 * (s[1:] + s[:-1])
        est = abs(s[-1] - prev)
        prev = s[-1]
    return float(s[-1]), est


def _tail(beta, x, kind, cfg):
    """int_x^inf trig(t) / (t sqrt(1 + beta t)) dt for x > 0, trig = sin or cos."""
    offset = 0.0 if kind == "sin" else 0.5
    k0 = math.floor(x / math.pi - offset) + 1
    z1 = (k0 + offset) * math.pi  # first zero strictly above x
    trig = np.sin if kind == "sin" else np.cos
    first = _finite(beta, x, z1, kind, cfg)
    nodes, weights = _gauss_legendre(24)
    m = cfg.tail_panels
    lo = (np.arange(m) + k0 + offset) * math.pi
    t = lo[:, None] + 0.5 * math.pi * (nodes[None, :] + 1.0)
    vals = trig(t) / (t * np.sqrt(1.0 + beta * t))
    panels = 0.5 * math.pi * (vals @ weights)
    partial = first + np.cumsum(panels)
    value, _ = _repeated_average(partial[-32:])
    return value


def _finite(beta, a, b, kind, cfg):
    """int_a^b trig(t)/(t sqrt(1+beta t)) dt on a bounded interval with 0 <= a < b."""
    if b <= a:
        return 0.0
    if kind == "sin":
        def f(t):
            return (math.sin(t) / t if t != 0.0 else 1.0) / math.sqrt(1.0 + beta * t)
    else:
        def f(t):
            return math.cos(t) / (t * math.sqrt(1.0 + beta * t))
    total = 0.0
    if kind == "cos" and a < 1.0:
        # cos t / t on [a, 1]: integrate in s = ln t, where the integrand is smooth
        top = min(b, 1.0)

        def g(s):
            t = math.exp(s)
            return math.cos(t) / math.sqrt(1.0 + beta * t)

        val, _ = integrate.quad(g, math.log(a), math.log(top), epsabs=cfg.abs_tol * 1e-2,
                                epsrel=cfg.rel_tol * 1e-2, limit=cfg.max_subdivisions)
        total += val
        a = top
        if b <= a:
            return total
    pts = None
    if beta * (b - a) > 10.0 and kind == "sin":
        # resolve the 1/sqrt(1 + beta t) knee near the origin
        pts = [p for p in (1.0 / beta, 10.0 / beta, 100.0 / beta) if a < p < b]
    val, _ = integrate.quad(f, a, b, epsabs=cfg.abs_tol * 1e-2, epsrel=cfg.rel_tol * 1e-2,
                            limit=cfg.max_subdivisions, points=pts)
    return total + val


def _check_beta(beta):
    beta = float(beta)
    if beta < 0 or math.isnan(beta):
        raise DomainError(f"beta must be >= 0, got {beta}")
    return beta


def sin_integral_mod(beta: float, x: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """SiM(beta, x) for beta >= 0, x >= 0 (``x = inf`` allowed)."""
    beta = _check_beta(beta)
    x = float(x)
    if x < 0:
        raise DomainError(f"SiM requires x >= 0, got {x}")
    if x == 0.0 or beta == math.inf:
        return 0.0
    head_end = min(x, math.pi)
    head = _finite(beta, 0.0, head_end, "sin", cfg)
    if x <= math.pi:
        return head
    if x <= 8 * math.pi:
        return head + _finite(beta, math.pi, x, "sin", cfg)
    total_tail = _tail(beta, math.pi, "sin", cfg)
    if x == math.inf:
        return head + total_tail
    return head + total_tail - _tail(beta, x, "sin", cfg)


def cos_integral_mod(beta: float, x: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """CiM(beta, x) for beta >= 0, x > 0; CiM(beta, inf) = 0."""
    beta = _check_beta(beta)
    x = float(x)
    if not x > 0:
        raise DomainError(f"CiM requires x > 0, got {x}")
    if x == math.inf or beta == math.inf:
        return 0.0
    return -_tail(beta, x, "cos", cfg)


def f_tau(eta: float, tau: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """F(tau) = SiM(4 eta / tau, inf); rises from F(0) = 0 towards pi/2."""
    if not eta > 0:
        raise DomainError(f"eta must be positive, got {eta}")
    if tau < 0:
        raise DomainError(f"tau must be >= 0, got {tau}")
    if tau == 0:
        return 0.0
    return sin_integral_mod(4.0 * eta / tau, math.inf, cfg)
