"""Numerical kernel for the restricted Meijer-G / Fox-H families of the model.

Only the parameter layouts that actually occur in the outage analysis are
supported (product-of-exponentials CCDF/PDF kernels, the annulus mixed-gain
kernel, the Singh-Maddala CDF kernel and the nearest-gain product kernel);
anything else raises UnsupportedSpecError.  Values come from Mellin-Barnes
contour quadrature on a vertical line, switched below a small-argument
crossover to a residue series evaluated by circle integrals around the left
pole ladder, so that tiny CDF values keep *relative* accuracy (needed for
the high-power diversity slope).

Everything here is pure and thread-safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np
from scipy.special import loggamma

EULER_GAMMA = 0.5772156649015328606

# contour -> residue-series switch point for the CDF-side kernels
RESIDUE_CROSSOVER = 1e-3

# incomplete-gamma iteration controls (series / Lentz continued fraction)
_MAX_ITER = 500
_GAMMA_EPS = 1e-15

# tolerance for recognising the restricted parameter layouts
_LAYOUT_ATOL = 1e-9

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)


class UnsupportedSpecError(ValueError):
    """Parameter layout outside the restricted families."""


class KernelConvergenceError(RuntimeError):
    """Quadrature or residue summation failed to reach its tolerance."""

    def __init__(self, message: str, *, achieved: float | None = None,
                 target: float | None = None):
        if achieved is not None and target is not None:
            message = f"{message} (achieved {achieved:.3e}, target {target:.3e})"
        super().__init__(message)
        self.achieved = achieved
        self.target = target


# ---------------------------------------------------------------------------
# lower incomplete gamma
# ---------------------------------------------------------------------------

def lower_incomplete_gamma(a: float, x: float) -> float:
    """gamma(a, x) = int_0^x u^(a-1) e^(-u) du  for a > 0, x >= 0.

    Series for x < a+1, Lentz continued fraction for the upper tail
    otherwise; relative error ~1e-14.
    """
    if a <= 0:
        raise ValueError(f"lower_incomplete_gamma requires a > 0, got a={a!r}")
    if x < 0:
        raise ValueError(f"lower_incomplete_gamma requires x >= 0, got x={x!r}")
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        # gamma(a,x) = x^a e^-x * sum_n x^n / (a(a+1)...(a+n))
        ap = a
        term = 1.0 / a
        total = term
        for _ in range(_MAX_ITER):
            ap += 1.0
            term *= x / ap
            total += term
            if abs(term) < abs(total) * _GAMMA_EPS:
                return math.exp(-x + a * math.log(x)) * total
        raise KernelConvergenceError(
            f"incomplete-gamma series stalled at a={a}, x={x}",
            achieved=abs(term / total), target=_GAMMA_EPS)
    # continued fraction for Gamma(a, x), then subtract from Gamma(a)
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _GAMMA_EPS:
            upper = math.exp(-x + a * math.log(x)) * h
            return math.gamma(a) - upper
    raise KernelConvergenceError(
        f"incomplete-gamma continued fraction stalled at a={a}, x={x}",
        achieved=abs(delta - 1.0), target=_GAMMA_EPS)


# ---------------------------------------------------------------------------
# parameter specs and family classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MeijerSpec:
    """Orders and parameter lists of a Meijer-G symbol G^{m,n}_{p,q}[. | a; b]."""
    m: int
    n: int
    p: int
    q: int
    a: Tuple[float, ...]
    b: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))
        if len(self.a) != self.p or len(self.b) != self.q:
            raise UnsupportedSpecError(
                f"parameter list lengths ({len(self.a)}, {len(self.b)}) do not "
                f"match orders p={self.p}, q={self.q}")
        if not (0 <= self.n <= self.p and 0 <= self.m <= self.q):
            raise UnsupportedSpecError(f"inconsistent orders in {self}")


@dataclass(frozen=True)
class FoxSpec:
    """Orders and (coefficient, scale) pairs of a Fox-H symbol."""
    m: int
    n: int
    p: int
    q: int
    a: Tuple[Tuple[float, float], ...]
    b: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "a", tuple((float(u), float(v)) for u, v in self.a))
        object.__setattr__(
            self, "b", tuple((float(u), float(v)) for u, v in self.b))
        if len(self.a) != self.p or len(self.b) != self.q:
            raise UnsupportedSpecError(
                f"parameter list lengths ({len(self.a)}, {len(self.b)}) do not "
                f"match orders p={self.p}, q={self.q}")
        if not (0 <= self.n <= self.p and 0 <= self.m <= self.q):
            raise UnsupportedSpecError(f"inconsistent orders in {self}")


def _near(value: float, target: float) -> bool:
    return abs(value - target) <= _LAYOUT_ATOL


def _classify_meijer(spec: MeijerSpec):
    """Map a MeijerSpec onto one of the supported families.

    Returns ("ccdf", n) for G^{n,0}_{0,n}[x | 1,..,1,0]   (product CCDF),
            ("pdf", n)  for G^{n,0}_{0,n}[x | 0,..,0]     (product PDF),
            ("annulus", v, c) for G^{v+1,1}_{1,v+2}[x | 1-c; 1,..,1,0,-c].
    """
    if spec.p == 0 and spec.n == 0 and spec.m == spec.q and spec.q >= 1:
        low = sorted(spec.b)
        n = spec.q
        if all(_near(v, 0.0) for v in low):
            return ("pdf", n)
        if n >= 2 and _near(low[0], 0.0) and all(_near(v, 1.0) for v in low[1:]):
            return ("ccdf", n)
    if (spec.p == 1 and spec.n == 1 and spec.q >= 2 and spec.m == spec.q - 1):
        c = -spec.b[-1]
        v = spec.q - 2
        body = sorted(spec.b[:-1])
        if (0.0 < c < 1.0 and _near(spec.a[0], 1.0 - c)
                and _near(body[0], 0.0)
                and all(_near(u, 1.0) for u in body[1:])):
            return ("annulus", v, c)
    raise UnsupportedSpecError(
        f"Meijer-G layout not in the supported families: {spec}")


def _classify_fox(spec: FoxSpec):
    """Map a FoxSpec onto ("sm_cdf", m) or ("z_kernel", v, theta, m)."""
    if spec.m == 1 and spec.n == 1 and spec.p == 1 and spec.q == 1:
        (a1, alpha1), = spec.a
        (b1, beta1), = spec.b
        if _near(a1, 1.0) and _near(alpha1, 1.0) and _near(beta1, 1.0) and b1 > 0:
            return ("sm_cdf", b1)
    if spec.n == 1 and spec.p == 1 and spec.q == spec.m and spec.q >= 1:
        (a1, alpha1), = spec.a
        if _near(alpha1, 1.0) and a1 < 1.0:
            shape = 1.0 - a1
            anchor = [pr for pr in spec.b if _near(pr[0], 0.0) and _near(pr[1], 1.0)]
            blocks = [pr for pr in spec.b if _near(pr[0], 1.0)]
            if len(anchor) == 1 and len(anchor) + len(blocks) == spec.q:
                if not blocks:
                    return ("z_kernel", 0, 1.0, shape)
                thetas = {round(pr[1], 12) for pr in blocks}
                theta = blocks[0][1]
                if len(thetas) == 1 and theta > 0:
                    return ("z_kernel", len(blocks), theta, shape)
    raise UnsupportedSpecError(
        f"Fox-H layout not in the supported families: {spec}")


# ---------------------------------------------------------------------------
# Mellin-Barnes machinery
#
# Each family is reduced to an integrand  exp(sum loggamma(beta_j + B_j s)
# - sum loggamma(delta_j + D_j s) - s log x)  with a pole-free vertical
# window for the contour abscissa.  Factor lists are tuples of (shift, slope).
# ---------------------------------------------------------------------------

def _family_factors(kind):
    """Numerator/denominator gamma factors and the contour window."""
    tag = kind[0]
    if tag == "ccdf":
        n = kind[1]
        num = ((1.0, 1.0),) * (n - 1) + ((0.0, 1.0),)
        return num, (), (0.0, None)
    if tag == "pdf":
        n = kind[1]
        return ((0.0, 1.0),) * n, (), (0.0, None)
    if tag == "annulus":
        v, c = kind[1], kind[2]
        num = ((1.0, 1.0),) * v + ((0.0, 1.0), (c, -1.0))
        return num, ((1.0 + c, -1.0),), (0.0, c)
    if tag == "sm_cdf":
        m = kind[1]
        return ((m, 1.0), (0.0, -1.0)), (), (-m, 0.0)
    if tag == "z_kernel":
        v, theta, m = kind[1], kind[2], kind[3]
        num = ((0.0, 1.0),) + ((1.0, theta),) * v + ((m, -1.0),)
        return num, (), (0.0, m)
    raise UnsupportedSpecError(f"unknown kernel family {kind!r}")


def _log_integrand(s, num, den, logx):
    out = -s * logx
    for beta, slope in num:
        out = out + loggamma(beta + slope * s)
    for beta, slope in den:
        out = out - loggamma(beta + slope * s)
    return out


def _pick_abscissa(num, den, window, logx) -> float:
    """Scan the pole-free window for the abscissa with the flattest peak."""
    lo, hi = window
    if hi is None:
        cands = [lo + d for d in (0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 50.0)]
    else:
        width = hi - lo
        cands = list(lo + width * np.linspace(0.05, 0.95, 19))
    best, best_val = cands[0], math.inf
    for c in cands:
        val = _log_integrand(complex(c, 0.0), num, den, logx).real
        if val < best_val:
            best, best_val = c, val
    return best


def _contour_value(kind, x: float, tol: float) -> float:
    """(1/pi) * int_0^inf Re[integrand(c + iu)] du by Gauss-Legendre panels."""
    num, den, window = _family_factors(kind)
    logx = math.log(x)
    c = _pick_abscissa(num, den, window, logx)
    decay = 0.5 * math.pi * (sum(abs(sl) for _, sl in num)
                             - sum(abs(sl) for _, sl in den))
    h = min(1.0, 30.0 / max(1.0, abs(logx)))
    u_cap = max(80.0, 420.0 / decay)
    total = 0.0
    last = math.inf
    quiet = 0
    u = 0.0
    while u < u_cap:
        nodes = u + 0.5 * h * (_GL_NODES + 1.0)
        s = c + 1j * nodes
        vals = np.exp(_log_integrand(s, num, den, logx)).real
        last = 0.5 * h * float(np.dot(_GL_WEIGHTS, vals))
        total += last
        u += h
        if abs(last) < tol / 16.0:
            quiet += 1
            if quiet >= 2:
                return total / math.pi
        else:
            quiet = 0
    raise KernelConvergenceError(
        f"Mellin-Barnes contour did not settle for family {kind!r} at x={x}",
        achieved=abs(last), target=tol / 16.0)


# --- residue series ---------------------------------------------------------

def _left_poles(kind, count: int):
    """First `count` poles left of 0, descending (closest to zero first)."""
    tag = kind[0]
    if tag in ("ccdf", "annulus"):
        return [-float(k) for k in range(1, count + 1)]
    if tag == "pdf":
        return [-float(k) for k in range(0, count)]
    if tag == "z_kernel":
        theta = kind[2]
        poles = {-float(k) for k in range(1, count + 1)}
        poles.update(-(1.0 + j) / theta for j in range(count))
        return sorted(poles, reverse=True)[:count]
    raise UnsupportedSpecError(f"no residue ladder for family {kind!r}")


def _cluster(poles, gap: float = 0.1):
    clusters = [[poles[0]]]
    for p in poles[1:]:
        if clusters[-1][-1] - p < gap:
            clusters[-1].append(p)
        else:
            clusters.append([p])
    return clusters


def _circle_residue_sum(num, den, logx, center, radius, nodes=192) -> float:
    """(1/2 pi i) closed-circle integral of the integrand = sum of residues."""
    theta = 2.0 * math.pi * (np.arange(nodes) + 0.5) / nodes
    ring = radius * np.exp(1j * theta)
    vals = np.exp(_log_integrand(center + ring, num, den, logx))
    return float((vals * ring).mean().real)


def _residue_sum(kind, x: float, rel_tol: float = 1e-11,
                 max_poles: int = 60) -> float:
    """Sum of the integrand residues over the left pole ladder.

    The poles are walked in clusters away from zero until the running total
    stops moving; each cluster is integrated on a circle small enough to
    bound the x^{-s} amplification (radius <= 3/|log x|).
    """
    num, den, _ = _family_factors(kind)
    logx = math.log(x)
    ladder = _left_poles(kind, max_poles)
    clusters = _cluster(ladder)
    # distances to whatever lies outside each cluster (neighbours and s=0)
    acc = 0.0
    quiet = 0
    for i, cl in enumerate(clusters):
        center = 0.5 * (cl[0] + cl[-1])
        span = cl[0] - cl[-1]
        out_dist = -cl[0] if kind[0] != "pdf" or cl[0] != 0.0 else math.inf
        if i > 0:
            out_dist = min(out_dist, clusters[i - 1][-1] - cl[0])
        if i + 1 < len(clusters):
            out_dist = min(out_dist, cl[-1] - clusters[i + 1][0])
        margin = min(0.2, 3.0 / max(1.0, abs(logx)), 0.45 * out_dist)
        if margin <= 1e-9:
            raise KernelConvergenceError(
                f"pole cluster too crowded for family {kind!r} near s={center}")
        contrib = _circle_residue_sum(num, den, logx, center,
                                      0.5 * span + margin)
        acc += contrib
        if abs(contrib) <= rel_tol * max(abs(acc), 1e-300):
            quiet += 1
            if quiet >= 2:
                return acc
        else:
            quiet = 0
    raise KernelConvergenceError(
        f"residue ladder did not converge for family {kind!r} at x={x}",
        achieved=abs(contrib), target=rel_tol * max(abs(acc), 1e-300))


# ---------------------------------------------------------------------------
# family evaluators (value + CDF-side deficit forms)
# ---------------------------------------------------------------------------

def _ccdf_kernel(x: float, n: int, tol: float = 1e-9) -> float:
    """G^{n,0}_{0,n}[x | 1,..,1,0]: CCDF of a product of n unit exponentials."""
    if n == 1:
        return math.exp(-x)
    if x < RESIDUE_CROSSOVER:
        return 1.0 - _ccdf_kernel_deficit(x, n)
    return _contour_value(("ccdf", n), x, tol)


def _ccdf_kernel_deficit(x: float, n: int) -> float:
    """1 - G^{n,0}_{0,n}[x | 1,..,1,0], accurate for small x."""
    if n == 1:
        return -math.expm1(-x)
    if x >= RESIDUE_CROSSOVER:
        return 1.0 - _contour_value(("ccdf", n), x, 1e-9)
    return -_residue_sum(("ccdf", n), x)


def _pdf_kernel(x: float, n: int, tol: float = 1e-9) -> float:
    """G^{n,0}_{0,n}[x | 0,..,0]: PDF of a product of n unit exponentials."""
    if n == 1:
        return math.exp(-x)
    if x < RESIDUE_CROSSOVER:
        return _residue_sum(("pdf", n), x)
    return _contour_value(("pdf", n), x, tol)


def _annulus_value(x: float, v: int, c: float, tol: float = 1e-9) -> float:
    if x < RESIDUE_CROSSOVER:
        return 1.0 / c - _annulus_deficit(x, v, c)
    return _contour_value(("annulus", v, c), x, tol)


def _annulus_deficit(x: float, v: int, c: float) -> float:
    if x >= RESIDUE_CROSSOVER:
        return 1.0 / c - _contour_value(("annulus", v, c), x, 1e-9)
    return -_residue_sum(("annulus", v, c), x)


def _z_kernel_value(x: float, v: int, theta: float, m: float,
                    tol: float = 1e-8) -> float:
    if x < RESIDUE_CROSSOVER:
        return math.gamma(m) - _z_kernel_deficit(x, v, theta, m)
    return _contour_value(("z_kernel", v, theta, m), x, tol)


def _z_kernel_deficit(x: float, v: int, theta: float, m: float) -> float:
    if x >= RESIDUE_CROSSOVER:
        return math.gamma(m) - _contour_value(("z_kernel", v, theta, m), x, 1e-8)
    return -_residue_sum(("z_kernel", v, theta, m), x)


# ---------------------------------------------------------------------------
# public entry points
# ---------------------------------------------------------------------------

def meijer_g(spec: MeijerSpec, x: float) -> float:
    """Evaluate a supported Meijer-G symbol at x > 0."""
    if x <= 0:
        raise ValueError(f"meijer_g requires x > 0, got x={x!r}")
    kind = _classify_meijer(spec)
    if kind[0] == "ccdf":
        return _ccdf_kernel(x, kind[1])
    if kind[0] == "pdf":
        return _pdf_kernel(x, kind[1])
    return _annulus_value(x, kind[1], kind[2])


def fox_h(spec: FoxSpec, x: float) -> float:
    """Evaluate a supported Fox-H symbol at x > 0."""
    if x <= 0:
        raise ValueError(f"fox_h requires x > 0, got x={x!r}")
    kind = _classify_fox(spec)
    if kind[0] == "sm_cdf":
        return _contour_value(kind, x, 1e-8)
    return _z_kernel_value(x, kind[1], kind[2], kind[3])


def prod_exp_ccdf(z: float, n: int, means: Sequence[float]) -> float:
    """Pr[prod of n independent exponentials >= z], means as given."""
    if n < 1 or len(means) != n:
        raise ValueError(f"need n >= 1 factor means, got n={n}, {len(means)} means")
    if any(m <= 0 for m in means):
        raise ValueError("factor means must be positive")
    if z <= 0:
        return 1.0
    scale = math.prod(means)
    return _ccdf_kernel(z / scale, n)


def prod_exp_cdf(z: float, n: int, means: Sequence[float]) -> float:
    """1 - prod_exp_ccdf, computed on the deficit path for small arguments."""
    if n < 1 or len(means) != n:
        raise ValueError(f"need n >= 1 factor means, got n={n}, {len(means)} means")
    if any(m <= 0 for m in means):
        raise ValueError("factor means must be positive")
    if z <= 0:
        return 0.0
    scale = math.prod(means)
    return _ccdf_kernel_deficit(z / scale, n)


def annulus_kernel(x: float, v: int, c_exp: float) -> float:
    """G^{v+1,1}_{1,v+2}[x | 1-c; 1,..,1,0,-c] with c = c_exp = 2/epsilon."""
    if x <= 0:
        raise ValueError(f"annulus_kernel requires x > 0, got x={x!r}")
    if not (0.0 < c_exp < 1.0):
        raise UnsupportedSpecError(f"annulus exponent must be in (0,1), got {c_exp}")
    if v < 0:
        raise UnsupportedSpecError(f"annulus kernel needs v >= 0, got {v}")
    return _annulus_value(x, v, c_exp)


def annulus_kernel_deficit(x: float, v: int, c_exp: float) -> float:
    """1/c - annulus_kernel(x): the CDF-side remainder, small-x accurate."""
    if x <= 0:
        return 0.0
    if not (0.0 < c_exp < 1.0):
        raise UnsupportedSpecError(f"annulus exponent must be in (0,1), got {c_exp}")
    return _annulus_deficit(x, v, c_exp)


def nearest_kernel(x: float, v: int, theta: float, m: float) -> float:
    """H^{v+1,1}_{1,v+1}[x | (1-m,1); (0,1),(1,theta)^v]."""
    if x <= 0:
        raise ValueError(f"nearest_kernel requires x > 0, got x={x!r}")
    if theta <= 0 or m <= 0 or v < 0:
        raise UnsupportedSpecError(
            f"nearest kernel needs theta > 0, m > 0, v >= 0; got {theta}, {m}, {v}")
    return _z_kernel_value(x, v, theta, m)


def nearest_kernel_deficit(x: float, v: int, theta: float, m: float) -> float:
    """Gamma(m) - nearest_kernel(x): CDF-side remainder, small-x accurate."""
    if x <= 0:
        return 0.0
    if theta <= 0 or m <= 0 or v < 0:
        raise UnsupportedSpecError(
            f"nearest kernel needs theta > 0, m > 0, v >= 0; got {theta}, {m}, {v}")
    return _z_kernel_deficit(x, v, theta, m)


# --- small-argument residue asymptote (Lemma-2 building block) --------------

@lru_cache(maxsize=64)
def _depoled_taylor(n: int) -> Tuple[float, ...]:
    """Taylor coefficients at u=0 of Gamma(1+u)^(n+1) / (u-1).

    This is the product-CCDF integrand with the order-(n+1) pole at s=-1
    factored out (s = -1 + u); the coefficients play the role of the
    log-power weights in the residue expansion.  Extracted numerically by a
    circle FFT -- they are not available in closed form.
    """
    nodes = 64
    radius = 0.5
    theta = 2.0 * math.pi * np.arange(nodes) / nodes
    u = radius * np.exp(1j * theta)
    f = np.exp((n + 1) * loggamma(1.0 + u)) / (u - 1.0)
    coef = np.fft.fft(f) / nodes
    cj = coef[: n + 1] / radius ** np.arange(n + 1)
    return tuple(float(v) for v in cj.real)


def _leading_residue(x: float, n: int) -> float:
    """Residue of Gamma(1+s)^n Gamma(s) x^{-s} at the s=-1 pole."""
    cj = _depoled_taylor(n)
    lx = math.log(x)
    total = 0.0
    for r in range(n + 1):
        total += cj[n - r] * (-lx) ** r / math.factorial(r)
    return x * total


def residue_asymptote(x: float, n: int) -> float:
    """Two-pole approximation of the n+1 factor product CCDF kernel, x -> 0.

    Keeps the residues at s=0 and the order-(n+1) pole at s=-1 only; this is
    the building block of the high-power CDF asymptotes.
    """
    if n < 0:
        raise ValueError(f"residue_asymptote requires n >= 0, got n={n}")
    if x <= 0:
        raise ValueError(f"residue_asymptote requires x > 0, got x={x!r}")
    if n == 0:
        # degenerate chain: a single exponential factor, whose CDF opens
        # linearly
        return 1.0 - x
    return 1.0 + _leading_residue(x, n)


def residue_asymptote_cdf(x: float, n: int) -> float:
    """CDF-side leading term 1 - residue_asymptote(x, n), cancellation-free."""
    if n < 0:
        raise ValueError(f"residue_asymptote_cdf requires n >= 0, got n={n}")
    if x <= 0:
        return 0.0
    if n == 0:
        return x
    return -_leading_residue(x, n)
