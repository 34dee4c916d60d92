"""
Error function, its complement and inverse, vectorized over numpy arrays.

erf/erfc follow the rational approximations of FreeBSD's msun s_erf.c
(Sun Microsystems, 1993, freely redistributable). The inverse starts from a
rational normal-quantile approximation (relative error ~1e-9) and is polished
with Halley steps on the complementary function, so tails keep full relative
accuracy.

`erfinv_centered(x)` evaluates erf^{-1}(2x - 1) straight from x, which is what
the error-function transform needs near x = 0 and x = 1.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial import Polynomial

ERX = 8.45062911510467529297e-01
EFX = 1.28379167095512586316e-01

# erf on [0, 0.84375]
_PP = Polynomial(
    [
        1.28379167095512558561e-01,
        -3.25042107247001499370e-01,
        -2.84817495755985104766e-02,
        -5.77027029648944159157e-03,
        -2.37630166566501626084e-05,
    ]
)
_QQ = Polynomial(
    [
        1.0,
        3.97917223959155352819e-01,
        6.50222499887672944485e-02,
        5.08130628187576562776e-03,
        1.32494738004321644526e-04,
        -3.96022827877536812320e-06,
    ]
)

# erf on [0.84375, 1.25]
_PA = Polynomial(
    [
        -2.36211856075265944077e-03,
        4.14856118683748331666e-01,
        -3.72207876035701323847e-01,
        3.18346619901161753674e-01,
        -1.10894694282396677476e-01,
        3.54783043256182359371e-02,
        -2.16637559486879084300e-03,
    ]
)
_QA = Polynomial(
    [
        1.0,
        1.06420880400844228286e-01,
        5.40397917702171048937e-01,
        7.18286544141962662868e-02,
        1.26171219808761642112e-01,
        1.36370839120290507362e-02,
        1.19844998467991074170e-02,
    ]
)

# erfc on [1.25, 1/0.35]
_RA = Polynomial(
    [
        -9.86494403484714822705e-03,
        -6.93858572707181764372e-01,
        -1.05586262253232909814e01,
        -6.23753324503260060396e01,
        -1.62396669462573470355e02,
        -1.84605092906711035994e02,
        -8.12874355063065934246e01,
        -9.81432934416914548592e00,
    ]
)
_SA = Polynomial(
    [
        1.0,
        1.96512716674392571292e01,
        1.37657754143519042600e02,
        4.34565877475229228821e02,
        6.45387271733267880336e02,
        4.29008140027567833386e02,
        1.08635005541779435134e02,
        6.57024977031928170135e00,
        -6.04244152148580987438e-02,
    ]
)

# erfc on [1/0.35, 28]
_RB = Polynomial(
    [
        -9.86494292470009928597e-03,
        -7.99283237680523006574e-01,
        -1.77579549177547519889e01,
        -1.60636384855821916062e02,
        -6.37566443368389627722e02,
        -1.02509513161107724954e03,
        -4.83519191608651397019e02,
    ]
)
_SB = Polynomial(
    [
        1.0,
        3.03380607434824582924e01,
        3.25792512996573918826e02,
        1.53672958608443695994e03,
        3.19985821950859553908e03,
        2.55305040643316442583e03,
        4.74528541206955367215e02,
        -2.24409524465858183362e01,
    ]
)

# Normal quantile starting guess (rational, central and tail regions)
_QUANTILE_A = Polynomial(
    [
        2.506628277459239,
        -3.066479806614716e1,
        1.383577518672690e2,
        -2.759285104469687e2,
        2.209460984245205e2,
        -3.969683028665376e1,
    ]
)
_QUANTILE_B = Polynomial(
    [
        1.0,
        -1.328068155288572e1,
        6.680131188771972e1,
        -1.556989798598866e2,
        1.615858368580409e2,
        -5.447609879822406e1,
    ]
)
_QUANTILE_C = Polynomial(
    [
        2.938163982698783,
        4.374664141464968,
        -2.549732539343734,
        -2.400758277161838,
        -3.223964580411365e-1,
        -7.784894002430293e-3,
    ]
)
_QUANTILE_D = Polynomial(
    [
        1.0,
        3.754408661907416,
        2.445134137142996,
        3.224671290700398e-1,
        7.784695709041462e-3,
    ]
)
_QUANTILE_SPLIT = 0.02425

_SQRT_PI = np.sqrt(np.pi)
_HALLEY_STEPS = 2


def _clear_low_word(a: np.ndarray) -> np.ndarray:
    # drop the low 32 bits of the mantissa so z*z below is exact
    return (a.view(np.uint64) & np.uint64(0xFFFFFFFF00000000)).view(np.float64)


def _erf_erfc_nonneg(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """erf(a) and erfc(a) for finite a >= 0, each accurate to a few ulp."""
    erf_out = np.ones_like(a)
    erfc_out = np.zeros_like(a)

    tiny = a < 2.0**-28
    small = (a >= 2.0**-28) & (a < 0.84375)
    mid = (a >= 0.84375) & (a < 1.25)
    tail = (a >= 1.25) & (a < 28.0)

    x = a[tiny]
    erf_out[tiny] = x + EFX * x
    erfc_out[tiny] = 1.0 - (x + EFX * x)

    x = a[small]
    zz = x * x
    y = x * (_PP(zz) / _QQ(zz))
    erf_out[small] = x + y
    # below 1/4 the subtraction is benign; above it split off 1/2 first
    erfc_out[small] = np.where(x < 0.25, 1.0 - (x + y), 0.5 - ((x - 0.5) + y))

    x = a[mid]
    s = x - 1.0
    ratio = _PA(s) / _QA(s)
    erf_out[mid] = ERX + ratio
    erfc_out[mid] = (1.0 - ERX) - ratio

    x = a[tail]
    inv = 1.0 / (x * x)
    rational = np.where(x < 1.0 / 0.35, _RA(inv) / _SA(inv), _RB(inv) / _SB(inv))
    z = _clear_low_word(x)
    r = np.exp(-z * z - 0.5625) * np.exp((z - x) * (z + x) + rational)
    erfc_out[tail] = r / x
    erf_out[tail] = 1.0 - r / x

    return erf_out, erfc_out


def erf(x) -> np.ndarray:
    """Error function."""
    x = np.asarray(x, dtype=np.float64)
    flat = x.ravel()
    out = np.full_like(flat, np.nan)
    finite = ~np.isnan(flat)
    a = np.abs(flat[finite])
    a = np.where(np.isinf(a), 28.0, a)
    values, _ = _erf_erfc_nonneg(a)
    out[finite] = np.sign(flat[finite]) * values
    return out.reshape(x.shape)


def erfc(x) -> np.ndarray:
    """Complementary error function 1 - erf(x), accurate in the upper tail."""
    x = np.asarray(x, dtype=np.float64)
    flat = x.ravel()
    out = np.full_like(flat, np.nan)
    finite = ~np.isnan(flat)
    v = flat[finite]
    a = np.abs(v)
    a = np.where(np.isinf(a), 28.0, a)
    _, upper = _erf_erfc_nonneg(a)
    out[finite] = np.where(v < 0, 2.0 - upper, upper)
    return out.reshape(x.shape)


def _normal_quantile_guess(p: np.ndarray) -> np.ndarray:
    """Rational approximation of the standard normal quantile on (0, 1/2]."""
    out = np.empty_like(p)
    low = p < _QUANTILE_SPLIT
    q = np.sqrt(-2.0 * np.log(p[low]))
    out[low] = _QUANTILE_C(q) / _QUANTILE_D(q)
    q = p[~low] - 0.5
    r = q * q
    out[~low] = q * _QUANTILE_A(r) / _QUANTILE_B(r)
    return out


def erfinv_centered(x) -> np.ndarray:
    """erf^{-1}(2x - 1) for x in [0, 1], without forming 2x - 1.

    Returns -inf at x = 0 and +inf at x = 1.
    """
    x = np.asarray(x, dtype=np.float64)
    flat = x.ravel()
    out = np.full_like(flat, np.nan)

    out[flat == 0.0] = -np.inf
    out[flat == 1.0] = np.inf
    inner = (flat > 0.0) & (flat < 1.0)

    # work on the lower half p = min(x, 1 - x) and reflect; 1 - x is exact for x >= 1/2
    upper = flat[inner] > 0.5
    p = np.where(upper, 1.0 - flat[inner], flat[inner])
    w = _normal_quantile_guess(p) / np.sqrt(2.0)  # w <= 0

    for _ in range(_HALLEY_STEPS):
        # residual of erfc(-w)/2 = p, derivative exp(-w^2)/sqrt(pi)
        f = 0.5 * erfc(-w) - p
        step = f / (np.exp(-w * w) / _SQRT_PI)
        w = w - step / (1.0 + w * step)

    out[inner] = np.where(upper, -w, w)
    return out.reshape(x.shape)


def erfinv(y) -> np.ndarray:
    """Inverse error function on [-1, 1]."""
    y = np.asarray(y, dtype=np.float64)
    return erfinv_centered((y + 1.0) / 2.0)
