"""Exact finite-M outage evaluators for every selection scheme.

Scaled quantities used throughout (x is the SNR threshold):

    r     = sigma_n^2 c t2 x / (t1 (a c - b))    saturation-scaled threshold
    s     = r/2 + sqrt(r^2/4 + c r / Pt)         positive root of y^2 - r y - c r/Pt
    w(y)  = r + c r / (Pt y)                     uplink outage boundary given downlink y
    v(z)  = c r / (Pt (z - r))                   inverse boundary, defined for z > r
    delta = k + m                                binomial summation shift

Per-device SNR parent laws (unit-mean exponential squared gains):

    NonLinear    F(x) = 1 - e^(-r) z K1(z),  z = 2 sqrt(c r / Pt)
    Linear       F(x) = 1 - u K1(u),         u = 2 sqrt(beta), beta = sigma^2 t2 x/(Pt t1)
    Saturation   F(x) = 1 - e^(-r)           (Pt -> inf limit of NonLinear)

"k-th best" always means the k-th largest order statistic.  Alternating
binomial sums are accumulated with math.fsum under a cancellation monitor;
for M > 60, or when the monitor trips, evaluators switch to integral
representations over the order-statistic density, which stay stable at any M.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

from scipy.special import k0 as _bessel_k0  # parent PDF needs K0 alongside K1

from .model import EhModel, SystemParams
from .special import (
    DEFAULT_QUADRATURE,
    DomainError,
    QuadratureSpec,
    bessel_k1,
    integrate_finite,
    integrate_semi_infinite,
    reg_inc_beta,
)

__all__ = [
    "Method",
    "OutageEstimate",
    "PairSpec",
    "Parent",
    "Scheme",
    "SchemeSpec",
    "outage_ebs",
    "outage_ebs_high_snr",
    "outage_ibs",
    "outage_ibs_high_snr",
    "outage_mms",
    "outage_mms_high_snr",
    "outage_pair",
    "outage_pair_high_snr",
    "outage_rs",
    "outage_rs_high_snr",
    "outage_sbs",
    "outage_sbs_high_snr",
]

# sums over (-1)^m C(M-k, m) lose all double precision well before M = 100;
# beyond this cutoff the integral representations take over
MAX_SUM_DEVICES = 60
_CANCELLATION_LIMIT = 1e-8

# nested pair quadrature: inner tolerances tighter than outer so the outer
# integrand looks smooth to quadpack
_PAIR_INNER = QuadratureSpec(1e-10, 1e-14, 400)
_PAIR_OUTER = QuadratureSpec(1e-8, 1e-13, 400)


class Scheme(Enum):
    """Device-selection rule."""

    RS = "RS"
    SBS = "SBS"
    EBS = "EBS"
    IBS = "IBS"
    MMS = "MMS"


class Method(Enum):
    """Evaluation route an outage number came from."""

    ANALYTIC = "analytic"
    HIGH_SNR = "highsnr"
    EVT = "evt"
    MONTE_CARLO = "mc"


@dataclass(frozen=True)
class SchemeSpec:
    """Selection rule, order index k (k-th best), and EH model."""

    scheme: Scheme
    k: int = 1
    model: EhModel = EhModel.NON_LINEAR

    def __post_init__(self) -> None:
        if not (isinstance(self.k, int) and self.k >= 1):
            raise ValueError("order index k must be an integer >= 1")


@dataclass(frozen=True)
class PairSpec:
    """Joint selection of the k-th and j-th best devices, k < j."""

    scheme: Scheme
    k: int
    j: int
    model: EhModel = EhModel.NON_LINEAR

    def __post_init__(self) -> None:
        if self.scheme not in (Scheme.RS, Scheme.SBS):
            raise ValueError("pair selection supports only RS and SBS ranking")
        if not (isinstance(self.k, int) and isinstance(self.j, int)):
            raise ValueError("order indices k, j must be integers")
        if not 1 <= self.k < self.j:
            raise ValueError("pair selection requires 1 <= k < j")


@dataclass(frozen=True)
class OutageEstimate:
    """Outage probability plus the route that produced it."""

    value: float
    method: Method
    stderr: Optional[float] = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"outage value must lie in [0, 1], got {self.value!r}")
        if (self.stderr is not None) != (self.method is Method.MONTE_CARLO):
            raise ValueError("stderr must be present exactly for Monte Carlo estimates")
        if self.stderr is not None and not self.stderr >= 0.0:
            raise ValueError("stderr must be nonnegative")


def _finalize(value: float, method: Method, stderr: Optional[float] = None) -> OutageEstimate:
    # anything beyond float-noise distance from [0, 1] is a formula bug,
    # not roundoff; keep that distinction visible in debug runs
    assert -1e-9 <= value <= 1.0 + 1e-9, f"outage {value!r} far outside the unit interval"
    return OutageEstimate(min(1.0, max(0.0, value)), method, stderr)


def _require(spec: SchemeSpec, scheme: Scheme, params: SystemParams) -> None:
    if spec.scheme is not scheme:
        raise ValueError(f"expected a {scheme.value} spec, got {spec.scheme.value}")
    if spec.k > params.num_devices:
        raise ValueError(f"order index k={spec.k} exceeds num_devices={params.num_devices}")


# ---------------------------------------------------------------------------
# scaled threshold quantities and parent laws
# ---------------------------------------------------------------------------

class Parent(Enum):
    """Which per-device SNR law underlies an evaluation."""

    NON_LINEAR = "nonlinear"
    LINEAR = "linear"
    SATURATION = "saturation"


def parent_from_model(model: EhModel) -> Parent:
    return Parent.LINEAR if model is EhModel.LINEAR else Parent.NON_LINEAR


def r_scale(x: float, params: SystemParams) -> float:
    """r = sigma_n^2 c t2 x / (t1 (a c - b))."""
    rc = params.rectenna
    t1 = params.harvest_fraction
    return params.noise_variance * rc.c * (1.0 - t1) * x / (t1 * rc.saturation_slope)


def _r_and_s(x: float, params: SystemParams) -> tuple[float, float]:
    r = r_scale(x, params)
    cr_over_pt = params.rectenna.c * r / params.transmit_power
    s = 0.5 * r + math.sqrt(0.25 * r * r + cr_over_pt)
    return r, s


def _linear_beta(x: float, params: SystemParams) -> float:
    """beta = sigma_n^2 t2 x / (Pt t1), the linear-model threshold scale."""
    t1 = params.harvest_fraction
    return params.noise_variance * (1.0 - t1) * x / (params.transmit_power * t1)


def parent_cdf(x: float, params: SystemParams, parent: Parent) -> float:
    """CDF of a single device's SNR under the given parent law."""
    if x <= 0.0:
        return 0.0
    if math.isinf(x):  # t2 -> 0 pushes the threshold to inf; outage is certain
        return 1.0
    if parent is Parent.SATURATION:
        return -math.expm1(-r_scale(x, params))
    if parent is Parent.NON_LINEAR:
        r = r_scale(x, params)
        z = 2.0 * math.sqrt(params.rectenna.c * r / params.transmit_power)
        t = z * bessel_k1(z)
        if t <= 0.0:  # K1 underflow: certain outage this deep in the tail
            return 1.0
        return -math.expm1(-r + math.log(t))
    u = 2.0 * math.sqrt(_linear_beta(x, params))
    t = u * bessel_k1(u)
    if t <= 0.0:
        return 1.0
    return -math.expm1(math.log(t))


def parent_pdf(x: float, params: SystemParams, parent: Parent) -> float:
    """Density of a single device's SNR under the given parent law."""
    if x <= 0.0 or math.isinf(x):
        return 0.0
    if parent is Parent.SATURATION:
        rho = r_scale(1.0, params)
        return rho * math.exp(-rho * x)
    if parent is Parent.NON_LINEAR:
        rho = r_scale(1.0, params)
        c_over_pt = params.rectenna.c * rho / params.transmit_power
        z = 2.0 * math.sqrt(c_over_pt * x)
        return math.exp(-rho * x) * (
            rho * z * bessel_k1(z) + 2.0 * c_over_pt * float(_bessel_k0(z))
        )
    beta1 = _linear_beta(1.0, params)
    u = 2.0 * math.sqrt(beta1 * x)
    return 2.0 * beta1 * float(_bessel_k0(u))


def _kth_best_cdf(psi: float, M: int, k: int) -> float:
    """CDF of the k-th largest of M iid draws at parent probability psi."""
    return reg_inc_beta(psi, M - k + 1, k)


# ---------------------------------------------------------------------------
# alternating binomial sums with cancellation guard
# ---------------------------------------------------------------------------

class _SumCancellation(Exception):
    """Alternating sum lost more than the tolerated precision."""


def _signed_order_sum(M: int, k: int, term: Callable[[int], float], lead: float = 0.0) -> float:
    """lead + k C(M,k) sum_m (-1)^m C(M-k, m) term(k+m), cancellation-monitored.

    A nonzero lead folds constants like the 1 of "1 - survival sum" into the
    monitored total, so losing the answer to the final subtraction trips the
    fallback too, not just losing it inside the alternating sum.
    """
    prefactor = k * math.comb(M, k)
    terms = [lead] if lead else []
    for m in range(M - k + 1):
        t = prefactor * math.comb(M - k, m) * term(k + m)
        terms.append(-t if m % 2 else t)
    total = math.fsum(terms)
    worst = max((abs(t) for t in terms), default=0.0)
    if worst > 0.0 and abs(total) < worst * sys.float_info.epsilon / _CANCELLATION_LIMIT:
        raise _SumCancellation
    return total


def _one_minus_order_sum(M: int, k: int, term: Callable[[int], float]) -> float:
    """1 - k C(M,k) sum_m (-1)^m C(M-k, m) term(k+m), monitored as one total."""
    return _signed_order_sum(M, k, lambda d: -term(d), lead=1.0)


def _order_stat_log_density(M: int, k: int, rate: float):
    """log f of the k-th largest of M iid exponentials with the given rate.

    Returns a callable t -> log f(t); -inf signals an exact zero.
    """
    lc = (
        math.log(k * rate)
        + math.lgamma(M + 1)
        - math.lgamma(k + 1)
        - math.lgamma(M - k + 1)
    )

    def logf(t: float) -> float:
        if t <= 0.0:
            return -math.inf
        e = math.exp(-rate * t)
        if e >= 1.0:
            return -math.inf
        return lc - k * rate * t + (M - k) * math.log1p(-e)

    return logf


def _exp_or_zero(e: float) -> float:
    return math.exp(e) if e > -745.0 else 0.0


# ---------------------------------------------------------------------------
# RS and SBS
# ---------------------------------------------------------------------------

def outage_rs(x: float, params: SystemParams, model: EhModel) -> OutageEstimate:
    """Outage of a uniformly selected device: the parent CDF itself."""
    x = float(x)
    if x <= 0.0:
        return _finalize(0.0, Method.ANALYTIC)
    return _finalize(parent_cdf(x, params, parent_from_model(model)), Method.ANALYTIC)


def outage_rs_high_snr(x: float, params: SystemParams) -> OutageEstimate:
    """Transmit-power-independent outage floor 1 - e^(-r)."""
    x = float(x)
    if x <= 0.0:
        return _finalize(0.0, Method.HIGH_SNR)
    return _finalize(parent_cdf(x, params, Parent.SATURATION), Method.HIGH_SNR)


def outage_sbs(x: float, spec: SchemeSpec, params: SystemParams) -> OutageEstimate:
    """Outage of the device with the k-th best end-to-end SNR."""
    _require(spec, Scheme.SBS, params)
    x = float(x)
    if x <= 0.0:
        return _finalize(0.0, Method.ANALYTIC)
    psi = parent_cdf(x, params, parent_from_model(spec.model))
    return _finalize(_kth_best_cdf(psi, params.num_devices, spec.k), Method.ANALYTIC)


def outage_sbs_high_snr(x: float, spec: SchemeSpec, params: SystemParams) -> OutageEstimate:
    """SBS floor: the k-th best order statistic of the saturation parent."""
    _require(spec, Scheme.SBS, params)
    x = float(x)
    if x <= 0.0:
        return _finalize(0.0, Method.HIGH_SNR)
    psi = parent_cdf(x, params, Parent.SATURATION)
    return _finalize(_kth_best_cdf(psi, params.num_devices, spec.k), Method.HIGH_SNR)


# ---------------------------------------------------------------------------
# EBS: rank on harvested energy (equivalently on the downlink gain)
# ---------------------------------------------------------------------------

def _ebs_value(x: float, k: int, M: int, params: SystemParams, parent: Parent) -> float:
    if parent is Parent.NON_LINEAR:
        r, _ = _r_and_s(x, params)
        cr_over_pt = params.rectenna.c * r / params.transmit_power
        scale = math.exp(-r)
        shift = r
    else:
        cr_over_pt = _linear_beta(x, params)
        scale = 1.0
        shift = 0.0

    def term(delta: int) -> float:
        arg = 2.0 * math.sqrt(cr_over_pt * delta)
        return scale * 2.0 * math.sqrt(cr_over_pt / delta) * bessel_k1(arg)

    if M <= MAX_SUM_DEVICES:
        try:
            return _one_minus_order_sum(M, k, term)
        except _SumCancellation:
            pass
    return _ebs_value_integral(k, M, cr_over_pt, shift)


def _ebs_value_integral(k: int, M: int, cr_over_pt: float, shift: float) -> float:
    # positive form: integrate f*(y) P(fail | ranked gain y); no 1 - (1 - eps)
    logf = _order_stat_log_density(M, k, 1.0)

    def f(y: float) -> float:
        if y <= 0.0:
            return 0.0
        return _exp_or_zero(logf(y)) * -math.expm1(-shift - cr_over_pt / y)

    peak = math.log(max(M / k, 2.0))
    val, _ = integrate_semi_infinite(f, 0.0, points=[peak])
    return val


def outage_ebs(x: float, spec: SchemeSpec, params: SystemParams) -> OutageEstimate:
    """Outage of the device harvesting the k-th most energy."""
    _require(spec, Scheme.EBS, params)
    x = float(x)
    if x <= 0.0:
        return _finalize(0.0, Method.ANALYTIC)
    if math.isinf(x):
        return _finalize(1.0, Method.ANALYTIC)
    value = _ebs_value(x, spec.k, params.num_devices, params, parent_from_model(spec.model))
    return _finalize(value, Method.ANALYTIC)


def outage_ebs_high_snr(x: float, params: SystemParams) -> OutageEstimate:
    """EBS floor.  Saturation erases the harvested-energy ranking, so this is
    the RS floor evaluated through the same saturation parent."""
    x = float(x)
    if x <= 0.0:
        return _finalize(0.0, Method.HIGH_SNR)
    return _finalize(parent_cdf(x, params, Parent.SATURATION), Method.HIGH_SNR)


# ---------------------------------------------------------------------------
# IBS: rank on the uplink gain
# ---------------------------------------------------------------------------

def ibs_phi_closed(x: float, params: SystemParams, delta: int) -> float:
    """Tail integral int_r^inf exp(-delta z - c r/(Pt (z - r))) dz in closed form."""
    r, _ = _r_and_s(x, params)
    cr_over_pt = params.rectenna.c * r / params.transmit_power
    arg = 2.0 * math.sqrt(cr_over_pt * delta)
    return math.exp(-delta * r) * 2.0 * math.sqrt(cr_over_pt / delta) * bessel_k1(arg)


def ibs_phi_quadrature(x: float, params: SystemParams, delta: int) -> float:
    """Same tail integral by direct quadrature; cross-check route for the closed form."""
    r, _ = _r_and_s(x, params)
    cr_over_pt = params.rectenna.c * r / params.transmit_power

    def f(z: float) -> float:
        u = z - r
        if u <= 0.0:
            return 0.0
        return _exp_or_zero(-delta * z - cr_over_pt / u)

    val, _ = integrate_semi_infinite(f, r)
    return val


def _ibs_value(x: float, k: int, M: int, params: SystemParams) -> float:
    if M <= MAX_SUM_DEVICES:
        try:
            return _one_minus_order_sum(M, k, lambda d: ibs_phi_closed(x, params, d))
        except _SumCancellation:
            pass
    r, _ = _r_and_s(x, params)
    cr_over_pt = params.rectenna.c * r / params.transmit_power
    logf = _order_stat_log_density(M, k, 1.0)

    # positive form: ranked uplink below r fails outright, above r the
    # downlink gate fails with probability 1 - e^(-c r/(Pt (z - r)))
    def f(t: float) -> float:
        if t <= 0.0:
            return 0.0
        return _exp_or_zero(logf(t + r)) * -math.expm1(-cr_over_pt / t)

    peak = math.log(max(M / k, 2.0))
    val, _ = integrate_semi_infinite(f, 0.0, points=[peak])
    return _kth_best_cdf(-math.expm1(-r), M, k) + val


def outage_ibs(x: float, spec: SchemeSpec, params: SystemParams) -> OutageEstimate:
    """Outage of the device with the k-th best uplink gain."""
    _require(spec, Scheme.IBS, params)
    x = float(x)
    if x <= 0.0:
        return _finalize(0.0, Method.ANALYTIC)
    if math.isinf(x):
        return _finalize(1.0, Method.ANALYTIC)
    if spec.model is EhModel.LINEAR:
        # under the linear harvester the SNR is symmetric in the two gains,
        # so ranking the uplink gain performs exactly like ranking energy
        value = _ebs_value(x, spec.k, params.num_devices, params, Parent.LINEAR)
    else:
        value = _ibs_value(x, spec.k, params.num_devices, params)
    return _finalize(value, Method.ANALYTIC)


def outage_ibs_high_snr(x: float, spec: SchemeSpec, params: SystemParams) -> OutageEstimate:
    """IBS floor: the k-th best uplink order statistic against the threshold r."""
    _require(spec, Scheme.IBS, params)
    x = float(x)
    if x <= 0.0:
        return _finalize(0.0, Method.HIGH_SNR)
    if math.isinf(x):
        return _finalize(1.0, Method.HIGH_SNR)
    M, k = params.num_devices, spec.k
    r, _ = _r_and_s(x, params)
    if M <= MAX_SUM_DEVICES:
        try:
            value = _one_minus_order_sum(M, k, lambda d: math.exp(-d * r) / d)
            return _finalize(value, Method.HIGH_SNR)
        except _SumCancellation:
            pass
    return _finalize(_kth_best_cdf(-math.expm1(-r), M, k), Method.HIGH_SNR)


# ---------------------------------------------------------------------------
# MMS: rank on the worse of the two gains
# ---------------------------------------------------------------------------

def _mms_boundary_w(y: float, r: float, c_over_pt: float) -> float:
    return r + c_over_pt * r / y


def _mms_boundary_v(z: float, r: float, c_over_pt: float) -> float:
    return c_over_pt * r / (z - r)


def _mms_value(x: float, k: int, M: int, params: SystemParams) -> float:
    r, s = _r_and_s(x, params)
    c_over_pt = params.rectenna.c / params.transmit_power

    def part_b(delta: int) -> float:
        def f(y: float) -> float:
            if y <= 0.0:
                return 0.0
            return _exp_or_zero(-_mms_boundary_w(y, r, c_over_pt) - (2 * delta - 1) * y)

        val, _ = integrate_finite(f, 0.0, s)
        return val

    def part_a(delta: int) -> float:
        def f(z: float) -> float:
            u = z - r
            if u <= 0.0:
                return 0.0
            return _exp_or_zero(-_mms_boundary_v(z, r, c_over_pt) - (2 * delta - 1) * z)

        val, _ = integrate_finite(f, r, s)
        return val

    def term(delta: int) -> float:
        return -math.expm1(-2.0 * delta * s) / delta - part_b(delta) - part_a(delta)

    if M <= MAX_SUM_DEVICES:
        try:
            return _signed_order_sum(M, k, term)
        except _SumCancellation:
            pass
    return _mms_value_integral(x, k, M, params)


def _mms_value_integral(x: float, k: int, M: int, params: SystemParams) -> float:
    """Conditional-on-rank form of the same probability; stable at any M."""
    r, s = _r_and_s(x, params)
    c_over_pt = params.rectenna.c / params.transmit_power
    logf = _order_stat_log_density(M, k, 2.0)

    def min_is_downlink(t: float) -> float:  # uplink gain is t + Exp(1)
        if t <= 0.0:
            return 0.0
        w = _mms_boundary_w(t, r, c_over_pt)
        return _exp_or_zero(logf(t)) * -math.expm1(t - w)

    def min_is_uplink(t: float) -> float:  # downlink gain is t + Exp(1)
        u = t - r
        if u <= 0.0:  # boundary diverges: outage is certain below r
            return _exp_or_zero(logf(t))
        v = _mms_boundary_v(t, r, c_over_pt)
        if v <= t:
            return 0.0
        return _exp_or_zero(logf(t)) * -math.expm1(t - v)

    ranked_below_r = _kth_best_cdf(-math.expm1(-2.0 * r), M, k)
    i_down, _ = integrate_finite(min_is_downlink, 0.0, s)
    i_up, _ = integrate_finite(min_is_uplink, r, s)
    return 0.5 * (i_down + ranked_below_r + i_up)


def _mms_linear_value(x: float, k: int, M: int, params: SystemParams) -> float:
    # failure region is the hyperbola g*h < beta, entered only when the
    # ranked minimum falls below s = sqrt(beta); given the minimum t, the
    # other gain is t + Exp(1) and fails with probability 1 - e^(t - beta/t)
    beta = _linear_beta(x, params)
    s = math.sqrt(beta)

    def term(delta: int) -> float:
        head = -math.expm1(-2.0 * delta * s) / delta

        def f(t: float) -> float:
            if t <= 0.0:
                return 0.0
            return _exp_or_zero(-(2 * delta - 1) * t - beta / t)

        tail, _ = integrate_finite(f, 0.0, s)
        return head - 2.0 * tail

    if M <= MAX_SUM_DEVICES:
        try:
            return _signed_order_sum(M, k, term)
        except _SumCancellation:
            pass
    logf = _order_stat_log_density(M, k, 2.0)

    def fail_mass(t: float) -> float:
        if t <= 0.0:
            return 0.0
        return _exp_or_zero(logf(t)) * -math.expm1(t - beta / t)

    val, _ = integrate_finite(fail_mass, 0.0, s)
    return val


def outage_mms(x: float, spec: SchemeSpec, params: SystemParams) -> OutageEstimate:
    """Outage of the device whose worse link is the k-th best."""
    _require(spec, Scheme.MMS, params)
    x = float(x)
    if x <= 0.0:
        return _finalize(0.0, Method.ANALYTIC)
    if math.isinf(x):
        return _finalize(1.0, Method.ANALYTIC)
    if spec.model is EhModel.LINEAR:
        value = _mms_linear_value(x, spec.k, params.num_devices, params)
    else:
        value = _mms_value(x, spec.k, params.num_devices, params)
    return _finalize(value, Method.ANALYTIC)


def outage_mms_high_snr(x: float, spec: SchemeSpec, params: SystemParams) -> OutageEstimate:
    """MMS floor: the saturation limit of the min-link selection outage."""
    _require(spec, Scheme.MMS, params)
    x = float(x)
    if x <= 0.0:
        return _finalize(0.0, Method.HIGH_SNR)
    if math.isinf(x):
        return _finalize(1.0, Method.HIGH_SNR)
    M, k = params.num_devices, spec.k
    r, _ = _r_and_s(x, params)

    def term(delta: int) -> float:
        head = -math.expm1(-2.0 * delta * r) / delta
        tail = math.exp(-r) * -math.expm1(-(2 * delta - 1) * r) / (2 * delta - 1)
        return head - tail

    if M <= MAX_SUM_DEVICES:
        try:
            return _finalize(_signed_order_sum(M, k, term), Method.HIGH_SNR)
        except _SumCancellation:
            pass
    logf = _order_stat_log_density(M, k, 2.0)
    ranked_below_r = _kth_best_cdf(-math.expm1(-2.0 * r), M, k)
    val, _ = integrate_finite(
        lambda t: _exp_or_zero(logf(t)) * math.exp(t - r), 0.0, r
    )
    return _finalize(ranked_below_r - 0.5 * val, Method.HIGH_SNR)


# ---------------------------------------------------------------------------
# pair selection: k-th and j-th best transmit together, single-user detection
# ---------------------------------------------------------------------------

def _two_order_log_const(M: int, k: int, j: int) -> float:
    # multinomial prefactor of the (k-th, j-th) largest joint density
    return (
        math.lgamma(M + 1)
        - math.lgamma(M - j + 1)
        - math.lgamma(j - k)
        - math.lgamma(k)
    )


def pair_marginal_primary(
    x: float, k: int, j: int, M: int, params: SystemParams, parent: Parent
) -> float:
    """P(Y <= x (Z + 1)) for Y, Z the k-th and j-th largest parent SNRs.

    This is the stronger pair member's SINR outage under single-user
    detection, with the weaker member as interference.  Integration runs in
    amplitude coordinates (y = wy^2, z = wz^2) because the parent densities
    have an integrable log singularity at the origin.
    """
    if x <= 0.0:
        return 0.0
    z_max = x / (1.0 - x)
    scale = math.exp(_two_order_log_const(M, k, j))

    def outer(wz: float) -> float:
        z = wz * wz
        f_z = parent_pdf(z, params, parent)
        if f_z == 0.0:
            return 0.0
        cdf_z = parent_cdf(z, params, parent)
        lo = max(z, (z - x) / x)
        hi = x * (z + 1.0)
        if hi <= lo:
            return 0.0

        def inner(wy: float) -> float:
            y = wy * wy
            gap = parent_cdf(y, params, parent) - cdf_z
            if gap <= 0.0 and j - k - 1 > 0:
                return 0.0
            surv = 1.0 - parent_cdf(y, params, parent)
            return (
                parent_pdf(y, params, parent)
                * gap ** (j - k - 1)
                * surv ** (k - 1)
                * 2.0
                * wy
            )

        val, _ = integrate_finite(inner, math.sqrt(lo), math.sqrt(hi), _PAIR_INNER)
        return f_z * cdf_z ** (M - j) * val * 2.0 * wz

    total, _ = integrate_finite(outer, 0.0, math.sqrt(z_max), _PAIR_OUTER)
    return scale * total


def pair_marginal_secondary(
    x: float, k: int, j: int, M: int, params: SystemParams, parent: Parent
) -> float:
    """P(Z <= x (Y + 1)) for Y, Z the k-th and j-th largest parent SNRs.

    The weaker member's SINR outage.  For Y below x/(1-x) the whole
    conditional support Z <= Y is in outage, so that part collapses to the
    k-th best order-statistic CDF; only the tail needs the joint density.
    """
    if x <= 0.0:
        return 0.0
    y_star = x / (1.0 - x)
    head = _kth_best_cdf(parent_cdf(y_star, params, parent), M, k)
    scale = math.exp(_two_order_log_const(M, k, j))

    # outer runs in amplitude coordinates too: the parent tail decays like
    # exp(-a sqrt(y)), which is exponential in wy, so the semi-infinite
    # exponential substitution converges
    def outer(wy: float) -> float:
        y = wy * wy
        f_y = parent_pdf(y, params, parent)
        if f_y == 0.0:
            return 0.0
        cdf_y = parent_cdf(y, params, parent)
        hi = x * (y + 1.0)

        def inner(wz: float) -> float:
            z = wz * wz
            gap = cdf_y - parent_cdf(z, params, parent)
            if gap <= 0.0 and j - k - 1 > 0:
                return 0.0
            return (
                parent_pdf(z, params, parent)
                * parent_cdf(z, params, parent) ** (M - j)
                * gap ** (j - k - 1)
                * 2.0
                * wz
            )

        val, _ = integrate_finite(inner, 0.0, math.sqrt(hi), _PAIR_INNER)
        return f_y * (1.0 - cdf_y) ** (k - 1) * val * 2.0 * wy

    tail, _ = integrate_semi_infinite(outer, math.sqrt(y_star), _PAIR_OUTER)
    return head + scale * tail


def _pair_rs_value(x: float, params: SystemParams, parent: Parent) -> float:
    """Random unordered pair: product parent density over the printed region,
    which requires both members' SINRs to fall below the threshold."""
    z_max = x / (1.0 - x)

    def outer(wz: float) -> float:
        z = wz * wz
        f_z = parent_pdf(z, params, parent)
        if f_z == 0.0:
            return 0.0
        lo = max(0.0, (z - x) / x)
        hi = x * (z + 1.0)
        if hi <= lo:
            return 0.0
        mass = parent_cdf(hi, params, parent) - parent_cdf(lo, params, parent)
        return f_z * mass * 2.0 * wz

    val, _ = integrate_finite(outer, 0.0, math.sqrt(z_max), _PAIR_OUTER)
    return val


def _pair_value(x: float, pair: PairSpec, params: SystemParams, parent: Parent) -> float:
    x = float(x)
    if not x < 1.0:
        raise DomainError(
            "pair outage evaluation requires threshold x < 1: the outer "
            f"integration limit x/(1-x) diverges at x = {x!r}"
        )
    if pair.j > params.num_devices:
        raise ValueError(f"order index j={pair.j} exceeds num_devices={params.num_devices}")
    if x <= 0.0:
        return 0.0
    if pair.scheme is Scheme.RS:
        return _pair_rs_value(x, params, parent)
    return pair_marginal_primary(x, pair.k, pair.j, params.num_devices, params, parent)


def outage_pair(
    x: float, pair: PairSpec, params: SystemParams, model: EhModel
) -> OutageEstimate:
    """Outage of a two-device transmission under single-user detection."""
    value = _pair_value(x, pair, params, parent_from_model(model))
    return _finalize(value, Method.ANALYTIC)


def outage_pair_high_snr(x: float, pair: PairSpec, params: SystemParams) -> OutageEstimate:
    """Pair outage floor through the saturation parent."""
    value = _pair_value(x, pair, params, Parent.SATURATION)
    return _finalize(value, Method.HIGH_SNR)
