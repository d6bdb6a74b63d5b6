"""Closed-form entanglement expressions for the model states.

Everything here is independent of the brute-force engine: the functions
evaluate combinatorial formulas only, so tests can cross-check them
against enumeration.  All entropies use the natural logarithm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import SizeGuardError
from .fock_core import Momentum, _as_momentum

BOUNDS_TOL = 1e-12

# exact-enumeration guards for the condensate distributions
MAX_HALF_N = 8
MAX_PAIR_MODES = 6


def binary_entropy(p: float) -> float:
    """h(p) = -p ln p - (1-p) ln(1-p), defined as 0 at the endpoints."""
    p = float(p)
    if p < -BOUNDS_TOL or p > 1.0 + BOUNDS_TOL:
        raise ValueError(f"probability {p} outside [0, 1]")
    p = min(1.0, max(0.0, p))
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log(p) - (1.0 - p) * math.log(1.0 - p)


def distribution_entropy(probabilities: Sequence[float]) -> float:
    """-sum(p ln p) over a probability vector, 0 ln 0 = 0."""
    total = 0.0
    for p in probabilities:
        p = float(p)
        if p < -BOUNDS_TOL:
            raise ValueError(f"negative probability {p}")
        if p > 0.0:
            total -= p * math.log(p)
    return total


def total_variation(p: Sequence[float], q: Sequence[float]) -> float:
    """Total-variation distance between two distributions of equal length."""
    if len(p) != len(q):
        raise ValueError("distributions have different lengths")
    return 0.5 * float(sum(abs(float(a) - float(b)) for a, b in zip(p, q)))


def qh_entropy(filling: float | Fraction) -> float:
    """Single-mode entropy at filling factor nu: h(nu - floor(nu)).

    Integer fillings give 0; only the fractional part carries
    occupation uncertainty.
    """
    if isinstance(filling, Fraction):
        if filling < 0:
            raise ValueError(f"filling factor {filling} is negative")
        frac = filling - math.floor(filling)
        return binary_entropy(float(frac))
    nu = float(filling)
    if nu < -BOUNDS_TOL:
        raise ValueError(f"filling factor {nu} is negative")
    nu = max(0.0, nu)
    return binary_entropy(nu - math.floor(nu))


def bcs_pair_entropy(g: complex) -> float:
    """Per-member entropy of one coherent pair amplitude g: h(1/(1+|g|^2))."""
    z = 1.0 / (1.0 + abs(g) ** 2)
    return binary_entropy(z)


def _abs2(value):
    """|value|^2 preserving exact types for real inputs."""
    if isinstance(value, complex):
        return value.real * value.real + value.imag * value.imag
    return value * value


def elementary_symmetric(values: Sequence, order: int) -> list:
    """e_0 .. e_order of the given values, by the stable DP recurrence.

    Works with floats, Fractions or ints alike; for nonnegative inputs
    every update adds nonnegative terms, so no cancellation occurs.
    """
    if order < 0:
        raise ValueError("order must be nonnegative")
    e: list = [0] * (order + 1)
    e[0] = 1
    for v in values:
        for j in range(order, 0, -1):
            e[j] = e[j] + v * e[j - 1]
    return e


def bcs_projected_x(
    g: Mapping[Momentum, complex], total_number: int, k: int | Sequence[int]
):
    """Occupation probability x_k of one pair in the number-projected pair state.

    x_k = |g_k|^2 e_{m-1}(|g|^2 without k) / e_m(|g|^2), with m = N/2.
    The x_k sum to N/2.
    """
    if total_number % 2 != 0:
        raise ValueError("total particle number must be even")
    m = total_number // 2
    key = _as_momentum(k)
    if key not in g:
        raise KeyError(f"pair index {key} not in amplitude mapping")
    if m > len(g):
        raise ValueError(f"cannot place {m} pairs into {len(g)} pair modes")
    mags = {idx: _abs2(v) for idx, v in g.items()}
    full = elementary_symmetric(list(mags.values()), m)[m]
    if full == 0:
        raise ValueError("projected pair state vanishes for this amplitude table")
    rest = [v for idx, v in mags.items() if idx != key]
    without = elementary_symmetric(rest, m - 1)[m - 1]
    return mags[key] * without / full


@dataclass(frozen=True)
class GapProfile:
    """Excitation gap and kinetic energy per pair index.

    The quasiparticle energy used below is E = sqrt(kinetic^2 + gap^2).
    """

    gap: Mapping[Momentum, float]
    kinetic: Mapping[Momentum, float]

    def __post_init__(self) -> None:
        for k, d in self.gap.items():
            if d < 0:
                raise ValueError(f"gap at {k} is negative")
            if k not in self.kinetic:
                raise ValueError(f"pair index {k} missing kinetic energy")


def pair_amplitude_from_ratio(ratio: float) -> float:
    """Solve g/(1+g^2) = ratio for the root with |g| <= 1.

    The equation has real solutions only for ratio <= 1/2; the two roots
    are reciprocal and the bounded one is returned.
    """
    ratio = float(ratio)
    if ratio < 0:
        raise ValueError(f"ratio {ratio} is negative")
    if ratio > 0.5 + BOUNDS_TOL:
        raise ValueError(f"ratio {ratio} exceeds 1/2; no real pair amplitude exists")
    ratio = min(ratio, 0.5)
    if ratio == 0.0:
        return 0.0
    return (1.0 - math.sqrt(1.0 - 4.0 * ratio * ratio)) / (2.0 * ratio)


def gap_to_pair_amplitude(profile: GapProfile, k: int | Sequence[int]) -> float:
    """Pair amplitude from the gap equation g/(1+g^2) = gap/(2E)."""
    key = _as_momentum(k)
    delta = float(profile.gap[key])
    if delta == 0.0:
        return 0.0
    energy = math.hypot(float(profile.kinetic[key]), delta)
    return pair_amplitude_from_ratio(delta / (2.0 * energy))


def compositions(total: int, boxes: int) -> Iterator[tuple[int, ...]]:
    """All tuples of ``boxes`` nonnegative ints summing to ``total``."""
    if boxes == 0:
        if total == 0:
            yield ()
        return
    if boxes == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in compositions(total - head, boxes - 1):
            yield (head,) + tail


def multinomial(total: int, parts: Sequence[int]) -> int:
    out = math.factorial(total)
    for p in parts:
        out //= math.factorial(p)
    return out


def _sorted_pair_values(c: Mapping[Momentum, complex]) -> tuple[list[Momentum], list[complex]]:
    keys = sorted(c.keys())
    return keys, [complex(c[k]) for k in keys]


def _guard_condensate(total_number: int, num_pairs: int) -> None:
    if total_number % 2 != 0:
        raise ValueError("total particle number must be even")
    half = total_number // 2
    if half > MAX_HALF_N or num_pairs > MAX_PAIR_MODES:
        raise SizeGuardError(
            f"exact condensate enumeration limited to N/2 <= {MAX_HALF_N} and "
            f"<= {MAX_PAIR_MODES} pair modes (got N/2={half}, pairs={num_pairs})",
            dimension=half,
            guard=MAX_HALF_N,
        )


def bogoliubov_x0_exact(c: Mapping[Momentum, complex], total_number: int) -> np.ndarray:
    """Condensate occupation distribution of the number-projected pair state.

    Entry n0 is the probability of occupation 2*n0 at the zero mode:
    proportional to the sum over pair-occupation patterns summing to
    N/2 - n0 of multinomial(N/2; n0, pattern)^2 * prod |c_j|^(2 n_j),
    normalized over n0.
    """
    _guard_condensate(total_number, len(c))
    half = total_number // 2
    _, values = _sorted_pair_values(c)
    mags = [abs(v) ** 2 for v in values]
    weights = np.zeros(half + 1)
    for n0 in range(half + 1):
        acc = 0.0
        for pattern in compositions(half - n0, len(mags)):
            w = multinomial(half, (n0, *pattern)) ** 2
            term = float(w)
            for m, n in zip(mags, pattern):
                term *= m**n
            acc += term
        weights[n0] = acc
    total = weights.sum()
    if total == 0.0:
        raise ValueError("distribution vanishes; all weights are zero")
    return weights / total


def bogoliubov_x1_exact(
    c: Mapping[Momentum, complex], total_number: int, q1: int | Sequence[int]
) -> np.ndarray:
    """Occupation distribution of one pair mode q1 in the projected state.

    Entry n1 is proportional to |c_{q1}|^(2 n1) times the sum over the
    remaining occupations (condensate plus other pairs) of the squared
    multinomial weight times prod |c_j|^(2 n_j).
    """
    _guard_condensate(total_number, len(c))
    half = total_number // 2
    keys, values = _sorted_pair_values(c)
    target = _as_momentum(q1)
    if target not in keys:
        raise KeyError(f"pair index {target} not in amplitude mapping")
    pos = keys.index(target)
    mag1 = abs(values[pos]) ** 2
    others = [abs(v) ** 2 for i, v in enumerate(values) if i != pos]
    weights = np.zeros(half + 1)
    for n1 in range(half + 1):
        acc = 0.0
        for pattern in compositions(half - n1, 1 + len(others)):
            n0, rest = pattern[0], pattern[1:]
            w = multinomial(half, (n0, n1, *rest)) ** 2
            term = float(w)
            for m, n in zip(others, rest):
                term *= m**n
            acc += term
        weights[n1] = acc * mag1**n1
    total = weights.sum()
    if total == 0.0:
        raise ValueError("distribution vanishes; all weights are zero")
    return weights / total


class ApproximateDistribution(NamedTuple):
    """Distribution from a closed-form shortcut plus its assumption residual.

    ``residual`` is the magnitude of the dropped cross-term sum; the
    shortcut is trustworthy only where the residual is small, so callers
    should report it alongside the probabilities.
    """

    probabilities: np.ndarray
    residual: float


def bogoliubov_x0_approx(
    c: Mapping[Momentum, complex], total_number: int
) -> ApproximateDistribution:
    """Geometric-form condensate distribution, valid when pair amplitudes
    have uncorrelated phases.

    Entry n0 is proportional to |sum_q c_q|^(N - 2 n0).  The residual
    |sum_{q != q'} conj(c_q) c_{q'}| measures the neglected cross terms.
    """
    if total_number % 2 != 0:
        raise ValueError("total particle number must be even")
    half = total_number // 2
    _, values = _sorted_pair_values(c)
    coherent = abs(sum(values))
    incoherent = sum(abs(v) ** 2 for v in values)
    residual = abs(coherent**2 - incoherent)
    weights = np.zeros(half + 1)
    for n0 in range(half + 1):
        exponent = total_number - 2 * n0
        weights[n0] = 1.0 if exponent == 0 else coherent**exponent
    return ApproximateDistribution(weights / weights.sum(), float(residual))


def bogoliubov_x1_approx(
    c: Mapping[Momentum, complex], total_number: int, q1: int | Sequence[int]
) -> ApproximateDistribution:
    """Geometric-form distribution for one pair mode q1.

    Entry n1 is proportional to |c_{q1}|^(2 n1) * sum over condensate
    occupations n0 <= N/2 - n1 of |sum_{q != q1} c_q|^(N - 2 n0 - 2 n1).
    The residual covers the cross terms among the remaining modes.
    """
    if total_number % 2 != 0:
        raise ValueError("total particle number must be even")
    half = total_number // 2
    keys, values = _sorted_pair_values(c)
    target = _as_momentum(q1)
    if target not in keys:
        raise KeyError(f"pair index {target} not in amplitude mapping")
    pos = keys.index(target)
    mag1 = abs(values[pos]) ** 2
    rest = [v for i, v in enumerate(values) if i != pos]
    coherent = abs(sum(rest)) if rest else 0.0
    incoherent = sum(abs(v) ** 2 for v in rest)
    residual = abs(coherent**2 - incoherent)
    weights = np.zeros(half + 1)
    for n1 in range(half + 1):
        geo = 0.0
        for n0 in range(half - n1 + 1):
            exponent = total_number - 2 * n0 - 2 * n1
            geo += 1.0 if exponent == 0 else coherent**exponent
        weights[n1] = (mag1**n1) * geo
    total = weights.sum()
    if total == 0.0:
        raise ValueError("distribution vanishes; all weights are zero")
    return ApproximateDistribution(weights / total, float(residual))


def geometric_pair_distribution(ratio_magnitude: float, cutoff: int) -> np.ndarray:
    """Occupation distribution x_i proportional to r^(2i), i = 0..cutoff."""
    r2 = float(ratio_magnitude) ** 2
    if not 0.0 <= r2 < 1.0:
        raise ValueError(f"|v/u| must lie in [0, 1), got {ratio_magnitude}")
    weights = np.array([r2**i for i in range(cutoff + 1)])
    return weights / weights.sum()


@dataclass(frozen=True)
class ExcitonMarginals:
    """Row and column weights of a normalized pair-amplitude matrix A.

    alpha_electron[k] = sum_{k'} |A(k,k')|^2 and alpha_hole[k'] is the
    column analogue.  gamma values subtract the shared element:
    gamma_electron = alpha_k - |A(k,k')|^2 for the chosen (k, k').
    """

    alpha_electron: Mapping[Momentum, float]
    alpha_hole: Mapping[Momentum, float]
    weights: Mapping[tuple[Momentum, Momentum], float]

    def pair_weight(self, k: Momentum, kp: Momentum) -> float:
        return self.weights.get((k, kp), 0.0)

    def gamma(self, k: Momentum, kp: Momentum) -> tuple[float, float]:
        w = self.pair_weight(k, kp)
        return self.alpha_electron[k] - w, self.alpha_hole[kp] - w

    def electron_entropy(self, k: Momentum) -> float:
        return binary_entropy(self.alpha_electron[k])

    def hole_entropy(self, kp: Momentum) -> float:
        return binary_entropy(self.alpha_hole[kp])

    def joint_entropy(self, k: Momentum, kp: Momentum) -> float:
        """Entropy of the mode pair {electron k, hole k'} for one spinless pair."""
        w = self.pair_weight(k, kp)
        ge, gh = self.gamma(k, kp)
        return distribution_entropy([w, ge, gh, 1.0 - w - ge - gh])

    def spinful_electron_entropy(self, k: Momentum) -> float:
        """Single spin-resolved electron mode in a spin-mixed channel: h(alpha/2)."""
        return binary_entropy(0.5 * self.alpha_electron[k])

    def spinful_hole_entropy(self, kp: Momentum) -> float:
        return binary_entropy(0.5 * self.alpha_hole[kp])

    def spinful_opposite_entropy(self, k: Momentum, kp: Momentum) -> float:
        """{electron(k, up), hole(k', down)} in a spin-mixed channel.

        Same four-term structure as ``joint_entropy`` with every
        argument halved, since each spin branch carries weight 1/2.
        """
        w = 0.5 * self.pair_weight(k, kp)
        ge, gh = self.gamma(k, kp)
        ge, gh = 0.5 * ge, 0.5 * gh
        return distribution_entropy([w, ge, gh, 1.0 - w - ge - gh])

    def spinful_same_entropy(self, k: Momentum, kp: Momentum) -> float:
        """{electron(k, up), hole(k', up)} in a spin-mixed channel.

        The two modes are never jointly occupied, leaving three terms
        with halved marginals.
        """
        ae = 0.5 * self.alpha_electron[k]
        ah = 0.5 * self.alpha_hole[kp]
        return distribution_entropy([ae, ah, 1.0 - ae - ah])


def exciton_marginals(amplitudes: Mapping[tuple, complex]) -> ExcitonMarginals:
    """Marginals of an electron-hole amplitude table keyed by (k, k')."""
    weights: dict[tuple[Momentum, Momentum], float] = {}
    alpha_e: dict[Momentum, float] = {}
    alpha_h: dict[Momentum, float] = {}
    total = 0.0
    for (k, kp), a in amplitudes.items():
        k, kp = _as_momentum(k), _as_momentum(kp)
        w = abs(complex(a)) ** 2
        weights[(k, kp)] = weights.get((k, kp), 0.0) + w
        alpha_e[k] = alpha_e.get(k, 0.0) + w
        alpha_h[kp] = alpha_h.get(kp, 0.0) + w
        total += w
    if abs(total - 1.0) > 1e-12:
        raise ValueError(f"amplitude table has squared sum {total}, expected 1")
    return ExcitonMarginals(alpha_e, alpha_h, weights)
