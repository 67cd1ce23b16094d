"""Finite-n evaluation of the energy and error-probability lower bounds.

Everything here is a pure function of its arguments.  Logarithms are
natural unless a function says otherwise; the parallel-decoder energy bound
is a ratio of logarithms, so its base does not matter.

Energy-valued bounds are returned as ``xi * lambda^2 * (A_bar * tau)``, where
``A_bar`` is area in units of ``lambda^2``.
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass, field

from vlsidec.grid_circuit import K_PRIME, TechParams

SQRT2 = math.sqrt(2.0)
BISECTION_CONST = (SQRT2 - 1.0) ** 2 / 16.0
DEFAULT_K = 0.5
AREA_EXPONENT = 0.9

BRANCHES = ("small_j", "large_area_ratio", "main", "linear_area_small_j", "linear_area_large_j")


@dataclass(frozen=True)
class ChannelParams:
    """Erasure probability, optionally derived from a BSC crossover ``p`` as ``2p``."""

    epsilon: float | None = None
    bsc_crossover: float | None = None

    def __post_init__(self):
        eps = self.epsilon
        if self.bsc_crossover is not None:
            mapped = 2.0 * float(self.bsc_crossover)
            if eps is not None and eps != mapped:
                raise ValueError(f"epsilon={eps} disagrees with 2*bsc_crossover={mapped}")
            eps = mapped
        if eps is None:
            raise ValueError("need epsilon or bsc_crossover")
        eps = float(eps)
        if not 0.0 < eps < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {eps}")
        object.__setattr__(self, "epsilon", eps)

    @property
    def log_inv(self) -> float:
        return -math.log(self.epsilon)


@dataclass(frozen=True)
class DecoderParams:
    n: int
    k: int
    j: int = 1
    p: int = 1
    area_bar: float | None = None
    beta: float | None = None
    tau: float | None = None

    def __post_init__(self):
        if not 1 <= self.k <= self.n:
            raise ValueError(f"need 1 <= k <= n, got k={self.k}, n={self.n}")
        if self.j < 1 or self.p < 1:
            raise ValueError("pin counts j and p must be at least 1")
        if self.beta is not None and self.beta < 1:
            raise ValueError("beta must be at least 1")
        if self.area_bar is not None and not self.area_bar > 0:
            raise ValueError("area_bar must be positive")

    @classmethod
    def from_rate(cls, n: int, rate: float, **kw) -> DecoderParams:
        return cls(n=n, k=max(1, round(n * rate)), **kw)

    @property
    def R(self) -> float:
        return self.k / self.n


@dataclass(frozen=True)
class BoundReport:
    name: str
    value: float
    raw: float
    units: str
    branch: str = ""
    inputs: dict = field(default_factory=dict)
    clamped: bool = False
    vacuous: bool = False
    extra: dict = field(default_factory=dict)
    violations: tuple[str, ...] = ()


# -- lemmas -----------------------------------------------------------------------


def log_limit_term(c: float, c_prime: float, n: float) -> float:
    """Natural log of ``(1 - n^-c)^(c' n / ln n)``."""
    if not 0.0 < c < 1.0:
        raise ValueError("c must lie in (0, 1)")
    if c_prime <= 0:
        raise ValueError("c_prime must be positive")
    if n < 2:
        raise ValueError("n must be at least 2")
    ln_n = math.log(n)
    return (c_prime * n / ln_n) * math.log1p(-math.exp(-c * ln_n))


def limit_term(c: float, c_prime: float, n: float) -> float:
    """``(1 - exp(-c ln n))^(c' n / ln n)``, evaluated through its logarithm.

    Exact down to the smallest subnormal double; use :func:`log_limit_term`
    when the value itself would underflow.
    """
    return math.exp(log_limit_term(c, c_prime, n))


def pigeonhole_bound(x_size: float, y_size: float) -> float:
    """Best success probability guessing ``X`` from a ``|Y|``-valued message."""
    if x_size < 1 or y_size < 0:
        raise ValueError("need x_size >= 1 and y_size >= 0")
    return min(1.0, y_size / x_size)


def _log_one_minus_pow(eps: float, e: float) -> float:
    """``log(1 - eps^e)``; ``-inf`` when ``eps^e`` rounds to one."""
    t = math.exp(e * math.log(eps)) if eps > 0 else 0.0
    return -math.inf if t >= 1.0 else math.log1p(-t)


def partition_product(epsilon: float, parts: Iterable[float]) -> float:
    """``prod (1 - eps^n_i)`` summed in the log domain."""
    parts = list(parts)
    if any(x <= 0 for x in parts):
        raise ValueError("parts must be positive")
    return math.exp(sum(_log_one_minus_pow(epsilon, x) for x in parts))


def convex_partition_bound(epsilon: float, n: float, m: float) -> float:
    """Maximum of the partition product over parts summing to ``n``: ``(1 - eps^(n/m))^m``."""
    if m < 1:
        raise ValueError("m must be at least 1")
    return math.exp(m * _log_one_minus_pow(epsilon, n / m))


def atau2_lower(B_r: float, r: int, lam: float = 1.0) -> float:
    """``A tau^2`` floor from ``B_r`` bits crossing an ``r``-stage nested bisection."""
    if B_r < 0 or r < 0:
        raise ValueError("need B_r >= 0 and r >= 0")
    return BISECTION_CONST * (B_r * B_r / 2.0 ** (r + 1)) * lam * lam


def edec_lower(B_r: float, r: int, beta: float, tech: TechParams = TechParams()) -> float:
    """Energy floor ``K_tech sqrt(beta / 2^r) B_r`` for a circuit with at least ``beta`` nodes."""
    if beta < 1:
        raise ValueError("beta must be at least 1")
    if B_r < 0 or r < 0:
        raise ValueError("need B_r >= 0 and r >= 0")
    return tech.k_tech * math.sqrt(beta / 2.0**r) * B_r


def pe_block_lower(epsilon: float, n: float, r: int) -> BoundReport:
    """``1/2 - (1 - eps^(n/2^(r-1)))^(2^(r-1))``, clamped at zero.

    Valid unless the nested bisection carries at least ``k/2`` bits.
    """
    if r < 1:
        raise ValueError("r must be at least 1")
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must lie in [0, 1]")
    q = 2.0 ** (r - 1)
    if epsilon == 0.0:
        inner = 1.0
    else:
        inner = math.exp(q * _log_one_minus_pow(epsilon, n / q))
    raw = 0.5 - inner
    value = min(0.5, max(0.0, raw))
    return BoundReport(
        name="pe_block",
        value=value,
        raw=raw,
        units="probability",
        inputs={"epsilon": epsilon, "n": n, "r": r},
        clamped=value != raw,
    )


# -- theorems ---------------------------------------------------------------------


def _inputs(params: DecoderParams, ch: ChannelParams, tech: TechParams) -> dict:
    d = {"n": params.n, "k": params.k, "R": params.R, "j": params.j, "epsilon": ch.epsilon,
         "xi": tech.xi, "lambda": tech.lam}
    if params.area_bar is not None:
        d["area_bar"] = params.area_bar
    return d


def parallel_stage_count(n: float, epsilon: float, K: float = DEFAULT_K) -> int:
    """Nested-bisection depth ``floor(log2(2 ln(1/eps) n / (K ln n)))``."""
    if not 0.0 < K < 1.0:
        raise ValueError("K must lie in (0, 1)")
    return math.floor(math.log2(2.0 * -math.log(epsilon) * n / (K * math.log(n))))


def parallel_per_bit(n: float, epsilon: float, tech: TechParams = TechParams()) -> float:
    """Per-decoded-bit energy floor ``K_tech sqrt(log n / log(1/eps))`` of a fully parallel decoder."""
    return tech.k_tech * math.sqrt(math.log(n) / -math.log(epsilon))


def theorem1_bound(
    params: DecoderParams,
    ch: ChannelParams,
    tech: TechParams = TechParams(),
    base: float = 2.0,
    K: float = DEFAULT_K,
) -> BoundReport:
    """Fully parallel decoder: ``E > K_tech sqrt(log n / log(1/eps)) R n / 2``.

    ``base`` picks the logarithm used in the ratio; all bases agree.
    """
    n = params.n
    if n < 2:
        raise ValueError("n must be at least 2")
    ratio = math.log(n, base) / math.log(1.0 / ch.epsilon, base)
    value = tech.k_tech * math.sqrt(ratio) * params.R * n / 2.0
    extra = {"per_bit": parallel_per_bit(n, ch.epsilon, tech)}
    try:
        extra["r"] = parallel_stage_count(n, ch.epsilon, K)
    except ValueError:
        pass
    return BoundReport("theorem1", value, value, "energy", inputs=_inputs(params, ch, tech), extra=extra)


def theorem2_bound(params: DecoderParams, ch: ChannelParams, tech: TechParams = TechParams()) -> BoundReport:
    """Serial decoder with ``j`` output pins: ``E >= xi lam^2 R^2 n (ln n - j) / (j ln(1/eps))``.

    Reports zero, flagged vacuous, when ``ln n <= j``.
    """
    n, j, R = params.n, params.j, params.R
    ln_n = math.log(n)
    raw = tech.xi * tech.lam**2 * R * R * n / (j * ch.log_inv) * (ln_n - j)
    vacuous = ln_n <= j
    value = 0.0 if vacuous else raw
    return BoundReport(
        "theorem2", value, raw, "energy", inputs=_inputs(params, ch, tech), vacuous=vacuous,
        extra={"per_bit": value / params.k, "tau_min": math.ceil(params.k / j)},
    )


def theorem3_case(
    params: DecoderParams,
    ch: ChannelParams,
    tech: TechParams = TechParams(),
    area_regime: str = "sublinear",
) -> BoundReport:
    """General pin-count decoder: pick the case that applies and evaluate it.

    Cases are tested in order: few output pins (``j < sqrt(ln k)``), a large
    area-per-pin ratio (``A_bar / j > ln^0.9 n``), then either the two
    area-proportional-to-``n`` cases (``area_regime="linear"``, with
    ``c = A_bar / n``) or the main epoch/subcircuit argument.  The value is
    ``xi lam^2`` times the ``A_bar tau`` floor of that case.
    """
    if area_regime not in ("sublinear", "linear"):
        raise ValueError(f"area_regime must be 'sublinear' or 'linear', got {area_regime!r}")
    n, k, j, R = params.n, params.k, params.j, params.R
    if n < 3:
        raise ValueError("n must be at least 3")
    ln_n, ln_k = math.log(n), math.log(k)
    log_inv = ch.log_inv
    ln09 = ln_n**AREA_EXPONENT
    A = params.area_bar
    c = log_inv / 8.0
    extra: dict = {"c": c, "sqrt_ln_k": math.sqrt(ln_k), "ln09_n": ln09}
    violations: list[str] = []

    if A is not None:
        extra["M"] = k / (4.0 * A)
        extra["N"] = 4.0 * c * A / (R * ln_n)

    if j < math.sqrt(ln_k):
        branch = "small_j"
        at = R * R * n / log_inv * (math.sqrt(ln_k) - 1.0)
    elif A is not None and A / j > ln09:
        branch = "large_area_ratio"
        at = A * k / j
    elif area_regime == "linear":
        if A is None:
            raise ValueError("linear area regime needs area_bar")
        c_lin = A / n
        extra["c_area"] = c_lin
        if j <= k / ln09:
            branch = "linear_area_small_j"
            at = c_lin * n * ln09
        else:
            branch = "linear_area_large_j"
            at = (SQRT2 - 1.0) / (8.0 * SQRT2) * math.sqrt(c_lin * R * ln_n / log_inv) * n
    else:
        branch = "main"
        at = K_PRIME**0.4 / 4.0 * k * (8.0 * R * ln_n / log_inv) ** 0.2
        if A is None:
            violations.append("area_bar not given: M, N and their constraints unchecked")
        else:
            if extra["N"] > j:
                violations.append(f"N <= j failed: N={extra['N']:.6g}, j={j}")
            if j > 4.0 * A:
                violations.append(f"j <= 4*A_bar failed: j={j}, A_bar={A:.6g}")
            if extra["M"] < 1.0:
                violations.append(f"M >= 1 failed: M={extra['M']:.6g}")

    value = tech.xi * tech.lam**2 * at
    extra["area_time"] = at
    return BoundReport(
        "theorem3", value, value, "energy", branch=branch, inputs=_inputs(params, ch, tech),
        extra=extra, violations=tuple(violations),
    )


# -- gap to capacity ----------------------------------------------------------------


@dataclass(frozen=True)
class CapacityGap:
    eta: float
    n: float
    per_bit: float
    mode: str
    scalings: tuple[float, float, float]


def block_length_for_gap(eta: float, c_channel: float) -> float:
    """Approximate minimum block length ``c / (1 - eta)^2``."""
    if not 0.0 < eta < 1.0:
        raise ValueError("eta must lie in (0, 1)")
    if c_channel <= 0:
        raise ValueError("c_channel must be positive")
    return c_channel / (1.0 - eta) ** 2


def capacity_gap(
    eta: float,
    c_channel: float,
    mode: str,
    ch: ChannelParams,
    params: DecoderParams | None = None,
    tech: TechParams = TechParams(),
) -> CapacityGap:
    """Per-bit energy floor at the block length needed to reach fraction ``eta`` of capacity.

    ``params`` supplies ``R`` and ``j`` for the serial and general modes.
    ``scalings`` are the growth rates ``sqrt(L)``, ``L`` and ``L^(1/5)`` with
    ``L = ln(1/(1 - eta))``.
    """
    n = block_length_for_gap(eta, c_channel)
    L = math.log(1.0 / (1.0 - eta))
    scalings = (math.sqrt(L), L, L**0.2)
    if mode == "parallel":
        per_bit = parallel_per_bit(n, ch.epsilon, tech)
    elif mode in ("serial", "general"):
        R = params.R if params is not None else 0.5
        j = params.j if params is not None else 1
        scale = tech.xi * tech.lam**2
        if mode == "serial":
            per_bit = max(0.0, scale * R / (j * ch.log_inv) * (math.log(n) - j))
        else:
            per_bit = scale * K_PRIME**0.4 / 4.0 * (8.0 * R * math.log(n) / ch.log_inv) ** 0.2
    else:
        raise ValueError(f"mode must be parallel, serial or general, got {mode!r}")
    return CapacityGap(eta, n, per_bit, mode, scalings)
