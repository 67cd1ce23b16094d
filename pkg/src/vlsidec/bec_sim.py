"""Monte-Carlo peeling decoding of regular LDPC codes over the erasure channel.

The all-zeros codeword is assumed throughout, so a trial is just an erasure
pattern.  Randomness comes from Philox generators keyed by
``SeedSequence(master_seed, spawn_key=(trial,))``; trial ``t`` sees the same
pattern no matter how trials are batched or ordered.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.stats import binomtest

from vlsidec import bisection, bounds
from vlsidec import grid_circuit as gc
from vlsidec.tanner_layout import TannerGraph


def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


def sample_regular_code(n: int, d_v: int, d_c: int, seed: int = 0) -> TannerGraph:
    """Configuration-model ``(d_v, d_c)``-regular Tanner multigraph on ``n`` variables."""
    if n < 1 or d_v < 1 or d_c < 1:
        raise ValueError("n, d_v and d_c must be positive")
    if (n * d_v) % d_c:
        raise ValueError(f"n*d_v = {n * d_v} is not divisible by d_c = {d_c}")
    m = n * d_v // d_c
    sockets = np.repeat(np.arange(m), d_c)
    perm = _rng(seed).permutation(sockets)
    var = np.repeat(np.arange(n), d_v)
    return TannerGraph(n, m, tuple(zip(var.tolist(), perm.tolist())), d_v=d_v, d_c=d_c)


def replicate_code(graph: TannerGraph, copies: int) -> TannerGraph:
    """Disjoint union of ``copies`` copies, interleaved so node ``v`` of copy ``c`` is ``v*copies + c``.

    The first ``k`` variables then spread evenly over the copies.
    """
    if copies < 1:
        raise ValueError("copies must be at least 1")
    edges = tuple((v * copies + c, u * copies + c) for v, u in graph.edges for c in range(copies))
    return TannerGraph(graph.n_var * copies, graph.n_chk * copies, tuple(sorted(edges)), graph.d_v, graph.d_c)


@dataclass(frozen=True)
class ErasurePattern:
    n: int
    erased: np.ndarray  # bool, length n
    seed: tuple[int, ...] = ()

    @classmethod
    def sample(cls, n: int, epsilon: float, master_seed: int, trial: int = 0) -> ErasurePattern:
        if not 0.0 <= epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")
        erased = _rng(master_seed, trial).random(n) < epsilon
        return cls(n, erased, (master_seed, trial))

    @classmethod
    def of(cls, n: int, erased_indices) -> ErasurePattern:
        e = np.zeros(n, bool)
        e[list(erased_indices)] = True
        return cls(n, e)


@dataclass(frozen=True)
class DecodeResult:
    success: bool
    iterations: int


def parity_matrix(graph: TannerGraph) -> sp.csr_matrix:
    """GF(2) check matrix; a doubled edge cancels."""
    if not graph.edges:
        return sp.csr_matrix((graph.n_chk, graph.n_var), dtype=np.int32)
    e = np.asarray(graph.edges)
    H = sp.coo_matrix((np.ones(len(e), np.int32), (e[:, 1], e[:, 0])), shape=(graph.n_chk, graph.n_var)).tocsr()
    H.sum_duplicates()
    H.data %= 2
    H.eliminate_zeros()
    return H


def default_max_iter(graph: TannerGraph) -> int:
    d_v = max(graph.var_degrees, default=1)
    return max(1, math.ceil(2 * d_v * math.log2(max(graph.n_var, 2))))


def _peel_batch(H: sp.csr_matrix, erased: np.ndarray, max_iter: int) -> tuple[np.ndarray, np.ndarray]:
    """Flooding peeling on a batch; ``erased`` is ``(n, B)`` bool and is consumed."""
    n, B = erased.shape
    idx = np.arange(1, n + 1, dtype=np.int64)[:, None]
    iters = np.zeros(B, np.int64)
    live = erased.any(axis=0)
    for _ in range(max_iter):
        if not live.any():
            break
        cols = np.flatnonzero(live)
        E = erased[:, cols]
        cnt = H @ E.astype(np.int32)
        who = H @ (E * idx)
        hit = cnt == 1
        progressed = hit.any(axis=0)
        rows, bc = np.nonzero(hit)
        erased[who[rows, bc] - 1, cols[bc]] = False
        iters[cols[progressed]] += 1
        live[cols[~progressed]] = False
        live[cols] &= erased[:, cols].any(axis=0)
    return ~erased.any(axis=0), iters


def peel_decode(graph: TannerGraph, pattern: ErasurePattern, max_iter: int | None = None) -> DecodeResult:
    """Resolve erasures through checks with a single erased neighbour, all at once per iteration."""
    if pattern.n != graph.n_var:
        raise ValueError("pattern length does not match the code")
    cap = default_max_iter(graph) if max_iter is None else max_iter
    ok, it = _peel_batch(parity_matrix(graph), pattern.erased.copy()[:, None], cap)
    return DecodeResult(bool(ok[0]), int(it[0]))


@dataclass(frozen=True)
class PeEstimate:
    trials: int
    failures: int
    pe_hat: float
    ci_lo: float
    ci_hi: float
    mean_iters: float
    iterations: np.ndarray = field(repr=False, compare=False)

    @property
    def half_width(self) -> float:
        return (self.ci_hi - self.ci_lo) / 2.0


def wilson_interval(failures: int, trials: int) -> tuple[float, float]:
    ci = binomtest(failures, trials).proportion_ci(confidence_level=0.95, method="wilson")
    return float(ci.low), float(ci.high)


def estimate_pe(
    graph: TannerGraph,
    epsilon: float,
    trials: int,
    master_seed: int = 0,
    max_iter: int | None = None,
    batch: int = 256,
) -> PeEstimate:
    """Block error rate over ``trials`` erasure patterns with a 95% Wilson interval."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must lie in [0, 1]")
    H = parity_matrix(graph)
    cap = default_max_iter(graph) if max_iter is None else max_iter
    n = graph.n_var
    ok = np.empty(trials, bool)
    iters = np.empty(trials, np.int64)
    for start in range(0, trials, batch):
        stop = min(trials, start + batch)
        erased = np.empty((n, stop - start), bool)
        for t in range(start, stop):
            erased[:, t - start] = _rng(master_seed, t).random(n) < epsilon
        ok[start:stop], iters[start:stop] = _peel_batch(H, erased, cap)
    failures = int((~ok).sum())
    lo, hi = wilson_interval(failures, trials)
    return PeEstimate(trials, failures, failures / trials, lo, hi, float(iters.mean()), iters)


def de_threshold(d_v: int, d_c: int, tol: float = 1e-7, max_iter: int = 1_000_000) -> float:
    """BEC threshold of the ``(d_v, d_c)`` ensemble by bisection on the density recursion.

    For ``d_v = 2`` the threshold is the stability limit ``1/(d_c - 1)``.
    """
    if d_v < 2 or d_c < 2:
        raise ValueError("need d_v >= 2 and d_c >= 2")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if d_v == 2:
        return 1.0 / (d_c - 1)

    def converges(eps: float) -> bool:
        x = eps
        for _ in range(max_iter):
            nx = eps * (1.0 - (1.0 - x) ** (d_c - 1)) ** (d_v - 1)
            if nx < 1e-12:
                return True
            if x - nx < 1e-15:
                return False
            x = nx
        return False

    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if converges(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# -- serial pin model -------------------------------------------------------------


@dataclass(frozen=True)
class ScheduleModel:
    """Pin model.  Serial: ``p`` input pins, ``j`` output pins, epoch chunks of ``A_bar + j`` bits."""

    kind: str
    p: int
    j: int
    area_bar: int | None = None

    def __post_init__(self):
        if self.kind not in ("parallel", "serial"):
            raise ValueError(f"schedule kind must be parallel or serial, got {self.kind!r}")
        if self.p < 1 or self.j < 1:
            raise ValueError("pin counts must be at least 1")
        if self.kind == "serial" and (self.area_bar is None or self.area_bar < 0):
            raise ValueError("serial schedule needs a non-negative area_bar")

    @classmethod
    def parallel(cls, n: int, k: int) -> ScheduleModel:
        return cls("parallel", n, max(k, 1))

    @property
    def epoch_len(self) -> int:
        return int(self.area_bar) + self.j

    def min_cycles(self, n: int, k: int) -> int:
        return max(math.ceil(k / self.j), math.ceil(n / self.p))


@dataclass(frozen=True)
class Epoch:
    index: int
    first_cycle: int
    last_cycle: int
    n_i: int
    s_i: int
    bits_output: int
    starved: bool
    insufficient: bool


@dataclass(frozen=True)
class SerialTrace:
    tau: int
    m: int
    epochs: tuple[Epoch, ...]

    @property
    def starvation_events(self) -> int:
        return sum(e.starved for e in self.epochs)


def serial_trace(schedule: ScheduleModel, pattern: ErasurePattern, k: int, tau: int | None = None) -> SerialTrace:
    """Split a serial decode into output epochs and count inputs seen in each.

    Input ``i`` arrives on pin ``i mod p`` at cycle ``i // p``.  The ``k``
    outputs leave ``j`` per cycle during the last ``ceil(k/j)`` cycles.  Epoch
    ``e`` covers the cycles up to the emission of output chunk ``e`` (``m``
    bits each).  An epoch is starved when it has inputs but all are erased,
    and insufficient when ``n_i - s_i + A_bar < bits_output``.
    """
    if schedule.kind != "serial":
        raise ValueError("serial_trace needs a serial schedule")
    n = pattern.n
    if k < 1:
        raise ValueError("k must be at least 1")
    p, j, m, A = schedule.p, schedule.j, schedule.epoch_len, int(schedule.area_bar)
    t_min = schedule.min_cycles(n, k)
    tau = t_min if tau is None else int(tau)
    if tau < t_min:
        raise ValueError(f"tau = {tau} is below the pin limit {t_min}")
    out_start = tau - math.ceil(k / j)
    in_cycle = np.arange(n) // p
    erased = pattern.erased
    epochs = []
    first = 0
    for e in range(math.ceil(k / m)):
        q0, q1 = e * m, min(k, (e + 1) * m)
        last = tau - 1 if q1 == k else out_start + (q1 - 1) // j
        sel = (in_cycle >= first) & (in_cycle <= last)
        n_i = int(sel.sum())
        s_i = int(erased[sel].sum())
        bits = q1 - q0
        epochs.append(Epoch(e, first, last, n_i, s_i, bits, n_i >= 1 and s_i == n_i, n_i - s_i + A < bits))
        first = last + 1
    return SerialTrace(tau, m, tuple(epochs))


# -- end-to-end runs ------------------------------------------------------------------


@dataclass(frozen=True)
class SimResult:
    n: int
    d_v: int
    d_c: int
    epsilon: float
    estimate: PeEstimate
    tau: float
    area: float | None
    energy: float | None
    trace: SerialTrace | None = None


def simulate(
    graph: TannerGraph,
    epsilon: float,
    trials: int,
    master_seed: int = 0,
    schedule: ScheduleModel | None = None,
    circuit: gc.GridCircuit | None = None,
    tech: gc.TechParams = gc.TechParams(),
    max_iter: int | None = None,
) -> SimResult:
    """Estimate the error rate and charge ``xi * A * tau`` for the decode.

    ``tau = 2 * mean iterations`` in the parallel model; the serial model
    also waits for its pins, ``tau = max(ceil(k/j), ceil(n/p), 2 N)``.
    """
    est = estimate_pe(graph, epsilon, trials, master_seed, max_iter)
    tau = 2.0 * est.mean_iters
    trace = None
    if schedule is not None and schedule.kind == "serial":
        k = max(graph.k, 1)
        tau = float(max(schedule.min_cycles(graph.n_var, k), math.ceil(tau)))
        pattern = ErasurePattern.sample(graph.n_var, epsilon, master_seed, 0)
        trace = serial_trace(schedule, pattern, k, int(tau))
    area = energy = None
    if circuit is not None:
        area = gc.area(circuit, tech)
        energy = gc.energy(circuit, tau, tech)
    return SimResult(graph.n_var, graph.d_v or 0, graph.d_c or 0, epsilon, est, tau, area, energy, trace)


@dataclass(frozen=True)
class ComparisonRow:
    n: int
    k: int
    epsilon: float
    r: int
    B_r: float
    pe_hat: float
    half_width: float
    pe_lower: float
    pe_lower_raw: float
    E_measured: float
    E_lower: float
    disjunct: str
    claim_holds: bool | None


def empirical_vs_bound(
    graph: TannerGraph,
    layout: gc.GridCircuit,
    epsilon: float,
    r: int,
    trials: int,
    tech: gc.TechParams = gc.TechParams(),
    master_seed: int = 0,
    mode: str = "heuristic",
) -> ComparisonRow:
    """Set measured error and energy beside the bisection-based lower bounds.

    Bits across the cuts use ``tau = 2 * mean iterations``.  When
    ``B_r >= k/2`` the error bound makes no claim (disjunct ``b``);
    otherwise the row checks ``pe_hat >= pe_lower - half_width``.
    """
    est = estimate_pe(graph, epsilon, trials, master_seed)
    tau = 2.0 * est.mean_iters
    tree = bisection.nested_bisect(bisection.CircuitGraph.from_tanner(graph), r, tau, mode=mode, seed=master_seed)
    k = graph.k
    pe = bounds.pe_block_lower(epsilon, graph.n_var, r)
    beta = graph.n_var + graph.n_chk
    E_lower = bounds.edec_lower(tree.B_r, r, beta, tech)
    E_measured = gc.energy(layout, tau, tech)
    if tree.B_r >= k / 2:
        disjunct, holds = "b", None
    else:
        disjunct, holds = "a", est.pe_hat >= pe.value - est.half_width
    return ComparisonRow(
        graph.n_var, k, epsilon, r, tree.B_r, est.pe_hat, est.half_width, pe.value, pe.raw,
        E_measured, E_lower, disjunct, holds,
    )
