"""Wall-clock comparison of the direct sum against the Fermat-quotient test.

Cost model, up to a constant: scanning every p below n costs

    direct sum:   integral of x log x  ~  n**2 / 2 * (log n - 1/2)
    quotient:     integral of log x    ~  n * (log n - 1)

Only ratios of these numbers are meaningful.
"""
from __future__ import annotations

import csv
import functools
import io
import math
import os
import platform
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .congruence import MethodKind, harmonic_sum_int, residues_for_primes
from .primes import SIEVE_CEILING
from .search import N6_FIRST_PRIME, SearchSpec, scan

DEFAULT_BUDGET_SECONDS = 300.0
DEFAULT_METHODS = (MethodKind.DirectSum, MethodKind.Base432FQ)
CSV_HEADER = ("limit", "method", "wall_seconds", "primes_scanned", "predicted_cost", "status")

_CALIBRATION_PRIME = 1_000_003


def predicted_cost(method: MethodKind | str, n: float) -> float:
    method = MethodKind.parse(method)
    if not n > math.e:
        raise ValueError("the cost model needs n > e")
    log_n = math.log(n)
    if method is MethodKind.DirectSum:
        return n * n / 2 * (log_n - 0.5)
    return n * (log_n - 1)


def _warm_up(method: MethodKind, N: int) -> None:
    # first calls compile or load the numba kernels; keep that out of timings
    residues_for_primes(np.array([7, 11, 13], dtype=np.int64), N, method)
    harmonic_sum_int(13, 2)


@functools.lru_cache(maxsize=None)
def _seconds_per_unit(method: MethodKind, N: int) -> float:
    """Measured cost of one summed term (direct) or one prime (quotients).

    Measured once per process, so repeated estimates are consistent.
    """
    p = _CALIBRATION_PRIME
    if method is MethodKind.DirectSum:
        m = p // N
        t0 = time.perf_counter()
        harmonic_sum_int(p, m)
        return (time.perf_counter() - t0) / m
    primes = np.arange(p, p + 2 * 4096, 2, dtype=np.int64)  # odd, prime or not: cost is the same
    primes = primes[primes % 3 != 0]
    t0 = time.perf_counter()
    residues_for_primes(primes, 6, method)
    return (time.perf_counter() - t0) / len(primes)


def estimate_seconds(method: MethodKind, limit: int, N: int = 6) -> float:
    """Rough runtime of a scan of [7, limit), from a calibrated per-unit cost.

    Uses sum(p < n) ~ n**2 / (2 log n) and pi(n) ~ n / log n.
    """
    method = MethodKind.parse(method)
    _warm_up(method, N)
    log_n = math.log(max(limit, 3))
    if method is MethodKind.DirectSum:
        units = limit * limit / (2 * log_n) / N
    else:
        units = limit / log_n
    return units * _seconds_per_unit(method, N)


@dataclass
class TimingResult:
    method: MethodKind
    limit: int
    status: str
    wall_seconds: float | None = None
    primes_scanned: int | None = None
    zeros: list[int] = field(default_factory=list)
    reason: str = ""


def time_method(
    method: MethodKind | str,
    limit: int,
    *,
    N: int = 6,
    budget_seconds: float = DEFAULT_BUDGET_SECONDS,
    shard_count: int = 1,
) -> TimingResult:
    """Scan [7, limit) with one method and time it.

    A run whose estimated time exceeds ``budget_seconds`` is not attempted;
    the result is marked ``skipped`` instead.
    """
    method = MethodKind.parse(method)
    if limit > SIEVE_CEILING:
        return TimingResult(method, limit, "skipped", reason="limit above the 2**52 ceiling")
    if limit <= N6_FIRST_PRIME:
        return TimingResult(method, limit, "skipped", reason="empty range")
    est = estimate_seconds(method, limit, N)
    if est > budget_seconds:
        reason = f"BudgetExceeded: estimated {est:.3g} s > budget {budget_seconds:g} s"
        return TimingResult(method, limit, "skipped", reason=reason)
    spec = SearchSpec(to=limit, N=N, method=method, from_=N6_FIRST_PRIME, shard_count=shard_count)
    t0 = time.perf_counter()
    outcome = scan(spec)
    wall = time.perf_counter() - t0
    return TimingResult(
        method,
        limit,
        "ok",
        wall_seconds=max(wall, 1e-9),
        primes_scanned=outcome.primes_examined,
        zeros=[z.p for z in outcome.zeros],
    )


@dataclass
class BenchRow:
    limit: int
    method: MethodKind
    wall_seconds: float | None
    primes_scanned: int | None
    predicted_cost: float
    status: str
    reason: str = ""
    zeros: list[int] = field(default_factory=list)


@dataclass
class BenchReport:
    rows: list[BenchRow]
    environment: str

    def row(self, limit: int, method: MethodKind | str) -> BenchRow:
        method = MethodKind.parse(method)
        return next(r for r in self.rows if r.limit == limit and r.method is method)

    def measured_ratio(self, method: MethodKind | str, n1: int, n2: int) -> float:
        a, b = self.row(n1, method), self.row(n2, method)
        if a.wall_seconds is None or b.wall_seconds is None:
            raise ValueError("ratio over a skipped row")
        return b.wall_seconds / a.wall_seconds

    def predicted_ratio(self, method: MethodKind | str, n1: int, n2: int) -> float:
        return predicted_cost(method, n2) / predicted_cost(method, n1)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in self.rows:
            writer.writerow(
                [
                    r.limit,
                    r.method.value,
                    "" if r.wall_seconds is None else f"{r.wall_seconds:.6f}",
                    "" if r.primes_scanned is None else r.primes_scanned,
                    f"{r.predicted_cost:.6e}",
                    r.status,
                ]
            )
        return buf.getvalue()


def describe_environment(shard_count: int = 1) -> str:
    return (
        f"{platform.platform()}; {platform.processor() or platform.machine()}; "
        f"{os.cpu_count()} cpu; python {platform.python_version()}; shards={shard_count}"
    )


def compare_methods(
    limits: Sequence[int],
    methods: Iterable[MethodKind | str] = DEFAULT_METHODS,
    *,
    budget_seconds: float = DEFAULT_BUDGET_SECONDS,
    shard_count: int = 1,
) -> BenchReport:
    """Time every (limit, method) pair; skipped pairs still get a row."""
    if not limits:
        raise ValueError("at least one limit is required")
    methods = [MethodKind.parse(m) for m in methods]
    rows = []
    for limit in limits:
        for method in methods:
            res = time_method(method, limit, budget_seconds=budget_seconds, shard_count=shard_count)
            rows.append(
                BenchRow(
                    limit=limit,
                    method=method,
                    wall_seconds=res.wall_seconds,
                    primes_scanned=res.primes_scanned,
                    predicted_cost=predicted_cost(method, limit),
                    status=res.status,
                    reason=res.reason,
                    zeros=res.zeros,
                )
            )
    return BenchReport(rows, describe_environment(shard_count))
