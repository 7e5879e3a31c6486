"""Range scans for zeros of H_floor(p/N) mod p, with resumable checkpoints."""
from __future__ import annotations

import logging
import os
import re
import tempfile
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Iterator

from .congruence import (
    MAX_DIVISOR,
    WORD_PRIME_LIMIT,
    HarmonicInstance,
    MethodKind,
    check_method,
    harmonic_sum_int,
    residue,
    residues_for_primes,
)
from .errors import (
    CeilingExceeded,
    CheckpointCorrupt,
    CheckpointIOError,
    CheckpointMismatch,
    VerificationMismatch,
)
from .primes import DEFAULT_SEGMENT_WIDTH, SIEVE_CEILING, primes_in_range

log = logging.getLogger(__name__)

CHECKPOINT_MAGIC = "hquot-checkpoint v1"
N6_FIRST_PRIME = 7

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def fnv1a_64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


@dataclass(frozen=True)
class SearchSpec:
    """A scan of the primes in [from_, to) for zeros under one method."""

    to: int
    N: int = 6
    method: MethodKind = MethodKind.Base432FQ
    from_: int = N6_FIRST_PRIME
    shard_count: int = 1
    checkpoint_path: Path | None = None
    segment_width: int = DEFAULT_SEGMENT_WIDTH

    def __post_init__(self) -> None:
        object.__setattr__(self, "method", MethodKind.parse(self.method))
        if self.checkpoint_path is not None:
            object.__setattr__(self, "checkpoint_path", Path(self.checkpoint_path))
        if not 2 <= self.N <= MAX_DIVISOR:
            raise ValueError(f"N={self.N} outside [2, {MAX_DIVISOR}]")
        check_method(self.N, self.method)
        if not 0 <= self.from_ < self.to:
            raise ValueError(f"empty or negative range [{self.from_}, {self.to})")
        # quotient methods also need to**2 < 2**104, which is the same bound
        if self.to > SIEVE_CEILING:
            raise CeilingExceeded(f"to={self.to} exceeds the supported ceiling 2**52")
        if self.shard_count < 1 or self.segment_width < 1:
            raise ValueError("shard_count and segment_width must be positive")

    @property
    def first_candidate(self) -> int:
        """Smallest integer actually examined: the sum is vacuous for p <= N."""
        return max(self.from_, self.N + 1)

    @property
    def digest(self) -> str:
        key = f"N:{self.N};method:{self.method.value};from:{self.from_};to:{self.to}"
        return f"{fnv1a_64(key.encode('ascii')):016x}"


@dataclass(frozen=True)
class Checkpoint:
    spec_digest: str
    next: int
    zeros: tuple[int, ...] = ()
    version: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "zeros", tuple(int(z) for z in self.zeros))
        if self.version != 1:
            raise CheckpointCorrupt(f"unsupported checkpoint version {self.version}")
        if not re.fullmatch(r"[0-9a-f]{16}", self.spec_digest):
            raise CheckpointCorrupt(f"bad digest {self.spec_digest!r}")
        if self.next < 0:
            raise CheckpointCorrupt("negative next")
        if any(b <= a for a, b in zip(self.zeros, self.zeros[1:])):
            raise CheckpointCorrupt("zeros are not strictly increasing")
        if self.zeros and self.zeros[-1] >= self.next:
            raise CheckpointCorrupt("a recorded zero lies beyond next")

    def render(self) -> str:
        zeros = ",".join(str(z) for z in self.zeros)
        return f"{CHECKPOINT_MAGIC}\ndigest={self.spec_digest}\nnext={self.next}\nzeros={zeros}\n"


_DECIMAL = r"(?:0|[1-9][0-9]*)"
_CHECKPOINT_RE = re.compile(
    rf"{re.escape(CHECKPOINT_MAGIC)}\n"
    r"digest=(?P<digest>[0-9a-f]{16})\n"
    rf"next=(?P<next>{_DECIMAL})\n"
    rf"zeros=(?P<zeros>(?:{_DECIMAL}(?:,{_DECIMAL})*)?)\n"
)


def write_checkpoint(cp: Checkpoint, path: str | os.PathLike) -> None:
    """Write atomically: a temp file in the same directory, fsync, rename."""
    path = Path(path)
    try:
        fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
        try:
            with os.fdopen(fd, "w", encoding="ascii", newline="\n") as fh:
                fh.write(cp.render())
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp, path)
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise
    except OSError as exc:
        raise CheckpointIOError(f"cannot write checkpoint {path}: {exc}") from exc


def read_checkpoint(path: str | os.PathLike) -> Checkpoint:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise CheckpointIOError(f"cannot read checkpoint {path}: {exc}") from exc
    try:
        text = raw.decode("ascii")
    except UnicodeDecodeError:
        raise CheckpointCorrupt(f"{path}: not ASCII") from None
    match = _CHECKPOINT_RE.fullmatch(text)
    if match is None:
        raise CheckpointCorrupt(f"{path}: malformed checkpoint")
    zeros = match["zeros"]
    return Checkpoint(
        spec_digest=match["digest"],
        next=int(match["next"]),
        zeros=tuple(int(z) for z in zeros.split(",")) if zeros else (),
    )


@dataclass(frozen=True)
class ZeroRecord:
    p: int
    N: int
    method: MethodKind
    residue: int = field(default=0, init=False)

    def line(self) -> str:
        return f"p={self.p} N={self.N} method={self.method.value} residue=0"


@dataclass
class ScanOutcome:
    zeros: list[ZeroRecord]
    next: int
    primes_examined: int
    complete: bool


# ---------------------------------------------------------------------------
# re-verification

def independent_method(p: int, N: int, method: MethodKind) -> tuple[MethodKind, bool]:
    """The cross-check applied to a zero found by ``method``.

    Returns (method, per_term).  DirectSum is used whenever the compiled
    kernel covers p; above that the other quotient formula is used.  For
    N != 6 only DirectSum exists, so a DirectSum zero is re-derived with
    per-term inversion instead of batch inversion.
    """
    if method is MethodKind.DirectSum:
        if N == 6:
            return MethodKind.LehmerFQ, False
        return MethodKind.DirectSum, True
    if p < WORD_PRIME_LIMIT:
        return MethodKind.DirectSum, False
    if method is MethodKind.Base432FQ:
        return MethodKind.LehmerFQ, False
    return MethodKind.Base432FQ, False


def reverify_zero(p: int, N: int, method: MethodKind) -> None:
    inst = HarmonicInstance(p, N)
    if residue(inst, method) != 0:
        raise VerificationMismatch(f"p={p}: {method} residue is not zero on recheck")
    other, per_term = independent_method(p, N, method)
    if per_term:
        value = harmonic_sum_int(p, inst.m, per_term=True)
    else:
        value = residue(inst, other)
    if value != 0:
        raise VerificationMismatch(f"p={p}: {method} reports a zero but {other} gives {value}")


# ---------------------------------------------------------------------------
# scanning

@dataclass
class _SegmentResult:
    lo: int
    hi: int
    zeros: list[int]
    examined: int


def _scan_segment(spec: SearchSpec, lo: int, hi: int) -> _SegmentResult:
    first = max(lo, spec.first_candidate)
    if first >= hi:
        return _SegmentResult(lo, hi, [], 0)
    primes = primes_in_range(first, hi).primes
    if spec.method.needs_n6:
        primes = primes[primes > 5]
    values = residues_for_primes(primes, spec.N, spec.method)
    zeros = [int(p) for p in primes[values == 0]]
    for p in zeros:
        reverify_zero(p, spec.N, spec.method)
    return _SegmentResult(lo, hi, zeros, int(len(primes)))


def _segments(start: int, stop: int, width: int) -> Iterator[tuple[int, int]]:
    for lo in range(start, stop, width):
        yield lo, min(lo + width, stop)


def _ordered_map(fn: Callable, items: Iterable, workers: int) -> Iterator:
    """Like executor.map, but with at most 2*workers tasks in flight."""
    if workers == 1:
        for item in items:
            yield fn(*item)
        return
    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="hquot-shard") as pool:
        pending: deque = deque()
        for item in items:
            pending.append(pool.submit(fn, *item))
            if len(pending) >= 2 * workers:
                yield pending.popleft().result()
        while pending:
            yield pending.popleft().result()


def _load_state(spec: SearchSpec) -> tuple[int, list[int]]:
    path = spec.checkpoint_path
    if path is None or not path.exists():
        return spec.from_, []
    cp = read_checkpoint(path)
    if cp.spec_digest != spec.digest:
        raise CheckpointMismatch(
            f"{path} was written for a different search (digest {cp.spec_digest}, expected {spec.digest})"
        )
    if not spec.from_ <= cp.next <= spec.to:
        raise CheckpointCorrupt(f"{path}: next={cp.next} outside [{spec.from_}, {spec.to}]")
    if cp.zeros and cp.zeros[0] < spec.from_:
        raise CheckpointCorrupt(f"{path}: zero {cp.zeros[0]} below from={spec.from_}")
    return cp.next, list(cp.zeros)


def scan(
    spec: SearchSpec,
    *,
    stop_at: int | None = None,
    on_zero: Callable[[ZeroRecord], None] | None = None,
) -> ScanOutcome:
    """Run (or continue) a search, committing segments strictly in range order.

    With a checkpoint path, an existing file is resumed and the file is
    rewritten after every committed segment.  ``stop_at`` halts at the first
    segment boundary >= stop_at, leaving the checkpoint there.  ``on_zero``
    sees every zero of the result in order, restored ones first.
    """
    nxt, zeros = _load_state(spec)
    if on_zero is not None:
        for p in zeros:
            on_zero(ZeroRecord(p, spec.N, spec.method))
    examined = 0
    path = spec.checkpoint_path

    def commit() -> None:
        if path is not None:
            write_checkpoint(Checkpoint(spec.digest, nxt, tuple(zeros)), path)

    if nxt >= spec.to:
        commit()
    results = _ordered_map(
        lambda lo, hi: _scan_segment(spec, lo, hi),
        _segments(nxt, spec.to, spec.segment_width),
        spec.shard_count,
    )
    for seg in results:
        assert seg.lo == nxt
        for p in seg.zeros:
            zeros.append(p)
            if on_zero is not None:
                on_zero(ZeroRecord(p, spec.N, spec.method))
        nxt = seg.hi
        examined += seg.examined
        commit()
        log.debug("committed [%d, %d): %d primes", seg.lo, seg.hi, seg.examined)
        if stop_at is not None and nxt >= stop_at and nxt < spec.to:
            results.close()
            break
    records = [ZeroRecord(p, spec.N, spec.method) for p in zeros]
    return ScanOutcome(records, nxt, examined, nxt >= spec.to)


def run_search(spec: SearchSpec) -> list[ZeroRecord]:
    """All zeros in [spec.from_, spec.to), ascending; independent of shard_count."""
    return scan(spec).zeros


def resume(checkpoint_path: str | os.PathLike, spec: SearchSpec) -> list[ZeroRecord]:
    """Continue the search recorded at ``checkpoint_path``; ``spec`` must match it."""
    path = Path(checkpoint_path)
    if not path.exists():
        raise CheckpointIOError(f"no checkpoint at {path}")
    return run_search(replace(spec, checkpoint_path=path))


# ---------------------------------------------------------------------------
# single candidates

@dataclass
class VerifyReport:
    p: int
    N: int
    residues: dict[MethodKind, int]

    @property
    def all_zero(self) -> bool:
        return all(v == 0 for v in self.residues.values())

    @property
    def consistent(self) -> bool:
        """DirectSum and LehmerFQ agree; Base432FQ is -2 times them."""
        r = self.residues
        harmonic = {r[m] for m in (MethodKind.DirectSum, MethodKind.LehmerFQ) if m in r}
        if MethodKind.Base432FQ in r:
            harmonic |= {r[MethodKind.Base432FQ] * pow(-2, -1, self.p) % self.p}
        return len(harmonic) <= 1

    def lines(self) -> list[str]:
        return [f"method={m.value} residue={v}" for m, v in self.residues.items()]


def feasible_methods(p: int, N: int) -> list[MethodKind]:
    """Methods that finish promptly for this candidate, in canonical order."""
    methods = []
    if p < WORD_PRIME_LIMIT:
        methods.append(MethodKind.DirectSum)
    if N == 6 and p > 5:
        methods += [MethodKind.LehmerFQ, MethodKind.Base432FQ]
    return methods


def verify_single(p: int, N: int = 6, methods: Iterable[MethodKind | str] | None = None) -> VerifyReport:
    inst = HarmonicInstance(int(p), int(N))
    if methods is None:
        chosen = feasible_methods(inst.p, inst.N)
    else:
        chosen = list(dict.fromkeys(MethodKind.parse(m) for m in methods))
    if not chosen:
        raise ValueError(f"no method can evaluate p={p}, N={N} in reasonable time")
    for m in chosen:
        check_method(inst.N, m)
    return VerifyReport(inst.p, inst.N, {m: int(residue(inst, m)) for m in chosen})


def examined_prime_count(spec: SearchSpec) -> int:
    """Number of primes a complete fresh scan of ``spec`` examines."""
    first = spec.first_candidate
    if first >= spec.to:
        return 0
    primes = primes_in_range(first, spec.to).primes
    if spec.method.needs_n6:
        primes = primes[primes > 5]
    return len(primes)
