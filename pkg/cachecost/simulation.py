"""
Byte-level simulation of the placement and delivery phases.

Each file of F bytes is cut into subfiles W[n, S], one per user subset S, laid
out by type and then lexicographically. Placement multicasts every non-empty
subfile W[n, S] to the users in S at cost c_|S| per byte. Delivery sends, for
every non-empty S, the XOR of W[D_k, S minus k] over k in S; each user strips
the parts it already holds and reassembles its requested file.

Users and files are 0-based here; the JSON export labels users 1..K.
"""

import hashlib
import logging
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from cachecost.config import config as settings
from cachecost.errors import ConfigError, DecodeError, DemandError, QuantizationError
from cachecost.model import (
    SystemConfig,
    TypeAllocation,
    binom,
    delivery_factors,
    multiplicities,
    placement_cost,
    placement_costs,
    rate_delivery,
    rate_placement,
)

logger = logging.getLogger(__name__)

Subset = Tuple[int, ...]
CacheKey = Tuple[int, Subset]


@dataclass(frozen=True)
class QuantizedAllocation:
    """Integer subfile sizes s_0..s_K (bytes per subfile) for a file of F bytes."""
    file_length: int
    sizes: Tuple[int, ...]

    def __post_init__(self):
        if self.file_length < 1:
            raise QuantizationError(f"file length must be positive, got {self.file_length}")
        if any(s < 0 for s in self.sizes):
            raise QuantizationError(f"negative subfile size in {self.sizes}")
        a = multiplicities(self.users)
        total = sum(a_t * s for a_t, s in zip(a, self.sizes))
        if total != self.file_length:
            raise QuantizationError(f"subfiles cover {total} bytes, file has {self.file_length}")

    @property
    def users(self) -> int:
        return len(self.sizes) - 1

    def fractions(self) -> Tuple[float, ...]:
        """Realized per-subfile fractions s_t / F."""
        return tuple(s / self.file_length for s in self.sizes)

    def allocation(self) -> TypeAllocation:
        """The type allocation actually realized, y_t = C(K, t) s_t / F."""
        a = multiplicities(self.users)
        return TypeAllocation.from_vector(a_t * s / self.file_length for a_t, s in zip(a, self.sizes))


def quantize(alloc: TypeAllocation, file_length: int) -> QuantizedAllocation:
    """
    Round per-subfile sizes x_t * F to whole bytes.

    Coded types are floored, then rounded up in order of largest remainder
    while the reactive part can absorb the extra C(K, t) bytes. The reactive
    size s_0 takes whatever is left so the subfiles cover the file exactly.
    """
    K = alloc.users
    a = multiplicities(K)
    x = alloc.per_subfile()
    positive = [t for t in range(1, K + 1) if alloc.shares[t] > 0]
    if file_length < max(1, len(positive)):
        raise QuantizationError(f"file length {file_length} cannot hold {len(positive)} cached types")

    sizes = [0] * (K + 1)
    remainders = {}
    for t in positive:
        exact = x[t] * file_length
        nearest = round(exact)
        if abs(exact - nearest) <= 1e-9 * max(1.0, exact):
            sizes[t] = nearest
        else:
            sizes[t] = math.floor(exact)
            remainders[t] = exact - sizes[t]

    leftover = file_length - sum(a[t] * sizes[t] for t in positive)
    for t in sorted(remainders, key=lambda t: (-remainders[t], -t)):
        if remainders[t] >= 0.5 and a[t] <= leftover:
            sizes[t] += 1
            leftover -= a[t]

    starved = [t for t in positive if sizes[t] == 0]
    if starved:
        raise QuantizationError(
            f"file length {file_length} is too small: types {starved} round to empty subfiles"
        )
    if leftover < 0:
        raise QuantizationError(f"file length {file_length} cannot hold the cached types")
    sizes[0] = leftover
    return QuantizedAllocation(file_length=file_length, sizes=tuple(sizes))


@dataclass(frozen=True, eq=False)
class Library:
    """N files of identical length, filled with seeded pseudorandom bytes."""
    contents: np.ndarray
    seed: int

    @classmethod
    def generate(cls, files: int, file_length: int, seed: int = None) -> "Library":
        seed = settings.DEFAULT_SEED if seed is None else seed
        rng = np.random.default_rng(seed)
        contents = rng.integers(0, 256, size=(files, file_length), dtype=np.uint8)
        contents.setflags(write=False)
        return cls(contents=contents, seed=seed)

    @property
    def files(self) -> int:
        return self.contents.shape[0]

    @property
    def file_length(self) -> int:
        return self.contents.shape[1]

    def file(self, n: int) -> np.ndarray:
        return self.contents[n]


def subfile_layout(users: int, sizes: Sequence[int]) -> Dict[Subset, Tuple[int, int]]:
    """Byte range (offset, length) of every subfile label, ordered by type then lexicographically."""
    layout = {}
    offset = 0
    for t in range(users + 1):
        for subset in combinations(range(users), t):
            layout[subset] = (offset, sizes[t])
            offset += sizes[t]
    return layout


@dataclass(frozen=True, eq=False)
class Transmission:
    """One multicast: payload sent to a recipient set."""
    recipients: Subset
    payload: np.ndarray
    file_index: Optional[int] = None

    @property
    def length(self) -> int:
        return int(self.payload.size)

    def digest(self) -> str:
        return hashlib.sha256(self.payload.tobytes()).hexdigest()

    def to_dict(self) -> Dict[str, Any]:
        entry = {
            "recipients": [k + 1 for k in self.recipients],
            "length": self.length,
            "sha256": self.digest(),
        }
        if self.file_index is not None:
            entry["file"] = self.file_index + 1
        return entry


@dataclass
class Transcript:
    """Recorded transmissions of one phase and their measured cost in file lengths."""
    phase: str
    transmissions: List[Transmission] = field(default_factory=list)
    measured_cost: float = 0.0

    @property
    def total_length(self) -> int:
        return sum(tx.length for tx in self.transmissions)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "phase": self.phase,
            "measured_cost": self.measured_cost,
            "transmission_count": len(self.transmissions),
            "total_length": self.total_length,
            "transmissions": [tx.to_dict() for tx in self.transmissions],
        }


# Per-user cache: (file index, subset label) -> subfile bytes
UserCache = Dict[CacheKey, np.ndarray]


def _check_consistent(config: SystemConfig, lib: Library, q: QuantizedAllocation):
    if q.users != config.users:
        raise ConfigError(f"quantized allocation is for K={q.users}, configuration has K={config.users}")
    if lib.files != config.files:
        raise ConfigError(f"library holds {lib.files} files, configuration has N={config.files}")
    if lib.file_length != q.file_length:
        raise ConfigError(f"library files are {lib.file_length} bytes, allocation expects {q.file_length}")


def run_placement(config: SystemConfig, lib: Library, q: QuantizedAllocation) -> Tuple[Transcript, List[UserCache]]:
    """Multicast every non-empty subfile to its label set and fill the user caches."""
    _check_consistent(config, lib, q)
    K = config.users
    layout = subfile_layout(K, q.sizes)
    caches: List[UserCache] = [{} for _ in range(K)]
    transcript = Transcript(phase="placement")
    weighted = 0.0

    for n in range(config.files):
        data = lib.file(n)
        for subset, (offset, length) in layout.items():
            if not subset or length == 0:
                continue
            payload = data[offset:offset + length]
            transcript.transmissions.append(Transmission(recipients=subset, payload=payload, file_index=n))
            weighted += length * placement_cost(config, len(subset))
            for k in subset:
                caches[k][(n, subset)] = payload

    transcript.measured_cost = weighted / q.file_length
    logger.debug(f"placement: {len(transcript.transmissions)} transmissions, cost {transcript.measured_cost}")
    return transcript, caches


def validate_demand(config: SystemConfig, demand: Sequence[int]) -> Tuple[int, ...]:
    """Demand must name K distinct files (the worst case)."""
    demand = tuple(int(d) for d in demand)
    if len(demand) != config.users:
        raise DemandError(f"demand has {len(demand)} entries, expected one per user ({config.users})")
    if len(set(demand)) != len(demand):
        raise DemandError(f"demand {demand} repeats a file; only distinct requests are supported")
    bad = [d for d in demand if not 0 <= d < config.files]
    if bad:
        raise DemandError(f"demand refers to unknown files {bad}")
    return demand


def run_delivery(config: SystemConfig, lib: Library, q: QuantizedAllocation,
                 caches: List[UserCache], demand: Sequence[int]) -> Transcript:
    """Send one XOR-coded message per non-empty user subset."""
    _check_consistent(config, lib, q)
    demand = validate_demand(config, demand)
    K = config.users
    layout = subfile_layout(K, q.sizes)
    transcript = Transcript(phase="delivery")

    for t in range(1, K + 1):
        length = q.sizes[t - 1]
        for subset in combinations(range(K), t):
            payload = np.zeros(length, dtype=np.uint8)
            for k in subset:
                label = tuple(u for u in subset if u != k)
                offset, _ = layout[label]
                np.bitwise_xor(payload, lib.file(demand[k])[offset:offset + length], out=payload)
            transcript.transmissions.append(Transmission(recipients=subset, payload=payload))

    transcript.measured_cost = transcript.total_length / q.file_length
    logger.debug(f"delivery: {len(transcript.transmissions)} messages, cost {transcript.measured_cost}")
    return transcript


def decode_all(q: QuantizedAllocation, caches: List[UserCache], delivery: Transcript,
               demand: Sequence[int], lib: Optional[Library] = None) -> List[np.ndarray]:
    """
    Reconstruct every user's requested file from its cache and the delivery messages.

    When a library is given each reconstruction is compared byte for byte and a
    mismatch raises DecodeError.
    """
    K = q.users
    demand = tuple(demand)
    layout = subfile_layout(K, q.sizes)
    messages = {tx.recipients: tx.payload for tx in delivery.transmissions}
    files = []

    for k in range(K):
        recovered: Dict[Subset, np.ndarray] = {}
        for subset, payload in messages.items():
            if k not in subset:
                continue
            piece = payload.copy()
            for j in subset:
                if j == k or piece.size == 0:
                    continue
                label = tuple(u for u in subset if u != j)
                np.bitwise_xor(piece, caches[k][(demand[j], label)], out=piece)
            recovered[tuple(u for u in subset if u != k)] = piece

        parts = []
        for label, (_, length) in layout.items():
            if length == 0:
                continue
            if k in label:
                parts.append(caches[k][(demand[k], label)])
            else:
                parts.append(recovered[label])
        rebuilt = np.concatenate(parts) if parts else np.zeros(0, dtype=np.uint8)

        if lib is not None and not np.array_equal(rebuilt, lib.file(demand[k])):
            raise DecodeError(f"user {k + 1} failed to reconstruct file {demand[k] + 1}")
        files.append(rebuilt)
    return files


def rate_error_bounds(config: SystemConfig, alloc: TypeAllocation, q: QuantizedAllocation) -> Tuple[float, float]:
    """
    Worst-case rate deviation caused by quantization.

    Placement: N * sum_t a_t c_t |x_t - s_t/F|; delivery: sum_t a_t b_t |x_t - s_t/F|.
    """
    a = np.asarray(multiplicities(config.users), dtype=float)
    error = np.abs(np.asarray(alloc.per_subfile()) - np.asarray(q.fractions()))
    placement = float(config.files * np.sum(a * placement_costs(config) * error))
    delivery = float(np.sum(a * np.asarray(delivery_factors(config.users)) * error))
    return placement, delivery


def delivery_multiplicity(delivery: Transcript, subfile_type: int) -> int:
    """Number of delivery messages that carry type-t subfiles (recipient sets of size t + 1)."""
    return sum(1 for tx in delivery.transmissions if len(tx.recipients) == subfile_type + 1)


def cached_bytes_per_file(q: QuantizedAllocation) -> int:
    """Bytes of each file held by a single user: sum_{t>=1} C(K-1, t-1) s_t."""
    K = q.users
    return sum(binom(K - 1, t - 1) * q.sizes[t] for t in range(1, K + 1))


@dataclass
class SimulationReport:
    """Measured versus formula rates and decode outcome of one simulated run."""
    quantized: QuantizedAllocation
    demand: Tuple[int, ...]
    placement: Transcript
    delivery: Transcript
    formula_placement: float
    formula_delivery: float
    placement_bound: float
    delivery_bound: float
    decoded: List[bool]

    @property
    def placement_delta(self) -> float:
        return self.placement.measured_cost - self.formula_placement

    @property
    def delivery_delta(self) -> float:
        return self.delivery.measured_cost - self.formula_delivery

    @property
    def within_bounds(self) -> bool:
        slack = settings.TOLERANCE
        return (abs(self.placement_delta) <= self.placement_bound + slack
                and abs(self.delivery_delta) <= self.delivery_bound + slack)

    @property
    def passed(self) -> bool:
        return all(self.decoded) and self.within_bounds

    def to_dict(self, include_transcripts: bool = False) -> Dict[str, Any]:
        report = {
            "file_length": self.quantized.file_length,
            "sizes": list(self.quantized.sizes),
            "demand": [d + 1 for d in self.demand],
            "placement": {
                "measured": self.placement.measured_cost,
                "formula": self.formula_placement,
                "delta": self.placement_delta,
                "bound": self.placement_bound,
            },
            "delivery": {
                "measured": self.delivery.measured_cost,
                "formula": self.formula_delivery,
                "delta": self.delivery_delta,
                "bound": self.delivery_bound,
            },
            "decoded": self.decoded,
            "passed": self.passed,
        }
        if include_transcripts:
            report["transcripts"] = [self.placement.to_dict(), self.delivery.to_dict()]
        return report


def simulate(config: SystemConfig, alloc: TypeAllocation, file_length: Optional[int] = None,
             seed: Optional[int] = None, demand: Optional[Sequence[int]] = None) -> SimulationReport:
    """Run placement, delivery and decoding end to end and compare against the rate formulas."""
    if file_length is None:
        file_length = settings.default_file_length(config.users)
    demand = validate_demand(config, range(config.users) if demand is None else demand)
    q = quantize(alloc, file_length)
    lib = Library.generate(config.files, file_length, seed)

    placement, caches = run_placement(config, lib, q)
    delivery = run_delivery(config, lib, q, caches, demand)

    decoded = []
    rebuilt = decode_all(q, caches, delivery, demand)
    for k, data in enumerate(rebuilt):
        ok = bool(np.array_equal(data, lib.file(demand[k])))
        if not ok:
            logger.warning(f"user {k + 1} failed to reconstruct file {demand[k] + 1}")
        decoded.append(ok)

    placement_bound, delivery_bound = rate_error_bounds(config, alloc, q)
    report = SimulationReport(
        quantized=q,
        demand=demand,
        placement=placement,
        delivery=delivery,
        formula_placement=rate_placement(config, alloc),
        formula_delivery=rate_delivery(config, alloc),
        placement_bound=placement_bound,
        delivery_bound=delivery_bound,
        decoded=decoded,
    )
    logger.info(f"simulate K={config.users} N={config.files} F={file_length}: "
                f"R_o {placement.measured_cost:.6g} (formula {report.formula_placement:.6g}), "
                f"R_p {delivery.measured_cost:.6g} (formula {report.formula_delivery:.6g}), "
                f"decoded {sum(decoded)}/{len(decoded)}")
    return report
