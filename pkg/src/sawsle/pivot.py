"""Pivot Markov chain over fixed-length half-plane self-avoiding walks.

The chain state is the walk plus a derived occupancy grid; proposals pick a
pivot index uniformly in 1..N-1 and one of the seven non-identity square
symmetries uniformly, transform the tail about the pivot site, and accept
iff the candidate walk is self-avoiding and stays at y >= 1.  The proposal
kernel is symmetric (the symmetry set is closed under inversion), so the
stationary distribution is uniform.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ._kernels import pivot_window
from .walks import WALK_HEADER, as_walk, format_walk, parse_walk_lines, validate_walk

RNG_ALGORITHM = "pcg64"

#: Names of the seven non-identity symmetries, in kernel opcode order.
SYMMETRY_NAMES = (
    "rot90",
    "rot180",
    "rot270",
    "reflect_x",
    "reflect_y",
    "reflect_diag",
    "reflect_antidiag",
)

#: Matrices acting on site offsets from the pivot, same order as the names.
SYMMETRY_MATRICES = tuple(
    np.array(m, dtype=np.int64)
    for m in (
        [[0, -1], [1, 0]],
        [[-1, 0], [0, -1]],
        [[0, 1], [-1, 0]],
        [[1, 0], [0, -1]],
        [[-1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1], [-1, 0]],
    )
)

#: Index of the inverse of each symmetry (rotations swap, reflections are involutions).
SYMMETRY_INVERSE = (2, 1, 0, 3, 4, 5, 6)

#: Walk lengths above this would need a >0.5 GB occupancy grid.
MAX_CHAIN_LENGTH = 8192

_WARMUP_CHUNK = 100_000


def initial_walk(n: int) -> np.ndarray:
    """The straight vertical rod (0,0), (0,1), ..., (0,n)."""
    if n < 1:
        raise ValueError("walk length must be at least 1")
    rod = np.zeros((n + 1, 2), dtype=np.int64)
    rod[:, 1] = np.arange(n + 1)
    return rod


def apply_symmetry(op: int, pivot, sites) -> np.ndarray:
    """Apply symmetry ``op`` about ``pivot`` to an array of sites."""
    pivot = np.asarray(pivot, dtype=np.int64)
    rel = np.asarray(sites, dtype=np.int64) - pivot
    return pivot + rel @ SYMMETRY_MATRICES[op].T


@dataclass
class ChainConfig:
    """Run parameters for one chain.

    ``warmup`` counts discarded initial iterations; None selects
    max(10 n, 10^4), enough for the rod start to decorrelate.
    """

    n: int
    total_samples: int
    sample_interval: int = 100
    warmup: Optional[int] = None
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("pivot chain needs walk length >= 2")
        if self.n > MAX_CHAIN_LENGTH:
            raise ValueError(
                f"walk length {self.n} exceeds the occupancy-grid cap {MAX_CHAIN_LENGTH}"
            )
        if self.sample_interval < 1:
            raise ValueError("sample_interval must be >= 1")
        if self.total_samples < 1:
            raise ValueError("total_samples must be >= 1")
        if self.warmup is None:
            self.warmup = max(10 * self.n, 10_000)
        if self.warmup < 0:
            raise ValueError("warmup must be nonnegative")


class ChainState:
    """Walk, occupancy grid, generator, and progress counters for one chain."""

    def __init__(self, xs, ys, rng, iteration=0, accepted=0, samples_emitted=0):
        self.xs = np.ascontiguousarray(xs, dtype=np.int64)
        self.ys = np.ascontiguousarray(ys, dtype=np.int64)
        self.rng = rng
        self.iteration = int(iteration)
        self.accepted = int(accepted)
        self.samples_emitted = int(samples_emitted)
        self.grid = self._build_grid()

    @property
    def n(self) -> int:
        return self.xs.shape[0] - 1

    def _build_grid(self) -> np.ndarray:
        n = self.n
        grid = np.zeros((n + 1, 2 * n + 1), dtype=np.uint8)
        grid[self.ys, self.xs + n] = 1
        return grid

    def walk(self) -> np.ndarray:
        return np.column_stack((self.xs, self.ys))

    @classmethod
    def fresh(cls, n: int, seed) -> "ChainState":
        rod = initial_walk(n)
        return cls(rod[:, 0], rod[:, 1], np.random.default_rng(seed))

    @property
    def acceptance_fraction(self) -> float:
        return self.accepted / self.iteration if self.iteration else 0.0


@dataclass(frozen=True)
class MoveResult:
    pivot_index: int
    op: int
    accepted: bool


def pivot_step(state: ChainState) -> MoveResult:
    """Advance the chain by exactly one proposal (accepted or not)."""
    n = state.n
    k = int(state.rng.integers(1, n))
    op = int(state.rng.integers(0, 7))
    ks = np.array([k], dtype=np.int64)
    ops = np.array([op], dtype=np.int64)
    acc = pivot_window(state.xs, state.ys, state.grid, ks, ops)
    state.iteration += 1
    state.accepted += int(acc)
    return MoveResult(pivot_index=k, op=op, accepted=bool(acc))


@dataclass
class RunReport:
    n: int
    seed: int
    iterations: int
    accepted: int
    samples: int
    wall_seconds: float
    rng_algorithm: str = RNG_ALGORITHM
    interrupted: bool = False

    @property
    def acceptance_fraction(self) -> float:
        return self.accepted / self.iterations if self.iterations else 0.0


def _run_window(state: ChainState, count: int) -> None:
    ks = state.rng.integers(1, state.n, size=count).astype(np.int64)
    ops = state.rng.integers(0, 7, size=count).astype(np.int64)
    state.accepted += pivot_window(state.xs, state.ys, state.grid, ks, ops)
    state.iteration += count


def run_chain(
    config: ChainConfig,
    sink: Callable[[np.ndarray], None],
    state: Optional[ChainState] = None,
    checkpoint_cb: Optional[Callable[[ChainState], None]] = None,
    checkpoint_interval: int = 1_000_000,
    stop_after_samples: Optional[int] = None,
) -> RunReport:
    """Warm up, then emit every sample_interval-th walk to ``sink``.

    Identical (config, seed) pairs produce bit-identical sample streams.
    Checkpoints (when a callback is given) happen at warm-up chunk or sample
    boundaries, at least every ``checkpoint_interval`` iterations and once
    at the end, so a resumed run replays the exact generator schedule.
    """
    t0 = time.perf_counter()
    if state is None:
        state = ChainState.fresh(config.n, config.seed)
    if state.n != config.n:
        raise ValueError("chain state length does not match config")
    last_ckpt = state.iteration
    interrupted = False

    def maybe_checkpoint(force=False):
        nonlocal last_ckpt
        if checkpoint_cb is not None and (
            force or state.iteration - last_ckpt >= checkpoint_interval
        ):
            checkpoint_cb(state)
            last_ckpt = state.iteration

    while state.iteration < config.warmup:
        _run_window(state, min(_WARMUP_CHUNK, config.warmup - state.iteration))
        maybe_checkpoint()
    if config.warmup >= 1000 and state.accepted == 0:
        raise RuntimeError(
            "no pivot move accepted during warm-up; move set is broken for this length"
        )

    target = config.total_samples
    if stop_after_samples is not None:
        target = min(target, stop_after_samples)
    while state.samples_emitted < target:
        _run_window(state, config.sample_interval)
        state.samples_emitted += 1
        sink(state.walk())
        maybe_checkpoint()
    interrupted = state.samples_emitted < config.total_samples
    maybe_checkpoint(force=True)

    return RunReport(
        n=config.n,
        seed=config.seed,
        iterations=state.iteration,
        accepted=state.accepted,
        samples=state.samples_emitted,
        wall_seconds=time.perf_counter() - t0,
        interrupted=interrupted,
    )


# ---------------------------------------------------------------------------
# Checkpoint text format: the walk block, then rng/counter lines.
# ---------------------------------------------------------------------------

def render_chain_state(state: ChainState) -> str:
    rng_state = state.rng.bit_generator.state
    if rng_state["bit_generator"].lower() != RNG_ALGORITHM:
        raise ValueError(f"unsupported generator {rng_state['bit_generator']!r}")
    blob = json.dumps(rng_state, sort_keys=True).encode()
    lines = [
        format_walk(state.walk()).rstrip("\n"),
        f"rng={RNG_ALGORITHM}:{blob.hex()}",
        f"iter={state.iteration}",
        f"accepted={state.accepted}",
        f"samples={state.samples_emitted}",
    ]
    return "\n".join(lines) + "\n"


def parse_chain_state(text: str) -> ChainState:
    lines = text.splitlines()
    walk, pos = parse_walk_lines(lines)
    if not validate_walk(walk):
        raise ValueError("checkpoint walk violates walk invariants")
    meta = {}
    for line in lines[pos:]:
        line = line.strip()
        if not line:
            continue
        key, _, value = line.partition("=")
        meta[key] = value
    algo, _, hexblob = meta.get("rng", "").partition(":")
    if algo != RNG_ALGORITHM:
        raise ValueError(f"checkpoint generator {algo!r} not supported")
    rng = np.random.default_rng(0)
    rng.bit_generator.state = json.loads(bytes.fromhex(hexblob).decode())
    return ChainState(
        walk[:, 0],
        walk[:, 1],
        rng,
        iteration=int(meta["iter"]),
        accepted=int(meta["accepted"]),
        samples_emitted=int(meta["samples"]),
    )
