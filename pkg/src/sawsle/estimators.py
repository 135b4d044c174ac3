"""Weighted empirical CDF grids, the angular histogram, and blocking errors.

Each sample lands in exactly one grid cell per statistic (the first
threshold at or above the value); cumulative sums are formed only when the
accumulator is read, which keeps the per-sample cost constant and makes
merging a cellwise addition.  Samples are tallied into fixed-size blocks so
statistical errors can be estimated from the spread of per-block ratios,
which is robust to the chain's autocorrelation at the sampling cadence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .observables import TransformedStats

STAT_NAMES = ("X", "Y", "R", "S")

ACC_HEADER = "sawsle-acc v1"

DEFAULT_ANGULAR_BINS = 1800


def default_grids() -> dict[str, np.ndarray]:
    """Threshold grids: X on 0..5, the others on 1..5, step 0.01."""
    return {
        "X": np.linspace(0.0, 5.0, 501),
        "Y": np.linspace(1.0, 5.0, 401),
        "R": np.linspace(1.0, 5.0, 401),
        "S": np.linspace(1.0, 5.0, 401),
    }


class _Block:
    __slots__ = ("count", "sumw", "sumw2", "land", "ang")

    def __init__(self, grids, nbins):
        self.count = 0
        self.sumw = 0.0
        self.sumw2 = 0.0
        self.land = {s: np.zeros(len(grids[s])) for s in STAT_NAMES}
        self.ang = np.zeros(nbins)

    def copy(self):
        new = _Block.__new__(_Block)
        new.count = self.count
        new.sumw = self.sumw
        new.sumw2 = self.sumw2
        new.land = {s: a.copy() for s, a in self.land.items()}
        new.ang = self.ang.copy()
        return new


class WalkAccumulator:
    """Mergeable tally of weighted indicator sums over the threshold grids.

    ``block_size`` is the number of samples per error-estimation block.
    """

    def __init__(self, block_size: int, grids=None, angular_bins: int = DEFAULT_ANGULAR_BINS):
        if block_size < 1:
            raise ValueError("block_size must be >= 1")
        self.block_size = int(block_size)
        self.grids = {s: np.asarray(g, dtype=float) for s, g in (grids or default_grids()).items()}
        for s in STAT_NAMES:
            if s not in self.grids:
                raise ValueError(f"missing grid for statistic {s}")
        self.angular_bins = int(angular_bins)
        self.ang_w2 = np.zeros(self.angular_bins)
        self.blocks: list[_Block] = []
        self._cur = _Block(self.grids, self.angular_bins)

    # -- accumulation -------------------------------------------------------

    def add(self, stats: TransformedStats, w: float) -> None:
        values = (stats.X, stats.Y, stats.Rmax, stats.S)
        if not all(map(math.isfinite, values)) or not math.isfinite(w):
            raise ValueError("non-finite statistic or weight")
        if not 0.0 < stats.theta < math.pi:
            raise ValueError("endpoint angle must lie strictly inside (0, pi)")
        cur = self._cur
        for name, value in zip(STAT_NAMES, values):
            grid = self.grids[name]
            idx = int(np.searchsorted(grid, value, side="left"))
            if idx < len(grid):
                cur.land[name][idx] += w
        b = int(stats.theta * self.angular_bins / math.pi)
        cur.ang[b] += w
        self.ang_w2[b] += w * w
        cur.sumw += w
        cur.sumw2 += w * w
        cur.count += 1
        if cur.count == self.block_size:
            self.blocks.append(cur)
            self._cur = _Block(self.grids, self.angular_bins)

    def _all_blocks(self) -> list[_Block]:
        blocks = list(self.blocks)
        if self._cur.count:
            blocks.append(self._cur)
        return blocks

    @property
    def n_samples(self) -> int:
        return sum(b.count for b in self._all_blocks())

    def total_weight(self) -> float:
        return float(sum(b.sumw for b in self._all_blocks()))

    def threshold_sums(self, stat: str) -> np.ndarray:
        """Cumulative weighted indicator sums, one per threshold."""
        blocks = self._all_blocks()
        if not blocks:
            return np.zeros(len(self.grids[stat]))
        land = np.sum([b.land[stat] for b in blocks], axis=0)
        return np.cumsum(land)

    def compatible_with(self, other: "WalkAccumulator") -> bool:
        return (
            self.block_size == other.block_size
            and self.angular_bins == other.angular_bins
            and all(np.array_equal(self.grids[s], other.grids[s]) for s in STAT_NAMES)
        )


def merge(a: WalkAccumulator, b: WalkAccumulator) -> WalkAccumulator:
    """Combine two accumulators; associative and commutative in the totals.

    Partially filled blocks are closed as short blocks; they still count in
    every total but are left out of the blocking variance.
    """
    if not a.compatible_with(b):
        raise ValueError("mismatched grid definitions")
    out = WalkAccumulator(a.block_size, grids=a.grids, angular_bins=a.angular_bins)
    out.blocks = [blk.copy() for blk in a._all_blocks()] + [blk.copy() for blk in b._all_blocks()]
    out.ang_w2 = a.ang_w2 + b.ang_w2
    return out


@dataclass
class Finalized:
    """Read-only view of an accumulator: estimates plus blocking errors."""

    thresholds: dict[str, np.ndarray]
    ecdf: dict[str, np.ndarray]
    ecdf_stderr: dict[str, np.ndarray]
    ang_lo: np.ndarray
    ang_mid: np.ndarray
    ang_hi: np.ndarray
    ang_expectation: np.ndarray
    ang_stderr: np.ndarray
    ang_neff: np.ndarray
    n_samples: int
    total_weight: float
    sum_weight_sq: float
    n_eff: float
    n_full_blocks: int
    block_size: int


def finalize(acc: WalkAccumulator) -> Finalized:
    """Normalize the tallies into estimates with blocking standard errors.

    Standard errors need at least two full blocks; with fewer they are NaN.
    The top-threshold ECDF is reported as measured, below 1 whenever some
    samples exceed the grid.
    """
    blocks = acc._all_blocks()
    total_w = float(sum(b.sumw for b in blocks))
    if not blocks or total_w <= 0.0:
        raise ValueError("cannot finalize an empty accumulator")
    sumw2 = float(sum(b.sumw2 for b in blocks))
    full = [b for b in blocks if b.count == acc.block_size]

    ecdf = {}
    stderr = {}
    for s in STAT_NAMES:
        cells = np.sum([b.land[s] for b in blocks], axis=0)
        ecdf[s] = np.cumsum(cells) / total_w
        stderr[s] = _block_ratio_stderr(
            [np.cumsum(b.land[s]) for b in full], [b.sumw for b in full], len(cells)
        )

    ang_total = np.sum([b.ang for b in blocks], axis=0)
    ang_expect = ang_total / total_w
    ang_err = _block_ratio_stderr(
        [b.ang for b in full], [b.sumw for b in full], acc.angular_bins
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        ang_neff = np.where(acc.ang_w2 > 0, ang_total**2 / acc.ang_w2, 0.0)

    edges = np.linspace(0.0, math.pi, acc.angular_bins + 1)
    return Finalized(
        thresholds={s: acc.grids[s].copy() for s in STAT_NAMES},
        ecdf=ecdf,
        ecdf_stderr=stderr,
        ang_lo=edges[:-1],
        ang_mid=0.5 * (edges[:-1] + edges[1:]),
        ang_hi=edges[1:],
        ang_expectation=ang_expect,
        ang_stderr=ang_err,
        ang_neff=ang_neff,
        n_samples=sum(b.count for b in blocks),
        total_weight=total_w,
        sum_weight_sq=sumw2,
        n_eff=total_w * total_w / sumw2,
        n_full_blocks=len(full),
        block_size=acc.block_size,
    )


def _block_ratio_stderr(numerators: list[np.ndarray], weights: list[float], size: int) -> np.ndarray:
    """sqrt(var(block ratios, ddof=1) / n_blocks); NaN with fewer than 2 blocks."""
    if len(numerators) < 2:
        return np.full(size, np.nan)
    ratios = np.array([num / w for num, w in zip(numerators, weights)])
    nb = ratios.shape[0]
    return np.sqrt(np.var(ratios, axis=0, ddof=1) / nb)


# ---------------------------------------------------------------------------
# Versioned text serialization.  Every float is rendered with 17 significant
# digits, which round-trips float64 exactly, so save/load/save is stable.
# ---------------------------------------------------------------------------

def _fmt(values) -> str:
    return " ".join(f"{float(v):.17g}" for v in np.atleast_1d(values))


def render_accumulator(acc: WalkAccumulator) -> str:
    lines = [ACC_HEADER]
    lines.append(f"angular_bins={acc.angular_bins}")
    lines.append(f"block_size={acc.block_size}")
    for s in STAT_NAMES:
        g = acc.grids[s]
        lines.append(f"grid {s} {g[0]:.17g} {g[-1]:.17g} {len(g)}")
    lines.append("angw2 " + _fmt(acc.ang_w2))
    blocks = acc._all_blocks()
    lines.append(f"nblocks={len(blocks)}")
    for blk in blocks:
        closed = 1 if blk.count == acc.block_size else 0
        lines.append(f"block {blk.count} {blk.sumw:.17g} {blk.sumw2:.17g} {closed}")
        for s in STAT_NAMES:
            lines.append(f"{s} " + _fmt(blk.land[s]))
        lines.append("A " + _fmt(blk.ang))
    return "\n".join(lines) + "\n"


def parse_accumulator(text: str) -> WalkAccumulator:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != ACC_HEADER:
        found = lines[0].strip() if lines else "<empty>"
        raise ValueError(f"unsupported accumulator version: {found!r}")
    meta = {}
    pos = 1
    grids = {}
    while pos < len(lines):
        ln = lines[pos]
        if ln.startswith("grid "):
            _, s, lo, hi, count = ln.split()
            grids[s] = np.linspace(float(lo), float(hi), int(count))
            pos += 1
        elif ln.startswith("angw2 "):
            break
        else:
            key, _, value = ln.partition("=")
            meta[key.strip()] = value.strip()
            pos += 1
    angular_bins = int(meta["angular_bins"])
    acc = WalkAccumulator(int(meta["block_size"]), grids=grids, angular_bins=angular_bins)
    acc.ang_w2 = np.array([float(v) for v in lines[pos].split()[1:]])
    if acc.ang_w2.shape[0] != angular_bins:
        raise ValueError("angular weight table has wrong length")
    pos += 1
    nblocks = int(lines[pos].partition("=")[2])
    pos += 1
    open_seen = False
    for _ in range(nblocks):
        tag, count, sumw, sumw2, closed = lines[pos].split()
        if tag != "block":
            raise ValueError(f"expected block record, got {lines[pos]!r}")
        blk = _Block(acc.grids, angular_bins)
        blk.count = int(count)
        blk.sumw = float(sumw)
        blk.sumw2 = float(sumw2)
        pos += 1
        for s in STAT_NAMES:
            fields = lines[pos].split()
            if fields[0] != s:
                raise ValueError(f"expected {s} landing row, got {lines[pos]!r}")
            blk.land[s] = np.array([float(v) for v in fields[1:]])
            pos += 1
        fields = lines[pos].split()
        if fields[0] != "A":
            raise ValueError(f"expected angular row, got {lines[pos]!r}")
        blk.ang = np.array([float(v) for v in fields[1:]])
        pos += 1
        if int(closed):
            acc.blocks.append(blk)
        else:
            if open_seen:
                raise ValueError("more than one open block in accumulator file")
            open_seen = True
            acc._cur = blk
    return acc
