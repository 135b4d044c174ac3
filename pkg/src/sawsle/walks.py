"""Lattice walk representation, validation, exhaustive enumeration, and text I/O.

A walk is an integer array of shape (N+1, 2) listing the visited sites in
order.  Valid walks start at the origin, take nearest-neighbor steps, never
revisit a site, and stay at height y >= 1 after the origin (the origin is
the unique boundary contact).
"""

from __future__ import annotations

import numpy as np

#: Step directions in the fixed order used by the enumerator.
STEPS = ((1, 0), (-1, 0), (0, 1), (0, -1))

#: Exhaustive enumeration is only intended as a small-N oracle.
ENUMERATION_CAP = 12

WALK_HEADER = "sawsle-walk v1"


def as_walk(sites) -> np.ndarray:
    """Coerce a site sequence to the canonical (N+1, 2) int64 array."""
    arr = np.asarray(sites, dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 1:
        raise ValueError("walk must be a nonempty sequence of (x, y) pairs")
    return arr


def validate_walk(walk) -> bool:
    """Check all walk invariants.  Returns False instead of raising."""
    try:
        arr = np.asarray(walk)
        if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 1:
            return False
        if not np.issubdtype(arr.dtype, np.integer):
            if not np.all(arr == np.floor(arr)):
                return False
            arr = arr.astype(np.int64)
        if arr[0, 0] != 0 or arr[0, 1] != 0:
            return False
        if arr.shape[0] > 1:
            d = np.abs(np.diff(arr, axis=0)).sum(axis=1)
            if not np.all(d == 1):
                return False
            if not np.all(arr[1:, 1] >= 1):
                return False
        if len(np.unique(arr, axis=0)) != arr.shape[0]:
            return False
        return True
    except (TypeError, ValueError):
        return False


def occupancy_index(walk) -> dict:
    """Site -> walk index map.  Derived data; rebuild rather than serialize."""
    arr = as_walk(walk)
    return {(int(x), int(y)): i for i, (x, y) in enumerate(arr)}


def enumerate_half_plane_saws(n: int) -> list[np.ndarray]:
    """Exhaustively enumerate every valid n-step walk, in DFS order.

    The output order is deterministic (steps tried in STEPS order), so the
    list doubles as a canonical indexing of the state space for small n.
    """
    if n < 0:
        raise ValueError("step count must be nonnegative")
    if n > ENUMERATION_CAP:
        raise ValueError(f"enumeration capped at {ENUMERATION_CAP} steps, got {n}")

    walks: list[np.ndarray] = []
    path = [(0, 0)]
    seen = {(0, 0)}

    def extend():
        if len(path) == n + 1:
            walks.append(np.array(path, dtype=np.int64))
            return
        x, y = path[-1]
        for dx, dy in STEPS:
            site = (x + dx, y + dy)
            if site[1] >= 1 and site not in seen:
                seen.add(site)
                path.append(site)
                extend()
                path.pop()
                seen.remove(site)

    extend()
    return walks


def walk_key(walk) -> bytes:
    """Hashable identity of a walk (used for counting visits)."""
    return as_walk(walk).tobytes()


def format_walk(walk) -> str:
    """Render a walk in the versioned plain-text checkpoint format."""
    arr = as_walk(walk)
    n = arr.shape[0] - 1
    lines = [f"{WALK_HEADER} N={n}"]
    lines.extend(f"{x} {y}" for x, y in arr)
    return "\n".join(lines) + "\n"


def parse_walk_lines(lines: list[str], start: int = 0) -> tuple[np.ndarray, int]:
    """Parse a walk from text lines; returns (walk, next line index)."""
    if start >= len(lines):
        raise ValueError("missing walk header")
    header = lines[start].strip()
    prefix = WALK_HEADER + " N="
    if not header.startswith(prefix):
        raise ValueError(f"bad walk header: {header!r}")
    n = int(header[len(prefix):])
    if n < 0:
        raise ValueError("negative step count in walk header")
    need = n + 1
    if start + 1 + need > len(lines):
        raise ValueError("walk file truncated")
    sites = np.empty((need, 2), dtype=np.int64)
    for i in range(need):
        fields = lines[start + 1 + i].split()
        if len(fields) != 2:
            raise ValueError(f"bad site line: {lines[start + 1 + i]!r}")
        sites[i, 0] = int(fields[0])
        sites[i, 1] = int(fields[1])
    return sites, start + 1 + need


def parse_walk(text: str) -> np.ndarray:
    walk, _ = parse_walk_lines(text.splitlines())
    return walk
