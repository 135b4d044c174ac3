"""Hot loops shared by the pivot chain and the observable evaluator.

Both kernels are written in a numba-compatible subset of Python and compiled
with ``njit`` when numba is importable; otherwise the plain Python versions
run (slowly) with identical semantics.  All floating arithmetic is spelled
out with explicit real operations and a fixed evaluation order so the two
paths produce bit-identical results.
"""

import math

try:
    from numba import njit

    def _compile(func):
        jitted = njit(cache=True)(func)
        return jitted

    NUMBA_ENABLED = True
except ImportError:  # pragma: no cover - exercised only without numba
    def _compile(func):
        func.py_func = func
        return func

    NUMBA_ENABLED = False


def _pivot_window(xs, ys, grid, ks, ops):
    """Attempt len(ks) pivot moves in place; returns the number accepted.

    xs, ys hold the walk sites (length n+1), grid is the occupancy table
    indexed [y, x + n] covering y in 0..n and x in -n..n, which suffices
    because every candidate site is within L1 distance n of the origin.
    For each move the tail sites after the pivot are mapped through one of
    the seven non-identity square symmetries about the pivot site; a move
    is accepted iff every image site has y >= 1 and avoids the head.
    """
    n = xs.shape[0] - 1
    offx = n
    accepted = 0
    for t in range(ks.shape[0]):
        k = ks[t]
        op = ops[t]
        px = xs[k]
        py = ys[k]
        # Temporarily remove the old tail so the grid holds head sites only.
        for j in range(k + 1, n + 1):
            grid[ys[j], xs[j] + offx] = 0
        ok = True
        for j in range(k + 1, n + 1):
            dx = xs[j] - px
            dy = ys[j] - py
            if op == 0:
                nx = px - dy
                ny = py + dx
            elif op == 1:
                nx = px - dx
                ny = py - dy
            elif op == 2:
                nx = px + dy
                ny = py - dx
            elif op == 3:
                nx = px + dx
                ny = py - dy
            elif op == 4:
                nx = px - dx
                ny = py + dy
            elif op == 5:
                nx = px + dy
                ny = py + dx
            else:
                nx = px - dy
                ny = py - dx
            if ny < 1 or grid[ny, nx + offx] == 1:
                ok = False
                break
        if ok:
            accepted += 1
            for j in range(k + 1, n + 1):
                dx = xs[j] - px
                dy = ys[j] - py
                if op == 0:
                    nx = px - dy
                    ny = py + dx
                elif op == 1:
                    nx = px - dx
                    ny = py - dy
                elif op == 2:
                    nx = px + dy
                    ny = py - dx
                elif op == 3:
                    nx = px + dx
                    ny = py - dy
                elif op == 4:
                    nx = px - dx
                    ny = py + dy
                elif op == 5:
                    nx = px + dy
                    ny = py + dx
                else:
                    nx = px - dy
                    ny = py - dx
                xs[j] = nx
                ys[j] = ny
                grid[ny, nx + offx] = 1
        else:
            for j in range(k + 1, n + 1):
                grid[ys[j], xs[j] + offx] = 1
    return accepted


def _transform_stats(xs, ys, ex, ey, landed):
    """Maxima of the endpoint-normalized walk image, via bounded skips.

    The map w = ey*z / (ex^2 + ey^2 - ex*z) sends the endpoint to i and the
    origin to 0.  Rather than evaluating every site, jump ahead by l sites
    whenever the derivative bound guarantees the image cannot travel far
    enough to beat any running maximum:

        |w'(z + delta)| <= 4 |w'(z)|   whenever |delta| <= |den(z)| / (2|ex|)

    with den(z) = ex^2 + ey^2 - ex*z, so l steps move the image at most
    4 |w'(z)| l.  The skip is the largest integer within both constraints;
    below 2, or when the current point attains a running maximum (zero
    slack), advance a single step.  Evaluated indices are recorded in
    ``landed``; the return value is (X, Y, Rmax, S, count).
    """
    n = xs.shape[0] - 1
    c2 = ex * ex + ey * ey
    big_x = 0.0
    big_y = 0.0
    big_r = 0.0
    big_s = 1.0
    landed[0] = 0
    cnt = 1
    j = 0
    wre = 0.0
    wim = 0.0
    r = 0.0
    s = 1.0
    while j < n:
        d = big_x - wre
        dy_ = big_y - wim
        if dy_ < d:
            d = dy_
        dr_ = big_r - r
        if dr_ < d:
            d = dr_
        ds_ = big_s - s
        if ds_ < d:
            d = ds_
        step = 1
        if d > 0.0:
            zx = float(xs[j])
            zy = float(ys[j])
            dre = c2 - ex * zx
            dim = -ex * zy
            ad2 = dre * dre + dim * dim
            # d / (4 |phi'|) with |phi'| = ey c2 / ad2, sqrt deferred
            lim = d * ad2 / (4.0 * ey * c2)
            if ex != 0.0 and 4.0 * ex * ex * lim * lim > ad2:
                lim = math.sqrt(ad2) / (2.0 * abs(ex))
            if lim >= 2.0:
                step = int(lim)
                if step > n - j:
                    step = n - j
        j += step
        zx = float(xs[j])
        zy = float(ys[j])
        dre = c2 - ex * zx
        dim = -ex * zy
        den = dre * dre + dim * dim
        wre = ey * (zx * dre + zy * dim) / den
        wim = ey * (zy * dre - zx * dim) / den
        if wre > big_x:
            big_x = wre
        if wim > big_y:
            big_y = wim
        r = math.sqrt(wre * wre + wim * wim)
        if r > big_r:
            big_r = r
        s = math.sqrt(wre * wre + (wim - 1.0) * (wim - 1.0))
        if s > big_s:
            big_s = s
        landed[cnt] = j
        cnt += 1
    return big_x, big_y, big_r, big_s, cnt


pivot_window = _compile(_pivot_window)
transform_stats = _compile(_transform_stats)
