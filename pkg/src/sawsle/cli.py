"""Command-line front end: sampling runs, analysis, exact tables, oracles.

Subcommands: run, analyze, exact, enumerate, selftest.  Every output file is
written to a temporary name and renamed into place, so a failed command
never leaves a partial file.  Floats are rendered with 17 significant
digits, which round-trips float64 exactly.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__, conformal, estimators, fitting, observables, pivot, walks
from .constants import SAW_EXPONENTS

MANIFEST_HEADER = "sawsle-manifest v1"

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_INTERRUPTED = 3


def _atomic_write_text(path: Path, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


# ---------------------------------------------------------------------------
# Run configuration
# ---------------------------------------------------------------------------

@dataclass
class RunConfig:
    """Desk-scale defaults; overridden by a key=value file and then flags."""

    n: int = 1000
    samples: int = 1_000_000
    interval: int = 20
    warmup: Optional[int] = None
    seed: int = 1
    chains: int = 1
    blocks: int = 100
    checkpoint_interval: int = 1_000_000

    def __post_init__(self):
        if self.chains < 1:
            raise ValueError("chains must be >= 1")
        if self.blocks < 1:
            raise ValueError("blocks must be >= 1")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.warmup is None:
            self.warmup = max(10 * self.n, 10_000)

    @property
    def block_size(self) -> int:
        return max(1, self.samples // self.blocks)

    def chain_targets(self) -> list[int]:
        base, extra = divmod(self.samples, self.chains)
        targets = [base + (1 if i < extra else 0) for i in range(self.chains)]
        if min(targets) < 1:
            raise ValueError("more chains than samples")
        return targets

    def chain_seeds(self):
        return np.random.SeedSequence(self.seed).spawn(self.chains)


_CONFIG_KEYS = {f.name for f in fields(RunConfig)}


def parse_config_file(path: Path) -> dict:
    values = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or key not in _CONFIG_KEYS:
            raise ValueError(f"bad config line: {raw!r}")
        values[key] = int(value.strip())
    return values


def render_manifest(config: RunConfig) -> str:
    lines = [
        MANIFEST_HEADER,
        f"package_version={__version__}",
        f"rng_algorithm={pivot.RNG_ALGORITHM}",
    ]
    for f in fields(RunConfig):
        lines.append(f"{f.name}={getattr(config, f.name)}")
    lines.append(f"block_size={config.block_size}")
    for stat, grid in estimators.default_grids().items():
        lines.append(f"grid_{stat}={_fmt(grid[0])}:{_fmt(grid[-1])}:{len(grid)}")
    lines.append(f"angular_bins={estimators.DEFAULT_ANGULAR_BINS}")
    lines.append(
        "chain_seeds=" + ",".join(f"spawn({config.seed},{i})" for i in range(config.chains))
    )
    return "\n".join(lines) + "\n"


def read_manifest(path: Path) -> RunConfig:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0].strip() != MANIFEST_HEADER:
        raise ValueError(f"unsupported manifest: {path}")
    values = {}
    for line in lines[1:]:
        key, _, value = line.partition("=")
        if key in _CONFIG_KEYS:
            values[key] = int(value)
    return RunConfig(**values)


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------

def cmd_run(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest_path = out / "manifest.txt"

    if args.resume:
        if not manifest_path.exists():
            print(f"error: no manifest to resume at {manifest_path}", file=sys.stderr)
            return EXIT_USAGE
        config = read_manifest(manifest_path)
    else:
        overrides = {}
        if args.config:
            overrides.update(parse_config_file(args.config))
        for key in _CONFIG_KEYS:
            value = getattr(args, key, None)
            if value is not None:
                overrides[key] = value
        try:
            config = RunConfig(**overrides)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        _atomic_write_text(manifest_path, render_manifest(config))

    targets = config.chain_targets()
    seeds = config.chain_seeds()
    accs = []
    reports = []
    interrupted = False
    t0 = time.perf_counter()

    for i in range(config.chains):
        ckpt_path = out / f"chain_{i}.ckpt"
        acc_path = out / f"chain_{i}.acc"
        state = None
        if args.resume and ckpt_path.exists():
            state = pivot.parse_chain_state(ckpt_path.read_text())
            acc = estimators.parse_accumulator(acc_path.read_text())
        else:
            acc = estimators.WalkAccumulator(config.block_size)
        accs.append(acc)

        if state is not None and state.samples_emitted >= targets[i]:
            continue

        chain_cfg = pivot.ChainConfig(
            n=config.n,
            total_samples=targets[i],
            sample_interval=config.interval,
            warmup=config.warmup,
            seed=seeds[i],
        )

        def sink(walk, acc=acc):
            st = observables.stats_fast(walk)
            acc.add(st, observables.weight(st))

        def checkpoint_cb(state, ckpt_path=ckpt_path, acc_path=acc_path, acc=acc):
            _atomic_write_text(ckpt_path, pivot.render_chain_state(state))
            _atomic_write_text(acc_path, estimators.render_accumulator(acc))

        report = pivot.run_chain(
            chain_cfg,
            sink,
            state=state,
            checkpoint_cb=checkpoint_cb,
            checkpoint_interval=config.checkpoint_interval,
            stop_after_samples=args.abort_after_samples,
        )
        reports.append((i, report))
        print(
            f"chain {i}: {report.samples}/{targets[i]} samples, "
            f"acceptance {report.acceptance_fraction:.4f}, {report.wall_seconds:.1f}s"
        )
        if report.interrupted:
            interrupted = True

    if interrupted:
        print("run interrupted; checkpoints written, resume with --resume", file=sys.stderr)
        return EXIT_INTERRUPTED

    merged = accs[0]
    for acc in accs[1:]:
        merged = estimators.merge(merged, acc)
    _atomic_write_text(out / "accumulator.txt", estimators.render_accumulator(merged))

    lines = [
        "sawsle-report v1",
        f"package_version={__version__}",
        f"rng_algorithm={pivot.RNG_ALGORITHM}",
        f"wall_seconds={time.perf_counter() - t0:.3f}",
        f"total_samples={merged.n_samples}",
    ]
    for i, report in reports:
        lines.append(
            f"chain_{i}: iterations={report.iterations} accepted={report.accepted} "
            f"acceptance={report.acceptance_fraction:.6f} wall={report.wall_seconds:.3f}"
        )
    _atomic_write_text(out / "report.txt", "\n".join(lines) + "\n")
    print(f"wrote {out / 'accumulator.txt'}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------

def cmd_analyze(args) -> int:
    acc_path = Path(args.acc)
    out = Path(args.out)
    try:
        acc = estimators.parse_accumulator(acc_path.read_text())
        final = estimators.finalize(acc)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out.mkdir(parents=True, exist_ok=True)

    for stat in estimators.STAT_NAMES:
        ws = final.thresholds[stat]
        _, _, exact = conformal.factor_table(stat, ws)
        rows = ["w,ecdf,stderr,exact_cdf,diff"]
        for j, w in enumerate(ws):
            e = final.ecdf[stat][j]
            rows.append(
                f"{_fmt(w)},{_fmt(e)},{_fmt(final.ecdf_stderr[stat][j])},"
                f"{_fmt(exact[j])},{_fmt(e - exact[j])}"
            )
        _atomic_write_text(out / f"cdf_{stat}.csv", "\n".join(rows) + "\n")

    rows = ["bin_lo,bin_mid,bin_hi,expectation,stderr"]
    for j in range(len(final.ang_mid)):
        rows.append(
            f"{_fmt(final.ang_lo[j])},{_fmt(final.ang_mid[j])},{_fmt(final.ang_hi[j])},"
            f"{_fmt(final.ang_expectation[j])},{_fmt(final.ang_stderr[j])}"
        )
    _atomic_write_text(out / "angular.csv", "\n".join(rows) + "\n")

    b_conj = float(SAW_EXPONENTS.b)
    bbar_conj = float(SAW_EXPONENTS.bbar)
    try:
        fit = fitting.fit_b_bbar(final)
        se = fit.stderr
        rows = [
            "param,estimate,delta,stderr,cov_b,cov_bbar,n_used,n_excluded,rss",
            f"b,{_fmt(fit.coefficients[0])},{_fmt(fit.coefficients[0] - b_conj)},"
            f"{_fmt(se[0])},{_fmt(fit.covariance[0, 0])},{_fmt(fit.covariance[0, 1])},"
            f"{fit.n_used},{fit.n_excluded},{_fmt(fit.rss)}",
            f"bbar,{_fmt(fit.coefficients[1])},{_fmt(fit.coefficients[1] - bbar_conj)},"
            f"{_fmt(se[1])},{_fmt(fit.covariance[1, 0])},{_fmt(fit.covariance[1, 1])},"
            f"{fit.n_used},{fit.n_excluded},{_fmt(fit.rss)}",
        ]
        _atomic_write_text(out / "fit_exponents.csv", "\n".join(rows) + "\n")
        print(
            f"b = {fit.coefficients[0]:.6f} (delta {fit.coefficients[0] - b_conj:+.6f}), "
            f"bbar = {fit.coefficients[1]:.6f} (delta {fit.coefficients[1] - bbar_conj:+.6f})"
        )
    except ValueError as exc:
        print(f"warning: exponent fit skipped: {exc}", file=sys.stderr)

    slope_conj = float(SAW_EXPONENTS.b_minus_bbar)
    try:
        fit = fitting.fit_angular_slope(final)
        se = fit.stderr
        rows = [
            "param,estimate,delta,stderr,n_used,n_excluded,rss",
            f"slope,{_fmt(fit.coefficients[0])},{_fmt(fit.coefficients[0] - slope_conj)},"
            f"{_fmt(se[0])},{fit.n_used},{fit.n_excluded},{_fmt(fit.rss)}",
            f"intercept,{_fmt(fit.coefficients[1])},nan,{_fmt(se[1])},"
            f"{fit.n_used},{fit.n_excluded},{_fmt(fit.rss)}",
        ]
        _atomic_write_text(out / "fit_angular.csv", "\n".join(rows) + "\n")
        print(
            f"angular slope = {fit.coefficients[0]:.6f} "
            f"(delta {fit.coefficients[0] - slope_conj:+.6f})"
        )
        x_log, y_log, _, _ = fitting.angular_fit_points(final)
        dat = "\n".join(f"{_fmt(x)} {_fmt(y)}" for x, y in zip(x_log, y_log))
        _atomic_write_text(out / "angular_loglog.dat", dat + "\n")
    except ValueError as exc:
        print(f"warning: angular fit skipped: {exc}", file=sys.stderr)

    print(f"wrote analysis files to {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# exact
# ---------------------------------------------------------------------------

def cmd_exact(args) -> int:
    rows = ["stat,w,d0,di,cdf"]
    for stat, grid in estimators.default_grids().items():
        d0, di, cdf = conformal.factor_table(stat, grid)
        for j, w in enumerate(grid):
            rows.append(f"{stat},{_fmt(w)},{_fmt(d0[j])},{_fmt(di[j])},{_fmt(cdf[j])}")
    text = "\n".join(rows) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        _atomic_write_text(Path(args.out), text)
        print(f"wrote {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# enumerate
# ---------------------------------------------------------------------------

def cmd_enumerate(args) -> int:
    try:
        saws = walks.enumerate_half_plane_saws(args.n)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"count={len(saws)}")
    if not args.count_only:
        for w in saws:
            print(" ".join(f"{x} {y}" for x, y in w))
    return EXIT_OK


# ---------------------------------------------------------------------------
# selftest
# ---------------------------------------------------------------------------

def _check_exponent_identities():
    e = SAW_EXPONENTS
    ok = (
        e.p == (e.rho - e.gamma) / e.nu
        and e.b + e.bbar == e.p + 2
        and float(e.b_minus_bbar) == 25 / 48
    )
    return ok, f"p={e.p}, b+bbar={e.b + e.bbar}, b-bbar={e.b_minus_bbar}"


def _check_point_mass_anchor():
    d0, di = conformal.factors_S(1.0)
    got = d0 ** float(SAW_EXPONENTS.b) * di ** float(SAW_EXPONENTS.bbar)
    want = 2.0 ** float(SAW_EXPONENTS.bbar - SAW_EXPONENTS.b)
    return abs(got - want) <= 1e-12, f"cdf_S(1)={got!r}, expected {want!r}"


def _check_conformal_fixed_points(n_params=200, seed=20260809):
    rng = np.random.default_rng(seed)
    worst_fix = 0.0
    worst_fd = 0.0
    for stat in conformal.STAT_NAMES:
        lo = 0.05 if stat == "X" else 1.05
        params = np.exp(rng.uniform(math.log(lo), math.log(20.0), size=n_params))
        for w in params:
            zero = conformal.avoid_map(stat, w, 0.0 + 0.0j)
            fixed_i = conformal.avoid_map(stat, w, 1j)
            worst_fix = max(worst_fix, abs(zero), abs(fixed_i - 1j))
            d0, di = conformal.factors(stat, w)
            h = 1e-6
            fd0 = abs(
                conformal.avoid_map(stat, w, h + 0.0j) - conformal.avoid_map(stat, w, -h + 0.0j)
            ) / (2 * h)
            fdi = abs(
                conformal.avoid_map(stat, w, 1j + h) - conformal.avoid_map(stat, w, 1j - h)
            ) / (2 * h)
            worst_fd = max(
                worst_fd,
                abs(fd0 - d0) / max(1.0, d0),
                abs(fdi - di) / max(1.0, di),
            )
    ok = worst_fix <= 1e-12 and worst_fd <= 1e-8
    return ok, f"max fixed-point error {worst_fix:.2e}, max derivative error {worst_fd:.2e}"


def _check_enumeration_counts():
    got = [len(walks.enumerate_half_plane_saws(n)) for n in (1, 2, 3)]
    return got == [1, 3, 7], f"counts for N=1,2,3: {got}"


def _check_fast_vs_brute(n_walks=100, seed=20260809):
    cfg = pivot.ChainConfig(n=400, total_samples=n_walks, sample_interval=50, warmup=2000, seed=seed)
    worst = 0.0

    def sink(walk):
        nonlocal worst
        fast = observables.stats_fast(walk)
        brute = observables.stats_bruteforce(walk)
        for a, b in zip(
            (fast.X, fast.Y, fast.Rmax, fast.S), (brute.X, brute.Y, brute.Rmax, brute.S)
        ):
            worst = max(worst, abs(a - b))

    pivot.run_chain(cfg, sink)
    return worst <= 1e-9, f"max |fast - brute| = {worst:.2e} over {n_walks} walks"


def _check_pivot_uniformity(samples=1_000_000, seed=20260809):
    enumerated = walks.enumerate_half_plane_saws(6)
    index = {walks.walk_key(w): i for i, w in enumerate(enumerated)}
    counts = np.zeros(len(enumerated), dtype=np.int64)

    def sink(walk):
        counts[index[walk.tobytes()]] += 1

    cfg = pivot.ChainConfig(n=6, total_samples=samples, sample_interval=1, seed=seed)
    pivot.run_chain(cfg, sink)
    tv = 0.5 * np.abs(counts / samples - 1.0 / len(enumerated)).sum()
    return tv < 0.015, f"TV distance {tv:.5f} over {len(enumerated)} states ({samples} samples)"


def cmd_selftest(args) -> int:
    checks = [
        ("exponent identities", _check_exponent_identities),
        ("point mass anchor at s=1", _check_point_mass_anchor),
        ("conformal fixed points and derivatives", _check_conformal_fixed_points),
        ("enumeration counts", _check_enumeration_counts),
        ("fast vs brute-force observables", _check_fast_vs_brute),
        ("pivot uniformity at N=6", _check_pivot_uniformity),
    ]
    failures = 0
    for name, fn in checks:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashed check is a failed check
            ok, detail = False, f"raised {exc!r}"
        status = "PASS" if ok else "FAIL"
        if not ok:
            failures += 1
        print(f"{status} {name}: {detail}")
    return EXIT_OK if failures == 0 else EXIT_FAILURE


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sawsle",
        description="Monte Carlo laboratory for half-plane self-avoiding walks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="sample walks and write an accumulator")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--config", help="key=value config file; flags override it")
    p.add_argument("--n", type=int, help="walk length (default 1000)")
    p.add_argument("--samples", type=int, help="total samples (default 1000000)")
    p.add_argument("--interval", type=int, help="iterations between samples (default 20)")
    p.add_argument("--warmup", type=int, help="warm-up iterations (default max(10n, 10^4))")
    p.add_argument("--seed", type=int, help="master seed (default 1)")
    p.add_argument("--chains", type=int, help="independent chains (default 1)")
    p.add_argument("--blocks", type=int, help="error-estimation blocks (default 100)")
    p.add_argument("--checkpoint-interval", type=int, dest="checkpoint_interval",
                   help="iterations between checkpoints (default 10^6)")
    p.add_argument("--resume", action="store_true", help="continue from checkpoints in --out")
    p.add_argument("--abort-after-samples", type=int, dest="abort_after_samples",
                   help="stop each chain early after this many samples (testing aid)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("analyze", help="turn an accumulator into CSV tables and fits")
    p.add_argument("--acc", required=True, help="accumulator file")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("exact", help="emit the exact CDF factor table")
    p.add_argument("--out", default="-", help="output CSV path, or - for stdout")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("enumerate", help="exhaustively enumerate short walks")
    p.add_argument("n", type=int, help="number of steps (at most 12)")
    p.add_argument("--count-only", action="store_true", help="print only the count")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("selftest", help="run the built-in invariant checks")
    p.set_defaults(func=cmd_selftest)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
