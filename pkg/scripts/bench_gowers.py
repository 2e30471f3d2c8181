"""Timing of the Gowers norm evaluators across group sizes."""

from __future__ import annotations

import argparse
import time
from dataclasses import dataclass, field

import numpy as np

from nilext.abgroup import FinAbGroup
from nilext.gowers import GroupFunction, gowers_naive, gowers_norm, gowers_u2_fourier


@dataclass
class BenchConfig:
    sizes: list[int] = field(default_factory=lambda: [64, 256, 1024, 4096])
    seed: int = 0
    naive_limit: int = 64


def timed(fn, *args, **kw):
    start = time.perf_counter()
    val = fn(*args, **kw)
    return val, time.perf_counter() - start


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    d = BenchConfig()
    ap.add_argument("--sizes", type=int, nargs="+", default=d.sizes)
    ap.add_argument("--seed", type=int, default=d.seed)
    ap.add_argument("--naive-limit", type=int, default=d.naive_limit)
    cfg = BenchConfig(**vars(ap.parse_args()))
    rng = np.random.default_rng(cfg.seed)
    print(f"{'|Z|':>6} {'method':>16} {'value':>12} {'seconds':>9}")
    for n in cfg.sizes:
        f = GroupFunction(FinAbGroup((n,)), np.exp(2j * np.pi * rng.random(n)))
        runs = [
            ("U2 fourier", gowers_u2_fourier, (f,), {}),
            ("U2 recursive", gowers_norm, (f, 2), {"inner": "direct"}),
            ("U3 recursive/fft", gowers_norm, (f, 3), {"inner": "fft"}),
        ]
        if n <= cfg.naive_limit:
            runs.append(("U3 naive", gowers_naive, (f, 3), {}))
        for name, fn, args, kw in runs:
            val, sec = timed(fn, *args, **kw)
            print(f"{n:>6} {name:>16} {val:>12.9f} {sec:>9.4f}")


if __name__ == "__main__":
    main()
