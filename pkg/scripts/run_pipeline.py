"""Closed-loop correlation experiment over noise levels and seeds."""

from __future__ import annotations

import argparse
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from nilext.cli import build_pipeline_instance
from nilext.liftext import assemble_full_nilsequence


@dataclass
class PipelineConfig:
    p: int = 2
    t0: list[int] = field(default_factory=lambda: [1, 1])
    noises: list[float] = field(default_factory=lambda: [0.0, 0.1, 0.3, 0.6, 1.0])
    seeds: int = 5
    out: str | None = None


def run(cfg: PipelineConfig) -> list[dict]:
    rows = []
    for noise in cfg.noises:
        for seed in range(cfg.seeds if noise else 1):
            f, emb, t, N0 = build_pipeline_instance(cfg.p, cfg.t0, noise, seed)
            eps0 = abs(sum(f(t + emb(y)) * np.conj(N0(y)) for y in emb.sub.elements()) / emb.sub.order)
            _, rep = assemble_full_nilsequence(f, emb, t, N0, eps0)
            rows.append(
                {
                    "noise": noise,
                    "seed": seed,
                    "delta": rep.delta,
                    "eps0": eps0,
                    "epsilon": rep.epsilon,
                    "ratio_to_bound": rep.epsilon / rep.bound if rep.bound else None,
                    "character": rep.extra["character"],
                }
            )
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    d = PipelineConfig()
    ap.add_argument("--p", type=int, default=d.p)
    ap.add_argument("--t0", type=int, nargs="+", default=d.t0)
    ap.add_argument("--noises", type=float, nargs="+", default=d.noises)
    ap.add_argument("--seeds", type=int, default=d.seeds)
    ap.add_argument("--out")
    cfg = PipelineConfig(**vars(ap.parse_args()))
    rows = run(cfg)
    print(f"{'noise':>6} {'seed':>4} {'U^(k+1)':>8} {'eps0':>8} {'eps':>8} {'eps/bound':>9}")
    for r in rows:
        print(f"{r['noise']:>6.2f} {r['seed']:>4} {r['delta']:>8.4f} {r['eps0']:>8.4f} {r['epsilon']:>8.4f} {r['ratio_to_bound']:>9.4f}")
    if cfg.out:
        with open(cfg.out, "w") as fh:
            json.dump({"config": asdict(cfg), "rows": rows}, fh, indent=2)


if __name__ == "__main__":
    main()
