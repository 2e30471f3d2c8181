"""Sweep the non-extendable quadratic example over primes and degrees."""

from __future__ import annotations

import argparse
import json
import time
from dataclasses import asdict, dataclass, field

from nilext.abgroup import is_prime
from nilext.polymap import check_extension_feasible, nonext_instance


@dataclass
class NonextConfig:
    primes: list[int] = field(default_factory=lambda: [2, 3, 5, 7, 11, 13])
    degrees: list[int] = field(default_factory=lambda: [2, 3, 4])
    out: str | None = None


def run(cfg: NonextConfig) -> list[dict]:
    rows = []
    for p in cfg.primes:
        if not is_prime(p):
            raise SystemExit(f"{p} is not prime")
        g, emb = nonext_instance(p)
        for k in cfg.degrees:
            start = time.perf_counter()
            res = check_extension_feasible(g, emb, k)
            rows.append(
                {
                    "p": p,
                    "k": k,
                    "feasible": res.feasible,
                    "certificate_value": res.certificate.to_json()["value"] if not res.feasible else None,
                    "max_denominator": res.extension.max_denominator() if res.feasible else None,
                    "seconds": round(time.perf_counter() - start, 3),
                }
            )
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--primes", type=int, nargs="+", default=NonextConfig().primes)
    ap.add_argument("--degrees", type=int, nargs="+", default=NonextConfig().degrees)
    ap.add_argument("--out")
    cfg = NonextConfig(**vars(ap.parse_args()))
    rows = run(cfg)
    for r in rows:
        verdict = f"extends (denominator {r['max_denominator']})" if r["feasible"] else f"no extension, lam.b = {r['certificate_value']}"
        print(f"p={r['p']:<3} k={r['k']}  {verdict}  [{r['seconds']}s]")
    if cfg.out:
        with open(cfg.out, "w") as fh:
            json.dump({"config": asdict(cfg), "rows": rows}, fh, indent=2)


if __name__ == "__main__":
    main()
