"""Command-line front end.

Every subcommand emits a schema-versioned JSON run report on stdout (and to
``--json-out`` when given). Exit codes: 0 ok, 2 precondition, 3 budget,
4 identity violation.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from collections.abc import Sequence

import numpy as np

from .abgroup import FinAbGroup, GroupError, SubgroupEmbedding, is_prime
from .gowers import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    GroupFunction,
    expectation,
    gowers_naive,
    gowers_norm,
    gowers_u2_fourier,
)
from .liftext import (
    ExtensionError,
    IdentityViolation,
    Nilsequence,
    PreconditionError,
    assemble_full_nilsequence,
    extend_to,
    linearize,
    orbit_eval,
    polynomial_nilsequence,
)
from .polymap import (
    PolyMap,
    PolyMapError,
    check_extension_feasible,
    eval_poly,
    nonext_deduction,
    nonext_instance,
    search_extension_bruteforce,
)
from .torus import DenominatorOverflow

SCHEMA = "nilext.run-report/1"

EXIT_OK = 0
EXIT_PRECONDITION = 2
EXIT_BUDGET = 3
EXIT_IDENTITY = 4


def digest(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


def make_report(command: str, inputs: dict, outputs: dict, timing: float | None = None) -> dict:
    rep = {"schema": SCHEMA, "command": command, "inputs": inputs, "inputs_digest": digest(inputs), "outputs": outputs}
    if timing is not None:
        rep["timing_seconds"] = timing
    return rep


def _require(cond: bool, identity: str) -> None:
    if not cond:
        raise IdentityViolation(identity)


def _load_json(path: str):
    with open(path) as fh:
        return json.load(fh)


def _phases_agree(a, b) -> bool:
    return a is not None and b is not None and a == b


# ----------------------------------------------------------------------------
# nonext


def run_nonext(p: int, k: int = 2, brute: bool | None = None, budget: int = DEFAULT_BUDGET) -> dict:
    if not is_prime(p) or p > 13:
        raise PreconditionError(f"p must be a prime <= 13, got {p}")
    g, emb = nonext_instance(p)
    result = check_extension_feasible(g, emb, k)
    out: dict = {"feasible": result.feasible}
    if result.feasible:
        ext = result.extension
        out["extension"] = ext.to_json()
        ok = all(eval_poly(ext, emb(y).coords) == eval_poly(g, y.coords) for y in emb.sub.elements())
        _require(ok, "polynomial extension restricts to g")
    else:
        cert = result.certificate
        _require(cert.verify(), "certificate: lam A = 0 and lam . b not in Z")
        out["certificate"] = cert.to_json()
    if brute is None:
        brute = k == 2 and p <= 5
    if brute:
        found = search_extension_bruteforce(g, emb, k, p**3)
        out["bruteforce"] = {"denominator": p**3, "solutions_found": len(found)}
        _require(bool(found) == result.feasible, "brute force agrees with the Smith-form verdict")
    if k == 2:
        ded = nonext_deduction(p, k)
        out["deduction"] = {
            "forced_zero_after_restriction": ded["forced_zero_after_restriction"],
            "xy_annihilated_by": ded["xy_annihilated_by"],
            "infeasible_without_x_periodicity": ded["infeasible_without_x_periodicity"],
            "redundant_x_periodicity": ded["infeasible_without_x_periodicity"] and ded["infeasible"],
        }
    N0 = polynomial_nilsequence(emb.sub, g)
    N, ladder = extend_to(N0, emb)
    agree = all(_phases_agree(N.phase(emb(y)), N0.phase(y)) for y in emb.sub.elements())
    _require(agree, "linear-form extension agrees with g on the subgroup")
    _require(N.check_periodic(), "extended linear orbit is periodic")
    out["linear_extension"] = {
        "agrees_on_subgroup": agree,
        "ladder": ladder.summary(),
        "complexity": N.complexity.to_json(),
        "nilsequence": N.to_json(),
    }
    return out


# ----------------------------------------------------------------------------
# gowers


def generate_function(group: FinAbGroup, gen: str, seed: int, freq: Sequence[int] | None = None) -> GroupFunction:
    rng = np.random.default_rng(seed)
    shape = group.factors
    if gen == "character":
        xi = list(freq) if freq else [1] * group.rank
        grids = np.meshgrid(*[np.arange(n) for n in shape], indexing="ij")
        phase = sum(x * g / n for x, g, n in zip(xi, grids, shape))
        return GroupFunction(group, np.exp(2j * np.pi * phase))
    if gen == "random":
        return GroupFunction(group, np.exp(2j * np.pi * rng.random(shape)))
    if gen == "sign":
        return GroupFunction(group, rng.choice([-1.0, 1.0], size=shape).astype(complex))
    if gen == "quadratic":
        # e(a binom(x, 2) / n) on the first coordinate; periodic when n is odd or a even
        n = shape[0]
        a = int(rng.integers(1, n)) * (1 if n % 2 else 2)
        x = np.meshgrid(*[np.arange(m) for m in shape], indexing="ij")[0]
        return GroupFunction(group, np.exp(2j * np.pi * (a * x * (x - 1) // 2 % n) / n))
    raise PreconditionError(f"unknown generator {gen!r}")


def run_gowers(f: GroupFunction, d: int, tolerance: float = 1e-9, budget: int = DEFAULT_BUDGET) -> dict:
    if d < 1:
        raise PreconditionError("d must be >= 1")
    norms = {"recursive": gowers_norm(f, d, inner="direct")}
    if d >= 2:
        norms["recursive_fft"] = gowers_norm(f, d, inner="fft")
    if f.parent.order ** (d + 1) <= budget:
        norms["naive"] = gowers_naive(f, d, budget)
    else:
        norms["naive"] = None
    if d == 2:
        norms["fourier"] = gowers_u2_fourier(f)
    ref = norms["recursive"]
    for name, val in norms.items():
        if val is not None:
            _require(abs(val - ref) <= tolerance, f"{name} norm agrees with recursive within {tolerance}")
    return {"d": d, "order": f.parent.order, "norms": norms}


# ----------------------------------------------------------------------------
# pipeline


def build_pipeline_instance(p: int, t0: Sequence[int], noise: float, seed: int):
    """Subgroup nilsequence of the non-extendable example, extended by zero, shifted, noised."""
    g, emb = nonext_instance(p)
    N0 = polynomial_nilsequence(emb.sub, g)
    Z = emb.amb
    t = Z.element(t0)
    vals = np.zeros(Z.factors, dtype=complex)
    for y in emb.sub.elements():
        vals[(t + emb(y)).coords] = N0(y)
    if noise:
        rng = np.random.default_rng(seed)
        vals = vals + noise * np.exp(2j * np.pi * rng.random(Z.factors))
        vals = vals / max(1.0, float(np.max(np.abs(vals))))
    return GroupFunction(Z, vals), emb, t, N0


def run_assemble(f: GroupFunction, emb: SubgroupEmbedding, t0, N0: Nilsequence, eps0: float | None) -> dict:
    if eps0 is None:
        eps0 = abs(expectation([f(t0 + emb(y)) * np.conj(N0(y)) for y in emb.sub.elements()]))
    N, report = assemble_full_nilsequence(f, emb, t0, N0, eps0)
    return {"report": report.to_json(), "nilsequence": N.to_json()}


def run_pipeline(p: int, t0: Sequence[int], noise: float, seed: int) -> dict:
    if not is_prime(p) or p > 13:
        raise PreconditionError(f"p must be a prime <= 13, got {p}")
    f, emb, t, N0 = build_pipeline_instance(p, t0, noise, seed)
    out = run_assemble(f, emb, t, N0, None)
    rep = out["report"]
    out["closed_loop"] = {
        "predicted": rep["epsilon0"] * emb.sub.order / emb.amb.order,
        "achieved": rep["epsilon"],
    }
    return out


# ----------------------------------------------------------------------------
# schema-level commands


def run_linearize(phi: PolyMap, moduli: Sequence[int]) -> dict:
    orbit = linearize(phi, moduli)
    dom = FinAbGroup(tuple(moduli))
    ok = all(orbit_eval(orbit, x.coords) == eval_poly(phi, x.coords) for x in dom.elements())
    _require(ok, "orbit_eval(linearize(phi)) == phi mod 1 on the domain")
    return {"orbit": orbit.to_json(), "bit_exact": ok}


def run_extend(N0: Nilsequence, emb: SubgroupEmbedding) -> dict:
    N, ladder = extend_to(N0, emb)
    agree = all(_phases_agree(N.phase(emb(y)), N0.phase(y)) for y in emb.sub.elements())
    _require(agree, "extension agrees with the input on the subgroup")
    return {"nilsequence": N.to_json(), "ladder": ladder.summary(), "agrees_on_subgroup": agree}


def run_verify(N: Nilsequence, N0: Nilsequence | None = None, emb: SubgroupEmbedding | None = None) -> dict:
    out = {"periodic": N.check_periodic()}
    _require(out["periodic"], "nilsequence is periodic on its domain")
    if N0 is not None:
        if emb is None:
            raise PreconditionError("--against needs --embedding")
        agree = all(_phases_agree(N.phase(emb(y)), N0.phase(y)) for y in emb.sub.elements())
        _require(agree, "nilsequence agrees with the reference on the subgroup")
        out["agrees_on_subgroup"] = agree
    return out


# ----------------------------------------------------------------------------
# argument parsing


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    common.add_argument("--json-out", default=None)
    common.add_argument("--timing", action="store_true", help="add wall-clock time (breaks byte-identity)")

    ap = argparse.ArgumentParser(prog="nilext", description="Nilsequence extension toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("nonext", parents=[common], help="non-extendable quadratic example")
    s.add_argument("--p", type=int, default=2)
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--brute", choices=["auto", "on", "off"], default="auto")

    s = sub.add_parser("gowers", parents=[common], help="Gowers norms by every method")
    s.add_argument("--input", help="JSON {'factors': [...], 'values': [[re, im], ...]}")
    s.add_argument("--group", type=_ints, default=[16])
    s.add_argument("--gen", default="character", choices=["character", "random", "sign", "quadratic"])
    s.add_argument("--freq", type=_ints, default=None)
    s.add_argument("--d", type=int, default=2)
    s.add_argument("--tolerance", type=float, default=1e-9)

    s = sub.add_parser("pipeline", parents=[common], help="closed-loop extension and correlation")
    s.add_argument("--p", type=int, default=2)
    s.add_argument("--t0", type=_ints, default=[1, 1])
    s.add_argument("--noise", type=float, default=0.0)

    s = sub.add_parser("linearize", parents=[common], help="polynomial orbit -> linear orbit")
    s.add_argument("--input", required=True, help="polymap JSON")
    s.add_argument("--moduli", type=_ints, required=True)

    s = sub.add_parser("extend", parents=[common], help="extend a nilsequence along an embedding")
    s.add_argument("--nilsequence", required=True)
    s.add_argument("--embedding", required=True)

    s = sub.add_parser("assemble", parents=[common], help="correlating nilsequence on the ambient group")
    s.add_argument("--function", required=True, help="JSON {'values': [[re, im], ...]} on the ambient group")
    s.add_argument("--embedding", required=True)
    s.add_argument("--nilsequence", required=True)
    s.add_argument("--t0", type=_ints, required=True)
    s.add_argument("--eps0", type=float, default=None)

    s = sub.add_parser("verify", parents=[common], help="check a nilsequence JSON")
    s.add_argument("--nilsequence", required=True)
    s.add_argument("--against", default=None)
    s.add_argument("--embedding", default=None)
    return ap


def dispatch(args: argparse.Namespace) -> tuple[dict, dict]:
    c = args.command
    if c == "nonext":
        brute = {"auto": None, "on": True, "off": False}[args.brute]
        inputs = {"p": args.p, "k": args.k, "brute": args.brute}
        return inputs, run_nonext(args.p, args.k, brute, args.budget)
    if c == "gowers":
        if args.input:
            obj = _load_json(args.input)
            grp = FinAbGroup(tuple(obj["factors"]))
            f = GroupFunction.from_json(grp, obj["values"])
            inputs = {"input_digest": digest(obj), "d": args.d}
        else:
            grp = FinAbGroup(tuple(args.group))
            f = generate_function(grp, args.gen, args.seed, args.freq)
            inputs = {"group": list(grp.factors), "gen": args.gen, "freq": args.freq, "seed": args.seed, "d": args.d}
        inputs["tolerance"] = args.tolerance
        return inputs, run_gowers(f, args.d, args.tolerance, args.budget)
    if c == "pipeline":
        inputs = {"p": args.p, "t0": args.t0, "noise": args.noise, "seed": args.seed}
        return inputs, run_pipeline(args.p, args.t0, args.noise, args.seed)
    if c == "linearize":
        obj = _load_json(args.input)
        return {"polymap": obj, "moduli": args.moduli}, run_linearize(PolyMap.from_json(obj), args.moduli)
    if c == "extend":
        nobj, eobj = _load_json(args.nilsequence), _load_json(args.embedding)
        inputs = {"nilsequence": nobj, "embedding": eobj}
        return inputs, run_extend(Nilsequence.from_json(nobj), SubgroupEmbedding.from_json(eobj))
    if c == "assemble":
        fobj, eobj, nobj = _load_json(args.function), _load_json(args.embedding), _load_json(args.nilsequence)
        emb = SubgroupEmbedding.from_json(eobj)
        f = GroupFunction.from_json(emb.amb, fobj["values"])
        inputs = {"function": digest(fobj), "embedding": eobj, "nilsequence": nobj, "t0": args.t0, "eps0": args.eps0}
        return inputs, run_assemble(f, emb, emb.amb.element(args.t0), Nilsequence.from_json(nobj), args.eps0)
    if c == "verify":
        nobj = _load_json(args.nilsequence)
        ref = _load_json(args.against) if args.against else None
        eobj = _load_json(args.embedding) if args.embedding else None
        inputs = {"nilsequence": nobj, "against": ref, "embedding": eobj}
        return inputs, run_verify(
            Nilsequence.from_json(nobj),
            Nilsequence.from_json(ref) if ref else None,
            SubgroupEmbedding.from_json(eobj) if eobj else None,
        )
    raise PreconditionError(f"unknown command {c}")


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    code = EXIT_OK
    try:
        inputs, outputs = dispatch(args)
        outputs = {"status": "ok", **outputs}
    except (BudgetExceeded, DenominatorOverflow) as exc:
        inputs, outputs, code = {"argv": list(argv or sys.argv[1:])}, {"status": "budget", "error": str(exc)}, EXIT_BUDGET
    except (PreconditionError, GroupError, PolyMapError, ExtensionError, ValueError, KeyError, OSError) as exc:
        inputs, outputs, code = {"argv": list(argv or sys.argv[1:])}, {"status": "precondition", "error": str(exc)}, EXIT_PRECONDITION
        if isinstance(exc, PreconditionError) and exc.measured is not None:
            outputs["measured"] = exc.measured
    except IdentityViolation as exc:
        inputs, outputs, code = {"argv": list(argv or sys.argv[1:])}, {"status": "identity-violation", "identity": str(exc)}, EXIT_IDENTITY
    timing = time.perf_counter() - start if args.timing else None
    report = make_report(args.command, inputs, outputs, timing)
    text = json.dumps(report, sort_keys=True, indent=2, default=str)
    if args.json_out:
        with open(args.json_out, "w") as fh:
            fh.write(text + "\n")
    print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
