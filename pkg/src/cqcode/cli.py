"""Batch experiment front door.

Subcommands: decompose, codebook, simulate, exponent, verify.  Parameters
come from an optional JSON config file plus flags; flags win.  All outputs
are deterministic for a fixed (config, seed) pair.

Exit codes: 0 success, 1 verification failure, 2 capacity exceeded,
3 packing failure, 4 input validation error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import coding, operators as ops, schur_weyl
from .channel import (
    Channel,
    exponent_chain_check,
    hayashi_exponent,
    load_channel,
    trace_power_bound,
    trace_power_maximizer,
    universal_exponent,
)
from .combinatorics import TypeVector
from .errors import CapacityError, PackingError, ValidationError

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_CAPACITY = 2
EXIT_PACKING = 3
EXIT_VALIDATION = 4


def _parse_weights(text):
    """Comma-separated decimal or rational weights, normalized to sum 1."""
    try:
        vals = [float(Fraction(tok.strip())) for tok in text.split(",") if tok.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"cannot parse weights '{text}': {exc}") from exc
    if not vals or any(v < 0 for v in vals):
        raise ValidationError(f"weights must be non-negative and non-empty: {text}")
    total = sum(vals)
    if total <= 0:
        raise ValidationError("weights must have positive sum")
    return tuple(v / total for v in vals)


def _parse_ints(text):
    try:
        return tuple(int(tok.strip()) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise ValidationError(f"cannot parse integer list '{text}'") from exc


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ValidationError("config file must hold a JSON object")
    return data


def _merge(args, config, key, default=None):
    """Flag value if given, else config value, else default."""
    val = getattr(args, key.replace("-", "_"), None)
    if val is not None:
        return val
    if key in config:
        return config[key]
    return default


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_decompose(args, config):
    n = int(_merge(args, config, "n"))
    d = int(_merge(args, config, "d", 2))
    out = _merge(args, config, "out", "decompose")
    comps = schur_weyl.isotypic_decomposition(n, d)
    dim = d ** n
    rows = []
    total = np.zeros((dim, dim), dtype=complex)
    for comp in comps:
        total += comp.projector
        tr = float(np.trace(comp.projector).real)
        idem = ops.max_abs(comp.projector @ comp.projector - comp.projector)
        rows.append(
            [
                " ".join(str(r) for r in comp.diagram.rows),
                comp.dim_u,
                comp.dim_v,
                repr(tr),
                repr(abs(tr - comp.dim_u * comp.dim_v)),
                repr(idem),
            ]
        )
    completeness = ops.max_abs(total - ops.identity(dim))
    ortho = 0.0
    for i, a in enumerate(comps):
        for b in comps[i + 1 :]:
            ortho = max(ortho, ops.max_abs(a.projector @ b.projector))
    _write_csv(out + ".csv", ["diagram", "dim_u", "dim_v", "trace", "trace_residue", "idempotency_residue"], rows)
    _write_json(
        out + ".json",
        {
            "n": n,
            "d": d,
            "dimension": dim,
            "diagram_count": len(comps),
            "sum_dim_products": int(sum(c.dim_u * c.dim_v for c in comps)),
            "completeness_residue": completeness,
            "orthogonality_residue": ortho,
        },
    )
    print(f"decompose: {len(comps)} components on dimension {dim}, completeness residue {completeness:.2e}")
    return EXIT_OK


def cmd_codebook(args, config):
    counts = _parse_ints(str(_merge(args, config, "type")))
    tv = TypeVector(counts)
    M = int(_merge(args, config, "M", 2))
    seed = int(_merge(args, config, "seed", 0))
    slack = _merge(args, config, "slack")
    attempts = int(_merge(args, config, "max-attempts", 64))
    out = _merge(args, config, "out", "codebook.json")
    cb = coding.build_codebook(
        tv,
        M,
        seed=seed,
        max_attempts=attempts,
        slack=float(slack) if slack is not None else None,
    )
    payload = coding.codebook_to_dict(cb)
    _write_json(out, payload)
    print(f"codebook: {cb.M} words of type {tv.counts}, packing ok={payload['packing']['ok']}")
    return EXIT_OK


def cmd_simulate(args, config):
    w = load_channel(_merge(args, config, "channel"))
    p = _parse_weights(str(_merge(args, config, "p", "1")))
    if len(p) != w.k:
        raise ValidationError(f"p has {len(p)} entries, channel has {w.k} inputs")
    R = float(_merge(args, config, "R", 0.0))
    if R < 0:
        raise ValidationError("R must be non-negative")
    n_list = _parse_ints(str(_merge(args, config, "n-list", "2,3,4")))
    if any(n < 1 for n in n_list):
        raise ValidationError("block lengths must be >= 1")
    seed = int(_merge(args, config, "seed", 0))
    policy = str(_merge(args, config, "policy", "rate-only"))
    c_fixed = _merge(args, config, "C")
    m_override = _merge(args, config, "M")
    out = _merge(args, config, "out", "simulate")
    rows = coding.exponent_experiment(
        w,
        p,
        R,
        n_list,
        seed=seed,
        policy=policy,
        c_fixed=float(c_fixed) if c_fixed is not None else None,
        m_override=int(m_override) if m_override is not None else None,
    )
    _write_csv(
        out + ".csv",
        ["n", "M", "C", "epsilon", "rate_empirical", "exponent_theory", "seed"],
        [[r.n, r.M, repr(r.C), repr(r.epsilon), repr(r.rate_empirical), repr(r.exponent_theory), r.seed] for r in rows],
    )
    _write_json(
        out + ".json",
        {
            "R": R,
            "policy": policy,
            "seed": seed,
            "rows": [
                {
                    "n": r.n,
                    "M": r.M,
                    "C": r.C,
                    "epsilon": r.epsilon,
                    "rate_empirical": r.rate_empirical,
                    "exponent_theory": r.exponent_theory,
                }
                for r in rows
            ],
        },
    )
    print(f"simulate: {len(rows)} rows written to {out}.csv")
    return EXIT_OK


def cmd_exponent(args, config):
    w = load_channel(_merge(args, config, "channel"))
    p = _parse_weights(str(_merge(args, config, "p", "1")))
    if len(p) != w.k:
        raise ValidationError(f"p has {len(p)} entries, channel has {w.k} inputs")
    grid = str(_merge(args, config, "r-grid", "0:0.6:7"))
    t_grid = int(_merge(args, config, "t-grid", 201))
    if t_grid < 3:
        raise ValidationError("t-grid needs at least 3 points")
    try:
        lo, hi, num = grid.split(":")
        rates = np.linspace(float(lo), float(hi), int(num))
    except ValueError as exc:
        raise ValidationError(f"r-grid must be 'lo:hi:count', got '{grid}'") from exc
    out = _merge(args, config, "out", "exponent.csv")
    rows = []
    for R in rates:
        uni = universal_exponent(w, p, float(R), grid=t_grid)
        hay = hayashi_exponent(w, p, float(R), grid=t_grid)
        rows.append([repr(float(R)), repr(uni.value), repr(hay.value), repr(uni.t_star), repr(hay.t_star)])
    _write_csv(out, ["R", "universal_exponent", "hayashi_exponent", "t_star_universal", "t_star_hayashi"], rows)
    print(f"exponent: {len(rows)} rates written to {out}")
    return EXIT_OK


def _random_channel(rng, d, k):
    states = []
    for _ in range(k):
        g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        rho = g @ g.conj().T
        states.append(rho / np.trace(rho).real)
    return Channel(states=tuple(states))


def _verify_checks(seed, n_max, d, inject_fault=None):
    rng = np.random.default_rng(seed)
    checks = []

    def corrupt(mat, name):
        if inject_fault == name:
            mat = mat.copy()
            mat[0, 0] += 1e-3
        return mat

    residue = 0.0
    ortho = 0.0
    dims_ok = True
    for n in range(1, n_max + 1):
        comps = schur_weyl.isotypic_decomposition(n, d)
        dim = d ** n
        total = sum((corrupt(c.projector, "schur_completeness") for c in comps), np.zeros((dim, dim), dtype=complex))
        residue = max(residue, ops.max_abs(total - ops.identity(dim)))
        for i, a in enumerate(comps):
            for b in comps[i + 1 :]:
                ortho = max(ortho, ops.max_abs(corrupt(a.projector, "schur_orthogonality") @ b.projector))
        dims_ok = dims_ok and sum(c.dim_u * c.dim_v for c in comps) == dim
    checks.append(("schur_completeness", residue <= 1e-9, residue))
    checks.append(("schur_orthogonality", ortho <= 1e-9, ortho))
    checks.append(("schur_dimensions", dims_ok, 0.0))

    worst = math.inf
    for n in range(2, n_max + 1):
        for _ in range(5):
            g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            rho = g @ g.conj().T
            rho = rho / np.trace(rho).real
            rep = schur_weyl.check_universal_dominance(rho, n)
            worst = min(worst, rep.residue_corrected)
    checks.append(("universal_dominance", worst >= -1e-9, worst))

    w = _random_channel(rng, d, 2)
    worst = math.inf
    for n in range(1, min(n_max, 3) + 1):
        for x in np.ndindex(*(2,) * n):
            seq = tuple(int(v) + 1 for v in x)
            rep = schur_weyl.check_conditional_dominance(w, seq)
            worst = min(worst, rep.residue_corrected)
    checks.append(("conditional_dominance", worst >= -1e-9, worst))

    residue = 0.0
    for n in range(1, n_max + 1):
        for x in np.ndindex(*(2,) * n):
            seq = tuple(int(v) + 1 for v in x)
            residue = max(residue, schur_weyl.check_commutation(seq, d))
    checks.append(("state_commutation", residue <= 1e-9, residue))

    worst = -math.inf
    attain = math.inf
    for dim in (2, 4):
        g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        x = g @ g.conj().T
        for t in (0.25, 0.5, 0.75):
            bound = trace_power_bound(x, t)
            if inject_fault == "trace_power_bound":
                bound -= 1e-3
            for _ in range(200):
                h = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
                sigma = h @ h.conj().T
                sigma = sigma / np.trace(sigma).real
                val = ops.real_trace(x @ ops.fractional_power_psd(sigma, t))
                worst = max(worst, val - bound)
            best = trace_power_maximizer(x, t)
            attain = min(attain, abs(ops.real_trace(x @ ops.fractional_power_psd(best, t)) - bound))
    checks.append(("trace_power_bound", worst <= 1e-9 and attain <= 1e-8, worst))

    worst = math.inf
    for trial in range(5):
        tv = TypeVector((1, 1)) if trial % 2 == 0 else TypeVector((2, 1))
        cb = coding.build_codebook(tv, 2, seed=(seed, trial))
        c = float(rng.uniform(0.3, 1.5))
        dec = coding.build_decoder(cb, c, d)
        rep = coding.hayashi_nagaoka_check(dec)
        worst = min(worst, rep.worst)
    checks.append(("hayashi_nagaoka", worst >= -1e-8, worst))

    ok = True
    detail = math.inf
    for n in (2, 3):
        wch = _random_channel(rng, d, 2)
        tv = TypeVector((1, 1)) if n == 2 else TypeVector((2, 1))
        cb = coding.build_codebook(tv, 2, seed=(seed, 100 + n))
        dec = coding.build_decoder(cb, coding.choose_threshold(None, tv.probs(), 0.2, n), d)
        chain = coding.error_bound_chain(dec, wch, 0.5)
        ok = ok and chain.ok
        for s in chain.steps:
            if not s.equality:
                detail = min(detail, s.rhs - s.lhs)
    checks.append(("error_bound_chain", ok, detail))

    worst = math.inf
    for _ in range(5):
        wch = _random_channel(rng, d, 2)
        p = (0.5, 0.5)
        for R in (0.05, 0.2, 0.4):
            gap = hayashi_exponent(wch, p, R).value - universal_exponent(wch, p, R).value
            worst = min(worst, gap)
        # the single-t comparison is valid where phi(t) >= tR; rate 0 qualifies
        chain = exponent_chain_check(wch, p, 0.0, 0.5)
        worst = min(worst, chain.lhs - chain.rhs)
    checks.append(("exponent_ordering", worst >= -1e-9, worst))

    return checks


def cmd_verify(args, config):
    seed = int(_merge(args, config, "seed", 0))
    n_max = int(_merge(args, config, "n-max", 4))
    d = int(_merge(args, config, "d", 2))
    inject = _merge(args, config, "inject-fault")
    verbose = bool(_merge(args, config, "verbose", False))
    checks = _verify_checks(seed, n_max, d, inject_fault=inject)
    width = max(len(name) for name, _, _ in checks)
    all_ok = True
    for name, ok, residue in checks:
        all_ok = all_ok and ok
        shown = repr(residue) if verbose else f"{residue:+.3e}"
        print(f"{name.ljust(width)}  {'PASS' if ok else 'FAIL'}  worst residue {shown}")
    print(f"verify: {'all checks passed' if all_ok else 'FAILURES detected'}")
    return EXIT_OK if all_ok else EXIT_VERIFY


def build_parser():
    parser = argparse.ArgumentParser(prog="cqcode", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--config", help="JSON config file; flags override its values")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out")
        sp.add_argument("--verbose", action="store_true", default=None)

    sp = sub.add_parser("decompose", help="isotypic decomposition table")
    add_common(sp)
    sp.add_argument("--n", type=int)
    sp.add_argument("--d", type=int)

    sp = sub.add_parser("codebook", help="build and certify a packing codebook")
    add_common(sp)
    sp.add_argument("--type", help="comma-separated symbol counts, e.g. 2,2")
    sp.add_argument("--M", type=int)
    sp.add_argument("--slack", type=float)
    sp.add_argument("--max-attempts", type=int, dest="max_attempts")

    sp = sub.add_parser("simulate", help="run the block-length experiment")
    add_common(sp)
    sp.add_argument("--channel")
    sp.add_argument("--p", help="input weights, decimal or rational")
    sp.add_argument("--R", type=float)
    sp.add_argument("--n-list", dest="n_list")
    sp.add_argument("--policy", choices=["fixed", "rate-only", "channel-hinted"])
    sp.add_argument("--C", type=float)
    sp.add_argument("--M", type=int)

    sp = sub.add_parser("exponent", help="exponent curves over a rate grid")
    add_common(sp)
    sp.add_argument("--channel")
    sp.add_argument("--p")
    sp.add_argument("--r-grid", dest="r_grid", help="lo:hi:count")
    sp.add_argument("--t-grid", dest="t_grid", type=int, help="optimizer grid density")

    sp = sub.add_parser("verify", help="run the invariant battery")
    add_common(sp)
    sp.add_argument("--n-max", type=int, dest="n_max")
    sp.add_argument("--d", type=int)
    sp.add_argument("--inject-fault", dest="inject_fault", help=argparse.SUPPRESS)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(args.config)
        if args.command == "decompose":
            return cmd_decompose(args, config)
        if args.command == "codebook":
            return cmd_codebook(args, config)
        if args.command == "simulate":
            return cmd_simulate(args, config)
        if args.command == "exponent":
            return cmd_exponent(args, config)
        if args.command == "verify":
            return cmd_verify(args, config)
        parser.error(f"unknown command {args.command}")
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except PackingError as exc:
        print(f"packing failure: {exc}", file=sys.stderr)
        if exc.certificate is not None:
            worst = exc.certificate.worst()
            print(f"worst violation: {worst}", file=sys.stderr)
        return EXIT_PACKING
    except (ValidationError, FileNotFoundError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
