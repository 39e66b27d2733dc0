"""Command-line entry point: every pipeline as a subcommand.

Inputs are JSON files.  A spectrum file carries {"n", "levels", "normalized"},
an Ising file {"n", "couplings", "fields"}, and a family descriptor
{"family": "grover" | "gaussian", ...} is instantiated at the --n passed on
the command line.  Exit codes: 1 parse, 2 precondition, 3 numerical,
4 precision-insufficient.
"""

from __future__ import annotations

import argparse
import json
import sys
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import corpus
from .config import RunConfig
from .errors import AqolabError, InputError, PreconditionError, exit_code_for
from .evolution import evolve, scaling_experiment, verify_projector_bounds
from .gap_bounds import certificate, gap_scan, window_sandwich_check
from .hardness import (
    A1Oracle,
    SatInstance,
    extract_degeneracies,
    extract_degeneracies_noisy,
    probabilistic_extraction,
    sat_gadget,
)
from .schedule import synthesize
from .spectrum import (
    DegeneracySpectrum,
    IsingModel,
    enumerate_ising,
    normalize,
    spectral_params,
)


def _parse_rational(text: str) -> Fraction:
    try:
        if "/" in text:
            return Fraction(text)
        return Fraction(Decimal(text))
    except (ValueError, InvalidOperation, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse rational {text!r}") from exc


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _load_spectrum(path: str, n: int | None, cfg: RunConfig) -> DegeneracySpectrum:
    obj = _load_json(path)
    if "family" in obj:
        if n is None:
            raise InputError("family inputs need --n")
        family = obj["family"]
        if family == "grover":
            return corpus.grover(n, d0=int(obj.get("d0", 1)))
        if family == "gaussian":
            return corpus.gaussian_levels(
                n,
                M=int(obj.get("M", 11)),
                sigma=float(obj.get("sigma", 2.0)),
                d0=int(obj.get("d0", 1)),
            )
        raise InputError(f"unknown family {family!r}")
    if "couplings" in obj:
        model = IsingModel.from_json(json.dumps(obj))
        spec = enumerate_ising(model, ceiling=cfg.ising_ceiling)
        spec, _ = normalize(spec)
        return spec
    spec = DegeneracySpectrum.from_json(json.dumps(obj))
    if not spec.normalized:
        spec, _ = normalize(spec)
    return spec


def _write(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _make_oracle(descr: str, spec: DegeneracySpectrum, seed: int) -> A1Oracle:
    parts = descr.split(":")
    if parts[0] == "exact":
        return A1Oracle.from_spectrum(spec)
    if parts[0] == "noisy":
        if len(parts) != 2:
            raise InputError("noisy oracle needs noisy:EPS")
        return A1Oracle.from_spectrum(
            spec, mode="noisy", eps=_parse_rational(parts[1]), seed=seed
        )
    if parts[0] == "prob":
        if len(parts) != 3:
            raise InputError("probabilistic oracle needs prob:EPS:Q")
        return A1Oracle.from_spectrum(
            spec, mode="prob", eps=_parse_rational(parts[1]), q=float(parts[2]), seed=seed
        )
    raise InputError(f"unknown oracle mode {descr!r}")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_spectrum(args, cfg: RunConfig) -> int:
    obj = _load_json(args.input)
    if "couplings" in obj:
        model = IsingModel.from_json(json.dumps(obj))
        spec = enumerate_ising(model, ceiling=cfg.ising_ceiling)
    else:
        spec = DegeneracySpectrum.from_json(json.dumps(obj))
    for e, d in spec.levels:
        print(f"({e},{d})")
    if args.out:
        _write(spec.to_json(), args.out)
    return 0


def _cmd_gap_scan(args, cfg: RunConfig) -> int:
    spec = _load_spectrum(args.input, args.n, cfg)
    prof = spectral_params(spec, c=args.c)
    cert = certificate(prof, continuity_tol=cfg.continuity_tol)
    rows = gap_scan(spec, prof, cert, n_grid=args.grid)
    lines = ["s,g_true,g_lower,region"]
    lines += [f"{s!r},{g!r},{lo!r},{region}" for s, g, lo, region in rows]
    _write("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_certify(args, cfg: RunConfig) -> int:
    spec = _load_spectrum(args.input, args.n, cfg)
    prof = spectral_params(spec, c=args.c)
    cert = certificate(prof, continuity_tol=cfg.continuity_tol)
    s_values = np.linspace(0.0, 1.0, cfg.gap_grid + 1)[1:]
    from .spectrum import true_gap_grid

    sound = float(np.max(cert.g0(s_values) - true_gap_grid(spec, s_values)))
    sandwich = window_sandwich_check(prof, spec, n_points=cfg.window_points, eta=cfg.eta)
    payload = {
        "s_star": prof.s_star,
        "delta_s": prof.delta_s,
        "g_min": prof.g_min,
        "kappa_prime": prof.kappa_prime,
        "condition_value": prof.condition_value,
        "boundaries": list(cert.boundaries),
        "s0": cert.s0,
        "k": cert.k,
        "a": cert.a,
        "b": cert.b,
        "max_soundness_violation": sound,
        "sandwich_violations": sandwich.violations,
    }
    _write(json.dumps(payload, indent=2, sort_keys=True), args.out)
    return 0


def _cmd_schedule(args, cfg: RunConfig) -> int:
    spec = _load_spectrum(args.input, args.n, cfg)
    prof = spectral_params(spec, c=args.c)
    plan = synthesize(certificate(prof, continuity_tol=cfg.continuity_tol),
                      p=args.p, eps=args.eps)
    s_values = np.linspace(0.0, 1.0, args.grid + 1)
    lines = ["s,K,K_prime,g0"]
    for s in s_values:
        lines.append(
            f"{float(s)!r},{plan.k_of_s(float(s))!r},"
            f"{plan.k_prime(float(s))!r},{plan.cert.g0(float(s))!r}"
        )
    _write("\n".join(lines) + "\n", args.out)
    if args.summary:
        _write(json.dumps(plan.summary(), indent=2, sort_keys=True), args.summary)
    return 0


def _cmd_evolve(args, cfg: RunConfig) -> int:
    spec = _load_spectrum(args.input, args.n, cfg)
    prof = spectral_params(spec, c=args.c)
    plan = synthesize(certificate(prof, continuity_tol=cfg.continuity_tol),
                      p=args.p, eps=args.eps)
    factor = min(1.0, args.time_cap / plan.T) if args.time_cap else 1.0
    result = evolve(spec, plan, time_factor=factor, cfg=cfg)
    payload = result.summary() | {"plan_T": plan.T, "time_factor": factor}
    _write(json.dumps(payload, indent=2, sort_keys=True), args.out)
    return 0


def _cmd_scaling(args, cfg: RunConfig) -> int:
    obj = _load_json(args.input)
    if obj.get("family") == "grover":
        d0 = int(obj.get("d0", 1))
        family = lambda n: corpus.grover(n, d0=d0)  # noqa: E731
    elif obj.get("family") == "gaussian":
        family = lambda n: corpus.gaussian_levels(  # noqa: E731
            n, M=int(obj.get("M", 11)), sigma=float(obj.get("sigma", 2.0)),
            d0=int(obj.get("d0", 1)),
        )
    else:
        raise InputError("scaling needs a family descriptor input")
    table = scaling_experiment(
        family, range(args.n_min, args.n_max + 1), eps=args.eps, p=args.p,
        condition_c=args.c, time_cap=args.time_cap, cfg=cfg,
    )
    _write("\n".join(table.csv_lines()) + "\n", args.out)
    return 0


def _cmd_extract(args, cfg: RunConfig) -> int:
    obj = _load_json(args.input)
    if "couplings" in obj:
        model = IsingModel.from_json(json.dumps(obj))
        spec = enumerate_ising(model, ceiling=cfg.ising_ceiling)
    else:
        spec = DegeneracySpectrum.from_json(json.dumps(obj))
    e0 = spec.levels[0][0]
    gaps = []
    for e, _ in spec.levels:
        gap = e - e0
        if gap.denominator != 1:
            raise PreconditionError("extraction requires integer level gaps")
        gaps.append(int(gap))
    oracle = _make_oracle(args.oracle, spec, cfg.seed)
    if oracle.mode == "exact":
        transcript = extract_degeneracies(oracle, spec.n, gaps)
    elif oracle.mode == "noisy":
        transcript = extract_degeneracies_noisy(oracle, spec.n, gaps)
    else:
        k = args.k_samples or 4 * (len(gaps) + 2)
        transcript = probabilistic_extraction(oracle, spec.n, gaps, k)
    _write(transcript.to_json(), args.out)
    return 0


def _cmd_sat(args, cfg: RunConfig) -> int:
    try:
        text = Path(args.cnf).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {args.cnf}: {exc}") from exc
    instance = SatInstance.from_dimacs(text)
    gadget = sat_gadget(instance, ceiling=cfg.sat_ceiling)
    min_e = gadget.min_energy()
    payload = {
        "variables": instance.n,
        "clauses": len(instance.clauses),
        "qubits": gadget.qubits,
        "min_energy": f"{min_e.numerator}/{min_e.denominator}",
        "satisfiable": min_e == 0,
        "satisfying_assignments": instance.satisfying_count(),
    }
    _write(json.dumps(payload, indent=2, sort_keys=True), args.out)
    return 0


def _cmd_verify_bounds(args, cfg: RunConfig) -> int:
    spec = _load_spectrum(args.input, args.n, cfg)
    report = verify_projector_bounds(spec, np.linspace(0.02, 0.98, args.points))
    lines = ["s,gap,ratio_p_prime,ratio_commutator,flagged"]
    for row in report.rows:
        lines.append(
            f"{row.s!r},{row.gap!r},{row.ratio_p_prime!r},"
            f"{row.ratio_commutator!r},{int(row.flagged)}"
        )
    lines.append(f"# max_ratio,{report.max_ratio!r}")
    _write("\n".join(lines) + "\n", args.out)
    return 0


# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aqolab")
    parser.add_argument("--config", help="RunConfig JSON file")
    parser.add_argument("--seed", type=int, default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, family_ok=True):
        p.add_argument("input")
        p.add_argument("--out")
        p.add_argument("--c", type=float, default=0.02, help="condition threshold")
        if family_ok:
            p.add_argument("--n", type=int, default=None, help="qubits for family inputs")

    p = sub.add_parser("spectrum", help="enumerate or echo a spectrum")
    p.add_argument("input")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("gap-scan", help="true gap vs certified bound, CSV")
    common(p)
    p.add_argument("--grid", type=int, default=1000)
    p.set_defaults(func=_cmd_gap_scan)

    p = sub.add_parser("certify", help="build and check the gap certificate")
    common(p)
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("schedule", help="synthesize the local schedule, CSV")
    common(p)
    p.add_argument("--grid", type=int, default=200)
    p.add_argument("--p", type=float, default=1.5)
    p.add_argument("--eps", type=float, default=0.2)
    p.add_argument("--summary", help="also write a JSON summary here")
    p.set_defaults(func=_cmd_schedule)

    p = sub.add_parser("evolve", help="integrate the schedule, JSON report")
    common(p)
    p.add_argument("--p", type=float, default=1.5)
    p.add_argument("--eps", type=float, default=0.2)
    p.add_argument("--time-cap", type=float, default=1e4,
                   help="cap on integrated total time (0 disables)")
    p.set_defaults(func=_cmd_evolve)

    p = sub.add_parser("scaling", help="runtime scaling table over n, CSV")
    p.add_argument("input")
    p.add_argument("--out")
    p.add_argument("--c", type=float, default=0.07)
    p.add_argument("--n-min", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--p", type=float, default=1.5)
    p.add_argument("--eps", type=float, default=0.2)
    p.add_argument("--time-cap", type=float, default=1e4)
    p.set_defaults(func=_cmd_scaling)

    p = sub.add_parser("extract", help="degeneracy extraction transcript, JSON")
    p.add_argument("input")
    p.add_argument("--out")
    p.add_argument("--oracle", default="exact", help="exact | noisy:EPS | prob:EPS:Q")
    p.add_argument("--k-samples", type=int, default=None)
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("sat", help="clause-gadget summary for a DIMACS file")
    p.add_argument("cnf")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_sat)

    p = sub.add_parser("verify-bounds", help="projector-derivative bound report")
    common(p)
    p.add_argument("--points", type=int, default=50)
    p.set_defaults(func=_cmd_verify_bounds)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
        if args.seed is not None:
            cfg = RunConfig(**(cfg.to_dict() | {"seed": args.seed}))
        return args.func(args, cfg)
    except AqolabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(main())
