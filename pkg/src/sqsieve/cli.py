"""Command-line front door: reproducible verification runs with machine-readable reports.

Exit codes: 0 all certifications pass, 1 a certification failed, 2 bad
configuration or arguments, 3 internal invariant breach. Machine output is
byte-stable for a fixed config apart from the generated_at header field.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from datetime import datetime, timezone
from fractions import Fraction

import numpy as np

from . import __version__, buchstab, expsum, integrator, moduli_primes
from . import params as params_mod
from .params import parse_rational
from .regions import RegionId, make_region

DEFAULT_SEED = 0xC0FFEE

EXIT_OK = 0
EXIT_CERTIFICATION = 1
EXIT_CONFIG = 2
EXIT_INTERNAL = 3


class CertificationFailure(Exception):
    """At least one certified claim did not hold in this run."""


def _write_report(path: str | None, fmt: str, subcommand: str, config: dict, rows: list[dict], summary: dict) -> None:
    header = {
        "tool": f"sqsieve {__version__}",
        "subcommand": subcommand,
        "config": {k: str(v) for k, v in sorted(config.items())},
        "generated_at": datetime.now(timezone.utc).isoformat(),
    }
    if fmt == "json":
        text = json.dumps(
            {"header": header, "rows": rows, "summary": summary},
            indent=2, sort_keys=True, default=str,
        ) + "\n"
    else:
        buf = io.StringIO()
        for key, value in sorted(header["config"].items()):
            buf.write(f"# {key}={value}\n")
        buf.write(f"# generated_at={header['generated_at']}\n")
        if rows:
            writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
            writer.writeheader()
            writer.writerows(rows)
        for key, value in sorted(summary.items()):
            buf.write(f"# summary.{key}={value}\n")
        text = buf.getvalue()
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _apply_config_file(args: argparse.Namespace) -> None:
    """Config file values fill in anything the flags left at None."""
    if not getattr(args, "config", None):
        return
    values = params_mod.load_config(args.config)
    for key, value in values.items():
        attr = key.replace("-", "_")
        if hasattr(args, attr) and getattr(args, attr) is None:
            setattr(args, attr, value)


def _resolved_params(args: argparse.Namespace) -> params_mod.SieveParameters:
    return params_mod.derive_parameters(
        args.sigma if args.sigma is not None else params_mod.REFERENCE_SIGMA,
        args.varpi if args.varpi is not None else params_mod.REFERENCE_VARPI,
        args.delta if args.delta is not None else 0,
        args.eta if args.eta is not None else 0,
    )


def _cmd_constraints(args) -> int:
    sigma = parse_rational(args.sigma if args.sigma is not None else params_mod.REFERENCE_SIGMA)
    varpi = parse_rational(args.varpi if args.varpi is not None else params_mod.REFERENCE_VARPI)
    delta = parse_rational(args.delta if args.delta is not None else 0)
    gamma = parse_rational(args.gamma) if args.gamma is not None else None
    sup = params_mod.max_admissible_delta(sigma, varpi)
    binding = params_mod.binding_delta_constraint(sigma, varpi)
    report = params_mod.constraint_report(sigma, varpi, delta, gamma)

    print(f"max admissible delta at (sigma={sigma}, varpi={varpi}): {sup} ~ {float(sup):.6e}")
    print(f"binding constraint: {binding}")
    rows = report.as_rows()
    for row in rows:
        flag = "ok " if row["ok"] else "FAIL"
        print(f"  [{flag}] {row['name']}: value {row['value']} vs bound {row['bound']} (margin {row['margin']})")
    config = {"sigma": sigma, "varpi": varpi, "delta": delta, "gamma": gamma, "max_admissible_delta": sup}
    summary = {"max_admissible_delta": str(sup), "binding": binding, "feasible": sup > 0,
               "all_satisfied": report.all_satisfied}
    _write_report(args.out, args.format, "constraints", config, rows, summary)
    if not report.all_satisfied:
        raise CertificationFailure("constraint ledger has violated entries")
    return EXIT_OK


def _cmd_deficiency(args) -> int:
    p = _resolved_params(args)
    seed = int(args.seed, 0) if isinstance(args.seed, str) else args.seed
    result = integrator.total_deficiency(
        p, samples=args.samples, seed=seed, replicates=args.replicates,
        backend=args.backend, omega_mode=args.omega, strict_gap=args.strict_gap,
        workers=args.workers,
    )
    rows = []
    for est in result.estimates:
        bound = integrator.PAPER_BOUNDS[RegionId(est.region)]
        rows.append(
            {
                "region": est.region, "value": f"{est.value:.8f}",
                "error_bound": f"{est.error_bound:.3e}", "bound": bound,
                "accepted": est.accepted, "samples": est.samples,
                "pass": result.region_certified[est.region],
            }
        )
        flag = "ok " if result.region_certified[est.region] else "FAIL"
        print(f"  [{flag}] {est.region}: {est.value:.6f} +/- {est.error_bound:.2e} vs {bound}")
    print(f"groups: S1={result.group_values['S1']:.6f} S2={result.group_values['S2']:.6f} "
          f"S3={result.group_values['S3']:.6f}")
    print(f"total deficiency {result.total:.6f}, margin {result.margin:.6f} "
          f"(target > {integrator.MARGIN_TARGET}), certified={result.margin_certified}")

    summary = {
        "total": f"{result.total:.8f}",
        "total_error": f"{result.total_error:.3e}",
        "margin": f"{result.margin:.8f}",
        "margin_certified": result.margin_certified,
        "all_regions_certified": result.all_regions_certified,
        "backend": result.estimates[0].backend,
    }

    failing = [r for r, ok in result.region_certified.items() if not ok]
    if failing and not args.strict_gap:
        # Reportable finding: re-run the failing regions under the
        # all-subset gap-exclusion variant for comparison before concluding.
        print("comparing failing regions against the stricter gap-exclusion variant:")
        for name in failing:
            strict_est = integrator.integrate(
                make_region(RegionId(name), p, strict_gap=True),
                samples=args.samples, seed=seed, replicates=args.replicates,
                backend=args.backend, omega_mode=args.omega, workers=args.workers,
            )
            rows.append(
                {
                    "region": f"{name}(strict-gap)", "value": f"{strict_est.value:.8f}",
                    "error_bound": f"{strict_est.error_bound:.3e}",
                    "bound": integrator.PAPER_BOUNDS[RegionId(name)],
                    "accepted": strict_est.accepted, "samples": strict_est.samples,
                    "pass": strict_est.certified_below(integrator.PAPER_BOUNDS[RegionId(name)]),
                }
            )
            print(f"  {name}(strict-gap): {strict_est.value:.6f} +/- {strict_est.error_bound:.2e}")

    config = {
        "sigma": p.sigma, "varpi": p.varpi, "delta": p.delta, "eta": p.eta,
        "samples": args.samples, "replicates": args.replicates, "seed": seed,
        "backend": args.backend, "omega": args.omega, "strict_gap": args.strict_gap,
        "workers": args.workers,
    }
    _write_report(args.out, args.format, "deficiency", config, rows, summary)
    if not (result.margin_certified and result.all_regions_certified):
        raise CertificationFailure("deficiency certification failed")
    return EXIT_OK


def _cmd_expsum(args) -> int:
    seed = int(args.seed, 0) if isinstance(args.seed, str) else args.seed
    if args.cases:
        with open(args.cases, encoding="utf-8") as fh:
            corpus = [json.loads(line) for line in fh if line.strip()]
    else:
        corpus = expsum.generate_corpus(seed, n_prime=args.n_prime,
                                        n_square=args.n_square, n_incomplete=args.n_incomplete)
    rows = []
    violations = 0
    for i, case in enumerate(corpus):
        res = expsum.evaluate_case(case)
        violations += 0 if res.ok else 1
        rows.append(
            {
                "case": i, "kind": res.kind, "label": res.label,
                "magnitude": f"{res.magnitude:.6f}", "bound": f"{res.bound:.6f}",
                "ratio": f"{res.ratio:.6f}", "pass": res.ok, "detail": res.detail,
            }
        )
    by_kind: dict[str, list[float]] = {}
    for row in rows:
        by_kind.setdefault(row["kind"], []).append(float(row["ratio"]))
    for kind, ratios in sorted(by_kind.items()):
        print(f"  {kind}: {len(ratios)} cases, max ratio {max(ratios):.4f}")
    print(f"violations: {violations} / {len(rows)}")
    summary = {"cases": len(rows), "violations": violations}
    summary.update({f"max_ratio_{k}": f"{max(v):.6f}" for k, v in by_kind.items()})
    config = {"seed": seed, "cases_file": args.cases or "<generated>",
              "n_cases": len(corpus)}
    _write_report(args.out, args.format, "expsum", config, rows, summary)
    if violations:
        raise CertificationFailure(f"{violations} exponential-sum bound violations")
    return EXIT_OK


def _cmd_primes(args) -> int:
    family = moduli_primes.build_family(
        args.x, args.k, delta=args.delta if args.delta is not None else Fraction(1, 100),
        varpi=args.varpi if args.varpi is not None else params_mod.REFERENCE_VARPI,
        max_members=args.max_members, seed=int(args.seed, 0) if isinstance(args.seed, str) else args.seed,
    )
    if args.family_json:
        with open(args.family_json, "w", encoding="utf-8") as fh:
            json.dump(
                {
                    "x": family.x_scale, "k": family.block_count,
                    "d_size": family.d_size,
                    "intervals": [list(iv) for iv in family.intervals],
                    "split_index": family.split_index,
                    "split_in_window": family.split_in_window,
                    "members": [
                        {"primes": list(m.primes), "d": m.d, "r": m.r, "q": m.q}
                        for m in family.members
                    ],
                    "notes": list(family.notes),
                },
                fh, indent=2, sort_keys=True,
            )
    report = moduli_primes.equidistribution_report(family, args.residue)
    rows = [
        {
            "d": r.d, "d_sq": r.d_sq, "count": r.count,
            "expectation": f"{r.expectation:.3f}", "ratio": f"{r.ratio:.5f}",
            "z": f"{r.z:.3f}",
        }
        for r in report.rows
    ]
    for r in report.rows:
        print(f"  d={r.d}: count {r.count} vs expectation {r.expectation:.1f} "
              f"(ratio {r.ratio:.4f}, z {r.z:+.2f})")
    for note in family.notes:
        print(f"  note: {note}")
    print(f"members within 3-sigma: {report.frac_within_3sigma:.1%}; "
          f"ratio <= {moduli_primes.RATIO_THRESHOLD}: {report.frac_below_threshold:.1%}")
    summary = {
        "members": len(report.rows), "skipped": len(report.skipped),
        "interval_primes": report.interval_primes,
        "mean_ratio": f"{report.mean_ratio:.5f}",
        "frac_within_3sigma": f"{report.frac_within_3sigma:.4f}",
        "frac_below_threshold": f"{report.frac_below_threshold:.4f}",
        "split_in_window": family.split_in_window,
    }
    config = {"x": args.x, "k": args.k, "delta": args.delta, "varpi": args.varpi,
              "residue": args.residue, "max_members": args.max_members, "seed": args.seed}
    _write_report(args.out, args.format, "primes", config, rows, summary)
    if report.frac_within_3sigma < 0.95:
        raise CertificationFailure("fewer than 95% of members within Poisson 3-sigma")
    return EXIT_OK


def _cmd_selftest(args) -> int:
    seed = int(args.seed, 0) if isinstance(args.seed, str) else args.seed
    rows: list[dict] = []
    failures: list[str] = []

    def check(name: str, value: float, expected: float, tol: float) -> None:
        ok = abs(value - expected) <= tol
        rows.append({"check": name, "value": f"{value:.9f}", "expected": f"{expected:.9f}",
                     "tolerance": tol, "pass": ok})
        print(f"  [{'ok ' if ok else 'FAIL'}] {name}: {value:.9f} vs {expected:.9f} (tol {tol})")
        if not ok:
            failures.append(name)

    est, exact = integrator.integrate_selftest(samples=args.samples, seed=seed)
    check("quadrature_selftest", est.value, exact, 1e-3)

    k5 = expsum.complete_sum_prime(expsum.RationalPhase(c1=1, d1=5, xi=1), 5)
    check("kloosterman_S(1,1;5)", k5.real, 2 + 2 * math.cos(4 * math.pi / 5), 1e-9)

    inv25 = expsum.complete_sum_prime_square(expsum.RationalPhase(c1=1, d1=25), 5)
    check("inverse_sum_mod_25", abs(inv25.total), 0.0, 1e-6)

    check("ramanujan_c6(1)", expsum.ramanujan(6, 1), 1, 0)
    check("ramanujan_c4(2)", expsum.ramanujan(4, 2), -2, 0)

    crt = expsum.crt_split_check(expsum.RationalPhase(c1=1, d1=15), 3, 5)
    check("crt_residual_15", crt, 0.0, 1e-10)
    crt45 = expsum.crt_split_check(expsum.RationalPhase(c1=2, d1=45), 9, 5)
    check("crt_residual_45", crt45, 0.0, 1e-10)

    table = buchstab.build_table(u_max=10.0, step=1e-4)
    check("buchstab_omega(3)", buchstab.omega(3.0, table), (1 + math.log(2)) / 3, 1e-4)
    check("buchstab_omega(10)", buchstab.omega(10.0, table), 0.561459, 1e-3)
    grid = np.arange(1.0, 10.0 + 1e-12, 0.001)
    worst = max(buchstab.omega(float(u), table) - buchstab.omega_upper(float(u)) for u in grid)
    check("buchstab_table_below_upper_bound", max(worst, 0.0), 0.0, 1e-6)
    if args.buchstab_csv:
        buchstab.dump_csv(table, args.buchstab_csv)
        print(f"  buchstab table written to {args.buchstab_csv}")

    summary = {"checks": len(rows), "failures": len(failures)}
    config = {"seed": seed, "samples": args.samples}
    _write_report(args.out, args.format, "selftest", config, rows, summary)
    if failures:
        raise CertificationFailure(f"selftest failures: {', '.join(failures)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sqsieve",
        description="Verification runs for the smooth-square-moduli sieve numerics.",
    )
    parser.add_argument("--version", action="version", version=f"sqsieve {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p_sub: argparse.ArgumentParser) -> None:
        p_sub.add_argument("--out", help="machine-readable report path")
        p_sub.add_argument("--format", choices=("csv", "json"), default="csv")
        p_sub.add_argument("--seed", default=DEFAULT_SEED,
                           help="RNG seed (int, hex accepted); default 0xC0FFEE")
        p_sub.add_argument("--config", help="key = value file; flags take precedence")

    def param_flags(p_sub: argparse.ArgumentParser) -> None:
        p_sub.add_argument("--sigma", help="bilinear width exponent, e.g. 1/19.5")
        p_sub.add_argument("--varpi", help="equidistribution gain exponent, e.g. 1/4000")
        p_sub.add_argument("--delta", help="smoothness exponent (rational)")
        p_sub.add_argument("--eta", help="slack exponent (rational, default 0)")

    p_con = sub.add_parser("constraints", help="exact exponent-inequality ledger")
    param_flags(p_con)
    p_con.add_argument("--gamma", help="bilinear position exponent (defaults to sigma)")
    common(p_con)
    p_con.set_defaults(func=_cmd_constraints)

    p_def = sub.add_parser("deficiency", help="certify the six integrals and the margin")
    param_flags(p_def)
    p_def.add_argument("--samples", type=int, default=10_000_000)
    p_def.add_argument("--replicates", type=int, default=integrator.DEFAULT_REPLICATES)
    p_def.add_argument("--backend", choices=("auto", "compiled", "python"), default="auto")
    p_def.add_argument("--omega", choices=("upper", "table"), default="upper",
                       help="upper-bound table (certification) or the delay-equation solution")
    p_def.add_argument("--strict-gap", action="store_true",
                       help="apply all-subset gap exclusions in the two-variable regions")
    p_def.add_argument("--workers", type=int, default=1)
    common(p_def)
    p_def.set_defaults(func=_cmd_deficiency)

    p_exp = sub.add_parser("expsum", help="exponential-sum bound corpus")
    p_exp.add_argument("--cases", help="JSON-lines case file; omit to generate a seeded corpus")
    p_exp.add_argument("--n-prime", type=int, default=250)
    p_exp.add_argument("--n-square", type=int, default=250)
    p_exp.add_argument("--n-incomplete", type=int, default=40)
    common(p_exp)
    p_exp.set_defaults(func=_cmd_expsum)

    p_pr = sub.add_parser("primes", help="smooth-square moduli family and progression counts")
    p_pr.add_argument("--x", type=int, default=10**8)
    p_pr.add_argument("--k", type=int, default=2, help="number of prime blocks")
    p_pr.add_argument("--delta", help="smoothness exponent (rational)")
    p_pr.add_argument("--varpi", help="gain exponent (rational)")
    p_pr.add_argument("--residue", type=int, default=1)
    p_pr.add_argument("--max-members", type=int)
    p_pr.add_argument("--family-json", help="dump the family as JSON to this path")
    common(p_pr)
    p_pr.set_defaults(func=_cmd_primes)

    p_st = sub.add_parser("selftest", help="fixed-value oracles: quadrature, sums, Buchstab")
    p_st.add_argument("--samples", type=int, default=1_000_000)
    p_st.add_argument("--buchstab-csv", help="dump (u, omega, omega_upper) rows to this path")
    common(p_st)
    p_st.set_defaults(func=_cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors already
        return int(exc.code or 0)
    try:
        _apply_config_file(args)
        return args.func(args)
    except CertificationFailure as exc:
        print(f"CERTIFICATION FAILED: {exc}", file=sys.stderr)
        return EXIT_CERTIFICATION
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AssertionError as exc:
        print(f"internal invariant breach: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
