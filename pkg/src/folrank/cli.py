"""Batch job runner binding the rank engines, the estimator and the suites.

JSON in, JSON + CSV out.  All rationals in reports are exact decimal
strings "p/q"; the only floats are the labeled metric-mean-dimension slope
columns.  Reports are byte-identical across reruns of the same job,
regardless of FOLRANK_THREADS.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .errors import BudgetExceededError, FolrankError, InputError, UnsupportedGroupError
from .groupring import RingMatrix
from .groups import DEFAULT_MAX_WINDOW_ELEMENTS
from .mmdim import DEFAULT_EPS_SCHEDULE, mmdim_estimate
from .ranks import (
    DEFAULT_GROWTH_STEPS,
    DEFAULT_TOLERANCE,
    DensitySeries,
    ModulePresentation,
    derived_rng,
    erank_of_presentation,
    folner_set,
    mrank_of_presentation,
    oracle_value,
    per_window_identity_check,
    rationality_snap,
    run_identity_suite,
    run_submodularity_suite,
    run_superadditivity_suite,
    vnd_of_presentation,
)

COMMANDS = (
    "vnd",
    "mrank",
    "erank",
    "mmdim",
    "identity-check",
    "oracle",
    "compare",
    "verify-suite",
)

DEFAULT_SCHEDULE = (4, 8, 16, 32)


@dataclass
class JobSpec:
    """One batch job: engine selection plus all knobs that affect the output."""

    command: str
    matrix: RingMatrix | None = None
    schedule: tuple[int, ...] = DEFAULT_SCHEDULE
    tolerance: Fraction = DEFAULT_TOLERANCE
    seed: int = 0
    epsilons: tuple[float, ...] = DEFAULT_EPS_SCHEDULE
    max_window_elements: int = DEFAULT_MAX_WINDOW_ELEMENTS
    max_primes: int = 16
    growth_steps: int = DEFAULT_GROWTH_STEPS
    sample_budget: int = 400
    cases: int = 100
    out_dir: Path = Path(".")
    stem: str = "job"

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        if self.tolerance <= 0:
            raise InputError("tolerance must be positive")
        if any(b <= a for a, b in zip(self.schedule, self.schedule[1:])):
            raise InputError("schedule must be strictly increasing")
        if self.max_primes < 3:
            raise InputError("max_primes must allow at least three agreeing primes")


def _frac_str(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"not a rational: {text!r}") from exc


def parse_epsilon(text: str) -> float:
    text = text.strip()
    if "^" in text:
        base, _, expo = text.partition("^")
        try:
            return float(base) ** float(expo)
        except ValueError as exc:
            raise InputError(f"not an epsilon value: {text!r}") from exc
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"not an epsilon value: {text!r}") from exc


def _load_json(path: Path) -> object:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def load_matrix(path: Path) -> RingMatrix:
    obj = _load_json(path)
    if isinstance(obj, dict) and "command" in obj:
        inner = obj.get("matrix")
        if inner is None:
            raise InputError(f"{path}: job file has no 'matrix' field")
        return RingMatrix.from_json(inner)
    return RingMatrix.from_json(obj)


def _series_json(series: DensitySeries) -> list[dict]:
    out = []
    for r in series.records:
        primes = list(r.certificate.primes) if r.certificate else []
        out.append(
            {
                "L": r.L,
                "F_size": r.f_size,
                "numerator": str(r.numerator),
                "density": _frac_str(r.density),
                "primes": primes,
                "stabilized": r.stabilized,
            }
        )
    return out


def _series_csv(series: DensitySeries) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["L", "F_size", "numerator", "density", "primes"])
    for r in series.records:
        primes = ";".join(str(p) for p in r.certificate.primes) if r.certificate else ""
        writer.writerow([r.L, r.f_size, r.numerator, _frac_str(r.density), primes])
    return buf.getvalue()


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _dump(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _series_report(job: JobSpec, series: DensitySeries) -> dict:
    P = ModulePresentation(job.matrix)
    snap = rationality_snap(series, job.matrix.spec)
    return {
        "quantity": series.quantity,
        "group": job.matrix.spec.to_json(),
        "presentation": job.matrix.to_json(),
        "series": _series_json(series),
        "limit_estimate": _frac_str(series.limit_estimate),
        "running_min": _frac_str(series.running_min),
        "snap": snap.to_json(),
        "status": series.status,
        "tolerance": _frac_str(series.tolerance),
        "seed": job.seed,
        "module_rank_bound": P.n,
    }


def _run_series_command(job: JobSpec) -> int:
    P = ModulePresentation(job.matrix)
    engine = {
        "mrank": mrank_of_presentation,
        "vnd": vnd_of_presentation,
        "erank": erank_of_presentation,
    }[job.command]
    kwargs = dict(
        tolerance=job.tolerance, seed=job.seed, max_window_elements=job.max_window_elements
    )
    if job.command == "erank":
        kwargs["growth_steps"] = job.growth_steps
    series = engine(P, job.schedule, **kwargs)
    report = _series_report(job, series)
    _write(job.out_dir / f"{job.command}-{job.stem}.json", _dump(report))
    _write(job.out_dir / f"{job.command}-{job.stem}.csv", _series_csv(series))
    print(f"{job.command}: limit_estimate {report['limit_estimate']} status {series.status}")
    return 0 if series.status == "converged" else 2


def _run_mmdim(job: JobSpec) -> int:
    est = mmdim_estimate(
        job.matrix, job.schedule, job.epsilons, budget=job.sample_budget, seed=job.seed
    )
    report = {
        "quantity": "mmdim",
        "group": job.matrix.spec.to_json(),
        "presentation": job.matrix.to_json(),
        "interval": [est.lower, est.upper],
        "flagged": est.flagged,
        "epsilons": [repr(e) for e in sorted(est.lower_slopes)],
        "L": list(job.schedule),
        "seed": job.seed,
        "note": "interval along the canonical window sequence only",
    }
    buf = io.StringIO()
    writer = csv.DictWriter(
        buf,
        fieldnames=["L", "F_size", "epsilon", "lower_count", "upper_log", "lower_slope", "upper_slope"],
        lineterminator="\n",
    )
    writer.writeheader()
    for row in est.csv_rows():
        writer.writerow(row)
    _write(job.out_dir / f"mmdim-{job.stem}.json", _dump(report))
    _write(job.out_dir / f"mmdim-{job.stem}.csv", buf.getvalue())
    print(f"mmdim: estimate interval [{est.lower:.6f}, {est.upper:.6f}] (flagged {est.flagged})")
    return 0


def _run_identity_check(job: JobSpec) -> int:
    f = job.matrix
    checks = []
    all_ok = True
    for L in job.schedule:
        F = folner_set(f.spec, L, job.max_window_elements)
        ok = per_window_identity_check(f, F, rng=derived_rng(job.seed, "identity-cli", L))
        checks.append({"L": L, "ok": ok})
        all_ok = all_ok and ok
    report = {
        "quantity": "identity-check",
        "group": f.spec.to_json(),
        "presentation": f.to_json(),
        "checks": checks,
        "all_ok": all_ok,
        "seed": job.seed,
    }
    _write(job.out_dir / f"identity-check-{job.stem}.json", _dump(report))
    print(f"identity-check: {'all windows agree' if all_ok else 'MISMATCH'}")
    return 0 if all_ok else 1


def _run_oracle(job: JobSpec) -> int:
    P = ModulePresentation(job.matrix)
    value = oracle_value(P, seed=job.seed)
    report = {
        "quantity": "oracle",
        "group": job.matrix.spec.to_json(),
        "presentation": job.matrix.to_json(),
        "value": _frac_str(value),
        "seed": job.seed,
    }
    _write(job.out_dir / f"oracle-{job.stem}.json", _dump(report))
    print(value)
    return 0


def _run_compare(job: JobSpec) -> int:
    P = ModulePresentation(job.matrix)
    mrank = mrank_of_presentation(
        P, job.schedule, tolerance=job.tolerance, seed=job.seed,
        max_window_elements=job.max_window_elements,
    )
    vnd = vnd_of_presentation(
        P, job.schedule, tolerance=job.tolerance, seed=job.seed,
        max_window_elements=job.max_window_elements,
    )
    erank = erank_of_presentation(
        P, job.schedule, tolerance=job.tolerance, seed=job.seed,
        growth_steps=job.growth_steps, max_window_elements=job.max_window_elements,
    )
    try:
        oracle = oracle_value(P, seed=job.seed)
    except UnsupportedGroupError:
        oracle = None
    columns = {
        "mrank": mrank.limit_estimate,
        "vnd": vnd.limit_estimate,
        "erank": erank.limit_estimate,
    }
    if oracle is not None:
        columns["oracle"] = oracle
    values = list(columns.values())
    max_gap = max(abs(a - b) for a in values for b in values)
    report = {
        "quantity": "compare",
        "group": job.matrix.spec.to_json(),
        "presentation": job.matrix.to_json(),
        "columns": {k: _frac_str(v) for k, v in columns.items()},
        "max_pairwise_gap": _frac_str(max_gap),
        "within_tolerance": max_gap <= job.tolerance,
        "tolerance": _frac_str(job.tolerance),
        "statuses": {"mrank": mrank.status, "vnd": vnd.status, "erank": erank.status},
        "seed": job.seed,
    }
    _write(job.out_dir / f"compare-{job.stem}.json", _dump(report))
    for name, value in columns.items():
        print(f"{name:>8}: {value}")
    print(f"max pairwise gap {max_gap} (tolerance {job.tolerance})")
    statuses = (mrank.status, vnd.status, erank.status)
    return 0 if all(s == "converged" for s in statuses) else 2


def _run_verify_suite(job: JobSpec) -> int:
    suites = [
        run_identity_suite(job.seed, cases=job.cases),
        run_superadditivity_suite(job.seed, cases=job.cases),
        run_submodularity_suite(job.seed, cases=job.cases),
    ]
    all_pass = True
    for s in suites:
        status = "PASS" if s.passed else "FAIL"
        print(f"{status} {s.name}: {s.cases} cases, {len(s.failures)} failures, {s.flagged} flagged")
        for msg in s.failures[:10]:
            print(f"  {msg}")
        all_pass = all_pass and s.passed
    report = {
        "quantity": "verify-suite",
        "seed": job.seed,
        "cases": job.cases,
        "suites": [s.to_json() for s in suites],
        "all_pass": all_pass,
    }
    _write(job.out_dir / f"verify-suite-{job.stem}.json", _dump(report))
    return 0 if all_pass else 1


def run(job: JobSpec) -> int:
    """Execute one job; returns the process exit code."""
    from . import exactla

    exactla.MAX_PRIMES = job.max_primes
    if job.command == "verify-suite":
        return _run_verify_suite(job)
    if job.matrix is None:
        raise InputError(f"command {job.command!r} needs --input")
    if job.command in ("mrank", "vnd", "erank"):
        return _run_series_command(job)
    if job.command == "mmdim":
        return _run_mmdim(job)
    if job.command == "identity-check":
        return _run_identity_check(job)
    if job.command == "oracle":
        return _run_oracle(job)
    return _run_compare(job)


def _job_from_args(args: argparse.Namespace) -> JobSpec:
    file_job: dict = {}
    matrix = None
    stem = "job"
    if args.input:
        path = Path(args.input)
        stem = path.stem
        obj = _load_json(path)
        if isinstance(obj, dict) and "command" in obj:
            file_job = obj
            matrix = RingMatrix.from_json(obj["matrix"]) if "matrix" in obj else None
        else:
            matrix = RingMatrix.from_json(obj)
    command = args.command or file_job.get("command")
    if command is None:
        raise InputError("no command given")
    schedule = file_job.get("schedule", list(DEFAULT_SCHEDULE))
    if args.L:
        try:
            schedule = [int(x) for x in args.L.split(",") if x]
        except ValueError as exc:
            raise InputError(f"--L: expected comma-separated integers, got {args.L!r}") from exc
    tolerance = parse_fraction(str(file_job.get("tolerance", DEFAULT_TOLERANCE)))
    if args.tolerance:
        tolerance = parse_fraction(args.tolerance)
    epsilons = tuple(parse_epsilon(str(e)) for e in file_job.get("epsilons", [])) or DEFAULT_EPS_SCHEDULE
    if args.epsilon:
        epsilons = tuple(parse_epsilon(x) for x in args.epsilon.split(",") if x)
    seed = args.seed if args.seed is not None else int(file_job.get("seed", 0))
    budgets = file_job.get("budgets", {})
    return JobSpec(
        command=command,
        matrix=matrix,
        schedule=tuple(schedule),
        tolerance=tolerance,
        seed=seed,
        epsilons=epsilons,
        max_window_elements=int(
            args.max_window_elements
            if args.max_window_elements is not None
            else budgets.get("max_window_elements", DEFAULT_MAX_WINDOW_ELEMENTS)
        ),
        max_primes=int(budgets.get("max_primes", 16)),
        growth_steps=int(budgets.get("growth_steps", DEFAULT_GROWTH_STEPS)),
        sample_budget=int(
            args.samples if args.samples is not None else budgets.get("max_samples", 400)
        ),
        cases=args.cases,
        out_dir=Path(args.out),
        stem=stem,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="folrank",
        description="Exact window densities for group-ring modules: mean rank, "
        "kernel density, dual-restriction rank, and a metric mean dimension estimator.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--input", help="RingMatrix JSON (or a JobSpec JSON with a 'command' field)")
    parser.add_argument("--L", help="comma-separated window indices, e.g. 4,8,16,32")
    parser.add_argument("--tolerance", help="convergence tolerance as p/q")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--epsilon", help="comma-separated eps values, e.g. 1/8,1/16 or 2^-3")
    parser.add_argument("--out", default=".", help="output directory for reports")
    parser.add_argument("--cases", type=int, default=100, help="verify-suite case count")
    parser.add_argument("--samples", type=int, default=None, help="mmdim sample budget")
    parser.add_argument("--max-window-elements", type=int, default=None, dest="max_window_elements")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        job = _job_from_args(args)
        return run(job)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1
    except BudgetExceededError as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return 2
    except UnsupportedGroupError as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return 1
    except FolrankError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
