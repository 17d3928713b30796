"""``rees`` command line: downgrade, rees-ideal, verify, classify, corpus."""

from __future__ import annotations

import argparse
import io
import itertools
import json
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .algebra import Field, Polynomial, PolynomialSyntaxError, PrimeField, Ring, field_from_spec
from .groebner import Budget, GroebnerBudgetExceeded, DEFAULT_BUDGET
from .lab import (
    SetupError, TheoremViolation, build_setup, classify, downgrade_sequence,
    rees_ideal_downgrade, rees_ideal_saturation, verify_main_theorem,
)

SCHEMA = "rees-report/1"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILED = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# random inputs and corpus description
# ---------------------------------------------------------------------------


def random_form(n: int, d: int, field: Field, rng: random.Random, density: float = 0.8) -> Polynomial:
    """Dense random form of degree d in x1..xn; each monomial kept with prob. ``density``."""
    ring = Ring(n, field)
    monos = [m for m in itertools.product(range(d + 1), repeat=n) if sum(m) == d]
    monos.sort(reverse=True)
    while True:
        terms = {}
        for m in monos:
            if rng.random() < density:
                if isinstance(field, PrimeField):
                    c = rng.randrange(1, field.p)
                else:
                    c = rng.choice([i for i in range(-9, 10) if i])
                terms[m + (0,) * n] = field.element(c)
        if terms:
            return Polynomial(ring, terms)


@dataclass
class CorpusCase:
    n: int
    d: Optional[int] = None
    f: Optional[str] = None
    count: int = 1
    prime: int = 32003
    seed: int = 0

    def instances(self) -> list:
        """[(f text, instance seed)] for this case."""
        field_ = field_from_spec(self.prime)
        if self.f is not None:
            return [(self.f, self.seed)]
        rng = random.Random(self.seed)
        out = []
        for k in range(self.count):
            out.append((str(random_form(self.n, self.d, field_, rng)), self.seed * 1000 + k))
        return out


@dataclass
class CorpusSpec:
    cases: list = field(default_factory=list)
    budget: int = DEFAULT_BUDGET
    depth_trials: int = 3

    @classmethod
    def from_json(cls, data: dict) -> "CorpusSpec":
        if not isinstance(data, dict):
            raise ValueError("corpus spec must be a JSON object")
        unknown = set(data) - {"cases", "budget", "depth_trials"}
        if unknown:
            raise ValueError(f"unknown corpus fields {sorted(unknown)}")
        cases = []
        for idx, raw in enumerate(data.get("cases", [])):
            if not isinstance(raw, dict):
                raise ValueError(f"case {idx} is not an object")
            bad = set(raw) - {"n", "d", "f", "count", "prime", "seed"}
            if bad:
                raise ValueError(f"case {idx}: unknown fields {sorted(bad)}")
            case = CorpusCase(
                n=int(raw["n"]) if "n" in raw else 0,
                d=int(raw["d"]) if raw.get("d") is not None else None,
                f=raw.get("f"),
                count=int(raw.get("count", 1)),
                prime=int(raw.get("prime", 32003)),
                seed=int(raw.get("seed", idx)),
            )
            if case.n < 2:
                raise ValueError(f"case {idx}: n must be at least 2")
            if case.f is None and (case.d is None or case.d < 1):
                raise ValueError(f"case {idx}: needs f or d >= 1")
            if case.count < 0:
                raise ValueError(f"case {idx}: count must be nonnegative")
            cases.append(case)
        return cls(cases, int(data.get("budget", DEFAULT_BUDGET)), int(data.get("depth_trials", 3)))


def default_corpus() -> CorpusSpec:
    """Grid n in {2,3}, d in {1..4}, 5 random forms each, plus the worked examples."""
    cases = []
    for n in (2, 3):
        for d in range(1, 5):
            cases.append(CorpusCase(n=n, d=d, count=5, seed=100 * n + d))
    cases.append(CorpusCase(n=3, f="x3^3"))
    cases.append(CorpusCase(n=3, f="x1^2*x2 + x1*x3^2"))
    cases.append(CorpusCase(n=2, f="x2"))
    return CorpusSpec(cases)


def _run_instance(args) -> dict:
    n, f_text, prime, seed, trials, budget_limit = args
    t0 = time.perf_counter()
    try:
        setup = build_setup(n, f_text, field_from_spec(prime))
        report = classify(setup, depth_trials=trials, depth_seed=seed, budget=Budget(budget_limit))
        out = report.as_dict(timings=True)
        out["seed"] = seed
        out["passed"] = report.passed
    except (GroebnerBudgetExceeded, TheoremViolation, SetupError, ValueError) as exc:
        out = {"n": n, "f": f_text, "seed": seed, "passed": False, "error": str(exc)}
    out.setdefault("timings", {})["total"] = round(time.perf_counter() - t0, 4)
    return out


def corpus_run(spec: Optional[CorpusSpec] = None, seed_override: Optional[int] = None,
               jobs: int = 1, timings: bool = True) -> dict:
    """Run verify + classify over a corpus; returns the report envelope."""
    spec = spec or default_corpus()
    tasks = []
    for idx, case in enumerate(spec.cases):
        if seed_override is not None:
            case = CorpusCase(case.n, case.d, case.f, case.count, case.prime, seed_override + idx)
        for f_text, seed in case.instances():
            tasks.append((case.n, f_text, case.prime, seed, spec.depth_trials, spec.budget))
    t0 = time.perf_counter()
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_instance, tasks))
    else:
        results = [_run_instance(t) for t in tasks]
    if not timings:
        for r in results:
            r.pop("timings", None)
    passed = sum(1 for r in results if r["passed"])
    envelope = {
        "schema": SCHEMA,
        "cases": results,
        "passed": passed,
        "failed": len(results) - passed,
    }
    if timings:
        envelope["timings"] = {"wall": round(time.perf_counter() - t0, 4)}
    return envelope


def load_corpus(path: str) -> CorpusSpec:
    with open(path) as fh:
        return CorpusSpec.from_json(json.load(fh))


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, needs_f: bool = True):
    p.add_argument("--n", type=int, required=needs_f, help="number of x variables (>= 2)")
    p.add_argument("--f", required=needs_f, help='form in x1..xn, e.g. "x1^2*x2 + x1*x3^2"')
    p.add_argument("--field", default="32003", help="prime characteristic, or QQ (default 32003)")
    p.add_argument("--strategy", choices=("min", "max"), default="min")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="reduction-step budget")
    p.add_argument("--no-timings", action="store_true", help="omit timings from JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rees", description="Defining equations of Rees algebras of hypersurface maximal ideals.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    _common(sub.add_parser("downgrade", help="print the downgraded sequence f0..fd"))
    p = sub.add_parser("rees-ideal", help="generators of the defining ideal")
    _common(p)
    p.add_argument("--method", choices=("downgrade", "saturation"), default="downgrade")
    _common(sub.add_parser("verify", help="check downgrade ideal against saturations"))
    p = sub.add_parser("classify", help="relation type, fiber, dimension, depth")
    _common(p)
    p.add_argument("--trials", type=int, default=3, help="depth probe trials")
    p = sub.add_parser("corpus", help="run a corpus of cases (default grid if no file)")
    p.add_argument("spec", nargs="?", help="corpus spec JSON file")
    p.add_argument("--seed", type=int, default=None, help="override case seeds")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--no-timings", action="store_true")
    p.add_argument("--budget", type=int, default=None)
    return parser


def _setup(args):
    return build_setup(args.n, args.f, field_from_spec(args.field))


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _cmd_downgrade(args, out, err):
    setup = _setup(args)
    seq = downgrade_sequence(setup, args.strategy)
    if args.json:
        out.write(_dump({
            "schema": SCHEMA, "n": setup.n, "d": setup.d, "strategy": args.strategy,
            "sequence": [str(g) for g in seq.entries],
            "columns": [[str(c) for c in col] for col in seq.columns],
        }))
    else:
        for i, g in enumerate(seq.entries):
            out.write(f"f{i} = {g}\n")
    return EXIT_OK


def _cmd_rees_ideal(args, out, err):
    setup = _setup(args)
    budget = Budget(args.budget)
    index = None
    if args.method == "downgrade":
        ideal = rees_ideal_downgrade(setup, args.strategy)
        gens = list(ideal.gens)
    else:
        ideal, index = rees_ideal_saturation(setup, budget)
        gens = list(ideal.groebner().elements)
    if args.json:
        payload = {"schema": SCHEMA, "n": setup.n, "d": setup.d, "method": args.method,
                   "generators": [str(g) for g in gens]}
        if index is not None:
            payload["saturation_index"] = index
        out.write(_dump(payload))
    else:
        for g in gens:
            out.write(f"{g}\n")
        if index is not None:
            out.write(f"# saturation index {index}\n")
    return EXIT_OK


def _cmd_verify(args, out, err):
    setup = _setup(args)
    v = verify_main_theorem(setup, Budget(args.budget))
    if args.json:
        payload = {"schema": SCHEMA, "n": setup.n, "d": setup.d, "f": str(setup.f), "verdict": v.holds}
        payload.update(v.as_dict())
        out.write(_dump(payload))
    else:
        out.write(f"verdict: {'true' if v.holds else 'false'}\n")
        out.write(f"saturation index: {v.saturation_index}\n")
        out.write(f"downgrade(min) = saturation: {v.downgrade_min_equals_saturation}\n")
        out.write(f"downgrade(max) = saturation: {v.downgrade_max_equals_saturation}\n")
        out.write(f"L saturation = saturation: {v.symmetric_saturation_equals_saturation}\n")
    if not v.holds:
        err.write("THEOREM-VIOLATION: downgrade and saturation ideals differ\n")
        return EXIT_FAILED
    return EXIT_OK


def _cmd_classify(args, out, err):
    setup = _setup(args)
    report = classify(setup, depth_trials=args.trials, depth_seed=args.seed or 0,
                      budget=Budget(args.budget))
    if args.json:
        case = report.as_dict(timings=not args.no_timings)
        case["passed"] = report.passed
        out.write(_dump({"schema": SCHEMA, "cases": [case],
                         "passed": int(report.passed), "failed": int(not report.passed)}))
    else:
        for k, v in report.as_dict(timings=not args.no_timings).items():
            out.write(f"{k}: {v}\n")
    for line in report.violations:
        err.write(line + "\n")
    return EXIT_OK if report.passed else EXIT_FAILED


def _cmd_corpus(args, out, err):
    try:
        spec = load_corpus(args.spec) if args.spec else default_corpus()
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"corpus spec: {exc}")
    if args.budget is not None:
        spec.budget = args.budget
    env = corpus_run(spec, args.seed, jobs=args.jobs, timings=not args.no_timings)
    out.write(_dump(env))
    err.write(f"{'n':>2} {'d':>2} {'rt':>2} {'gens':>4} {'dim':>3} {'depth':>5} {'cm':>5}  pass  f\n")
    for c in env["cases"]:
        if "error" in c:
            err.write(f"{c['n']:>2}  -  -    -   -     -     -  FAIL  {c['f']}  ({c['error']})\n")
            continue
        err.write(
            f"{c['n']:>2} {c['d']:>2} {c['relation_type']:>2} {c['min_gens']:>4} {c['dim']:>3} "
            f"{c['depth']:>5} {str(c['cm']):>5}  {'ok  ' if c['passed'] else 'FAIL'}  {c['f']}\n"
        )
        for v in c.get("violations", []):
            err.write(f"   {v}\n")
    err.write(f"passed {env['passed']}, failed {env['failed']}\n")
    return EXIT_OK if env["failed"] == 0 else EXIT_FAILED


_COMMANDS = {
    "downgrade": _cmd_downgrade,
    "rees-ideal": _cmd_rees_ideal,
    "verify": _cmd_verify,
    "classify": _cmd_classify,
    "corpus": _cmd_corpus,
}


def run_command(argv: list, err=None) -> tuple:
    """Run one CLI invocation; returns (exit code, standard output text).

    Diagnostics go to ``err`` (standard error by default).
    """
    err = err if err is not None else sys.stderr
    out = io.StringIO()
    try:
        args = build_parser().parse_args(argv)
        code = _COMMANDS[args.command](args, out, err)
    except SystemExit as exc:  # --help
        return int(exc.code or 0), out.getvalue()
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return EXIT_USAGE, out.getvalue()
    except PolynomialSyntaxError as exc:
        err.write(f"parse error: {exc}\n")
        return EXIT_USAGE, out.getvalue()
    except SetupError as exc:
        err.write(f"precondition failed: {exc}\n")
        return EXIT_USAGE, out.getvalue()
    except GroebnerBudgetExceeded as exc:
        err.write(f"budget exceeded: {exc}\n")
        return EXIT_FAILED, out.getvalue()
    except TheoremViolation as exc:
        err.write(f"THEOREM-VIOLATION: {exc}\n")
        return EXIT_FAILED, out.getvalue()
    except ValueError as exc:
        err.write(f"invalid input: {exc}\n")
        return EXIT_USAGE, out.getvalue()
    return code, out.getvalue()


def main(argv: Optional[list] = None) -> int:
    code, text = run_command(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
