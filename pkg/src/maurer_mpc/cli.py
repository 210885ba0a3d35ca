"""Command-line front end.

Exit codes: 0 for a normal run or a passing check, 1 for a failing check,
2 for usage, configuration or model errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import analysis
from .adversary import SHIPPED
from .circuit import BUILTIN, Circuit, parse_circuit
from .errors import BudgetExceeded, MPCError
from .network import encode
from .protocol import ProtocolConfig, run_protocol
from .ring import RandomTape, RingElem
from .sharing import ass_reconstruct, ass_share, rep_reconstruct, replicate, vss_reconstruct

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2

DEFAULTS = {
    "n": 4,
    "m": 5,
    "advid": 0,
    "strategy": "honest",
    "seed": 0,
    "trials": 1000,
    "jobs": 1,
    "alpha": 0.01,
    "pairs": 1,
    "tv_max": 0.05,
}


class UsageError(Exception):
    pass


def _ints(text: str | None) -> list[int] | None:
    if text is None:
        return None
    if isinstance(text, list):
        return [int(x) for x in text]
    try:
        return [int(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def load_circuit(spec: str, n: int) -> Circuit:
    if spec in BUILTIN:
        return BUILTIN[spec](n)
    path = Path(spec)
    if not path.exists():
        raise UsageError(f"no circuit file {spec!r} (built-ins: {', '.join(BUILTIN)})")
    return parse_circuit(path.read_text())


def _config(args, circuit_spec: str, inputs=None, strategy=None) -> ProtocolConfig:
    circuit = load_circuit(circuit_spec, args.n)
    inputs = inputs if inputs is not None else (_ints(args.inputs) or list(range(1, args.n + 1)))
    return ProtocolConfig.create(args.n, args.m, args.advid, circuit, inputs,
                                 strategy or args.strategy, seed=args.seed, tape=_ints(args.tape))


def _emit(args, payload: dict) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    out = getattr(args, "out", None)
    if out and out != "-":
        Path(out).write_text(text + "\n")
    print(text)


# -- run ----------------------------------------------------------------------

def cmd_run(args) -> int:
    cfg = _config(args, args.circuit or "sum")
    run = run_protocol(cfg)
    summary = {
        "aborted": run.aborted,
        "extracted_input": encode(run.extracted_input),
        "secrets": encode(run.secrets),
        "outputs": encode(run.outputs),
        "expected": encode(run.expected_output()),
    }
    if args.out:
        record = run.dumps()
        if args.out == "-":
            print(record)
            return EXIT_OK
        Path(args.out).write_text(record + "\n")
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


# -- check --------------------------------------------------------------------

def _grid(args):
    circuits = [args.circuit] if args.circuit else ["sum", "mul"]
    strategies = [args.strategy] if args.strategy_given else list(SHIPPED)
    advids = [args.advid] if args.advid_given else list(range(args.n))
    return [(c, s, a) for c in circuits for s in strategies for a in advids]


def _trial_chunk(job) -> dict:
    kind, cfg, seeds = job
    runs = aborted = 0
    failures = []
    outputs = set()
    for seed in seeds:
        run = run_protocol(cfg.with_randomness(seed=seed))
        runs += 1
        if run.aborted:
            aborted += 1
            if any(o is not None for o in run.outputs):
                failures.append({"seed": seed, "reason": "output after abort"})
            continue
        if kind == "correctness":
            bad = analysis.correctness_failures([run])
            if bad:
                failures.append({"seed": seed, "reason": bad[0][1]})
            outputs.add(run.expected_output().value)
        elif not analysis.check_output_simulation(run):
            failures.append({"seed": seed, "reason": "finalmsg differs from comp"})
    return {"runs": runs, "aborted": aborted, "failures": failures, "f_secrets": sorted(outputs)}


def _sweep(args, kind: str) -> int:
    jobs = []
    labels = []
    seeds = list(range(args.seed, args.seed + args.trials))
    for circuit, strategy, advid in _grid(args):
        args.advid = advid
        cfg = _config(args, circuit, strategy=strategy)
        k = max(1, args.jobs)
        chunks = [seeds[i::k] for i in range(k)]
        for chunk in chunks:
            jobs.append((kind, cfg, chunk))
            labels.append((circuit, strategy, advid))
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_trial_chunk, jobs))
    else:
        results = [_trial_chunk(j) for j in jobs]
    cells: dict = {}
    for label, res in zip(labels, results):
        cell = cells.setdefault(label, {"runs": 0, "aborted": 0, "failures": [], "f_secrets": set()})
        cell["runs"] += res["runs"]
        cell["aborted"] += res["aborted"]
        cell["failures"].extend(res["failures"])
        cell["f_secrets"].update(res["f_secrets"])
    report = []
    for (circuit, strategy, advid), cell in cells.items():
        entry = {"circuit": circuit, "strategy": strategy, "advid": advid, "runs": cell["runs"],
                 "aborted": cell["aborted"], "failures": sorted(cell["failures"], key=lambda f: f["seed"])[:10],
                 "failed": len(cell["failures"]), "passed": not cell["failures"]}
        if kind == "correctness":
            entry["f_secrets"] = sorted(cell["f_secrets"])
        report.append(entry)
    ok = all(e["passed"] for e in report)
    _emit(args, {"check": kind, "passed": ok, "cells": report})
    return EXIT_OK if ok else EXIT_FAIL


def _ni(args, mode: str) -> int:
    a, b = _ints(args.inputs_a), _ints(args.inputs_b)
    if a is None or b is None:
        raise UsageError("--inputs-a and --inputs-b are required")
    cfg = _config(args, args.circuit or ("sum" if mode == "exact" else "mul"), inputs=a)
    if mode == "exact":
        report = analysis.ni_exact(a, b, cfg)
    else:
        report = analysis.ni_sampled(a, b, cfg, args.trials, alpha=args.alpha, pairs=args.pairs,
                                     tv_max=args.tv_max, base_seed=args.seed)
    body = report.to_json()
    if body.get("first_difference"):
        body["first_difference"] = dict(body["first_difference"], view=body["first_difference"]["view"][:2000])
    _emit(args, body)
    if report.verdict == "precondition":
        print(report.message, file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_check(args) -> int:
    what = args.what
    if what in ("correctness", "output-sim"):
        return _sweep(args, what)
    if what == "ni-exact":
        return _ni(args, "exact")
    if what == "ni-sampled":
        return _ni(args, "sampled")
    result = analysis.secrecy_check(args.m, args.n)
    _emit(args, {"check": "secrecy", **result})
    return EXIT_OK if result["passed"] else EXIT_FAIL


# -- demo-share ---------------------------------------------------------------

def cmd_demo_share(args) -> int:
    if args.m < 2:
        raise UsageError(f"modulus must be >= 2, got {args.m}")
    if args.n < 2:
        raise UsageError(f"need at least 2 parties, got {args.n}")
    tape_values = _ints(args.tape)
    tape = RandomTape(tape_values, args.m) if tape_values is not None else RandomTape.seeded(args.seed, args.m)
    s = RingElem.of(args.s, args.m)
    additive = ass_share(s, args.n, tape)
    replicated = replicate(additive)
    body = {
        "secret": s.value,
        "n": args.n,
        "m": args.m,
        "additive": encode(additive),
        "replicated": [encode(r) for r in replicated],
        "additive_reconstruct": ass_reconstruct(additive).value,
        "replicated_reconstruct": rep_reconstruct(replicated[:2]).value,
    }
    if args.n >= 4:
        body["vss_reconstruct"] = vss_reconstruct(replicated).value
    _emit(args, body)
    return EXIT_OK


# -- parsing ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="maurer-mpc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, trials=False):
        p.add_argument("--config", help="JSON file whose keys provide defaults for the flags")
        p.add_argument("--n", type=int)
        p.add_argument("--m", type=int)
        p.add_argument("--advid", type=int)
        p.add_argument("--circuit", help="circuit file or built-in name (sum, mul)")
        p.add_argument("--inputs", help="comma-separated inputs, one per party")
        p.add_argument("--strategy", help="adversary strategy, e.g. honest or input-substitution:2")
        p.add_argument("--seed", type=int)
        p.add_argument("--tape", help="explicit comma-separated random tape (overrides --seed)")
        p.add_argument("--out", help="also write the JSON result to this file")
        if trials:
            p.add_argument("--trials", type=int)
            p.add_argument("--jobs", type=int)

    run = sub.add_parser("run", help="execute the protocol once")
    common(run)
    run.set_defaults(func=cmd_run)

    check = sub.add_parser("check", help="run one of the security checks")
    check.add_argument("what", choices=["correctness", "output-sim", "ni-exact", "ni-sampled", "secrecy"])
    common(check, trials=True)
    check.add_argument("--inputs-a", dest="inputs_a")
    check.add_argument("--inputs-b", dest="inputs_b")
    check.add_argument("--alpha", type=float)
    check.add_argument("--pairs", type=int, help="Bonferroni factor for the significance threshold")
    check.add_argument("--tv-max", dest="tv_max", type=float)
    check.set_defaults(func=cmd_check)

    demo = sub.add_parser("demo-share", help="share a secret and reconstruct it")
    demo.add_argument("--s", type=int, required=True)
    demo.add_argument("--n", type=int, default=4)
    demo.add_argument("--m", type=int, default=5)
    demo.add_argument("--seed", type=int, default=0)
    demo.add_argument("--tape")
    demo.add_argument("--out")
    demo.set_defaults(func=cmd_demo_share)
    return parser


def _merge(args) -> None:
    given = {k for k, v in vars(args).items() if v is not None}
    if getattr(args, "config", None):
        try:
            extra = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        for key, value in extra.items():
            key = key.replace("-", "_")
            if getattr(args, key, None) is None:
                setattr(args, key, value)
                given.add(key)
    args.strategy_given = "strategy" in given
    args.advid_given = "advid" in given
    for key, value in DEFAULTS.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)
    for key in ("inputs", "tape", "circuit", "out", "inputs_a", "inputs_b"):
        if not hasattr(args, key):
            setattr(args, key, None)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _merge(args)
        return args.func(args)
    except (UsageError, MPCError, ValueError, OSError) as exc:
        kind = "budget" if isinstance(exc, BudgetExceeded) else type(exc).__name__
        print(f"error ({kind}): {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
