"""Command line entry points.

Subcommands:

  verify       exact dyadic-recovery checks for target probabilities
  sample       Monte Carlo run of one dichotomic model
  sphere       qubit cross-check: Born value, chord model, dyadic sums, sampling
  history      probabilities, sampling and trajectory for a named history
  parse-check  parse and elaborate an experiment file

Reports go to stdout as CSV (default) or JSON carrying identical values;
diagnostics go to stderr. Exit codes: 0 success, 1 a quantitative check
failed, 2 usage, domain, parse or elaboration error. With a fixed seed the
output is byte-identical across runs once the timestamp line is disabled
with --no-timestamp.

History JSON schema used in reports and parse-check output:
  {"name": str, "times": [float, ...], "projectors": [str, ...]}
where projector entries are declaration names from the experiment file.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass
from datetime import datetime, timezone

from .dichotomic import (
    BlochVector,
    DyadicRule,
    bloch_of_qubit,
    continuous_probability,
    diagonal_coordinate,
    qubit_from_angles,
)
from .edl import ElaborationError, Experiment, ParseError, elaborate, parse_bytes
from .errors import HmsimError
from .hilbert import Projector, born_probability, vector_to_json
from .histories import (
    Convention,
    HistoryOutcome,
    HomogeneousHistory,
    InhomogeneousHistory,
    history_probability,
    inhomogeneous_probability,
    trajectory,
)
from .rng import RandomSource
from .sampler import Model, exact_check, run_dichotomic, run_history

Z_THRESHOLD = 4.0

VERIFY_COLUMNS = ["target", "rule", "P", "L", "partial_sum", "abs_error",
                  "bound_satisfied", "tail_mass"]
SAMPLE_COLUMNS = ["model", "value", "n_trials", "count_alpha", "frequency",
                  "expected_p", "z_score"]
SPHERE_COLUMNS = ["theta", "L", "born_p", "continuous_p", "greedy_partial_sum",
                  "geometric_partial_sum", "n_trials",
                  "continuous_freq", "continuous_z",
                  "greedy_freq", "greedy_z",
                  "geometric_freq", "geometric_z"]
HISTORY_COLUMNS = ["name", "branch", "lueders_p", "literal_p", "n_trials",
                   "lueders_freq", "lueders_z", "literal_freq", "literal_z",
                   "trajectory"]


@dataclass
class RunConfig:
    subcommand: str
    input_path: str | None = None
    seed: int = 0
    trials: int = 10**5
    lambda_max: int = 60
    level: int = 40          # enumeration depth L
    convention: Convention = Convention.LUEDERS
    format: str = "csv"
    timestamp: bool = True


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def emit_report(command: str, columns: list[str], rows: list[dict], config: RunConfig,
                out=None) -> None:
    out = out or sys.stdout
    if config.format == "csv":
        if config.timestamp:
            out.write(f"# generated {datetime.now(timezone.utc).isoformat()}\n")
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_csv_cell(row.get(c)) for c in columns])
    else:
        doc: dict = {"command": command}
        if config.timestamp:
            doc["timestamp"] = datetime.now(timezone.utc).isoformat()
        doc["rows"] = [{c: row.get(c) for c in columns} for row in rows]
        json.dump(doc, out, indent=2)
        out.write("\n")


def _read_input(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _load_experiment(path: str) -> Experiment:
    return elaborate(parse_bytes(_read_input(path)))


def _history_fits_state(exp: Experiment, name: str, state_space: str) -> bool:
    hist = exp.histories.get(name)
    if hist is None:
        return False
    dim = exp.spaces[state_space]
    return all(d == dim for d in hist.factor_dims)


def _verify_targets(config: RunConfig, exp: Experiment) -> list[tuple[str, float]]:
    """Every same-space (state, projector) Born value plus every matching
    (state, history) probability under the configured convention."""
    targets: list[tuple[str, float]] = []
    for sname, state in exp.states.items():
        space = exp.state_spaces[sname]
        for pname, proj in exp.projectors.items():
            if exp.projector_spaces[pname] == space:
                targets.append((f"{sname}|{pname}", born_probability(state, proj)))
        for hname, hist in exp.histories.items():
            if all(d == state.space_dim for d in hist.factor_dims):
                targets.append(
                    (f"{sname}|{hname}", history_probability(state, hist, config.convention))
                )
        for oname, ohist in exp.orhistories.items():
            if all(d == state.space_dim for d in ohist.branches[0].factor_dims):
                targets.append(
                    (f"{sname}|{oname}",
                     inhomogeneous_probability(state, ohist, config.convention))
                )
    return targets


def cmd_verify(config: RunConfig, target_p: float | None) -> int:
    if target_p is not None:
        targets = [("p", float(target_p))]
    elif config.input_path:
        targets = _verify_targets(config, _load_experiment(config.input_path))
    else:
        print("verify: provide --p or an input file", file=sys.stderr)
        return 2
    rows = []
    all_ok = True
    for label, prob in targets:
        for rule in (DyadicRule.GREEDY, DyadicRule.GEOMETRIC):
            rep = exact_check(prob, config.level, rule)
            all_ok = all_ok and rep.bound_satisfied
            rows.append({"target": label, "rule": rule.value, "P": prob, "L": config.level,
                         **rep.to_record()})
    emit_report("verify", VERIFY_COLUMNS, rows, config)
    return 0 if all_ok else 1


def cmd_sample(config: RunConfig, model: Model, value: float) -> int:
    if config.trials < 1:
        print("sample: --trials must be >= 1", file=sys.stderr)
        return 2
    rng = RandomSource(config.seed, 0)
    summary = run_dichotomic(model, value, config.trials, rng, config.lambda_max)
    rows = [{"model": model.value, "value": value, "frequency": summary.frequency,
             **summary.to_record()}]
    emit_report("sample", SAMPLE_COLUMNS, rows, config)
    return 0 if abs(summary.z_score) < Z_THRESHOLD else 1


def cmd_sphere(config: RunConfig, theta: float) -> int:
    if not 0.0 <= theta <= math.pi:
        raise HmsimError(f"theta={theta!r} outside [0, pi]")
    p = qubit_from_angles(theta)
    axis = BlochVector(0.0, 0.0, 1.0)
    proj = Projector([[1.0, 0.0], [0.0, 0.0]])
    born = born_probability(p, proj)
    t = diagonal_coordinate(bloch_of_qubit(p), axis)
    cont = continuous_probability(t)
    greedy = exact_check(born, config.level, DyadicRule.GREEDY)
    geom = exact_check(born, config.level, DyadicRule.GEOMETRIC)
    row: dict = {
        "theta": theta, "L": config.level, "born_p": born, "continuous_p": cont,
        "greedy_partial_sum": greedy.partial_sum, "geometric_partial_sum": geom.partial_sum,
        "n_trials": config.trials,
    }
    ok = abs(cont - born) <= 1e-12 and greedy.bound_satisfied and geom.bound_satisfied
    if config.trials > 0:
        runs = [
            ("continuous", Model.CONTINUOUS, t),
            ("greedy", Model.GREEDY, born),
            ("geometric", Model.GEOMETRIC, t),
        ]
        for i, (label, model, value) in enumerate(runs):
            s = run_dichotomic(model, value, config.trials, RandomSource(config.seed, i),
                               config.lambda_max)
            row[f"{label}_freq"] = s.frequency
            row[f"{label}_z"] = s.z_score
            ok = ok and abs(s.z_score) < Z_THRESHOLD
    emit_report("sphere", SPHERE_COLUMNS, [row], config)
    return 0 if ok else 1


def _trajectory_json(p, hist: HomogeneousHistory) -> str | None:
    if history_probability(p, hist, Convention.LUEDERS) <= 0.0:
        return None
    states = trajectory(p, hist, HistoryOutcome.A)
    assert states is not None
    return json.dumps([vector_to_json(s) for s in states])


def cmd_history(config: RunConfig, name: str, state_name: str) -> int:
    if not config.input_path:
        print("history: an input file is required", file=sys.stderr)
        return 2
    spec = parse_bytes(_read_input(config.input_path))
    exp = elaborate(spec)
    if state_name not in exp.states:
        print(f"history: unknown state {state_name!r}", file=sys.stderr)
        return 2
    state = exp.states[state_name]
    homogeneous = exp.histories.get(name)
    orhist = exp.orhistories.get(name)
    if homogeneous is None and orhist is None:
        print(f"history: unknown history {name!r}", file=sys.stderr)
        return 2

    def prob_pair(h) -> tuple[float, float]:
        if isinstance(h, InhomogeneousHistory):
            return (inhomogeneous_probability(state, h, Convention.LUEDERS),
                    inhomogeneous_probability(state, h, Convention.LITERAL))
        return (history_probability(state, h, Convention.LUEDERS),
                history_probability(state, h, Convention.LITERAL))

    rows = []
    ok = True
    entries: list[tuple[str, HomogeneousHistory | InhomogeneousHistory, str | None]]
    if homogeneous is not None:
        entries = [(name, homogeneous, None)]
    else:
        assert orhist is not None
        branch_names = spec.orhistories[name].branches
        entries = [(name, b, label) for label, b in zip(branch_names, orhist.branches)]
        entries.append((name, orhist, "*"))
    stream = 0
    for label, hist, branch in entries:
        lued, lit = prob_pair(hist)
        row = {"name": label, "branch": branch, "lueders_p": lued, "literal_p": lit,
               "n_trials": config.trials}
        if config.trials > 0:
            for conv in (Convention.LUEDERS, Convention.LITERAL):
                s = run_history(state, hist, conv, config.trials,
                                RandomSource(config.seed, stream), config.lambda_max)
                stream += 1
                row[f"{conv.value}_freq"] = s.frequency
                row[f"{conv.value}_z"] = s.z_score
                ok = ok and abs(s.z_score) < Z_THRESHOLD
        if isinstance(hist, HomogeneousHistory):
            row["trajectory"] = _trajectory_json(state, hist)
        rows.append(row)
    emit_report("history", HISTORY_COLUMNS, rows, config)
    return 0 if ok else 1


def cmd_parse_check(config: RunConfig) -> int:
    if not config.input_path:
        print("parse-check: an input file is required", file=sys.stderr)
        return 2
    spec = parse_bytes(_read_input(config.input_path))
    exp = elaborate(spec)
    if config.format == "json":
        doc = {
            "spaces": {n: d for n, d in exp.spaces.items()},
            "states": [{"name": n, "space": exp.state_spaces[n]} for n in exp.states],
            "projectors": [{"name": n, "space": exp.projector_spaces[n], "rank": p.rank}
                           for n, p in exp.projectors.items()],
            "histories": [
                {"name": n, "times": list(h.support.times),
                 "projectors": [ref for _, ref in spec.histories[n].steps]}
                for n, h in exp.histories.items()
            ],
            "orhistories": [{"name": n, "branches": list(spec.orhistories[n].branches)}
                            for n in exp.orhistories],
        }
        json.dump(doc, sys.stdout, indent=2)
        sys.stdout.write("\n")
    else:
        print(
            f"ok: {len(exp.spaces)} spaces, {len(exp.states)} states,"
            f" {len(exp.projectors)} projectors, {len(exp.histories)} histories,"
            f" {len(exp.orhistories)} orhistories"
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hmsim", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="PRNG seed (default 0)")
    common.add_argument("--trials", type=int, default=10**5,
                        help="Monte Carlo trials (default 100000; 0 skips sampling where allowed)")
    common.add_argument("--lambda-max", type=int, default=60, dest="lambda_max",
                        help="discrete context cap (1..60, default 60)")
    common.add_argument("--L", type=int, default=40, dest="level",
                        help="enumeration depth for dyadic sums (1..60, default 40)")
    common.add_argument("--convention", choices=["lueders", "literal"], default="lueders")
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--no-timestamp", action="store_true",
                        help="omit the timestamp for reproducible byte-level diffs")

    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_verify = sub.add_parser("verify", parents=[common],
                              help="exact dyadic recovery of target probabilities")
    p_verify.add_argument("input", nargs="?", default=None, help="EDL file ('-' for stdin)")
    p_verify.add_argument("--p", type=float, default=None, help="bare target probability")

    p_sample = sub.add_parser("sample", parents=[common],
                              help="Monte Carlo run of one dichotomic model")
    p_sample.add_argument("--model", choices=["continuous", "greedy", "geometric"],
                          required=True)
    p_sample.add_argument("--p", type=float, default=None,
                          help="target probability (greedy model)")
    p_sample.add_argument("--t", type=float, default=None,
                          help="chord coordinate (continuous/geometric models)")

    p_sphere = sub.add_parser("sphere", parents=[common], help="qubit model cross-check")
    p_sphere.add_argument("--theta", type=float, required=True,
                          help="polar angle against the measurement axis, radians")

    p_history = sub.add_parser("history", parents=[common],
                               help="report on a named history from an EDL file")
    p_history.add_argument("input", help="EDL file ('-' for stdin)")
    p_history.add_argument("--name", required=True)
    p_history.add_argument("--state", required=True)

    p_check = sub.add_parser("parse-check", parents=[common],
                             help="parse and elaborate an EDL file")
    p_check.add_argument("input", help="EDL file ('-' for stdin)")

    return parser


def _make_config(args: argparse.Namespace) -> RunConfig:
    config = RunConfig(
        subcommand=args.subcommand,
        input_path=getattr(args, "input", None),
        seed=args.seed,
        trials=args.trials,
        lambda_max=args.lambda_max,
        level=args.level,
        convention=Convention(args.convention),
        format=args.format,
        timestamp=not args.no_timestamp,
    )
    if not 0 <= config.seed < 2**64:
        raise HmsimError("--seed must be in [0, 2**64)")
    if config.trials < 0:
        raise HmsimError("--trials must be >= 0")
    if not 1 <= config.level <= 60:
        raise HmsimError("--L must be in 1..60")
    if not 1 <= config.lambda_max <= 60:
        raise HmsimError("--lambda-max must be in 1..60")
    return config


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = _make_config(args)
        if args.subcommand == "verify":
            return cmd_verify(config, args.p)
        if args.subcommand == "sample":
            model = Model(args.model)
            value = args.p if model is Model.GREEDY else args.t
            if value is None:
                print("sample: provide --p for greedy or --t for continuous/geometric",
                      file=sys.stderr)
                return 2
            return cmd_sample(config, model, value)
        if args.subcommand == "sphere":
            return cmd_sphere(config, args.theta)
        if args.subcommand == "history":
            return cmd_history(config, args.name, args.state)
        if args.subcommand == "parse-check":
            return cmd_parse_check(config)
        print(f"unknown subcommand {args.subcommand!r}", file=sys.stderr)
        return 2
    except (ParseError, ElaborationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except HmsimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
