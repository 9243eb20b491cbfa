"""Command-line front end.

Subcommands::

    query            run one transaction, print the retrieved bit + verdict
    user-privacy     Monte Carlo D1 catch rate vs the exact oracle
    data-privacy     partition-game catch rate vs the closed formula
    delay-sweep      write the detector-probability-vs-delay CSV
    demo-transcript  write a line-JSON transcript of K transactions

Exit codes: 0 success, 1 malformed configuration, 2 domain violation,
3 I/O failure.  Artifacts embed their resolved configuration and are
byte-identical for identical arguments and seed.  Relative output paths
resolve against $QPQ_OUTPUT_DIR when set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import analysis
from .adversaries import parse_strategy, strategy_label
from .core import DomainError, PreconditionError
from .protocol import (
    DatabaseConfig,
    Ordering,
    SpatialModeEncoding,
    TimeSlotEncoding,
    TransactionPolicy,
    encode_channel,
    run_transaction,
    to_transcript,
)
from .seeding import trial_rng

_DB_SEED_TAG = 0xD0B  # keeps random-db draws off the trial streams


class UsageError(Exception):
    """Malformed command line or config value."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parse_db(text: str, seed: int) -> DatabaseConfig:
    if text.startswith("random:"):
        try:
            n = int(text.split(":", 1)[1])
        except ValueError as err:
            raise UsageError(f"bad --db {text!r}: {err}") from err
        return DatabaseConfig.random(n, trial_rng(seed, _DB_SEED_TAG))
    try:
        bits = tuple(int(b) for b in text.split(","))
    except ValueError as err:
        raise UsageError(f"bad --db {text!r}: {err}") from err
    return DatabaseConfig(bits)


def _parse_policy(name: str, guess) -> TransactionPolicy:
    ordering = {
        "random": None,
        "plain-first": Ordering.PLAIN_FIRST,
        "superposed-first": Ordering.SUPERPOSED_FIRST,
    }[name]
    return TransactionPolicy(ordering=ordering, guess=guess)


def _parse_encoding(text: str, n: int):
    if text == "spatial":
        return SpatialModeEncoding(n)
    if text.startswith("timeslot:"):
        try:
            slot = float(text.split(":", 1)[1])
        except ValueError as err:
            raise UsageError(f"bad --encoding {text!r}: {err}") from err
        return TimeSlotEncoding(n, slot)
    raise UsageError(f"bad --encoding {text!r}: expected 'spatial' or 'timeslot:DT'")


def _parse_strategy(text: str):
    try:
        return parse_strategy(text)
    except DomainError as err:
        raise UsageError(str(err)) from err


def _resolve_output(path: str | None) -> str | None:
    if path is None:
        return None
    base = os.environ.get("QPQ_OUTPUT_DIR")
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _add_transaction_args(p: _Parser, *, seed_required: bool = True) -> None:
    p.add_argument("--db", default="0,1,0", help="bits '0,1,0' or 'random:N'")
    p.add_argument("--j", type=int, default=1, help="database index to query")
    p.add_argument("--strategy", default="honest", help="honest | mr:PICK | dephase:G | delay:TAU,SIGMA")
    p.add_argument(
        "--policy",
        choices=["random", "plain-first", "superposed-first"],
        default="random",
        help="query ordering",
    )
    p.add_argument("--guess", type=int, choices=[0, 1], default=None, help="force the stand-in guess")
    p.add_argument("--seed", type=int, required=seed_required)
    p.add_argument("--output", default=None, help="artifact path")
    p.add_argument("--encoding", default="spatial", help="'spatial' or 'timeslot:DT'")


def cmd_query(args) -> None:
    db = _parse_db(args.db, args.seed)
    strategy = _parse_strategy(args.strategy)
    policy = _parse_policy(args.policy, args.guess)
    encoding = _parse_encoding(args.encoding, db.n)
    outcome = run_transaction(db, args.j, strategy, policy, trial_rng(args.seed, 0))
    channel = encode_channel(encoding, args.j)
    print(
        f"retrieved_bit={outcome.retrieved_bit} verdict={outcome.verdict.value}"
        f" ordering={outcome.ordering.value} channel={channel!r}"
    )


def cmd_user_privacy(args) -> None:
    db = _parse_db(args.db, args.seed)
    strategy = _parse_strategy(args.strategy)
    policy = _parse_policy(args.policy, args.guess)
    est = analysis.estimate_user_privacy_catch(
        db, args.j, strategy, policy, args.trials, args.seed, threads=args.threads
    )
    oracle = "n/a" if est.exact is None else f"{est.exact} ({float(est.exact)!r})"
    print(f"p_hat={est.p_hat!r} stderr={est.stderr!r} trials={est.trials} oracle={oracle}")
    output = _resolve_output(args.output)
    if output:
        config = _resolved_config(args, command="user-privacy", db=db)
        scenario = f"{strategy_label(strategy)}|{args.policy}"
        analysis.write_estimates_csv(output, [(scenario, est, args.seed)], config)
        print(f"wrote {output}")


def cmd_data_privacy(args) -> None:
    config = analysis.PartitionGameConfig(
        n=args.n,
        x_parts=args.x_parts,
        t=args.t,
        trials=args.trials,
        seed=args.seed,
        target_j=args.target,
        finite_n=args.finite_n,
    )
    est = analysis.simulate_data_privacy_game(config)
    formula = analysis.data_privacy_formula(args.x_parts, args.t)
    print(
        f"p_hat={est.p_hat!r} stderr={est.stderr!r} trials={est.trials}"
        f" formula={formula!r}"
    )
    output = _resolve_output(args.output)
    if output:
        cfg = {
            "command": "data-privacy",
            "N": args.n,
            "X": args.x_parts,
            "t": args.t,
            "trials": args.trials,
            "seed": args.seed,
            "target": args.target,
            "finite_n": args.finite_n,
        }
        scenario = f"partition:X={args.x_parts},t={args.t}"
        analysis.write_estimates_csv(output, [(scenario, est, args.seed)], cfg)
        print(f"wrote {output}")


def cmd_delay_sweep(args) -> None:
    db = _parse_db(args.db, args.seed)
    sigma = args.sigma
    tau_max = args.tau_max if args.tau_max is not None else 8.0 * sigma
    if args.points < 2:
        raise DomainError("need at least two sweep points")
    taus = [tau_max * k / (args.points - 1) for k in range(args.points)]
    rows = analysis.delay_sweep(taus, sigma, db, args.j)
    output = _resolve_output(args.output)
    config = {
        "command": "delay-sweep",
        "db": list(db.bits),
        "j": args.j,
        "sigma": sigma,
        "tau_max": tau_max,
        "points": args.points,
        "seed": args.seed,
    }
    analysis.write_sweep_csv(output, rows, config)
    print(f"wrote {output}")


def cmd_demo_transcript(args) -> None:
    db = _parse_db(args.db, args.seed)
    strategy = _parse_strategy(args.strategy)
    policy = _parse_policy(args.policy, args.guess)
    encoding = _parse_encoding(args.encoding, db.n)
    config = _resolved_config(args, command="demo-transcript", db=db)
    config["transactions"] = args.transactions
    config["channel"] = encode_channel(encoding, args.j)
    output = _resolve_output(args.output)
    if output is None:
        raise UsageError("demo-transcript needs --output")
    lines = [json.dumps({"config": config}, sort_keys=True)]
    for k in range(args.transactions):
        outcome = run_transaction(db, args.j, strategy, policy, trial_rng(args.seed, k))
        record = to_transcript(outcome, seed=args.seed, j=args.j, strategy=strategy)
        record["trial"] = k
        record["bob_info"] = outcome.bob_info.to_list()
        lines.append(json.dumps(record, sort_keys=True))
    with open(output, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {output}")


def _resolved_config(args, *, command: str, db: DatabaseConfig) -> dict:
    return {
        "command": command,
        "db": list(db.bits),
        "j": args.j,
        "strategy": args.strategy,
        "policy": args.policy,
        "guess": args.guess,
        "trials": getattr(args, "trials", None),
        "seed": args.seed,
        "encoding": args.encoding,
    }


def build_parser() -> _Parser:
    parser = _Parser(prog="qpq", description="Linear-optics private query simulator")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("query", help="run a single transaction")
    _add_transaction_args(p)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("user-privacy", help="estimate the D1 catch probability")
    _add_transaction_args(p)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_user_privacy)

    p = sub.add_parser("data-privacy", help="run the partition game")
    p.add_argument("--X", dest="x_parts", type=int, required=True, help="number of parts")
    p.add_argument("--t", type=int, required=True, help="photons per signal")
    p.add_argument("--N", dest="n", type=int, default=8, help="database size")
    p.add_argument("--target", type=int, default=1, help="Alice's genuine query index")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--finite-n", action="store_true", help="sample explicit equal partitions")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_data_privacy)

    p = sub.add_parser("delay-sweep", help="detector probabilities vs tap delay")
    p.add_argument("--db", default="0,1,0")
    p.add_argument("--j", type=int, default=1)
    p.add_argument("--sigma", type=float, default=1.0, help="photon coherence time")
    p.add_argument("--tau-max", type=float, default=None, help="largest delay (default 8 sigma)")
    p.add_argument("--points", type=int, default=50)
    p.add_argument("--seed", type=int, default=0, help="used only for --db random:N")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_delay_sweep)

    p = sub.add_parser("demo-transcript", help="line-JSON transcript of K transactions")
    _add_transaction_args(p)
    p.add_argument("--transactions", type=int, default=10)
    p.set_defaults(func=cmd_demo_transcript)

    return parser


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.func(args)
    except UsageError as err:
        print(f"qpq: config error: {err}", file=sys.stderr)
        return 1
    except (DomainError, PreconditionError) as err:
        print(f"qpq: domain error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"qpq: i/o error: {err}", file=sys.stderr)
        return 3
    return 0


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
