"""Command-line entry point: every workflow as a reproducible subcommand.

Primary outputs are delimited rows under a `#` header block carrying the
version, seed, and parameters, so a rerun with the same arguments and seed
is byte-identical.  Exit codes: 0 success, 1 domain error, 2 usage error.
"""
from __future__ import annotations

import argparse
import sys
from datetime import datetime, timedelta, timezone
from pathlib import Path

from .errors import PrivlinkError

# fixed base for the gate's logical clock: audit timestamps must be
# reproducible, so wall time never enters a CLI run
CLOCK_EPOCH = datetime(2000, 1, 1, tzinfo=timezone.utc)


def make_logical_clock(start: datetime = CLOCK_EPOCH):
    """Monotone fake clock: one second per call."""
    state = {"n": 0}

    def clock() -> datetime:
        t = start + timedelta(seconds=state["n"])
        state["n"] += 1
        return t

    return clock


def _require_files(*paths: str) -> None:
    for p in paths:
        if p and p != "-" and not Path(p).exists():
            raise PrivlinkError(f"input path does not exist: {p}")


def _read_items(path: str) -> list[bytes]:
    _require_files(path)
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return [line.encode("utf-8") for line in lines if line]


def _cmd_synth(args) -> int:
    from .corpus.io import write_table, write_truth
    from .corpus.synth import DEFAULT_SCHEMA, ErrorProfile, generate_pairs

    profile = ErrorProfile(
        field_error_rate=args.error_rate, missing_rate=args.missing_rate
    )
    file_a, file_b, truth = generate_pairs(args.n, args.overlap, profile, args.seed)
    write_table(args.out_a, DEFAULT_SCHEMA, file_a)
    write_table(args.out_b, DEFAULT_SCHEMA, file_b)
    write_truth(args.out_truth, set(truth.pairs))
    return 0


def _cmd_link(args) -> int:
    from .config import load_features
    from .corpus.io import load_table, load_truth
    from .corpus.synth import DEFAULT_SCHEMA
    from .linkage.engine import LinkConfig, link
    from .report import open_out, write_header, write_link_report

    _require_files(args.file_a, args.file_b, args.config)
    specs, mu, lam, block_field = load_features(args.config)
    file_a = load_table(args.file_a, DEFAULT_SCHEMA)
    file_b = load_table(args.file_b, DEFAULT_SCHEMA)
    truth = None
    if args.truth:
        _require_files(args.truth)
        truth = load_truth(args.truth)
    config = LinkConfig(
        specs=specs, mu=mu, lam=lam, block_field=block_field, schema=DEFAULT_SCHEMA
    )
    result = link(file_a, file_b, config)
    with open_out(args.out) as fh:
        write_header(
            fh,
            "link",
            args.seed,
            {
                "file_a": args.file_a,
                "file_b": args.file_b,
                "mu": mu,
                "lambda": lam,
                "block": block_field or "",
            },
        )
        write_link_report(fh, result, truth)
    return 0


def _cmd_baseline(args) -> int:
    from .baseline import exact_match_moments, pmf_table
    from .report import open_out, write_header, write_rows

    pmf = pmf_table(args.n)
    mean, var = exact_match_moments(args.n)
    with open_out(args.out) as fh:
        write_header(fh, "baseline", args.seed, {"n": args.n})
        fh.write(f"# mean: {mean!r}\n")
        fh.write(f"# variance: {var!r}\n")
        write_rows(fh, ["r", "probability"], ((r, repr(p)) for r, p in enumerate(pmf)))
    return 0


def _load_params(args):
    from .config import load_kv
    from .privmatch.group import DomainParams, derive_group

    if args.params:
        _require_files(args.params)
        kv = load_kv(args.params)
        try:
            p, q = int(kv["p"]), int(kv["q"])
        except KeyError as exc:
            raise PrivlinkError(f"params file must define p and q: missing {exc}")
        return DomainParams(p=p, q=q, bits=p.bit_length())
    return derive_group(args.bits, b"params:%d" % args.seed)


def _cmd_pmatch(args) -> int:
    from .privmatch.group import MIN_MODULUS_BITS
    from .privmatch.protocol import ProtocolConfig, run_initiator, run_responder, run_intersection
    from .privmatch.transport import connect_endpoint, listen_endpoint
    from .report import open_out, write_header, write_rows

    params = _load_params(args)
    if params.is_toy and not args.allow_toy:
        raise PrivlinkError(
            f"{params.bits}-bit modulus is below {MIN_MODULUS_BITS}; pass --allow-toy for tests"
        )
    config = ProtocolConfig(
        seed=args.seed,
        honest_result=not args.withhold_result,
        shuffle=not args.no_shuffle,
        allow_toy=args.allow_toy,
    )
    meta = {"bits": params.bits, "mode": "", "role": args.role or ""}

    if args.demo:
        return _run_demo(args, params, meta)

    if args.listen:
        if not args.items:
            raise PrivlinkError("responder needs --items")
        host, port = _host_port(args.listen)
        items = _read_items(args.items)
        endpoint, _ = listen_endpoint(host, port)
        try:
            state = run_responder(items, params, endpoint, config)
        finally:
            endpoint.close()
        with open_out(args.out) as fh:
            meta["mode"] = "listen"
            write_header(fh, "pmatch", args.seed, meta)
            learned = state.learned if state.learned is not None else ()
            fh.write(f"# result_received: {state.learned is not None}\n")
            write_rows(fh, ["item"], ([i.decode("utf-8", "replace")] for i in learned))
        return 0

    if args.connect:
        if not args.items:
            raise PrivlinkError("initiator needs --items")
        host, port = _host_port(args.connect)
        items = _read_items(args.items)
        endpoint = connect_endpoint(host, port)
        try:
            result = run_initiator(items, params, endpoint, config)
        finally:
            endpoint.close()
        with open_out(args.out) as fh:
            meta["mode"] = "connect"
            write_header(fh, "pmatch", args.seed, meta)
            write_rows(
                fh, ["item"], ([i.decode("utf-8", "replace")] for i in result.intersection)
            )
        return 0

    # loopback: both lists in one process
    if not args.items or not args.items_b:
        raise PrivlinkError("loopback mode needs --items and --items-b")
    result = run_intersection(
        _read_items(args.items), _read_items(args.items_b), params, config
    )
    with open_out(args.out) as fh:
        meta["mode"] = "loopback"
        write_header(fh, "pmatch", args.seed, meta)
        write_rows(
            fh, ["item"], ([i.decode("utf-8", "replace")] for i in result.intersection)
        )
    return 0


def _run_demo(args, params, meta) -> int:
    from .privmatch.exploits import demo_asymmetry, demo_inflation
    from .report import open_out, write_header, write_rows

    if not args.items_b:
        raise PrivlinkError("demos need --items-b (the responder's list)")
    list_b = _read_items(args.items_b)
    meta["mode"] = f"demo-{args.demo}"
    if args.demo == "asymmetry":
        if not args.items:
            raise PrivlinkError("asymmetry demo needs --items")
        report = demo_asymmetry(
            _read_items(args.items), list_b, params, args.seed, allow_toy=args.allow_toy
        )
        rows = [
            ("initiator_learned_count", len(report.initiator_learned)),
            ("responder_learned_count", len(report.responder_learned)),
            ("result_withheld", report.result_withheld),
        ]
        rows.extend((f"observed_{k}", v) for k, v in sorted(report.responder_observed.items()))
    else:
        if not args.dict:
            raise PrivlinkError("inflation demo needs --dict")
        report = demo_inflation(
            _read_items(args.dict), list_b, params, args.seed, allow_toy=args.allow_toy
        )
        rows = [
            ("dictionary_size", report.dictionary_size),
            ("responder_size", report.responder_size),
            ("learned_count", len(report.learned)),
        ]
        rows.extend(
            ("learned_item", item.decode("utf-8", "replace")) for item in report.learned
        )
    with open_out(args.out) as fh:
        write_header(fh, "pmatch", args.seed, meta)
        write_rows(fh, ["key", "value"], rows)
    return 0


def _host_port(text: str) -> tuple[str, int]:
    host, sep, port = text.rpartition(":")
    if not sep or not port.isdigit():
        raise PrivlinkError(f"expected host:port, got {text!r}")
    return host or "127.0.0.1", int(port)


def _columns_arg(args) -> list[str] | None:
    return args.columns.split(",") if args.columns else None


def _cmd_anonymize(args) -> int:
    from .disclosure.metrics import ReleasePlan, reident_risk, utility_loss_complement
    from .disclosure.tables import load_microtable
    from .report import open_out, write_header, write_rows

    _require_files(args.input)
    table = load_microtable(args.input, _columns_arg(args))
    if args.method == "microaggregate":
        if args.k is None:
            raise PrivlinkError("microaggregate needs --k")
        plan = ReleasePlan.microaggregation(args.k, args.stat)
        params = {"method": "microaggregate", "k": args.k, "stat": args.stat}
    else:
        if args.lam is None:
            raise PrivlinkError("noise needs --lambda")
        plan = ReleasePlan.noise(args.lam, args.seed)
        params = {"method": "noise", "lambda": args.lam}
    released = plan.apply(table)
    risk = reident_risk(table, released)
    utility = utility_loss_complement(table, released)
    with open_out(args.out) as fh:
        write_header(fh, "anonymize", args.seed, params)
        fh.write(f"# risk: {risk!r}\n")
        fh.write(f"# utility: {utility!r}\n")
        write_rows(
            fh,
            ["id", *released.columns],
            (
                (rid, *(repr(float(v)) for v in released.values[i]))
                for i, rid in enumerate(released.ids)
            ),
        )
    return 0


def _cmd_rumap(args) -> int:
    from .disclosure.metrics import ru_sweep
    from .disclosure.tables import load_microtable
    from .report import open_out, write_header, write_rows

    _require_files(args.input)
    table = load_microtable(args.input, _columns_arg(args))
    grid = [float(g) for g in args.grid.split(",") if g]
    if args.method == "microaggregate":
        grid = [int(g) for g in grid]
    points = ru_sweep(table, args.method, grid, stat=args.stat, seed=args.seed)
    with open_out(args.out) as fh:
        write_header(
            fh, "rumap", args.seed, {"method": args.method, "grid": args.grid}
        )
        write_rows(
            fh,
            ["param", "risk", "utility"],
            ((repr(p.param), repr(p.risk), repr(p.utility)) for p in points),
        )
    return 0


def _cmd_gate(args) -> int:
    from .config import load_policy
    from .disclosure.audit import AuditLog, save_audit_log
    from .disclosure.gate import GateRefusal, replay_queries
    from .disclosure.tables import load_microtable
    from .report import open_out, write_header, write_rows

    _require_files(args.input, args.policy, args.queries)
    table = load_microtable(args.input, _columns_arg(args))
    policy = load_policy(args.policy)
    try:
        level = policy.lookup(args.level)
    except KeyError as exc:
        raise PrivlinkError(str(exc))
    queries = [
        line
        for line in Path(args.queries).read_text(encoding="utf-8").splitlines()
        if line.strip() and not line.startswith("#")
    ]
    log = AuditLog()
    decisions = replay_queries(
        queries, level, policy, table, log, actor=args.actor, clock=make_logical_clock()
    )
    save_audit_log(args.audit_out, log)
    rows = []
    for i, decision in enumerate(decisions):
        if isinstance(decision, GateRefusal):
            rows.append((i, "refused", decision.reason, "", ""))
        else:
            rows.append(
                (i, "released", "", repr(decision.measured_risk), decision.count)
            )
    with open_out(args.out) as fh:
        write_header(
            fh,
            "gate",
            args.seed,
            {"level": args.level, "policy": args.policy, "actor": args.actor},
        )
        write_rows(fh, ["query", "decision", "reason", "risk", "count"], rows)
    return 0


def _cmd_audit_verify(args) -> int:
    from .disclosure.audit import verify_file

    _require_files(args.log)
    ok, failing_seq, reason = verify_file(args.log)
    if ok:
        print(f"verify: OK ({reason})")
        return 0
    where = "?" if failing_seq is None else failing_seq
    print(f"verify: FAIL seq={where} {reason}")
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="privlink",
        description="Record linkage, private matching, and disclosure limitation.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("synth", help="generate a synthetic linked file pair")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--overlap", type=float, default=1.0)
    p.add_argument("--error-rate", type=float, default=0.0)
    p.add_argument("--missing-rate", type=float, default=0.0)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-a", required=True)
    p.add_argument("--out-b", required=True)
    p.add_argument("--out-truth", required=True)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("link", help="link two record files")
    p.add_argument("--file-a", required=True)
    p.add_argument("--file-b", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--truth")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_link)

    p = sub.add_parser("baseline", help="random-permutation match distribution")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_baseline)

    p = sub.add_parser("pmatch", help="private set intersection")
    p.add_argument("--role", choices=["initiator", "responder"])
    p.add_argument("--listen")
    p.add_argument("--connect")
    p.add_argument("--items")
    p.add_argument("--items-b")
    p.add_argument("--dict")
    p.add_argument("--demo", choices=["asymmetry", "inflation"])
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--bits", type=int, default=256)
    p.add_argument("--params")
    p.add_argument("--allow-toy", action="store_true")
    p.add_argument("--withhold-result", action="store_true")
    p.add_argument("--no-shuffle", action="store_true")
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_pmatch)

    p = sub.add_parser("anonymize", help="release a table through one method")
    p.add_argument("--input", required=True)
    p.add_argument("--columns")
    p.add_argument("--method", choices=["microaggregate", "noise"], required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--stat", choices=["mean", "sum"], default="mean")
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_anonymize)

    p = sub.add_parser("rumap", help="risk-utility sweep rows")
    p.add_argument("--input", required=True)
    p.add_argument("--columns")
    p.add_argument("--method", choices=["microaggregate", "noise"], required=True)
    p.add_argument("--grid", required=True)
    p.add_argument("--stat", choices=["mean", "sum"], default="mean")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_rumap)

    p = sub.add_parser("gate", help="replay a query log through the policy gate")
    p.add_argument("--input", required=True)
    p.add_argument("--columns")
    p.add_argument("--policy", required=True)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--actor", default="analyst")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default="-")
    p.add_argument("--audit-out", required=True)
    p.set_defaults(func=_cmd_gate)

    p = sub.add_parser("audit-verify", help="verify an audit log file")
    p.add_argument("--log", required=True)
    p.set_defaults(func=_cmd_audit_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PrivlinkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
