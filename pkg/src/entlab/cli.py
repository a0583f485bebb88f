"""Command-line front end: state files, subcommand dispatch, deterministic
seeding, and machine-readable JSON/CSV outputs."""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import asdict, is_dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import assisted, decoupling, entropy, protocols, qcore, regions, typicality

SEED_ENV = "ENTLAB_SEED"


def default_seed() -> int:
    env = os.environ.get(SEED_ENV)
    return int(env, 0) if env else qcore.DEFAULT_SEED


def parse_state_file(path: str | Path) -> qcore.LabeledState:
    """Load a StateSpec JSON file and delegate to the state constructors."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            spec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise qcore.StateError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    try:
        return qcore.build_state(spec)
    except (KeyError, TypeError) as exc:
        raise qcore.StateError(f"{path}: malformed StateSpec ({exc})") from exc


def _round_floats(obj, digits: int = 12):
    """Round floats to a fixed significant-digit budget for byte-stable output."""
    if isinstance(obj, float):
        return float(f"{obj:.{digits}g}")
    if isinstance(obj, Fraction):
        return {"numerator": obj.numerator, "denominator": obj.denominator}
    if isinstance(obj, np.floating):
        return _round_floats(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return _round_floats(obj.tolist())
    if isinstance(obj, dict):
        return {str(k): _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    if is_dataclass(obj) and not isinstance(obj, type):
        return _round_floats(asdict(obj))
    return obj


def emit_json(payload: dict, out_path: str | None) -> None:
    text = json.dumps(_round_floats(payload), indent=2, sort_keys=True) + "\n"
    if out_path:
        tmp = Path(out_path).with_suffix(".tmp")
        tmp.write_text(text, encoding="utf-8")
        tmp.replace(out_path)
    else:
        sys.stdout.write(text)


def emit_csv(rows: list[dict], out_path: str) -> None:
    fields = list(rows[0].keys()) if rows else []
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _format_cell(v) for k, v in row.items()})


def _format_cell(value):
    if isinstance(value, float):
        return f"{value:.12g}"
    return value


def _split_labels(arg: str) -> list[str]:
    return [x for x in arg.replace("|", ",").split(",") if x]


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_entropy(args) -> int:
    state = parse_state_file(args.state)
    left, _, right = args.split.partition("|")
    left_labels = _split_labels(left)
    right_labels = _split_labels(right)
    want = args.quantity
    payload: dict = {"state": str(args.state), "split": args.split}
    if want in ("svn", "all"):
        payload["entropy_left"] = entropy.von_neumann(state, left_labels)
        payload["entropy_right"] = entropy.von_neumann(state, right_labels)
    if want in ("cond", "all"):
        payload["conditional"] = entropy.conditional_entropy(state, left_labels, right_labels)
    if want in ("coh", "all"):
        payload["coherent"] = entropy.coherent_information(state, left_labels, right_labels)
    if want in ("hmin", "h2", "all"):
        sigma = _resolve_sigma(args.sigma, state, right_labels)
        joint = qcore.partial_trace(state, left_labels + right_labels)
        if want in ("hmin", "all"):
            payload["hmin"] = entropy.min_entropy_relative(joint, sigma)
        if want in ("h2", "all"):
            payload["h2"] = entropy.collision_entropy(joint, sigma)
    if want in ("hmax", "all"):
        joint = qcore.partial_trace(state, left_labels + right_labels)
        payload["hmax"] = entropy.conditional_max_entropy(joint, right_labels)
    if want in ("h0", "all"):
        payload["h0"] = entropy.zero_entropy(state, left_labels)
    if args.csv:
        emit_csv([payload], args.csv)
    emit_json(payload, args.out)
    return 0


def _resolve_sigma(arg: str, state: qcore.LabeledState, right_labels: list[str]) -> qcore.LabeledState:
    if arg == "marginal":
        return qcore.partial_trace(state, right_labels)
    loaded = parse_state_file(arg)
    return loaded


def cmd_region(args) -> int:
    state = parse_state_file(args.state)
    senders = _split_labels(args.senders)
    payload: dict = {"mode": args.mode}
    if args.mode == "merge":
        region = regions.merging_rate_region(state, senders, _split_labels(args.receiver))
    elif args.mode == "cost":
        region = regions.one_shot_cost_region(state, senders, _split_labels(args.reference), args.eps)
    elif args.mode == "split":
        t_side = _split_labels(args.cut)
        tbar_side = [x for x in senders if x not in t_side]
        region_t, region_tbar = regions.split_transfer_region(
            state, t_side, tbar_side, _split_labels(args.receiver), _split_labels(args.receiver_b)
        )
        payload["region_T"] = _region_payload(region_t)
        payload["region_Tbar"] = _region_payload(region_tbar)
        emit_json(payload, args.out)
        return 0
    elif args.mode == "seq":
        ordering = _split_labels(args.ordering)
        entries = regions.sequential_cost(state, ordering, _split_labels(args.reference), args.eps)
        payload["sequential"] = [asdict(e) for e in entries]
        emit_json(payload, args.out)
        return 0
    else:
        raise SystemExit(f"unknown mode {args.mode!r}")
    payload["region"] = _region_payload(region)
    if args.point:
        point = [float(x) for x in args.point.split(",")]
        verdict = regions.region_membership(region, point)
        payload["membership"] = {
            "point": point,
            "verdict": verdict.verdict,
            "violated": [list(region.subset_labels(m)) for m in verdict.violated],
            "tight": [list(region.subset_labels(m)) for m in verdict.tight],
        }
    if args.csv:
        rows = [
            {"bitmask": mask, "subset": "+".join(region.subset_labels(mask)), "rhs": rhs}
            for mask, rhs in region.constraints
        ]
        emit_csv(rows, args.csv)
    emit_json(payload, args.out)
    return 0


def _region_payload(region: regions.RegionSpec) -> dict:
    return {
        "parties": list(region.parties),
        "kind": region.kind,
        "constraints": [
            {"bitmask": mask, "subset": "+".join(region.subset_labels(mask)), "rhs": rhs}
            for mask, rhs in region.constraints
        ],
    }


def _parse_senders(arg: str, state: qcore.LabeledState) -> list[decoupling.SenderSpec]:
    out = []
    for chunk in arg.split(","):
        parts = chunk.split(":")
        label = parts[0]
        opts = {"K": 1, "L": 1}
        for p in parts[1:]:
            key, _, value = p.partition("=")
            opts[key.upper()] = int(value)
        out.append(decoupling.sender(label, state.dim_of(label), ancilla=opts["K"], rank=opts["L"]))
    return out


def cmd_decouple(args) -> int:
    state = parse_state_file(args.state)
    senders = _parse_senders(args.senders, state)
    spec = decoupling.InstrumentSpec(senders=tuple(senders), seed=args.seed, samples=args.samples)
    reference = _split_labels(args.reference)
    result = decoupling.simulate_random_instrument(
        state,
        spec,
        reference,
        with_minentropy_bound=args.bound in ("hmin", "both"),
        keep_outcomes=bool(args.csv),
    )
    payload = {
        "empirical_q": result.empirical_q,
        "stderr": result.stderr,
        "analytic_bound": result.analytic_bound if args.bound in ("purity", "both") else None,
        "minentropy_bound": result.minentropy_bound,
        "samples": result.samples,
        "seed": args.seed,
    }
    if args.csv:
        rows = [
            {k: v for k, v in row.items() if k != "post_state"}
            for row in result.outcome_rows
        ]
        emit_csv(rows, args.csv)
    emit_json(payload, args.out)
    return 0


def cmd_twirl(args) -> int:
    report = decoupling.twirl_average_check(args.d, args.L, samples=args.samples, seed=args.seed)
    payload = {
        "d": report.dim,
        "L": report.rank,
        "samples": report.samples,
        "r": report.r,
        "s": report.s,
        "max_deviation": report.max_deviation,
    }
    emit_json(payload, args.out)
    return 0


def cmd_assist(args) -> int:
    state = parse_state_file(args.state)
    if args.cnot:
        ctrl, tgt = _split_labels(args.cnot)
        state = qcore.apply_unitary(state, [ctrl, tgt], qcore.CNOT)
    helpers = [_split_labels(h) for h in args.helpers.split(";")] if args.helpers else []
    report = assisted.assisted_lower_bound(state, _split_labels(args.a), _split_labels(args.b), helpers)
    payload = asdict(report)
    emit_json(payload, args.out)
    return 0


def cmd_swap(args) -> int:
    lam2 = Fraction(args.lambda2) if "/" in args.lambda2 else float(args.lambda2)
    lam1 = 1 - lam2 if isinstance(lam2, Fraction) else 1.0 - lam2
    trace = protocols.entanglement_swap(lam1, lam2)
    payload = {
        "outcomes": [
            {"label": o.label, "probability": o.probability, "register": o.register}
            for o in trace.outcomes
        ],
        "scp": trace.aggregate["scp"],
        "exact": trace.aggregate["exact"],
    }
    emit_json(payload, args.out)
    return 0


def cmd_hash_sim(args) -> int:
    p = [float(x) for x in args.p.split(",")]
    trace = protocols.hashing_simulation(p, args.n, args.delta, trials=args.trials, seed=args.seed)
    aggregate = {k: v for k, v in trace.aggregate.items() if k != "trial_records"}
    if args.csv:
        rows = [
            {"trial": o.label, **(o.register or {})}
            for o in trace.outcomes
        ]
        emit_csv(rows, args.csv)
    emit_json(aggregate, args.out)
    return 0


def cmd_schmidt(args) -> int:
    trace = protocols.schmidt_projection(args.theta, args.n)
    payload = dict(trace.aggregate)
    payload["outcomes"] = [
        {"label": o.label, "probability": float(o.probability), "rank": o.register["rank"]}
        for o in trace.outcomes
    ]
    emit_json(payload, args.out)
    return 0


def cmd_typ_check(args) -> int:
    p = [float(x) for x in args.p.split(",")]
    ts = typicality.typical_set(p, args.n, args.delta)
    c = typicality.typicality_constant(p)
    h = qcore.shannon_entropy(p)
    eps = max(0.0, 1.0 - ts.total_probability)
    rows = [
        {"quantity": "total_probability", "actual": ts.total_probability, "bound": 1.0 - eps, "kind": ">="},
        {"quantity": "cardinality", "actual": float(ts.cardinality), "bound": 2.0 ** (args.n * (h + c * args.delta)), "kind": "<="},
        {
            "quantity": "cardinality_floor",
            "actual": float(ts.cardinality),
            "bound": (1 - eps) * 2.0 ** (args.n * (h - c * args.delta)),
            "kind": ">=",
        },
        {"quantity": "member_prob_max", "actual": ts.max_prob, "bound": 2.0 ** (-args.n * (h - c * args.delta)), "kind": "<="},
        {"quantity": "member_prob_min", "actual": ts.min_prob, "bound": 2.0 ** (-args.n * (h + c * args.delta)), "kind": ">="},
    ]
    if args.csv:
        emit_csv(rows, args.csv)
    emit_json({"n": args.n, "delta": args.delta, "rows": rows}, args.out)
    return 0


def cmd_verify(args) -> int:
    from . import acceptance

    results = acceptance.run_all(only=args.only)
    width = max(len(r.name) for r in results)
    for r in results:
        print(f"{r.name:<{width}}  {'PASS' if r.passed else 'FAIL'}  {r.detail}")
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entlab",
        description="Numerical laboratory for state merging, decoupling bounds, and assisted distillation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", default=None, help="write JSON here instead of stdout")
        p.add_argument("--csv", default=None, help="optional CSV output path")
        p.add_argument("--seed", type=int, default=default_seed(), help="root RNG seed")

    p = sub.add_parser("entropy", help="entropy family of a state for one bipartition")
    p.add_argument("--state", required=True)
    p.add_argument("--split", required=True, help="labels as LEFT|RIGHT, e.g. A|B,C")
    p.add_argument("--quantity", default="all", choices=["svn", "cond", "coh", "hmin", "h2", "hmax", "h0", "all"])
    p.add_argument("--sigma", default="marginal", help="conditioning operator: 'marginal' or a state file")
    common(p)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("region", help="rate/cost region constraints and membership")
    p.add_argument("--state", required=True)
    p.add_argument("--mode", required=True, choices=["merge", "split", "cost", "seq"])
    p.add_argument("--senders", required=True, help="comma-separated sender labels")
    p.add_argument("--receiver", default="", help="receiver-side labels (A side for split)")
    p.add_argument("--receiver-b", default="", help="B-side receiver labels for split mode")
    p.add_argument("--reference", default="", help="reference labels for cost/seq modes")
    p.add_argument("--cut", default="", help="T-side labels for split mode")
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--point", default=None, help="comma-separated rate/cost point to classify")
    p.add_argument("--ordering", default="", help="sender ordering for seq mode")
    common(p)
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("decouple", help="Monte Carlo decoupling error vs analytic bound")
    p.add_argument("--state", required=True)
    p.add_argument("--senders", required=True, help="e.g. C1:K=1:L=1,C2:K=2:L=1")
    p.add_argument("--reference", required=True)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--bound", default="purity", choices=["purity", "hmin", "both"])
    common(p)
    p.set_defaults(func=cmd_decouple)

    p = sub.add_parser("twirl", help="Monte Carlo check of the two-copy twirl identity")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--samples", type=int, default=20000)
    common(p)
    p.set_defaults(func=cmd_twirl)

    p = sub.add_parser("assist", help="assisted-distillation rate report")
    p.add_argument("--state", required=True)
    p.add_argument("--a", required=True, help="Alice's labels")
    p.add_argument("--b", required=True, help="Bob's labels")
    p.add_argument("--helpers", default="", help="helper groups, ';' between nodes, ',' within")
    p.add_argument("--cnot", default=None, help="apply a CNOT fault: control,target labels")
    common(p)
    p.set_defaults(func=cmd_assist)

    p = sub.add_parser("swap", help="entanglement swapping with optimal singlet conversion")
    p.add_argument("--lambda2", required=True, help="smaller Schmidt weight, float or fraction like 1/3")
    common(p)
    p.set_defaults(func=cmd_swap)

    p = sub.add_parser("hash-sim", help="parity-hashing identification simulation")
    p.add_argument("--p", required=True, help="four comma-separated Bell weights")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--trials", type=int, default=50)
    common(p)
    p.set_defaults(func=cmd_hash_sim)

    p = sub.add_parser("schmidt", help="Schmidt projection concentration statistics")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    common(p)
    p.set_defaults(func=cmd_schmidt)

    p = sub.add_parser("typ-check", help="typical-set bounds vs exact statistics")
    p.add_argument("--p", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    common(p)
    p.set_defaults(func=cmd_typ_check)

    p = sub.add_parser("verify", help="run the acceptance suite and print a pass/fail table")
    p.add_argument("--only", default=None, help="run a single criterion by name")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (qcore.StateError, qcore.LabelError, entropy.SupportError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
