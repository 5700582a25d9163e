"""Command-line front end.

JSON goes to stdout, a short human summary to stderr (silenced by
``--json``).  Exit codes: 0 answered, 1 negative answer where the command
is a yes/no check, 2 usage or input error, 3 internal invariant failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Callable

from .core import CSVFormatError, IA, ParseError, Relation, SchemaError, format_constraint_file, load_relation, parse_constraint, parse_constraint_file
from .countermodel import (
    ChaseTooLarge,
    InvariantViolation,
    PreconditionError,
    finite_chase_model,
    lemma2_chain,
    lemma2_prefix_holds,
    theorem2_chain,
    theorem2_prefix,
    verify_countermodel,
)
from .decision import UnsupportedConstraint, implies_general
from .derivation import SchemaTooLarge, check_proof, saturate
from .separation import (
    SearchTooLarge,
    bounded_search,
    cardinality_schedule,
    counting_chain,
    kary_demo,
    lemma3_model,
    lemma4_model,
    lemma5_models,
    lemma6_models,
    rn_schema,
    sigma_n,
    upward_closure,
)
from .semantics import satisfies_all

INLINE_CSV_LIMIT = 100_000
CERTIFY_PREFIX_LIMIT = 100_000


class UsageError(Exception):
    pass


class Outcome:
    def __init__(self, payload: dict, summary: str, code: int = 0):
        self.payload = payload
        self.summary = summary
        self.code = code


def _read(path: str | None, what: str) -> str:
    if not path:
        raise UsageError(f"{what} is required")
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {what} {path}: {exc.strerror}") from None


def _load_sigma(args):
    return parse_constraint_file(_read(args.constraints, "--constraints"))


def _query(args, schema):
    if not args.query:
        raise UsageError("--query is required")
    return parse_constraint(args.query, schema)


def _relation_payload(r: Relation, out: str | None = None) -> dict:
    body: dict = {"tuples": len(r)}
    text = None
    if out or len(r) <= INLINE_CSV_LIMIT:
        text = r.to_csv()
    if out:
        Path(out).write_text(text)
        body["written_to"] = out
    elif text is not None:
        body["csv"] = text
    else:
        body["csv_omitted"] = f"more than {INLINE_CSV_LIMIT} tuples; pass --out FILE"
    return body


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_check(args) -> Outcome:
    schema, sigma = _load_sigma(args)
    r = load_relation(_read(args.data, "--data"), schema)
    report = satisfies_all(r, sigma)
    bad = len(report.violations)
    summary = f"{len(r)} tuples, {len(sigma)} constraints: " + ("all hold" if not bad else f"{bad} violated")
    return Outcome(report.to_dict(schema), summary, 0 if report.all_hold else 1)


def _certify_negative(sigma, phi, args) -> dict:
    prefix = finite_chase_model(sigma, phi)
    if prefix is not None:
        check = verify_countermodel(prefix.relation, sigma, phi)
        return {"kind": "finite-chase", "rounds": prefix.rounds_done, "verified": check.ok, **_relation_payload(prefix.relation)}
    found = bounded_search(sigma, phi, args.max_tuples, args.max_values)
    if found is not None:
        check = verify_countermodel(found, sigma, phi)
        return {"kind": "bounded-search", "verified": check.ok, **_relation_payload(found)}
    prefix = None
    try:
        for prefix in theorem2_chain(sigma, phi, max_tuples=CERTIFY_PREFIX_LIMIT):
            if prefix.rounds_done >= 3 * len(sigma.ias):
                break
    except ChaseTooLarge:
        pass
    return {
        "kind": "infinite-prefix",
        "verified": False,
        "note": "no finite countermodel found; the prefix below extends to an infinite countermodel",
        "manifest": prefix.manifest(),
        **_relation_payload(prefix.relation),
    }


def cmd_imply(args) -> Outcome:
    schema, sigma = _load_sigma(args)
    phi = _query(args, schema)
    text = phi.format(schema)
    if args.mode == "finite-bounded":
        found = bounded_search(sigma, phi, args.max_tuples, args.max_values)
        bounds = {"max_tuples": args.max_tuples, "max_values": args.max_values}
        if found is None:
            payload = {
                "query": text,
                "mode": "finite-bounded",
                "verdict": "inconclusive",
                "note": "no counterexample within bounds; this is inconclusive for implication",
                "bounds": bounds,
            }
            return Outcome(payload, f"{text}: no counterexample within bounds (inconclusive)")
        payload = {"query": text, "mode": "finite-bounded", "verdict": "not-implied", "bounds": bounds, "countermodel": _relation_payload(found)}
        return Outcome(payload, f"{text}: not implied (finite counterexample with {len(found)} tuples)")

    answer = implies_general(sigma, phi)
    payload = answer.to_dict(schema)
    if args.certify:
        if answer.implied:
            check = check_proof(answer.proof, sigma)
            if not check.ok:
                raise InvariantViolation(f"emitted proof fails to check: {check.reason}")
            payload["certificate"] = {"kind": "proof", "checked": True, "size": answer.proof.size()}
        else:
            payload["certificate"] = _certify_negative(sigma, phi, args)
    return Outcome(payload, f"{text}: {answer.verdict}")


def cmd_derive(args) -> Outcome:
    schema, sigma = _load_sigma(args)
    sat = saturate(sigma)
    derived = []
    for c in sorted(sat, key=lambda c: (isinstance(c, IA), c.format(schema))):
        derived.append({"constraint": c.format(schema), "proof": sat.proof(c).to_dict(schema)})
    payload = {"schema": schema.name, "attributes": list(schema.attributes), "count": len(derived), "derived": derived}
    return Outcome(payload, f"{len(derived)} constraints derivable over {len(schema)} attributes")


def cmd_countermodel(args) -> Outcome:
    schema, sigma = _load_sigma(args)
    phi = _query(args, schema)
    try:
        prefix = theorem2_prefix(sigma, phi, args.rounds, max_tuples=args.max_chase)
    except PreconditionError as exc:
        return Outcome({"query": phi.format(schema), "verdict": "implied", "error": str(exc)}, str(exc), 1)
    payload = {"manifest": prefix.manifest(), **_relation_payload(prefix.relation, args.out)}
    return Outcome(payload, f"prefix after {prefix.rounds_done} rounds: {len(prefix.relation)} tuples")


def _lemma_relations(named: list[tuple[str, Relation | None]]) -> dict:
    return {name: _relation_payload(r) for name, r in named if r is not None}


def cmd_paper(args) -> Outcome:
    if args.sigma_n is not None:
        s = sigma_n(args.sigma_n)
        closure = upward_closure(s)
        payload = {
            "n": s.n,
            "constraints": format_constraint_file(s.schema, s.constraints),
            "closure_size": len(closure),
            "closure_keys": [k.format(s.schema) for k in closure.keys()],
        }
        return Outcome(payload, f"Σ_{s.n}: {len(s)} constraints, |C↑| = {len(closure)}")
    if args.kary_demo is not None:
        rep = kary_demo(args.kary_demo)
        ok = rep.verified == rep.pairs
        return Outcome(rep.to_dict(), f"n={rep.n}: {rep.verified}/{rep.pairs} countermodels verified", 0 if ok else 3)
    lemma = args.lemma
    if lemma is None:
        raise UsageError("paper needs one of --lemma, --sigma-n, --kary-demo")
    n = args.n
    if lemma == 1:
        text = _read(args.data, "--data")
        header = text.splitlines()[0].split(",") if text.strip() else []
        n = n or max(len(header) // 2, 2)
        r = load_relation(text, rn_schema(n))
        try:
            rep = counting_chain(r, n)
        except ValueError as exc:
            return Outcome({"error": str(exc)}, str(exc), 1)
        return Outcome(rep.to_dict(), rep.conclusion)
    if lemma == 2:
        depth = args.depth if args.depth is not None else 4
        prefix = lemma2_chain(depth, max_tuples=args.max_chase)
        checks = lemma2_prefix_holds(prefix)
        payload = {"depth": depth, "checks": checks, **_relation_payload(prefix.relation, args.out)}
        return Outcome(payload, f"r_{depth}: {len(prefix.relation)} tuples, checks " + ("pass" if all(checks.values()) else "FAIL"), 0 if all(checks.values()) else 3)
    if n is None:
        raise UsageError(f"--lemma {lemma} needs --n")
    if lemma in (3, 4):
        if args.d is None:
            raise UsageError(f"--lemma {lemma} needs --d")
        sched = cardinality_schedule(n, args.d)
        r = lemma3_model(n, args.d) if lemma == 3 else lemma4_model(n, args.d)
        payload = {"schedule": sched.to_dict(), **_relation_payload(r, args.out)}
        return Outcome(payload, f"lemma {lemma}: {len(r)} tuples, M = {sched.M}")
    if args.i is None:
        raise UsageError(f"--lemma {lemma} needs --i")
    if lemma == 5:
        r, r2 = lemma5_models(n, args.i)
        return Outcome(_lemma_relations([("r", r), ("r'", r2)]), f"lemma 5 models for n={n}, i={args.i}")
    rels = lemma6_models(n, args.i)
    named = list(zip(("r0", "r1", "r2", "r3"), rels))
    return Outcome(_lemma_relations(named), f"lemma 6 models for n={n}, i={args.i}")


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="suppress the human summary on stderr")
    common.add_argument("--seedless", action="store_true", help="accepted for compatibility; nothing here uses randomness")

    p = argparse.ArgumentParser(prog="iakr", description="Keys and independence atoms: checking, implication, proofs, countermodels.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="check a CSV relation against a constraint file")
    c.add_argument("--constraints", required=True)
    c.add_argument("--data", required=True)
    c.set_defaults(run=cmd_check)

    i = sub.add_parser("imply", parents=[common], help="decide whether a constraint is implied")
    i.add_argument("--constraints", required=True)
    i.add_argument("--query", required=True)
    i.add_argument("--certify", action="store_true", help="attach a checked proof or a countermodel")
    i.add_argument("--mode", choices=("general", "finite-bounded"), default="general")
    i.add_argument("--max-tuples", type=int, default=3)
    i.add_argument("--max-values", type=int, default=3)
    i.set_defaults(run=cmd_imply)

    d = sub.add_parser("derive", parents=[common], help="saturate under the nine rules and dump proofs")
    d.add_argument("--constraints", required=True)
    d.set_defaults(run=cmd_derive)

    m = sub.add_parser("countermodel", parents=[common], help="chase prefix refuting a non-implied constraint")
    m.add_argument("--constraints", required=True)
    m.add_argument("--query", required=True)
    m.add_argument("--rounds", type=int, default=None)
    m.add_argument("--max-chase", type=int, default=1_000_000, help="tuple limit for the chase")
    m.add_argument("--out", help="write the relation as CSV here instead of inlining it")
    m.set_defaults(run=cmd_countermodel)

    q = sub.add_parser("paper", parents=[common], help="reproduce the separation constructions")
    which = q.add_mutually_exclusive_group(required=True)
    which.add_argument("--lemma", type=int, choices=range(1, 7))
    which.add_argument("--sigma-n", type=int, metavar="N")
    which.add_argument("--kary-demo", type=int, metavar="N")
    q.add_argument("--n", type=int)
    q.add_argument("--d", help='attribute set such as "A1 B1 A3"')
    q.add_argument("--i", type=int)
    q.add_argument("--depth", type=int)
    q.add_argument("--data")
    q.add_argument("--max-chase", type=int, default=20_000_000)
    q.add_argument("--out")
    q.set_defaults(run=cmd_paper)
    return p


_INPUT_ERRORS = (UsageError, ParseError, SchemaError, CSVFormatError, UnsupportedConstraint, SchemaTooLarge, SearchTooLarge, ChaseTooLarge, ValueError)


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler: Callable[..., Outcome] = args.run
    try:
        outcome = handler(args)
    except InvariantViolation as exc:
        outcome = Outcome({"error": "invariant failure", "detail": str(exc)}, f"internal invariant failure: {exc}", 3)
    except _INPUT_ERRORS as exc:
        outcome = Outcome({"error": type(exc).__name__, "detail": str(exc)}, f"error: {exc}", 2)
    stdout.write(json.dumps(outcome.payload, indent=2, ensure_ascii=False) + "\n")
    if not args.json or outcome.code >= 2:
        stderr.write(outcome.summary + "\n")
    return outcome.code


def main(argv: list[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
