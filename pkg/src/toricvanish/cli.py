"""Command-line front end.  Every command is a thin adapter over the library."""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
from typing import List, Optional

from .cohomology import CohomologyError, EnumerationAnomaly, IncompleteFan, cohomology_table, sheaf_from_json
from .divisors import DivisorError
from .exactlin import Field
from .fans import Fan, FanError, parse_fan_name, predicates, validate
from .verify import (
    InstanceError,
    Instance,
    TheoremId,
    corpus_header,
    generate_corpus,
    read_corpus,
    regression_blowup_example,
    verify_many,
    write_corpus,
)

EXIT_OK, EXIT_FALSIFIED, EXIT_INPUT, EXIT_ANOMALY = 0, 1, 2, 3
JOBS_ENV = "TORICVANISH_JOBS"


class InputError(Exception):
    pass


def _load_json(text: str):
    """Inline JSON or a path to a JSON file."""
    if os.path.exists(text):
        with open(text) as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from None


def _load_fan(spec: str) -> Fan:
    if os.path.exists(spec) or spec.lstrip().startswith("{"):
        fan = Fan.from_json(_load_json(spec))
    else:
        fan = parse_fan_name(spec)
    bad = validate(fan)
    if bad:
        raise InputError("invalid fan: " + "; ".join(str(v) for v in bad))
    return fan


def _field(text: str) -> Field:
    try:
        return Field.parse(text)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _emit(args, payload: dict, text: Optional[str] = None):
    if getattr(args, "timestamps", False):
        payload = dict(payload, generated_at=datetime.datetime.now(datetime.timezone.utc).isoformat())
    out = text if text is not None else json.dumps(payload, indent=2, sort_keys=True) + "\n"
    target = getattr(args, "output", None)
    if target:
        with open(target, "w") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


# ---------------------------------------------------------------------------
# Commands


def cmd_fan(args) -> int:
    spec = args.fan
    if os.path.exists(spec) or spec.lstrip().startswith("{"):
        fan = Fan.from_json(_load_json(spec))
    else:
        fan = parse_fan_name(spec)
    bad = validate(fan)
    if args.action == "check":
        _emit(args, {"ok": not bad, "violations": [{"kind": v.kind, "detail": v.detail}
                                                   for v in bad]})
        return EXIT_OK if not bad else EXIT_INPUT
    if bad:
        raise InputError("invalid fan: " + "; ".join(str(v) for v in bad))
    p = predicates(fan)
    _emit(args, {
        "fan": fan.to_json(),
        "digest": fan.digest(),
        "n_cones": {str(d): len(c) for d, c in fan.cones_by_dim.items()},
        "is_complete": p.is_complete, "is_simplicial": p.is_simplicial,
        "is_smooth": p.is_smooth, "has_ample": p.has_ample,
    })
    return EXIT_OK


def cmd_cohomology(args) -> int:
    fan = _load_fan(args.fan)
    spec = sheaf_from_json(_load_json(args.sheaf))
    field = _field(args.field)
    try:
        table = cohomology_table(fan, spec, field)
    except IncompleteFan:
        raise InputError("fan is not complete") from None
    if args.out == "csv":
        header = ",".join(f"h{i}" for i in range(len(table.h)))
        _emit(args, {}, f"field,{header}\n{field},{','.join(map(str, table.h))}\n")
    else:
        _emit(args, table.to_json())
    return EXIT_OK


def _parse_corpus_arg(text: str):
    try:
        seed, size = (int(x) for x in text.split(","))
    except ValueError:
        raise InputError("--corpus expects SEED,SIZE") from None
    return seed, size


def cmd_verify(args) -> int:
    fields = [_field(f) for f in args.field.split(",")]
    if args.theorem == "regression":
        reports = [regression_blowup_example(f) for f in fields]
        _emit(args, {"summary": _summary(reports), "reports": [r.to_json() for r in reports]})
        return EXIT_OK if all(r.holds for r in reports) else EXIT_FALSIFIED
    if args.theorem == "all":
        theorems = list(TheoremId)
    else:
        try:
            theorems = [TheoremId.parse(t) for t in args.theorem.split(",")]
        except ValueError as exc:
            raise InputError(str(exc)) from None
    if args.instance:
        if not os.path.exists(args.instance):
            raise InputError(f"no such file: {args.instance}")
        try:
            _, instances = read_corpus(args.instance)
        except InstanceError as exc:
            raise InputError(str(exc)) from None
        if not instances:
            raise InputError("instance file holds no instances")
    elif args.corpus:
        seed, size = _parse_corpus_arg(args.corpus)
        instances = generate_corpus(seed, size, args.max_rank, args.max_subdivisions)
    else:
        raise InputError("give --instance FILE or --corpus SEED,SIZE")
    reports = verify_many(instances, theorems, fields, jobs=args.jobs)
    _emit(args, {"summary": _summary(reports), "reports": [r.to_json() for r in reports]})
    return EXIT_FALSIFIED if any(r.holds is False for r in reports) else EXIT_OK


def _summary(reports) -> dict:
    out = {"holds": 0, "fails": 0, "hypothesis_failure": 0}
    for r in reports:
        out[r.status] += 1
    out["total"] = len(reports)
    return out


def cmd_corpus(args) -> int:
    instances = generate_corpus(args.seed, args.size, args.max_rank, args.max_subdivisions)
    header = corpus_header(args.seed, args.size, args.max_rank, args.max_subdivisions)
    if args.timestamps:
        header["generated_at"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    if args.output:
        write_corpus(args.output, instances, header)
    else:
        sys.stdout.write(json.dumps(header, sort_keys=True) + "\n")
        for inst in instances:
            sys.stdout.write(json.dumps(inst.to_json(), sort_keys=True) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser


def _default_jobs() -> int:
    try:
        return max(1, int(os.environ.get(JOBS_ENV, "1")))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--timestamps", action="store_true",
                        help="add a generation timestamp to the output (off by default)")
    common.add_argument("-o", "--output", help="write to this file instead of stdout")

    p = argparse.ArgumentParser(prog="toricvanish",
                                description="Cohomology and vanishing checks on toric varieties.")
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("fan", parents=[common], help="validate or describe a fan")
    f.add_argument("action", choices=["check", "describe"])
    f.add_argument("fan", help="fan JSON file, inline JSON, or a name such as P2, F1, P(1,1,2)")
    f.set_defaults(func=cmd_fan)

    c = sub.add_parser("cohomology", parents=[common], help="cohomology tables")
    c.add_argument("action", choices=["compute"])
    c.add_argument("--fan", required=True)
    c.add_argument("--sheaf", required=True, help="sheaf JSON (file or inline)")
    c.add_argument("--field", default="Q", help="Q or a prime field such as F2")
    c.add_argument("--out", choices=["json", "csv"], default="json")
    c.set_defaults(func=cmd_cohomology)

    v = sub.add_parser("verify", parents=[common], help="check theorems on instances")
    v.add_argument("--theorem", default="all", help="theorem id(s), 'all', or 'regression'")
    v.add_argument("--instance", help="JSON-lines instance file")
    v.add_argument("--corpus", help="SEED,SIZE of a generated corpus")
    v.add_argument("--max-rank", type=int, default=3)
    v.add_argument("--max-subdivisions", type=int, default=2)
    v.add_argument("--field", default="Q", help="comma-separated fields, e.g. Q,F2,F3")
    v.add_argument("--jobs", type=int, default=_default_jobs(),
                   help=f"worker processes (default from ${JOBS_ENV}, else 1)")
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("corpus", parents=[common], help="corpus management")
    g.add_argument("action", choices=["generate"])
    g.add_argument("--seed", type=int, default=1)
    g.add_argument("--size", type=int, default=10)
    g.add_argument("--max-rank", type=int, default=3)
    g.add_argument("--max-subdivisions", type=int, default=2)
    g.set_defaults(func=cmd_corpus)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except EnumerationAnomaly as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ANOMALY
    except (InputError, FanError, DivisorError, CohomologyError, InstanceError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
