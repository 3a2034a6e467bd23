"""Command-line interface: count, verify, list, inspect and export.

Exit status is 0 on success, 1 when verification fails and 2 for usage or
input errors (bad prime, unreadable data, selector matching nothing).
"""

from __future__ import annotations

import argparse
import os
import re
import sys
import warnings
from pathlib import Path

from . import catalog as cat
from .dsl import DIALECTS, emit_cas
from .errors import P6Error
from .numtheory import group_count, group_count_terms, is_prime
from .pcgroup import DEFAULT_BUDGET

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SUFFIX = {"gap-style": ".g", "magma-style": ".m"}


class UsageError(Exception):
    pass


def _prime(text: str) -> int:
    try:
        p = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if not is_prime(p):
        raise argparse.ArgumentTypeError(f"{p} is not prime")
    return p


def _positive(text: str) -> int:
    try:
        v = int(float(text)) if "e" in text.lower() else int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=_prime, required=True, help="the prime (>= 7; 5 with --allow-p5)")
    common.add_argument("--data", default=None,
                        help="directory of .p6 family files (default ./data, else the packaged copy)")
    common.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET,
                        help="largest group order that may be enumerated (default 10^8)")
    common.add_argument("--workers", type=_positive, default=os.cpu_count() or 1,
                        help="worker processes (default: available CPUs)")
    common.add_argument("--allow-p5", action="store_true", help="permit p = 5 (with a warning)")
    common.add_argument("--format", choices=("text", "machine"), default="text")

    select = argparse.ArgumentParser(add_help=False)
    g = select.add_argument_group("selection")
    g.add_argument("--index", type=_positive, action="append", help="catalog index (repeatable)")
    g.add_argument("--family", type=int, action="append", help="family number 1..43 (repeatable)")
    g.add_argument("--label", action="append", help="label substring, e.g. '(21,7rs)' (repeatable)")

    ap = argparse.ArgumentParser(prog="p6groups", description="Catalog of the groups of order p^6.")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("count", help="number of groups of order p^6")
    c.add_argument("--p", type=_prime, required=True)
    c.add_argument("--allow-p5", action="store_true")
    c.add_argument("--format", choices=("text", "machine"), default="text")

    v = sub.add_parser("verify", parents=[common], help="build and check the whole catalog")
    v.add_argument("--profiles", action="store_true",
                   help="compute invariant profiles (always on at p = 7)")
    v.add_argument("--no-profiles", action="store_true", help="skip profiles even at p = 7")

    sub.add_parser("list", parents=[common, select], help="catalog indices and labels")
    sub.add_parser("inspect", parents=[common, select], help="invariant profiles of selected entries")

    e = sub.add_parser("export", parents=[common, select], help="write CAS scripts for selected entries")
    e.add_argument("--dialect", choices=DIALECTS, default="gap-style")
    e.add_argument("--out", default="export", help="output directory (default ./export)")
    return ap


# -- commands ------------------------------------------------------------------

def cmd_count(args, out) -> int:
    if args.p < 5 or args.p == 5 and not args.allow_p5:
        raise UsageError(f"p = {args.p} is outside the supported range (p >= 7, or 5 with --allow-p5)")
    terms = group_count_terms(args.p)
    if args.format == "machine":
        out.write(cat._kv(p=args.p, count=group_count(args.p)) + "\n")
        for name, value in terms.items():
            out.write(cat._kv(term=name, value=value) + "\n")
    else:
        out.write(f"{group_count(args.p)}\n")
    return EXIT_OK


def _specs(args):
    return cat.load_specs(args.data)


def cmd_verify(args, out) -> int:
    specs = _specs(args)
    profiles = None
    if args.profiles:
        profiles = True
    if args.no_profiles:
        profiles = False
    rep = cat.verify_catalog(args.p, specs, allow_p5=args.allow_p5, profiles=profiles,
                             workers=args.workers, budget=args.budget)
    out.write(cat.report_machine(rep) if args.format == "machine" else cat.report_text(rep))
    return EXIT_OK if rep.passed else EXIT_FAIL


def _selected(args, specs):
    ctx = cat.check_prime(args.p, args.allow_p5)
    items = cat.plan(ctx, specs)
    if not (args.index or args.family or args.label):
        return items
    chosen = []
    for it in items:
        if (args.index and it.index in args.index or args.family and it.family in args.family
                or args.label and any(s in it.label for s in args.label)):
            chosen.append(it)
    if not chosen:
        raise UsageError("the selection matches no catalog entry")
    return chosen


def cmd_list(args, out) -> int:
    specs = _specs(args)
    for it in _selected(args, specs):
        if args.format == "machine":
            out.write(cat._kv(id=it.index, family=it.family, label=it.label) + "\n")
        else:
            out.write(f"{it.index} {it.label}\n")
    return EXIT_OK


def cmd_inspect(args, out) -> int:
    specs = _specs(args)
    items = _selected(args, specs)
    for entry in cat.iter_catalog(args.p, specs, allow_p5=args.allow_p5, budget=args.budget,
                                  select=[it.index for it in items]):
        pr = entry.profile
        if args.format == "machine":
            out.write(cat._kv(id=entry.index, label=entry.label, **cat.profile_fields(pr)) + "\n")
            continue
        out.write(cat.profile_line(entry.index, entry.label, pr) + "\n")
        fields = cat.profile_fields(pr)
        for k in ("order_type", "centre_order", "derived_order", "frattini_quotient_rank",
                  "lcs_orders", "ucs_orders", "class_sizes", "exponent", "abelian_invariants"):
            out.write(f"  {k}: {fields[k]}\n")
        out.write(f"  nilpotency_class: {pr.nilpotency_class}\n")
    return EXIT_OK


def _filename(index: int, label: str, dialect: str) -> str:
    slug = re.sub(r"[^A-Za-z0-9]+", "_", label).strip("_")
    return f"{index:04d}_{slug}{SUFFIX[dialect]}"


def cmd_export(args, out) -> int:
    specs = _specs(args)
    items = _selected(args, specs)
    target = Path(args.out)
    target.mkdir(parents=True, exist_ok=True)
    n = 0
    for entry in cat.iter_catalog(args.p, specs, allow_p5=args.allow_p5, budget=args.budget,
                                  select=[it.index for it in items]):
        text = emit_cas(entry.group.presentation, args.dialect, entry.binding, label=entry.spec.label)
        path = target / _filename(entry.index, entry.label, args.dialect)
        path.write_text(text)
        n += 1
        if args.format == "machine":
            out.write(cat._kv(id=entry.index, label=entry.label, path=path) + "\n")
    if args.format == "text":
        out.write(f"wrote {n} {args.dialect} scripts to {target}\n")
    return EXIT_OK


COMMANDS = {"count": cmd_count, "verify": cmd_verify, "list": cmd_list,
            "inspect": cmd_inspect, "export": cmd_export}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    with warnings.catch_warnings():
        warnings.simplefilter("always")
        warnings.showwarning = lambda msg, *a, **k: print(f"warning: {msg}", file=sys.stderr)
        try:
            return COMMANDS[args.command](args, out)
        except (UsageError, P6Error) as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
