"""Command-line front end: catalog, profile, test, construct, measures.

Exit codes: 0 success, 1 verdict mismatch (or no witness), 2 usage or input error.
"""

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

from . import catalog, characterizations as ch, constructions as con, descriptors as D, subsets
from .density import dominance_check, membership_evidence, profile
from .errors import (CatalogLookupError, ConstructionStallError, DescriptorError, HorizonError,
                     InconclusiveError, InputError, NoWitnessError, PreconditionError, WorkbenchError,
                     ZeroWeightError)
from .farah import d_conditions_check, farah_measures, nic_condition_check, weight_from_measures
from .verdict import Status, _jsonable

DEFAULT_HORIZON = 10_000
STATUS_ALIASES = {"holds": Status.HOLDS, "fails": Status.FAILS, "inconclusive": Status.INCONCLUSIVE}


def default_horizon():
    raw = os.environ.get("DIW_DEFAULT_HORIZON")
    if raw is None:
        return DEFAULT_HORIZON
    try:
        value = int(raw)
    except ValueError:
        raise InputError(f"DIW_DEFAULT_HORIZON must be an integer, got {raw!r}") from None
    if value < 1:
        raise InputError("DIW_DEFAULT_HORIZON must be positive")
    return value


# formatting

def fmt_ratio(x):
    x = Fraction(x)
    if x.denominator == 1:
        return _big(x.numerator)
    if len(str(x.numerator)) + len(str(x.denominator)) > 40:
        return f"~{float(x):.6g} (exact in JSON)"
    return f"{x.numerator}/{x.denominator} ({float(x):.6f})"


def _big(n):
    return f"~2^{n.bit_length() - 1}" if n.bit_length() > 80 else str(n)


def _cell(v, top=True):
    if isinstance(v, Fraction):
        return fmt_ratio(v)
    if isinstance(v, bool) or v is None:
        return str(v)
    if isinstance(v, int):
        return _big(v)
    if isinstance(v, (list, tuple)):
        if top and len(v) > 8:
            return f"[{len(v)} items]"
        inner = ", ".join(_cell(x, False) for x in v[:8]) + (", ..." if len(v) > 8 else "")
        return ("(%s)" if isinstance(v, tuple) else "[%s]") % inner
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_cell(x, False)}" for k, x in v.items()) + "}"
    return str(v)


def table(rows, cols):
    cells = [[_cell(r.get(c)) for c in cols] for r in rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(cols)]
    out = ["  ".join(c.ljust(w) for c, w in zip(cols, widths))]
    out.extend("  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in cells)
    return "\n".join(out)


def emit(args, text_human, payload, csv_rows=None):
    fmt = args.format
    if fmt == "json":
        text = json.dumps(_jsonable(payload), indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    elif fmt == "csv":
        if csv_rows is None:
            raise InputError("this command has no CSV form; use --format json or table")
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(csv_rows)
        text = buf.getvalue()
    else:
        text = text_human.rstrip("\n") + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# argument helpers

def parse_grid(text):
    try:
        return [Fraction(x) for x in text.split(",") if x.strip()]
    except (ValueError, ZeroDivisionError):
        raise InputError(f"bad grid {text!r}") from None


def parse_levels(text):
    try:
        a, b = text.split("..")
        a, b = int(a), int(b)
    except ValueError:
        raise InputError(f"levels must look like A..B, got {text!r}") from None
    if b < a or a < 0:
        raise InputError("levels must satisfy 0 <= A <= B")
    return range(a, b + 1)


def parse_checkpoints(text, w, horizon):
    if text == "structural":
        return [c for c in w.checkpoints(horizon) if w(c) > 0]
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"checkpoints must be a comma list or 'structural', got {text!r}") from None


def _status(text):
    if text is None:
        return None
    key = text.lower()
    for alias, st in STATUS_ALIASES.items():
        if key.startswith(alias):
            return st
    raise InputError(f"unknown status {text!r}")


def _weight(args, attr="weight"):
    raw = getattr(args, attr)
    if raw is None:
        raise InputError(f"--{attr.replace('_', '-')} is required")
    return D.weight(D.load(raw))


def _set(args, attr="set"):
    raw = getattr(args, attr)
    if raw is None:
        raise InputError(f"--{attr.replace('_', '-')} is required")
    return D.subset(D.load(raw))


def _horizon(args):
    return args.horizon if args.horizon is not None else default_horizon()


# commands

def cmd_catalog(args):
    if args.action == "list":
        rows = [{"name": e["name"], "steps": e["default_steps"], "expectations": len(e["expectations"]),
                 "title": e.get("title", "")} for e in catalog.manifest()["entries"]]
        emit(args, table(rows, ["name", "steps", "expectations", "title"]), rows,
             [["name", "steps", "expectations", "title"]] + [[r[k] for k in ("name", "steps", "expectations", "title")]
                                                             for r in rows])
        return 0
    if not args.name:
        raise InputError("catalog verify needs an entry name or 'all'")
    names = catalog.names() if args.name == "all" else [args.name]
    reports = [catalog.verify(n, args.horizon) for n in names]
    lines = []
    for r in reports:
        lines.append(f"{r['name']}: {r['matched']}/{r['total']} expectations matched "
                     f"(steps={r['steps']}, horizon={_cell(r['horizon'])})")
        lines.append(table(r["rows"], ["test", "target", "expected", "got", "margin", "match"]))
        lines.append("")
    emit(args, "\n".join(lines), reports if len(reports) > 1 else reports[0])
    return 0 if all(r["ok"] for r in reports) else 1


def cmd_profile(args):
    A, w = _set(args), _weight(args)
    horizon = _horizon(args)
    cps = parse_checkpoints(args.checkpoints or "structural", w, horizon)
    prof = profile(A, w, cps)
    rows = [{"n": n, "count": c, "weight": g, "ratio": r} for n, c, g, r in prof.rows]
    fmt_rows = list(prof.csv_rows())
    emit(args, table(rows, ["n", "count", "weight", "ratio"]),
         {"set": A.descriptor, "weight": _safe_desc(w), "rows": rows}, fmt_rows)
    return 0


def _safe_desc(w):
    try:
        return D.emit(w)
    except DescriptorError:
        return w.name


TESTS = ("sf-singleton", "jump", "increment", "inclusion", "peer-equivalence", "eu-dyadic", "eu-stretch",
         "membership", "dominance")


def run_test(args):
    name = args.testname
    horizon = _horizon(args)
    if name == "eu-dyadic":
        levels = parse_levels(args.levels) if args.levels else None
        if levels is not None and args.horizon is None:
            horizon = max(horizon, 2 ** (levels[-1] + 1))
        return ch.eu_dyadic_test(_weight(args), levels, horizon)
    if name == "sf-singleton":
        kw = {}
        if args.eps_grid:
            kw["eps_grid"] = parse_grid(args.eps_grid)
        if args.m_grid:
            kw["m_grid"] = parse_grid(args.m_grid)
        return ch.sf_singleton_test(_weight(args), horizon=horizon, **kw)
    if name == "eu-stretch":
        kw = {"m_grid": parse_grid(args.m_grid)} if args.m_grid else {}
        return ch.eu_stretch_test(_weight(args), horizon=horizon, **kw)
    if name == "jump":
        return ch.jump_test(_weight(args), horizon=horizon)
    if name == "increment":
        return ch.increment_test(_weight(args), horizon=horizon)
    if name == "inclusion":
        return ch.inclusion_in_Z_test(_weight(args), horizon=horizon)
    if name == "peer-equivalence":
        return ch.peer_equivalence_test(_weight(args), _weight(args, "weight2"), horizon=horizon)
    if name == "membership":
        return membership_evidence(_set(args), _weight(args), horizon)
    if name == "dominance":
        return dominance_check(_set(args), _set(args, "set2"), horizon)
    raise InputError(f"unknown test {name!r}; choose from {', '.join(TESTS)}")


def cmd_test(args):
    v = run_test(args)
    lines = [f"{args.testname}: {v.status.value}" + (f"  label={v.label}" if v.label else "")]
    if v.margin is not None:
        lines.append(f"margin: {fmt_ratio(v.margin)}")
    if v.witnesses:
        lines.append(f"witnesses: {', '.join(_cell(x) for x in v.witnesses[:12])}")
    for k, val in v.certificate.items():
        lines.append(f"certificate {k}: {_cell(val)}")
    if args.testname == "eu-dyadic":
        rows = [dict(level=n, **(r or {"lo": None})) for n, r in v.details["levels"].items()]
        lines.append(table(rows, ["level", "lo", "hi", "card", "ratio"]))
    emit(args, "\n".join(lines), v.to_dict(with_details=args.details))
    want = _status(args.expect)
    return 1 if want is not None and v.status is not want else 0


CONSTRUCTIONS = ("weight-count-of", "weight-from-checkpoints", "max-combine", "ad-branch", "f-alpha",
                 "inflated-peer", "separating-set", "liminf-set", "antichain", "katetov-weight",
                 "katetov-partition", "katetov-phi")


def _phi(text, size):
    import numpy as np
    if text == "identity":
        return np.arange(size, dtype=np.int64)
    if text == "zero":
        return np.zeros(size, dtype=np.int64)
    if text.startswith("random:"):
        rng = np.random.default_rng(int(text.split(":", 1)[1]))
        return rng.integers(0, size, size=size, dtype=np.int64)
    raise InputError(f"--phi must be identity, zero or random:SEED, got {text!r}")


def run_construction(args):
    name = args.constrname
    horizon = _horizon(args)
    if name == "weight-count-of":
        A = _set(args)
        g = con.weight_count_of(A, horizon)
        return {"weight": _safe_desc(g), "values": [g(n) for n in range(min(horizon, 64) + 1)]}
    if name == "weight-from-checkpoints":
        g = con.weight_from_checkpoints(_set(args))
        return {"weight": _safe_desc(g), "values": [g(n) for n in range(min(horizon, 64) + 1)]}
    if name == "max-combine":
        f, g = _weight(args), _weight(args, "weight2")
        m = con.max_combine(f, g)
        return {"weight": _safe_desc(m), "values": [m(n) for n in range(min(horizon, 64) + 1)]}
    if name == "ad-branch":
        if not args.word:
            raise InputError("--word is required")
        s = subsets.ad_branch(args.word)
        return {"set": s.descriptor, "elements": [s[k] for k in range(min(args.steps or 12, 64))]}
    if name == "f-alpha":
        if not args.word:
            raise InputError("--word is required")
        return con.f_alpha_family(_weight(args), _weight(args, "weight2"), args.word, horizon)
    if name == "inflated-peer":
        return con.inflated_peer(_weight(args), horizon)
    if name == "separating-set":
        if not args.cert:
            raise InputError("--cert EPS,M,N0 is required")
        cert = parse_grid(args.cert)
        if len(cert) != 3:
            raise InputError("--cert takes three values EPS,M,N0")
        return con.separating_set_for_peers(_weight(args), cert, _weight(args, "weight2"), horizon)
    if name == "liminf-set":
        return con.liminf_separating_set(_weight(args), horizon)
    if name == "antichain":
        a = Fraction(args.a) if args.a else Fraction(3, 10)
        P = _set(args) if args.set else subsets.ad_branch("(01)")
        U = _set(args, "set2") if args.set2 else None
        g2 = _weight(args, "weight2") if args.weight2 else _weight(args)
        return con.antichain_weights(_weight(args), g2, a, P, U, blocks=args.steps or 6)
    if name == "katetov-weight":
        M = _set(args) if args.set else D.subset("naturals")
        return con.katetov_antichain_weight(M, horizon=args.steps or 3)
    if name == "katetov-partition":
        alpha = con.minimal_alpha(2)
        from math import factorial
        size = factorial(2 * alpha[-1] + 1)
        return con.katetov_partition(_phi(args.phi or "identity", size), alpha, range(2))
    if name == "katetov-phi":
        return con.katetov_reduction_phi(_weight(args), horizon)
    raise InputError(f"unknown construction {name!r}; choose from {', '.join(CONSTRUCTIONS)}")


def cmd_construct(args):
    out = run_construction(args)
    if isinstance(out, con.Construction):
        payload = out.to_json()
        lines = [f"{out.name}"]
        for k, v in out.sequences.items():
            if k != "rows":
                lines.append(f"{k}: {_cell(v, False)}")
        if out.margins:
            cols = list(out.margins[0].keys())
            lines.append(table(out.margins, cols))
        if out.name == "antichain_weights":
            bad = con.replay_antichain(out)
            payload["replay_failures"] = bad
            lines.append(f"replay: {'all inequalities hold' if not bad else bad}")
    else:
        payload = out
        lines = [json.dumps(_jsonable(out), sort_keys=True)]
    emit(args, "\n".join(lines), payload)
    return 0


def cmd_measures(args):
    if args.action == "farah":
        w = _weight(args)
        ms = farah_measures(w, args.levels_count, limit=args.horizon)
        rows = ms.to_json(len(ms.thresholds) - 1)
        payload = {"kind": "measures", "levels": rows}
        lines = [f"n_k: {ms.thresholds}"] + [json.dumps(r) for r in rows]
        emit(args, "\n".join(lines), payload)
        return 0
    if not args.measures:
        raise InputError("--measures is required")
    ms = D.measures(D.load(args.measures))
    count = args.levels_count
    if args.action == "check":
        nic = nic_condition_check(ms, horizon=count)
        dc = d_conditions_check(ms, horizon=count)
        rows = [{"condition": k, "status": v.status.value, "margin": v.margin, "label": v.label}
                for k, v in list(nic.items()) + list(dc.items())]
        emit(args, table(rows, ["condition", "status", "margin", "label"]),
             {"nic": {k: v.to_dict() for k, v in nic.items()}, "D": {k: v.to_dict() for k, v in dc.items()}})
        return 0
    if args.action == "weight":
        g = weight_from_measures(ms, levels=count)
        cps = [c for c in g.checkpoints(ms[count - 1].max) if c <= ms[count - 1].max]
        rows = [{"n": c, "weight": g(c)} for c in cps]
        emit(args, table(rows, ["n", "weight"]), {"rows": rows, "ceilings": g.ceilings},
             [["n", "weight"]] + [[r["n"], r["weight"]] for r in rows])
        return 0
    raise InputError(f"unknown measures action {args.action!r}")


def build_parser():
    p = argparse.ArgumentParser(prog="diw", description="Exact workbench for simple density ideals.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--horizon", type=int, default=None,
                        help="evaluation bound (catalog: structural steps); default $DIW_DEFAULT_HORIZON or 10000")
    common.add_argument("--format", choices=("table", "json", "csv"), default="table")
    common.add_argument("--output", help="write to this file instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("catalog", parents=[common], help="list or verify catalog entries")
    c.add_argument("action", choices=("list", "verify"))
    c.add_argument("name", nargs="?")
    c.set_defaults(func=cmd_catalog)

    pr = sub.add_parser("profile", parents=[common], help="density profile of a set under a weight")
    pr.add_argument("--set", required=True)
    pr.add_argument("--weight", required=True)
    pr.add_argument("--checkpoints", help="comma list or 'structural'")
    pr.set_defaults(func=cmd_profile)

    t = sub.add_parser("test", parents=[common], help="run one characterization test")
    t.add_argument("testname", choices=TESTS)
    t.add_argument("--weight")
    t.add_argument("--weight2")
    t.add_argument("--set")
    t.add_argument("--set2")
    t.add_argument("--eps-grid")
    t.add_argument("--m-grid")
    t.add_argument("--levels", help="dyadic levels A..B")
    t.add_argument("--expect", help="expected status; a mismatch exits 1")
    t.add_argument("--details", action="store_true", help="include details in JSON output")
    t.set_defaults(func=cmd_test)

    k = sub.add_parser("construct", parents=[common], help="run a witness construction")
    k.add_argument("constrname", choices=CONSTRUCTIONS)
    k.add_argument("--weight")
    k.add_argument("--weight2")
    k.add_argument("--set")
    k.add_argument("--set2")
    k.add_argument("--word")
    k.add_argument("--cert", help="EPS,M,N0")
    k.add_argument("--a", help="rational in (0, 1/3)")
    k.add_argument("--steps", type=int, help="blocks or construction steps")
    k.add_argument("--phi", help="identity, zero or random:SEED")
    k.set_defaults(func=cmd_construct)

    m = sub.add_parser("measures", parents=[common], help="measure sequences and their weights")
    m.add_argument("action", choices=("farah", "check", "weight"))
    m.add_argument("--weight")
    m.add_argument("--measures")
    m.add_argument("--levels", dest="levels_count", type=int, default=12)
    m.set_defaults(func=cmd_measures)
    return p


INPUT_ERRORS = (DescriptorError, InputError, CatalogLookupError, PreconditionError, ZeroWeightError)
NO_RESULT = (NoWitnessError, ConstructionStallError, InconclusiveError, HorizonError)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NO_RESULT as exc:
        print(f"no result: {exc}", file=sys.stderr)
        return 1
    except WorkbenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
