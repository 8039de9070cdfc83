"""Named, parameter-free builds of the worked examples, with expected verdicts.

Builders live here; names, default step counts and expectations live in
``catalog.json`` next to this file.  A "step" is one structural block of the
entry (a factorial block, one m_k, one measure), never a raw n.
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from itertools import count as _count
from math import factorial

from . import characterizations as ch
from . import subsets
from .density import dominance_check
from .errors import CatalogLookupError, HorizonError
from .farah import Measure, MeasureSeq, d_conditions_check, nic_condition_check, weight_from_measures
from .verdict import Status, Verdict
from .weights import Identity, Plateau

WEIGHT_TESTS = {
    "sf_singleton_test": ch.sf_singleton_test,
    "jump_test": ch.jump_test,
    "increment_test": ch.increment_test,
    "inclusion_in_Z_test": ch.inclusion_in_Z_test,
    "eu_dyadic_test": ch.eu_dyadic_test,
    "eu_stretch_test": ch.eu_stretch_test,
}


@dataclass
class CatalogEntry:
    name: str
    payload: dict
    expectations: list
    default_steps: int
    horizon: int  # raw n-horizon for weight tests at the requested steps
    steps: int
    title: str = ""
    checkpoints: object = None
    extra: dict = field(default_factory=dict)

    def structural_checkpoints(self):
        w = next((v for v in self.payload.values() if hasattr(v, "checkpoints")), None)
        if w is not None and self.checkpoints is None:
            return iter(w.checkpoints(self.horizon))
        return iter(self.checkpoints or [])


# weights

def _plateau(piece_gen, gap, name, kind):
    return Plateau(piece_gen, gap=gap, descriptor={"kind": "catalog", "name": kind}, name=name)


def dyadic_plateau():
    """2^k on [2^k, 2^k + k), identity elsewhere."""
    return _plateau(lambda: ((2 ** k, 2 ** k + k, 2 ** k) for k in _count(1)),
                    "identity", "dyadic_plateau", "sec3-ex1")


def ex2_checkpoints():
    """m_0 = m_1 = 1 and m_{k+1} = max(k·m_k, m_k + k) + 1."""
    m, k = 1, 1
    yield 1
    yield 1
    while True:
        m = max(k * m, m + k) + 1
        k += 1
        yield m


def _ex2_fm():
    """Pairs (m_k, f(m_k)) for k ≥ 1."""
    it = ex2_checkpoints()
    next(it)
    m, fm, k = next(it), 1, 1
    while True:
        nxt = next(it)
        yield k, m, fm, nxt
        fm = k * fm
        m, k = nxt, k + 1


def ex2_pair():
    def f_pieces():
        yield 0, 1, 0
        yield 1, 2, 1
        for k, m, fm, nxt in _ex2_fm():
            for l in range(1, k):
                yield m + l, m + l + 1, l * fm
            yield m + k, nxt + 1, k * fm

    def g_pieces():
        yield 0, 1, 0
        yield 1, 2, 1
        for k, m, fm, nxt in _ex2_fm():
            yield m + 1, nxt + 1, k * fm

    def cps(h):
        out = []
        for m in ex2_checkpoints():
            if m > h:
                return out
            out.append(m)
    f = Plateau(f_pieces, gap="error", descriptor={"kind": "catalog", "name": "sec3-ex2", "role": "f"},
                name="ex2_f", extra_checkpoints=cps)
    g = Plateau(g_pieces, gap="error", descriptor={"kind": "catalog", "name": "sec3-ex2", "role": "g"},
                name="ex2_g", extra_checkpoints=cps)
    return f, g


def factorial_blocks():
    """(k+1)! on [k!, (k+1)!), with f(0) = 0."""
    return _plateau(lambda: ((factorial(k), factorial(k + 1), factorial(k + 1)) for k in _count(1)),
                    "identity", "factorial_blocks", "sec6-ex1")


def factorial_sums(k):
    """m_k = Σ_{i≤k} i!."""
    return sum(factorial(i) for i in range(k + 1))


def factorial_sum_plateau():
    def pieces():
        yield 0, 2, 1
        m = 2
        for k in _count(1):
            nxt = m + factorial(k + 1)
            yield m, nxt, factorial(k)
            m = nxt
    return _plateau(pieces, "error", "factorial_sum_plateau", "sec6-ex2")


def doubling_checkpoints():
    """m_0 = 0 and m_{k+1} = m_k + (k+1)·2^k."""
    m = 0
    for k in _count():
        yield m
        m += (k + 1) * 2 ** k


def doubling_plateau():
    def pieces():
        it = doubling_checkpoints()
        m = next(it)
        for k in _count():
            nxt = next(it)
            yield m, nxt, 2 ** k
            m = nxt
    return _plateau(pieces, "error", "doubling_plateau", "sec6-ex3")


def nth(gen, k):
    for i, x in enumerate(gen):
        if i == k:
            return x


# measures

def antihom_measures():
    def gen():
        lo = 0
        for n in _count():
            yield Measure([(lo, lo + factorial(n), Fraction(1, factorial(n)))])
            lo += factorial(n)
    return MeasureSeq(gen, {"kind": "catalog", "name": "sec7-antihom"}, name="antihom")


def split_dyadic_measures():
    """Mass 1 − 2^{-n} spread over [2^n, 2^n + n), the rest over [2^n + n, 2^{n+1})."""
    def gen():
        for n in _count():
            lo, mid, hi = 2 ** n, 2 ** n + n, 2 ** (n + 1)
            segs = []
            if n:
                segs.append((lo, mid, (1 - Fraction(1, 2 ** n)) / n))
            segs.append((mid, hi, Fraction(1, 2 ** n) / (hi - mid)))
            yield Measure(segs)
    return MeasureSeq(gen, {"kind": "catalog", "name": "sec6-counterex1"}, name="split_dyadic")


def translated_supports():
    """The anti-homogeneous measures moved apart; the gap before support n holds n! points."""
    def gen():
        end = 0  # one past the previous support
        for n in _count():
            size = factorial(n)
            lo = end + size
            yield Measure([(lo, lo + size, Fraction(1, size))])
            end = lo + size
    ms = MeasureSeq(gen, {"kind": "catalog", "name": "sec6-counterex2"}, name="translated")
    A = subsets.interval_union(lambda: ((m.min, m.max + 1) for m in _iter(ms, 1)),
                               {"kind": "catalog", "name": "sec6-counterex2", "role": "A"})
    B = subsets.interval_union(lambda: ((m.min - factorial(n), m.min) for n, m in _enumerate(ms, 1)),
                               {"kind": "catalog", "name": "sec6-counterex2", "role": "B"})
    return ms, A, B


def _iter(ms, start):
    for n in _count(start):
        yield ms[n]


def _enumerate(ms, start):
    for n in _count(start):
        yield n, ms[n]


def even_factorial_measures():
    def gen():
        yield Measure([])
        for n in _count(1):
            yield Measure([(2 * factorial(n), 2 * factorial(n + 1), Fraction(1, factorial(n) * n), 2)])
    return MeasureSeq(gen, {"kind": "catalog", "name": "sec6-counterex3"}, name="even_factorial")


# builds

def _build_identity(steps):
    return {"f": Identity()}, 2 ** steps


def _build_sec3_ex1(steps):
    return {"f": dyadic_plateau(), "id": Identity()}, 2 ** steps


def _build_sec3_ex2(steps):
    f, g = ex2_pair()
    return {"f": f, "g": g}, nth(ex2_checkpoints(), steps)


def _build_sec6_ex1(steps):
    return {"f": factorial_blocks()}, factorial(steps + 1)


def _build_sec6_ex2(steps):
    return {"f": factorial_sum_plateau()}, factorial_sums(steps)


def _build_sec6_ex3(steps):
    return {"f": doubling_plateau()}, nth(doubling_checkpoints(), steps)


def _build_antihom(steps):
    ms = antihom_measures()
    g = weight_from_measures(ms)
    return {"measures": ms, "g": g}, ms[steps].max


def _build_counterex1(steps):
    A = subsets.dyadic_runs("after")
    B = subsets.dyadic_runs("before")
    return {"measures": split_dyadic_measures(), "A": A, "B": B}, 2 ** (steps + 1)


def _build_counterex2(steps):
    ms, A, B = translated_supports()
    return {"measures": ms, "A": A, "B": B}, ms[steps].max + 1


def _build_counterex3(steps):
    A = subsets.arithmetic(2, 2)
    A.descriptor, A.name = {"kind": "arithmetic", "start": 2, "step": 2}, "positive_evens"
    return {"measures": even_factorial_measures(), "A": A, "B": subsets.odds()}, 2 * factorial(steps + 1)


BUILDERS = {
    "identity": _build_identity,
    "sec3-ex1": _build_sec3_ex1,
    "sec3-ex2": _build_sec3_ex2,
    "sec6-ex1": _build_sec6_ex1,
    "sec6-ex2": _build_sec6_ex2,
    "sec6-ex3": _build_sec6_ex3,
    "sec7-antihom": _build_antihom,
    "sec6-counterex1": _build_counterex1,
    "sec6-counterex2": _build_counterex2,
    "sec6-counterex3": _build_counterex3,
}


def manifest():
    text = resources.files("diw").joinpath("catalog.json").read_text(encoding="utf-8")
    return json.loads(text)


def names():
    return [e["name"] for e in manifest()["entries"]]


def get(name, steps=None):
    entries = {e["name"]: e for e in manifest()["entries"]}
    if name not in entries or name not in BUILDERS:
        raise CatalogLookupError(f"unknown catalog entry {name!r}; known: {', '.join(sorted(entries))}")
    meta = entries[name]
    steps = meta["default_steps"] if steps is None else int(steps)
    payload, horizon = BUILDERS[name](steps)
    return CatalogEntry(name, payload, meta["expectations"], meta["default_steps"], horizon, steps,
                        meta.get("title", ""))


def role_of(name, role, steps=None):
    """A single payload object, as referenced by ``{"kind": "catalog", "name", "role"}``."""
    entry = get(name, steps)
    if role is None:
        role = "f" if "f" in entry.payload else "measures"
    if role not in entry.payload:
        raise CatalogLookupError(f"{name} has no role {role!r}; roles: {', '.join(entry.payload)}")
    return entry.payload[role]


# verification

def _measure_values(entry, exp):
    """Exact μ_n(X) against a closed form, on measures n in [from, steps)."""
    ms, X = entry.payload["measures"], entry.payload[exp["set"]]
    rule = exp["rule"]
    bad, rows = [], []
    for n in range(exp.get("from", 0), entry.steps):
        v = ms[n].of(X)
        if rule == "one_minus_dyadic":
            ok = v == 1 - Fraction(1, 2 ** n)
        elif rule == "at_most_dyadic":
            ok = v <= Fraction(1, 2 ** n)
        elif rule == "one":
            ok = v == 1
        elif rule == "zero":
            ok = v == 0
        else:
            raise ValueError(f"unknown measure rule {rule!r}")
        rows.append((n, v))
        if not ok:
            bad.append(n)
    if bad:
        return Verdict(Status.FAILS, rows[bad[0] - exp.get("from", 0)][1], bad, {}, "RULE_BROKEN",
                       {"values": rows})
    return Verdict(Status.HOLDS, None, [], {"rule": rule}, "RULE_MATCHES", {"values": rows})


def _eval_check(entry, exp):
    w = entry.payload[exp.get("target", "f")]
    got = w(exp["n"])
    if got == exp["value"]:
        return Verdict(Status.HOLDS, Fraction(got), [], {"n": exp["n"], "value": got}, "VALUE_MATCHES")
    return Verdict(Status.FAILS, Fraction(got), [exp["n"]], {"n": exp["n"], "value": got}, "VALUE_DIFFERS")


def run_expectation(entry, exp):
    test = exp["test"]
    opts = dict(exp.get("options", {}))
    if test in WEIGHT_TESTS:
        return WEIGHT_TESTS[test](entry.payload[exp.get("target", "f")], horizon=entry.horizon, **opts)
    if test == "peer_equivalence_test":
        a, b = exp["targets"]
        return ch.peer_equivalence_test(entry.payload[a], entry.payload[b], horizon=entry.horizon)
    if test == "nic_condition_check":
        return nic_condition_check(entry.payload["measures"], horizon=entry.steps)[exp["condition"]]
    if test == "d_conditions_check":
        return d_conditions_check(entry.payload["measures"], horizon=entry.steps)[exp["condition"]]
    if test == "dominance_check":
        C, B = (entry.payload[r] for r in exp["targets"])
        return dominance_check(C, B, min(entry.horizon, exp.get("max_horizon", 10 ** 5)))
    if test == "measure_values":
        return _measure_values(entry, exp)
    if test == "eval":
        return _eval_check(entry, exp)
    raise ValueError(f"unknown expectation test {test!r}")


def _cert_matches(verdict, want):
    for k, v in want.items():
        got = verdict.certificate.get(k)
        if got is None:
            return False
        if isinstance(v, list):
            if Fraction(got) != Fraction(*v):
                return False
        elif got != v:
            return False
    return True


def verify(name, steps=None):
    """Run every expectation of an entry; mismatches are report rows, not errors."""
    entry = get(name, steps)
    rows = []
    for exp in entry.expectations:
        try:
            v = run_expectation(entry, exp)
            got, margin = v.status.value, v.margin
            ok = got == exp.get("expect", Status.HOLDS.value)
            if ok and "certificate" in exp:
                ok = _cert_matches(v, exp["certificate"])
            err = None
        except (HorizonError, ValueError, ArithmeticError) as exc:
            got, margin, ok, err = "ERROR", None, False, str(exc)
            v = None
        rows.append({"test": exp["test"], "target": exp.get("target") or exp.get("targets") or exp.get("condition"),
                     "condition": exp.get("condition"), "expected": exp.get("expect", Status.HOLDS.value), "got": got,
                     "margin": margin, "match": ok, "note": exp.get("note", ""), "error": err,
                     "label": None if v is None else v.label,
                     "certificate": None if v is None else v.certificate})
    return {"name": name, "steps": entry.steps, "horizon": entry.horizon,
            "matched": sum(r["match"] for r in rows), "total": len(rows),
            "ok": all(r["match"] for r in rows), "rows": rows}
