"""Measure sequences with finite disjoint supports, and their link to simple density weights."""

from dataclasses import dataclass
from fractions import Fraction
from itertools import count as _count
from math import ceil

from ._evidence import bounded_or_escalating, vanishing_evidence
from .errors import DescriptorError, HorizonError, PreconditionError
from .subsets import Arithmetic
from .verdict import Status, Verdict
from .weights import Plateau


@dataclass(frozen=True)
class Segment:
    """Uniform mass ``atom`` on every point of ``range(lo, hi, step)``."""

    lo: int
    hi: int
    atom: Fraction
    step: int = 1

    @property
    def points(self):
        return range(self.lo, self.hi, self.step)

    @property
    def size(self):
        return max(0, (self.hi - self.lo + self.step - 1) // self.step)

    @property
    def last(self):
        return self.lo + (self.size - 1) * self.step

    @property
    def total(self):
        return self.atom * self.size


class Measure:
    """A finitely supported measure made of uniform segments in increasing order."""

    def __init__(self, segments):
        segs = [Segment(int(s[0]), int(s[1]), Fraction(s[2]), int(s[3]) if len(s) > 3 else 1)
                if not isinstance(s, Segment) else s for s in segments]
        segs = [s for s in segs if s.size > 0]
        for a, b in zip(segs, segs[1:]):
            if b.lo <= a.last:
                raise DescriptorError("measure segments overlap or are out of order")
        if any(s.atom <= 0 for s in segs):
            raise DescriptorError("atom masses must be positive")
        self.segments = segs

    @property
    def empty(self):
        return not self.segments

    @property
    def min(self):
        return self.segments[0].lo

    @property
    def max(self):
        return self.segments[-1].last

    @property
    def total(self):
        return sum((s.total for s in self.segments), Fraction(0))

    @property
    def max_atom(self):
        return max((s.atom for s in self.segments), default=Fraction(0))

    @property
    def atom(self):
        """The common atom a_n (the first segment's when not uniform)."""
        return self.segments[0].atom if self.segments else Fraction(0)

    def is_interval(self):
        if not self.segments:
            return False
        if any(s.step != 1 for s in self.segments if s.size > 1):
            return False
        return all(b.lo == a.last + 1 for a, b in zip(self.segments, self.segments[1:]))

    def is_uniform(self):
        return len({s.atom for s in self.segments}) <= 1

    def of(self, A):
        """μ(A) for a SubsetStream or a plain iterable of naturals."""
        total = Fraction(0)
        for s in self.segments:
            total += _hits(A, s) * s.atom
        return total

    def to_json(self):
        out = []
        for s in self.segments:
            row = {"lo": s.lo, "hi": s.hi, "mass_num": s.atom.numerator, "mass_den": s.atom.denominator}
            if s.step != 1:
                row["step"] = s.step
            out.append(row)
        return out


def _hits(A, s):
    """card(A ∩ range(s.lo, s.hi, s.step))."""
    if s.step == 1 and hasattr(A, "count"):
        return A.count(s.hi) - A.count(s.lo)
    if isinstance(A, Arithmetic):
        if A.step % s.step == 0:
            # every element of A has the same residue mod s.step
            return A.count(s.hi) - A.count(s.lo) if (A.start - s.lo) % s.step == 0 else 0
        if s.step % A.step == 0 and s.lo >= A.start:
            return s.size if (s.lo - A.start) % A.step == 0 else 0
    if hasattr(A, "elements_below"):
        return sum(1 for x in A.elements_below(s.hi) if x >= s.lo and (x - s.lo) % s.step == 0)
    return sum(1 for x in A if s.lo <= x < s.hi and (x - s.lo) % s.step == 0)


class MeasureSeq:
    """Lazily generated sequence of measures μ_0, μ_1, ... with disjoint, ordered supports."""

    def __init__(self, factory, descriptor=None, name="measures"):
        if not callable(factory):
            listed = list(factory)
            factory = lambda: iter(listed)
        self._factory = factory
        self._it = None
        self._cache = []
        self._done = False
        self.descriptor = descriptor
        self.name = name

    def _pull(self):
        if self._done:
            return False
        if self._it is None:
            self._it = iter(self._factory())
        try:
            m = next(self._it)
        except StopIteration:
            self._done = True
            return False
        if not isinstance(m, Measure):
            m = Measure(m)
        prev = next((p for p in reversed(self._cache) if not p.empty), None)
        if prev is not None and not m.empty and m.min <= prev.max:
            raise DescriptorError(f"{self.name}: support {len(self._cache)} is not past the previous one")
        self._cache.append(m)
        return True

    def __getitem__(self, n):
        while len(self._cache) <= n and self._pull():
            pass
        if n >= len(self._cache):
            raise HorizonError(f"{self.name} has only {len(self._cache)} measures")
        return self._cache[n]

    def prefix(self, count):
        while len(self._cache) < count and self._pull():
            pass
        return self._cache[:count]

    def to_json(self, count=None):
        if count is None:
            if self.descriptor is not None:
                return self.descriptor
            raise DescriptorError(f"{self.name} is unbounded; pass a level count")
        return [m.to_json() for m in self.prefix(count)]


def from_json(rows):
    """Build a finite MeasureSeq from ``[[{lo, hi, mass_num, mass_den[, step]}, ...], ...]``."""
    out = []
    for segs in rows:
        if isinstance(segs, dict):
            segs = [segs]
        out.append(Measure([(s["lo"], s["hi"], Fraction(s["mass_num"], s["mass_den"]), s.get("step", 1))
                            for s in segs]))
    return MeasureSeq(out, {"kind": "measures", "levels": rows})


def farah_measures(g, level_count, limit=None):
    """μ_k uniform on [n_k, n_{k+1}) with atom 1/g(n_k), n_k = min{n : g(n) ≥ 2^k}.

    Empty levels are kept so the indices line up with the thresholds 2^k.
    Stops early if g does not reach the next threshold below ``limit``.
    """
    ns = []
    for k in range(level_count + 1):
        nk = g.first_at_least(2 ** k, limit=limit)
        if nk is None:
            break
        ns.append(int(nk))
    levels = []
    for k in range(len(ns) - 1):
        gk = g(ns[k])
        levels.append(_level_measure(ns[k], ns[k + 1], Fraction(1, gk)))
    ms = MeasureSeq(levels, name=f"farah({g.name})")
    ms.thresholds = ns
    return ms


def _level_measure(lo, hi, atom):
    m = Measure([(lo, hi, atom)]) if hi > lo else Measure([])
    m.interval = (lo, hi)
    m.level_atom = atom
    return m


def weight_from_measures(ms, levels=None, check=True):
    """g = 1/a_0 on [0, max I_0] and g = 1/a_{n+1} on (max I_n, max I_{n+1}].

    A non-integer 1/a_n is rounded up; the list of rounded levels is kept on
    the result as ``ceilings``.  Past the last generated measure the weight
    raises HorizonError.
    """
    if check:
        sample = ms.prefix(levels if levels is not None else 24)
        for n, m in enumerate(sample):
            if not m.is_interval():
                raise PreconditionError(f"support of measure {n} is not an interval")
            if not m.is_uniform():
                raise PreconditionError(f"measure {n} is not uniform on its support")
            if n and m.atom > sample[n - 1].atom:
                raise PreconditionError(f"atoms increase at measure {n}")
    ceilings = []

    def inv(a, n):
        v = 1 / a
        if v.denominator != 1:
            ceilings.append(n)
        return ceil(v)

    def pieces():
        prev_max = None
        for n in (_count() if levels is None else range(levels)):
            try:
                m = ms[n]
            except HorizonError:
                return
            if prev_max is None:
                yield 0, m.max + 1, inv(m.atom, n)
            else:
                yield prev_max + 1, m.max + 1, inv(m.atom, n)
            prev_max = m.max

    w = Plateau(pieces, gap="error", name=f"weight({ms.name})")
    w.ceilings = ceilings
    return w


def _atoms(ms, horizon):
    return ms.prefix(horizon)


NIC_HOLDS_RATIO = Fraction(2, 3)
NIC_FAILS_RATIO = Fraction(3, 4)


def nic_condition_check(ms, horizon=12, holds_ratio=NIC_HOLDS_RATIO, fails_ratio=NIC_FAILS_RATIO):
    """Conditions (i)..(vi) on the first ``horizon`` measures.

    (i), (ii), (vi) are exact on the prefix; (iii), (iv), (v) are evidence
    from the half-run ratio test: the last value against the value halfway.
    """
    prefix = [m for m in _atoms(ms, horizon)]
    out = {}

    bad = next((n for n, m in enumerate(prefix) if not m.is_interval()), None)
    out["i"] = (Verdict(Status.HOLDS, None, [], {}, "INTERVALS") if bad is None else
                Verdict(Status.FAILS, None, [bad], {"first_bad": bad}, "NOT_AN_INTERVAL"))

    bad = next((n for n, m in enumerate(prefix) if not m.is_uniform()), None)
    out["ii"] = (Verdict(Status.HOLDS, None, [], {}, "UNIFORM") if bad is None else
                 Verdict(Status.FAILS, None, [bad], {"first_bad": bad}, "NOT_UNIFORM"))

    live = [(n, m) for n, m in enumerate(prefix) if not m.empty]
    margins = [(n, m.atom * m.min) for n, m in live]
    out["iii"] = _decay_verdict(margins, holds_ratio, True, "a_n*min(I_n)", fails_ratio, "half")
    if any(m.atom <= 0 for _, m in live):
        out["iii"] = Verdict(Status.FAILS, Fraction(0), [next(n for n, m in live if m.atom <= 0)],
                             {}, "ZERO_ATOM")
    out["iv"] = _decay_verdict([(n, m.atom) for n, m in live], holds_ratio, True, "a_n", fails_ratio, "half")
    v = _decay_verdict([(n, m.total) for n, m in live], holds_ratio, False, "mu_n(omega)", fails_ratio, "half")
    out["v"] = _negate(v, [(n, m.total) for n, m in live])

    bad = next((n for (_, a), (n, b) in zip(live, live[1:]) if b.atom > a.atom), None)
    out["vi"] = (Verdict(Status.HOLDS, None, [], {}, "NONINCREASING") if bad is None else
                 Verdict(Status.FAILS, None, [bad], {"first_increase": bad}, "ATOMS_INCREASE"))
    return out


def _decay_verdict(series, holds_ratio, decreasing, what, fails_ratio=Fraction(1, 2), reference="head"):
    if not series:
        return Verdict(Status.INCONCLUSIVE, None, [], {}, "EMPTY")
    rep = vanishing_evidence([v for _, v in series], holds_ratio=holds_ratio, fails_ratio=fails_ratio,
                             require_decreasing=decreasing, reference=reference)
    details = {"series": series, "quantity": what, "head_max": rep.head_max,
               "tail_sup": rep.tail_sup, "tail_inf": rep.tail_inf}
    third = max(1, len(series) // 3)
    if rep.status is Status.FAILS:
        return Verdict(Status.FAILS, rep.tail_inf, [n for n, _ in series[-third:]], {},
                       "NOT_VANISHING", details)
    return Verdict(rep.status, rep.tail_sup, [], {}, "VANISHING" if rep.status is Status.HOLDS else "",
                   details)


def _negate(v, series):
    """Turn vanishing evidence into evidence for "does not tend to 0"."""
    third = max(1, len(series) // 3)
    tail_inf = min((x for _, x in series[-third:]), default=None)
    if v.status is Status.FAILS:
        return Verdict(Status.HOLDS, tail_inf, [], {}, "BOUNDED_AWAY", v.details)
    if v.status is Status.HOLDS:
        return Verdict(Status.FAILS, v.margin, [n for n, _ in series[-third:]], {}, "VANISHING", v.details)
    return Verdict(Status.INCONCLUSIVE, tail_inf, [], {}, "", v.details)


def d_conditions_check(ms, horizon=12, k_witnesses=3):
    """D1 bounded total masses, D2 vanishing max atoms, D3 total masses not vanishing."""
    live = [(n, m) for n, m in enumerate(_atoms(ms, horizon)) if not m.empty]
    totals = [(n, m.total) for n, m in live]
    out = {}
    rep = bounded_or_escalating(totals, k_witnesses)
    sup = max((v for _, v in totals), default=None)
    if rep.status is Status.FAILS:
        out["D1"] = Verdict(Status.FAILS, sup, rep.witnesses, {"records": rep.records}, "MASSES_UNBOUNDED")
    else:
        out["D1"] = Verdict(rep.status, sup, [], {"sup": sup} if rep.status is Status.HOLDS else {}, "")
    out["D2"] = _decay_verdict([(n, m.max_atom) for n, m in live], Fraction(1, 16), False, "max atom")
    out["D3"] = _negate(_decay_verdict(totals, Fraction(1, 16), False, "mu_n(omega)"), totals)
    return out
