"""Exact weighted density profiles and the evidence built on them."""

import csv
from dataclasses import dataclass, field
from fractions import Fraction

from . import subsets
from ._evidence import vanishing_evidence
from .errors import HorizonError, PreconditionError, ZeroWeightError
from .verdict import Status, Verdict

DENSE_LIMIT = 200_000


@dataclass
class DensityProfile:
    rows: list = field(default_factory=list)  # (n, count, weight, Fraction)

    @property
    def checkpoints(self):
        return [r[0] for r in self.rows]

    def ratio_at(self, n):
        for row in self.rows:
            if row[0] == n:
                return row[3]
        raise KeyError(n)

    def csv_rows(self):
        yield ["n", "count", "weight", "ratio_num", "ratio_den", "ratio_float"]
        for n, c, w, r in self.rows:
            yield [n, c, w, r.numerator, r.denominator, f"{float(r):.6f}"]

    def write_csv(self, fh):
        csv.writer(fh, lineterminator="\n").writerows(self.csv_rows())


def profile(A, w, checkpoints):
    rows = []
    for n in sorted(set(int(c) for c in checkpoints)):
        wn = w(n)
        if wn == 0:
            raise ZeroWeightError(n)
        c = A.count(n)
        rows.append((n, c, wn, Fraction(c, wn)))
    return DensityProfile(rows)


def sample_points(w, horizon, start=0, dense_limit=DENSE_LIMIT):
    """Every n in [start, horizon] if that is cheap, else structural points c-1, c, c+1."""
    if horizon - start <= dense_limit:
        return list(range(start, horizon + 1))
    pts = set()
    for c in w.checkpoints(horizon):
        pts.update((c - 1, c, c + 1))
    p = 1
    while p <= horizon:
        pts.add(p)
        p *= 2
    pts.add(horizon)
    return sorted(x for x in pts if start <= x <= horizon)


def _thin(points, max_points):
    if len(points) <= max_points:
        return points
    stride = -(-len(points) // max_points)
    kept = points[::stride]
    if kept[-1] != points[-1]:
        kept.append(points[-1])
    return kept


def membership_evidence(A, w, horizon, holds_ratio=Fraction(1, 16), floor=Fraction(1, 1024),
                        fails_ratio=Fraction(1, 2), max_points=4096):
    """Prefix evidence for A ∈ Z_w, read at the enumeration points a_k ≤ horizon.

    The ratio at a_k is card(A ∩ a_k)/w(a_k) = k/w(a_k).  If A runs out below
    the horizon, powers of 2 past its last element are appended (the count
    is frozen there while the weight keeps growing).
    """
    if not w.monotone:
        raise PreconditionError("membership evidence needs a nondecreasing weight")
    elements = A.elements_below(horizon + 1)
    pts = list(elements)
    if A.finite_below(horizon + 1):
        p = 1
        while p <= horizon:
            if not pts or p > pts[-1]:
                pts.append(p)
            p *= 2
    pts = [n for n in pts if w(n) > 0]
    pts = _thin(pts, max_points)
    if not pts:
        return Verdict(Status.INCONCLUSIVE, label="NO_CHECKPOINTS")
    ratios = [Fraction(A.count(n), w(n)) for n in pts]
    rep = vanishing_evidence(ratios, holds_ratio, floor, fails_ratio)
    third = max(1, len(pts) // 3)
    tail_pts = pts[-third:]
    details = {"checkpoints": len(pts), "head_max": rep.head_max,
               "tail_sup": rep.tail_sup, "tail_inf": rep.tail_inf,
               "thresholds": {"holds_ratio": holds_ratio, "floor": floor, "fails_ratio": fails_ratio}}
    if rep.status is Status.FAILS:
        return Verdict(Status.FAILS, rep.tail_inf, tail_pts[-3:], {}, "TAIL_ABOVE_FLOOR", details)
    return Verdict(rep.status, rep.tail_sup, [], {}, "", details)


def rho_distance(u, v, w):
    """sup_n (1/w(n)) Σ_{i≤n} |u(i) − v(i)| for finite u, v."""
    diff = sorted(set(u) ^ set(v))
    if not diff:
        return Fraction(0)
    best, running, j = Fraction(0), 0, 0
    for n in range(diff[-1] + 1):
        while j < len(diff) and diff[j] <= n:
            running += 1
            j += 1
        wn = w(n)
        if wn == 0:
            if running:
                raise ZeroWeightError(n)
            continue
        best = max(best, Fraction(running, wn))
    return best


def dominance_check(C, B, horizon):
    """card(C ∩ n) ≤ card(B ∩ n) for every n ≤ horizon.

    The difference can only grow just after an element of C, so those are
    the only n that need checking.
    """
    for c in C.elements_below(horizon):
        n = c + 1
        cc, cb = C.count(n), B.count(n)
        if cc > cb:
            return Verdict(Status.FAILS, Fraction(cb - cc), [n], {"first_violation": n},
                           "COUNT_EXCEEDS", {"count_C": cc, "count_B": cb})
    return Verdict(Status.HOLDS, None, [], {"horizon": horizon}, "DOMINATED")


def pushforward(A, W, direction, horizon):
    """Image {a_n : n ∈ W} or preimage {n : a_n ∈ W}, truncated to values ≤ horizon."""
    if direction == "image":
        out = []
        for k in W:
            try:
                a = A[k]
            except HorizonError:
                raise HorizonError(f"{A.name} has no element of index {k}") from None
            if a > horizon:
                break
            out.append(a)
    elif direction == "preimage":
        out = [n for n, a in enumerate(A.elements_below(horizon + 1)) if a in W]
    else:
        raise ValueError(f"direction must be 'image' or 'preimage', not {direction!r}")
    return subsets.finite(out)
