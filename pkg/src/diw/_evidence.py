"""Shared heuristics that turn a finite run of exact values into a verdict.

Two shapes recur: "is this sequence bounded or climbing?" and "is this
sequence shrinking to zero?".  Both compare the head of the run against its
tail; the thresholds are parameters, never hidden constants.
"""

from dataclasses import dataclass
from fractions import Fraction

from .verdict import Status


def halves(points):
    mid = (len(points) + 1) // 2
    return points[:mid], points[mid:]


def thirds(points):
    third = max(1, len(points) // 3)
    return points[:third], points[-third:]


def rung_above(x, step=1):
    """Least multiple of ``step`` strictly above x."""
    return (Fraction(x) // step + 1) * step


def escalations(points, step=1):
    """Greedy record chain: each record beats the previous one by at least ``step``."""
    records = []
    for n, value in points:
        if not records or value >= records[-1][1] + step:
            records.append((n, value))
    return records


@dataclass
class GrowthReport:
    status: Status
    head_max: Fraction
    tail_max: Fraction
    records: list

    @property
    def witnesses(self):
        return [n for n, _ in self.records]


def bounded_or_escalating(points, k_witnesses=3, step=1):
    """Classify ``[(n, value), ...]`` as bounded (HOLDS) or climbing (FAILS).

    HOLDS when the second half never reaches the ladder rung above the
    first half's maximum (rungs are multiples of ``step``).  FAILS when a
    chain of at least ``k_witnesses`` records, each ``step`` above the last,
    runs into the second half.
    """
    if len(points) < 2:
        top = points[0][1] if points else Fraction(0)
        return GrowthReport(Status.INCONCLUSIVE, top, top, [])
    head, tail = halves(points)
    head_max = max(v for _, v in head)
    tail_max = max(v for _, v in tail)
    records = escalations(points, step)
    if tail_max < rung_above(head_max, step):
        status = Status.HOLDS
    elif len(records) >= k_witnesses and records[-1][0] >= tail[0][0]:
        status = Status.FAILS
    else:
        status = Status.INCONCLUSIVE
    return GrowthReport(status, head_max, tail_max, records)


@dataclass
class DecayReport:
    status: Status
    head_max: Fraction
    tail_sup: Fraction
    tail_inf: Fraction


def vanishing_evidence(values, holds_ratio=Fraction(1, 16), floor=Fraction(1, 1024),
                       fails_ratio=Fraction(1, 2), require_decreasing=False, reference="head"):
    """Evidence that a nonnegative sequence tends to 0.

    ``reference="head"`` compares the last third with the max of the first
    third.  HOLDS: tail sup below ``floor``, or below ``holds_ratio * head_max``
    (and, if asked, strictly decreasing on the tail).  FAILS: tail inf stays
    at or above ``fails_ratio * head_max`` and is positive.

    ``reference="half"`` is a ratio test for slowly decaying sequences: the
    last value is compared with the value at half the run.  A sequence
    shrinking like c/n loses about half between the two; one settling at a
    positive limit keeps most of it.  Early transients do not matter here.
    """
    values = [Fraction(v) for v in values]
    if not values:
        return DecayReport(Status.INCONCLUSIVE, Fraction(0), Fraction(0), Fraction(0))
    head, tail = thirds(values)
    head_max, tail_sup, tail_inf = max(head), max(tail), min(tail)
    decreasing = all(a > b for a, b in zip(tail, tail[1:]))
    if reference == "half":
        ref, top, low = values[(len(values) - 1) // 2], values[-1], values[-1]
    elif reference == "head":
        ref, top, low = head_max, tail_sup, tail_inf
    else:
        raise ValueError(f"unknown reference {reference!r}")
    if top < floor:
        status = Status.HOLDS
    elif len(values) >= 3 and top < holds_ratio * ref and (decreasing or not require_decreasing):
        status = Status.HOLDS
    elif low > 0 and low >= fails_ratio * ref:
        status = Status.FAILS
    else:
        status = Status.INCONCLUSIVE
    return DecayReport(status, head_max, tail_sup, tail_inf)
