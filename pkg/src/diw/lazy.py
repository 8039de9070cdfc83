"""Factorial-valued integers that compare against ordinary ints without being expanded.

Interval endpoints such as ``(2*181441 + 1)!`` have millions of digits.  A
:class:`LazyFactorial` answers ``n < k! + s`` by multiplying ``1*2*...`` only
until the running product passes ``n``, which costs O(log n) steps.
"""

import math
from functools import total_ordering

# above this, k! is never materialized just to compare two lazy values
_MATERIALIZE_LIMIT = 3000


def _factorial_exceeds(k, bound):
    """True iff k! > bound."""
    if bound < 1:
        return True
    prod = 1
    for i in range(2, k + 1):
        prod *= i
        if prod > bound:
            return True
    return prod > bound


@total_ordering
class LazyFactorial:
    """The integer ``k! + shift``, expanded only on demand."""

    __slots__ = ("k", "shift", "_value")

    def __init__(self, k, shift=0):
        if k < 0:
            raise ValueError("factorial of a negative number")
        self.k = int(k)
        self.shift = int(shift)
        self._value = None

    def __int__(self):
        if self._value is None:
            self._value = math.factorial(self.k) + self.shift
        return self._value

    __index__ = __int__

    def exceeds(self, n):
        """True iff ``k! + shift > n``."""
        if self._value is not None:
            return self._value > n
        return _factorial_exceeds(self.k, n - self.shift)

    def __add__(self, other):
        if isinstance(other, int):
            return LazyFactorial(self.k, self.shift + other)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            return LazyFactorial(self.k, self.shift - other)
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, LazyFactorial):
            return self._cmp_lazy(other) == 0
        if isinstance(other, int):
            return self.exceeds(other - 1) and not self.exceeds(other)
        return NotImplemented

    def __lt__(self, other):
        if isinstance(other, LazyFactorial):
            return self._cmp_lazy(other) < 0
        if isinstance(other, int):
            return not self.exceeds(other - 1)
        return NotImplemented

    def __hash__(self):
        return hash(int(self)) if self.k <= _MATERIALIZE_LIMIT else hash((self.k, self.shift))

    def _cmp_lazy(self, other):
        if self.k == other.k:
            return (self.shift > other.shift) - (self.shift < other.shift)
        if max(self.k, other.k) <= _MATERIALIZE_LIMIT:
            a, b = int(self), int(other)
            return (a > b) - (a < b)
        # shifts are tiny next to k! at this size
        return -1 if self.k < other.k else 1

    def __repr__(self):
        if self.shift:
            return f"{self.k}!{self.shift:+d}"
        return f"{self.k}!"

    def to_json(self):
        return {"factorial": self.k, "shift": self.shift}


def as_int(x):
    return int(x)


def is_small(x, limit=10**60):
    """Cheap test that ``x`` is an ordinary-size integer."""
    if isinstance(x, LazyFactorial):
        return not x.exceeds(limit)
    return x <= limit
