"""Strictly increasing enumerations of subsets of the naturals, cached lazily."""

from bisect import bisect_left
from itertools import count as _count
from math import isqrt

from .errors import DescriptorError, HorizonError, PreconditionError


class SubsetStream:
    """A (possibly infinite) set ``{a_0 < a_1 < ...}`` given by a generator factory.

    ``factory()`` must return a fresh iterator each call; the stream keeps an
    append-only prefix cache and never restarts the generator.
    """

    def __init__(self, factory, descriptor=None, name=None):
        self._factory = factory
        self._it = None
        self._prefix = []
        self._done = False
        self.descriptor = descriptor
        self.name = name or (descriptor or {}).get("kind", "stream")

    def __repr__(self):
        return f"SubsetStream({self.name}, cached={len(self._prefix)})"

    def _pull(self):
        if self._done:
            return False
        if self._it is None:
            self._it = iter(self._factory())
        try:
            x = next(self._it)
        except StopIteration:
            self._done = True
            return False
        x = int(x)
        if x < 0 or (self._prefix and x <= self._prefix[-1]):
            raise PreconditionError(f"{self.name}: enumeration not strictly increasing at {x}")
        self._prefix.append(x)
        return True

    def fill_to_value(self, n):
        """Cache every element < n (and one more, if it exists)."""
        while (not self._prefix or self._prefix[-1] < n) and self._pull():
            pass

    def fill_to_index(self, k):
        while len(self._prefix) <= k and self._pull():
            pass

    def count(self, n):
        """card(A ∩ [0, n))."""
        self.fill_to_value(n)
        return bisect_left(self._prefix, n)

    def __getitem__(self, k):
        self.fill_to_index(k)
        if k >= len(self._prefix):
            raise HorizonError(f"{self.name} has only {len(self._prefix)} elements")
        return self._prefix[k]

    def __contains__(self, x):
        self.fill_to_value(x + 1)
        i = bisect_left(self._prefix, x)
        return i < len(self._prefix) and self._prefix[i] == x

    def __iter__(self):
        i = 0
        while True:
            self.fill_to_index(i)
            if i >= len(self._prefix):
                return
            yield self._prefix[i]
            i += 1

    def elements_below(self, n):
        self.fill_to_value(n)
        return self._prefix[:bisect_left(self._prefix, n)]

    def next_at_least(self, n):
        """Least element >= n, or None if the stream ends first."""
        self.fill_to_value(n)
        i = bisect_left(self._prefix, n)
        return self._prefix[i] if i < len(self._prefix) else None

    def finite_below(self, horizon):
        """True when the stream provably ends before ``horizon``."""
        self.fill_to_value(horizon)
        return self._done and (not self._prefix or self._prefix[-1] < horizon)

    @property
    def exhausted(self):
        return self._done

    def to_json(self):
        if self.descriptor is None:
            raise DescriptorError(f"{self.name} has no serializable descriptor")
        return self.descriptor


class Arithmetic(SubsetStream):
    """``{start, start+step, ...}`` with closed-form counting."""

    def __init__(self, start=0, step=1):
        if start < 0 or step < 1:
            raise DescriptorError("arithmetic progressions need start >= 0 and step >= 1")
        super().__init__(lambda: _count(start, step),
                         {"kind": "arithmetic", "start": start, "step": step})
        self.start, self.step = start, step

    def count(self, n):
        return 0 if n <= self.start else (n - self.start - 1) // self.step + 1

    def __contains__(self, x):
        return x >= self.start and (x - self.start) % self.step == 0

    def __getitem__(self, k):
        return self.start + k * self.step

    def next_at_least(self, n):
        return self.start if n <= self.start else self.start + self.count(n) * self.step

    def elements_below(self, n):
        return list(range(self.start, max(self.start, n), self.step))

    def finite_below(self, horizon):
        return False


def arithmetic(start=0, step=1):
    return Arithmetic(start, step)


def evens():
    s = arithmetic(0, 2)
    s.descriptor, s.name = {"kind": "evens"}, "evens"
    return s


def odds():
    s = arithmetic(1, 2)
    s.descriptor, s.name = {"kind": "odds"}, "odds"
    return s


def naturals(start=0):
    s = arithmetic(start, 1)
    s.descriptor, s.name = {"kind": "naturals", "start": start}, "naturals"
    return s


def squares():
    return SubsetStream(lambda: (i * i for i in _count()), {"kind": "squares"})


def powers(base=2):
    return SubsetStream(lambda: (base ** i for i in _count()), {"kind": "powers", "base": base})


def finite(elements):
    elements = sorted(set(int(x) for x in elements))
    return SubsetStream(lambda: iter(elements), {"kind": "finite", "elements": elements})


def empty():
    return finite([])


def interval_union(intervals, descriptor=None):
    """Union of disjoint half-open ``[lo, hi)`` blocks listed in increasing order.

    ``intervals`` may be a list or a zero-argument callable returning an
    iterator (for unbounded unions).
    """
    return BlockUnion(intervals, name="intervals", descriptor=descriptor)


def dyadic_runs(offset=0):
    """The set ``⋃_k [2^k + offset(k)...)``: helper for the two dyadic run families.

    ``offset='after'`` gives ⋃_{k>=1} [2^k, 2^k+k); ``'before'`` gives ⋃_{k>=1} [2^k-k, 2^k).
    """
    if offset == "after":
        blocks = lambda: ((2 ** k, 2 ** k + k) for k in _count(1))
    elif offset == "before":
        blocks = lambda: ((2 ** k - k, 2 ** k) for k in _count(1))
    else:
        raise DescriptorError(f"unknown dyadic run side {offset!r}")
    return interval_union(blocks, {"kind": "dyadic_runs", "side": offset})


def from_predicate(pred, name="predicate"):
    return SubsetStream(lambda: (n for n in _count() if pred(n)), None, name)


def _ad_code(bits):
    return (1 << len(bits)) - 1 + (int(bits, 2) if bits else 0)


def parse_word(word):
    """Parse ``'01(10)'`` into (prefix, period); no parentheses means a finite word."""
    word = word.strip()
    if "(" in word:
        if not word.endswith(")"):
            raise DescriptorError(f"bad periodic word {word!r}")
        prefix, period = word[:-1].split("(", 1)
        if not period:
            raise DescriptorError("empty period")
    else:
        prefix, period = word, ""
    if set(prefix + period) - {"0", "1"}:
        raise DescriptorError(f"word {word!r} is not binary")
    return prefix, period


def word_bits(word):
    """Iterator over the letters of a finite or eventually periodic word."""
    prefix, period = parse_word(word)
    yield from (int(c) for c in prefix)
    while period:
        yield from (int(c) for c in period)


def ad_branch(word):
    """Codes of all prefixes of a branch of the binary tree.

    The code of a finite word w is ``2^|w| - 1 + int(w, 2)`` (length-lexicographic),
    so two branches whose first difference is at index d share exactly d+1 codes.
    """
    parse_word(word)

    def gen():
        bits = ""
        yield _ad_code(bits)
        for b in word_bits(word):
            bits += str(b)
            yield _ad_code(bits)
    return SubsetStream(gen, {"kind": "ad_branch", "word": word}, name=f"branch[{word}]")


def is_square(n):
    return isqrt(n) ** 2 == n


class BlockUnion(SubsetStream):
    """Union of disjoint half-open blocks ``[lo, hi)`` given in increasing order.

    ``blocks`` is a list, or a zero-argument callable returning an iterator
    for unbounded unions (loaded only as far as queries reach).  Counting
    and membership use prefix sums over the blocks, so blocks with
    astronomically many elements cost nothing until their elements are listed.
    """

    def __init__(self, blocks, name="blocks", descriptor=None):
        self.name = name
        self._source = blocks if callable(blocks) else (lambda: iter(list(blocks)))
        self._blocks_it = None
        self._blocks_done = False
        self.blocks, self._starts, self._cum = [], [], [0]
        if not callable(blocks):
            self._load_all()
            descriptor = descriptor or {"kind": "intervals", "blocks": [[lo, hi] for lo, hi in self.blocks]}

        def gen():
            i = 0
            while self._load_index(i):
                lo, hi = self.blocks[i]
                yield from range(lo, hi)
                i += 1
        super().__init__(gen, descriptor, name)

    def _load_one(self):
        if self._blocks_done:
            return False
        if self._blocks_it is None:
            self._blocks_it = iter(self._source())
        for lo, hi in self._blocks_it:
            lo, hi = int(lo), int(hi)
            if hi <= lo:
                continue
            if self.blocks and lo < self.blocks[-1][1]:
                raise PreconditionError(f"{self.name}: blocks overlap at {lo}")
            self.blocks.append((lo, hi))
            self._starts.append(lo)
            self._cum.append(self._cum[-1] + hi - lo)
            return True
        self._blocks_done = True
        return False

    def _load_all(self):
        while self._load_one():
            pass

    def _load_index(self, i):
        while len(self.blocks) <= i and self._load_one():
            pass
        return i < len(self.blocks)

    def _load_past(self, n):
        while (not self.blocks or self.blocks[-1][0] <= n) and self._load_one():
            pass

    def count(self, n):
        self._load_past(n)
        i = bisect_left(self._starts, n)
        # blocks before index i start below n
        if i == 0:
            return 0
        lo, hi = self.blocks[i - 1]
        return self._cum[i - 1] + min(hi, n) - lo

    def __contains__(self, x):
        self._load_past(x)
        i = bisect_left(self._starts, x + 1) - 1
        return i >= 0 and self.blocks[i][0] <= x < self.blocks[i][1]

    def next_at_least(self, n):
        self._load_past(n)
        i = bisect_left(self._starts, n + 1) - 1
        if i >= 0 and n < self.blocks[i][1]:
            return max(n, self.blocks[i][0])
        return self.blocks[i + 1][0] if i + 1 < len(self.blocks) else None

    def __len__(self):
        self._load_all()
        return self._cum[-1]

    def finite_below(self, horizon):
        self._load_past(horizon)
        return self._blocks_done and (not self.blocks or self.blocks[-1][1] <= horizon)
