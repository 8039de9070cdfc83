"""Nondecreasing ℕ→ℕ weight functions with memoized, monotone-checked evaluation."""

from bisect import bisect_left, bisect_right, insort
from fractions import Fraction
from math import floor, isqrt

from .errors import DescriptorError, HorizonError, InconclusiveError, PreconditionError
from .lazy import LazyFactorial


class WeightFn:
    """Base class.  Subclasses implement ``_eval(n)``.

    Every cache fill is compared against its evaluated neighbours, so the
    memo stays nondecreasing as a whole when ``monotone`` is set.
    """

    kind = "abstract"

    def __init__(self, monotone=True, descriptor=None, name=None):
        self.monotone = monotone
        self._memo = {}
        self._keys = []
        self._descriptor = descriptor
        self.name = name or self.kind

    def _eval(self, n):
        raise NotImplementedError

    def __call__(self, n):
        if n < 0:
            raise ValueError(f"weights are defined on ℕ, got {n}")
        memo = self._memo
        if n in memo:
            return memo[n]
        try:
            v = int(self._eval(n))
        except RecursionError as exc:
            raise DescriptorError(f"{self.name}: recursion did not terminate at n={n}") from exc
        if v < 0:
            raise DescriptorError(f"{self.name}: negative value {v} at n={n}")
        if self.monotone:
            self._check_neighbours(n, v)
        memo[n] = v
        return v

    def _check_neighbours(self, n, v):
        keys = self._keys
        if not keys or n > keys[-1]:
            if keys and self._memo[keys[-1]] > v:
                raise PreconditionError(f"{self.name} decreases between {keys[-1]} and {n}")
            keys.append(n)
            return
        i = bisect_left(keys, n)
        if i > 0 and self._memo[keys[i - 1]] > v:
            raise PreconditionError(f"{self.name} decreases between {keys[i - 1]} and {n}")
        if i < len(keys) and self._memo[keys[i]] < v:
            raise PreconditionError(f"{self.name} decreases between {n} and {keys[i]}")
        insort(keys, n)

    def values(self, start, stop):
        return [self(n) for n in range(start, stop)]

    def verify_monotone(self):
        """Full check of the evaluated prefix; returns the first bad index or None."""
        keys = sorted(self._memo)
        for a, b in zip(keys, keys[1:]):
            if self._memo[a] > self._memo[b]:
                return b
        return None

    def run_end(self, n):
        """Exclusive end of a stretch ``[n, e)`` on which the value is constant.

        The default is the trivial ``n + 1``; step functions know better.
        """
        return n + 1

    def checkpoints(self, horizon):
        """Structural indices ≤ horizon where behaviour changes (powers of 2 by default)."""
        out, p = [0], 1
        while p <= horizon:
            out.append(p)
            p *= 2
        return out

    def first_at_least(self, v, limit=None):
        """Least n with w(n) ≥ v (galloping + bisection); None if not found by ``limit``."""
        if self(0) >= v:
            return 0
        lo, hi = 0, 1
        while self(hi) < v:
            if limit is not None and hi >= limit:
                return None
            lo, hi = hi, hi * 2
            if limit is not None:
                hi = min(hi, limit)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self(mid) >= v:
                hi = mid
            else:
                lo = mid
        return hi

    def zero_prefix(self, limit=None):
        """Least n0 with w(n) > 0 for all n ≥ n0 (monotone weights only)."""
        return self.first_at_least(1, limit)

    def descriptor(self):
        if self._descriptor is None:
            raise DescriptorError(f"{self.name} has no serializable descriptor")
        return self._descriptor

    to_json = descriptor

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


class Identity(WeightFn):
    kind = "identity"

    def __init__(self):
        super().__init__(descriptor={"kind": "identity"})

    def __call__(self, n):
        if n < 0:
            raise ValueError(f"weights are defined on ℕ, got {n}")
        return n

    def first_at_least(self, v, limit=None):
        v = max(0, v)
        return v if limit is None or v <= limit else None


class Affine(WeightFn):
    kind = "affine"

    def __init__(self, a, b=0):
        if a < 0 or (a == 0 and b < 0):
            raise DescriptorError("affine weight must be nonnegative and nondecreasing")
        super().__init__(descriptor={"kind": "affine", "a": a, "b": b}, name=f"{a}n+{b}")
        self.a, self.b = int(a), int(b)

    def _eval(self, n):
        return self.a * n + self.b


class Constant(WeightFn):
    kind = "constant"

    def __init__(self, c):
        super().__init__(descriptor={"kind": "constant", "value": int(c)}, name=f"const{c}")
        self.c = int(c)

    def _eval(self, n):
        return self.c

    def run_end(self, n):
        return float("inf")


class FloorScale(WeightFn):
    """⌊c·base(n)⌋ for a positive rational c."""

    kind = "floor_scale"

    def __init__(self, c, base):
        c = Fraction(c)
        if c <= 0:
            raise DescriptorError("floor-scale factor must be positive")
        desc = None
        if base._descriptor is not None:
            desc = {"kind": "floor_scale", "c": [c.numerator, c.denominator], "base": base._descriptor}
        super().__init__(monotone=base.monotone, descriptor=desc, name=f"floor({c}*{base.name})")
        self.c, self.base = c, base

    def _eval(self, n):
        return floor(self.c * self.base(n))

    def run_end(self, n):
        return self.base.run_end(n)

    def checkpoints(self, horizon):
        return self.base.checkpoints(horizon)


class Max(WeightFn):
    kind = "max"

    def __init__(self, f, g):
        desc = None
        if f._descriptor is not None and g._descriptor is not None:
            desc = {"kind": "max", "args": [f._descriptor, g._descriptor]}
        super().__init__(monotone=f.monotone and g.monotone, descriptor=desc,
                         name=f"max({f.name},{g.name})")
        self.f, self.g = f, g

    def _eval(self, n):
        return max(self.f(n), self.g(n))

    def run_end(self, n):
        return min(self.f.run_end(n), self.g.run_end(n))

    def checkpoints(self, horizon):
        return sorted(set(self.f.checkpoints(horizon)) | set(self.g.checkpoints(horizon)))


class TableOverride(WeightFn):
    """``base`` with its first ``len(prefix)`` values replaced."""

    kind = "override"

    def __init__(self, base, prefix):
        prefix = [int(v) for v in prefix]
        desc = None
        if base._descriptor is not None:
            desc = {"kind": "override", "base": base._descriptor, "prefix": prefix}
        super().__init__(monotone=base.monotone, descriptor=desc, name=f"patched({base.name})")
        self.base, self.prefix = base, prefix

    def _eval(self, n):
        return self.prefix[n] if n < len(self.prefix) else self.base(n)

    def run_end(self, n):
        return n + 1 if n < len(self.prefix) else self.base.run_end(n)

    def checkpoints(self, horizon):
        return sorted(set(self.base.checkpoints(horizon)) | {len(self.prefix)})


class CeilSqrt(WeightFn):
    """⌈√n⌉ + offset."""

    kind = "ceil_sqrt"

    def __init__(self, offset=0):
        super().__init__(descriptor={"kind": "ceil_sqrt", "offset": offset}, name=f"ceilsqrt+{offset}")
        self.offset = int(offset)

    def _eval(self, n):
        r = isqrt(n)
        return (r if r * r == n else r + 1) + self.offset


class Callable(WeightFn):
    """Wrap a plain function; not serializable."""

    kind = "callable"

    def __init__(self, fn, name="callable", monotone=True, checkpoints=None):
        super().__init__(monotone=monotone, name=name)
        self.fn = fn
        self._cps = checkpoints

    def _eval(self, n):
        return self.fn(n)

    def checkpoints(self, horizon):
        if self._cps is None:
            return super().checkpoints(horizon)
        return [c for c in self._cps(horizon) if c <= horizon]


class TableWeight(WeightFn):
    """A finite table; evaluation past its end raises HorizonError."""

    kind = "table"

    def __init__(self, values, name="table", monotone=True):
        values = [int(v) for v in values]
        super().__init__(monotone=monotone, descriptor={"kind": "table", "values": values}, name=name)
        self.table = values
        if monotone:
            for i in range(1, len(values)):
                if values[i - 1] > values[i]:
                    raise PreconditionError(f"{name} decreases at {i}")

    def __len__(self):
        return len(self.table)

    def _eval(self, n):
        if n >= len(self.table):
            raise HorizonError(f"{self.name} is defined only on [0, {len(self.table)})")
        return self.table[n]


class Count(WeightFn):
    """g(n) = card(A ∩ n)."""

    kind = "count"

    def __init__(self, stream):
        desc = None if stream.descriptor is None else {"kind": "count", "set": stream.descriptor}
        super().__init__(descriptor=desc, name=f"count({stream.name})")
        self.stream = stream

    def _eval(self, n):
        return self.stream.count(n)

    def run_end(self, n):
        nxt = self.stream.next_at_least(n)
        return float("inf") if nxt is None else nxt + 1

    def checkpoints(self, horizon):
        return [a + 1 for a in self.stream.elements_below(horizon)]


class NextCheckpoint(WeightFn):
    """g(n) = min{n_i : n ≤ n_i} for a strictly increasing (n_i)."""

    kind = "checkpoints"

    def __init__(self, stream):
        desc = None if stream.descriptor is None else {"kind": "checkpoints", "set": stream.descriptor}
        super().__init__(descriptor=desc, name=f"next({stream.name})")
        self.stream = stream

    def _eval(self, n):
        v = self.stream.next_at_least(n)
        if v is None:
            raise HorizonError(f"{self.stream.name} has no element ≥ {n}")
        return v

    def run_end(self, n):
        return self(n) + 1

    def checkpoints(self, horizon):
        return self.stream.elements_below(horizon + 1)


class Plateau(WeightFn):
    """Step function given by half-open pieces ``[lo, hi) ↦ value``.

    ``pieces`` is a zero-argument callable yielding (lo, hi, value) in
    increasing order; endpoints and values may be :class:`LazyFactorial`.
    Outside the pieces the weight follows ``gap``: ``"identity"`` (w(n)=n),
    ``("const", c)`` or ``"error"``.
    """

    kind = "plateau"

    def __init__(self, pieces, gap="identity", descriptor=None, name="plateau", extra_checkpoints=None):
        if not callable(pieces):
            listed = [tuple(p) for p in pieces]
            if descriptor is None:
                descriptor = {"kind": "plateau", "gap": gap,
                              "pieces": [[_js(a), _js(b), _js(v)] for a, b, v in listed]}
            pieces = lambda: iter(listed)
        super().__init__(descriptor=descriptor, name=name)
        if isinstance(gap, list):
            gap = tuple(gap)
        if gap != "identity" and gap != "error" and not (isinstance(gap, tuple) and gap[0] == "const"):
            raise DescriptorError(f"unknown gap rule {gap!r}")
        self.gap = gap
        self._factory = pieces
        self._it = None
        self._done = False
        self.los, self.his, self.vals = [], [], []
        self._extra = extra_checkpoints

    # piece loading

    def _gap_value(self, n):
        if self.gap == "identity":
            return n
        if self.gap == "error":
            raise HorizonError(f"{self.name}: {n} lies outside every piece")
        return self.gap[1]

    def _load_one(self):
        if self._done:
            return False
        if self._it is None:
            self._it = iter(self._factory())
        try:
            lo, hi, val = next(self._it)
        except StopIteration:
            self._done = True
            if self.his:
                self._check_gap_after()
            return False
        if not lo < hi:
            return True  # empty pieces are skipped
        if self.his:
            if lo < self.his[-1]:
                raise DescriptorError(f"{self.name}: overlapping pieces at {lo!r}")
            if lo == self.his[-1]:
                before = self.vals[-1]
            else:
                self._check_gap_after()
                before = self._gap_before(lo)
        else:
            before = self._gap_before(lo) if lo > 0 else 0
        if before is not None and val < before:
            raise PreconditionError(f"{self.name}: piece starting at {lo!r} drops below {before!r}")
        self.los.append(lo)
        self.his.append(hi)
        self.vals.append(val)
        return True

    def _check_gap_after(self):
        hi, val = self.his[-1], self.vals[-1]
        if self.gap == "identity" and hi < val:
            raise PreconditionError(f"{self.name}: value {val!r} exceeds the identity at {hi!r}")
        if isinstance(self.gap, tuple) and val > self.gap[1]:
            raise PreconditionError(f"{self.name}: piece value above the constant gap")

    def _gap_before(self, lo):
        if self.gap == "identity":
            return lo - 1
        if self.gap == "error":
            return None
        return self.gap[1]

    def _load_past(self, n):
        while (not self.los or not self.los[-1] > n) and self._load_one():
            pass

    def locate(self, n):
        """Index of the piece containing n, or None."""
        self._load_past(n)
        i = bisect_right(self.los, n) - 1
        if i >= 0 and self.his[i] > n:
            return i
        return None

    def lazy_value(self, n):
        """The value at n, possibly as an unexpanded LazyFactorial."""
        i = self.locate(n)
        return self._gap_value(n) if i is None else self.vals[i]

    def _eval(self, n):
        return int(self.lazy_value(n))

    def __call__(self, n):
        # pieces are checked when loaded, so skip the memo
        if n < 0:
            raise ValueError(f"weights are defined on ℕ, got {n}")
        return int(self.lazy_value(n))

    def run_end(self, n):
        i = self.locate(n)
        if i is None:
            if self.gap == "identity":
                return n + 1
            nxt = bisect_right(self.los, n)
            return self.los[nxt] if nxt < len(self.los) else float("inf")
        return _shrink(self.his[i])

    def pieces_until(self, horizon):
        """Loaded pieces with lo ≤ horizon, as (lo, hi, value) triples."""
        self._load_past(horizon)
        out = []
        for lo, hi, v in zip(self.los, self.his, self.vals):
            if lo > horizon:
                break
            out.append((lo, hi, v))
        return out

    def checkpoints(self, horizon):
        pts = {0}
        for lo, hi, _ in self.pieces_until(horizon):
            pts.add(int(lo))
            if not hi > horizon:
                pts.add(int(hi))
        if self._extra is not None:
            pts.update(c for c in self._extra(horizon) if c <= horizon)
        return sorted(pts)

    def first_at_least(self, v, limit=None):
        p, i = 0, 0
        while True:
            while i >= len(self.los) and self._load_one():
                pass
            if i >= len(self.los):
                cand = self._gap_first(p, None, v)
            else:
                cand = self._gap_first(p, self.los[i], v)
                if cand is None and self.vals[i] >= v:
                    cand = self.los[i]
            if cand is not None:
                return _shrink(cand) if limit is None or not cand > limit else None
            if i >= len(self.los) or (limit is not None and self.los[i] > limit):
                return None
            p = self.his[i]
            i += 1

    def _gap_first(self, p, end, v):
        """Least n in the gap [p, end) with gap value ≥ v."""
        if end is not None and not p < end:
            return None
        if self.gap == "identity":
            c = p if p > v else v
            return c if end is None or c < end else None
        if self.gap == "error":
            return None
        return p if self.gap[1] >= v else None


def _shrink(x):
    if isinstance(x, LazyFactorial) and not x.exceeds(10 ** 60):
        return int(x)
    return x


def _js(x):
    return x.to_json() if isinstance(x, LazyFactorial) else int(x)


def evaluate(w, n):
    return w(n)


def inverse_enumeration(alpha, horizon):
    """β(k) = min{n : k ≤ α(n)} on [0, α(horizon)] for strictly increasing α."""
    prev = None
    for n in range(horizon + 1):
        a = alpha(n)
        if prev is not None and a <= prev:
            raise PreconditionError(f"enumeration is not strictly increasing at n={n}")
        prev = a
    out, n = [], 0
    for k in range(alpha(horizon) + 1):
        while alpha(n) < k:
            n += 1
        out.append(n)
    return TableWeight(out, name=f"inv({getattr(alpha, 'name', 'alpha')})")


def enumeration_from_inverse(beta, horizon):
    """α(n) = max{k : β(k) = n} for n ≤ horizon, read off a nondecreasing surjection β."""
    out, k = [], 0
    for n in range(horizon + 1):
        last = None
        while True:
            try:
                b = beta(k)
            except HorizonError:
                break
            if b > n:
                break
            if b == n:
                last = k
            k += 1
        if last is None:
            raise HorizonError(f"β does not attain {n} on its table")
        out.append(last)
    return TableWeight(out, name="enum")


def floor_surjection(gamma, horizon, window=None):
    """h(0)=0, h(n+1)=min{h(n)+1, γ(n+1), γ(n+2), ...} on [0, horizon].

    The infinite tail minimum is taken over [n+1, S] with S = 2·horizon + 16
    (or ``window``); the far end of the window must already sit above
    h(horizon) + 1, otherwise the scan is declared stalled.
    """
    S = window if window is not None else 2 * horizon + 16
    g = [gamma(m) for m in range(S + 1)]
    suffix = [0] * (S + 2)
    suffix[S + 1] = float("inf")
    for m in range(S, -1, -1):
        suffix[m] = min(g[m], suffix[m + 1])
    h = [0]
    for n in range(horizon):
        h.append(min(h[-1] + 1, suffix[n + 1]))
    far = range(horizon + (S - horizon) // 2 + 1, S + 1)
    for m in far:
        if g[m] < h[-1] + 1:
            raise InconclusiveError(f"tail minimum has not stabilized: γ dips at m={m}", stall_index=m)
    return TableWeight(h, name=f"h({getattr(gamma, 'name', 'gamma')})")

