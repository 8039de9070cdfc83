"""Witness constructions, run as algorithms.

Every search takes the least value meeting its inequalities, so outputs are
canonical.  Each builder returns a :class:`Construction` holding the built
objects together with the chosen sequence values and a margin table that
can be replayed against raw evaluations.
"""

from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import islice
from math import factorial

import numpy as np

from . import subsets
from .characterizations import inclusion_in_Z_test
from .density import sample_points
from .errors import (ConstructionStallError, HorizonError, InputError, NoWitnessError,
                     NotApplicableError, PreconditionError)
from .lazy import LazyFactorial
from .verdict import Status, _jsonable
from .weights import Count, Max, NextCheckpoint, Plateau, TableOverride, WeightFn


@dataclass
class Construction:
    name: str
    inputs: dict
    sequences: dict = field(default_factory=dict)
    margins: list = field(default_factory=list)
    objects: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def __getitem__(self, key):
        return self.objects[key]

    def to_json(self):
        return {"construction": self.name, "inputs": _jsonable(self.inputs),
                "sequences": _jsonable(self.sequences), "margins": _jsonable(self.margins),
                "notes": list(self.notes)}


# searches

def least_in_runs(run_end, pred, start, limit, shape="up"):
    """Least n in [start, limit] with pred(n), walking the constant runs of a weight.

    ``shape="up"``: inside a run, pred can only switch from false to true, so
    the run's last point decides and bisection finds the least one.
    ``shape="flat"``: pred is constant (or only switches off) inside a run,
    so the run start decides.
    """
    n = start
    while n <= limit:
        e = run_end(n)
        e = limit + 1 if e > limit else int(e)
        if shape == "up":
            if pred(e - 1):
                lo, hi = n - 1, e - 1
                while hi - lo > 1:
                    mid = (lo + hi) // 2
                    if pred(mid):
                        hi = mid
                    else:
                        lo = mid
                return hi
        elif pred(n):
            return n
        n = e
    return None


def gallop(pred, lo, max_bits=4096):
    """Least n ≥ lo with pred(n), for pred monotone (false then true)."""
    if pred(lo):
        return lo
    step = 1
    while not pred(lo + step):
        step *= 2
        if step.bit_length() > max_bits:
            return None
    a, b = lo + step // 2, lo + step
    while b - a > 1:
        mid = (a + b) // 2
        if pred(mid):
            b = mid
        else:
            a = mid
    return b


def _joint_runs(*ws):
    return lambda n: min(w.run_end(n) for w in ws)


def _ceil(x):
    x = Fraction(x)
    return -(-x.numerator // x.denominator)


# simple builders

def weight_count_of(A, horizon=4096):
    """g(n) = card(A ∩ n); A must not run out below the horizon."""
    if A.finite_below(horizon):
        raise PreconditionError(f"{A.name} is finite below {horizon}")
    return Count(A)


def weight_from_checkpoints(seq):
    return NextCheckpoint(seq)


def max_combine(f, g):
    return Max(f, g)


ad_branch = subsets.ad_branch


# alternating peers

class _AlphaWeight(WeightFn):
    kind = "f_alpha"

    def __init__(self, f, g, ns, bits, word):
        super().__init__(name=f"f_alpha[{word}]")
        self.f, self.g, self.ns, self.bits = f, g, ns, bits
        self._gk = [g(n) for n in ns]

    def _eval(self, n):
        if n < self.ns[0]:
            return self.f(n)
        k = bisect_right(self.ns, n) - 1
        if self.bits[k]:
            return max(self._gk[k], self.f(n))
        return self.f(n)

    def checkpoints(self, horizon):
        return sorted(set(self.f.checkpoints(horizon)) | {n for n in self.ns if n <= horizon})


def _ladder_checkpoints(f, g, horizon, max_blocks):
    """n_k with g(n_k)/f(n_k) > k+1, n_k > n_{k-1} and f(n_k) ≥ g(n_{k-1})."""
    start = f.zero_prefix(limit=horizon)
    if start is None:
        return []
    ns = []
    while len(ns) < max_blocks:
        k = len(ns)
        lo = start
        if ns:
            lo = max(ns[-1] + 1, f.first_at_least(g(ns[-1]), limit=horizon) or horizon + 1)
        n = least_in_runs(_joint_runs(f, g), lambda m: g(m) > (k + 1) * f(m), lo, horizon, "flat")
        if n is None:
            break
        ns.append(n)
    return ns


def f_alpha_family(f, g, word, horizon=10_000, min_blocks=3, max_blocks=64):
    """f_α = f off the selected blocks and max(g(n_k), f) on blocks with α_k = 1."""
    ns = _ladder_checkpoints(f, g, horizon, max_blocks)
    if len(ns) < min_blocks:
        raise NoWitnessError(f"only {len(ns)} ladder checkpoints for g/f below {horizon}")
    bits = list(islice(subsets.word_bits(word), len(ns)))
    bits += [0] * (len(ns) - len(bits))
    fa = _AlphaWeight(f, g, ns, bits, word)
    rows = [{"k": k, "n_k": n, "f": f(n), "g": g(n), "g_over_f": Fraction(g(n), f(n)),
             "alpha_k": b, "f_alpha": fa(n)} for k, (n, b) in enumerate(zip(ns, bits))]
    return Construction("f_alpha", {"word": word, "horizon": horizon},
                        {"n_k": ns, "alpha": bits}, rows, {"f_alpha": fa})


# constructions around the stretch condition

class PatchedIntervals(WeightFn):
    """``base`` except on closed blocks [lo, hi] where it takes a fixed value."""

    kind = "patched_intervals"

    def __init__(self, base, blocks, name="patched"):
        super().__init__(name=name)
        self.base = base
        self.blocks = blocks  # (lo, hi_inclusive, value)
        self._los = [b[0] for b in blocks]

    def _eval(self, n):
        i = bisect_right(self._los, n) - 1
        if i >= 0 and n <= self.blocks[i][1]:
            return self.blocks[i][2]
        return self.base(n)

    def run_end(self, n):
        i = bisect_right(self._los, n) - 1
        if i >= 0 and n <= self.blocks[i][1]:
            return self.blocks[i][1] + 1
        e = self.base.run_end(n)
        j = i + 1
        return min(e, self._los[j]) if j < len(self._los) else e

    def checkpoints(self, horizon):
        pts = set(self.base.checkpoints(horizon))
        for lo, hi, _ in self.blocks:
            pts.update(x for x in (lo, hi + 1) if x <= horizon)
        return sorted(pts)


def inflated_peer(f, horizon=10_000, max_blocks=64):
    """g ≥ f with g(n_k)/f(n_k) > k, equal to f off ⋃ I_k, I_k = [n_k, n_k + ⌊f(n_k)/2^k⌋]."""
    start = f.zero_prefix(limit=horizon)
    if start is None:
        raise NoWitnessError("f vanishes on the whole prefix")
    ns, widths = [], []
    while len(ns) < max_blocks:
        k = len(ns)
        lo = start if not ns else (ns[-1] + f(ns[-1]) // 2 ** (k - 1)) + 1
        # the stretch f(n + ⌊f(n)/2^k⌋) only grows inside a run of f
        n = least_in_runs(f.run_end,
                          lambda m: f(m + f(m) // 2 ** k) > k * f(m), lo, horizon, "up")
        if n is None:
            break
        ns.append(n)
        widths.append(f(n) // 2 ** k)
    if len(ns) < 2:
        raise NoWitnessError("the stretch ratio never exceeds the ladder below the horizon; "
                             "sf_singleton evidence suggests card(S_f) = 1")
    blocks = [(n, n + w, f(n + w)) for n, w in zip(ns, widths)]
    g = PatchedIntervals(f, blocks, name=f"inflated({f.name})")
    union = subsets.BlockUnion([(lo, hi + 1) for lo, hi, _ in blocks], name="union_I")
    rows, total = [], 0
    for k, (n, w) in enumerate(zip(ns, widths)):
        total += w + 1
        row = {"k": k, "n_k": n, "f": f(n), "width": w, "g_over_f": Fraction(g(n), f(n)),
               "union_count_bound": Fraction(total, f(n))}
        if k >= 1:
            row["closed_bound"] = Fraction(k, 2 ** (k - 1))
        rows.append(row)
    return Construction("inflated_peer", {"horizon": horizon}, {"n_k": ns, "width": widths},
                        rows, {"g": g, "union": union})


def separating_set_for_peers(f, cert, g, horizon=10_000, max_blocks=64):
    """A packed into [n_k, n_k + ⌊εf(n_k)⌋): positive f-density, vanishing g-density.

    ``cert`` is (ε, M, n0) from a HOLDS stretch certificate.  A ∩ block k is
    the tail of the block that brings card(A ∩ (n_k + ⌊εf(n_k)⌋)) up to
    exactly ⌊εf(n_k)⌋.
    """
    eps, M, n0 = Fraction(cert[0]), Fraction(cert[1]), int(cert[2])
    start = max(n0, f.zero_prefix(limit=horizon) or 0)
    ns = []
    while len(ns) < max_blocks:
        k = len(ns)
        lo = start if not ns else int(ns[-1] + eps * f(ns[-1])) + 1
        n = least_in_runs(_joint_runs(f, g), lambda m: g(m) > k * f(m), lo, horizon, "flat")
        if n is None:
            break
        ns.append(n)
    if len(ns) < 2:
        raise NoWitnessError(f"no checkpoints with g/f climbing the ladder below {horizon}")
    blocks, rows, prev = [], [], 0
    for k, n in enumerate(ns):
        w = int(eps * f(n))
        blocks.append((n + prev, n + w))
        end = n + w
        row = {"k": k, "n_k": n, "width": w, "f_ratio_at_end": Fraction(w, f(end)),
               "f_floor": eps / (2 * M), "g_sup_bound": Fraction(w, g(n)),
               "g_ratio_at_end": Fraction(w, g(end))}
        if k >= 1:
            row["g_closed_bound"] = eps / k + Fraction(1, g(n))
        rows.append(row)
        prev = w
    A = subsets.BlockUnion(blocks, name="separating")
    return Construction("separating_set_for_peers", {"eps": eps, "M": M, "n0": n0, "horizon": horizon},
                        {"n_k": ns}, rows, {"A": A})


def liminf_separating_set(f, horizon=10_000, max_blocks=64, min_blocks=3):
    """A = ⋃[m_k, 2m_k) with m_k/f(m_k) < 1/k and m_{k+1} > 2m_k."""
    start = max(1, f.zero_prefix(limit=horizon) or 1)
    ms = []
    while len(ms) < max_blocks:
        k = len(ms) + 1
        lo = start if not ms else 2 * ms[-1] + 1
        m = least_in_runs(f.run_end, lambda n: k * n < f(n), lo, horizon, "flat")
        if m is None:
            break
        ms.append(m)
    if len(ms) < min_blocks:
        raise NoWitnessError("liminf n/f(n) shows no sign of reaching 0 below the horizon")
    A = subsets.BlockUnion([(m, 2 * m) for m in ms], name="liminf_set")
    rows = []
    for k, m in enumerate(ms, start=1):
        c = A.count(2 * m)
        rows.append({"k": k, "m_k": m, "identity_ratio": Fraction(c, 2 * m),
                     "f_sup_bound": Fraction(c, f(m)), "closed_bound": Fraction(2, k)})
    return Construction("liminf_separating_set", {"horizon": horizon}, {"m_k": ms}, rows, {"A": A})


# inclusion antichain

class _HP(WeightFn):
    kind = "h_P"

    def __init__(self, g1, g2, a_seq, h_vals, chosen):
        super().__init__(name="h_P")
        self.g1, self.g2, self.a_seq, self.h_vals, self.chosen = g1, g2, a_seq, h_vals, chosen

    def _eval(self, n):
        if n >= self.a_seq[-1]:
            raise HorizonError(f"h_P is built only below a_last = {self.a_seq[-1]}")
        m = bisect_right(self.a_seq, n) - 1
        if m in self.chosen:
            return self.h_vals[m]
        return (self.g1(n) + self.g2(n)) // 2

    def run_end(self, n):
        m = bisect_right(self.a_seq, n) - 1
        if m in self.chosen and m + 1 < len(self.a_seq):
            return self.a_seq[m + 1]
        return n + 1

    def checkpoints(self, horizon):
        return [a for a in self.a_seq if a <= horizon]


def _ordered_pair(g1, g2, probe):
    """Patch g1 on the shortest prefix so that g1 ≤ g2 on [0, probe]."""
    last = None
    for n in range(probe + 1):
        if g1(n) > g2(n):
            last = n
    if last is None:
        return g1, 0
    return TableOverride(g1, [min(g1(i), g2(i)) for i in range(last + 1)]), last + 1


def _index_set(P, U, steps):
    Uset = set() if U is None else set(U.elements_below(steps))
    return [m for m in P.elements_below(steps) if m not in Uset and m >= 1]


def antichain_weights(g1, g2, a, P, U=None, horizon=None, blocks=6, probe=4096, max_bits=8192):
    """The (a_n, k_n, h(a_n), l_n) recursion, h_P, and the witness sets B and C.

    ``horizon`` counts recursion steps.  By default it is the least number
    of steps covering ``blocks`` indices of P ∖ U (index 0 is skipped, where
    the 1/n constraints are vacuous).
    """
    a = Fraction(a)
    if not 0 < a < Fraction(1, 3):
        raise PreconditionError("a must lie in (0, 1/3)")
    if horizon is None:
        picked, bound = [], 16
        while len(picked) < blocks:
            picked = _index_set(P, U, bound)
            if bound > 1 << 20:
                raise NoWitnessError("P \\ U has too few elements")
            bound *= 2
        horizon = picked[blocks - 1] + 1
    g1, patch = _ordered_pair(g1, g2, probe)

    a_seq, rows = [0], []
    for n in range(horizon):
        an = a_seq[-1]
        kn = gallop(lambda k: k > a * g2(an + k), 1, max_bits)
        if kn is None:
            raise ConstructionStallError("k_n/g2(a_n+k_n) > a", n)
        h = max(g2(an), n * (an + kn) + 1, 1)
        ln = max(an + kn + 1, int(a * h) + 2)

        def ok(A, an=an, ln=ln, h=h, n=n):
            if g1(A) < h + 1:
                return False
            return n == 0 or n * (an + ln) < g1(A - ln)
        nxt = gallop(ok, ln + an + 1, max_bits)
        if nxt is None:
            raise ConstructionStallError("g1(a_{n+1}) ≥ h+1 and (a_n+l_n)/g1(a_{n+1}-l_n) < 1/n", n)
        rows.append({"n": n, "a_n": an, "k_n": kn, "h": h, "l_n": ln, "a_next": nxt,
                     "least_if_monotone": True})
        a_seq.append(nxt)

    idx = _index_set(P, U, horizon)
    h_vals = [r["h"] for r in rows]
    hp = _HP(g1, g2, a_seq, h_vals, set(P.elements_below(horizon)))
    B = subsets.BlockUnion([(a_seq[m], a_seq[m] + rows[m]["k_n"]) for m in idx], name="B")
    C = subsets.BlockUnion([(a_seq[m + 1] - rows[m]["l_n"] + 1, a_seq[m + 1] + 1) for m in idx], name="C")
    margins = []
    for j, m in enumerate(idx):
        e = a_seq[m] + rows[m]["k_n"]
        cb = B.count(e)
        c_end = a_seq[m + 1] - 1
        cc = C.count(c_end + 1)  # card(C ∩ [0, c_end])
        margins.append({"h_n": m, "block_end": e, "B_count": cb,
                        "B_over_g2": Fraction(cb, g2(e)),
                        "B_over_hP_sup": Fraction(cb, rows[m]["h"]),
                        "B_bound": Fraction(1, m),
                        "C_point": c_end, "C_count_inclusive": cc,
                        "C_over_hP": Fraction(cc, hp(c_end))})
    return Construction("antichain_weights",
                        {"a": a, "P": P.descriptor, "U": None if U is None else U.descriptor,
                         "steps": horizon, "g1_patch_length": patch},
                        {"a_n": a_seq, "h_n": idx, "rows": rows}, margins,
                        {"h_P": hp, "B": B, "C": C, "g1": g1, "g2": g2})


def replay_antichain(con):
    """Re-check every recursion inequality against raw evaluations; returns the failures."""
    g1, g2, a = con["g1"], con["g2"], con.inputs["a"]
    bad = []
    for r in con.sequences["rows"]:
        n, an, kn, h, ln, nxt = r["n"], r["a_n"], r["k_n"], r["h"], r["l_n"], r["a_next"]
        checks = {
            "k_n/g2(a_n+k_n) > a": Fraction(kn, 1) > a * g2(an + kn),
            "(a_n+k_n)/h(a_n) < 1/n": n == 0 or n * (an + kn) < h,
            "h(a_n) >= g2(a_n)": h >= g2(an),
            "(l_n-1)/h(a_n) > a and l_n > a_n+k_n": ln - 1 > a * h and ln > an + kn,
            "g1(a_{n+1}) >= h+1, (a_n+l_n)/g1(a_{n+1}-l_n) < 1/n, a_{n+1} > l_n+a_n":
                g1(nxt) >= h + 1 and nxt > ln + an and (n == 0 or n * (an + ln) < g1(nxt - ln)),
        }
        bad.extend((n, name) for name, ok in checks.items() if not ok)
    return bad


# Katětov constructions

def minimal_alpha(count):
    """Least α with α(0) = 1 and 2α(n+1) − 1 > (2α(n) + 1)!."""
    out = [1]
    while len(out) < count:
        F = factorial(2 * out[-1] + 1)
        out.append((F + 1) // 2 + 1)
    return out[:count]


def check_spacing(alpha):
    """Index of the first n with 2α(n+1) − 1 ≤ (2α(n)+1)!, or None."""
    for n in range(len(alpha) - 1):
        if not LazyFactorial(2 * alpha[n] + 1) < 2 * alpha[n + 1] - 1:
            return n
    return None


def katetov_antichain_weight(M_set, alpha=None, horizon=3):
    """f_M = (2α(m_i))! on ((2α(m_i) − 1)!, (2α(m_i) + 1)!], identity elsewhere.

    Interval endpoints and values are LazyFactorial objects; a point query
    only compares n against them.
    """
    if alpha is None:
        alpha = minimal_alpha(horizon)
    alpha = [int(x) for x in alpha]
    bad = check_spacing(alpha)
    if bad is not None:
        raise PreconditionError(f"spacing 2α(n+1)-1 > (2α(n)+1)! fails at n={bad}")
    ms = [m for m in islice(M_set, horizon) if m < len(alpha)]

    def pieces():
        for m in ms:
            v = alpha[m]
            yield LazyFactorial(2 * v - 1, 1), LazyFactorial(2 * v + 1, 1), LazyFactorial(2 * v)
    f = Plateau(pieces, gap="identity", name="f_M")
    rows = [{"i": i, "m_i": m, "alpha": alpha[m],
             "interval": f"({2 * alpha[m] - 1}!, {2 * alpha[m] + 1}!]", "value": f"{2 * alpha[m]}!"}
            for i, m in enumerate(ms)]
    return Construction("katetov_antichain_weight", {"M": M_set.descriptor, "alpha": alpha},
                        {"alpha": alpha, "m_i": ms}, rows, {"f_M": f})


def _phi_values(phi, lo, hi):
    if isinstance(phi, np.ndarray):
        if len(phi) < hi:
            raise InputError(f"φ is defined only on [0, {len(phi)}), need [{lo}, {hi})")
        return phi[lo:hi].astype(np.int64, copy=False)
    if callable(phi):
        return np.fromiter((phi(n) for n in range(lo, hi)), dtype=np.int64, count=hi - lo)
    try:
        return np.fromiter((phi[n] for n in range(lo, hi)), dtype=np.int64, count=hi - lo)
    except (KeyError, IndexError) as exc:
        raise InputError(f"φ is undefined at {exc.args[0] if exc.args else '?'}") from None


def katetov_partition(phi, alpha, i_range, l_start=0):
    """Split each I_i = [(2α(i)−1)!, (2α(i)+1)!) by the size of φ and report the three cases."""
    rows, objects = [], {}
    for i in i_range:
        ai = int(alpha[i])
        lo, hi = factorial(2 * ai - 1), factorial(2 * ai + 1)
        T, A = factorial(2 * ai), 2 * ai + 1
        v = _phi_values(phi, lo, hi)
        b_mask, d_mask = v >= hi, v < A
        c_mask = ~(b_mask | d_mask)
        nb, nc, nd = int(b_mask.sum()), int(c_mask.sum()), int(d_mask.sum())
        row = {"i": i, "alpha": ai, "lo": lo, "hi": hi, "B": nb, "C": nc, "D": nd,
               "partition_ok": nb + nc + nd == hi - lo,
               "case1": 2 * nb >= T, "case2": 2 * nc > ai * T, "case3": 2 * nd > ai * T}
        if row["case1"]:
            pts = np.nonzero(b_mask)[0][: T // 2] + lo
            objects[f"B_prime_{i}"] = [int(x) for x in pts]
            row["case1_margin"] = Fraction(len(pts), T)
        if row["case2"]:
            counts = np.bincount(v[c_mask], minlength=hi)[:hi]
            windows = counts[A:T * A].reshape(T - 1, A)
            picks = windows.argmax(axis=1)
            E = (np.arange(1, T) * A + picks).astype(np.int64)
            hit = int(windows[np.arange(T - 1), picks].sum())
            objects[f"E_{i}"] = E
            row["case2_preimage"] = hit
            row["case2_bound_ok"] = 8 * hit >= T
            row["case2_margin"] = Fraction(hit, T)
        if row["case3"]:
            counts = np.bincount(v[d_mask], minlength=A)[:A]
            d = next((x for x in range(l_start, A) if 12 * int(counts[x]) >= T), None)
            row["case3_point"] = d
            if d is not None:
                row["case3_margin"] = Fraction(int(counts[d]), T)
        rows.append(row)
    return Construction("katetov_partition", {"alpha": list(alpha), "i_range": list(i_range)},
                        {}, rows, objects)


class ReductionMap:
    """φ(n) = n for n ≤ k_0, else n − j·k_m on [j·k_m, (j+1)·k_m) ∩ [k_m, k_{m+1})."""

    def __init__(self, ks):
        self.ks = ks

    @property
    def domain_end(self):
        return self.ks[-1]

    def __call__(self, n):
        if n <= self.ks[0]:
            return n
        if n >= self.ks[-1]:
            raise HorizonError(f"φ is built only below k_last = {self.ks[-1]}")
        m = bisect_right(self.ks, n) - 1
        return n % self.ks[m]

    def block(self, n):
        m = bisect_right(self.ks, n) - 1
        return m, n // self.ks[m]

    def preimage(self, A, upto=None):
        upto = self.domain_end if upto is None else min(upto, self.domain_end)
        members = set(A) if not hasattr(A, "elements_below") else set(A.elements_below(upto))
        return [n for n in range(upto) if self(n) in members]


def katetov_reduction_phi(f, horizon=10_000, max_blocks=64):
    """The map witnessing Z_f ≤_K Z when liminf n/f(n) = 0."""
    verdict = inclusion_in_Z_test(f, horizon)
    if verdict.status is not Status.FAILS:
        raise NotApplicableError(
            f"inclusion evidence is {verdict.status.value}; when Z_f ⊆ Z the identity map already works")
    start = max(1, f.zero_prefix(limit=horizon))
    pts = sample_points(f, horizon, start)
    sup = max(Fraction(n, f(n)) for n in pts)
    delta = sup / 2
    ks = []
    while len(ks) < max_blocks:
        m = len(ks)
        lo = start if not ks else m * ks[-1] + 1
        k = least_in_runs(f.run_end, lambda n: n >= delta * f(n), lo, horizon, "up")
        if k is None:
            break
        ks.append(k)
    if len(ks) < 2:
        raise NoWitnessError("too few k_m with k ≥ δ·f(k) below the horizon")
    rows = [{"m": m, "k_m": k, "k_over_f": Fraction(k, f(k)),
             "ratio_prev": None if m == 0 else Fraction(ks[m - 1], k)} for m, k in enumerate(ks)]
    return Construction("katetov_reduction_phi", {"horizon": horizon, "delta": delta, "observed_sup": sup},
                        {"k_m": ks}, rows, {"phi": ReductionMap(ks)})
