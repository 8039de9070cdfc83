"""Invariants checked with hypothesis."""

from fractions import Fraction
from math import factorial

import numpy as np
from hypothesis import assume, given, settings, strategies as st

from diw import constructions as con, descriptors as D, subsets
from diw.density import profile, rho_distance
from diw.farah import from_json
from diw.lazy import LazyFactorial
from diw.verdict import Status, Verdict
from diw.weights import (Affine, Identity, Max, Plateau, TableWeight, enumeration_from_inverse,
                         floor_surjection, inverse_enumeration)

small_sets = st.sets(st.integers(0, 400), max_size=60)


@st.composite
def plateaus(draw):
    cuts = sorted(draw(st.sets(st.integers(1, 500), min_size=1, max_size=12)))
    bounds = [0] + cuts
    steps = draw(st.lists(st.integers(0, 50), min_size=len(cuts), max_size=len(cuts)))
    vals, v = [], 1
    for s in steps:
        v += s
        vals.append(v)
    pieces = [(bounds[i], bounds[i + 1], vals[i]) for i in range(len(cuts))]
    return pieces


@st.composite
def disjoint_blocks(draw):
    cuts = sorted(draw(st.sets(st.integers(0, 1000), max_size=20)))
    if len(cuts) % 2:
        cuts = cuts[:-1]
    return [(cuts[i], cuts[i + 1]) for i in range(0, len(cuts), 2)]


# seq-core

@given(plateaus(), st.lists(st.integers(0, 499), max_size=40))
def test_plateau_monotone_and_matches_table(pieces, probes):
    w = Plateau(pieces, gap="error")
    table = {}
    for lo, hi, v in pieces:
        for n in range(lo, hi):
            table[n] = v
    probes = [p for p in probes if p in table]
    for n in probes:
        assert w(n) == table[n]
    ordered = sorted(set(probes))
    assert all(w(a) <= w(b) for a, b in zip(ordered, ordered[1:]))


@given(plateaus(), plateaus())
def test_max_of_monotone_is_monotone(p, q):
    f, g = Plateau(p, gap=("const", 10 ** 6)), Plateau(q, gap=("const", 10 ** 6))
    h = Max(f, g)
    vals = [h(n) for n in range(0, 520, 3)]
    assert vals == sorted(vals)
    assert all(h(n) == max(f(n), g(n)) for n in range(0, 520, 7))


@given(small_sets)
def test_count_consistent_with_enumeration(elems):
    A = subsets.finite(elems)
    ordered = sorted(elems)
    for k, a in enumerate(ordered):
        assert A[k] == a
        assert A.count(a + 1) == k + 1
    for n in range(0, 402, 13):
        assert A.count(n) == sum(1 for x in elems if x < n)


@given(st.integers(0, 50), st.integers(1, 20), st.integers(0, 600))
def test_arithmetic_closed_forms_match_stream(start, step, n):
    A = subsets.arithmetic(start, step)
    B = subsets.SubsetStream(lambda: iter(range(start, 10 ** 4, step)))
    assert A.count(n) == B.count(n)
    assert (n in A) == (n in B)
    assert A.next_at_least(n) == B.next_at_least(n)
    assert A.elements_below(n) == B.elements_below(n)


@given(disjoint_blocks(), st.lists(st.integers(0, 1100), max_size=30), st.booleans())
def test_block_union_matches_bitset(blocks, probes, lazy):
    A = subsets.BlockUnion((lambda: iter(blocks)) if lazy else blocks)
    bits = np.zeros(1101, dtype=np.int64)
    for lo, hi in blocks:
        bits[lo:hi] = 1
    cum = np.concatenate(([0], np.cumsum(bits)))
    for n in probes:
        assert A.count(n) == cum[n]
        assert (n in A) == bool(bits[n])
        nxt = next((x for x in range(n, 1101) if bits[x]), None)
        assert A.next_at_least(n) == nxt


@given(st.lists(st.integers(1, 6), min_size=2, max_size=30))
def test_inverse_enumeration_round_trip(gaps):
    vals, v = [], 0
    for g in gaps:
        v += g
        vals.append(v)
    alpha = TableWeight(vals)
    beta = inverse_enumeration(alpha, len(vals) - 1)
    back = enumeration_from_inverse(beta, len(vals) - 2)
    # α(n) = max{k : β(k) = n} recovers α wherever β has a full preimage
    assert [back(n) for n in range(len(vals) - 1)] == vals[:-1]


@given(st.lists(st.integers(0, 3), min_size=5, max_size=40))
def test_floor_surjection_steps_and_bound(increments):
    vals, v = [], 0
    for d in increments:
        v += d
        vals.append(v)
    tail = vals + [vals[-1] + 10 + i for i in range(200)]
    gamma = TableWeight(tail)
    horizon = len(vals) - 1
    h = floor_surjection(gamma, horizon, window=len(tail) - 1)
    hs = [h(n) for n in range(horizon + 1)]
    assert hs[0] == 0
    assert all(b - a in (0, 1) for a, b in zip(hs, hs[1:]))
    assert all(hs[n] <= gamma(n) for n in range(1, horizon + 1))


@given(st.integers(0, 14), st.integers(-3, 3), st.integers(0, 10 ** 12))
def test_lazy_factorial_compares_like_int(k, shift, n):
    x = LazyFactorial(k, shift)
    exact = factorial(k) + shift
    assert (x < n) == (exact < n)
    assert (x == n) == (exact == n)
    assert int(x) == exact


# density-engine

@given(small_sets, st.lists(st.integers(1, 400), min_size=1, max_size=20))
def test_profile_ratio_is_exact(elems, cps):
    A, w = subsets.finite(elems), Affine(3, 1)
    for n, c, g, r in profile(A, w, cps).rows:
        assert g == 3 * n + 1
        assert r == Fraction(sum(1 for x in elems if x < n), 3 * n + 1)


@given(small_sets, small_sets, small_sets)
@settings(max_examples=60)
def test_rho_is_a_pseudometric(u, v, x):
    w = Affine(1, 1)
    assert rho_distance(u, v, w) == rho_distance(v, u, w)
    assert rho_distance(u, u, w) == 0
    assert rho_distance(u, x, w) <= rho_distance(u, v, w) + rho_distance(v, x, w)


# descriptors

weight_descs = st.recursive(
    st.one_of(st.just({"kind": "identity"}),
              st.builds(lambda a, b: {"kind": "affine", "a": a, "b": b}, st.integers(1, 5), st.integers(0, 5)),
              st.builds(lambda o: {"kind": "ceil_sqrt", "offset": o}, st.integers(0, 3))),
    lambda inner: st.builds(lambda x, y: {"kind": "max", "args": [x, y]}, inner, inner),
    max_leaves=4)

set_descs = st.one_of(
    st.sampled_from([{"kind": "evens"}, {"kind": "odds"}, {"kind": "squares"}, {"kind": "powers", "base": 3}]),
    st.builds(lambda s, d: {"kind": "arithmetic", "start": s, "step": d}, st.integers(0, 9), st.integers(1, 9)),
    st.builds(lambda e: {"kind": "finite", "elements": sorted(e)}, small_sets),
    st.builds(lambda w: {"kind": "ad_branch", "word": w}, st.from_regex(r"[01]{0,4}\([01]{1,3}\)", fullmatch=True)))


@given(weight_descs)
def test_weight_descriptor_round_trip(d):
    w = D.weight(d)
    again = D.weight(D.load(D.canonical(D.emit(w))))
    assert D.canonical(D.emit(again)) == D.canonical(D.emit(w))
    assert all(w(n) == again(n) for n in range(0, 200, 7))


@given(set_descs)
def test_set_descriptor_round_trip(d):
    s = D.subset(d)
    assert D.canonical(D.emit(s)) == D.canonical(d)
    again = D.subset(D.load(D.canonical(d)))
    assert [again.count(n) for n in range(0, 300, 11)] == [s.count(n) for n in range(0, 300, 11)]


@given(st.lists(st.tuples(st.integers(1, 30), st.integers(1, 9)), min_size=1, max_size=8))
def test_measure_json_round_trip(levels):
    rows, lo = [], 0
    for width, den in levels:
        rows.append([{"lo": lo, "hi": lo + width, "mass_num": 1, "mass_den": den}])
        lo += width
    ms = from_json(rows)
    assert ms.to_json(len(rows)) == rows


@given(st.sampled_from(list(Status)), st.fractions(), st.lists(st.integers(0, 99), min_size=1, max_size=3))
def test_verdict_json_is_exact(status, margin, wit):
    v = Verdict(status, margin, wit, {"x": margin})
    d = v.to_dict()
    assert Fraction(d["margin"]["num"], d["margin"]["den"]) == margin
    assert d["status"] == status.value


# constructions

@given(st.from_regex(r"[01]{0,3}\([01]{1,3}\)", fullmatch=True))
@settings(max_examples=25, deadline=None)
def test_f_alpha_between_f_and_max(word):
    from diw import catalog
    f, g = Identity(), catalog.get("sec6-ex1").payload["f"]
    fa = con.f_alpha_family(f, g, word, horizon=10 ** 5)["f_alpha"]
    for n in list(range(0, 2000, 17)) + [5039, 5040, 40319, 40320, 99999]:
        assert f(n) <= fa(n) <= max(f(n), g(n))


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 20))
@settings(max_examples=30, deadline=None)
def test_katetov_partition_sizes(seed, cap):
    alpha = con.minimal_alpha(2)
    rng = np.random.default_rng(seed)
    phi = rng.integers(0, cap, size=7, dtype=np.int64)
    row = con.katetov_partition(phi, alpha, range(1)).margins[0]
    assert row["B"] + row["C"] + row["D"] == row["hi"] - row["lo"]
    v = phi[row["lo"]:row["hi"]]
    assert row["B"] == int((v >= row["hi"]).sum())
    assert row["D"] == int((v < 2 * row["alpha"] + 1).sum())


@given(st.from_regex(r"[01]{0,5}", fullmatch=True), st.from_regex(r"[01]{0,5}", fullmatch=True))
def test_ad_branches_share_common_prefix_codes(p, q):
    assume(p + "(0)" != q + "(1)")
    a, b = subsets.ad_branch(p + "(0)"), subsets.ad_branch(q + "(1)")
    u, v = p + "0" * 12, q + "1" * 12
    d = next(i for i in range(len(u)) if u[i] != v[i])
    shared = set(a.elements_below(2 ** 14)) & set(b.elements_below(2 ** 14))
    assert len(shared) == d + 1
