"""Derived values checked against small independent oracles.

Each oracle recomputes the quantity from its definition by brute force,
with no code shared with the package.  The frozen literals next to them
are what the oracles produced.
"""

from fractions import Fraction
from itertools import islice
from math import factorial, isqrt

import numpy as np
import pytest

from diw import catalog, characterizations as ch, constructions as con, subsets
from diw.density import dominance_check, membership_evidence, profile, rho_distance
from diw.errors import NotApplicableError, PreconditionError
from diw.farah import farah_measures, from_json, weight_from_measures
from diw.verdict import Status
from diw.weights import Affine, Callable, CeilSqrt, Identity, floor_surjection, inverse_enumeration


# oracles

def brute_count(members, n):
    return sum(1 for x in range(n) if members(x))


def brute_inverse(alpha, k):
    n = 0
    while not k <= alpha(n):
        n += 1
    return n


def brute_floor_surjection(gamma, horizon, tail=10_000):
    h = [0]
    for n in range(horizon):
        h.append(min(h[-1] + 1, min(gamma(m) for m in range(n + 1, n + 1 + tail))))
    return h


def ex2_oracle(upto):
    """f and g of the equal-ideal pair, straight from the casewise definition."""
    m = [1, 1]
    while m[-1] <= upto:
        k = len(m) - 1
        m.append(max(k * m[k], m[k] + k) + 1)
    f = {0: 0, 1: 1}
    for k in range(1, len(m) - 1):
        for l in range(1, k + 1):
            f[m[k] + l] = l * f[m[k]]
        for n in range(m[k] + k + 1, m[k + 1] + 1):
            f[n] = f[m[k] + k]
    g = {0: 0, 1: 1}
    for k in range(1, len(m) - 1):
        for n in range(m[k] + 1, m[k + 1] + 1):
            g[n] = f[m[k + 1]]
    return m, f, g


# seq-core

def test_count_dyadic_runs_at_16():
    A = subsets.dyadic_runs("after")
    members = lambda x: any(2 ** k <= x < 2 ** k + k for k in range(1, 8))
    assert brute_count(members, 16) == A.count(16) == 6
    assert A.elements_below(16) == [2, 4, 5, 8, 9, 10]


def test_inverse_enumeration_doubling():
    alpha = Affine(2, 0)
    beta = inverse_enumeration(alpha, 50)
    got = [beta(k) for k in range(101)]
    assert got == [brute_inverse(alpha, k) for k in range(101)]
    assert got == [-(-k // 2) for k in range(101)]


def test_inverse_enumeration_powers():
    alpha = Callable(lambda n: 2 ** n, name="pow2")
    beta = inverse_enumeration(alpha, 6)
    got = [beta(k) for k in range(65)]
    assert got == [brute_inverse(alpha, k) for k in range(65)]
    assert got[0] == 0
    assert all(got[k] == (k - 1).bit_length() for k in range(1, 65))  # ⌈log₂ k⌉


def test_inverse_enumeration_refuses_non_increasing():
    with pytest.raises(PreconditionError):
        inverse_enumeration(Callable(lambda n: n // 2, name="half"), 10)


def test_floor_surjection_half_plus_one():
    gamma = Callable(lambda n: n // 2 + 1, name="half+1")
    h = floor_surjection(gamma, 10)
    got = [h(n) for n in range(11)]
    assert got == brute_floor_surjection(gamma, 10, tail=200)
    assert got == [0, 1, 2, 2, 3, 3, 4, 4, 5, 5, 6]


# density-engine

def test_powers_of_two_ratio_at_checkpoints():
    A, w = subsets.powers(2), Identity()
    rows = profile(A, w, [2 ** k for k in range(1, 31)]).rows
    for k, (n, c, _, r) in zip(range(1, 31), rows):
        assert c == k and r == Fraction(k, 2 ** k)
    v = membership_evidence(A, w, 2 ** 20)
    assert v.status is Status.HOLDS


@pytest.mark.parametrize("u, v, want", [({0}, set(), 1), ({0, 3}, {3}, 1), ({1, 2}, {5}, Fraction(2, 3))])
def test_rho_distance_matches_scan(u, v, want):
    w = Affine(1, 1)
    top = max(u | v)
    scan = max(Fraction(sum((i in u) != (i in v) for i in range(n + 1)), n + 1) for n in range(top + 1))
    assert rho_distance(u, v, w) == scan == want


def test_dominance_dyadic_runs():
    C, B = subsets.dyadic_runs("after"), subsets.dyadic_runs("before")
    N = 2 ** 12
    cc, cb = np.zeros(N + 2, dtype=int), np.zeros(N + 2, dtype=int)
    for k in range(1, 13):
        cc[2 ** k:2 ** k + k] = 1
        cb[2 ** k - k:2 ** k] = 1
    assert np.all(np.cumsum(cc)[:N] <= np.cumsum(cb)[:N])
    assert dominance_check(C, B, N).status is Status.HOLDS
    assert dominance_check(B, C, N).status is Status.FAILS


# characterizations

def test_factorial_blocks_jump_and_inclusion_checkpoints():
    f = catalog.get("sec6-ex1").payload["f"]
    for k in range(2, 12):
        assert f(factorial(k) - 1) == factorial(k)
        assert f(factorial(k)) == factorial(k + 1)
        assert Fraction(f(factorial(k)), f(factorial(k) - 1)) == k + 1
        assert Fraction(factorial(k), f(factorial(k))) == Fraction(1, k + 1)
    assert ch.inclusion_in_Z_test(f, horizon=factorial(10)).status is Status.FAILS


def test_ceil_sqrt_plus_one_is_included():
    f = CeilSqrt(1)
    for n in list(range(1, 2000)) + [10 ** 6, 10 ** 6 - 1, 10 ** 6 + 1]:
        r = isqrt(n)
        assert f(n) == (r if r * r == n else r + 1) + 1
    assert ch.inclusion_in_Z_test(f, horizon=10 ** 6).status is Status.HOLDS


def test_equal_ideal_pair_matches_definition():
    e = catalog.get("sec3-ex2", 8)
    f, g = e.payload["f"], e.payload["g"]
    m, fo, go = ex2_oracle(e.horizon)
    assert m[:8] == list(islice(catalog.ex2_checkpoints(), 8)) == [1, 1, 3, 7, 22, 89, 446, 2677]
    for n in range(e.horizon + 1):
        assert (f(n), g(n)) == (fo[n], go[n]), n
    for k in range(1, 8):
        assert fo[m[k]] == factorial(k - 1)
        assert Fraction(go[m[k] + 1], fo[m[k] + 1]) == k
    full = catalog.get("sec3-ex2")  # ratio k must climb past the escalation rungs
    v = ch.peer_equivalence_test(full.payload["f"], full.payload["g"], horizon=full.horizon)
    assert v.status is Status.FAILS


def per_level_oracle(f, top):
    """Level k holds {n : 2^k ≤ f(n) < 2^{k+1}}; ratio card/2^k, counted over n < top."""
    counts = {}
    for n in range(top):
        v = f(n)
        if v >= 1:
            k = v.bit_length() - 1
            counts[k] = counts.get(k, 0) + 1
    return counts


def test_dyadic_levels_factorial_blocks_bounded():
    f = catalog.get("sec6-ex1").payload["f"]
    counts = per_level_oracle(f, factorial(8))
    full = [k for k in counts if 2 ** (k + 1) <= factorial(8)]
    assert max(Fraction(counts[k], 2 ** k) for k in full) <= 2
    assert ch.eu_dyadic_test(f, horizon=factorial(9)).status is Status.HOLDS


def test_dyadic_levels_factorial_sums_unbounded():
    f = catalog.get("sec6-ex2").payload["f"]
    top = catalog.factorial_sums(8)
    counts = per_level_oracle(f, top)
    # the level of k! holds the whole plateau (m_k, m_{k+1}) of length (k+1)! - 1, plus m_k itself
    for k in range(3, 8):
        lev = factorial(k).bit_length() - 1
        assert counts[lev] >= factorial(k + 1)
    assert ch.eu_dyadic_test(f, horizon=catalog.factorial_sums(12)).status is Status.FAILS


# farah-bridge

def test_farah_measures_of_identity():
    ms = farah_measures(Identity(), 10)
    assert ms.thresholds == [2 ** k for k in range(11)]
    for k in range(10):
        m = ms[k]
        assert (m.min, m.max) == (2 ** k, 2 ** (k + 1) - 1)
        assert m.total == 1


def test_weight_from_dyadic_measures():
    rows = [[{"lo": 2 ** n, "hi": 2 ** (n + 1), "mass_num": 1, "mass_den": 2 ** n}] for n in range(8)]
    g = weight_from_measures(from_json(rows))
    assert all(g(k) == 1 for k in range(0, 2))
    for n in range(7):
        for k in range(2 ** (n + 1), 2 ** (n + 2)):
            assert g(k) == 2 ** (n + 1)


# constructions

def test_weight_count_of_powers():
    A = subsets.powers(2)
    g = con.weight_count_of(A, 5000)
    for n in range(2, 5000):
        want = brute_count(lambda x: x > 0 and x & (x - 1) == 0, n)
        assert g(n) == want
        assert want == (n - 1).bit_length()  # ⌈log₂ n⌉; the half-open count misses n itself


def test_weight_from_checkpoints_powers():
    g = con.weight_from_checkpoints(subsets.powers(2))
    assert g(5) == 8
    for n in range(1, 300):
        assert g(n) == min(2 ** i for i in range(20) if n <= 2 ** i)


def test_max_combine_equal_ideal_pair_is_g():
    e = catalog.get("sec3-ex2", 8)
    f, g = e.payload["f"], e.payload["g"]
    h = con.max_combine(f, g)
    assert all(h(n) == g(n) for n in range(e.horizon + 1))


def test_ad_branch_intersection_three():
    P, Q = subsets.ad_branch("(01)"), subsets.ad_branch("0(110)")
    assert "".join(str(b) for b in islice(subsets.word_bits("(01)"), 4)) == "0101"
    assert "".join(str(b) for b in islice(subsets.word_bits("0(110)"), 4)) == "0110"

    def codes(word, depth):
        return {(1 << d) - 1 + int(word[:d] or "0", 2) for d in range(depth + 1)}
    oracle = codes("01" * 20, 40) & codes("0" + "110" * 14, 40)
    got = set(P.elements_below(2 ** 41)) & set(Q.elements_below(2 ** 41))
    assert got == oracle and len(got) == 3


def test_f_alpha_differs_both_ways():
    f, g = Identity(), catalog.get("sec6-ex1").payload["f"]
    a = con.f_alpha_family(f, g, "(01)", horizon=10 ** 6)["f_alpha"]
    b = con.f_alpha_family(f, g, "(10)", horizon=10 ** 6)["f_alpha"]
    ns = con.f_alpha_family(f, g, "(01)", horizon=10 ** 6).sequences["n_k"]
    up = [Fraction(a(n), b(n)) for k, n in enumerate(ns) if k % 2]
    down = [Fraction(b(n), a(n)) for k, n in enumerate(ns) if not k % 2]
    assert all(r > k for k, r in enumerate(up, 1)) and all(r > k for k, r in enumerate(down[1:], 1))


def test_separating_set_identity():
    f = Identity()
    g = Callable(lambda n: n * (n + 2).bit_length() - n if n else 0, name="nlog")  # n·⌊log₂(n+2)⌋
    assert all(g(n) == n * int(np.floor(np.log2(n + 2))) for n in range(1, 2000))
    c = con.separating_set_for_peers(f, (Fraction(1), 2, 1), g, horizon=10 ** 6)
    A = c["A"]
    for k, row in enumerate(c.margins):
        if row["width"] == 0:
            continue
        end = row["n_k"] + row["width"]
        assert Fraction(A.count(end), end) > Fraction(1, 4)
        assert Fraction(A.count(end), g(end)) <= Fraction(1, max(k, 1)) + Fraction(1, g(row["n_k"]))


def test_katetov_partition_identity_classification():
    alpha = con.minimal_alpha(2)
    size = factorial(9)
    c = con.katetov_partition(np.arange(size, dtype=np.int64), alpha, range(2))
    for row in c.margins:
        lo, hi, A = row["lo"], row["hi"], 2 * row["alpha"] + 1
        d = sum(1 for n in range(lo, min(hi, A)))
        assert (row["B"], row["D"], row["C"]) == (0, d, hi - lo - d)
    zero = con.katetov_partition(np.zeros(size, dtype=np.int64), alpha, range(2))
    assert all(r["D"] == r["hi"] - r["lo"] for r in zero.margins)


def test_katetov_reduction_block_shift():
    f = catalog.get("sec6-ex1").payload["f"]
    c = con.katetov_reduction_phi(f, horizon=10 ** 6)
    phi = c["phi"]
    ks = c.sequences["k_m"]
    for n in range(ks[0] + 1):
        assert phi(n) == n
    for m in range(len(ks) - 1):
        for j in range(1, ks[m + 1] // ks[m]):
            for r in {0, ks[m] // 2, ks[m] - 1}:
                n = j * ks[m] + r
                if ks[0] < n and ks[m] <= n < ks[m + 1]:
                    assert phi(n) == r
    with pytest.raises(NotApplicableError):
        con.katetov_reduction_phi(Identity(), horizon=10 ** 4)
