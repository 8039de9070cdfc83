"""Prefix tests, with certificates, for the stretch, jump, inclusion, peer and EU properties."""

from fractions import Fraction

from ._evidence import bounded_or_escalating, halves, rung_above
from .density import sample_points
from .errors import PreconditionError
from .verdict import Status, Verdict

EPS_GRID = (Fraction(1, 4), Fraction(1, 2), Fraction(1), Fraction(2))
M_GRID = (Fraction(2), Fraction(4), Fraction(8), Fraction(16))
L_LADDER = (1, 2, 4, 8, 16, 32, 64)
POLICY_NOTE = "escalation ladder = successive integers; a workbench policy, not a theorem"


def _positive_start(f, horizon):
    n0 = f.zero_prefix(limit=horizon)
    if n0 is None:
        raise PreconditionError(f"{f.name} vanishes on the whole prefix [0, {horizon}]")
    return n0


def _grid(values, what):
    values = [Fraction(v) for v in values]
    if not values:
        raise ValueError(f"{what} grid is empty")
    if any(v <= 0 for v in values):
        raise ValueError(f"{what} grid must be positive")
    return sorted(set(values))


def stretch_ratio(f, n, eps):
    fn = f(n)
    return Fraction(f(n + int(Fraction(eps) * fn)), fn)


def _tail_start(points, bound):
    """Least sampled n from which every later sample stays ≤ bound."""
    n0 = None
    for n, v in reversed(points):
        if v > bound:
            break
        n0 = n
    return n0


def sf_singleton_test(f, eps_grid=EPS_GRID, m_grid=M_GRID, horizon=10_000, k_witnesses=3):
    """Evidence that f(n + ⌊εf(n)⌋)/f(n) ≤ M for almost all n.

    Certificate choice: the least grid M over all bounded ε, ties going to
    the ε closest to 1 (the larger one if still tied).
    """
    eps_grid, m_grid = _grid(eps_grid, "epsilon"), _grid(m_grid, "M")
    start = _positive_start(f, horizon)
    pts = sample_points(f, horizon, start)
    per_eps, pairs = {}, []
    for eps in eps_grid:
        series = [(n, stretch_ratio(f, n, eps)) for n in pts]
        rep = bounded_or_escalating(series, k_witnesses)
        per_eps[eps] = (rep, series)
        if rep.status is Status.HOLDS:
            for M in m_grid:
                if M >= rep.tail_max:
                    n0 = _tail_start(series, M)
                    if n0 is not None and n0 <= halves(series)[1][0][0]:
                        pairs.append((M, abs(eps - 1), -eps, eps, n0, series))
                    break
    details = {"samples": len(pts), "start": start, "policy": POLICY_NOTE,
               "per_eps": {str(e): {"status": r.status.value, "head_max": r.head_max,
                                    "tail_max": r.tail_max, "records": r.records}
                           for e, (r, _) in per_eps.items()}}
    if pairs:
        pairs.sort(key=lambda p: p[:3])
        M, _, _, eps, n0, series = pairs[0]
        m_all = max(M, max(v for _, v in series))
        cert = {"eps": eps, "M": M, "n0": n0, "M_for_all_n": m_all,
                "valid_pairs": [[p[3], p[0]] for p in pairs]}
        return Verdict(Status.HOLDS, M, [], cert, "STRETCH_BOUNDED", details)
    if all(r.status is Status.FAILS for r, _ in per_eps.values()):
        eps_pick = min(per_eps, key=lambda e: (abs(e - 1), -e))
        rep = per_eps[eps_pick][0]
        return Verdict(Status.FAILS, rep.tail_max, rep.witnesses,
                       {"eps": eps_pick, "records": rep.records}, "STRETCH_UNBOUNDED", details)
    return Verdict(Status.INCONCLUSIVE, None, [], {}, "", details)


def jump_chain(series, first_rung=2):
    """Greedy chain of strictly growing ratios, each climbing past the next integer rung."""
    chain, rung = [], Fraction(first_rung)
    for n, v in series:
        if v >= rung and (not chain or v > chain[-1][1]):
            chain.append((n, v))
            rung = rung_above(v)
    return chain


def jump_test(f, l_range=(1, 2, 3), horizon=10_000, k_witnesses=3):
    """Look for checkpoints n_k with f(n_k + l)/f(n_k) climbing without bound."""
    start = _positive_start(f, horizon)
    pts = sample_points(f, horizon, start)
    late = halves(pts)[1]

    def climbing(chain):
        return len(chain) >= k_witnesses and bool(late) and chain[-1][0] >= late[0]

    best = None
    for l in l_range:
        chain = jump_chain([(n, Fraction(f(n + l), f(n))) for n in pts])
        key = (climbing(chain), len(chain))
        if best is None or key > best[0]:
            best = (key, l, chain)
    _, l, chain = best
    details = {"samples": len(pts), "policy": POLICY_NOTE}
    if climbing(chain):
        return Verdict(Status.FAILS, chain[-1][1], [n for n, _ in chain],
                       {"l": l, "ratios": chain}, "JUMP_WITNESS", details)
    return Verdict(Status.INCONCLUSIVE, chain[-1][1] if chain else None, [],
                   {"l": l, "ratios": chain}, "NO_WITNESS", details)


def increment_test(f, horizon=10_000, k_witnesses=3):
    pts = sample_points(f, horizon)
    series = [(n, Fraction(f(n + 1) - f(n))) for n in pts]
    rep = bounded_or_escalating(series, k_witnesses)
    top = max(v for _, v in series)
    details = {"samples": len(pts), "head_max": rep.head_max, "tail_max": rep.tail_max}
    if rep.status is Status.FAILS:
        return Verdict(Status.FAILS, top, rep.witnesses, {"records": rep.records},
                       "INCREMENTS_UNBOUNDED", details)
    return Verdict(rep.status, top, [], {"max_increment": top}, "", details)


def inclusion_in_Z_test(f, horizon=10_000, floor=Fraction(1, 1024), k_witnesses=3):
    """Evidence for liminf n/f(n) > 0; the margin is the tail minimum of n/f(n)."""
    start = max(1, _positive_start(f, horizon))
    pts = sample_points(f, horizon, start)
    inv = [(n, Fraction(f(n), n)) for n in pts]
    rep = bounded_or_escalating(inv, k_witnesses)
    tail = halves(pts)[1] or pts
    margin = min(Fraction(n, f(n)) for n in tail)
    details = {"samples": len(pts), "floor": floor, "f_over_n_tail_max": rep.tail_max}
    if rep.status is Status.FAILS:
        return Verdict(Status.FAILS, margin, rep.witnesses,
                       {"records": [(n, 1 / v) for n, v in rep.records]}, "LIMINF_ZERO", details)
    if rep.status is Status.HOLDS and margin >= floor:
        return Verdict(Status.HOLDS, margin, [], {"liminf_lower_bound": margin}, "INCLUDED", details)
    return Verdict(Status.INCONCLUSIVE, margin, [], {}, "", details)


def peer_equivalence_test(f, g, horizon=10_000, k_witnesses=3):
    """Bracket m ≤ f/g ≤ M and g/f ≤ M' on the prefix past both zero-prefixes."""
    start = max(_positive_start(f, horizon), _positive_start(g, horizon))
    pts = sorted(set(sample_points(f, horizon, start)) | set(sample_points(g, horizon, start)))
    fg = [(n, Fraction(f(n), g(n))) for n in pts]
    gf = [(n, 1 / v) for n, v in fg]
    up, down = bounded_or_escalating(fg, k_witnesses), bounded_or_escalating(gf, k_witnesses)
    details = {"samples": len(pts), "start": start}
    for direction, rep in (("f/g", up), ("g/f", down)):
        if rep.status is Status.FAILS:
            return Verdict(Status.FAILS, rep.tail_max, rep.witnesses,
                           {"direction": direction, "records": rep.records}, "RATIO_UNBOUNDED", details)
    if up.status is Status.HOLDS and down.status is Status.HOLDS:
        m = min(v for _, v in fg)
        cert = {"m": m, "M": max(v for _, v in fg), "inverse_M": max(v for _, v in gf), "n0": start}
        return Verdict(Status.HOLDS, m, [], cert, "BRACKETED", details)
    return Verdict(Status.INCONCLUSIVE, None, [], {}, "", details)


def dyadic_levels(g, level_range, horizon):
    """Per level n: (lo, hi, card, ratio) for g⁻¹[2ⁿ, 2ⁿ⁺¹) = [lo, hi), or None if unresolved."""
    out = {}
    for n in level_range:
        lo = g.first_at_least(2 ** n, limit=horizon)
        hi = g.first_at_least(2 ** (n + 1), limit=horizon)
        if lo is None or hi is None:
            out[n] = None
            continue
        card = hi - lo
        out[n] = (lo, hi, card, Fraction(card, 2 ** n))
    return out


def eu_dyadic_test(g, level_range=None, horizon=10_000, k_witnesses=3):
    """Boundedness of card(g⁻¹[2ⁿ,2ⁿ⁺¹))/2ⁿ over the fully resolved levels."""
    if level_range is None:
        level_range = range(0, max(1, horizon.bit_length()))
    levels = dyadic_levels(g, level_range, horizon)
    resolved = [(n, row[3]) for n, row in levels.items() if row is not None]
    unresolved = [n for n, row in levels.items() if row is None]
    details = {"levels": {n: (None if r is None else {"lo": r[0], "hi": r[1], "card": r[2], "ratio": r[3]})
                          for n, r in levels.items()},
               "unresolved": unresolved}
    if not resolved:
        return Verdict(Status.INCONCLUSIVE, None, [], {}, "NO_RESOLVED_LEVEL", details)
    rep = bounded_or_escalating(resolved, k_witnesses)
    top = max(v for _, v in resolved)
    if rep.status is Status.FAILS:
        return Verdict(Status.FAILS, top, rep.witnesses, {"records": rep.records}, "LEVELS_UNBOUNDED", details)
    return Verdict(rep.status, top, [], {"max_ratio": top} if rep.status is Status.HOLDS else {},
                   "", details)


def eu_stretch_test(f, m_grid=M_GRID, horizon=10_000, l_ladder=L_LADDER):
    """For each M, search L on the ladder with f(n + ⌊Lf(n)⌋)/f(n) > M for all sampled n ≥ n0."""
    m_grid = _grid(m_grid, "M")
    start = _positive_start(f, horizon)
    pts = sample_points(f, horizon, start)
    if len(pts) < 2:
        return Verdict(Status.INCONCLUSIVE, None, [], {}, "TOO_FEW_SAMPLES", {})
    second_half = halves(pts)[1][0]
    series = {L: [(n, stretch_ratio(f, n, L)) for n in pts] for L in l_ladder}
    cert, bad = {}, None
    for M in m_grid:
        found = None
        late_low = {}
        for L in l_ladder:
            low = [n for n, v in series[L] if v <= M]
            if not low or low[-1] < second_half:
                later = [n for n in pts if not low or n > low[-1]]
                if later:
                    n0 = later[0]
                    margin = min(v for n, v in series[L] if n >= n0)
                    found = {"L": L, "n0": n0, "min_ratio": margin}
                    break
            late_low[L] = low[-1]
        if found is None:
            if len(late_low) == len(l_ladder) and bad is None:
                bad = (M, late_low)
            continue
        cert[M] = found
    details = {"samples": len(pts), "ladder": list(l_ladder), "per_M": cert}
    if len(cert) == len(m_grid):
        margin = min(c["min_ratio"] for c in cert.values())
        return Verdict(Status.HOLDS, margin, [], {"by_M": cert}, "STRETCH_EXCEEDS_M", details)
    if bad is not None:
        M, late = bad
        witnesses = sorted(set(late.values()))
        margin = max(stretch_ratio(f, n, L) for L, n in late.items())
        return Verdict(Status.FAILS, margin, witnesses, {"M": M, "late_low_by_L": late},
                       "NO_L_WORKS", details)
    return Verdict(Status.INCONCLUSIVE, None, [], {}, "", details)
