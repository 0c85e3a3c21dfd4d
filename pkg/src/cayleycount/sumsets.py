"""Additive-combinatorics engine: sumsets, doubling statistics, witness
searches for the classical sumset inequalities (Plünnecke-Ruzsa-Petridis,
Olson), iterated-growth checks, generator thinning, and the expansion
corollaries used by the container machinery.

Sets of group elements are frozensets of element ids.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional

from . import groups
from .errors import InvalidInputError, SearchSpaceTooLargeError
from .groups import GeneratorSet, GroupSpec

DEFAULT_WITNESS_CAP = 20
DEFAULT_CHAIN_CAP = 16


def sumset(spec: GroupSpec, a: Iterable[int], b: Iterable[int]) -> frozenset[int]:
    """A + B = {x + y}; empty if either side is empty."""
    a = list(a)
    b = list(b)
    out = set()
    for x in a:
        for y in b:
            out.add(groups.add_ids(spec, x, y))
    return frozenset(out)


def iterated_sumset(spec: GroupSpec, a: Iterable[int], d: Iterable[int], i: int) -> frozenset[int]:
    """A + iD with the convention 0*D = {0}."""
    if i < 0:
        raise InvalidInputError("iteration count must be >= 0")
    out = frozenset(a)
    d = list(d)
    for _ in range(i):
        out = sumset(spec, out, d)
    return out


def negate(spec: GroupSpec, a: Iterable[int]) -> frozenset[int]:
    return frozenset(groups.neg_id(spec, x) for x in a)


# -- doubling statistics --------------------------------------------------------


@dataclass
class SumsetStats:
    """Doubling data for a base set D: |2D| and the representation counts
    r_u = #{ {x, y} in D, x != y : x + y = u }."""

    spec: GroupSpec
    base: frozenset[int]
    double: frozenset[int]
    reps: dict[int, int]

    @property
    def doubling(self) -> int:
        return len(self.double)

    def heavy(self, alpha: float) -> frozenset[int]:
        """Elements of 2D with at least |D| / (2 alpha) representations."""
        threshold = len(self.base) / (2 * alpha)
        return frozenset(u for u in self.double if self.reps.get(u, 0) >= threshold)


def sumset_stats(spec: GroupSpec, base: Iterable[int]) -> SumsetStats:
    base = frozenset(base)
    reps: dict[int, int] = {}
    for x, y in combinations(sorted(base), 2):
        u = groups.add_ids(spec, x, y)
        reps[u] = reps.get(u, 0) + 1
    return SumsetStats(spec, base, sumset(spec, base, base), reps)


# -- iterated growth (the m + d^i t bound) ---------------------------------------


@dataclass
class GrowthReport:
    m: int
    d: int
    t: int
    i: int
    lhs: int
    rhs: int
    holds: bool


def iterated_growth_check(spec: GroupSpec, m_set: Iterable[int], d_set: Iterable[int],
                          i: int) -> GrowthReport:
    """Check |M + iD| <= m + d^i * t where t = |M + D| - |M|."""
    m_set = frozenset(m_set)
    d_set = frozenset(d_set)
    if not d_set:
        raise InvalidInputError("D must be nonempty")
    if i < 2:
        raise InvalidInputError("growth check is stated for i >= 2")
    m = len(m_set)
    t = len(sumset(spec, m_set, d_set)) - m
    if t < 0:
        raise InvalidInputError("|M + D| < |M|: growth precondition violated")
    lhs = len(iterated_sumset(spec, m_set, d_set, i))
    rhs = m + len(d_set) ** i * t
    return GrowthReport(m, len(d_set), t, i, lhs, rhs, lhs <= rhs)


# -- Plünnecke-Ruzsa-Petridis witness --------------------------------------------


@dataclass
class PrpWitness:
    alpha: Fraction
    j: int
    witness: frozenset[int]
    lhs: int
    rhs: Fraction


def prp_witness_search(spec: GroupSpec, m_set: Iterable[int], d_set: Iterable[int],
                       j: int, cap: int = DEFAULT_WITNESS_CAP) -> PrpWitness:
    """Largest M' <= M with |M' + jD| <= alpha^j |M'|, alpha = |M+D|/|M|.

    Exhaustive largest-first subset search; existence is guaranteed, so an
    empty search is a hard failure rather than a result.
    """
    m_set = frozenset(m_set)
    d_set = frozenset(d_set)
    if not m_set:
        raise InvalidInputError("M must be nonempty")
    if j < 1:
        raise InvalidInputError("j must be >= 1")
    if len(m_set) > cap:
        raise SearchSpaceTooLargeError(
            f"|M| = {len(m_set)} exceeds exhaustive cap {cap}")
    alpha = Fraction(len(sumset(spec, m_set, d_set)), len(m_set))
    jd = iterated_sumset(spec, [0], d_set, j)
    ordered = sorted(m_set)
    for size in range(len(ordered), 0, -1):
        for combo in combinations(ordered, size):
            lhs = len(sumset(spec, combo, jd))
            rhs = alpha ** j * size
            if lhs <= rhs:
                return PrpWitness(alpha, j, frozenset(combo), lhs, rhs)
    raise AssertionError(
        "no witness found: the inequality is a theorem, this is a bug")


# -- Olson / Cauchy-Davenport style disjunction -----------------------------------


@dataclass
class OlsonReport:
    branch: str              # "stabilized" or "expanded"
    holds: bool
    m: int
    n: int
    sum_size: int            # |M + N|
    sum2_size: int           # |M + 2N|


def olson_check(spec: GroupSpec, m_set: Iterable[int], n_set: Iterable[int]) -> OlsonReport:
    """Either M + 2N = M + N, or |M + N| >= |M| + |N|/2.

    N is shifted internally so that 0 is a member; the branch taken and all
    sizes are shift-invariant.
    """
    m_set = frozenset(m_set)
    n_set = frozenset(n_set)
    if not m_set or not n_set:
        raise InvalidInputError("M and N must be nonempty")
    if 0 not in n_set:
        shift = groups.neg_id(spec, min(n_set))
        n_set = frozenset(groups.add_ids(spec, x, shift) for x in n_set)
    mn = sumset(spec, m_set, n_set)
    m2n = sumset(spec, mn, n_set)
    stabilized = m2n == mn
    expanded = 2 * len(mn) >= 2 * len(m_set) + len(n_set)
    return OlsonReport(
        branch="stabilized" if stabilized else "expanded",
        holds=stabilized or expanded,
        m=len(m_set),
        n=len(n_set),
        sum_size=len(mn),
        sum2_size=len(m2n),
    )


# -- shrinking chains with controlled iterated growth ------------------------------


@dataclass
class ChainWitness:
    chain: list[frozenset[int]]      # M = M^(0) >= M^(1) >= ... >= M^(k)
    success: bool
    mode: str                        # "exhaustive" or "greedy"
    t: int
    removal_budget: int
    bounds: list[tuple[int, int, int]] = field(default_factory=list)  # (i, lhs, rhs)


def _chain_bound(m: int, i: int, c: Fraction, t: int) -> Fraction:
    return m + Fraction((2 * i) ** (i + 1)) * c ** i * t


def chain_witness_search(spec: GroupSpec, m_set: Iterable[int], d_set: Iterable[int],
                         k: int, c: float = 4, mode: str = "auto",
                         cap: int = DEFAULT_CHAIN_CAP) -> ChainWitness:
    """Find a chain M = M^(0) >= ... >= M^(k), each step removing at most
    t/c elements, with |M^(i) + (i+1)D| <= m + (2i)^(i+1) c^i t for each
    level 1 <= i <= k.

    Exhaustive mode proves existence on small instances; greedy mode
    (repeatedly drop the element whose removal shrinks the iterated sumset
    most) reports success or failure without an existence guarantee.
    """
    m_set = frozenset(m_set)
    d_set = frozenset(d_set)
    if not m_set or not d_set:
        raise InvalidInputError("M and D must be nonempty")
    if k < 1:
        raise InvalidInputError("k must be >= 1")
    c_frac = Fraction(c).limit_denominator(10**6) if not isinstance(c, int) else Fraction(c)
    if c_frac < 4:
        raise InvalidInputError("c must be >= 4")
    m = len(m_set)
    t = len(sumset(spec, m_set, d_set)) - m
    if t < 0:
        raise InvalidInputError("|M + D| < |M|: chain precondition violated")
    budget = int(Fraction(t) / c_frac)

    if mode == "auto":
        mode = "exhaustive" if m <= cap else "greedy"
    if mode == "exhaustive" and m > cap:
        raise SearchSpaceTooLargeError(f"|M| = {m} exceeds exhaustive cap {cap}")

    powers = [iterated_sumset(spec, [0], d_set, i + 1) for i in range(k + 1)]

    def level_ok(subset: frozenset[int], i: int) -> Optional[tuple[int, int]]:
        lhs = len(sumset(spec, subset, powers[i]))
        rhs = _chain_bound(m, i, c_frac, t)
        return (lhs, int(rhs)) if lhs <= rhs else None

    if mode == "exhaustive":
        def dfs(current: frozenset[int], level: int,
                acc: list[frozenset[int]], bounds: list[tuple[int, int, int]]) -> bool:
            if level > k:
                return True
            ordered = sorted(current)
            for removed in range(budget + 1):
                for drop in combinations(ordered, removed):
                    cand = current.difference(drop)
                    chk = level_ok(cand, level)
                    if chk is None:
                        continue
                    acc.append(cand)
                    bounds.append((level, chk[0], chk[1]))
                    if dfs(cand, level + 1, acc, bounds):
                        return True
                    acc.pop()
                    bounds.pop()
            return False

        acc: list[frozenset[int]] = [m_set]
        bounds: list[tuple[int, int, int]] = []
        ok = dfs(m_set, 1, acc, bounds)
        return ChainWitness(acc, ok, "exhaustive", t, budget, bounds)

    # greedy
    chain = [m_set]
    bounds = []
    current = m_set
    success = True
    for level in range(1, k + 1):
        removed = 0
        while True:
            chk = level_ok(current, level)
            if chk is not None:
                bounds.append((level, chk[0], chk[1]))
                break
            if removed >= budget or len(current) <= 1:
                success = False
                break
            best_x, best_sz = None, None
            for x in sorted(current):
                sz = len(sumset(spec, current - {x}, powers[level]))
                if best_sz is None or sz < best_sz:
                    best_x, best_sz = x, sz
            current = current - {best_x}
            removed += 1
        if not success:
            break
        chain.append(current)
    return ChainWitness(chain, success, "greedy", t, budget, bounds)


# -- generator thinning -------------------------------------------------------------


@dataclass
class ThinningConfig:
    alpha: float
    seed: int = 0

    @property
    def p(self) -> float:
        return 1.0 / (15.0 * self.alpha)

    def __post_init__(self) -> None:
        if self.alpha < 1:
            raise InvalidInputError("alpha must be >= 1")


@dataclass
class ThinningReport:
    d_size: int
    thin_size: int
    window: tuple[float, float]
    in_window: bool
    doubling_lhs: int
    doubling_rhs: float
    doubling_ok: bool
    generating: bool
    symmetric: bool
    minimal_gen_size: int
    minimal_gen_log_ok: bool
    precondition_doubling_ok: bool


def minimal_generating_subset(spec: GroupSpec, d_set: Iterable[int]) -> list[int]:
    """Greedy minimal generating subset: scan ids in order, keep an element
    iff it enlarges the generated subgroup.  At most log2(order) elements."""
    chosen: list[int] = []
    current = groups.subgroup_generated(spec, [])
    for x in sorted(frozenset(d_set)):
        if x not in current:
            chosen.append(x)
            current = groups.subgroup_generated(spec, chosen)
            if len(current) == spec.order:
                break
    return chosen


def thin_generators(spec: GroupSpec, gens: GeneratorSet,
                    cfg: ThinningConfig) -> tuple[GeneratorSet, ThinningReport]:
    """Thin a slowly-doubling generator set down to a sparse symmetric
    generating subset P u -P u S u -S with a p-random P and a greedy
    minimal generating S.

    Symmetry and generation are exact for every seed; the size window and
    the restored doubling are probabilistic and only reported.
    """
    if not groups.is_generating(spec, gens.ids):
        raise InvalidInputError("D must generate the group")
    d = gens.d
    alpha = cfg.alpha
    precondition_ok = gens.d2 <= alpha * d

    rng = random.Random(f"thin:{cfg.seed}")
    p = cfg.p
    picked = {x for x in sorted(gens.ids) if rng.random() < p}
    s_set = minimal_generating_subset(spec, gens.ids)
    thin_ids = set(picked) | set(groups.neg_id(spec, x) for x in picked)
    thin_ids |= set(s_set) | {groups.neg_id(spec, x) for x in s_set}
    thin = GeneratorSet(spec, thin_ids)

    window = (d / (20 * alpha), 2 * d / (5 * alpha))
    doubled = len(sumset(spec, thin.ids, thin.ids))
    report = ThinningReport(
        d_size=d,
        thin_size=thin.d,
        window=window,
        in_window=window[0] <= thin.d <= window[1],
        doubling_lhs=doubled,
        doubling_rhs=alpha * thin.d,
        doubling_ok=doubled >= alpha * thin.d,
        generating=groups.is_generating(spec, thin.ids),
        symmetric=True,  # enforced by the GeneratorSet constructor
        minimal_gen_size=len(s_set),
        minimal_gen_log_ok=len(s_set) <= math.log2(spec.order),
        precondition_doubling_ok=precondition_ok,
    )
    return thin, report


# -- expansion corollaries ------------------------------------------------------------


@dataclass
class SubCheck:
    applicable: bool
    holds: Optional[bool]
    lhs: Optional[float] = None
    rhs: Optional[float] = None
    note: str = ""


@dataclass
class ExpansionReport:
    doubling_from_expansion: SubCheck   # |2D| <= 2 (alpha^2 - 1) |M|
    partial_doubling: SubCheck          # |D + D'| >= |2D| (1 - 1/log^2 d)
    sixth_expansion: SubCheck           # |M + D| >= |M| + |2D| / 6


def basic_expansion_check(spec: GroupSpec, m_set: Iterable[int], gens: GeneratorSet,
                          d_sub: Optional[Iterable[int]] = None) -> ExpansionReport:
    """Verify the three expansion facts linking small neighborhoods to
    doubling, on one instance.  Each sub-check reports whether its
    hypotheses held; conclusions are only asserted when they did."""
    m_set = frozenset(m_set)
    d_set = gens.ids
    d = len(d_set)
    two_d = sumset(spec, d_set, d_set)
    d2 = len(two_d)
    log_d = math.log2(d) if d >= 2 else 0.0

    # partial doubling: removing few generators keeps most of the doubling
    if d_sub is None:
        d_sub = d_set
    d_sub = frozenset(d_sub)
    if not d_sub <= d_set:
        raise InvalidInputError("D' must be a subset of D")
    if d < 2:
        partial = SubCheck(False, None, note="needs d >= 2")
    else:
        removal_ok = len(d_set - d_sub) <= math.sqrt(d) / log_d
        if not removal_ok:
            partial = SubCheck(False, None, note="|D \\ D'| too large")
        else:
            lhs = len(sumset(spec, d_set, d_sub))
            rhs = d2 * (1 - 1 / log_d**2)
            partial = SubCheck(True, lhs >= rhs, lhs, rhs)

    bip = groups.bipartition(spec, gens)
    generating = groups.is_generating(spec, gens.ids)

    def side_of(mset: frozenset[int]):
        if bip is None:
            return None
        for side in bip:
            if mset <= side:
                return side
        return None

    side = side_of(m_set) if m_set else (bip[0] if bip else None)
    half = spec.order // 2

    if bip is None or side is None or not generating or not m_set:
        doubling = SubCheck(False, None, note="needs connected bipartite context and M on one side")
        sixth = SubCheck(False, None, note="needs connected bipartite context and M on one side")
    else:
        n_side = len(side)
        m2d = iterated_sumset(spec, m_set, d_set, 2)
        if 2 * len(m_set) > n_side or m2d == side:
            doubling = SubCheck(False, None, note="hypothesis failed (M too large or M+2D = X)")
        else:
            alpha = Fraction(len(sumset(spec, m_set, d_set)), len(m_set))
            lhs = Fraction(d2)
            rhs = 2 * (alpha**2 - 1) * len(m_set)
            doubling = SubCheck(True, lhs <= rhs, float(lhs), float(rhs))

        # does M contain most of a translate of D?
        translate_ok = False
        if d >= 2:
            need = d - math.sqrt(d) / log_d
            for u in range(spec.order):
                cover = sum(1 for x in d_set if groups.add_ids(spec, u, x) in m_set)
                if cover >= need:
                    translate_ok = True
                    break
        if not translate_ok or 2 * len(m_set) > n_side:
            sixth = SubCheck(False, None, note="hypothesis failed (no dense translate or M too large)")
        else:
            lhs_i = 6 * len(sumset(spec, m_set, d_set))
            rhs_i = 6 * len(m_set) + d2
            sixth = SubCheck(True, lhs_i >= rhs_i, lhs_i / 6, rhs_i / 6)

    return ExpansionReport(doubling, partial, sixth)
