"""Local regions (t, J): chamber sets, skewness, interval structure, conjugation.

The chamber set F^(t,J) = {w in W : R(w) cap Z(t) empty, R(w) cap P(t) = J}
is computed two ways: a brute-force filter over all of W (the oracle, capped)
and a pruned breadth-first search over the weak-order ideal
{w : R(w) cap Z(t) empty, R(w) cap P(t) subset J}, which never enumerates W
and therefore scales to large symmetric groups. The two agree wherever both
run; tests cross-check them on small ranks.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    EmptyRegion,
    JNotSubsetOfP,
    NotDominant,
    UnsupportedType,
)
from .rootsys import RootSystem, WeylElt, reflect, vec_add, vec_dot, vec_neg
from .weights import Weight, invert_tag

# ---------------------------------------------------------------------------
# regions and chamber sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LocalRegion:
    """A dominant weight together with a choice of J inside P(t)."""

    t: Weight
    J: frozenset


def local_region(t: Weight, J) -> LocalRegion:
    if not t.is_dominant():
        raise NotDominant("local regions are labelled by dominant weights")
    J = frozenset(tuple(a) for a in J)
    _, P = t.zp_sets()
    if not J <= P:
        raise JNotSubsetOfP(f"J has {len(J - P)} roots outside P(t)")
    return LocalRegion(t, J)


@dataclass
class ChamberSet:
    """The elements of F^(t,J), sorted by (length, reduced word)."""

    t: Weight
    J: frozenset
    elements: tuple[WeylElt, ...]

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def describe(self) -> dict:
        out = {
            "J": sorted([str(c) for c in a] for a in self.J),
            "size": len(self.elements),
            "elements": [
                {
                    "word": [i + 1 for i in w.reduced_word()],
                    "length": w.length(),
                    **({"one_line": list(w.one_line())}
                       if w.one_line() else {}),
                }
                for w in self.elements
            ],
        }
        return out


def chamber_set(t: Weight, J, cap: int | None = None) -> ChamberSet:
    """Brute-force filter of W; the ground truth everything else tests against."""
    J = frozenset(tuple(a) for a in J)
    Z, P = t.zp_sets()
    if not J <= P:
        raise JNotSubsetOfP(f"J has {len(J - P)} roots outside P(t)")
    hits = []
    for w in t.rs.weyl_elements(cap):
        inv = w.inversion_set()
        if inv & Z:
            continue
        if inv & P == J:
            hits.append(w)
    return ChamberSet(t, J, tuple(hits))


def _ideal(t: Weight, J: frozenset) -> list[WeylElt]:
    """BFS over {w : R(w) cap Z = empty, R(w) cap P subset J}.

    The set is a lower order ideal in the (left) weak order, so it is
    reachable from the identity by steps w -> s_i w that each add the single
    inversion w^{-1}(alpha_i).
    """
    rs = t.rs
    Z, P = t.zp_sets()
    gens = [rs.simple_reflection(i) for i in range(rs.rank)]
    simples = rs.simple_roots
    seen = {rs.identity().matrix}
    out = [rs.identity()]
    frontier = [rs.identity()]
    while frontier:
        nxt = []
        for w in frontier:
            for i, s in enumerate(gens):
                new_root = w.act_inverse(simples[i])
                if not rs.is_positive_root(new_root):
                    continue  # length would drop
                if new_root in Z:
                    continue
                if new_root in P and new_root not in J:
                    continue
                sw = s * w
                if sw.matrix in seen:
                    continue
                seen.add(sw.matrix)
                out.append(sw)
                nxt.append(sw)
        frontier = nxt
    return out


def chamber_set_pruned(t: Weight, J) -> ChamberSet:
    """Same contract as chamber_set, but via the weak-order ideal BFS."""
    J = frozenset(tuple(a) for a in J)
    _, P = t.zp_sets()
    if not J <= P:
        raise JNotSubsetOfP(f"J has {len(J - P)} roots outside P(t)")
    hits = [w for w in _ideal(t, J) if w.inversion_set() & P == J]
    hits.sort(key=lambda w: w.sort_key())
    return ChamberSet(t, J, tuple(hits))


def fibers(t: Weight, cap: int | None = None) -> dict:
    """All nonempty F^(t,J) keyed by J, partitioning {w : R(w) cap Z = empty}."""
    Z, P = t.zp_sets()
    buckets: dict[frozenset, list[WeylElt]] = {}
    for w in t.rs.weyl_elements(cap):
        inv = w.inversion_set()
        if inv & Z:
            continue
        buckets.setdefault(frozenset(inv & P), []).append(w)
    ordered = sorted(buckets, key=lambda J: (len(J), sorted(J)))
    return {J: ChamberSet(t, J, tuple(buckets[J])) for J in ordered}


# ---------------------------------------------------------------------------
# calibratable weights, skew regions
# ---------------------------------------------------------------------------

def rank_two_positive(rs: RootSystem, i: int, j: int):
    """Positive roots of the rank-two subsystem spanned by simples i and j."""
    out = []
    for a in rs.positive_roots:
        coeffs = rs.simple_coefficients(a)
        if all(c == 0 for k, c in enumerate(coeffs) if k not in (i, j)):
            out.append(a)
    return tuple(out)


def is_calibratable(t: Weight) -> bool:
    """Regular on rank-1 simple subsystems, almost regular on rank-2 ones.

    Requires (a) t(X^{alpha_i}) != 1 for every simple root, and (b) whenever a
    rank-two subsystem R_ij meets Z(t), more than two of its positive roots
    lie in P(t).
    """
    rs = t.rs
    Z, P = t.zp_sets()
    if any(a in Z for a in rs.simple_roots):
        return False
    for i in range(rs.rank):
        for j in range(i + 1, rs.rank):
            sub = rank_two_positive(rs, i, j)
            if any(a in Z for a in sub):
                if sum(1 for a in sub if a in P) <= 2:
                    return False
    return True


def is_skew(region: LocalRegion) -> bool:
    """True when every weight wt over the chamber set is calibratable."""
    F = chamber_set_pruned(region.t, region.J)
    if not F.elements:
        raise EmptyRegion("skewness is defined for nonempty regions")
    return all(is_calibratable(region.t.weyl_act(w)) for w in F)


def nonempty_criterion(t: Weight, J) -> bool:
    """beta in J, alpha in Z(t), beta - alpha in R+ must force beta - alpha in J."""
    J = frozenset(tuple(a) for a in J)
    Z, _ = t.zp_sets()
    rs = t.rs
    for beta in J:
        for alpha in Z:
            diff = vec_add(beta, vec_neg(alpha))
            if rs.is_positive_root(diff) and diff not in J:
                return False
    return True


# ---------------------------------------------------------------------------
# interval structure (integral factorization of the chamber set)
# ---------------------------------------------------------------------------

@dataclass
class IntervalStructure:
    w_min: WeylElt
    w_max: WeylElt
    tau_lo: WeylElt | None
    tau_hi: WeylElt | None
    upper: tuple[WeylElt, ...]       # W^[gamma]
    interval: tuple[WeylElt, ...]    # weak-order interval [tau_lo, tau_hi] in W_[gamma]
    integral_roots: frozenset        # positive roots of R_[gamma]
    verification: dict


def _integral_positive_roots(t: Weight) -> frozenset:
    out = set()
    for a in t.rs.positive_roots:
        if t.tag_of(a) != ():
            continue
        if vec_dot(t.gamma, a).denominator == 1:
            out.add(a)
    return frozenset(out)


def _sub_simples(rs: RootSystem, sub_pos: frozenset):
    sub = sorted(sub_pos)
    out = []
    for a in sub:
        is_sum = any(
            vec_add(b, c) == a
            for bi, b in enumerate(sub) for c in sub[bi:])
        if not is_sum:
            out.append(a)
    return tuple(out)


def _element_with_sub_inversions(rs: RootSystem, sub_simples, K: frozenset):
    """The element of the reflection subgroup whose sub-inversion set is K.

    Strips K by right multiplication: a sub-simple beta in K is a right
    descent, and R'(tau s_beta) = s_beta (K minus {beta}).
    """
    tau = rs.identity()
    K = set(K)
    while K:
        beta = next((b for b in sub_simples if b in K), None)
        if beta is None:
            return None  # K is not a sub-inversion set
        K = {reflect(beta, a) for a in K if a != beta}
        if any(not rs.is_positive_root(a) for a in K):
            return None
        tau = rs.reflection(beta) * tau
    return tau


def _upper_complement(t: Weight, integral: frozenset) -> tuple:
    """W^[gamma] = {sigma : R(sigma) cap R_[gamma] = empty}, by pruned BFS."""
    rs = t.rs
    simples = rs.simple_roots
    seen = {rs.identity().matrix}
    out = [rs.identity()]
    frontier = [rs.identity()]
    while frontier:
        nxt = []
        for w in frontier:
            for i in range(rs.rank):
                new_root = w.act_inverse(simples[i])
                if not rs.is_positive_root(new_root) or new_root in integral:
                    continue
                sw = rs.simple_reflection(i) * w
                if sw.matrix in seen:
                    continue
                seen.add(sw.matrix)
                out.append(sw)
                nxt.append(sw)
        frontier = nxt
    out.sort(key=lambda w: w.sort_key())
    return tuple(out)


def _sub_interval(rs: RootSystem, sub_simples, lo: WeylElt, hi_set: frozenset,
                  integral: frozenset) -> tuple:
    """Weak-order interval [lo, hi] inside the reflection subgroup.

    Walks up from lo by left multiplication by sub-simple reflections,
    pruning to sub-inversion sets inside hi_set.
    """
    seen = {lo.matrix}
    out = [lo]
    frontier = [lo]
    while frontier:
        nxt = []
        for x in frontier:
            for beta in sub_simples:
                new_root = x.act_inverse(beta)
                if not rs.is_positive_root(new_root):
                    continue
                if new_root not in hi_set:
                    continue
                y = rs.reflection(beta) * x
                if y.matrix in seen:
                    continue
                seen.add(y.matrix)
                out.append(y)
                nxt.append(y)
        frontier = nxt
    out.sort(key=lambda w: w.sort_key())
    return tuple(out)


def sub_closure(rs: RootSystem, roots, universe: frozenset) -> frozenset:
    """Closure under root addition, restricted to the given positive universe."""
    closed = set(roots)
    changed = True
    while changed:
        changed = False
        items = list(closed)
        for i, a in enumerate(items):
            for b in items[i:]:
                s = vec_add(a, b)
                if s in universe and s not in closed:
                    closed.add(s)
                    changed = True
    return frozenset(closed)


def interval_structure(t: Weight, J) -> IntervalStructure:
    """Chamber set extremes plus the coset-times-interval factorization.

    Computes F^(t,J) exactly, its unique weak-order minimum and maximum, the
    integral subsystem R_[gamma], the complement set W^[gamma], the two
    endpoints tau determined by sub-inversion sets closure(J) and
    closure((P minus J) union Z)^c, and verifies the product decomposition
    F = W^[gamma] . [tau_lo, tau_hi] by brute force.
    """
    if t.ell is not None:
        raise UnsupportedType("interval structure applies to generic weights")
    rs = t.rs
    J = frozenset(tuple(a) for a in J)
    F = chamber_set_pruned(t, J).elements
    if not F:
        raise EmptyRegion("no interval structure for an empty chamber set")
    Z, P = t.zp_sets()

    inv_sets = {w: w.inversion_set() for w in F}
    meet = frozenset.intersection(*inv_sets.values())
    join = frozenset.union(*inv_sets.values())
    w_min = next((w for w, r in inv_sets.items() if r == meet), None)
    w_max = next((w for w, r in inv_sets.items() if r == join), None)

    integral = _integral_positive_roots(t)
    simples = _sub_simples(rs, integral)
    lo_target = sub_closure(rs, J, integral)
    hi_target = integral - sub_closure(rs, (P - J) | Z, integral)
    tau_lo = _element_with_sub_inversions(rs, simples, lo_target)
    tau_hi = _element_with_sub_inversions(rs, simples, hi_target)

    verification = {
        "unique_min": w_min is not None,
        "unique_max": w_max is not None,
        "tau_lo_found": tau_lo is not None,
        "tau_hi_found": tau_hi is not None,
    }

    upper: tuple = ()
    interval: tuple = ()
    if tau_lo is not None and tau_hi is not None:
        verification["tau_lo_matches"] = (
            tau_lo.inversion_set() & integral == lo_target)
        verification["tau_hi_matches"] = (
            tau_hi.inversion_set() & integral == hi_target)
        verification["endpoints_nested"] = lo_target <= hi_target
        if verification["endpoints_nested"]:
            upper = _upper_complement(t, integral)
            interval = _sub_interval(rs, simples, tau_lo, hi_target, integral)
            product = {(sigma * x).matrix for sigma in upper for x in interval}
            verification["product_matches"] = product == {w.matrix for w in F}

    return IntervalStructure(
        w_min=w_min, w_max=w_max, tau_lo=tau_lo, tau_hi=tau_hi,
        upper=upper, interval=interval, integral_roots=integral,
        verification=verification)


# ---------------------------------------------------------------------------
# conjugation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Conjugation:
    region: LocalRegion
    u: WeylElt
    w_image: WeylElt | None


def conjugate(region: LocalRegion, w: WeylElt | None = None) -> Conjugation:
    """(gamma, J) -> (-u gamma, -u(P minus J)) with u = w0 v, v longest in W_gamma.

    When w is supplied it is carried to w u^{-1}, which lies in the conjugate
    chamber set whenever w was in the original one.
    """
    t = region.t
    rs = t.rs
    if t.ell is not None:
        raise UnsupportedType("conjugation applies to generic weights")
    if not t.is_dominant():
        raise NotDominant("conjugation needs a dominant weight")
    Z, P = t.zp_sets()

    _, W_gamma = t.stabilizer()
    v = max(W_gamma, key=lambda x: x.length())
    if v.inversion_set() != Z:
        raise AssertionError("longest stabilizer element must invert exactly Z")
    u = rs.long_element() * v
    if u.inversion_set() != frozenset(rs.positive_roots) - Z:
        raise AssertionError("u must invert the complement of Z")

    moved = t.weyl_act(u)
    new_t = Weight(rs, vec_neg(moved.gamma),
                   tuple(invert_tag(tag) for tag in moved.tags), None)
    new_J = frozenset(vec_neg(u.act(b)) for b in P - region.J)
    image = w * u.inverse() if w is not None else None
    return Conjugation(local_region(new_t, new_J), u, image)
