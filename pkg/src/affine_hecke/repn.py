"""Finite dimensional modules: principal series, intertwiners, calibrated bases.

Matrices are tuples of tuples over one of two scalar backends. The exact
backend stores rational functions in q and is available whenever every root
evaluates to a plain q-power under the weight (in particular for untagged
generic weights; a common coset tag on all coordinates is fine in type A,
where it scales each X-generator matrix by a fixed formal unit that cancels
from every defining relation, so the stored entries simply drop it). Weights
that put a coset tag on some root, and root-of-unity weights, use the numeric
backend, where q and the tag symbols receive concrete complex values.

Verification is built in rather than trusted: every constructed module stores
a relation report, weight space data is recomputed from the matrices, and
irreducibility is measured as commutant dimension 1.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

from .algebra import AlgebraElt
from .errors import (EmptyRegion, MixedCosetExact, NotRegular, NotSkew,
                     NumericIllConditioned, TooLarge, UndefinedTau,
                     UnsupportedType)
from .regions import LocalRegion, chamber_set_pruned, is_skew
from .rootsys import (RootSystem, WeylElt, mat_transpose, solve_linear, vec,
                      vec_dot, vec_neg, vec_sub)
from .scalars import ExactScalar, near
from .weights import TRIVIAL_TAG, Weight

NUMERIC_TOL = 1e-9   # entrywise tolerance for relation checks
RANK_TOL = 1e-7      # singular value and clustering threshold

# 2^(1/3): real and > 1, so distinct rational exponents give distinct powers
DEFAULT_Q0 = 1.2599210498948732

_GOLDEN = 0.6180339887498949


# ---------------------------------------------------------------------------
# scalar backends
# ---------------------------------------------------------------------------

class _ExactOps:
    exact = True
    tol = None

    @staticmethod
    def zero():
        return ExactScalar.zero()

    @staticmethod
    def one():
        return ExactScalar.one()

    @staticmethod
    def is_zero(x) -> bool:
        return x.is_zero()

    @staticmethod
    def eq(x, y) -> bool:
        return x == y


class _NumericOps:
    exact = False

    def __init__(self, tol: float = NUMERIC_TOL):
        self.tol = tol

    @staticmethod
    def zero():
        return 0j

    @staticmethod
    def one():
        return 1 + 0j

    def is_zero(self, x) -> bool:
        return abs(x) <= self.tol

    def eq(self, x, y) -> bool:
        return near(x, y, self.tol)


def _ops_for(backend: str, tol: float = NUMERIC_TOL):
    return _ExactOps() if backend == "exact" else _NumericOps(tol)


def _exact_available(t: Weight) -> bool:
    """Exact entries need every root to evaluate to a plain q-power."""
    if t.ell is not None:
        return False
    return all(t.tag_of(a) == TRIVIAL_TAG for a in t.rs.positive_roots)


def _resolve_backend(t: Weight, backend: str) -> str:
    if backend == "auto":
        return "exact" if _exact_available(t) else "numeric"
    if backend == "exact" and not _exact_available(t):
        if t.ell is not None:
            raise UnsupportedType(
                "root-of-unity weights need the numeric backend")
        raise MixedCosetExact(
            "some root carries a coset tag; use the numeric backend")
    return backend


def _numeric_tag_values(t: Weight, overrides=None) -> dict:
    """Deterministic unit values for the tag symbols, golden-angle spaced."""
    syms = sorted({s for tag in t.tags for s, _ in tag})
    vals = {s: cmath.exp(2j * math.pi * (((k + 1) * _GOLDEN) % 1.0))
            for k, s in enumerate(syms)}
    if overrides:
        vals.update(overrides)
    return vals


def _make_evaluator(t: Weight, backend: str, q0, tag_values):
    """(lambda -> scalar) for t, plus the resolved q0 and tag values."""
    if backend == "exact":
        detagged = Weight(t.rs, t.gamma, None, None)
        return detagged.eval, None, None
    if q0 is None:
        q0 = cmath.exp(1j * math.pi / t.ell) if t.ell is not None else DEFAULT_Q0
    q0 = complex(q0)
    vals = _numeric_tag_values(t, tag_values)

    def ev(lam):
        expo = 2 * vec_dot(t.gamma, lam)
        if t.ell is not None:
            # mirrors the reduction in Weight.eval
            expo = Fraction(2 * (int(expo // 2) % t.ell))
        out = q0 ** float(expo)
        for sym, k in t.tag_of(lam):
            out *= vals[sym] ** k
        return complex(out)

    return ev, q0, vals


def _coeff(c: ExactScalar, backend: str, q0):
    return c if backend == "exact" else c.specialize(q0)


def _q_scalar(backend: str, q0):
    return ExactScalar.q_power(1) if backend == "exact" else complex(q0)


def _qm_scalar(backend: str, q0):
    if backend == "exact":
        return ExactScalar.q_power(1) - ExactScalar.q_power(-1)
    return complex(q0) - 1 / complex(q0)


def _char_is_one(t: Weight, mu) -> bool:
    if t.tag_of(mu) != TRIVIAL_TAG:
        return False
    c = vec_dot(t.gamma, mu)
    if t.ell is not None:
        return c.denominator == 1 and int(c) % t.ell == 0
    return c == 0


def _char_is_q_pm2(t: Weight, mu) -> bool:
    if t.tag_of(mu) != TRIVIAL_TAG:
        return False
    c = vec_dot(t.gamma, mu)
    if t.ell is not None:
        if c.denominator != 1:
            return False
        return int(c) % t.ell in (1, t.ell - 1)
    return c == 1 or c == -1


# ---------------------------------------------------------------------------
# generic matrix helpers (tuple-of-tuples, exact or complex entries)
# ---------------------------------------------------------------------------

def _mat_id(n: int, ops):
    one, zero = ops.one(), ops.zero()
    return tuple(tuple(one if i == j else zero for j in range(n))
                 for i in range(n))


def _mat_add(a, b):
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def _mat_sub(a, b):
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def _mat_scale(c, a):
    return tuple(tuple(c * x for x in row) for row in a)


def _mat_mul(a, b, ops):
    # skips zero left entries; T-matrices are sparse and this pays off
    n, m = len(a), len(b[0])
    zero = ops.zero()
    out = [[zero] * m for _ in range(n)]
    for i in range(n):
        arow = a[i]
        orow = out[i]
        for k, aik in enumerate(arow):
            if ops.is_zero(aik):
                continue
            brow = b[k]
            for j in range(m):
                bkj = brow[j]
                if not ops.is_zero(bkj):
                    orow[j] = orow[j] + aik * bkj
    return tuple(tuple(row) for row in out)


def _mat_eq(a, b, ops) -> bool:
    return all(ops.eq(x, y) for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def _mat_is_upper(a, ops) -> bool:
    return all(ops.is_zero(a[i][j]) for i in range(len(a)) for j in range(i))


def _mat_is_diagonal(a, ops) -> bool:
    return all(ops.is_zero(a[i][j])
               for i in range(len(a)) for j in range(len(a)) if i != j)


def _mat_power(a, k: int, ops):
    out = _mat_id(len(a), ops)
    for _ in range(k):
        out = _mat_mul(out, a, ops)
    return out


def _rref(rows, ncols: int, ops, pivot_limit: int | None = None):
    """In-place reduced row echelon form; returns the pivot column list.

    pivot_limit restricts pivot search to the first columns, which is how the
    subspace solvers detect inconsistency (a pivot needed past the limit).
    """
    limit = ncols if pivot_limit is None else pivot_limit
    if not ops.exact:
        scale = max((abs(x) for r in rows for x in r), default=0.0)
        zero_tol = ops.tol * max(1.0, scale)
    pivots = []
    r = 0
    for c in range(limit):
        if r >= len(rows):
            break
        if ops.exact:
            p = next((k for k in range(r, len(rows))
                      if not rows[k][c].is_zero()), None)
        else:
            p = max(range(r, len(rows)), key=lambda k: abs(rows[k][c]))
            if abs(rows[p][c]) <= zero_tol:
                p = None
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        rows[r] = [x / piv for x in rows[r]]
        for k in range(len(rows)):
            if k != r:
                f = rows[k][c]
                if not ops.is_zero(f):
                    rows[k] = [x - f * y for x, y in zip(rows[k], rows[r])]
        pivots.append(c)
        r += 1
    return pivots


def _rank_nullspace(rows, ops):
    """(rank, nullspace basis) of the linear map given by the stacked rows."""
    if not rows:
        return 0, ()
    ncols = len(rows[0])
    work = [list(r) for r in rows]
    pivots = _rref(work, ncols, ops)
    pivot_set = set(pivots)
    zero, one = ops.zero(), ops.one()
    basis = []
    for f in range(ncols):
        if f in pivot_set:
            continue
        v = [zero] * ncols
        v[f] = one
        for row_idx, pc in enumerate(pivots):
            v[pc] = -work[row_idx][f]
        basis.append(tuple(v))
    return len(pivots), tuple(basis)


def _solve_in_span(basis_mat, target_mat, ops):
    """C with basis_mat . C = target_mat; ValueError if the target leaves the span.

    basis_mat is d x m with independent columns, target_mat is d x k.
    """
    d, m = len(basis_mat), len(basis_mat[0]) if basis_mat else 0
    k = len(target_mat[0]) if target_mat else 0
    work = [list(basis_mat[i]) + list(target_mat[i]) for i in range(d)]
    pivots = _rref(work, m + k, ops, pivot_limit=m)
    zero = ops.zero()
    # rows with no pivot must be zero across the target block
    for idx in range(len(pivots), d):
        if any(not ops.is_zero(work[idx][m + j]) for j in range(k)):
            raise ValueError("target is not in the span of the basis")
    sol = [[zero] * k for _ in range(m)]
    for row_idx, pc in enumerate(pivots):
        for j in range(k):
            sol[pc][j] = work[row_idx][m + j]
    return tuple(tuple(row) for row in sol)


def _mat_inverse(a, ops):
    n = len(a)
    try:
        return _solve_in_span(a, _mat_id(n, ops), ops)
    except ValueError:
        raise ValueError("matrix is singular") from None


def _columns(vectors):
    """Stack length-d vectors as the columns of a d x m matrix."""
    d = len(vectors[0])
    return tuple(tuple(v[i] for v in vectors) for i in range(d))


def _column(mat, j):
    return tuple(row[j] for row in mat)


def _mat_vec(a, x, ops):
    zero = ops.zero()
    out = []
    for row in a:
        acc = zero
        for c, v in zip(row, x):
            if not ops.is_zero(c) and not ops.is_zero(v):
                acc = acc + c * v
        out.append(acc)
    return tuple(out)


def _lattice_coords(rs: RootSystem, mu):
    """Integer coordinates of mu over the lattice generators."""
    gens = rs.lattice_generators()
    coeffs = solve_linear(mat_transpose(gens), vec(mu))
    if coeffs is None or any(c.denominator != 1 for c in coeffs):
        raise ValueError(f"{mu} is not in the lattice")
    return tuple(int(c) for c in coeffs)


# ---------------------------------------------------------------------------
# the module type
# ---------------------------------------------------------------------------

class ModuleRep:
    """Generator matrices on a labeled basis, with the relation report attached.

    t_mats[i] is the action of the i-th standard generator, x_mats[k] the
    action of X^g for the k-th lattice generator g. Matrices are immutable;
    the caches only memoize products of them.
    """

    __slots__ = ("rs", "kind", "basis", "basis_weights", "t_mats", "x_mats",
                 "weight", "region", "backend", "q0", "tag_values", "report",
                 "_ev", "_index", "_xpow_cache", "_xinv_cache",
                 "_gen_basis_cache")

    def __init__(self, rs: RootSystem, kind: str, basis, t_mats, x_mats,
                 weight: Weight | None = None, basis_weights=None,
                 region: LocalRegion | None = None, backend: str = "exact",
                 q0=None, tag_values=None, evaluator=None):
        self.rs = rs
        self.kind = kind
        self.basis = tuple(basis)
        d = len(self.basis)
        self.t_mats = tuple(tuple(tuple(r) for r in m) for m in t_mats)
        self.x_mats = tuple(tuple(tuple(r) for r in m) for m in x_mats)
        if len(self.t_mats) != rs.rank:
            raise ValueError("one T matrix per simple root")
        if len(self.x_mats) != len(rs.lattice_generators()):
            raise ValueError("one X matrix per lattice generator")
        for m in self.t_mats + self.x_mats:
            if len(m) != d or any(len(r) != d for r in m):
                raise ValueError("matrices must be square of the basis size")
        self.weight = weight
        self.basis_weights = tuple(basis_weights) if basis_weights else None
        self.region = region
        self.backend = backend
        self.q0 = q0
        self.tag_values = tag_values
        self.report = None
        self._ev = evaluator
        self._index = {w: k for k, w in enumerate(self.basis)}
        self._xpow_cache = {}
        self._xinv_cache = {}
        self._gen_basis_cache = {}

    @classmethod
    def from_matrices(cls, rs: RootSystem, basis, t_mats, x_mats, *,
                      weight=None, basis_weights=None, backend="exact",
                      q0=None, tag_values=None, kind="custom", verify=True):
        evaluator = None
        if weight is not None:
            evaluator, q0, tag_values = _make_evaluator(
                weight, backend, q0, tag_values)
        rep = cls(rs, kind, basis, t_mats, x_mats, weight=weight,
                  basis_weights=basis_weights, backend=backend, q0=q0,
                  tag_values=tag_values, evaluator=evaluator)
        if verify:
            rep.report = verify_relations(rep)
        return rep

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def _ops(self):
        return _ops_for(self.backend)

    def x_power(self, mu):
        """Matrix of X^mu, assembled from cached generator powers."""
        mu = vec(mu)
        cached = self._xpow_cache.get(mu)
        if cached is not None:
            return cached
        ops = self._ops
        out = _mat_id(self.dim, ops)
        for k, c in enumerate(_lattice_coords(self.rs, mu)):
            if c == 0:
                continue
            base = self.x_mats[k] if c > 0 else self._x_inverse(k)
            for _ in range(abs(c)):
                out = _mat_mul(out, base, ops)
        self._xpow_cache[mu] = out
        return out

    def _x_inverse(self, k: int):
        inv = self._xinv_cache.get(k)
        if inv is None:
            inv = _mat_inverse(self.x_mats[k], self._ops)
            self._xinv_cache[k] = inv
        return inv

    def describe(self) -> dict:
        def entry(x):
            if self.backend == "exact":
                return x.serialize()
            return [x.real, x.imag]

        def matrix(m):
            return [[entry(x) for x in row] for row in m]

        out = {
            "kind": self.kind,
            "dim": self.dim,
            "backend": self.backend,
            "basis": [list(w.reduced_word()) for w in self.basis],
            "x_exponents": [[str(c) for c in g]
                            for g in self.rs.lattice_generators()],
            "t_matrices": [matrix(m) for m in self.t_mats],
            "x_matrices": [matrix(m) for m in self.x_mats],
        }
        if self.weight is not None:
            out["weight"] = self.weight.describe()
        if self.region is not None:
            out["region"] = {
                "J": sorted(str(list(map(str, a))) for a in self.region.J)}
        if self.q0 is not None:
            out["q0"] = [self.q0.real, self.q0.imag]
        if self.report is not None:
            out["report"] = self.report
        return out

    def __repr__(self):
        return (f"ModuleRep({self.kind}, dim={self.dim}, "
                f"backend={self.backend})")


def direct_sum(a: ModuleRep, b: ModuleRep) -> ModuleRep:
    """Block-diagonal sum; mainly a commutant test fixture."""
    if a.rs.key != b.rs.key or a.backend != b.backend:
        raise ValueError("summands must share the root system and backend")
    ops = a._ops
    zero = ops.zero()

    def block(m1, m2):
        d1, d2 = len(m1), len(m2)
        top = [tuple(row) + (zero,) * d2 for row in m1]
        bot = [(zero,) * d1 + tuple(row) for row in m2]
        return tuple(top + bot)

    weights = None
    if a.basis_weights and b.basis_weights:
        weights = a.basis_weights + b.basis_weights
    return ModuleRep.from_matrices(
        a.rs, a.basis + b.basis,
        [block(m1, m2) for m1, m2 in zip(a.t_mats, b.t_mats)],
        [block(m1, m2) for m1, m2 in zip(a.x_mats, b.x_mats)],
        basis_weights=weights, backend=a.backend, q0=a.q0,
        tag_values=a.tag_values, kind="direct_sum")


# ---------------------------------------------------------------------------
# principal series
# ---------------------------------------------------------------------------

# normal forms of T_i T_w and X^g T_w are weight independent; computing them
# once per root system makes weight sweeps cheap
_PRINCIPAL_CACHE: dict = {}


def _principal_terms(rs: RootSystem, cap: int | None = None):
    cached = _PRINCIPAL_CACHE.get(rs.key)
    if cached is not None:
        return cached
    basis = rs.weyl_elements(cap)
    index = {w: k for k, w in enumerate(basis)}
    t_terms, x_terms = [], []
    for w in basis:
        tw = AlgebraElt.t_word(rs, w.reduced_word())
        t_terms.append(tuple(
            tuple((index[u], c)
                  for (u, _), c in (AlgebraElt.t_generator(rs, i) * tw)
                  .terms.items())
            for i in range(rs.rank)))
        x_terms.append(tuple(
            tuple((index[u], lam, c)
                  for (u, lam), c in (AlgebraElt.x_monomial(rs, g) * tw)
                  .terms.items())
            for g in rs.lattice_generators()))
    _PRINCIPAL_CACHE[rs.key] = (t_terms, x_terms)
    return t_terms, x_terms


def principal_series(t: Weight, backend: str = "auto", q0=None,
                     tag_values=None, cap: int | None = None) -> ModuleRep:
    """The module induced from the one-dimensional X-module at t.

    The basis is the Weyl group in length order, so the X matrices come out
    upper triangular with the orbit characters on the diagonal. T generators
    act by left multiplication, X generators by normal-forming X^g T_w and
    evaluating the X part at t.
    """
    rs = t.rs
    basis = rs.weyl_elements(cap)
    backend = _resolve_backend(t, backend)
    ev, q0, tag_values = _make_evaluator(t, backend, q0, tag_values)
    ops = _ops_for(backend)
    d = len(basis)
    t_terms, x_terms = _principal_terms(rs, cap)

    t_cols = {i: [] for i in range(rs.rank)}
    x_cols = {k: [] for k in range(len(rs.lattice_generators()))}
    for col in range(d):
        for i in range(rs.rank):
            out = [ops.zero()] * d
            for row, c in t_terms[col][i]:
                out[row] = out[row] + _coeff(c, backend, q0)
            t_cols[i].append(out)
        for k in range(len(rs.lattice_generators())):
            out = [ops.zero()] * d
            for row, lam, c in x_terms[col][k]:
                out[row] = out[row] + _coeff(c, backend, q0) * ev(lam)
            x_cols[k].append(out)

    t_mats = [_columns(t_cols[i]) for i in range(rs.rank)]
    x_mats = [_columns(x_cols[k]) for k in sorted(x_cols)]
    rep = ModuleRep(rs, "principal_series", basis, t_mats, x_mats, weight=t,
                    basis_weights=[t.weyl_act(w) for w in basis],
                    backend=backend, q0=q0, tag_values=tag_values,
                    evaluator=ev)
    rep.report = verify_relations(rep)
    return rep


# ---------------------------------------------------------------------------
# relation verification
# ---------------------------------------------------------------------------

def _braid_order(rs: RootSystem, i: int, j: int) -> int:
    s = rs.simple_reflection(i) * rs.simple_reflection(j)
    w, m = s, 1
    while not w.is_identity():
        w = w * s
        m += 1
        if m > 6:
            raise AssertionError("braid order out of range")
    return m


def _alternating_product(a, b, m: int, ops):
    out = a
    for k in range(1, m):
        out = _mat_mul(out, b if k % 2 else a, ops)
    return out


def verify_relations(rep: ModuleRep, tol: float = NUMERIC_TOL) -> dict:
    """Check the defining relations as matrix identities and report failures."""
    rs = rep.rs
    ops = _ops_for(rep.backend, tol)
    d = rep.dim
    ident = _mat_id(d, ops)
    qm = _qm_scalar(rep.backend, rep.q0)
    gens = rs.lattice_generators()
    report = {"backend": rep.backend, "dim": d,
              "tolerance": None if rep.backend == "exact" else tol}

    failures = []
    for i, m in enumerate(rep.t_mats):
        lhs = _mat_mul(m, m, ops)
        rhs = _mat_add(_mat_scale(qm, m), ident)
        if not _mat_eq(lhs, rhs, ops):
            failures.append(f"T_{i + 1}")
    report["quadratic"] = {"checked": rs.rank, "failures": failures}

    failures, checked = [], 0
    for i in range(rs.rank):
        for j in range(i + 1, rs.rank):
            m = _braid_order(rs, i, j)
            checked += 1
            lhs = _alternating_product(rep.t_mats[i], rep.t_mats[j], m, ops)
            rhs = _alternating_product(rep.t_mats[j], rep.t_mats[i], m, ops)
            if not _mat_eq(lhs, rhs, ops):
                failures.append(f"(T_{i + 1}, T_{j + 1}) order {m}")
    report["braid"] = {"checked": checked, "failures": failures}

    failures, checked = [], 0
    for k in range(len(gens)):
        for l in range(k + 1, len(gens)):
            checked += 1
            ab = _mat_mul(rep.x_mats[k], rep.x_mats[l], ops)
            ba = _mat_mul(rep.x_mats[l], rep.x_mats[k], ops)
            if not _mat_eq(ab, ba, ops):
                failures.append(f"(X_{k + 1}, X_{l + 1})")
    report["x_commute"] = {"checked": checked, "failures": failures}

    failures, checked = [], 0
    for i in range(rs.rank):
        alpha = rs.simple_roots[i]
        alpha_check = rs.coroot(alpha)
        s = rs.simple_reflection(i)
        for k, g in enumerate(gens):
            checked += 1
            label = f"(T_{i + 1}, X_{k + 1})"
            try:
                lhs = _mat_mul(rep.x_mats[k], rep.t_mats[i], ops)
                rhs = _mat_mul(rep.t_mats[i], rep.x_power(s.act(g)), ops)
                m = int(vec_dot(g, alpha_check))
                string = None
                terms = ([vec_sub(g, vec([p * a for a in alpha]))
                          for p in range(m)] if m >= 0 else
                         [vec_sub(g, vec([jj * a for a in alpha]))
                          for jj in range(-1, m - 1, -1)])
                for mu in terms:
                    xm = rep.x_power(mu)
                    string = xm if string is None else _mat_add(string, xm)
                if string is not None:
                    sign_qm = qm if m >= 0 else -qm
                    rhs = _mat_add(rhs, _mat_scale(sign_qm, string))
                if not _mat_eq(lhs, rhs, ops):
                    failures.append(label)
            except (ValueError, ZeroDivisionError) as exc:
                failures.append(f"{label}: {exc}")
    report["cross"] = {"checked": checked, "failures": failures}

    report["all_pass"] = all(not report[key]["failures"]
                             for key in ("quadratic", "braid", "x_commute",
                                         "cross"))
    return report


# ---------------------------------------------------------------------------
# weight space decomposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightSpaceDecomp:
    """Per-character dimensions: spaces maps a weight label to (dim, gen_dim)."""

    dim: int
    labels: tuple
    spaces: dict

    def gen_dimensions(self) -> dict:
        return {lab: self.spaces[lab][1] for lab in self.labels}

    def dimensions(self) -> dict:
        return {lab: self.spaces[lab][0] for lab in self.labels}

    def describe(self) -> dict:
        rows = []
        for lab in self.labels:
            dim, gen = self.spaces[lab]
            shown = lab.describe() if isinstance(lab, Weight) else str(lab)
            rows.append({"weight": shown, "dim": dim, "gen_dim": gen})
        return {"module_dim": self.dim, "weights": rows}


def _cluster_indices(keys, eq) -> list:
    """Group indices by pairwise key equality (transitive closure)."""
    groups: list[list[int]] = []
    reps: list = []
    for idx, key in enumerate(keys):
        placed = False
        for gi, rep_key in enumerate(reps):
            if eq(key, rep_key):
                groups[gi].append(idx)
                placed = True
                break
        if not placed:
            groups.append([idx])
            reps.append(key)
    return groups


def weight_decomposition(rep: ModuleRep, tol: float = RANK_TOL
                         ) -> WeightSpaceDecomp:
    """Generalized and plain weight space dimensions, read off the matrices.

    Exact mode expects the stored basis to triangularize the X action (true
    for the builders in this module); numeric mode accepts any commuting
    family and clusters the joint eigenstructure.
    """
    ops = rep._ops
    d = rep.dim
    triangular = all(_mat_is_upper(m, ops) for m in rep.x_mats)
    if rep.backend == "exact" and not triangular:
        return weight_decomposition(_specialized_copy(rep), tol)
    if not triangular:
        return _numeric_eig_decomposition(rep, tol)

    diag_keys = [tuple(m[k][k] for m in rep.x_mats) for k in range(d)]
    if ops.exact:
        groups = _cluster_indices(diag_keys,
                                  lambda a, b: all(x == y
                                                   for x, y in zip(a, b)))
    else:
        def close(a, b):
            return all(near(x, y, tol) for x, y in zip(a, b))

        groups = _cluster_indices(diag_keys, close)
        _guard_cluster_separation(groups, diag_keys, tol)

    if rep.basis_weights is not None:
        by_weight = _cluster_indices(rep.basis_weights, lambda a, b: a == b)
        if sorted(map(sorted, by_weight)) != sorted(map(sorted, groups)):
            raise NumericIllConditioned(
                "diagonal clustering disagrees with the stored weights")

    labels, spaces = [], {}
    for group in groups:
        k0 = group[0]
        label = (rep.basis_weights[k0] if rep.basis_weights is not None
                 else "diag:" + ",".join(str(x) for x in diag_keys[k0]))
        rows = []
        for m, c in zip(rep.x_mats, diag_keys[k0]):
            shifted = _mat_sub(m, _mat_scale(c, _mat_id(d, ops)))
            rows.extend(shifted)
        if ops.exact:
            _, null = _rank_nullspace(rows, ops)
            plain = len(null)
        else:
            plain = _numeric_nullity(rows, tol)
        labels.append(label)
        spaces[label] = (plain, len(group))
    total = sum(v[1] for v in spaces.values())
    if total != d:
        raise NumericIllConditioned("generalized dimensions do not sum up")
    return WeightSpaceDecomp(dim=d, labels=tuple(labels), spaces=spaces)


def _guard_cluster_separation(groups, keys, tol):
    reps = [keys[g[0]] for g in groups]
    for a in range(len(reps)):
        for b in range(a + 1, len(reps)):
            gap = max(abs(x - y) for x, y in zip(reps[a], reps[b]))
            if gap < 10 * tol:
                raise NumericIllConditioned(
                    f"weight clusters separated by only {gap:.3g}")


def _numeric_nullity(rows, tol: float) -> int:
    import numpy as np
    a = np.array([[complex(x) for x in r] for r in rows], dtype=complex)
    if not a.size:
        return 0
    sv = np.linalg.svd(a, compute_uv=False)
    top = sv[0] if len(sv) else 0.0
    if top == 0.0:
        return a.shape[1]
    thresh = tol * top
    if any(thresh / 10 < s < thresh * 10 for s in sv):
        raise NumericIllConditioned("singular values hug the rank threshold")
    return int(a.shape[1] - sum(s > thresh for s in sv))


def _specialized_copy(rep: ModuleRep) -> ModuleRep:
    """Numeric shadow of an exact module (same basis, entries at q0)."""
    q0 = rep.q0 if rep.q0 is not None else DEFAULT_Q0

    def spec(m):
        return tuple(tuple(x.specialize(q0) for x in row) for row in m)

    return ModuleRep(rep.rs, rep.kind, rep.basis,
                     [spec(m) for m in rep.t_mats],
                     [spec(m) for m in rep.x_mats],
                     weight=rep.weight, basis_weights=rep.basis_weights,
                     region=rep.region, backend="numeric", q0=complex(q0),
                     tag_values=rep.tag_values)


def _numeric_eig_decomposition(rep: ModuleRep, tol: float) -> WeightSpaceDecomp:
    # joint eigenstructure from a generic combination of the X matrices
    import numpy as np
    d = rep.dim
    xs = [np.array(m, dtype=complex) for m in rep.x_mats]
    coeffs = [0.5 + (((k + 1) * _GOLDEN) % 1.0) for k in range(len(xs))]
    y = sum(c * m for c, m in zip(coeffs, xs))
    eigvals, eigvecs = np.linalg.eig(y)
    groups = _cluster_indices(list(eigvals), lambda a, b: abs(a - b) <= tol)
    reps = [eigvals[g[0]] for g in groups]
    for a in range(len(reps)):
        for b in range(a + 1, len(reps)):
            if abs(reps[a] - reps[b]) < 10 * tol:
                raise NumericIllConditioned("eigenvalue clusters too close")
    labels, spaces = [], {}
    for group in groups:
        chars = []
        for m in xs:
            vals = []
            for idx in group:
                v = eigvecs[:, idx]
                vals.append(complex(v.conj() @ (m @ v) / (v.conj() @ v)))
            if max(abs(x - vals[0]) for x in vals) > 10 * tol:
                raise NumericIllConditioned(
                    "defective joint eigenstructure; use a triangular basis")
            chars.append(vals[0])
        rows = []
        for m, c in zip(xs, chars):
            rows.extend((m - c * np.eye(d)).tolist())
        plain = _numeric_nullity(rows, tol)
        label = _match_weight_label(rep, chars, tol)
        labels.append(label)
        spaces[label] = (plain, len(group))
    if sum(v[1] for v in spaces.values()) != d:
        raise NumericIllConditioned("generalized dimensions do not sum up")
    return WeightSpaceDecomp(dim=d, labels=tuple(labels), spaces=spaces)


def _match_weight_label(rep: ModuleRep, chars, tol: float):
    fallback = "char:" + ",".join(f"{c:.6g}" for c in chars)
    if rep.basis_weights is None:
        return fallback
    gens = rep.rs.lattice_generators()
    for wt in dict.fromkeys(rep.basis_weights):
        ev, _, _ = _make_evaluator(wt, "numeric", rep.q0, rep.tag_values)
        if all(near(ev(g), c, 10 * tol) for g, c in zip(gens, chars)):
            return wt
    return fallback


# ---------------------------------------------------------------------------
# spherical vector
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SphericalCheck:
    vector: tuple
    eigen_pass: bool
    generates: bool
    criterion: object
    expansion_check: bool | None

    def describe(self) -> dict:
        return {
            "eigen_pass": self.eigen_pass,
            "generates": self.generates,
            "criterion": str(self.criterion) if self.criterion is not None
            else None,
            "expansion_check": self.expansion_check,
        }


def _generation_criterion(t: Weight):
    """(generates, product value); the product is None when tags interfere."""
    q = ExactScalar.q_power(1)
    q_inv = ExactScalar.q_power(-1)
    if t.ell is not None:
        ok = True
        for alpha in t.rs.positive_roots:
            if t.tag_of(alpha) != TRIVIAL_TAG:
                continue
            c = vec_dot(t.gamma, alpha)
            if c.denominator == 1 and int(c) % t.ell == t.ell - 1:
                ok = False
        return ok, None
    prod = ExactScalar.one()
    skipped = False
    for alpha in t.rs.positive_roots:
        if t.tag_of(alpha) != TRIVIAL_TAG:
            skipped = True  # a unit times a q-power can never equal q^{-2}
            continue
        prod = prod * (q_inv - q * t.eval(alpha))
    return not prod.is_zero(), (None if skipped else prod)


def tau_basis(rep: ModuleRep) -> dict:
    """For a regular base weight: the weight basis built by intertwiners.

    Returns {w: vector} where the vector spans the w-translate weight line and
    is normalized with coefficient 1 on the leading basis element.
    """
    if rep.weight is None or rep._ev is None:
        raise ValueError("module lacks a backing weight")
    if not rep.weight.is_regular():
        raise NotRegular("the intertwiner basis needs a regular weight")
    rs = rep.rs
    ops = rep._ops
    one = ops.one()
    qm = _qm_scalar(rep.backend, rep.q0)
    vectors: dict[WeylElt, tuple] = {}
    for w in rep.basis:
        word = w.reduced_word()
        if not word:
            unit = [ops.zero()] * rep.dim
            unit[rep._index[w]] = one
            vectors[w] = tuple(unit)
            continue
        i = word[0]
        u = rs.simple_reflection(i) * w
        prev = vectors[u]
        val = rep._ev(u.act_inverse(vec_neg(rs.simple_roots[i])))
        c = qm / (one - val)
        moved = _mat_vec(rep.t_mats[i], prev, ops)
        vectors[w] = tuple(x - c * y for x, y in zip(moved, prev))
    return vectors


def spherical(t: Weight, backend: str = "auto", q0=None, tag_values=None,
              expansion: str | bool = "auto",
              rep: ModuleRep | None = None) -> SphericalCheck:
    """The q-symmetrizing vector of the principal series and its checks.

    expansion=True forces the closed-form comparison (NotRegular if the
    weight is not regular); "auto" runs it exactly when it applies.
    """
    if rep is None:
        rep = principal_series(t, backend=backend, q0=q0,
                               tag_values=tag_values)
    ops = rep._ops
    q = _q_scalar(rep.backend, rep.q0)
    if rep.backend == "exact":
        vector = tuple(ExactScalar.q_power(w.length()) for w in rep.basis)
    else:
        vector = tuple(complex(rep.q0) ** w.length() for w in rep.basis)
    eigen_pass = all(
        all(ops.eq(a, q * b) for a, b in zip(_mat_vec(m, vector, ops), vector))
        for m in rep.t_mats)
    generates, criterion = _generation_criterion(t)

    if expansion == "auto":
        run_expansion = t.is_regular()
    elif expansion:
        if not t.is_regular():
            raise NotRegular("the closed form needs a regular weight")
        run_expansion = True
    else:
        run_expansion = False
    expansion_check = None
    if run_expansion:
        # closed form: the coefficient of the intertwiner basis vector at z is
        # q^len(w0) times the product of (q^-1 - q t(X^a))/(1 - t(X^a)) over
        # the inversions of w0 z (the same factors as the generation test)
        basis_vectors = tau_basis(rep)
        w0 = rep.rs.long_element()
        one = ops.one()
        total = [ops.zero()] * rep.dim
        for z in rep.basis:
            coeff = (ExactScalar.q_power(w0.length())
                     if rep.backend == "exact"
                     else complex(rep.q0) ** w0.length())
            for alpha in (w0 * z).inversion_set():
                val = rep._ev(alpha)
                coeff = coeff * ((one / q - q * val) / (one - val))
            vz = basis_vectors[z]
            total = [acc + coeff * x for acc, x in zip(total, vz)]
        expansion_check = all(ops.eq(a, b) for a, b in zip(total, vector))
    return SphericalCheck(vector=vector, eigen_pass=eigen_pass,
                          generates=generates, criterion=criterion,
                          expansion_check=expansion_check)


# ---------------------------------------------------------------------------
# irreducibility
# ---------------------------------------------------------------------------

def kato_irreducible(t: Weight) -> bool:
    """Irreducibility of the principal series from the root data alone."""
    return not t.zp_sets()[1]


def commutant_dim(rep: ModuleRep, method: str = "auto",
                  tol: float = RANK_TOL) -> int:
    """Dimension of the algebra of matrices commuting with all generators.

    auto prefers the structural shortcut (diagonal X with pairwise distinct
    characters forces diagonal commutants), then exact elimination for tiny
    modules, then a numeric singular value count.
    """
    d = rep.dim
    if d > 200:
        raise TooLarge(f"commutant solve needs dim <= 200, got {d}")
    if method in ("auto", "graph"):
        via_graph = _graph_commutant(rep, tol)
        if via_graph is not None:
            return via_graph
        if method == "graph":
            raise ValueError(
                "graph method needs diagonal X with distinct characters")
    if method == "exact":
        return _exact_commutant(rep)
    return _numeric_commutant(rep, tol)


def _graph_commutant(rep: ModuleRep, tol: float) -> int | None:
    ops = rep._ops
    d = rep.dim
    if not all(_mat_is_diagonal(m, ops) for m in rep.x_mats):
        return None
    chars = [tuple(m[k][k] for m in rep.x_mats) for k in range(d)]
    for a in range(d):
        for b in range(a + 1, d):
            if ops.exact:
                if all(x == y for x, y in zip(chars[a], chars[b])):
                    return None
            elif all(abs(x - y) <= 10 * tol
                     for x, y in zip(chars[a], chars[b])):
                return None
    # commutant is diagonal; T entries glue coordinates together
    parent = list(range(d))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for m in rep.t_mats:
        for a in range(d):
            for b in range(d):
                if a != b and not ops.is_zero(m[a][b]):
                    ra, rb = find(a), find(b)
                    if ra != rb:
                        parent[ra] = rb
    return len({find(k) for k in range(d)})


def _exact_commutant(rep: ModuleRep) -> int:
    ops = _ExactOps()
    d = rep.dim
    zero = ops.zero()
    rows = []
    for g in rep.t_mats + rep.x_mats:
        for r in range(d):
            for c in range(d):
                row = [zero] * (d * d)
                for a in range(d):
                    if not g[r][a].is_zero():
                        row[a * d + c] = row[a * d + c] + g[r][a]
                for b in range(d):
                    if not g[b][c].is_zero():
                        row[r * d + b] = row[r * d + b] - g[b][c]
                if any(not x.is_zero() for x in row):
                    rows.append(tuple(row))
    rank, _ = _rank_nullspace(rows, ops)
    return d * d - rank


def _numeric_commutant(rep: ModuleRep, tol: float) -> int:
    import numpy as np
    d = rep.dim
    if d > 24:
        raise TooLarge(
            "numeric commutant solve is limited to dim <= 24; "
            "diagonal modules use the structural shortcut instead")
    if rep.backend == "exact":
        rep = _specialized_copy(rep)
    eye = np.eye(d)
    blocks = []
    for g in rep.t_mats + rep.x_mats:
        m = np.array(g, dtype=complex)
        blocks.append(np.kron(eye, m) - np.kron(m.T, eye))
    stacked = np.vstack(blocks)
    sv = np.linalg.svd(stacked, compute_uv=False)
    top = sv[0] if len(sv) else 0.0
    if top == 0.0:
        return d * d
    thresh = tol * top
    if any(thresh / 10 < s < thresh * 10 for s in sv):
        raise NumericIllConditioned("singular values hug the rank threshold")
    rank = int(sum(s > thresh for s in sv))
    return d * d - rank


# ---------------------------------------------------------------------------
# tau operators on generalized weight spaces
# ---------------------------------------------------------------------------

def generalized_weight_basis(rep: ModuleRep, t: Weight):
    """Column basis (d x m matrix) of the generalized weight space at t."""
    cached = rep._gen_basis_cache.get(t)
    if cached is not None:
        return cached
    if rep.basis_weights is None:
        raise ValueError("module lacks per-basis weight data")
    positions = [k for k, bw in enumerate(rep.basis_weights) if bw == t]
    if not positions:
        raise ValueError("weight does not occur in this module")
    m = len(positions)
    ops = rep._ops
    d = rep.dim
    ev, _, _ = _make_evaluator(t, rep.backend, rep.q0, rep.tag_values)
    rows = []
    for g, xm in zip(rep.rs.lattice_generators(), rep.x_mats):
        shifted = _mat_sub(xm, _mat_scale(ev(g), _mat_id(d, ops)))
        rows.extend(_mat_power(shifted, m, ops))
    _, null = _rank_nullspace(rows, ops)
    if len(null) != m:
        raise NumericIllConditioned(
            f"generalized space came out {len(null)}-dimensional, "
            f"expected {m}")
    basis = _columns(null)
    rep._gen_basis_cache[t] = basis
    return basis


def x_restriction(rep: ModuleRep, basis_mat, mu):
    """Coordinate matrix of X^mu on an invariant column span."""
    ops = rep._ops
    return _solve_in_span(basis_mat, _mat_mul(rep.x_power(vec(mu)), basis_mat,
                                              ops), ops)


@dataclass(frozen=True)
class TauOperator:
    """A local intertwiner between two generalized weight spaces."""

    rep: ModuleRep
    index: int
    source: Weight
    target: Weight
    source_basis: tuple
    target_basis: tuple
    matrix: tuple

    def apply(self, vector):
        """Image of an ambient vector lying in the source space."""
        ops = self.rep._ops
        col = tuple((x,) for x in vector)
        coords = _solve_in_span(self.source_basis, col, ops)
        out = _mat_mul(self.target_basis,
                       _mat_mul(self.matrix, coords, ops), ops)
        return _column(out, 0)

    def is_invertible(self) -> bool:
        ops = self.rep._ops
        rank, _ = _rank_nullspace(list(self.matrix), ops)
        return rank == len(self.matrix)


def tau_operator(i: int, t: Weight, rep: ModuleRep) -> TauOperator:
    """The intertwiner from the t space to the reflected one.

    Only defined when t is off the reflection wall for the i-th simple root;
    UndefinedTau otherwise.
    """
    rs = rep.rs
    alpha = rs.simple_roots[i]
    if _char_is_one(t, alpha):
        raise UndefinedTau(
            f"weight takes value 1 on X^{alpha}; no intertwiner there")
    ops = rep._ops
    source = generalized_weight_basis(rep, t)
    target_weight = t.weyl_act(rs.simple_reflection(i))
    target = generalized_weight_basis(rep, target_weight)
    a = _mat_sub(_mat_id(rep.dim, ops), rep.x_power(vec_neg(alpha)))
    c = _solve_in_span(source, _mat_mul(a, source, ops), ops)
    c_inv = _mat_inverse(c, ops)
    qm = _qm_scalar(rep.backend, rep.q0)
    moved = _mat_mul(rep.t_mats[i], source, ops)
    correction = _mat_mul(_mat_scale(qm, source), c_inv, ops)
    action = _mat_sub(moved, correction)
    matrix = _solve_in_span(target, action, ops)
    return TauOperator(rep=rep, index=i, source=t, target=target_weight,
                       source_basis=source, target_basis=target,
                       matrix=matrix)


# ---------------------------------------------------------------------------
# calibrated modules
# ---------------------------------------------------------------------------

def calibrated_module(region: LocalRegion, force: bool = False,
                      backend: str = "auto", q0=None,
                      tag_values=None) -> ModuleRep:
    """One-dimensional weight space module carried by a skew local region.

    X acts diagonally through the chamber weights; each T generator mixes a
    basis vector with at most its reflected partner, with the partner term
    dropped when the reflection leaves the region. force=True skips the skew
    check so that the failure mode itself can be observed.
    """
    t, J = region.t, region.J
    if not force and not is_skew(region):
        raise NotSkew("region is not skew; pass force=True to build anyway")
    basis = chamber_set_pruned(t, J).elements
    if not basis:
        raise EmptyRegion("no chambers index this region")
    rs = t.rs
    backend = _resolve_backend(t, backend)
    ev, q0, tag_values = _make_evaluator(t, backend, q0, tag_values)
    ops = _ops_for(backend)
    d = len(basis)
    index = {w: k for k, w in enumerate(basis)}
    one = ops.one()
    qm = _qm_scalar(backend, q0)
    q_inv = (ExactScalar.q_power(-1) if backend == "exact"
             else 1 / complex(q0))

    x_mats = []
    for g in rs.lattice_generators():
        x_mats.append(tuple(
            tuple(ev(w.act_inverse(g)) if r == k else ops.zero()
                  for r, _ in enumerate(basis))
            for k, w in enumerate(basis)))

    t_mats = []
    for i in range(rs.rank):
        s = rs.simple_reflection(i)
        neg_alpha = vec_neg(rs.simple_roots[i])
        cols = []
        for w in basis:
            col = [ops.zero()] * d
            diag = qm / (one - ev(w.act_inverse(neg_alpha)))
            col[index[w]] = diag
            sw = s * w
            if sw in index:
                col[index[sw]] = q_inv + diag
            cols.append(col)
        t_mats.append(_columns(cols))

    rep = ModuleRep(rs, "calibrated", basis, t_mats, x_mats, weight=t,
                    basis_weights=[t.weyl_act(w) for w in basis],
                    region=region, backend=backend, q0=q0,
                    tag_values=tag_values, evaluator=ev)
    rep.report = verify_relations(rep)
    return rep
