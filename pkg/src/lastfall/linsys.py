"""Linearized polynomial systems over Frobenius-invariant subspaces.

A q-linearized polynomial sum a_ij x_i^{q^j} acts k'-linearly on k^m and is
stored through its conventional companion rows a_i = (a_i0, a_i1, ...).  The
subspaces of k stable under x -> x^q are cut out by the monic divisors f_W of
x^n - 1 over k'; W is the kernel of f_W applied to the Frobenius and has
k'-dimension deg f_W.

Composition of linearized maps corresponds to the *symbolic* product of the
companion polynomials, (f * g)_l = sum_{i+j=l} f_i g_j^{q^i}, not to the
plain product: the coefficient twist matters as soon as coefficients leave
the subfield.  Right division, gcd and the extended-Euclid certificate in
that twisted sense are what make the stage elimination sound; the plain
extended Euclid over k[x] is also provided (`bezout`) for the commutative
certificates.  The kernel of the symbolic gcd of a family of companions is
exactly the intersection of the kernels of the family, which is what the
final collapse of the solver relies on.
"""

from dataclasses import dataclass
from itertools import product
import random

import numpy as np

from . import univar
from .errors import (DegreeExceedsBound, GcdConditionFailed, NotADivisor,
                     NotCoprime, NotReducible, SearchBudgetExceeded)
from .falldeg import span_closure
from .linalg import kernel_basis, make_ops, rref
from .poly import PolySystem, Ring


# -- symbolic (composition-compatible) univariate operations -------------------


def symbolic_mul(field, f, g):
    """Companion of the composition: L(f) o L(g) = L(symbolic_mul(f, g))."""
    f, g = univar.trim(f), univar.trim(g)
    if not f or not g:
        return univar.ZERO
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a == 0:
            continue
        for j, b in enumerate(g):
            if b:
                out[i + j] = field.add(out[i + j], field.mul(a, field.frob(b, i)))
    return univar.trim(out)


def symbolic_rdivmod(field, f, g):
    """Quotient and remainder with g acting first: f = c * g + r, deg r < deg g."""
    g = univar.trim(g)
    if not g:
        raise ZeroDivisionError("symbolic division by zero")
    r = list(univar.trim(f))
    dg = len(g) - 1
    quo = [0] * max(len(r) - dg, 0)
    while len(r) - 1 >= dg and r:
        k = len(r) - 1 - dg
        top = field.frob(g[-1], k)
        c = field.mul(r[-1], field.inv(top))
        quo[k] = c
        for j, b in enumerate(g):
            if b:
                r[k + j] = field.sub(r[k + j], field.mul(c, field.frob(b, k)))
        while r and r[-1] == 0:
            r.pop()
    return univar.trim(quo), univar.trim(r)


def symbolic_gcd(field, f, g):
    """Greatest common right component; its kernel is ker L(f) cap ker L(g)."""
    f, g = univar.trim(f), univar.trim(g)
    while g:
        f, g = g, symbolic_rdivmod(field, f, g)[1]
    if not f:
        return univar.ZERO
    c = field.inv(f[-1])
    return univar.trim(field.mul(c, a) for a in f)


def symbolic_ext_gcd(field, f, g):
    """(d, u, v) with symbolic u*f + v*g = d, d the monic symbolic gcd."""
    r0, r1 = univar.trim(f), univar.trim(g)
    u0, u1 = (1,), univar.ZERO
    v0, v1 = univar.ZERO, (1,)
    while r1:
        c, r = symbolic_rdivmod(field, r0, r1)
        r0, r1 = r1, r
        u0, u1 = u1, _sym_sub(field, u0, symbolic_mul(field, c, u1))
        v0, v1 = v1, _sym_sub(field, v0, symbolic_mul(field, c, v1))
    if not r0:
        return univar.ZERO, univar.ZERO, univar.ZERO
    ic = field.inv(r0[-1])
    scale = lambda h: univar.trim(field.mul(ic, a) for a in h)
    return scale(r0), scale(u0), scale(v0)


def _sym_sub(field, f, g):
    n = max(len(f), len(g))
    out = []
    for i in range(n):
        a = f[i] if i < len(f) else 0
        b = g[i] if i < len(g) else 0
        out.append(field.sub(a, b))
    return univar.trim(out)


# -- core data types -----------------------------------------------------------


class LinearizedPoly:
    """L(f) for f = sum_i f_i(x_i); rows are the conventional coefficients."""

    def __init__(self, field, rows, bound=None):
        rows = [univar.trim(r) for r in rows]
        if bound is None:
            bound = max((len(r) for r in rows), default=1)
        for r in rows:
            if len(r) > bound:
                raise DegreeExceedsBound(f"row degree {len(r) - 1} >= bound {bound}")
        self.field = field
        self.m = len(rows)
        self.bound = bound
        self.coeffs = tuple(tuple(r) + (0,) * (bound - len(r)) for r in rows)

    def per_var(self, i):
        return univar.trim(self.coeffs[i])

    def is_zero(self):
        return all(c == 0 for row in self.coeffs for c in row)

    def eval(self, point):
        f = self.field
        acc = 0
        for i, row in enumerate(self.coeffs):
            for j, a in enumerate(row):
                if a:
                    acc = f.add(acc, f.mul(a, f.frob(point[i], j)))
        return acc

    def to_poly(self, ring):
        """The actual polynomial sum a_ij X_i^{q^j}."""
        q = self.field.q
        terms = {}
        f = self.field
        for i, row in enumerate(self.coeffs):
            for j, a in enumerate(row):
                if a:
                    e = [0] * ring.nvars
                    e[i] = q**j
                    e = tuple(e)
                    terms[e] = f.add(terms.get(e, 0), a)
        return ring.from_terms(terms.items())

    def __eq__(self, other):
        return (isinstance(other, LinearizedPoly) and other.field == self.field
                and other.coeffs == self.coeffs)

    def __repr__(self):
        return f"LinearizedPoly(m={self.m}, bound={self.bound})"


class LinearForm:
    """An element of the module of linear forms over the x_{ij}."""

    __slots__ = ("field", "m", "nprime", "coeffs")

    def __init__(self, field, coeffs, nprime=None):
        coeffs = [tuple(r) for r in coeffs]
        if nprime is None:
            nprime = len(coeffs[0]) if coeffs else 0
        if any(len(r) != nprime for r in coeffs):
            raise ValueError("ragged coefficient rows")
        self.field = field
        self.m = len(coeffs)
        self.nprime = nprime
        self.coeffs = tuple(coeffs)

    def is_zero(self):
        return all(c == 0 for row in self.coeffs for c in row)

    def min_stage(self):
        for i, row in enumerate(self.coeffs):
            if any(row):
                return i
        return self.m

    def in_stage(self, r):
        """Membership in the stage-r tail module (zero on all stages < r)."""
        return self.min_stage() >= r

    def add(self, other):
        f = self.field
        return LinearForm(f, [
            tuple(f.add(a, b) for a, b in zip(r1, r2))
            for r1, r2 in zip(self.coeffs, other.coeffs)
        ], self.nprime)

    def sub(self, other):
        f = self.field
        return LinearForm(f, [
            tuple(f.sub(a, b) for a, b in zip(r1, r2))
            for r1, r2 in zip(self.coeffs, other.coeffs)
        ], self.nprime)

    def scale(self, c):
        f = self.field
        return LinearForm(f, [tuple(f.mul(c, a) for a in r) for r in self.coeffs],
                          self.nprime)

    def eval_flat(self, values):
        """Evaluate at a flat (m * nprime)-tuple of k codes."""
        f = self.field
        acc = 0
        for i, row in enumerate(self.coeffs):
            for j, a in enumerate(row):
                if a:
                    acc = f.add(acc, f.mul(a, values[i * self.nprime + j]))
        return acc

    def eval_at_subspace_point(self, point):
        """Evaluate with x_{ij} = point_i^{q^j}."""
        f = self.field
        acc = 0
        for i, row in enumerate(self.coeffs):
            for j, a in enumerate(row):
                if a:
                    acc = f.add(acc, f.mul(a, f.frob(point[i], j)))
        return acc

    def to_poly(self, ring):
        terms = {}
        f = self.field
        for i, row in enumerate(self.coeffs):
            for j, a in enumerate(row):
                if a:
                    e = [0] * ring.nvars
                    e[i * self.nprime + j] = 1
                    terms[tuple(e)] = a
        return ring.from_terms(terms.items())

    def to_linearized(self):
        return LinearizedPoly(self.field, [univar.trim(r) for r in self.coeffs],
                              bound=self.nprime)

    def __eq__(self, other):
        return (isinstance(other, LinearForm) and other.field == self.field
                and other.coeffs == self.coeffs)

    def __repr__(self):
        return f"LinearForm({self.coeffs})"


def zero_form(field, m, nprime):
    return LinearForm(field, [(0,) * nprime for _ in range(m)], nprime)


class InvariantSubspace:
    """W = ker f_W(tau) for a monic divisor f_W of x^n - 1 over k'."""

    def __init__(self, field, fW, basis_W, tau_matrix):
        self.field = field
        self.fW = tuple(fW)
        self.nprime = len(fW) - 1
        kp = field.kprime
        gw = [kp.neg(c) for c in fW[: self.nprime]]
        self.gW = univar.trim(gw)
        self.basis_W = tuple(basis_W)
        self.tau_matrix = tau_matrix
        self._kp_ops = make_ops(field, "kprime")
        self._B = np.array(
            [[field.coords(w)[i] for w in basis_W] for i in range(field.n)],
            dtype=np.int16)

    @property
    def dim(self):
        return self.nprime

    def coords_of(self, code):
        """k'-coordinates of an element in the W basis, or None if outside W."""
        from .linalg import solve

        rhs = np.array(self.field.coords(code), dtype=np.int16)
        x = solve(self._B, rhs, self._kp_ops)
        if x is None:
            return None
        if self.from_coords(tuple(int(c) for c in x)) != code:
            return None
        return tuple(int(c) for c in x)

    def contains(self, code):
        return self.coords_of(code) is not None

    def from_coords(self, coords):
        f = self.field
        acc = 0
        for c, w in zip(coords, self.basis_W):
            acc = f.add(acc, f.mul(c, w))
        return acc

    def elements(self):
        for coords in product(range(self.field.q), repeat=self.nprime):
            yield self.from_coords(coords)

    def operator_matrix(self, companion):
        """Matrix over k' of w -> L(companion)(w), W -> k, in coordinates."""
        f = self.field
        cols = []
        for w in self.basis_W:
            acc = 0
            for j, a in enumerate(univar.trim(companion)):
                if a:
                    acc = f.add(acc, f.mul(a, f.frob(w, j)))
            cols.append(f.coords(acc))
        return np.array([[cols[t][i] for t in range(self.nprime)]
                         for i in range(f.n)], dtype=np.int16)

    def kernel_in_W(self, companion):
        """Elements of W killed by L(companion), as a k'-basis (W coordinates)."""
        mat = self.operator_matrix(companion)
        return kernel_basis(mat, self._kp_ops, ncols=self.nprime)

    def __repr__(self):
        return f"InvariantSubspace(fW={list(self.fW)}, dim={self.nprime})"


def subspace_from_fW(fW, field):
    """Build W from a monic divisor of x^n - 1 over k'.

    The kernel dimension is computed, not assumed: when it disagrees with
    deg f_W (possible only through a bug, since x does not divide x^n - 1)
    a diagnostic error is raised instead of proceeding.
    """
    kp = field.kprime
    fW = univar.trim(fW)
    if not fW or fW[-1] != 1:
        raise ValueError("fW must be monic")
    if univar.degree(fW) < 1:
        raise ValueError("fW must have degree >= 1")
    xn1 = univar.x_pow_n_minus_one(kp, field.n)
    if not univar.divides(kp, fW, xn1):
        raise NotADivisor(f"{list(fW)} does not divide x^{field.n} - 1 over k'")
    n = field.n
    # matrix of f_W(tau) over k' from the Frobenius coordinate matrix
    tau = [[field.frob_matrix[i][j] for j in range(n)] for i in range(n)]

    def mat_mul(A, B):
        return [[_dot(kp, A[i], [B[r][j] for r in range(n)]) for j in range(n)]
                for i in range(n)]

    ident = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    acc = [[0] * n for _ in range(n)]
    power = ident
    for c in fW:
        if c:
            acc = [[kp.add(acc[i][j], kp.mul(c, power[i][j])) for j in range(n)]
                   for i in range(n)]
        power = mat_mul(power, tau)
    ops = make_ops(field, "kprime")
    ker = kernel_basis(np.array(acc, dtype=np.int16), ops, ncols=n)
    if len(ker) != univar.degree(fW):
        raise RuntimeError(
            f"kernel dimension {len(ker)} != deg fW {univar.degree(fW)}")
    basis_W = [field.from_coords(tuple(int(c) for c in v)) for v in ker]
    space = InvariantSubspace(field, fW, basis_W, None)
    # matrix of tau restricted to W, in the W basis
    tmat = []
    for w in basis_W:
        co = space.coords_of(field.frob(w, 1))
        if co is None:
            raise RuntimeError("W is not stable under the Frobenius")
        tmat.append(co)
    space.tau_matrix = tuple(tuple(int(c) for c in row) for row in zip(*tmat))
    return space


def _dot(kp, xs, ys):
    acc = 0
    for a, b in zip(xs, ys):
        acc = kp.add(acc, kp.mul(a, b))
    return acc


def full_space(field):
    """W = k itself (f_W = x^n - 1)."""
    return subspace_from_fW(univar.x_pow_n_minus_one(field.kprime, field.n), field)


def subfield_space(field):
    """W = k' (f_W = x - 1)."""
    return subspace_from_fW((field.kprime.neg(1), 1), field)


# -- the L / ell correspondence and the rewriting relations --------------------


def L_op(field, per_var, bound):
    """Relabel conventional rows as the linearized polynomial they index."""
    return LinearizedPoly(field, per_var, bound=bound)


def ell_op(field, per_var, bound):
    """Relabel the same rows as a linear form over the x_{ij}."""
    rows = [univar.trim(r) for r in per_var]
    for r in rows:
        if len(r) > bound:
            raise DegreeExceedsBound(f"row degree {len(r) - 1} >= bound {bound}")
    return LinearForm(field, [tuple(r) + (0,) * (bound - len(r)) for r in rows], bound)


def compose(g, per_var, field):
    """Plain per-variable composition g(f_i(x_i)) of conventional polynomials."""
    ar = field.k
    out = []
    for fi in per_var:
        acc = univar.ZERO
        for c in reversed(univar.trim(g)):
            acc = univar.mul(ar, acc, univar.trim(fi))
            if c:
                acc = univar.add(ar, acc, (c,))
        out.append(acc)
    return out


def make_s_ring(field, m, nprime, level="k"):
    return Ring(field, level, [f"x{i}_{j}" for i in range(m) for j in range(nprime)])


def build_Qbar(space, m):
    """The rewriting relations of W in the descent variables.

    Per variable: x_{ij}^q - x_{i,j+1} for j < n'-1, closed by
    x_{i,n'-1}^q - sum_l gW_l x_{il}; for W = k the closing relation is the
    cyclic wrap x_{i,n-1}^q - x_{i0}.
    """
    field = space.field
    n1 = space.nprime
    ring = make_s_ring(field, m, n1)
    q = field.q
    polys = []
    for i in range(m):
        for j in range(n1 - 1):
            polys.append(ring.variable(i * n1 + j).pow_int(q)
                         - ring.variable(i * n1 + j + 1))
        closing = ring.variable(i * n1 + n1 - 1).pow_int(q)
        ell_gw = ring.zero()
        for l, c in enumerate(space.gW):
            if c:
                ell_gw = ell_gw + ring.variable(i * n1 + l).scale(c)
        polys.append(closing - ell_gw)
    return polys


def frobenius_step(form, space):
    """The image of form^q as a linear form: coefficients go to their q-th
    power, indices shift, and the top index rewrites through gW.  Stage
    support is preserved."""
    f = form.field
    n1 = form.nprime
    out = [[0] * n1 for _ in range(form.m)]
    for i, row in enumerate(form.coeffs):
        for j, b in enumerate(row):
            if not b:
                continue
            bq = f.frob(b, 1)
            if j < n1 - 1:
                out[i][j + 1] = f.add(out[i][j + 1], bq)
            else:
                for l, g in enumerate(space.gW):
                    if g:
                        out[i][l] = f.add(out[i][l], f.mul(bq, g))
    return LinearForm(f, [tuple(r) for r in out], n1)


def lcompose_reduce(g, form, space):
    """Linear form congruent to L(g) applied on top of `form`: the sum of
    g_r-scaled r-fold Frobenius steps.  Evaluates identically to
    v -> L(g)(form(v)) on W^m."""
    field = form.field
    gt = univar.trim(g)
    acc = zero_form(field, form.m, form.nprime)
    cur = form
    for r, c in enumerate(gt):
        if c:
            acc = acc.add(cur.scale(c))
        if r < len(gt) - 1:
            cur = frobenius_step(cur, space)
    return acc


def bezout(f0, fW, field):
    """Plain extended Euclid over k[x]: (A, B) with A f0 + B fW = 1 and
    deg A < deg fW; raises NotCoprime with the gcd as witness."""
    ar = field.k
    d, u, v = univar.ext_gcd(ar, f0, fW)
    if d != (1,):
        raise NotCoprime(d)
    if univar.degree(fW) >= 1 and univar.degree(u) >= univar.degree(fW):
        q_, u = univar.divmod_poly(ar, u, fW)
        # fold the quotient into B to keep the identity exact
        v = univar.add(ar, v, univar.mul(ar, q_, f0))
    return u, v


# -- reducibility and the structured solver ------------------------------------


def linearized_to_form(lp, space):
    """Companion rows reduced mod f_W (same function on W), as a linear form."""
    ar = lp.field.k
    fw_k = tuple(space.fW)
    rows = []
    for i in range(lp.m):
        rows.append(univar.mod(ar, lp.per_var(i), fw_k))
    return ell_op(lp.field, rows, space.nprime)


def gbar_system(forms, space, m):
    """The span-closure input: input forms plus the rewriting relations."""
    ring = make_s_ring(space.field, m, space.nprime)
    polys = [f.to_poly(ring) for f in forms if not f.is_zero()]
    polys.extend(build_Qbar(space, m))
    return PolySystem(ring, polys)


@dataclass
class ReducibilityReport:
    reducible: bool
    witnesses: dict
    active_stages: tuple
    stage_pivot_counts: tuple
    failed_stage: object = None
    forms_matrix: object = None


def _extract_linear_forms(span, m, nprime):
    """Rows of the closed span that are linear forms, as a coefficient matrix
    over k with stage-major columns."""
    cols = m * nprime
    var_col = {}
    for flat in range(cols):
        e = [0] * cols
        e[flat] = 1
        var_col[flat] = span._col_of[tuple(e)]
    rows = []
    for r, d in enumerate(span.row_degrees):
        if d != 1:
            continue
        vec = span.matrix[r]
        if vec[0] != 0:
            raise RuntimeError("linear row with constant part; inconsistent relations")
        rows.append([int(vec[var_col[flat]]) for flat in range(cols)])
    return np.array(rows, dtype=np.int16).reshape(len(rows), cols)


def reducibility_check(F, space, m=None, seed=0, draws=64, exhaustive_dim_cap=16):
    """Stage-by-stage witness search.

    The candidate space at stage i is the span of the echelon rows of
    V cap S_1 whose pivot sits in stage i; a witness is any combination
    whose stage-i companion has trivial symbolic gcd with f_W (equivalently,
    acts injectively on W).  Sampling is randomized first (`draws` pulls),
    then exhaustive when the k'-dimension of the candidate space is at most
    `exhaustive_dim_cap`; otherwise SearchBudgetExceeded distinguishes a
    blown budget from a definitive negative.
    """
    field = space.field
    if m is None:
        m = max((lp.m for lp in F), default=1)
    forms = [linearized_to_form(lp, space) for lp in F if not lp.is_zero()]
    n1 = space.nprime
    if m == 1:
        return ReducibilityReport(True, {}, (), (0,))
    system = gbar_system(forms, space, m)
    span = span_closure(system, field.q)
    mat = _extract_linear_forms(span, m, n1)
    kops = make_ops(field, "k")
    if mat.shape[0]:
        R, pivots = rref(mat, kops)
    else:
        R, pivots = mat, []
    stage_of = [p // n1 for p in pivots]
    counts = [stage_of.count(i) for i in range(m)]
    active = tuple(i for i in range(m - 1) if counts[i] > 0)

    rng = random.Random(seed)
    fw_k = tuple(space.fW)
    witnesses = {}
    for stage in active:
        rows = [[int(x) for x in R[r]] for r, s in enumerate(stage_of) if s == stage]

        def companion_of(combo):
            vec = [0] * (m * n1)
            hit = False
            for c, row in zip(combo, rows):
                if c == 0:
                    continue
                hit = True
                for t, x in enumerate(row):
                    if x:
                        vec[t] = field.add(vec[t], field.mul(c, x))
            return vec if hit else None

        def stage_poly(vec):
            return univar.trim(int(x) for x in vec[stage * n1:(stage + 1) * n1])

        found = None
        for _ in range(draws):
            combo = [rng.randrange(field.order) for _ in rows]
            vec = companion_of(combo)
            if vec is None:
                continue
            gii = stage_poly(vec)
            if gii and symbolic_gcd(field, gii, fw_k) == (1,):
                found = vec
                break
        if found is None:
            kdim = field.n * len(rows)
            if kdim > exhaustive_dim_cap:
                raise SearchBudgetExceeded(
                    f"stage {stage}: candidate space k'-dim {kdim} > {exhaustive_dim_cap}")
            for combo in product(range(field.order), repeat=len(rows)):
                vec = companion_of(list(combo))
                if vec is None:
                    continue
                gii = stage_poly(vec)
                if gii and symbolic_gcd(field, gii, fw_k) == (1,):
                    found = vec
                    break
            if found is None:
                return ReducibilityReport(False, witnesses, active, tuple(counts),
                                          failed_stage=stage, forms_matrix=R)
        per_var = [univar.trim(int(x) for x in found[i * n1:(i + 1) * n1])
                   for i in range(m)]
        witnesses[stage] = LinearizedPoly(field, per_var, bound=n1)
    return ReducibilityReport(True, witnesses, active, tuple(counts), forms_matrix=R)


def eliminate_stage(stage, witness, space):
    """Substitutions x_{stage,j} -> linear form over later stages.

    Uses the symbolic extended Euclid against f_W on the stage companion and
    the Frobenius-step chain for the remaining indices.  Raises
    GcdConditionFailed when the stage companion shares a kernel vector with
    f_W inside W.
    """
    field = space.field
    n1 = space.nprime
    fw_k = tuple(space.fW)
    gii = univar.mod(field.k, witness.per_var(stage), fw_k)
    d, u, _ = symbolic_ext_gcd(field, gii, fw_k)
    if d != (1,):
        raise GcdConditionFailed(
            f"stage {stage} companion shares kernel with f_W (gcd degree {len(d) - 1})")
    phi = linearized_to_form(witness, space)
    psi = lcompose_reduce(u, phi, space)
    expected = (1,) + (0,) * (n1 - 1)
    if psi.coeffs[stage] != expected:
        raise RuntimeError("stage inversion did not isolate the leading variable")
    if psi.min_stage() < stage:
        raise RuntimeError("stage inversion leaked into earlier stages")
    # ell_0 = x_{stage,0} - psi lives strictly in later stages
    f = field
    neg_rows = [tuple(f.neg(c) for c in row) for row in psi.coeffs]
    rows = [list(r) for r in neg_rows]
    rows[stage] = [0] * n1
    ell = LinearForm(field, [tuple(r) for r in rows], n1)
    subs = {(stage, 0): ell}
    cur = ell
    for j in range(1, n1):
        cur = frobenius_step(cur, space)
        subs[(stage, j)] = cur
    return subs


def _substitute_stages(form, gamma, n1):
    """Replace every x_{ij} with gamma[(i, j)] wherever defined."""
    field = form.field
    out = zero_form(field, form.m, n1)
    rows = [list(r) for r in form.coeffs]
    for (i, j), g in gamma.items():
        c = rows[i][j]
        if c:
            rows[i][j] = 0
            out = out.add(g.scale(c))
    base = LinearForm(field, [tuple(r) for r in rows], n1)
    return base.add(out)


@dataclass
class EliminationTrace:
    substitutions: dict      # stage -> LinearizedPoly over the remaining variables
    final_gcd: tuple         # conventional companion of the collapsed ideal
    active_stages: tuple


class SolutionBasis:
    """k'-basis of the solution subspace of W^m, canonical coordinates."""

    def __init__(self, space, m, generators, coord_matrix, trace=None, reducible=None):
        self.space = space
        self.m = m
        self.generators = tuple(tuple(g) for g in generators)
        self.coord_matrix = coord_matrix
        self.trace = trace
        self.reducible = reducible

    @property
    def dim(self):
        return len(self.generators)

    def __repr__(self):
        return f"SolutionBasis(dim={self.dim}, m={self.m})"


def _canonical_basis(space, m, raw_generators, trace=None, reducible=None):
    n1 = space.nprime
    coords = []
    for gen in raw_generators:
        row = []
        for v in gen:
            co = space.coords_of(v)
            if co is None:
                raise RuntimeError("generator coordinate escaped W")
            row.extend(co)
        coords.append(row)
    ops = space._kp_ops
    if coords:
        R, _ = rref(np.array(coords, dtype=np.int16), ops)
    else:
        R = np.zeros((0, m * n1), dtype=np.int16)
    gens = []
    for r in range(R.shape[0]):
        gen = []
        for i in range(m):
            co = tuple(int(c) for c in R[r, i * n1:(i + 1) * n1])
            gen.append(space.from_coords(co))
        gens.append(tuple(gen))
    return SolutionBasis(space, m, gens, R, trace=trace, reducible=reducible)


def solve_structured(F, space, m=None, seed=0, report=None,
                     q_ceiling=7, allow_large_q=False):
    """Build a k'-basis of the common kernel inside W^m by stage elimination.

    Requires the reducibility witness search to succeed (NotReducible
    otherwise).  Stages with no new linear relations keep their coordinates
    free; eliminated stages are back-substituted from the elimination trace;
    the last stage collapses to the kernel of the symbolic gcd of the pushed
    down companions together with f_W.
    """
    field = space.field
    if field.q > q_ceiling and not allow_large_q:
        raise ValueError(f"q = {field.q} above the configured ceiling {q_ceiling}; "
                         "pass allow_large_q=True to override")
    if m is None:
        m = max((lp.m for lp in F), default=1)
    n1 = space.nprime
    F_live = [lp for lp in F if not lp.is_zero()]
    if report is None:
        report = reducibility_check(F_live, space, m=m, seed=seed)
    if not report.reducible:
        raise NotReducible(f"witness search failed at stage {report.failed_stage}")

    gamma = {}
    for stage in report.active_stages:
        subs = eliminate_stage(stage, report.witnesses[stage], space)
        gamma.update(subs)
    # compose: push later-stage substitutions through earlier ones
    for stage in sorted(report.active_stages, reverse=True):
        later = {k: v for k, v in gamma.items() if k[0] > stage}
        for j in range(n1):
            gamma[(stage, j)] = _substitute_stages(gamma[(stage, j)], later, n1)

    eliminated = set(report.active_stages)
    remaining = [s for s in range(m) if s not in eliminated]
    last = m - 1

    # push every input form and the rewriting relations of eliminated stages
    # down to the last stage
    companions = []
    for lp in F_live:
        form = linearized_to_form(lp, space)
        pushed = _substitute_stages(form, gamma, n1)
        if pushed.is_zero():
            continue
        _require_last_stage_only(pushed, remaining, last)
        companions.append(univar.trim(pushed.coeffs[last]))
    for stage in report.active_stages:
        for j in range(n1):
            g_j = gamma[(stage, j)]
            stepped = frobenius_step(g_j, space)
            if j < n1 - 1:
                target = gamma[(stage, j + 1)]
            else:
                target = zero_form(field, m, n1)
                for l, c in enumerate(space.gW):
                    if c:
                        target = target.add(gamma[(stage, l)].scale(c))
            h = stepped.sub(target)
            if h.is_zero():
                continue
            h = _substitute_stages(h, gamma, n1)
            if h.is_zero():
                continue
            _require_last_stage_only(h, remaining, last)
            companions.append(univar.trim(h.coeffs[last]))

    g = tuple(space.fW)
    for h in companions:
        g = symbolic_gcd(field, g, h)
    kernel_coords = space.kernel_in_W(g)
    if len(kernel_coords) != univar.degree(g):
        raise RuntimeError(
            f"kernel dimension {len(kernel_coords)} != deg g = {univar.degree(g)}")

    raw = []
    free_stages = [s for s in remaining if s != last]
    for s in free_stages:
        for w in space.basis_W:
            point = [0] * m
            point[s] = w
            _fill_eliminated(point, gamma, report.active_stages, field, n1)
            raw.append(tuple(point))
    for co in kernel_coords:
        point = [0] * m
        point[last] = space.from_coords(tuple(int(c) for c in co))
        _fill_eliminated(point, gamma, report.active_stages, field, n1)
        raw.append(tuple(point))

    for gen in raw:
        for lp in F_live:
            if lp.eval(gen) != 0:
                raise RuntimeError("structured solution fails an input polynomial")

    trace = EliminationTrace(
        substitutions={s: gamma[(s, 0)].to_linearized() for s in report.active_stages},
        final_gcd=g,
        active_stages=report.active_stages,
    )
    return _canonical_basis(space, m, raw, trace=trace, reducible=True)


def _require_last_stage_only(form, remaining, last):
    for s in remaining:
        if s == last:
            continue
        if any(form.coeffs[s]):
            raise RuntimeError(
                f"pushed-down form has support on free stage {s}; "
                "elimination structure violated")
    for s in range(form.m):
        if s not in remaining and any(form.coeffs[s]):
            raise RuntimeError("pushed-down form still mentions an eliminated stage")


def _fill_eliminated(point, gamma, active, field, n1):
    for s in active:
        point[s] = gamma[(s, 0)].eval_at_subspace_point(point)


def brute_force_solve(F, space, m=None):
    """Independent oracle: each linearized polynomial restricted to W^m is a
    k'-linear map into k, so the solution set is the kernel of one stacked
    matrix over k'.  No reducibility assumption."""
    field = space.field
    if m is None:
        m = max((lp.m for lp in F), default=1)
    n1 = space.nprime
    rows = []
    for lp in F:
        if lp.is_zero():
            continue
        ar = field.k
        per_var = [univar.mod(ar, lp.per_var(i), tuple(space.fW)) for i in range(lp.m)]
        block = [[0] * (m * n1) for _ in range(field.n)]
        for s in range(lp.m):
            for t, w in enumerate(space.basis_W):
                acc = 0
                for j, a in enumerate(per_var[s]):
                    if a:
                        acc = field.add(acc, field.mul(a, field.frob(w, j)))
                for r, c in enumerate(field.coords(acc)):
                    block[r][s * n1 + t] = c
        rows.extend(block)
    ops = space._kp_ops
    if rows:
        ker = kernel_basis(np.array(rows, dtype=np.int16), ops, ncols=m * n1)
    else:
        ker = kernel_basis([], ops, ncols=m * n1)
    raw = []
    for v in ker:
        gen = []
        for s in range(m):
            co = tuple(int(c) for c in v[s * n1:(s + 1) * n1])
            gen.append(space.from_coords(co))
        raw.append(tuple(gen))
    return _canonical_basis(space, m, raw, reducible=None)


def subspace_equal(a, b):
    """Exact equality of solution subspaces via the canonical coordinates."""
    if a.m != b.m or a.space.fW != b.space.fW:
        return False
    return (a.coord_matrix.shape == b.coord_matrix.shape
            and bool(np.array_equal(a.coord_matrix, b.coord_matrix)))


def enumerate_solutions(F, space, m=None, budget=4096):
    """All points of W^m annihilated by F, by exhaustive enumeration."""
    field = space.field
    if m is None:
        m = max((lp.m for lp in F), default=1)
    total = field.q ** (space.nprime * m)
    if total > budget:
        raise ValueError(f"{total} points exceed the enumeration budget")
    live = [lp for lp in F if not lp.is_zero()]
    out = []
    for coords in product(list(space.elements()), repeat=m):
        if all(lp.eval(coords) == 0 for lp in live):
            out.append(tuple(coords))
    return out
