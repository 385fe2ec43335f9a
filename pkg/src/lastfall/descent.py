"""Weil descent of polynomial systems and the associated auxiliary systems.

Given a system over k = GF(q^n) in variables X_0..X_{m-1} and a k/k' basis
a_0..a_{n-1}, each variable is expanded as X_i = sum_j a_j X_{ij} and every
coefficient of the expansion is decomposed in the basis again, producing n
component polynomials with subfield coefficients per input polynomial.  The
module also builds:

  * the chain-extended system over k whose zero set is identified with the
    k-rational points of the input (fresh variables Y_{i1}..Y_{i,n-1} tied by
    X_i^q = Y_{i1}, Y_{ij}^q = Y_{i,j+1}, Y_{i,n-1}^q = X_i);
  * the descended system plus all subfield equations X_{ij}^q - X_{ij};
  * the Galois-orbit systems used as test apparatus for the span arguments
    (substituted generators and their coefficient-wise conjugates).

Variable naming is fixed (X{i}_{j} flattened as i*n+j, Y variables after all
X_i) so emitted systems are byte-stable.
"""

from itertools import product

import numpy as np

from .errors import CoordinateNotInField, NotABasis
from .gf import FieldElement, moore_matrix
from .linalg import make_ops, solve
from .poly import PolySystem, Ring


class DescentContext:
    """Field, basis, Moore matrix and the precomputed coordinate solver."""

    def __init__(self, field, m, basis=None):
        self.field = field
        self.m = m
        n = field.n
        if basis is None:
            basis = [field.pow(field.gen(), j) for j in range(n)]
        self.basis = tuple(int(b) for b in basis)
        self.gamma = moore_matrix([FieldElement(field, b) for b in self.basis])
        # coordinate matrix of the basis over k' and its inverse, used to
        # decompose k-coefficients once per descended term
        A = np.array([[field.coords(b)[i] for b in self.basis] for i in range(n)],
                     dtype=np.int16)
        self._A = A
        ops = make_ops(field, "kprime")
        inv_cols = []
        for j in range(n):
            rhs = np.zeros(n, dtype=np.int16)
            rhs[j] = 1
            col = solve(A, rhs, ops)
            if col is None:
                raise NotABasis("coordinate matrix is singular")
            inv_cols.append(col)
        self._A_inv = np.stack(inv_cols, axis=1)
        self._kprime_ops = ops

        self.ring_original = Ring(field, "k", [f"X{i}" for i in range(m)])
        svars = [f"X{i}_{j}" for i in range(m) for j in range(n)]
        self.ring_descent_k = Ring(field, "k", svars)
        self.ring_descent = Ring(field, "kprime", svars)
        yvars = [f"Y{i}_{j}" for i in range(m) for j in range(1, n)]
        self.ring_chain = Ring(field, "k", [f"X{i}" for i in range(m)] + yvars)

    def decompose(self, code):
        """Coordinates of a k element in the descent basis (k' codes)."""
        co = np.array(self.field.coords(code), dtype=np.int16)
        q = self.field.q
        out = self._A_inv @ co.astype(np.int64)
        if self.field.e == 1:
            return tuple(int(x) % q for x in out)
        # table fields need a genuine matrix product over k'
        kp = self.field.kprime
        res = []
        for i in range(self.field.n):
            acc = 0
            for j in range(self.field.n):
                acc = kp.add(acc, kp.mul(int(self._A_inv[i, j]), int(co[j])))
            res.append(acc)
        return tuple(res)

    def recompose(self, coords):
        """Sum of basis elements weighted by k' codes."""
        f = self.field
        acc = 0
        for c, b in zip(coords, self.basis):
            if not f.lies_in_subfield(c):
                raise CoordinateNotInField(f"{c} is not a k' code")
            acc = f.add(acc, f.mul(c, b))
        return acc


def make_descent_context(field, m, basis=None):
    return DescentContext(field, m, basis=basis)


def substituted_generator(f, ctx):
    """f with its i-th variable replaced by sum_j a_j X_{ij}, expanded over k."""
    if f.ring.nvars != ctx.m:
        raise ValueError("polynomial does not match the context's variable count")
    images = {}
    for i, name in enumerate(f.ring.vars):
        img = ctx.ring_descent_k.zero()
        for j, b in enumerate(ctx.basis):
            img = img + ctx.ring_descent_k.variable(i * ctx.field.n + j).scale(b)
        images[name] = img
    return f.substitute(images)


def weil_descend(f, ctx):
    """Component polynomials (f_0 .. f_{n-1}) of f under the descent.

    The expansion of f(sum a_j X_{0j}, ...) is decomposed coefficient by
    coefficient against the basis, so sum_j a_j * f_j reproduces the
    substituted polynomial exactly and deg f_j <= deg f.
    """
    n = ctx.field.n
    g = substituted_generator(f, ctx)
    components = [dict() for _ in range(n)]
    for e, c in g.terms.items():
        for j, cj in enumerate(ctx.decompose(c)):
            if cj:
                components[j][e] = cj
    ring = ctx.ring_descent
    return [ring.from_terms(comp.items()) for comp in components]


class DescentSystem:
    """Original system, its descended components and the component map."""

    def __init__(self, original, descended, components):
        self.original = original
        self.descended = descended
        self.components = components


def build_Fprime(system, ctx):
    out = []
    comp_map = {}
    for f in system.polys:
        comps = weil_descend(f, ctx)
        comp_map[f] = tuple(comps)
        out.extend(comps)
    return DescentSystem(system, PolySystem(ctx.ring_descent, out), comp_map)


def field_equations(ring, q):
    """x^q - x for every ring variable."""
    eqs = []
    for i in range(ring.nvars):
        x = ring.variable(i)
        eqs.append(x.pow_int(q) - x)
    return eqs


def build_Fprime1(system, ctx):
    """Descended system together with all subfield equations X_{ij}^q - X_{ij}."""
    desc = build_Fprime(system, ctx)
    q = ctx.field.q
    polys = list(desc.descended.polys) + field_equations(ctx.ring_descent, q)
    return PolySystem(ctx.ring_descent, polys)


def build_F1(system, ctx):
    """System over k extended by the q-power chains; the zero set projects
    bijectively onto the k-rational points of the input."""
    field = ctx.field
    ring = ctx.ring_chain
    m, n, q = ctx.m, field.n, field.q
    rename = {name: ring.variable(i) for i, name in enumerate(system.ring.vars)}
    polys = [f.substitute(rename) for f in system.polys]

    def yvar(i, j):
        return ring.variable(m + i * (n - 1) + (j - 1))

    for i in range(m):
        if n == 1:
            x = ring.variable(i)
            polys.append(x.pow_int(q) - x)
            continue
        chain = [ring.variable(i)] + [yvar(i, j) for j in range(1, n)]
        for j in range(n):
            polys.append(chain[j].pow_int(q) - chain[(j + 1) % n])
    return PolySystem(ring, polys)


def build_sigma_orbit_G(system, ctx):
    """All coefficient-wise conjugates of the substituted generators."""
    polys = []
    for f in system.polys:
        g = substituted_generator(f, ctx)
        for i in range(ctx.field.n):
            polys.append(g.apply_sigma(i))
    return PolySystem(ctx.ring_descent_k, polys)


def build_G1(system, ctx):
    g = build_sigma_orbit_G(system, ctx)
    polys = list(g.polys) + field_equations(ctx.ring_descent_k, ctx.field.q)
    return PolySystem(ctx.ring_descent_k, polys)


def build_G2(system, ctx):
    """Substituted generators plus subfield equations; the image of the
    chain-extended system under the Moore-matrix change of coordinates."""
    polys = [substituted_generator(f, ctx) for f in system.polys]
    polys += field_equations(ctx.ring_descent_k, ctx.field.q)
    return PolySystem(ctx.ring_descent_k, polys)


def solution_transport(point, ctx, direction):
    """Move a solution across the descent bijection.

    direction="descend": m-tuple over k -> (m*n)-tuple of k' codes.
    direction="lift": the inverse evaluation sum_j a_j x_{ij}.
    """
    if direction == "descend":
        out = []
        for x in point:
            out.extend(ctx.decompose(x))
        return tuple(out)
    if direction == "lift":
        n = ctx.field.n
        if len(point) != ctx.m * n:
            raise ValueError("expected m*n coordinates")
        for c in point:
            if not ctx.field.lies_in_subfield(c):
                raise CoordinateNotInField(f"{c} is not a k' code")
        return tuple(ctx.recompose(point[i * n:(i + 1) * n]) for i in range(ctx.m))
    raise ValueError("direction must be 'descend' or 'lift'")


# -- exhaustive zero sets (desk scale) -----------------------------------------


def zk_points(system, budget=200_000):
    """All solutions of the system with coordinates in the coefficient field."""
    ring = system.ring
    order = ring.coeff_order
    total = order**ring.nvars
    if total > budget:
        raise ValueError(f"enumeration of {total} points exceeds budget")
    polys = system.nonzero()
    out = []
    for pt in product(range(order), repeat=ring.nvars):
        if all(f.eval(pt) == 0 for f in polys):
            out.append(pt)
    return out


def f1_points(system, ctx):
    """Zero set of the chain-extended system, derived from the k-points."""
    field = ctx.field
    n = field.n
    pts = []
    for pt in zk_points(system):
        chain_pt = list(pt)
        for i in range(ctx.m):
            for j in range(1, n):
                chain_pt.append(field.frob(pt[i], j))
        pts.append(tuple(chain_pt))
    return pts


def fprime1_points(system, ctx):
    """Zero set of the descended-plus-field-equations system."""
    return [solution_transport(pt, ctx, "descend") for pt in zk_points(system)]
