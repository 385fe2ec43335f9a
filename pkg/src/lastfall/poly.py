"""Sparse multivariate polynomials over the tower fields.

Terms are dicts mapping exponent tuples to nonzero coefficient codes.  A ring
fixes the field, the coefficient level ("k" for the top field, "kprime" for
the subfield) and an ordered variable list; the zero polynomial has degree
NEG_INF so that every "deg <= i" predicate stays safe.

The degree-compatible monomial enumerations (grevlex by default, grlex as the
alternative) are shared with the span-closure engine: monomials are listed
degree by degree, ascending inside each degree, so that in any coefficient
vector the rightmost entries correspond to the largest monomials.
"""

import json
from itertools import combinations_with_replacement

from .errors import RingMismatch, UnassignedVariable

NEG_INF = float("-inf")


def grevlex_key(exps):
    return (sum(exps), tuple(-e for e in reversed(exps)))


def grlex_key(exps):
    return (sum(exps), tuple(exps))


ORDER_KEYS = {"grevlex": grevlex_key, "grlex": grlex_key}


def monomials_of_degree(nvars, d, order="grevlex"):
    """All exponent tuples of total degree d, ascending in the given order."""
    key = ORDER_KEYS[order]
    out = []
    if nvars == 0:
        return [()] if d == 0 else []
    for combo in combinations_with_replacement(range(nvars), d):
        e = [0] * nvars
        for v in combo:
            e[v] += 1
        out.append(tuple(e))
    out.sort(key=key)
    return out


def monomials_up_to(nvars, cap, order="grevlex"):
    out = []
    for d in range(cap + 1):
        out.extend(monomials_of_degree(nvars, d, order))
    return out


class Ring:
    """A polynomial ring over k or k' with a fixed variable order."""

    def __init__(self, field, level, variables):
        if level not in ("k", "kprime"):
            raise ValueError("level must be 'k' or 'kprime'")
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise ValueError("variable names must be unique")
        self.field = field
        self.level = level
        self.vars = variables
        self.nvars = len(variables)
        self._var_index = {v: i for i, v in enumerate(variables)}

    @property
    def coeff_order(self):
        return self.field.q if self.level == "kprime" else self.field.order

    def check_coeff(self, c):
        if not 0 <= c < self.coeff_order:
            raise ValueError(f"coefficient code {c} outside the {self.level} domain")
        return int(c)

    def var_index(self, name):
        try:
            return self._var_index[name]
        except KeyError:
            raise UnassignedVariable(f"unknown variable {name!r}") from None

    def zero(self):
        return MultiPoly(self, {})

    def one(self):
        return self.constant(1)

    def constant(self, c):
        c = self.check_coeff(c)
        if c == 0:
            return self.zero()
        return MultiPoly(self, {(0,) * self.nvars: c})

    def variable(self, v):
        i = v if isinstance(v, int) else self.var_index(v)
        e = [0] * self.nvars
        e[i] = 1
        return MultiPoly(self, {tuple(e): 1})

    def monomial(self, exps, c=1):
        c = self.check_coeff(c)
        if c == 0:
            return self.zero()
        return MultiPoly(self, {tuple(exps): c})

    def from_terms(self, terms):
        out = {}
        for exps, c in terms:
            exps = tuple(int(x) for x in exps)
            if len(exps) != self.nvars:
                raise ValueError("exponent vector has the wrong length")
            c = self.check_coeff(c)
            if c == 0:
                continue
            cur = out.get(exps, 0)
            s = self.field.add(cur, c)
            if s:
                out[exps] = s
            else:
                out.pop(exps, None)
        return MultiPoly(self, out)

    def __eq__(self, other):
        return (isinstance(other, Ring) and other.field == self.field
                and other.level == self.level and other.vars == self.vars)

    def __hash__(self):
        return hash((self.field, self.level, self.vars))

    def __repr__(self):
        return f"Ring({self.level}, vars={list(self.vars)})"


class MultiPoly:
    """Immutable sparse polynomial; do not mutate `terms` after construction."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms):
        self.ring = ring
        self.terms = terms

    @property
    def degree(self):
        if not self.terms:
            return NEG_INF
        return max(sum(e) for e in self.terms)

    def is_zero(self):
        return not self.terms

    def _coerced(self, other):
        if isinstance(other, MultiPoly):
            if other.ring != self.ring:
                raise RingMismatch("polynomials live in different rings")
            return other
        raise TypeError(f"cannot combine MultiPoly with {type(other).__name__}")

    def __add__(self, other):
        other = self._coerced(other)
        f = self.ring.field
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = f.add(out.get(e, 0), c)
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return MultiPoly(self.ring, out)

    def __neg__(self):
        f = self.ring.field
        return MultiPoly(self.ring, {e: f.neg(c) for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = self.ring.check_coeff(c)
        if c == 0:
            return self.ring.zero()
        f = self.ring.field
        return MultiPoly(self.ring, {e: f.mul(c, v) for e, v in self.terms.items()})

    def __mul__(self, other):
        other = self._coerced(other)
        f = self.ring.field
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = f.add(out.get(e, 0), f.mul(c1, c2))
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return MultiPoly(self.ring, out)

    def pow_int(self, m):
        acc = self.ring.one()
        base = self
        while m:
            if m & 1:
                acc = acc * base
            base = base * base
            m >>= 1
        return acc

    def eval(self, point):
        """Evaluate at a tuple of coefficient codes."""
        f = self.ring.field
        acc = 0
        for e, c in self.terms.items():
            v = c
            for i, a in enumerate(e):
                if a:
                    v = f.mul(v, f.pow(point[i], a))
            acc = f.add(acc, v)
        return acc

    def substitute(self, assignment):
        """Full expansion of var -> MultiPoly (all in one target ring).

        Every variable appearing in this polynomial must be assigned.
        """
        images = {}
        target = None
        for name, img in assignment.items():
            self.ring.var_index(name)  # validates the name
            if target is None:
                target = img.ring
            elif img.ring != target:
                raise RingMismatch("substitution images live in different rings")
            images[self.ring.var_index(name)] = img
        if target is None:
            raise UnassignedVariable("empty assignment")
        # cache powers per variable
        used = set()
        for e in self.terms:
            for i, a in enumerate(e):
                if a:
                    used.add(i)
        missing = [self.ring.vars[i] for i in sorted(used - set(images))]
        if missing:
            raise UnassignedVariable(f"no image for {missing}")
        powers = {}
        for i, img in images.items():
            maxe = max((e[i] for e in self.terms), default=0)
            ps = [target.one()]
            for _ in range(maxe):
                ps.append(ps[-1] * img)
            powers[i] = ps
        out = target.zero()
        for e, c in self.terms.items():
            term = target.constant(c)
            for i, a in enumerate(e):
                if a:
                    term = term * powers[i][a]
            out = out + term
        return out

    def apply_sigma(self, i):
        """Raise every coefficient to the q^i power; exponents untouched."""
        f = self.ring.field
        return MultiPoly(self.ring, {e: f.frob(c, i) for e, c in self.terms.items()})

    def normal_form_field_eqs(self, relations):
        """Reduce exponents by per-variable rules x^a -> x^b (a > b >= 1)."""
        rules = {}
        for name, (a, b) in relations.items():
            if not a > b >= 1:
                raise ValueError("relation must have a > b >= 1")
            rules[self.ring.var_index(name)] = (a, b)
        f = self.ring.field
        out = {}
        for e, c in self.terms.items():
            e = list(e)
            for i, (a, b) in rules.items():
                while e[i] >= a:
                    e[i] = e[i] - a + b
            e = tuple(e)
            s = f.add(out.get(e, 0), c)
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return MultiPoly(self.ring, out)

    def lies_in_subfield(self):
        q = self.ring.field.q
        return all(c < q for c in self.terms.values())

    def coeff_of(self, exps):
        return self.terms.get(tuple(exps), 0)

    def sorted_terms(self, order="grevlex", reverse=True):
        key = ORDER_KEYS[order]
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=reverse)

    def leading(self, order="grevlex"):
        """(exponent, coefficient) of the largest monomial present."""
        if not self.terms:
            return None
        key = ORDER_KEYS[order]
        e = max(self.terms, key=key)
        return e, self.terms[e]

    def __eq__(self, other):
        return (isinstance(other, MultiPoly) and other.ring == self.ring
                and other.terms == self.terms)

    def __hash__(self):
        return hash((self.ring, tuple(sorted(self.terms.items()))))

    # -- text / json -----------------------------------------------------------

    def to_text(self):
        if not self.terms:
            return "0"
        parts = []
        field = self.ring.field
        for e, c in self.sorted_terms():
            coord = ",".join(str(d) for d in field.coords(c))
            names = []
            for i, a in enumerate(e):
                if a == 1:
                    names.append(self.ring.vars[i])
                elif a > 1:
                    names.append(f"{self.ring.vars[i]}^{a}")
            mono = " ".join(names) if names else "1"
            parts.append(f"({coord})*{mono}")
        return " + ".join(parts)

    @classmethod
    def from_text(cls, ring, text):
        text = text.strip()
        if text == "0":
            return ring.zero()
        field = ring.field
        terms = []
        for chunk in text.split("+"):
            chunk = chunk.strip()
            coord_part, mono_part = chunk.split("*", 1)
            coord_part = coord_part.strip()
            if not (coord_part.startswith("(") and coord_part.endswith(")")):
                raise ValueError(f"bad coefficient {coord_part!r}")
            digits = [int(x) for x in coord_part[1:-1].split(",")]
            code = field.from_coords(digits)
            e = [0] * ring.nvars
            mono_part = mono_part.strip()
            if mono_part != "1":
                for atom in mono_part.split():
                    if "^" in atom:
                        name, expo = atom.split("^")
                        e[ring.var_index(name)] += int(expo)
                    else:
                        e[ring.var_index(atom)] += 1
            terms.append((tuple(e), code))
        return ring.from_terms(terms)

    def to_json_obj(self):
        field = self.ring.field
        return [{"coeff": list(field.coords(c)), "exps": list(e)}
                for e, c in self.sorted_terms()]

    @classmethod
    def from_json_obj(cls, ring, obj):
        field = ring.field
        return ring.from_terms(
            (tuple(t["exps"]), field.from_coords(t["coeff"])) for t in obj)

    def __repr__(self):
        return f"MultiPoly({self.to_text()})"


class PolySystem:
    """A finite list of polynomials sharing one ring (duplicates allowed)."""

    def __init__(self, ring, polys):
        polys = tuple(polys)
        for f in polys:
            if f.ring != ring:
                raise RingMismatch("system polynomials live in different rings")
        self.ring = ring
        self.polys = polys

    @property
    def degree(self):
        if not self.polys:
            return NEG_INF
        return max(f.degree for f in self.polys)

    def nonzero(self):
        return [f for f in self.polys if not f.is_zero()]

    def __iter__(self):
        return iter(self.polys)

    def __len__(self):
        return len(self.polys)

    def __eq__(self, other):
        return (isinstance(other, PolySystem) and other.ring == self.ring
                and other.polys == self.polys)

    def to_json_obj(self):
        return {
            "field": self.ring.field.to_json(),
            "level": self.ring.level,
            "vars": list(self.ring.vars),
            "polys": [f.to_json_obj() for f in self.polys],
        }

    @classmethod
    def from_json_obj(cls, obj, field=None):
        from .gf import FieldSpec

        if field is None:
            field = FieldSpec.from_json(obj["field"])
        ring = Ring(field, obj["level"], obj["vars"])
        return cls(ring, [MultiPoly.from_json_obj(ring, p) for p in obj["polys"]])

    def to_json_str(self):
        return json.dumps(self.to_json_obj(), sort_keys=True)

    @classmethod
    def from_json_str(cls, s):
        return cls.from_json_obj(json.loads(s))
