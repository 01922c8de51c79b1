"""Level-p data for the normalizer of a non-split Cartan subgroup.

Builds the group G of matrices (a, X*b; b, a) and (a, X*b; -b, -a) over
F_p (X a fixed non-residue), the subgroup G_H cut out by det in H, the
orbit decomposition of the p-torsion parameter set under G_H, and the
cusp classes with SL2 representatives.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from .errors import BadIndex, BadLevel, BadSubgroup, InternalInconsistency


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


@dataclass(frozen=True)
class APoint:
    """Point (x/p, y/p) of the p-torsion parameter set, 0 <= x, y < p."""
    x: int
    y: int
    p: int

    @property
    def a1(self) -> Fraction:
        return Fraction(self.x, self.p)

    @property
    def a2(self) -> Fraction:
        return Fraction(self.y, self.p)

    def times_matrix(self, m: Sequence[int]) -> "APoint":
        """Right action of a 2x2 matrix (row-major) on the row vector (x, y)."""
        a, b, c, d = m
        p = self.p
        return APoint((self.x * a + self.y * c) % p, (self.x * b + self.y * d) % p, p)


@dataclass(frozen=True)
class Orbit:
    label: int  # smallest positive representative of the determinant coset
    points: frozenset


@dataclass(frozen=True)
class Cusp:
    label: int  # class of +-a, 1 <= label <= (p-1)/2; 1 is the cusp at infinity
    vectors: frozenset  # column vectors (x, y) with x^2 - X*y^2 = +-label
    sigma: tuple  # SL2(F_p) matrix sending the infinity class to this class


@dataclass(frozen=True)
class CartanContext:
    p: int
    d: int
    xi: int
    H: tuple
    coset_reps: tuple  # d representatives, identity coset (rep 1) first
    coset_rep_of: tuple  # residue -> representative of its H-coset (index 0 unused)

    @property
    def half_H(self) -> tuple:
        """Representatives of H modulo +-1 (elements below p/2)."""
        return tuple(h for h in self.H if 2 * h < self.p)

    def coset_mul(self, a: int, b: int) -> int:
        return self.coset_rep_of[(a * b) % self.p]

    def coset_inv(self, a: int) -> int:
        return self.coset_rep_of[pow(a, -1, self.p)]


def build_context(p: int, d: int, H_choice: Optional[Sequence[int]] = None) -> CartanContext:
    """Validated context for a prime p >= 7 and a divisor d >= 3 of (p-1)/2."""
    if not is_prime(p) or p < 7:
        raise BadLevel(f"p = {p} is not a prime >= 7")
    if d < 3 or (p - 1) // 2 % d != 0 or (p - 1) % (2 * d) != 0:
        raise BadIndex(f"d = {d} is not a divisor >= 3 of (p-1)/2 = {(p - 1) // 2}")

    order = (p - 1) // d
    H = tuple(sorted(x for x in range(1, p) if pow(x, order, p) == 1))
    if H_choice is not None:
        cand = tuple(sorted(set(int(h) % p for h in H_choice)))
        if len(cand) != order:
            raise BadSubgroup(f"|H| = {len(cand)}, expected {order}")
        if (p - 1) not in cand:
            raise BadSubgroup("-1 is not in H")
        for a in cand:
            for b in cand:
                if (a * b) % p not in cand:
                    raise BadSubgroup("H is not closed under multiplication")
        H = cand  # the index-d subgroup of a cyclic group is unique

    if p % 4 == 3:
        xi = p - 1
    else:
        xi = next(n for n in range(2, p) if pow(n, (p - 1) // 2, p) == p - 1)

    rep_of = [0] * p
    reps = []
    for a in range(1, p):
        if rep_of[a] == 0:
            coset = sorted((a * h) % p for h in H)
            rep = coset[0]
            reps.append(rep)
            for x in coset:
                rep_of[x] = rep
    reps.sort()
    assert reps[0] == 1 and len(reps) == d
    return CartanContext(p, d, xi, H, tuple(reps), tuple(rep_of))


# -- the group ----------------------------------------------------------


def in_G(ctx: CartanContext, m: Sequence[int]) -> bool:
    """Membership test for the Cartan normalizer."""
    a, b, c, d = (x % ctx.p for x in m)
    if (a, b, c, d) == (0, 0, 0, 0):
        return False
    plus = d == a and b == (ctx.xi * c) % ctx.p
    minus = d == (-a) % ctx.p and b == (-ctx.xi * c) % ctx.p
    return plus or minus


def det_mod(m: Sequence[int], p: int) -> int:
    return (m[0] * m[3] - m[1] * m[2]) % p


def in_G_H(ctx: CartanContext, m: Sequence[int]) -> bool:
    return in_G(ctx, m) and det_mod(m, ctx.p) in ctx.H


def group_elements(ctx: CartanContext):
    """All elements of G by explicit enumeration of both shapes."""
    p, xi = ctx.p, ctx.xi
    for alpha in range(p):
        for beta in range(p):
            if alpha == 0 and beta == 0:
                continue
            yield (alpha, (xi * beta) % p, beta, alpha)
            yield (alpha, (xi * beta) % p, (-beta) % p, (-alpha) % p)


def group_order(ctx: CartanContext):
    """(|G|, |G_H|), both counted by enumeration and cross-checked."""
    n_g = 0
    n_gh = 0
    for m in group_elements(ctx):
        if not in_G(ctx, m):
            raise InternalInconsistency(f"enumerated matrix fails membership: {m}")
        n_g += 1
        if det_mod(m, ctx.p) in ctx.H:
            n_gh += 1
    if n_g != 2 * (ctx.p ** 2 - 1):
        raise InternalInconsistency(f"|G| = {n_g} != 2(p^2-1)")
    if n_gh * ctx.d != n_g:
        raise InternalInconsistency(f"|G_H| = {n_gh} is not |G|/d")
    return n_g, n_gh


# -- orbits -------------------------------------------------------------


def _points(p: int):
    return [APoint(x, y, p) for x in range(p) for y in range(p) if (x, y) != (0, 0)]


@lru_cache(maxsize=None)
def orbit_decomposition(ctx: CartanContext):
    """The d orbits of the right G_H-action, labelled by H-cosets.

    Computed twice: by evaluating the quadratic form x^2 - X^{-1} y^2,
    and by closing points under the full G_H action; any mismatch is an
    implementation bug.
    """
    p = ctx.p
    xi_inv = pow(ctx.xi, -1, p)
    by_form = {}
    for pt in _points(p):
        v = (pt.x * pt.x - xi_inv * pt.y * pt.y) % p
        if v == 0:
            raise InternalInconsistency("quadratic form vanished on a nonzero point")
        by_form.setdefault(ctx.coset_rep_of[v], set()).add(pt)

    gh = [m for m in group_elements(ctx) if det_mod(m, p) in ctx.H]
    seen = set()
    closures = []
    for start in _points(p):
        if start in seen:
            continue
        orbit = {start}
        queue = [start]
        while queue:
            pt = queue.pop()
            for m in gh:
                img = pt.times_matrix(m)
                if img not in orbit:
                    orbit.add(img)
                    queue.append(img)
        seen |= orbit
        closures.append(orbit)

    orbits = []
    for label in sorted(by_form):
        members = by_form[label]
        if len(members) * ctx.d != p * p - 1:
            raise InternalInconsistency(
                f"orbit {label} has size {len(members)}, expected {(p * p - 1) // ctx.d}")
        if members not in closures:
            raise InternalInconsistency(
                f"form level set for label {label} is not a G_H closure")
        orbits.append(Orbit(label, frozenset(members)))
    if len(orbits) != ctx.d or len(closures) != ctx.d:
        raise InternalInconsistency("orbit count differs from d")
    return tuple(orbits)


def orbit_for_label(ctx: CartanContext, label: int) -> Orbit:
    for orb in orbit_decomposition(ctx):
        if orb.label == label:
            return orb
    raise KeyError(label)


def galois_orbit_action(ctx: CartanContext, s: int, orb: Orbit) -> Orbit:
    """Translate an orbit by the Galois element attached to the coset of s."""
    return orbit_for_label(ctx, ctx.coset_mul(orb.label, s))


# -- cusps --------------------------------------------------------------


def _sl2_elements(p: int):
    """All of SL2(F_p) as row-major tuples, in lexicographic order."""
    mats = []
    for b in range(1, p):
        c = (-pow(b, -1, p)) % p
        for d in range(p):
            mats.append((0, b, c, d))
    for a in range(1, p):
        ainv = pow(a, -1, p)
        for b in range(p):
            for c in range(p):
                mats.append((a, b, c, ((1 + b * c) * ainv) % p))
    mats.sort()
    return mats


@lru_cache(maxsize=None)
def cusp_classes(ctx: CartanContext):
    """The (p-1)/2 cusp classes x^2 - X y^2 = +-a with SL2 representatives.

    sigma is the lexicographically smallest SL2(F_p) matrix whose first
    column lies in the class (the identity for the class of the cusp at
    infinity, a = 1).
    """
    p, xi = ctx.p, ctx.xi
    classes = {}
    for x in range(p):
        for y in range(p):
            if (x, y) == (0, 0):
                continue
            v = (x * x - xi * y * y) % p
            if v == 0:
                raise InternalInconsistency("cusp form vanished on a nonzero vector")
            classes.setdefault(min(v, p - v), set()).add((x, y))
    if len(classes) != (p - 1) // 2:
        raise InternalInconsistency(f"{len(classes)} cusp classes, expected {(p - 1) // 2}")
    if sum(len(v) for v in classes.values()) != p * p - 1:
        raise InternalInconsistency("cusp classes do not partition the nonzero vectors")

    sigma = {1: (1, 0, 0, 1)}
    want = set(classes) - {1}
    for m in _sl2_elements(p):
        if not want:
            break
        a, _, c, _ = m
        v = (a * a - xi * c * c) % p
        lbl = min(v, p - v)
        if lbl in want:
            sigma[lbl] = m
            want.discard(lbl)
    if want:
        raise InternalInconsistency(f"no SL2 representative found for classes {want}")

    return tuple(Cusp(lbl, frozenset(classes[lbl]), sigma[lbl]) for lbl in sorted(classes))
