"""Ext groups for finite modules over Z and Z/N, with enumeration oracles.

Engine route: over Z, the classical invariant-factor formula; over Z/N,
the periodic free resolution of each cyclic factor
(... -> Z/N --N/d--> Z/N --d--> Z/N -> Z/d -> 0), so
Ext^1(Z/d, B) = ker(N/d on B) / dB and Ext^2(Z/d, B) = ker(d on B) / (N/d)B,
computed with the presentation toolkit.

Oracle route: extensions of A by B are classified by lifting the diagonal
relations of A into B; the class group is enumerated elementwise, with no
matrix normal forms involved.
"""

from __future__ import annotations

import math
from itertools import product

from .fpmod import FPModule, Morphism, canonical_invariants


def _cyclic_summands(module: FPModule) -> list[int]:
    return list(module.invariants())


def _quotient_invariants(big_rows, small_rows, ambient: FPModule) -> tuple[int, ...]:
    """Invariants of (span big_rows) / (span small_rows) inside ambient."""
    from .fpmod import factor_through_submodule
    from .intlinalg import left_nullspace
    if not big_rows:
        return ()
    rel_rows = []
    stacked = big_rows + ambient.relation_rows()
    null = left_nullspace(stacked)
    rel_rows = [v[: len(big_rows)] for v in null]
    coeffs = factor_through_submodule(small_rows, big_rows, ambient)
    if coeffs is None:
        raise ValueError("small submodule does not sit inside the big one")
    pres = rel_rows + coeffs
    return FPModule.from_presentation(pres, gens=len(big_rows)).invariants()


def ext1(a: FPModule, b: FPModule) -> tuple[int, ...]:
    """Invariant factors of Ext^1(A, B) over the common ground ring."""
    if a.modulus != b.modulus:
        raise ValueError("modules live over different rings")
    n = a.modulus
    out_parts: list[int] = []
    rank = 0
    if n == 0:
        b_inv = b.invariants()
        for d in a.invariants():
            if d == 0:
                continue          # Ext^1(Z, -) = 0
            for e in b_inv:
                g = d if e == 0 else math.gcd(d, e)
                if g > 1:
                    out_parts.append(g)
        return canonical_invariants(out_parts, 0)
    for d in _cyclic_summands(a):
        if d == n:
            continue              # Z/N is free over Z/N
        ker, incl = Morphism.multiplication(b, n // d).kernel()
        ker_rows = incl.mat()
        image_rows = [[d * x for x in row] for row in Morphism.identity(b).mat()]
        inv = _quotient_invariants(ker_rows, image_rows, b)
        for x in inv:
            if x == 0:
                rank += 1
            else:
                out_parts.append(x)
    return canonical_invariants(out_parts, rank)


def ext2(a: FPModule, b: FPModule) -> tuple[int, ...]:
    """Ext^2 over Z/N via the next step of the periodic resolution (0 over Z)."""
    if a.modulus != b.modulus:
        raise ValueError("modules live over different rings")
    n = a.modulus
    if n == 0:
        return ()                 # hereditary ring
    out_parts: list[int] = []
    rank = 0
    for d in _cyclic_summands(a):
        if d == n:
            continue
        ker, incl = Morphism.multiplication(b, d).kernel()
        ker_rows = incl.mat()
        image_rows = [[(n // d) * x for x in row] for row in Morphism.identity(b).mat()]
        inv = _quotient_invariants(ker_rows, image_rows, b)
        for x in inv:
            if x == 0:
                rank += 1
            else:
                out_parts.append(x)
    return canonical_invariants(out_parts, rank)


def ext1_order(a: FPModule, b: FPModule) -> int:
    out = 1
    for d in ext1(a, b):
        out *= d
    return out


# ---------------------------------------------------------------------------
# enumeration oracle
# ---------------------------------------------------------------------------


class _FiniteGroup:
    """Elementwise view of a product of cyclic groups, for enumeration."""

    def __init__(self, factors: list[int]):
        if any(f <= 0 for f in factors):
            raise ValueError("oracle needs finite factors")
        self.factors = factors

    def elements(self):
        return product(*[range(f) for f in self.factors])

    def scale(self, c: int, x):
        return tuple((c * xi) % f for xi, f in zip(x, self.factors))

    def subgroup(self, gens):
        seen = {tuple(0 for _ in self.factors)}
        frontier = list(seen)
        while frontier:
            cur = frontier.pop()
            for g in gens:
                nxt = tuple((a + b) % f for a, b, f in zip(cur, g, self.factors))
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        return seen


def ext1_order_oracle(a_factors: list[int], b_factors: list[int],
                      modulus: int = 0) -> int:
    """Number of extension classes of A by B, by direct enumeration.

    A relation d*x = 0 of A lifts to an arbitrary value in B subject to the
    cocycle constraint ((N/d) kills it over Z/N; no constraint over Z);
    changing the lift shifts the value by dB.  The class count is the
    product over A's cyclic factors of |cocycles| / |dB|.
    """
    if any(f <= 0 for f in a_factors) or any(f <= 0 for f in b_factors):
        raise ValueError("oracle is for finite modules")
    grp = _FiniteGroup(list(b_factors))
    total = 1
    for d in a_factors:
        if modulus:
            if d == modulus:
                continue
            cocycles = [x for x in grp.elements()
                        if all(((modulus // d) * xi) % f == 0
                               for xi, f in zip(x, grp.factors))]
        else:
            cocycles = list(grp.elements())
        boundary = grp.subgroup([grp.scale(d, e) for e in _unit_vectors(grp)])
        assert len(cocycles) % len(boundary) == 0
        total *= len(cocycles) // len(boundary)
    return total


def _unit_vectors(grp: _FiniteGroup):
    out = []
    for i in range(len(grp.factors)):
        e = [0] * len(grp.factors)
        e[i] = 1
        out.append(tuple(e))
    return out


def middle_terms_oracle(a_factors: list[int], b_factors: list[int],
                        modulus: int = 0) -> set[tuple[int, ...]]:
    """Isomorphism types of middle terms of all extensions of A by B.

    Each class representative is realized as an explicit presentation:
    generators of A (with relations twisted into B) plus generators of B.
    """
    grp = _FiniteGroup(list(b_factors))
    per_factor: list[list[tuple]] = []
    for d in a_factors:
        if modulus and d == modulus:
            per_factor.append([tuple(0 for _ in b_factors)])
            continue
        if modulus:
            cocycles = [x for x in grp.elements()
                        if all(((modulus // d) * xi) % f == 0
                               for xi, f in zip(x, grp.factors))]
        else:
            cocycles = list(grp.elements())
        boundary = grp.subgroup([grp.scale(d, e) for e in _unit_vectors(grp)])
        reps = []
        seen: set = set()
        for c in cocycles:
            cls = frozenset(tuple((a + b) % f for a, b, f in
                                  zip(c, bd, grp.factors)) for bd in boundary)
            if cls not in seen:
                seen.add(cls)
                reps.append(c)
        per_factor.append(reps)
    out: set[tuple[int, ...]] = set()
    ga, gb = len(a_factors), len(b_factors)
    for combo in product(*per_factor):
        rows = []
        for i, d in enumerate(a_factors):
            row = [0] * (ga + gb)
            row[i] = d
            for j, v in enumerate(combo[i]):
                row[ga + j] = -v
            rows.append(row)
        for j, e in enumerate(b_factors):
            row = [0] * (ga + gb)
            row[ga + j] = e
            rows.append(row)
        middle = FPModule.from_presentation(rows, gens=ga + gb, modulus=modulus)
        out.add(middle.invariants())
    return out


def hom_count_oracle(a_factors: list[int], b_factors: list[int]) -> int:
    """|Hom(A, B)| for finite abelian groups, counted by enumerating
    generator images with the order constraint checked elementwise."""
    total = 1
    for d in a_factors:
        count = 0
        for x in product(*[range(f) for f in b_factors]):
            if all((d * xi) % f == 0 for xi, f in zip(x, b_factors)):
                count += 1
        total *= count
    return total
