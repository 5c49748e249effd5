"""Finitely presented modules over Z and Z/N with exact homological toolkit.

An FPModule with g generators and relation rows R (over Z, plus N*I when
the modulus N is positive) is the quotient of Z^g by the row lattice of
its relations.  Elements are integer row vectors of length g; a morphism
is an integer matrix F acting by x -> x * F.

All submodule bookkeeping happens through row lattices in the ambient
generator space, so kernels, images, cokernels and exactness checks are
exact and deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

from .intlinalg import (
    hnf_rows,
    lattice_member,
    left_nullspace,
    mat_mul,
    smith_normal_form,
    solve_left,
)


_HNF_CACHE: dict = {}
_INV_CACHE: dict = {}


def canonical_invariants(factors: list[int], rank: int = 0) -> tuple[int, ...]:
    """Canonical invariant list: torsion d_1 | d_2 | ... (> 1), then 0 per free rank."""
    torsion = sorted(d for d in factors if d not in (0, 1))
    # resort into a divisibility chain via primary decomposition
    primary: dict[int, list[int]] = {}
    for d in torsion:
        m = d
        p = 2
        while p * p <= m:
            if m % p == 0:
                e = 0
                while m % p == 0:
                    m //= p
                    e += 1
                primary.setdefault(p, []).append(e)
            p += 1
        if m > 1:
            primary.setdefault(m, []).append(1)
    depth = max((len(v) for v in primary.values()), default=0)
    chain = []
    for i in range(depth):
        d = 1
        for p, exps in primary.items():
            exps_sorted = sorted(exps, reverse=True)
            if i < len(exps_sorted):
                d *= p ** exps_sorted[i]
        chain.append(d)
    chain.reverse()
    return tuple(chain) + (0,) * rank


@dataclass(frozen=True)
class FPModule:
    """Presentation of a module over Z (modulus 0) or Z/N (modulus N > 0)."""

    gens: int
    relations: tuple[tuple[int, ...], ...] = ()
    modulus: int = 0

    def __post_init__(self):
        if self.modulus < 0:
            raise ValueError("modulus must be nonnegative")
        for row in self.relations:
            if len(row) != self.gens:
                raise ValueError("relation width does not match generator count")
        if self.modulus:
            object.__setattr__(
                self,
                "relations",
                tuple(tuple(x % self.modulus for x in row) for row in self.relations),
            )

    @staticmethod
    def from_presentation(rows: list[list[int]], gens: int | None = None,
                          modulus: int = 0) -> "FPModule":
        g = gens if gens is not None else (len(rows[0]) if rows else 0)
        return FPModule(gens=g, relations=tuple(tuple(r) for r in rows), modulus=modulus)

    @staticmethod
    def from_invariants(factors: list[int] | tuple[int, ...], modulus: int = 0) -> "FPModule":
        """Direct sum of cyclic modules Z/d (d = 0 meaning a free summand)."""
        g = len(factors)
        rows = []
        for i, d in enumerate(factors):
            if d != 0:
                row = [0] * g
                row[i] = d
                rows.append(row)
        return FPModule.from_presentation(rows, gens=g, modulus=modulus)

    @staticmethod
    def zero(modulus: int = 0) -> "FPModule":
        return FPModule(gens=0, relations=(), modulus=modulus)

    # -- lattice of relations ------------------------------------------------

    def relation_rows(self) -> list[list[int]]:
        rows = [list(r) for r in self.relations]
        if self.modulus:
            for i in range(self.gens):
                row = [0] * self.gens
                row[i] = self.modulus
                rows.append(row)
        return rows

    def relation_hnf(self) -> list[list[int]]:
        key = (self.gens, self.relations, self.modulus)
        cached = _HNF_CACHE.get(key)
        if cached is None:
            cached = hnf_rows(self.relation_rows())
            _HNF_CACHE[key] = cached
        return cached

    # -- structure -----------------------------------------------------------

    def invariants(self) -> tuple[int, ...]:
        """Cyclic decomposition: torsion orders in a divisibility chain, 0 = free."""
        key = (self.gens, self.relations, self.modulus)
        cached = _INV_CACHE.get(key)
        if cached is not None:
            return cached
        rows = self.relation_rows()
        if not rows:
            result = (0,) * self.gens
        else:
            res = smith_normal_form(rows)
            nz = [d for d in res.factors if d != 0]
            rank = self.gens - len(nz)
            result = canonical_invariants(nz, rank)
        _INV_CACHE[key] = result
        return result

    def order(self) -> int | None:
        """Number of elements, or None when infinite."""
        n = 1
        for d in self.invariants():
            if d == 0:
                return None
            n *= d
        return n

    def is_zero(self) -> bool:
        return self.invariants() == ()

    def element_reduce(self, x: list[int]) -> list[int]:
        """Canonical representative of x modulo the relation lattice."""
        basis = self.relation_hnf()
        v = list(x)
        for row in basis:
            lead = next(j for j in range(self.gens) if row[j] != 0)
            q = v[lead] // row[lead]
            if q:
                v = [v[j] - q * row[j] for j in range(self.gens)]
        return v

    def elements(self) -> list[tuple[int, ...]]:
        """All elements as reduced vectors (finite modules only)."""
        if self.order() is None:
            raise ValueError("module is infinite")
        seen: set[tuple[int, ...]] = set()
        frontier = [tuple([0] * self.gens)]
        seen.add(frontier[0])
        while frontier:
            cur = frontier.pop()
            for i in range(self.gens):
                nxt = list(cur)
                nxt[i] += 1
                red = tuple(self.element_reduce(nxt))
                if red not in seen:
                    seen.add(red)
                    frontier.append(red)
        return sorted(seen)


@dataclass(frozen=True)
class Morphism:
    """Module map source -> target given on generators by the rows of ``matrix``."""

    source: FPModule
    target: FPModule
    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        m = [list(r) for r in self.matrix]
        if len(m) != self.source.gens:
            raise ValueError("matrix row count must equal source generator count")
        for row in m:
            if len(row) != self.target.gens:
                raise ValueError("matrix width must equal target generator count")

    @staticmethod
    def make(source: FPModule, target: FPModule, rows: list[list[int]]) -> "Morphism":
        return Morphism(source, target, tuple(tuple(r) for r in rows))

    @staticmethod
    def identity(m: FPModule) -> "Morphism":
        return Morphism.make(m, m, [[1 if i == j else 0 for j in range(m.gens)]
                                    for i in range(m.gens)])

    @staticmethod
    def multiplication(m: FPModule, scalar: int) -> "Morphism":
        return Morphism.make(m, m, [[scalar if i == j else 0 for j in range(m.gens)]
                                    for i in range(m.gens)])

    @staticmethod
    def zero_map(source: FPModule, target: FPModule) -> "Morphism":
        return Morphism.make(source, target,
                             [[0] * target.gens for _ in range(source.gens)])

    def mat(self) -> list[list[int]]:
        return [list(r) for r in self.matrix]

    def is_well_defined(self) -> bool:
        """Every source relation must map into the target relation lattice."""
        tgt = self.target.relation_hnf()
        for rel in self.source.relations:
            img = [sum(rel[i] * self.matrix[i][j] for i in range(self.source.gens))
                   for j in range(self.target.gens)]
            if not lattice_member(tgt, img):
                return False
        if self.source.modulus:
            for i in range(self.source.gens):
                img = [self.source.modulus * x for x in self.matrix[i]]
                if not lattice_member(tgt, img):
                    return False
        return True

    def compose(self, then: "Morphism") -> "Morphism":
        if self.target.gens != then.source.gens:
            raise ValueError("composition mismatch")
        return Morphism.make(self.source, then.target, mat_mul(self.mat(), then.mat()))

    def equals(self, other: "Morphism") -> bool:
        if self.source.gens != other.source.gens or self.target.gens != other.target.gens:
            return False
        tgt = self.target.relation_hnf()
        for i in range(self.source.gens):
            diff = [self.matrix[i][j] - other.matrix[i][j] for j in range(self.target.gens)]
            if not lattice_member(tgt, diff):
                return False
        return True

    # -- homological toolkit -------------------------------------------------

    def _preimage_lattice(self) -> list[list[int]]:
        """Rows spanning {x in Z^g : x*F lies in the target relation lattice}."""
        f = self.mat()
        tgt_rel = self.target.relation_rows()
        stacked = f + tgt_rel
        if not stacked or self.target.gens == 0:
            return [[1 if i == j else 0 for j in range(self.source.gens)]
                    for i in range(self.source.gens)]
        null = left_nullspace(stacked)
        out = [v[: self.source.gens] for v in null]
        return hnf_rows(out) if out else []

    def kernel(self) -> tuple[FPModule, "Morphism"]:
        """Kernel as (module, inclusion into source)."""
        pre = self._preimage_lattice()
        # relations among the kernel generators: combos landing in source relations
        src_rel = self.source.relation_rows()
        if pre:
            stacked = pre + src_rel
            null = left_nullspace(stacked)
            rel = [v[: len(pre)] for v in null]
        else:
            rel = []
        ker = FPModule.from_presentation(rel, gens=len(pre), modulus=self.source.modulus)
        incl = Morphism.make(ker, self.source, pre if pre else [])
        return ker, incl

    def image(self) -> tuple[FPModule, "Morphism"]:
        """Image as (module presented on the source generators, inclusion into target)."""
        pre = self._preimage_lattice()
        img = FPModule.from_presentation(pre, gens=self.source.gens,
                                         modulus=self.target.modulus)
        incl = Morphism.make(img, self.target, self.mat())
        return img, incl

    def image_lattice(self) -> list[list[int]]:
        """Row lattice of the image inside the target, including target relations."""
        return hnf_rows(self.mat() + self.target.relation_rows())

    def cokernel(self) -> FPModule:
        rows = self.mat() + [list(r) for r in self.target.relations]
        return FPModule.from_presentation(rows, gens=self.target.gens,
                                          modulus=self.target.modulus)

    def is_injective(self) -> bool:
        ker, _ = self.kernel()
        return ker.is_zero()

    def is_surjective(self) -> bool:
        return self.cokernel().is_zero()

    def is_zero_morphism(self) -> bool:
        tgt = self.target.relation_hnf()
        return all(lattice_member(tgt, list(row)) for row in self.matrix)

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.is_surjective()


def direct_sum(*mods: FPModule) -> FPModule:
    modulus = mods[0].modulus if mods else 0
    for m in mods:
        if m.modulus != modulus:
            raise ValueError("direct sum over mixed moduli")
    gens = sum(m.gens for m in mods)
    rows = []
    off = 0
    for m in mods:
        for rel in m.relations:
            row = [0] * gens
            row[off: off + m.gens] = list(rel)
            rows.append(row)
        off += m.gens
    return FPModule.from_presentation(rows, gens=gens, modulus=modulus)


def direct_sum_maps(maps: list[Morphism]) -> Morphism:
    """Block-diagonal morphism between the direct sums of sources and targets."""
    src = direct_sum(*[f.source for f in maps])
    tgt = direct_sum(*[f.target for f in maps])
    rows = [[0] * tgt.gens for _ in range(src.gens)]
    roff = 0
    coff = 0
    for f in maps:
        for i in range(f.source.gens):
            for j in range(f.target.gens):
                rows[roff + i][coff + j] = f.matrix[i][j]
        roff += f.source.gens
        coff += f.target.gens
    return Morphism.make(src, tgt, rows)


def factor_through_submodule(vectors: list[list[int]], sub_gens: list[list[int]],
                             ambient: FPModule) -> list[list[int]] | None:
    """Express each vector as a combination of sub_gens modulo ambient relations.

    Returns the coefficient matrix, or None if some vector is outside the
    submodule spanned by sub_gens (plus relations).
    """
    rel = ambient.relation_rows()
    stacked = sub_gens + rel
    out = []
    for v in vectors:
        if not stacked:
            if any(v):
                return None
            out.append([])
            continue
        sol = solve_left(stacked, v)
        if sol is None:
            return None
        out.append(sol[: len(sub_gens)])
    return out


def submodules_equal(a_rows: list[list[int]], b_rows: list[list[int]],
                     ambient: FPModule) -> bool:
    """Equality of submodules of ``ambient`` spanned by the given row sets."""
    rel = ambient.relation_rows()
    la = hnf_rows(a_rows + rel)
    lb = hnf_rows(b_rows + rel)
    return la == lb


def is_exact_pair(f: Morphism, g: Morphism) -> bool:
    """Exactness of  . --f--> M --g--> .  at M (image of f equals kernel of g)."""
    if f.target.gens != g.source.gens:
        raise ValueError("maps are not composable around a joint")
    img = f.mat()
    ker = g._preimage_lattice()
    return submodules_equal(img, ker, f.target)


def short_exact(f: Morphism, g: Morphism) -> bool:
    """Is 0 -> A --f--> B --g--> C -> 0 exact?"""
    return (f.is_well_defined() and g.is_well_defined()
            and f.is_injective() and g.is_surjective() and is_exact_pair(f, g))


def isomorphic(a: FPModule, b: FPModule) -> bool:
    return a.invariants() == b.invariants()
