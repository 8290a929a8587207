"""Chevalley basis structure constants and the adjoint representation.

Basis ordering everywhere: ``H_1 .. H_n`` (indices ``0..n-1``), then ``X_alpha``
for the roots in root order (index ``n + k`` for ``system.roots[k]``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from .errors import RingMismatch, SignFixFailed
from .linalg import Matrix
from .rings import InvolutiveRing, RingElement
from .roots import DiagramPermutation, Root, RootSystem, classify_orbits, colex_less

__all__ = [
    "StructureTable",
    "compute_structure_constants",
    "raw_rho_signs",
    "fix_signs_for_rho",
    "LieVector",
    "bracket",
    "ad_matrix",
]


@dataclass(frozen=True)
class StructureTable:
    system: RootSystem
    N: dict[tuple[Root, Root], int] = field(repr=False)
    rho: DiagramPermutation | None = None
    epsilon: dict[Root, int] | None = field(default=None, repr=False)

    @property
    def rank(self) -> int:
        return self.system.rank

    @property
    def dim(self) -> int:
        return self.system.dim

    def root_index(self, alpha: Root) -> int:
        return self.system.rank + self.system.index[alpha]

    def basis_label(self, k: int) -> str:
        n = self.system.rank
        if k < n:
            return f"H{k + 1}"
        return "X" + self.system.root_str(self.system.roots[k - n])

    @cached_property
    def basis_brackets(self) -> dict[tuple[int, int], tuple[tuple[int, int], ...]]:
        """[b_i, b_j] as ((k, integer coefficient), ...), nonzero pairs only."""
        S = self.system
        n = S.rank
        out: dict[tuple[int, int], tuple[tuple[int, int], ...]] = {}
        for a_idx, alpha in enumerate(S.roots):
            ka = n + a_idx
            for i in range(n):
                c = S.pairing(alpha, i)
                if c:
                    out[(i, ka)] = ((ka, c),)
                    out[(ka, i)] = ((ka, -c),)
            for b_idx, beta in enumerate(S.roots):
                kb = n + b_idx
                s = S.add(alpha, beta)
                if not any(s):
                    out[(ka, kb)] = tuple((i, c) for i, c in enumerate(alpha) if c)
                elif s in S.index:
                    out[(ka, kb)] = ((n + S.index[s], self.N[(alpha, beta)]),)
        return out

    @cached_property
    def ad_basis(self) -> list[dict[tuple[int, int], int]]:
        """Integer matrix entries {(row, col): c} of ad(b_k) for every basis vector."""
        mats: list[dict[tuple[int, int], int]] = [{} for _ in range(self.dim)]
        for (i, j), terms in self.basis_brackets.items():
            for k, c in terms:
                mats[i][(k, j)] = c
        return mats

    def rho_on_basis(self) -> tuple[list[int], list[int]]:
        """(perm, signs) with rho(b_j) = signs[j] * b_{perm[j]}."""
        if self.rho is None or self.epsilon is None:
            raise ValueError("structure table carries no diagram involution")
        S = self.system
        n = S.rank
        perm = [self.rho.perm[i] for i in range(n)]
        signs = [1] * n
        for alpha in S.roots:
            perm.append(n + S.index[self.rho(alpha)])
            signs.append(self.epsilon[alpha])
        return perm, signs


def compute_structure_constants(system: RootSystem) -> StructureTable:
    """N_{alpha,beta} by induction on height, with N = +1 on extraspecial pairs.

    Special pairs (alpha, beta): both positive, alpha + beta a root, alpha
    before beta in colex order.  The extraspecial pair of xi is the special pair
    with the least alpha.  Every other N follows from the standard relations
    N_{a,b} = N_{b,c} = N_{c,a} (a+b+c = 0), N_{-a,-b} = -N_{a,b} and the
    four-root relation.
    """
    S = system
    positive = set(S.positive)
    special: dict[tuple[Root, Root], int] = {}

    def n_positive(x: Root, y: Root) -> int:
        if colex_less(x, y):
            return special[(x, y)]
        return -special[(y, x)]

    def n_any(a: Root, b: Root) -> int:
        c = S.neg(S.add(a, b))
        for x, y in ((a, b), (b, c), (c, a)):
            px, py = x in positive, y in positive
            if px and py:
                return n_positive(x, y)
            if not px and not py:
                return -n_positive(S.neg(x), S.neg(y))
        raise AssertionError("a zero-sum triple of roots always has a same-sign pair")

    by_height = sorted((xi for xi in S.positive if sum(xi) > 1), key=sum)
    for xi in by_height:
        pairs = []
        for alpha in S.positive:
            beta = tuple(x - a for x, a in zip(xi, alpha))
            if beta in positive and colex_less(alpha, beta):
                pairs.append((alpha, beta))
        pairs.sort(key=lambda ab: tuple(reversed(ab[0])))
        a1, b1 = pairs[0]
        special[(a1, b1)] = 1
        for alpha, beta in pairs[1:]:
            total = 0
            if S.is_root(tuple(b - a for a, b in zip(a1, beta))):
                total += n_any(beta, S.neg(a1)) * n_any(alpha, S.neg(b1))
            if S.is_root(tuple(x - a for a, x in zip(a1, alpha))):
                total += n_any(S.neg(a1), alpha) * n_any(beta, S.neg(b1))
            if total not in (1, -1):
                raise AssertionError(f"structure constant for {alpha},{beta} came out as {total}")
            special[(alpha, beta)] = total

    N: dict[tuple[Root, Root], int] = {}
    for alpha in S.roots:
        for beta in S.roots:
            if S.is_root(S.add(alpha, beta)):
                N[(alpha, beta)] = n_any(alpha, beta)
    return StructureTable(S, N)


def raw_rho_signs(table: StructureTable, rho: DiagramPermutation) -> dict[Root, int]:
    """epsilon_alpha for the automorphism with rho(X_{+-alpha_i}) = X_{+-rho(alpha_i)}."""
    S = table.system
    eps: dict[Root, int] = {}
    for sign in (1, -1):
        for xi in sorted(S.positive, key=sum):
            root = tuple(sign * c for c in xi)
            if sum(xi) == 1:
                eps[root] = 1
                continue
            i = next(i for i, c in enumerate(xi) if c and S.is_root(tuple(x - (1 if j == i else 0) for j, x in enumerate(xi))))
            simple = tuple(sign * (1 if j == i else 0) for j in range(S.rank))
            rest = tuple(r - s for r, s in zip(root, simple))
            eps[root] = table.N[(simple, rest)] * eps[rest] * table.N[(rho(simple), rho(rest))]
    return eps


def fix_signs_for_rho(table: StructureTable, rho: DiagramPermutation) -> StructureTable:
    """Rescale X_alpha -> +-X_alpha so that rho(X_alpha) = eps_alpha X_{rho(alpha)} with
    eps = -1 exactly on the rho-fixed middle roots of A2 classes and +1 elsewhere.

    Within each swapped pair only the non-representative member is rescaled
    (and its negative with it, so [X_alpha, X_{-alpha}] = H_alpha survives).
    """
    S = table.system
    if rho.order != 2 or not rho.preserves(S):
        raise SignFixFailed("rho must be an order-2 diagram automorphism")
    eps = raw_rho_signs(table, rho)
    classes = classify_orbits(S, rho)
    target = {alpha: 1 for alpha in S.roots}
    for cls in classes:
        if cls.kind == "A2":
            target[cls.middle] = -1
    scale = {alpha: 1 for alpha in S.roots}
    for cls in classes:
        if not cls.is_positive:
            continue
        for member in cls.members:
            if rho(member) == member and eps[member] != target[member]:
                raise SignFixFailed(f"rho-fixed root {member} has intrinsic sign {eps[member]}")
        if cls.kind in ("A1Sq", "A2"):
            alpha, beta = cls.members[0], cls.members[1]
            s = eps[alpha] * target[alpha]
            if eps[S.neg(alpha)] != eps[alpha]:
                raise SignFixFailed(f"eps differs on {alpha} and its negative")
            scale[beta] = s
            scale[S.neg(beta)] = s
    N = {(a, b): scale[a] * scale[b] * scale[S.add(a, b)] * v for (a, b), v in table.N.items()}
    fixed = StructureTable(S, N)
    new_eps = raw_rho_signs(fixed, rho)
    if new_eps != target:
        bad = [a for a in S.roots if new_eps[a] != target[a]]
        raise SignFixFailed(f"sign constraints unsatisfied on {bad[:3]}")
    return StructureTable(S, N, rho, new_eps)


# ---------------------------------------------------------------------------
# Lie algebra elements


class LieVector:
    """Element of L(Phi, R) in Chevalley coordinates (sparse)."""

    __slots__ = ("table", "ring", "coeffs")

    def __init__(self, table: StructureTable, ring: InvolutiveRing, coeffs: dict[int, RingElement] | None = None):
        self.table = table
        self.ring = ring
        self.coeffs = {k: v for k, v in (coeffs or {}).items() if v}

    @classmethod
    def basis(cls, table, ring, k: int, coeff=1) -> LieVector:
        return cls(table, ring, {k: ring.coerce(coeff)})

    @classmethod
    def H(cls, table, ring, i: int, coeff=1) -> LieVector:
        """H_{alpha_i}; ``i`` is 0-based."""
        return cls.basis(table, ring, i, coeff)

    @classmethod
    def H_root(cls, table, ring, alpha: Root, coeff=1) -> LieVector:
        """H_alpha = sum c_i H_i for alpha = sum c_i alpha_i."""
        c = ring.coerce(coeff)
        return cls(table, ring, {i: c * a for i, a in enumerate(alpha) if a})

    @classmethod
    def X(cls, table, ring, alpha: Root, coeff=1) -> LieVector:
        return cls.basis(table, ring, table.root_index(alpha), coeff)

    @property
    def cartan(self) -> list[RingElement]:
        z = self.ring.zero
        return [self.coeffs.get(i, z) for i in range(self.table.rank)]

    @property
    def root_part(self) -> dict[Root, RingElement]:
        n = self.table.rank
        roots = self.table.system.roots
        return {roots[k - n]: v for k, v in self.coeffs.items() if k >= n}

    def _check(self, other: LieVector):
        if other.ring is not self.ring or other.table is not self.table:
            raise RingMismatch("Lie vectors over different rings or tables")

    def __add__(self, other: LieVector) -> LieVector:
        self._check(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out[k] + v if k in out else v
        return LieVector(self.table, self.ring, out)

    def __neg__(self) -> LieVector:
        return LieVector(self.table, self.ring, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other: LieVector) -> LieVector:
        return self + (-other)

    def __mul__(self, c) -> LieVector:
        c = self.ring.coerce(c)
        return LieVector(self.table, self.ring, {k: c * v for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, LieVector):
            return NotImplemented
        return self.ring is other.ring and self.table is other.table and self.coeffs == other.coeffs

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.coeffs

    def dense(self) -> list[RingElement]:
        z = self.ring.zero
        return [self.coeffs.get(k, z) for k in range(self.table.dim)]

    def map(self, f) -> LieVector:
        return LieVector(self.table, self.ring, {k: f(v) for k, v in self.coeffs.items()})

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k in sorted(self.coeffs):
            v = str(self.coeffs[k])
            label = self.table.basis_label(k)
            parts.append(label if v == "1" else f"-{label}" if v == "-1" else f"({v}){label}")
        return " + ".join(parts)

    __repr__ = __str__

    def to_json(self) -> dict[str, str]:
        return {self.table.basis_label(k): str(self.coeffs[k]) for k in sorted(self.coeffs)}


def bracket(x: LieVector, y: LieVector) -> LieVector:
    x._check(y)
    table = x.table
    br = table.basis_brackets
    out: dict[int, RingElement] = {}
    for i, a in x.coeffs.items():
        for j, b in y.coeffs.items():
            terms = br.get((i, j))
            if not terms:
                continue
            ab = a * b
            for k, c in terms:
                t = ab * c
                out[k] = out[k] + t if k in out else t
    return LieVector(table, x.ring, out)


def ad_matrix(x: LieVector) -> Matrix:
    """Matrix of ad(x) in the Chevalley basis: column j is [x, b_j]."""
    table, ring = x.table, x.ring
    n = table.dim
    rows: list[dict[int, RingElement]] = [{} for _ in range(n)]
    for i, a in x.coeffs.items():
        for (r, c), v in table.ad_basis[i].items():
            t = a * v
            row = rows[r]
            row[c] = row[c] + t if c in row else t
    rows = [{c: v for c, v in row.items() if v} for row in rows]
    return Matrix(ring, n, n, rows)


def integer_ad_matrix(table: StructureTable, k: int, ring: InvolutiveRing) -> Matrix:
    """ad(b_k) coerced into ``ring``."""
    n = table.dim
    return Matrix.from_entries(ring, n, n, table.ad_basis[k])


def rho_on_vector(table: StructureTable, x: LieVector) -> LieVector:
    perm, signs = table.rho_on_basis()
    return LieVector(table, x.ring, {perm[k]: (v if signs[k] == 1 else -v) for k, v in x.coeffs.items()})


def jacobi_defect(table: StructureTable, i: int, j: int, k: int) -> dict[int, int]:
    """[b_i,[b_j,b_k]] + [b_j,[b_k,b_i]] + [b_k,[b_i,b_j]] with integer coefficients."""
    br = table.basis_brackets
    out: dict[int, int] = {}

    def add_nested(a, b, c):
        for m, cm in br.get((b, c), ()):
            for t, ct in br.get((a, m), ()):
                out[t] = out.get(t, 0) + cm * ct

    add_nested(i, j, k)
    add_nested(j, k, i)
    add_nested(k, i, j)
    return {t: v for t, v in out.items() if v}


def rho_automorphism_defects(table: StructureTable) -> list[tuple[int, int]]:
    """Basis pairs (i, j) where rho[b_i, b_j] != [rho b_i, rho b_j]."""
    perm, signs = table.rho_on_basis()
    br = table.basis_brackets
    bad = []
    d = table.dim
    for i in range(d):
        for j in range(d):
            lhs = {perm[k]: signs[k] * c for k, c in br.get((i, j), ())}
            rhs = {k: signs[i] * signs[j] * c for k, c in br.get((perm[i], perm[j]), ())}
            if lhs != rhs:
                bad.append((i, j))
    return bad
