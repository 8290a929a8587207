"""Elementary generators, torus elements and sigma on adjoint group elements."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

from .chevalley import StructureTable
from .errors import NoHalf, NotInvertible, ParamConstraintViolated, RingMismatch
from .linalg import Matrix
from .rings import InvolutiveRing, RingElement
from .roots import Root, TwistedClass, classify_orbits

__all__ = [
    "GroupElement",
    "Character",
    "exp_root",
    "twisted_generator",
    "w_and_h",
    "torus_element",
    "sigma_on_group",
    "is_self_conjugate",
    "conjugate_character",
    "evaluate_word",
    "declared_parameters",
    "declared_generators",
]

# Word tokens:
#   ("x", alpha, t)           x_alpha(t)
#   ("xc", cls, t, u)         x_[alpha](t) or x_[alpha](t, u); u is None unless A2
#   ("w", alpha, t)           w_alpha(t)
#   ("h", values)             h(chi)
#   ("sigma", word)           sigma applied to the element a word evaluates to


@dataclass(frozen=True, eq=False)
class GroupElement:
    matrix: Matrix
    word: tuple = field(default=())
    table: StructureTable | None = field(default=None, repr=False)

    @property
    def ring(self) -> InvolutiveRing:
        return self.matrix.ring

    def __mul__(self, other: GroupElement) -> GroupElement:
        return GroupElement(self.matrix * other.matrix, self.word + other.word, self.table or other.table)

    def inverse(self) -> GroupElement:
        return GroupElement(self.matrix.inverse(), tuple(_token_inverse(tok) for tok in reversed(self.word)), self.table)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.matrix == other.matrix

    __hash__ = None

    def conjugate(self, M: Matrix, inverse: Matrix | None = None) -> Matrix:
        """g M g^{-1}."""
        inverse = inverse if inverse is not None else self.matrix.inverse()
        return self.matrix * M * inverse

    def is_identity(self) -> bool:
        return self.matrix.is_identity()


def _token_inverse(tok):
    kind = tok[0]
    if kind == "x":
        return ("x", tok[1], -tok[2])
    if kind == "xc":
        cls, t, u = tok[1], tok[2], tok[3]
        return ("xc", cls, -t, None if u is None else u.bar())
    if kind == "w":
        return ("w", tok[1], -tok[2])
    if kind == "h":
        return ("h", tuple(v.inverse() for v in tok[1]))
    if kind == "sigma":
        return ("sigma", tuple(_token_inverse(t) for t in reversed(tok[1])))
    raise ValueError(f"unknown token {tok!r}")


def _ad_square(table: StructureTable, k: int) -> dict[tuple[int, int], int]:
    cache = table.__dict__.setdefault("_ad_square_cache", {})
    if k not in cache:
        A = table.ad_basis[k]
        by_row: dict[int, list[tuple[int, int]]] = {}
        for (r, c), v in A.items():
            by_row.setdefault(r, []).append((c, v))
        sq: dict[tuple[int, int], int] = {}
        for (r, c), v in A.items():
            for c2, w in by_row.get(c, ()):
                sq[(r, c2)] = sq.get((r, c2), 0) + v * w
        cache[k] = {key: v for key, v in sq.items() if v}
    return cache[k]


def _exp_matrix(table: StructureTable, alpha: Root, t: RingElement) -> Matrix:
    ring = t.ring
    if not ring.has_half:
        raise NoHalf(f"x_alpha(t) needs 1/2 in {ring.descriptor}")
    k = table.root_index(alpha)
    n = table.dim
    rows: list[dict[int, RingElement]] = [{i: ring.one} for i in range(n)]
    if t:
        for (r, c), v in table.ad_basis[k].items():
            row = rows[r]
            row[c] = row[c] + t * v if c in row else t * v
        half_t2 = t * t * ring.coerce(1) / 2
        for (r, c), v in _ad_square(table, k).items():
            row = rows[r]
            row[c] = row[c] + half_t2 * v if c in row else half_t2 * v
        rows = [{c: v for c, v in row.items() if v} for row in rows]
    return Matrix(ring, n, n, rows)


def exp_root(table: StructureTable, alpha: Root, t) -> GroupElement:
    """x_alpha(t) = 1 + t ad(X_alpha) + t^2 ad(X_alpha)^2 / 2."""
    if not isinstance(t, RingElement):
        raise RingMismatch("exp_root needs a ring element parameter")
    return GroupElement(_exp_matrix(table, alpha, t), (("x", alpha, t),), table)


def _check_params(cls: TwistedClass, t: RingElement, u: RingElement | None):
    if cls.kind == "A1":
        if u is not None:
            raise ParamConstraintViolated("A1 classes take a single parameter")
        if t.bar() != t:
            raise ParamConstraintViolated(f"A1 parameter {t} is not theta-fixed")
    elif cls.kind == "A1Sq":
        if u is not None:
            raise ParamConstraintViolated("A1Sq classes take a single parameter")
    else:
        if u is None:
            raise ParamConstraintViolated("A2 classes take two parameters (t, u)")
        if u + u.bar() != t * t.bar():
            raise ParamConstraintViolated(f"A2 parameters violate u + theta(u) = t theta(t): t={t}, u={u}")


def _twisted_matrix(table: StructureTable, cls: TwistedClass, t: RingElement, u: RingElement | None) -> Matrix:
    alpha = cls.representative
    M = _exp_matrix(table, alpha, t)
    if cls.kind == "A1":
        return M
    M = M * _exp_matrix(table, cls.bar, t.bar())
    if cls.kind == "A2":
        M = M * _exp_matrix(table, cls.middle, u * table.N[(cls.bar, alpha)])
    return M


def twisted_generator(table: StructureTable, cls: TwistedClass, t, u=None, check: bool = True) -> GroupElement:
    """x_[alpha](t) = x_alpha(t) x_abar(theta t); for A2 classes
    x_[alpha](t, u) = x_alpha(t) x_abar(theta t) x_{alpha+abar}(N_{abar,alpha} u)."""
    ring = t.ring
    if u is not None:
        u = ring.coerce(u)
    if check:
        _check_params(cls, t, u)
    return GroupElement(_twisted_matrix(table, cls, t, u), (("xc", cls, t, u),), table)


def w_and_h(table: StructureTable, alpha: Root, t) -> tuple[GroupElement, GroupElement]:
    ring = t.ring
    t_inv = t.inverse()
    neg = tuple(-c for c in alpha)

    def w(s, s_inv):
        return _exp_matrix(table, alpha, s) * _exp_matrix(table, neg, -s_inv) * _exp_matrix(table, alpha, s)

    one = ring.one
    w_t = w(t, t_inv)
    w_1_inv = w(-one, -one)  # w_alpha(1)^{-1} = w_alpha(-1)
    h = w_t * w_1_inv
    return (
        GroupElement(w_t, (("w", alpha, t),), table),
        GroupElement(h, (("w", alpha, t), ("w", alpha, -one)), table),
    )


@dataclass(frozen=True)
class Character:
    """chi on the root lattice, given by its values on the simple roots."""

    values: tuple[RingElement, ...]

    def __post_init__(self):
        for v in self.values:
            if not v.is_unit():
                raise NotInvertible(f"character value {v} is not a unit")

    @classmethod
    def trivial(cls, ring: InvolutiveRing, rank: int) -> Character:
        return cls(tuple(ring.one for _ in range(rank)))

    @classmethod
    def coroot(cls, table: StructureTable, alpha: Root, t: RingElement) -> Character:
        """chi_{alpha,t}: lambda -> t^{<lambda, alpha>}."""
        S = table.system
        return cls(tuple(t ** S.inner(s, alpha) for s in S.simple))

    def __call__(self, beta: Root) -> RingElement:
        ring = self.values[0].ring
        out = ring.one
        for v, c in zip(self.values, beta):
            if c:
                out = out * v**c
        return out

    def __mul__(self, other: Character) -> Character:
        return Character(tuple(a * b for a, b in zip(self.values, other.values)))


def torus_element(table: StructureTable, chi: Character) -> GroupElement:
    ring = chi.values[0].ring
    n = table.rank
    rows: list[dict[int, RingElement]] = [{i: ring.one} for i in range(n)]
    for beta in table.system.roots:
        rows.append({table.root_index(beta): chi(beta)})
    return GroupElement(Matrix(ring, table.dim, table.dim, rows), (("h", chi.values),), table)


def conjugate_character(table: StructureTable, chi: Character) -> Character:
    """chi_bar(lambda) = theta(chi(rho^{-1} lambda))."""
    perm = table.rho.perm
    inv = [0] * len(perm)
    for i, j in enumerate(perm):
        inv[j] = i
    return Character(tuple(chi.values[inv[i]].bar() for i in range(len(perm))))


def is_self_conjugate(table: StructureTable, chi: Character) -> bool:
    perm = table.rho.perm
    return all(chi.values[perm[i]] == chi.values[i].bar() for i in range(len(perm)))


def sigma_matrix(table: StructureTable, M: Matrix) -> Matrix:
    perm, signs = table.rho_on_basis()
    return M.bar().conjugate_signed_permutation(perm, signs)


def sigma_on_group(g: GroupElement, table: StructureTable | None = None) -> GroupElement:
    """sigma(g) = P theta(g) P^{-1} with P the signed permutation of rho on the basis."""
    table = table or g.table
    return GroupElement(sigma_matrix(table, g.matrix), (("sigma", g.word),), table)


def evaluate_word(table: StructureTable, ring: InvolutiveRing, word) -> Matrix:
    """Re-evaluate a provenance word into its matrix."""
    M = Matrix.identity(ring, table.dim)
    for tok in word:
        kind = tok[0]
        if kind == "x":
            M = M * _exp_matrix(table, tok[1], tok[2])
        elif kind == "xc":
            M = M * _twisted_matrix(table, tok[1], tok[2], tok[3])
        elif kind == "w":
            M = M * w_and_h(table, tok[1], tok[2])[0].matrix
        elif kind == "h":
            M = M * torus_element(table, Character(tok[1])).matrix
        elif kind == "sigma":
            M = M * sigma_matrix(table, evaluate_word(table, ring, tok[1]))
        else:
            raise ValueError(f"unknown token {tok!r}")
    return M


def declared_parameters(cls: TwistedClass, ring: InvolutiveRing) -> list[tuple[RingElement, RingElement | None]]:
    """The finite parameter set whose generators drive the generation and
    normalizer checks, one entry per term of the recovery formulas."""
    one = ring.one
    if cls.kind == "A1":
        return [(one, None)]
    a = ring.antifixed_unit()
    if cls.kind == "A1Sq":
        return [(one, None), (a, None)]
    half = one / 2
    return [
        (one, half),
        (one * 2, one * 2),
        (a, -(a * a) * half),
        (a * 2, -(a * a) * 2),
        (ring.zero, a),
    ]


def declared_generators(table: StructureTable, ring: InvolutiveRing) -> list[GroupElement]:
    """Generators x_[alpha](params) over every class and every declared parameter."""
    out = []
    for cls in classify_orbits(table.system, table.rho):
        for t, u in declared_parameters(cls, ring):
            out.append(twisted_generator(table, cls, t, u))
    return out


def word_product(elements) -> GroupElement:
    return reduce(lambda x, y: x * y, elements)
