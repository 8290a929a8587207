"""The semi-automorphism sigma = rho o theta and the twisted basis of the
sigma-fixed subalgebra."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

from .chevalley import LieVector, StructureTable, compute_structure_constants, fix_signs_for_rho
from .errors import NoHalf, NoThird, NotInvertible, SingularBasis
from .linalg import Matrix
from .rings import InvolutiveRing, RingElement
from .roots import DiagramPermutation, RootSystem, TwistedClass, classify_orbits, standard_rho

__all__ = [
    "twisted_table",
    "SigmaAlgebraMap",
    "sigma_on_algebra",
    "TwistedBasisElement",
    "TwistedBasis",
    "twisted_basis",
    "coordinates_in_twisted_basis",
]


def twisted_table(system: RootSystem, rho: DiagramPermutation | None = None) -> StructureTable:
    """Sign-fixed structure table for ``system`` and ``rho`` (standard rho by default).

    Cached, so equal arguments return the identical table object."""
    return _twisted_table(system, rho or standard_rho(system.name))


@lru_cache(maxsize=None)
def _twisted_table(system: RootSystem, rho: DiagramPermutation) -> StructureTable:
    return fix_signs_for_rho(compute_structure_constants(system), rho)


@dataclass(frozen=True)
class SigmaAlgebraMap:
    table: StructureTable
    ring: InvolutiveRing

    @cached_property
    def _perm_signs(self):
        return self.table.rho_on_basis()

    def __call__(self, x: LieVector) -> LieVector:
        perm, signs = self._perm_signs
        out = {}
        for k, v in x.coeffs.items():
            w = v.bar()
            out[perm[k]] = w if signs[k] == 1 else -w
        return LieVector(x.table, x.ring, out)

    def matrix(self) -> tuple[list[int], list[int]]:
        """Signed permutation (perm, signs) such that sigma(v) = P theta(v)."""
        return self._perm_signs


def sigma_on_algebra(sigma: SigmaAlgebraMap, x: LieVector) -> LieVector:
    """sigma(r H_i) = theta(r) H_{rho(i)},  sigma(r X_alpha) = eps_alpha theta(r) X_{rho(alpha)}."""
    return sigma(x)


@dataclass(frozen=True)
class TwistedBasisElement:
    label: str
    vector: LieVector
    cls: TwistedClass | None = None
    simple_index: int | None = None

    def __str__(self) -> str:
        return f"{self.label} = {self.vector}"


def _element_label(kind: str, cls: TwistedClass) -> str:
    return f"{kind}{cls.label()}"


class TwistedBasis:
    """Ordered twisted basis together with the change-of-basis data."""

    def __init__(self, table: StructureTable, ring: InvolutiveRing, a: RingElement, elements: list[TwistedBasisElement]):
        self.table = table
        self.ring = ring
        self.a = a
        self.elements = elements
        self.sigma = SigmaAlgebraMap(table, ring)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, k):
        return self.elements[k]

    def by_label(self, label: str) -> TwistedBasisElement:
        for e in self.elements:
            if e.label == label:
                return e
        raise KeyError(label)

    @cached_property
    def change_matrix(self) -> Matrix:
        """Columns are the twisted basis vectors in Chevalley coordinates."""
        return Matrix.from_columns(self.ring, [e.vector.dense() for e in self.elements])

    @cached_property
    def inverse_change_matrix(self) -> Matrix:
        try:
            return self.change_matrix.inverse()
        except NotInvertible as exc:
            raise SingularBasis(str(exc)) from exc

    def coordinates(self, x: LieVector) -> list[RingElement]:
        C = self.inverse_change_matrix
        z = self.ring.zero
        out = []
        for row in C.rows:
            acc = z
            for j, v in row.items():
                c = x.coeffs.get(j)
                if c is not None:
                    acc = acc + v * c
            out.append(acc)
        return out

    def combine(self, coeffs) -> LieVector:
        acc = LieVector(self.table, self.ring)
        for c, e in zip(coeffs, self.elements):
            acc = acc + e.vector * c
        return acc


def twisted_basis(system: RootSystem, rho: DiagramPermutation | None, ring: InvolutiveRing, table: StructureTable | None = None) -> TwistedBasis:
    """X+, X-(I), X-(II) for every class, then H+, H- for every simple class."""
    if not ring.has_half:
        raise NoHalf(f"2 is not invertible in {ring.descriptor}")
    table = table or twisted_table(system, rho)
    rho = table.rho
    classes = classify_orbits(system, rho)
    if any(c.kind == "A2" for c in classes) and not ring.has_third:
        raise NoThird(f"3 is not invertible in {ring.descriptor}; {system.name} has A2 classes")
    a = ring.antifixed_unit()

    def X(root, c=1):
        return LieVector.X(table, ring, root, c)

    elements: list[TwistedBasisElement] = []
    for cls in classes:
        alpha, beta = cls.representative, cls.bar
        if cls.kind == "A1":
            elements.append(TwistedBasisElement(_element_label("Xplus", cls), X(alpha), cls))
            continue
        elements.append(TwistedBasisElement(_element_label("Xplus", cls), X(alpha) + X(beta), cls))
        elements.append(TwistedBasisElement(_element_label("XminusI", cls), (X(alpha) - X(beta)) * a, cls))
        if cls.kind == "A2":
            elements.append(TwistedBasisElement(_element_label("XminusII", cls), X(cls.middle, a), cls))
    for cls in classes:
        if not (cls.is_positive and cls.is_simple):
            continue
        i = cls.representative.index(1)
        j = rho.perm[i]
        Hi = LieVector.H(table, ring, i)
        if cls.kind == "A1":
            elements.append(TwistedBasisElement(_element_label("Hplus", cls), Hi, cls, i))
            continue
        Hj = LieVector.H(table, ring, j)
        elements.append(TwistedBasisElement(_element_label("Hplus", cls), Hi + Hj, cls, i))
        elements.append(TwistedBasisElement(_element_label("Hminus", cls), (Hi - Hj) * a, cls, i))
    return TwistedBasis(table, ring, a, elements)


def coordinates_in_twisted_basis(x: LieVector, basis: TwistedBasis | None = None) -> list[RingElement]:
    """Unique coefficients c with x = sum c_k e_k; all c_k lie in the fixed ring when x is sigma-fixed."""
    if basis is None:
        basis = twisted_basis(x.table.system, x.table.rho, x.ring, x.table)
    return basis.coordinates(x)
