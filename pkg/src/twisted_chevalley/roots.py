"""Simply-laced root systems, the diagram involution rho and twisted classes.

Roots are tuples of integer coordinates over the simple roots.  Root order:
positive roots first, sorted by height and then colexicographically (the
coefficient of the last simple root is most significant); negative roots
follow in the order of their negatives.  With this order the simple roots
alpha_1..alpha_n come first within their height.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import UnsupportedKind

Root = tuple[int, ...]

KINDS = ("A", "D", "E")


def cartan_matrix(kind: str, n: int) -> tuple[tuple[int, ...], ...]:
    """Cartan matrix in Bourbaki numbering (0-based indices)."""
    adjacency: list[tuple[int, int]] = []
    if kind == "A" and n >= 1:
        adjacency = [(i, i + 1) for i in range(n - 1)]
    elif kind == "D" and n >= 4:
        adjacency = [(i, i + 1) for i in range(n - 2)] + [(n - 3, n - 1)]
    elif kind == "E" and n == 6:
        # 1-3-4-5-6 chain with 2 attached to 4
        adjacency = [(0, 2), (2, 3), (3, 4), (4, 5), (1, 3)]
    else:
        raise UnsupportedKind(f"unsupported root system {kind}{n}")
    C = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
    for i, j in adjacency:
        C[i][j] = C[j][i] = -1
    return tuple(tuple(row) for row in C)


def height(root: Root) -> int:
    return sum(root)


def _order_key(root: Root):
    positive = sum(root) > 0
    base = root if positive else tuple(-c for c in root)
    return (0 if positive else 1, sum(base), tuple(reversed(base)))


def colex_less(alpha: Root, beta: Root) -> bool:
    """Total vector-space order: compare coordinates from the last simple root."""
    return tuple(reversed(alpha)) < tuple(reversed(beta))


@dataclass(frozen=True)
class RootSystem:
    kind: str
    rank: int
    cartan: tuple[tuple[int, ...], ...]
    roots: tuple[Root, ...]
    index: dict[Root, int] = field(compare=False, repr=False)

    @property
    def name(self) -> str:
        return f"{self.kind}{self.rank}"

    @property
    def simple(self) -> tuple[Root, ...]:
        n = self.rank
        return tuple(tuple(1 if j == i else 0 for j in range(n)) for i in range(n))

    @property
    def positive(self) -> tuple[Root, ...]:
        return self.roots[: len(self.roots) // 2]

    @property
    def dim(self) -> int:
        """Dimension of the Lie algebra: number of roots plus rank."""
        return len(self.roots) + self.rank

    def inner(self, alpha: Root, beta: Root) -> int:
        C = self.cartan
        return sum(a * C[i][j] * b for i, a in enumerate(alpha) if a for j, b in enumerate(beta) if b)

    def pairing(self, beta: Root, i: int) -> int:
        """<beta, alpha_i> (equal to the inner product since all roots have norm 2)."""
        return sum(c * self.cartan[j][i] for j, c in enumerate(beta) if c)

    def is_root(self, vec: Root) -> bool:
        return vec in self.index

    def add(self, alpha: Root, beta: Root) -> Root:
        return tuple(a + b for a, b in zip(alpha, beta))

    def neg(self, alpha: Root) -> Root:
        return tuple(-a for a in alpha)

    def is_positive(self, alpha: Root) -> bool:
        return sum(alpha) > 0

    def root_str(self, alpha: Root) -> str:
        return "(" + ",".join(str(c) for c in alpha) + ")"


def reflect(system: RootSystem, alpha: Root, beta: Root) -> Root:
    """w_alpha(beta) = beta - <beta, alpha> alpha."""
    k = system.inner(beta, alpha)
    return tuple(b - k * a for a, b in zip(alpha, beta))


_KIND_RE = re.compile(r"^\s*([ADE])\s*\(?\s*(\d+)\s*\)?\s*$", re.IGNORECASE)


def parse_kind(kind) -> tuple[str, int]:
    if isinstance(kind, tuple):
        letter, n = kind
    else:
        match = _KIND_RE.match(str(kind))
        if not match:
            raise UnsupportedKind(f"unsupported root system {kind!r}")
        letter, n = match.group(1), int(match.group(2))
    letter = letter.upper()
    if (letter == "A" and n >= 2) or (letter == "D" and n >= 4) or (letter == "E" and n == 6):
        return letter, n
    raise UnsupportedKind(f"unsupported root system {letter}{n}: expected A(n>=2), D(n>=4) or E6")


@lru_cache(maxsize=None)
def _build(letter: str, n: int) -> RootSystem:
    C = cartan_matrix(letter, n)
    simple = [tuple(1 if j == i else 0 for j in range(n)) for i in range(n)]
    found = set(simple)
    frontier = list(simple)
    while frontier:
        nxt = []
        for beta in frontier:
            for i in range(n):
                k = sum(c * C[j][i] for j, c in enumerate(beta))
                if k:
                    gamma = tuple(b - (k if j == i else 0) for j, b in enumerate(beta))
                    if gamma not in found:
                        found.add(gamma)
                        nxt.append(gamma)
        frontier = nxt
    roots = tuple(sorted(found, key=_order_key))
    return RootSystem(letter, n, C, roots, {r: i for i, r in enumerate(roots)})


def build_root_system(kind) -> RootSystem:
    """Root system of type ``"A3"``, ``("D", 4)``, ``"E6"`` ...; closure of the
    simple roots under simple reflections."""
    letter, n = parse_kind(kind)
    return _build(letter, n)


# ---------------------------------------------------------------------------
# diagram involution


@dataclass(frozen=True)
class DiagramPermutation:
    perm: tuple[int, ...]  # perm[i] = image of simple root i (0-based)

    def __post_init__(self):
        if sorted(self.perm) != list(range(len(self.perm))):
            raise ValueError("not a permutation")

    def __call__(self, alpha: Root) -> Root:
        out = [0] * len(alpha)
        for i, c in enumerate(alpha):
            out[self.perm[i]] = c
        return tuple(out)

    @property
    def order(self) -> int:
        k, p = 1, self.perm
        cur = p
        while cur != tuple(range(len(p))):
            cur = tuple(p[i] for i in cur)
            k += 1
        return k

    def cycles(self) -> list[tuple[int, ...]]:
        seen, out = set(), []
        for i in range(len(self.perm)):
            if i in seen:
                continue
            cyc = [i]
            seen.add(i)
            j = self.perm[i]
            while j != i:
                cyc.append(j)
                seen.add(j)
                j = self.perm[j]
            out.append(tuple(cyc))
        return out

    def __str__(self) -> str:
        return "".join("(" + " ".join(str(i + 1) for i in c) + ")" for c in self.cycles())

    def preserves(self, system: RootSystem) -> bool:
        C = system.cartan
        n = system.rank
        return all(C[self.perm[i]][self.perm[j]] == C[i][j] for i in range(n) for j in range(n))


def standard_rho(kind) -> DiagramPermutation:
    letter, n = parse_kind(kind)
    if letter == "A":
        perm = tuple(n - 1 - i for i in range(n))
    elif letter == "D":
        perm = tuple(range(n - 2)) + (n - 1, n - 2)
    else:
        perm = (5, 1, 4, 3, 2, 0)
    return DiagramPermutation(perm)


def apply_rho(rho: DiagramPermutation, alpha: Root) -> Root:
    return rho(alpha)


# ---------------------------------------------------------------------------
# twisted classes


@dataclass(frozen=True)
class TwistedClass:
    """[alpha]: the rho-orbit of alpha, plus alpha + rho(alpha) when that is a root.

    ``members`` is ``(alpha,)`` for A1, ``(alpha, alpha_bar)`` for A1Sq and
    ``(alpha, alpha_bar, alpha + alpha_bar)`` for A2, where ``alpha`` is the
    representative.
    """

    representative: Root
    members: tuple[Root, ...]
    kind: str

    @property
    def bar(self) -> Root:
        return self.members[1] if len(self.members) > 1 else self.members[0]

    @property
    def middle(self) -> Root | None:
        return self.members[2] if self.kind == "A2" else None

    @property
    def is_positive(self) -> bool:
        return sum(self.representative) > 0

    @property
    def is_simple(self) -> bool:
        return sum(self.representative) == 1

    def __neg__(self) -> TwistedClass:
        return TwistedClass(
            tuple(-c for c in self.representative),
            tuple(tuple(-c for c in m) for m in self.members),
            self.kind,
        )

    def label(self) -> str:
        return "[" + ",".join(str(c) for c in self.representative) + "]"


def classify_orbits(system: RootSystem, rho: DiagramPermutation) -> list[TwistedClass]:
    """Partition the roots into twisted classes, positive classes first."""
    if rho.order != 2:
        raise ValueError("classify_orbits needs an order-2 diagram permutation")
    pos = {r: i for i, r in enumerate(system.roots)}
    middles = set()
    classes: list[TwistedClass] = []
    for alpha in system.positive:
        beta = rho(alpha)
        if beta != alpha and pos[alpha] < pos[beta]:
            s = system.add(alpha, beta)
            if system.is_root(s):
                middles.add(s)
                classes.append(TwistedClass(alpha, (alpha, beta, s), "A2"))
            else:
                classes.append(TwistedClass(alpha, (alpha, beta), "A1Sq"))
    for alpha in system.positive:
        if rho(alpha) == alpha and alpha not in middles:
            classes.append(TwistedClass(alpha, (alpha,), "A1"))
    classes.sort(key=lambda c: pos[c.representative])
    return classes + [-c for c in classes]


def class_of(classes: list[TwistedClass], alpha: Root) -> TwistedClass:
    for c in classes:
        if alpha in c.members:
            return c
    raise KeyError(alpha)
