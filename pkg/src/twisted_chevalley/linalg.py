"""Exact matrices over the involutive rings, and matrix-algebra span closure.

``Matrix`` is sparse (one dict per row) because almost everything built here
is a unipotent matrix close to the identity.  Elimination only ever pivots on
units, so the same code works over fields, over truncated polynomial rings and
over localizations like Z[i][1/6].

Span closure has two routes:

* ``span_closure_exact`` runs on ``RingElement`` vectors (any field); slow,
  used as the oracle on small inputs.
* ``span_closure_modular`` pushes the generators through a ring homomorphism
  into F_{p^m} and does the linear algebra with numpy over F_p.  For finite
  fields the homomorphism is the identity encoding, so the result is exact.
  For characteristic-0 rings the dimension found modulo p is a lower bound for
  the true one, which makes it exact whenever it reaches the full n^2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NotInvertible, RingMismatch
from .rings import InvolutiveRing, RingElement

__all__ = [
    "Matrix",
    "row_reduce",
    "solve",
    "ClosureResult",
    "span_closure_exact",
    "span_closure_modular",
]


class Matrix:
    __slots__ = ("ring", "nrows", "ncols", "rows")

    def __init__(self, ring: InvolutiveRing, nrows: int, ncols: int, rows: list[dict[int, RingElement]]):
        self.ring = ring
        self.nrows = nrows
        self.ncols = ncols
        self.rows = rows

    # constructors -------------------------------------------------------
    @classmethod
    def identity(cls, ring: InvolutiveRing, n: int) -> Matrix:
        one = ring.one
        return cls(ring, n, n, [{i: one} for i in range(n)])

    @classmethod
    def zero(cls, ring: InvolutiveRing, n: int, m: int | None = None) -> Matrix:
        m = n if m is None else m
        return cls(ring, n, m, [{} for _ in range(n)])

    @classmethod
    def from_entries(cls, ring, n, m, entries) -> Matrix:
        """entries: mapping or iterable of ((i, j), value)."""
        rows: list[dict[int, RingElement]] = [{} for _ in range(n)]
        items = entries.items() if hasattr(entries, "items") else entries
        for (i, j), v in items:
            v = ring.coerce(v)
            if v:
                rows[i][j] = v
        return cls(ring, n, m, rows)

    @classmethod
    def from_rows(cls, ring, dense_rows) -> Matrix:
        dense_rows = [list(r) for r in dense_rows]
        n = len(dense_rows)
        m = len(dense_rows[0]) if n else 0
        return cls.from_entries(ring, n, m, {(i, j): v for i, r in enumerate(dense_rows) for j, v in enumerate(r)})

    @classmethod
    def from_columns(cls, ring, columns) -> Matrix:
        columns = [list(c) for c in columns]
        m = len(columns)
        n = len(columns[0]) if m else 0
        return cls.from_entries(ring, n, m, {(i, j): v for j, c in enumerate(columns) for i, v in enumerate(c)})

    # access -------------------------------------------------------------
    def __getitem__(self, ij) -> RingElement:
        i, j = ij
        return self.rows[i].get(j, self.ring.zero)

    def entries(self):
        for i, row in enumerate(self.rows):
            for j, v in row.items():
                yield i, j, v

    def nnz(self) -> int:
        return sum(len(r) for r in self.rows)

    def to_dense(self) -> list[list[RingElement]]:
        zero = self.ring.zero
        return [[row.get(j, zero) for j in range(self.ncols)] for row in self.rows]

    def column(self, j: int) -> list[RingElement]:
        zero = self.ring.zero
        return [row.get(j, zero) for row in self.rows]

    def copy(self) -> Matrix:
        return Matrix(self.ring, self.nrows, self.ncols, [dict(r) for r in self.rows])

    # arithmetic ---------------------------------------------------------
    def _check(self, other: Matrix):
        if other.ring is not self.ring:
            raise RingMismatch(f"{self.ring.descriptor} vs {other.ring.descriptor}")

    def __add__(self, other: Matrix) -> Matrix:
        self._check(other)
        rows = []
        for a, b in zip(self.rows, other.rows):
            row = dict(a)
            for j, v in b.items():
                if j in row:
                    s = row[j] + v
                    if s:
                        row[j] = s
                    else:
                        del row[j]
                else:
                    row[j] = v
            rows.append(row)
        return Matrix(self.ring, self.nrows, self.ncols, rows)

    def __neg__(self) -> Matrix:
        return Matrix(self.ring, self.nrows, self.ncols, [{j: -v for j, v in r.items()} for r in self.rows])

    def __sub__(self, other: Matrix) -> Matrix:
        return self + (-other)

    def scale(self, c) -> Matrix:
        c = self.ring.coerce(c)
        if not c:
            return Matrix.zero(self.ring, self.nrows, self.ncols)
        rows = []
        for r in self.rows:
            row = {}
            for j, v in r.items():
                w = c * v
                if w:
                    row[j] = w
            rows.append(row)
        return Matrix(self.ring, self.nrows, self.ncols, rows)

    def __mul__(self, other):
        if not isinstance(other, Matrix):
            return self.scale(other)
        self._check(other)
        orows = other.rows
        rows = []
        for arow in self.rows:
            acc: dict[int, RingElement] = {}
            for k, a in arow.items():
                for j, b in orows[k].items():
                    t = a * b
                    if j in acc:
                        acc[j] = acc[j] + t
                    else:
                        acc[j] = t
            rows.append({j: v for j, v in acc.items() if v})
        return Matrix(self.ring, self.nrows, other.ncols, rows)

    def __rmul__(self, c):
        return self.scale(c)

    def __pow__(self, k: int) -> Matrix:
        if k < 0:
            return self.inverse() ** (-k)
        result = Matrix.identity(self.ring, self.nrows)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return (
            self.ring is other.ring
            and self.nrows == other.nrows
            and self.ncols == other.ncols
            and self.rows == other.rows
        )

    __hash__ = None

    def is_zero(self) -> bool:
        return not any(self.rows)

    def is_identity(self) -> bool:
        if self.nrows != self.ncols:
            return False
        one = self.ring.one
        return all(len(r) == 1 and r.get(i) == one for i, r in enumerate(self.rows))

    def is_diagonal(self) -> bool:
        return all(all(j == i for j in r) for i, r in enumerate(self.rows))

    def map(self, f) -> Matrix:
        rows = []
        for r in self.rows:
            row = {}
            for j, v in r.items():
                w = f(v)
                if w:
                    row[j] = w
            rows.append(row)
        return Matrix(self.ring, self.nrows, self.ncols, rows)

    def bar(self) -> Matrix:
        """theta applied entrywise."""
        return self.map(lambda v: v.bar())

    def change_ring(self, ring: InvolutiveRing) -> Matrix:
        rows = [{j: ring.coerce(v) for j, v in r.items()} for r in self.rows]
        return Matrix(ring, self.nrows, self.ncols, rows)

    def transpose(self) -> Matrix:
        rows: list[dict[int, RingElement]] = [{} for _ in range(self.ncols)]
        for i, j, v in self.entries():
            rows[j][i] = v
        return Matrix(self.ring, self.ncols, self.nrows, rows)

    def conjugate_signed_permutation(self, perm, signs) -> Matrix:
        """P M P^{-1} for the signed permutation P e_j = signs[j] e_{perm[j]}."""
        rows: list[dict[int, RingElement]] = [{} for _ in range(self.nrows)]
        for i, r in enumerate(self.rows):
            pi, si = perm[i], signs[i]
            target = rows[pi]
            for j, v in r.items():
                target[perm[j]] = v if si * signs[j] == 1 else -v
        return Matrix(self.ring, self.nrows, self.ncols, rows)

    def coefficient(self, degree: int) -> Matrix:
        """For a matrix over a polynomial or truncated ring, the matrix of
        degree-``degree`` coefficients (over the base ring)."""
        base = self.ring.base
        rows = []
        for r in self.rows:
            row = {}
            for j, v in r.items():
                c = v.v[degree] if degree < len(v.v) else None
                if c is not None and c:
                    row[j] = c
            rows.append(row)
        return Matrix(base, self.nrows, self.ncols, rows)

    def inverse(self) -> Matrix:
        n = self.nrows
        if n != self.ncols:
            raise NotInvertible("non-square matrix")
        ring = self.ring
        aug = [dict(r) for r in self.rows]
        inv = [{i: ring.one} for i in range(n)]
        for col in range(n):
            piv = None
            for i in range(col, n):
                v = aug[i].get(col)
                if v is not None and ring.is_unit(v):
                    piv = i
                    break
            if piv is None:
                raise NotInvertible("matrix is not invertible over the ring")
            aug[col], aug[piv] = aug[piv], aug[col]
            inv[col], inv[piv] = inv[piv], inv[col]
            c = aug[col][col].inverse()
            aug[col] = _row_scale(aug[col], c)
            inv[col] = _row_scale(inv[col], c)
            for i in range(n):
                if i != col:
                    f = aug[i].get(col)
                    if f is not None:
                        aug[i] = _row_axpy(aug[i], -f, aug[col])
                        inv[i] = _row_axpy(inv[i], -f, inv[col])
        return Matrix(ring, n, n, inv)

    def det(self) -> RingElement:
        """Determinant by unit-pivot elimination (needs a unit pivot at every step)."""
        n = self.nrows
        ring = self.ring
        rows = [dict(r) for r in self.rows]
        d = ring.one
        for col in range(n):
            piv = None
            for i in range(col, n):
                v = rows[i].get(col)
                if v is not None and ring.is_unit(v):
                    piv = i
                    break
            if piv is None:
                if all(rows[i].get(col) is None for i in range(col, n)):
                    return ring.zero
                raise NotInvertible("no unit pivot available for the determinant")
            if piv != col:
                rows[col], rows[piv] = rows[piv], rows[col]
                d = -d
            p = rows[col][col]
            d = d * p
            pinv = p.inverse()
            for i in range(col + 1, n):
                f = rows[i].get(col)
                if f is not None:
                    rows[i] = _row_axpy(rows[i], -(f * pinv), rows[col])
        return d

    def __repr__(self) -> str:
        return f"Matrix({self.ring.descriptor}, {self.nrows}x{self.ncols}, nnz={self.nnz()})"

    def to_json(self) -> list[list]:
        return [[i, j, str(v)] for i, j, v in self.entries()]


def _row_scale(row, c):
    out = {}
    for j, v in row.items():
        w = v * c
        if w:
            out[j] = w
    return out


def _row_axpy(row, c, other):
    """row + c * other."""
    out = dict(row)
    for j, v in other.items():
        t = c * v
        if j in out:
            s = out[j] + t
            if s:
                out[j] = s
            else:
                del out[j]
        elif t:
            out[j] = t
    return out


def row_reduce(vectors: list[dict[int, RingElement]], ring: InvolutiveRing):
    """Reduced row echelon form of sparse row vectors, pivoting on units.

    Returns (rows, pivots).  Raises ``NotInvertible`` if some column has
    nonzero non-unit entries only (cannot happen over a field).
    """
    basis: list[dict[int, RingElement]] = []
    pivots: list[int] = []
    for vec in vectors:
        v = dict(vec)
        for row, c in zip(basis, pivots):
            f = v.get(c)
            if f is not None:
                v = _row_axpy(v, -f, row)
        if not v:
            continue
        col = None
        for j in sorted(v):
            if ring.is_unit(v[j]):
                col = j
                break
        if col is None:
            raise NotInvertible("no unit pivot in a nonzero row")
        v = _row_scale(v, v[col].inverse())
        for k, row in enumerate(basis):
            f = row.get(col)
            if f is not None:
                basis[k] = _row_axpy(row, -f, v)
        basis.append(v)
        pivots.append(col)
    order = sorted(range(len(pivots)), key=lambda k: pivots[k])
    return [basis[k] for k in order], [pivots[k] for k in order]


def solve(A: Matrix, b: list[RingElement]) -> list[RingElement]:
    """Unique x with A x = b for square invertible A."""
    inv = A.inverse()
    zero = A.ring.zero
    out = []
    for row in inv.rows:
        acc = zero
        for j, v in row.items():
            acc = acc + v * b[j]
        out.append(acc)
    return out


# ---------------------------------------------------------------------------
# span closure


@dataclass
class ClosureResult:
    dimension: int
    ambient: int  # n^2
    method: str
    certified: bool  # True when ``dimension`` is exact, not just a lower bound
    words: list[tuple[int, ...]] = field(default_factory=list)
    echelon: object = None  # numpy array over F_p (modular) or list of sparse rows (exact)
    pivots: list[int] = field(default_factory=list)
    prime: int | None = None

    @property
    def is_full(self) -> bool:
        return self.dimension == self.ambient


def _flatten(M: Matrix) -> dict[int, RingElement]:
    n = M.ncols
    return {i * n + j: v for i, j, v in M.entries()}


def span_closure_exact(generators: list[Matrix], n: int, ring: InvolutiveRing) -> ClosureResult:
    """Smallest unital subalgebra containing the generators, over a field,
    by breadth-first left multiplication with exact elimination."""
    basis: list[dict[int, RingElement]] = []
    pivots: list[int] = []
    words: list[tuple[int, ...]] = []

    def insert(M: Matrix, word) -> bool:
        v = _flatten(M)
        for row, c in zip(basis, pivots):
            f = v.get(c)
            if f is not None:
                v = _row_axpy(v, -f, row)
        if not v:
            return False
        col = min(v)
        v = _row_scale(v, v[col].inverse())
        for k, row in enumerate(basis):
            f = row.get(col)
            if f is not None:
                basis[k] = _row_axpy(row, -f, v)
        basis.append(v)
        pivots.append(col)
        words.append(word)
        return True

    frontier: list[tuple[Matrix, tuple[int, ...]]] = []
    seeds = [(Matrix.identity(ring, n), ())] + [(g, (k,)) for k, g in enumerate(generators)]
    for M, w in seeds:
        if insert(M, w):
            frontier.append((M, w))
    while frontier and len(basis) < n * n:
        nxt = []
        for M, w in frontier:
            for k, g in enumerate(generators):
                P = g * M
                if insert(P, (k,) + w):
                    nxt.append((P, (k,) + w))
        frontier = nxt
    order = sorted(range(len(pivots)), key=lambda k: pivots[k])
    return ClosureResult(
        dimension=len(basis),
        ambient=n * n,
        method="exact",
        certified=True,
        words=words,
        echelon=[basis[k] for k in order],
        pivots=[pivots[k] for k in order],
    )


_LIMB = 1 << 13
_EXACT = float(1 << 53)


def _mulmod(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    """A @ B mod p for float64 arrays holding integers in [0, p), p < 2^26.

    BLAS float64 products are exact while every partial sum stays below 2^53;
    A is split into 13-bit limbs and the inner dimension chunked to keep it so.
    """
    r = A.shape[1]
    if r == 0:
        return np.zeros((A.shape[0], B.shape[1]))
    if (p - 1) ** 2 * r < _EXACT:
        return np.mod(A @ B, p)
    lo = np.mod(A, _LIMB)
    hi = (A - lo) / _LIMB
    chunk = max(1, int(_EXACT // (_LIMB * p)))
    out = np.zeros((A.shape[0], B.shape[1]))
    for start in range(0, r, chunk):
        stop = min(r, start + chunk)
        part_lo = np.mod(lo[:, start:stop] @ B[start:stop], p)
        part_hi = np.mod(hi[:, start:stop] @ B[start:stop], p)
        out = np.mod(out + part_lo + np.mod(part_hi * _LIMB, p), p)
    return out


class _FpEchelon:
    """Incremental reduced row echelon form over F_p (p < 2^26), stored as float64."""

    def __init__(self, N: int, p: int):
        if p >= 1 << 26:
            raise ValueError("modular closure needs p < 2^26")
        self.p = p
        self.N = N
        self.B = np.zeros((min(N, 64), N))
        self.r = 0
        self.pivots: list[int] = []

    def _grow_to(self, rows: int):
        size = min(self.N, max(rows, 2 * self.B.shape[0]))
        new = np.zeros((size, self.N))
        new[: self.r] = self.B[: self.r]
        self.B = new

    def reduce(self, V: np.ndarray) -> np.ndarray:
        p = self.p
        out = np.mod(V, p)
        if self.r == 0:
            return out
        coeffs = out[:, np.asarray(self.pivots)]
        return np.mod(out - _mulmod(coeffs, self.B[: self.r], p), p)

    def insert_batch(self, V: np.ndarray, block: int = 64) -> list[int]:
        """Insert reduced rows of V; returns indices of rows that were new.

        Rows are eliminated a block at a time: inside a block row by row, and
        against the rows already found (and finally the stored basis) by one
        matrix product per block.
        """
        p = self.p
        V = self.reduce(np.asarray(V, dtype=np.float64))
        added: list[int] = []
        W = np.zeros((0, self.N))
        w_piv: list[int] = []
        for start in range(0, V.shape[0], block):
            if self.r + len(w_piv) == self.N:
                break
            X = V[start : start + block]
            if w_piv:
                X = np.mod(X - _mulmod(X[:, w_piv], W, p), p)
            rows, piv = [], []
            for i in range(X.shape[0]):
                v = X[i]
                nz = np.flatnonzero(v)
                if nz.size == 0:
                    continue
                c = int(nz[0])
                v = np.mod(v * pow(int(v[c]), -1, p), p)
                later = X[i + 1 :, c]
                hit = np.flatnonzero(later)
                if hit.size:
                    X[i + 1 + hit] = np.mod(X[i + 1 + hit] - np.outer(later[hit], v), p)
                for k, u in enumerate(rows):
                    if u[c]:
                        rows[k] = np.mod(u - u[c] * v, p)
                rows.append(v)
                piv.append(c)
                added.append(start + i)
                if self.r + len(w_piv) + len(piv) == self.N:
                    break
            if not rows:
                continue
            Y = np.stack(rows)
            if w_piv:
                W = np.mod(W - _mulmod(W[:, piv], Y, p), p)
            W = np.concatenate([W, Y])
            w_piv.extend(piv)
        if w_piv:
            k = len(w_piv)
            if self.r:
                self.B[: self.r] = np.mod(self.B[: self.r] - _mulmod(self.B[: self.r, w_piv], W, p), p)
            while self.B.shape[0] < self.r + k:
                self._grow_to(self.r + k)
            self.B[self.r : self.r + k] = W
            self.pivots.extend(w_piv)
            self.r += k
        return added


def _to_planes(M: Matrix, reduction) -> np.ndarray:
    n, m = M.nrows, reduction.m
    out = np.zeros((m, n, n), dtype=np.int64)
    for i, j, v in M.entries():
        coeffs = reduction.image(v.v)
        for k in range(m):
            out[k, i, j] = coeffs[k]
    return out


def _plane_matmul(G: np.ndarray, A: np.ndarray, reduction) -> np.ndarray:
    """G (m,n,n) times each A[b] (B,m,n,n) over F_{p^m}."""
    p, m, modulus = reduction.p, reduction.m, reduction.modulus
    B, _, n, _ = A.shape
    out = np.zeros((B, 2 * m - 1, n, n), dtype=np.int64)
    for i in range(m):
        for j in range(m):
            out[:, i + j] = (out[:, i + j] + np.matmul(G[i], A[:, j]) % p) % p
    for deg in range(2 * m - 2, m - 1, -1):
        top = out[:, deg]
        for j in range(m):
            if modulus[j]:
                out[:, deg - m + j] = (out[:, deg - m + j] + modulus[j] * top) % p
    return out[:, :m]


def _times_x(A: np.ndarray, reduction) -> np.ndarray:
    p, m, modulus = reduction.p, reduction.m, reduction.modulus
    top = A[:, m - 1]
    out = np.zeros_like(A)
    out[:, 1:] = A[:, : m - 1]
    for j in range(m):
        if modulus[j]:
            out[:, j] = (out[:, j] + modulus[j] * top) % p
    return out


def span_closure_modular(generators: list[Matrix], n: int, reduction, batch: int = 512) -> ClosureResult:
    p, m = reduction.p, reduction.m
    N = m * n * n
    ech = _FpEchelon(N, p)
    G = np.stack([_to_planes(g, reduction) for g in generators]) if generators else np.zeros((0, m, n, n), np.int64)
    ident = np.zeros((1, m, n, n), dtype=np.int64)
    ident[0, 0] = np.eye(n, dtype=np.int64)
    words: list[tuple[int, ...]] = []

    def absorb(mats: np.ndarray, labels: list[tuple[int, ...]]) -> tuple[np.ndarray, list]:
        kept_m, kept_w = [], []
        for start in range(0, mats.shape[0], batch):
            chunk = mats[start : start + batch]
            added = ech.insert_batch(chunk.reshape(chunk.shape[0], N).copy())
            for i in added:
                kept_m.append(chunk[i])
                kept_w.append(labels[start + i])
            if ech.r == N:
                break
        if not kept_m:
            return np.zeros((0, m, n, n), dtype=np.int64), []
        return np.stack(kept_m), kept_w

    seeds = np.concatenate([ident, G]) if len(G) else ident
    labels = [()] + [(k,) for k in range(len(G))]
    # an F_{p^m}-subspace is closed under multiplication by the field generator x
    frontier, fwords = absorb(seeds, labels)
    words.extend(fwords)
    step = max(1, batch // (len(G) + 1))
    while frontier.shape[0] and ech.r < N:
        # candidates are generated a frontier block at a time to bound memory
        new_m, new_w = [], []
        for start in range(0, frontier.shape[0], step):
            block, bwords = frontier[start : start + step], fwords[start : start + step]
            cand, cwords = [], []
            if m > 1:
                cand.append(_times_x(block, reduction))
                cwords.extend(("x",) + w for w in bwords)
            for k in range(len(G)):
                cand.append(_plane_matmul(G[k], block, reduction))
                cwords.extend((k,) + w for w in bwords)
            km, kw = absorb(np.concatenate(cand), cwords)
            if kw:
                new_m.append(km)
                new_w.extend(kw)
            if ech.r == N:
                break
        frontier = np.concatenate(new_m) if new_m else np.zeros((0, m, n, n), dtype=np.int64)
        fwords = new_w
        words.extend(fwords)
    dim_p = ech.r
    if dim_p % m:
        raise AssertionError("F_p dimension of an F_q-space must be a multiple of m")
    dimension = dim_p // m
    order = np.argsort(ech.pivots, kind="stable")
    return ClosureResult(
        dimension=dimension,
        ambient=n * n,
        method="modular" if not reduction.exact else "finite-field",
        certified=reduction.exact or dimension == n * n,
        words=[w for w in words if "x" not in w],
        echelon=ech.B[: ech.r][order],
        pivots=[ech.pivots[k] for k in order],
        prime=p,
    )
