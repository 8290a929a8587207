"""Mechanical checks: tangent algebra, matrix-ring generation, recovery of
root elements and the normalizer argument at desk scale."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .chevalley import LieVector, StructureTable, ad_matrix
from .errors import NoHalf, NoThird, NotBasedAtIdentity
from .groups import (
    GroupElement,
    declared_generators,
    evaluate_word,
    sigma_matrix,
    twisted_generator,
    _token_inverse,
)
from .linalg import ClosureResult, Matrix, row_reduce, span_closure_exact, span_closure_modular
from .report import VerificationReport
from .rings import (
    InvolutiveRing,
    RingElement,
    finite_field_sq,
    gaussian_rationals,
    localized_gaussian_integers,
    poly_ext,
    truncated_poly,
)
from .roots import TwistedClass, classify_orbits
from .twist import TwistedBasis, twisted_basis

__all__ = [
    "TangentWitness",
    "tangent_extract",
    "verify_tangent_identities",
    "verify_tangent_converse",
    "span_closure",
    "recover_root_element",
    "verify_recovery",
    "ExtensionPair",
    "gaussian_pair",
    "finite_field_pair",
    "conjugation_stays_in_ring",
    "check_normalizer_sample",
    "lie_vector_from_ad",
]


# ---------------------------------------------------------------------------
# tangent algebra


def tangent_extract(curve) -> Matrix:
    """Degree-1 coefficient X of a curve 1 + tX + O(t^2) over a truncated ring."""
    M = curve.matrix if isinstance(curve, GroupElement) else curve
    if getattr(M.ring, "truncation", None) is None or M.ring.truncation < 2:
        raise NotBasedAtIdentity("tangent extraction needs a curve over trunc(R, k) with k >= 2")
    if not M.coefficient(0).is_identity():
        raise NotBasedAtIdentity("curve is not based at the identity")
    return M.coefficient(1)


def class_vectors(table: StructureTable, ring: InvolutiveRing, cls: TwistedClass, a: RingElement) -> dict[str, LieVector]:
    """X+, X-(I), X-(II), H+, H- attached to one class (H defined for any class)."""
    def X(root, c=1):
        return LieVector.X(table, ring, root, c)

    def H(root):
        return LieVector.H_root(table, ring, root)

    alpha, beta = cls.representative, cls.bar
    if cls.kind == "A1":
        return {"Xplus": X(alpha), "Hplus": H(alpha)}
    out = {
        "Xplus": X(alpha) + X(beta),
        "XminusI": (X(alpha) - X(beta)) * a,
        "Hplus": H(alpha) + H(beta),
        "Hminus": (H(alpha) - H(beta)) * a,
    }
    if cls.kind == "A2":
        out["XminusII"] = X(cls.middle, a)
    return out


@dataclass
class TangentWitness:
    """A membership certificate for one twisted basis element.

    Either ``curve`` is set (target = degree-1 coefficient of the curve), or
    ``terms`` is a list of (coefficient, conjugator or None, Lie vector)
    encoding sum c * (g o X) with the operations addition, scalar and g o X.
    """

    target: str
    expected: LieVector
    combination: str
    curve: GroupElement | None = None
    terms: list | None = None

    def evaluate(self) -> Matrix:
        if self.curve is not None:
            return tangent_extract(self.curve)
        ring = self.expected.ring
        n = self.expected.table.dim
        acc = Matrix.zero(ring, n)
        for coeff, g, vec in self.terms:
            M = ad_matrix(vec)
            if g is not None:
                M = g.conjugate(M, g.inverse().matrix)
            acc = acc + M.scale(coeff)
        return acc

    def check(self) -> tuple[bool, dict | None]:
        got = self.evaluate()
        want = ad_matrix(self.expected)
        if got == want:
            return True, None
        return False, _difference_witness(got, want)


def _difference_witness(got: Matrix, want: Matrix) -> dict:
    diff = got - want
    entries = sorted(diff.entries())
    i, j, v = entries[0]
    return {"nonzero_entries": len(entries), "first": [i, j, str(v)]}


def _tangent_witnesses(table: StructureTable, ring: InvolutiveRing, cls: TwistedClass, e_reading: str = "I") -> list[tuple[str, TangentWitness]]:
    T = truncated_poly(ring, 3)
    t = T.variable()
    a = ring.antifixed_unit()
    aT = T.coerce(a)
    one = ring.one
    half = one / 2
    pos = class_vectors(table, ring, cls, a)
    neg = class_vectors(table, ring, -cls, a)
    out: list[tuple[str, TangentWitness]] = []
    if cls.kind in ("A1", "A1Sq"):
        out.append(("a", TangentWitness("Xplus", pos["Xplus"], "x(t)", curve=twisted_generator(table, cls, t))))
        if cls.kind == "A1Sq":
            out.append(("b", TangentWitness("XminusI", pos["XminusI"], "x(a t)", curve=twisted_generator(table, cls, aT * t))))
        g = twisted_generator(table, cls, one)
        out.append(("c", TangentWitness("Hplus", pos["Hplus"], "x(1) o X+[-a] + X+ - X+[-a]",
                                        terms=[(one, g, neg["Xplus"]), (one, None, pos["Xplus"]), (-one, None, neg["Xplus"])])))
        if cls.kind == "A1Sq":
            out.append(("d", TangentWitness("Hminus", pos["Hminus"], "x(1) o X-I[-a] + X-I - X-I[-a]",
                                            terms=[(one, g, neg["XminusI"]), (one, None, pos["XminusI"]), (-one, None, neg["XminusI"])])))
        return out
    # A2
    out.append(("a", TangentWitness("Xplus", pos["Xplus"], "x(t, t^2/2)", curve=twisted_generator(table, cls, t, t * t / 2))))
    at = aT * t
    out.append(("b", TangentWitness("XminusI", pos["XminusI"], "x(a t, a t theta(a t)/2)",
                                    curve=twisted_generator(table, cls, at, at * at.bar() / 2))))
    n_sign = table.N[(cls.bar, cls.representative)]
    out.append(("c", TangentWitness("XminusII", pos["XminusII"] * n_sign, "x(0, a t) = 1 + t N(abar,a) X-II + ...",
                                    curve=twisted_generator(table, cls, T.zero, at))))
    g = twisted_generator(table, cls, one, half)
    out.append(("d", TangentWitness("Hplus", pos["Hplus"], "x(1,1/2) o X+[-a] + 1/2 X+ - X+[-a]",
                                    terms=[(one, g, neg["Xplus"]), (half, None, pos["Xplus"]), (-one, None, neg["Xplus"])])))
    conj = neg["XminusI"] if e_reading == "I" else neg["XminusII"]
    # the printed sign "- X-II" is the case N(abar, a) = -1; the coefficient is N(abar, a) in general
    out.append(("e", TangentWitness("Hminus", pos["Hminus"], f"x(1,1/2) o X-{e_reading}[-a] + 3/2 X-I + N(abar,a) X-II - X-I[-a]",
                                    terms=[(one, g, conj), (one * 3 / 2, None, pos["XminusI"]),
                                           (one * n_sign, None, pos["XminusII"]), (-one, None, neg["XminusI"])])))
    return out


def _mutated(w: TangentWitness) -> TangentWitness:
    """Perturb the first scalar coefficient of a combination (1/2 -> 1, c -> c + 1 otherwise)."""
    if w.terms is None:
        # curve witnesses: compare against twice the target instead
        return TangentWitness(w.target, w.expected * 2, w.combination + " [mutated]", curve=w.curve)
    terms = list(w.terms)
    for k, (c, g, v) in enumerate(terms):
        if g is None:
            terms[k] = (c.ring.one if c == c.ring.one / 2 else c + 1, g, v)
            break
    return TangentWitness(w.target, w.expected, w.combination + " [mutated]", terms=terms)


def verify_tangent_identities(table: StructureTable, ring: InvolutiveRing | None = None, mutate: str | None = None) -> VerificationReport:
    """Every positive class: each membership identity as an exact equality of adjoint matrices.

    The A2 identity (e) leaves the tag of its conjugated term implicit; both
    readings are evaluated and the one that holds is recorded.
    """
    ring = ring or gaussian_rationals()
    report = VerificationReport("tangent", {"type": table.system.name, "twist": str(table.rho), "ring": ring.descriptor})
    readings: dict[str, list[str]] = {}
    literal_sign: dict[str, bool] = {}
    for cls in classify_orbits(table.system, table.rho):
        if not cls.is_positive:
            continue
        by_reading = {r: dict(_tangent_witnesses(table, ring, cls, r)) for r in (("I", "II") if cls.kind == "A2" else ("I",))}
        for case, w in by_reading["I"].items():
            check_id = f"{cls.kind}{cls.label()}/{case}"
            if case == "e":
                ok_by = {r: by_reading[r]["e"].check()[0] for r in by_reading}
                holding = [r for r, ok in ok_by.items() if ok]
                readings[cls.label()] = holding
                literal_sign[cls.label()] = table.N[(cls.bar, cls.representative)] == -1
                w = by_reading[holding[0] if holding else "I"]["e"]
            if mutate is not None and mutate in (check_id, "all"):
                w = _mutated(w)
            ok, witness = w.check()
            report.add(check_id, ok, witness)
    if readings:
        values = {r for v in readings.values() for r in v}
        report.decisions["A2(e) conjugated term"] = "X-(" + "/".join(sorted(values)) + ")" if values else "neither reading holds"
        report.decisions["A2(b) curve"] = "x(a t, a t theta(a t) / 2)"
        report.decisions["A2(c) tangent"] = "N(abar,a) X-(II)"
        report.decisions["A2(e) X-(II) coefficient"] = "N(abar,a); printed -1 holds for " + (
            ", ".join(k for k, v in sorted(literal_sign.items()) if v) or "no class"
        )
    return report.finish()


def lie_vector_from_ad(table: StructureTable, X: Matrix) -> LieVector:
    """A Y with ad(Y) = X when one exists.

    Root coefficients are read off from the action on the Cartan part; the
    Cartan coefficients solve h . <beta, alpha_i> = X[beta, beta] over the
    positive roots.  The solution is unique unless ad has a kernel (the centre
    in small characteristic), in which case free coordinates are set to zero.
    """
    ring = X.ring
    n = table.rank
    S = table.system
    coeffs: dict[int, RingElement] = {}
    for alpha in S.roots:
        i = next(i for i in range(n) if S.pairing(alpha, i))
        # [Y, H_i] has X_alpha-coefficient -<alpha, alpha_i> y_alpha
        c = X[table.root_index(alpha), i]
        if c:
            coeffs[table.root_index(alpha)] = -c / S.pairing(alpha, i)
    equations = []
    for beta in S.positive:
        k = table.root_index(beta)
        row = {i: ring.coerce(S.pairing(beta, i)) for i in range(n) if S.pairing(beta, i)}
        row = {i: v for i, v in row.items() if v}
        if X[k, k]:
            row[n] = X[k, k]
        equations.append(row)
    rows, pivots = row_reduce(equations, ring)
    if n in pivots:
        raise ValueError("matrix is not ad of any Lie algebra element")
    for row, col in zip(rows, pivots):
        value = row.get(n)
        if value is not None:
            coeffs[col] = value
    return LieVector(table, ring, coeffs)


def _random_fixed(ring, rng):
    r = ring.random_element(rng)
    return r + r.bar()


def _random_params(cls: TwistedClass, ring: InvolutiveRing, rng) -> tuple[RingElement, RingElement | None]:
    if cls.kind == "A1":
        return _random_fixed(ring, rng), None
    t = ring.random_element(rng)
    if cls.kind == "A1Sq":
        return t, None
    s = ring.random_element(rng)
    return t, t * t.bar() / 2 + (s - s.bar())


def verify_tangent_converse(table: StructureTable, ring: InvolutiveRing | None = None, samples: int = 20, seed: int = 0, max_len: int = 4) -> VerificationReport:
    """Random curves c_1 L_1(t) ... c_m L_m(t) (c_1...c_m)^{-1} over trunc(R, 2):
    the tangent vector is ad of a sigma-fixed element with theta-fixed twisted coordinates."""
    ring = ring or gaussian_rationals()
    T = truncated_poly(ring, 2)
    t = T.variable()
    rng = random.Random(seed)
    classes = classify_orbits(table.system, table.rho)
    basis = twisted_basis(table.system, table.rho, ring, table)
    report = VerificationReport("tangent-converse", {"type": table.system.name, "ring": ring.descriptor, "seed": seed})
    for k in range(samples):
        m = rng.randint(1, max_len)
        consts, word = [], []
        for _ in range(m):
            cls = rng.choice(classes)
            p, q = _random_params(cls, ring, rng)
            consts.append(("xc", cls, T.coerce(p), None if q is None else T.coerce(q)))
            lcls = rng.choice(classes)
            if lcls.kind == "A1":
                lin = ("xc", lcls, T.coerce(_random_fixed(ring, rng)) * t, None)
            elif lcls.kind == "A1Sq":
                lin = ("xc", lcls, T.coerce(ring.random_element(rng)) * t, None)
            elif rng.random() < 0.5:
                lin = ("xc", lcls, T.coerce(ring.random_element(rng)) * t, T.zero)
            else:
                s = ring.random_element(rng)
                lin = ("xc", lcls, T.zero, T.coerce(s - s.bar()) * t)
            word += [consts[-1], lin]
        word += [_token_inverse(tok) for tok in reversed(consts)]
        curve = evaluate_word(table, T, word)
        X = tangent_extract(curve)
        Y = lie_vector_from_ad(table, X)
        if basis.sigma(Y) != Y:
            # only reachable when ad has a kernel: move to the sigma-fixed preimage
            Y = (Y + basis.sigma(Y)) * (ring.one / 2)
        coords = basis.coordinates(Y)
        ok = ad_matrix(Y) == X and all(c.bar() == c for c in coords)
        report.add(f"sample/{k:03d}", ok, None if ok else {"word_length": len(word)})
    return report.finish()


# ---------------------------------------------------------------------------
# generation and recovery


def span_closure(generators, ring: InvolutiveRing, method: str = "auto") -> ClosureResult:
    """Dimension and echelon basis of the unital algebra generated by ``generators``.

    ``auto`` runs over F_q for finite fields and via a split-prime reduction
    otherwise; a full-dimension modular result is exact (reduction can only
    lower the rank), a deficient one is retried at a second prime and then
    recomputed exactly.
    """
    mats = [g.matrix if isinstance(g, GroupElement) else g for g in generators]
    if not mats:
        return span_closure_exact([], 0, ring)
    n = mats[0].nrows
    if method == "exact":
        return span_closure_exact(mats, n, ring)
    red = ring.reduction(0)
    if red is None:
        return span_closure_exact(mats, n, ring)
    result = span_closure_modular(mats, n, red)
    if result.certified:
        return result
    second = span_closure_modular(mats, n, ring.reduction(1))
    if second.certified:
        return second
    if method == "modular":
        return max(result, second, key=lambda r: r.dimension)
    return span_closure_exact(mats, n, ring)


def _x(table, cls, t, u=None) -> Matrix:
    return twisted_generator(table, cls, t, u).matrix


def recover_root_element(table: StructureTable, cls: TwistedClass, member, ring: InvolutiveRing, coefficients: dict | None = None) -> Matrix:
    """ad(X_member) rebuilt from the group elements x_[alpha](...) of its class.

    ``coefficients`` overrides the numeric constants of the formula (used by
    the mutation controls); keys: ``outer``, ``inner``, ``eight``.
    """
    if member not in cls.members:
        raise ValueError(f"{member} is not in class {cls.label()}")
    if not ring.has_half:
        raise NoHalf(f"recovery needs 1/2 in {ring.descriptor}")
    co = {"outer": None, "inner": 1, "eight": 8}
    co.update(coefficients or {})
    one = ring.one
    if cls.kind == "A1":
        outer = one / 2 if co["outer"] is None else ring.coerce(co["outer"])
        return (_x(table, cls, one) - _x(table, cls, -one)).scale(outer)
    a = ring.antifixed_unit()
    a_inv = a.inverse()
    sign = 1 if member == cls.representative else -1
    inner = ring.coerce(co["inner"])
    if cls.kind == "A1Sq":
        outer = one / 4 if co["outer"] is None else ring.coerce(co["outer"])
        even = _x(table, cls, one) - _x(table, cls, -one)
        odd = (_x(table, cls, a) - _x(table, cls, -a)).scale(a_inv * inner * sign)
        return (even + odd).scale(outer)
    if not ring.has_third:
        raise NoThird(f"A2 recovery needs 1/3 in {ring.descriptor}")
    if member == cls.middle:
        outer = table.N[(cls.bar, cls.representative)] * (one / 2) * a_inv if co["outer"] is None else ring.coerce(co["outer"])
        return (_x(table, cls, ring.zero, a) - _x(table, cls, ring.zero, -a)).scale(outer)

    def F(t, u):
        return _x(table, cls, t, u) - _x(table, cls, -t, u)

    half = one / 2
    eight = ring.coerce(co["eight"])
    outer = one / 24 if co["outer"] is None else ring.coerce(co["outer"])
    even = F(one, half).scale(eight) - F(one * 2, one * 2)
    odd = F(a, -(a * a) * half).scale(eight) - F(a * 2, -(a * a) * 2)
    return (even + odd.scale(a_inv * inner * sign)).scale(outer)


def verify_recovery(table: StructureTable, ring: InvolutiveRing, mutate: str | None = None) -> VerificationReport:
    report = VerificationReport("recovery", {"type": table.system.name, "ring": ring.descriptor})
    for cls in classify_orbits(table.system, table.rho):
        for member in cls.members:
            check_id = f"{cls.kind}{cls.label()}/X{table.system.root_str(member)}"
            coefficients = None
            if mutate is not None and mutate in (check_id, "all"):
                coefficients = {"outer": 1}
            try:
                got = recover_root_element(table, cls, member, ring, coefficients)
            except (NoHalf, NoThird) as exc:
                report.add(check_id, False, {"error": type(exc).__name__, "message": str(exc)})
                continue
            want = ad_matrix(LieVector.X(table, ring, member))
            report.add(check_id, got == want, None if got == want else _difference_witness(got, want))
    return report.finish()


# ---------------------------------------------------------------------------
# normalizer


@dataclass(frozen=True)
class ExtensionPair:
    """A subring R inside S with a decidable entrywise membership test."""

    name: str
    sub: InvolutiveRing
    ext: InvolutiveRing
    contains: Callable[[RingElement], bool]
    sample: Callable[[random.Random], RingElement]  # random element of R, as an element of S
    outside: Callable[[random.Random], RingElement]  # element of S not in R


def gaussian_pair() -> ExtensionPair:
    R = localized_gaussian_integers((2, 3))
    S = gaussian_rationals()
    return ExtensionPair(
        "gaussian-integers[1/6] < gaussian-rationals",
        R,
        S,
        lambda x: R.contains_payload(x.v),
        lambda rng: S.coerce(R.random_element(rng)),
        lambda rng: S.coerce(Fraction(rng.choice((1, 2, 3, 4)), 5)),
    )


def finite_field_pair(p: int = 3, k: int = 1) -> ExtensionPair:
    """F_{p^2k} inside its polynomial ring F_{p^2k}[t] (theta acting on coefficients)."""
    R = finite_field_sq(p, k)
    S = poly_ext(R)
    elements = R.elements()
    t = S.variable()
    return ExtensionPair(
        f"{R.descriptor} < {S.descriptor}",
        R,
        S,
        lambda x: len(x.v) <= 1,
        lambda rng: S.coerce(rng.choice(elements)),
        lambda rng: t,
    )


def conjugation_stays_in_ring(g: GroupElement, pair: ExtensionPair, generators: list[GroupElement], g_inverse: Matrix | None = None) -> tuple[bool, dict | None]:
    """True iff g x g^{-1} has all entries in R for every generator x."""
    ginv = g_inverse if g_inverse is not None else g.inverse().matrix
    S = pair.ext
    for k, x in enumerate(generators):
        D = x.matrix.change_ring(S) if x.ring is not S else x.matrix
        n = D.nrows
        # g x g^{-1} = 1 + g (x - 1) g^{-1}
        C = g.matrix * (D - Matrix.identity(S, n)) * ginv
        for i, j, v in C.entries():
            if not pair.contains(v):
                return False, {"generator": k, "entry": [i, j], "value": str(v)}
    return True, None


def _sample_word(table, classes, pair: ExtensionPair, rng, max_len: int, bad: bool):
    S = pair.ext
    length = rng.randint(1, max_len)
    bad_at = rng.randrange(length) if bad else -1
    word = []
    for pos in range(length):
        cls = rng.choice(classes)
        t = pair.sample(rng)
        if cls.kind == "A1":
            t = t + t.bar()
        if pos == bad_at:
            # the outside elements are theta-fixed, so A1 parameters stay admissible
            t = t + pair.outside(rng)
        u = None
        if cls.kind == "A2":
            s = pair.sample(rng)
            u = t * t.bar() / 2 + (s - s.bar())
        word.append(("xc", cls, S.coerce(t), u))
    return word


def check_normalizer_sample(table: StructureTable, pair: ExtensionPair | None = None, samples: int = 100, seed: int = 0, max_len: int = 8) -> VerificationReport:
    """(i) sampled g in E'(R) normalize M_n(R); (ii) sampled g with a parameter
    outside R do not; (iii) every passing g is sigma-fixed with entries in R."""
    pair = pair or gaussian_pair()
    S = pair.ext
    report = VerificationReport(
        "normalizer",
        {"type": table.system.name, "pair": pair.name, "samples": samples, "seed": seed, "max_len": max_len},
    )
    rng = random.Random(seed)
    classes = classify_orbits(table.system, table.rho)
    gens = declared_generators(table, pair.sub)
    for k in range(samples):
        word = _sample_word(table, classes, pair, rng, max_len, bad=False)
        g = GroupElement(evaluate_word(table, S, word), tuple(word), table)
        ginv = evaluate_word(table, S, [_token_inverse(tok) for tok in reversed(word)])
        ok, witness = conjugation_stays_in_ring(g, pair, gens, ginv)
        report.add(f"in-R/{k:03d}", ok, witness)
        consistent = ok and sigma_matrix(table, g.matrix) == g.matrix and all(pair.contains(v) for _, _, v in g.matrix.entries())
        report.add(f"in-R/{k:03d}/sigma-fixed-entries-in-R", consistent)
    for k in range(samples):
        word = _sample_word(table, classes, pair, rng, max_len, bad=True)
        g = GroupElement(evaluate_word(table, S, word), tuple(word), table)
        ginv = evaluate_word(table, S, [_token_inverse(tok) for tok in reversed(word)])
        ok, witness = conjugation_stays_in_ring(g, pair, gens, ginv)
        report.add(f"outside-R/{k:03d}", not ok, witness)
    return report.finish()
