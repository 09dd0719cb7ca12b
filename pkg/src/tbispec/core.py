"""Condition spaces, KP wave functions and their translational bispectral operators.

Pipeline for a space ``C`` of derivative-evaluation distributions:

    tau_C, Kbar_C            Wronskians of the functions c_i(e^{xz})
    psi_C                    (1 / (z^n tau_C)) * Kbar_C[e^{xz}]
    q_C, L_0 = q_C(D)        L_0 = Qbar o (1/pi) o Kbar_C, pi = g tau_C
    Lambda                   z^-n o b(Kbar_C) o b(Qbar) o z^n / q_C(z)

Every stage is exact; :func:`run_pipeline` certifies the eigenvalue
identities structurally.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import comb

from .exactfield import GQ, ZERO, ONE, Poly, PolyExp, RatExp, Den, NotPolyExp
from .linalg import rref, rank, nullspace
from .opx import DiffOpX, right_divide, wronskian, kbar_from_kernel, conjugate_by_function
from .opz import RatFunZ, TransDiffOpZ, b_map
from .waveform import WaveForm, waveform_apply_x, waveform_apply_z

__all__ = [
    "Distribution", "ConditionSpace", "BispectralData", "DegenerateSpace", "NotInAC",
    "dist_apply_to_exp", "dist_compose_poly", "tau", "kbar", "wavefunction", "qpoly",
    "in_AC", "ac_basis_up_to_degree", "Lp", "factorize", "lambda_op",
    "is_point_supported", "ad_chain", "lambda_family_commute", "run_pipeline",
    "random_condition_space",
]


class DegenerateSpace(ValueError):
    """The basis is linearly dependent or its functions have zero Wronskian."""


class NotInAC(ValueError):
    """The polynomial does not belong to the ring A_C."""


def _key(k):
    lam, n = k
    return (lam.key(), n)


class Distribution:
    """``sum coeff * Delta(lam, n)`` where ``Delta(lam, n)[f] = f^{(n)}(lam)``."""

    __slots__ = ("terms",)

    def __init__(self, terms=()):
        if isinstance(terms, dict):
            terms = terms.items()
        acc = {}
        for (lam, n), c in terms:
            k = (GQ.coerce(lam), int(n))
            if k[1] < 0:
                raise ValueError("derivative order must be non-negative")
            acc[k] = acc.get(k, ZERO) + GQ.coerce(c)
        self.terms = tuple(sorted(((k, c) for k, c in acc.items() if c), key=lambda t: _key(t[0])))

    @classmethod
    def delta(cls, lam, n: int = 0, coeff=1) -> "Distribution":
        return cls([((lam, n), coeff)])

    def as_dict(self) -> dict:
        return dict(self.terms)

    def is_zero(self):
        return not self.terms

    def support(self) -> list:
        out = []
        for (lam, _), _c in self.terms:
            if lam not in out:
                out.append(lam)
        return out

    def order_at(self, lam) -> int:
        lam = GQ.coerce(lam)
        return max((n for (l, n), _ in self.terms if l == lam), default=-1)

    def __eq__(self, other):
        return isinstance(other, Distribution) and self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __add__(self, other):
        return Distribution(list(self.terms) + list(other.terms))

    def scale(self, c) -> "Distribution":
        c = GQ.coerce(c)
        return Distribution([(k, v * c) for k, v in self.terms])

    def __call__(self, p: Poly):
        """Apply to a polynomial in z."""
        out = ZERO
        for (lam, n), c in self.terms:
            q = p
            for _ in range(n):
                q = q.derive()
            out = out + c * q(lam)
        return out

    def to_text(self) -> str:
        parts = []
        for (lam, n), c in self.terms:
            d = f"Delta({lam.to_text()},{n})"
            parts.append(d if c == ONE else f"({c.to_text()})*{d}")
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"Distribution({self.to_text()})"


def dist_apply_to_exp(c: Distribution) -> PolyExp:
    """``Delta(lam, n)[e^{xz}] = x^n e^{lam x}``, extended linearly."""
    acc = {}
    for (lam, n), v in c.terms:
        acc[lam] = acc.get(lam, Poly()) + Poly.monomial(n, v)
    return PolyExp(acc)


def dist_compose_poly(c: Distribution, p: Poly) -> Distribution:
    """The distribution ``g -> c(p g)`` (Leibniz rule at each point)."""
    derivs = [p]
    top = max((n for (_, n), _ in c.terms), default=0)
    for _ in range(top):
        derivs.append(derivs[-1].derive())
    out = []
    for (lam, n), v in c.terms:
        for k in range(n + 1):
            w = derivs[k](lam)
            if w:
                out.append(((lam, n - k), v * w * comb(n, k)))
    return Distribution(out)


class ConditionSpace:
    """A finite-dimensional span of distributions, stored in reduced echelon form."""

    def __init__(self, basis):
        basis = [b if isinstance(b, Distribution) else Distribution(b) for b in basis]
        keys = sorted({k for b in basis for k, _ in b.terms}, key=_key)
        rows = [[b.as_dict().get(k, ZERO) for k in keys] for b in basis]
        R, pivots = rref(rows)
        if len(pivots) != len(basis) or not basis:
            raise DegenerateSpace("basis distributions are linearly dependent or empty")
        self.keys = keys
        self.pivots = pivots
        self._rows = R
        self.basis = [Distribution(zip(keys, r)) for r in R]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __eq__(self, other):
        return isinstance(other, ConditionSpace) and self.basis == other.basis

    def support(self) -> list:
        pts = {lam for b in self.basis for lam in b.support()}
        return sorted(pts, key=lambda g: g.key())

    def max_order(self, lam) -> int:
        return max(b.order_at(lam) for b in self.basis)

    def residual(self, c: Distribution) -> dict:
        """Coordinates of ``c`` left after reduction by the echelon basis."""
        v = c.as_dict()
        for row, p in zip(self._rows, self.pivots):
            f = v.get(self.keys[p], ZERO)
            if not f:
                continue
            for k, a in zip(self.keys, row):
                if a:
                    nv = v.get(k, ZERO) - f * a
                    if nv:
                        v[k] = nv
                    else:
                        v.pop(k, None)
        return v

    def contains(self, c: Distribution) -> bool:
        return not self.residual(c)

    def kernel_functions(self) -> list:
        return [dist_apply_to_exp(b) for b in self.basis]

    def to_text(self) -> str:
        return "span{" + ", ".join(b.to_text() for b in self.basis) + "}"

    def __repr__(self):
        return f"ConditionSpace({self.to_text()})"


# ---------------------------------------------------------------------------
# x-side constructions
# ---------------------------------------------------------------------------

def tau(C: ConditionSpace) -> PolyExp:
    t = wronskian(C.kernel_functions())
    if t.is_zero():
        raise DegenerateSpace("zero Wronskian")
    return t


def kbar(C: ConditionSpace) -> DiffOpX:
    """``tau_C * K_C``: PolyExp coefficients, leading coefficient ``tau_C``."""
    fs = C.kernel_functions()
    if wronskian(fs).is_zero():
        raise DegenerateSpace("zero Wronskian")
    return kbar_from_kernel(fs)


def wavefunction(C: ConditionSpace, K: DiffOpX | None = None) -> WaveForm:
    """``psi_C = (1/z^n) K_C e^{xz}``."""
    K = K if K is not None else kbar(C)
    cs = K.polyexp_coeffs()
    return WaveForm(cs, cs[-1], Poly.monomial(C.dim))


def qpoly(C: ConditionSpace) -> Poly:
    """``prod_i (z - lam_i)^(m_i + 1)`` over the support of ``C``."""
    out = Poly.const(1)
    for lam in C.support():
        out = out * Poly([-lam, 1]) ** (C.max_order(lam) + 1)
    return out


def in_AC(C: ConditionSpace, p: Poly) -> bool:
    return all(C.contains(dist_compose_poly(c, p)) for c in C.basis)


def ac_basis_up_to_degree(C: ConditionSpace, d: int) -> list:
    """Basis of ``A_C`` intersected with polynomials of degree at most ``d``."""
    residuals = []
    for j in range(d + 1):
        zj = Poly.monomial(j)
        residuals.append([C.residual(dist_compose_poly(c, zj)) for c in C.basis])
    rows = []
    for i in range(C.dim):
        keys = set()
        for j in range(d + 1):
            keys |= set(residuals[j][i])
        for k in keys:
            rows.append([residuals[j][i].get(k, ZERO) for j in range(d + 1)])
    vecs = nullspace(rows, d + 1)
    # echelon from the top degree down gives one polynomial per attainable degree
    R, _ = rref([list(reversed(v)) for v in vecs]) if vecs else ([], [])
    polys = [Poly(list(reversed(r))) for r in R]
    return sorted((p.monic() for p in polys), key=lambda p: p.degree)


def Lp(C: ConditionSpace, p: Poly, K: DiffOpX | None = None, t: PolyExp | None = None) -> DiffOpX:
    """The operator with ``L_p psi_C = p(z) psi_C``, from ``L_p K_C = K_C p(D)``."""
    K = K if K is not None else kbar(C)
    t = t if t is not None else K.lc().num
    M, R = right_divide(K * DiffOpX.from_poly_in_D(p), K)
    if not R.is_zero():
        raise NotInAC(f"{p.to_text('z')} is not in A_C")
    return conjugate_by_function(M, t, "conjugate").reduce()


def _common_den(op: DiffOpX) -> PolyExp:
    D = Den()
    for a in op.coeffs:
        D, _, _ = D.merge(a.den)
    return D.expand()


@dataclass
class Factorization:
    L0: DiffOpX
    Q: DiffOpX
    Qbar: DiffOpX
    g: PolyExp
    pi: PolyExp


def factorize(C: ConditionSpace, g: PolyExp | None = None, K: DiffOpX | None = None) -> Factorization:
    """``L_0 = q_C(D) = Qbar o (1/pi) o Kbar_C`` with ``Qbar`` PolyExp and ``pi = g tau_C``.

    Without ``g`` the multiplier is ``d^p`` for the common denominator ``d`` of
    ``Q`` and the least ``p`` in ``1..ord(Q)+1`` that certifies.
    """
    K = K if K is not None else kbar(C)
    t = K.lc().num
    L0 = DiffOpX.from_poly_in_D(qpoly(C))
    Qp, R = right_divide(L0, K)
    if not R.is_zero():
        raise ArithmeticError("q_C(D) has no right factor Kbar_C")
    Q = conjugate_by_function(Qp, t, "right-compose").reduce()
    if g is None:
        d = _common_den(Q)
        if d == 1:
            g = PolyExp.const(1)
            Qbar = Q.certify()
        else:
            Qbar = None
            for power in range(1, Q.order + 2):
                cand = d ** power
                try:
                    Qbar = conjugate_by_function(Q, cand, "right-compose").certify()
                except NotPolyExp:
                    continue
                g = cand
                break
            if Qbar is None:
                raise ArithmeticError("no power of the common denominator certified Qbar")
    else:
        Qbar = conjugate_by_function(Q, g, "right-compose").certify()
    pi = g * t
    rebuilt = Qbar * DiffOpX.mult(RatExp(1, pi)) * K
    if rebuilt != L0:
        raise ArithmeticError("factorization failed to re-expand to q_C(D)")
    return Factorization(L0, Q, Qbar, g, pi)


def lambda_op(C: ConditionSpace, Qbar: DiffOpX, K: DiffOpX | None = None) -> TransDiffOpZ:
    """``z^-n o b(Kbar_C) o b(Qbar) o z^n / q_C(z)``."""
    K = K if K is not None else kbar(C)
    n = C.dim
    zn = Poly.monomial(n)
    left = TransDiffOpZ.mult(RatFunZ(1, zn))
    right = TransDiffOpZ.mult(RatFunZ(zn, qpoly(C)))
    return left * b_map(K) * b_map(Qbar) * right


def is_point_supported(C: ConditionSpace) -> bool:
    """Does ``C`` have a basis of distributions each supported at a single point?"""
    total = 0
    for lam in C.support():
        outside = [i for i, (l, _) in enumerate(C.keys) if l != lam]
        sub = [[r[i] for i in outside] for r in C._rows]
        total += C.dim - (rank(sub) if outside else 0)
    return total == C.dim


# ---------------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------------

@dataclass
class BispectralData:
    C: ConditionSpace
    tau: PolyExp
    kbar: DiffOpX
    psi: WaveForm
    q: Poly
    Qbar: DiffOpX
    g: PolyExp
    pi: PolyExp
    lambda_op: TransDiffOpZ
    certificates: dict = field(default_factory=dict)

    def eigen_lhs(self) -> WaveForm:
        return waveform_apply_z(self.lambda_op, self.psi)

    def eigen_rhs(self) -> WaveForm:
        return self.psi * self.pi


def run_pipeline(C: ConditionSpace, g: PolyExp | None = None, certify: bool = True) -> BispectralData:
    K = kbar(C)
    t = K.lc().num
    psi = wavefunction(C, K)
    q = qpoly(C)
    fac = factorize(C, g, K)
    lam = lambda_op(C, fac.Qbar, K)
    data = BispectralData(C, t, K, psi, q, fac.Qbar, fac.g, fac.pi, lam)
    data.certificates["factorization"] = True
    if certify:
        data.certificates["kernel"] = all(
            K.apply(f).is_zero() for f in C.kernel_functions())
        data.certificates["pi_equals_g_tau"] = fac.pi == fac.g * t
        data.certificates["theorem_eigenvalue"] = data.eigen_lhs() == data.eigen_rhs()
    return data


def ad_chain(C: ConditionSpace, p: Poly, m_max: int, data: BispectralData | None = None) -> dict:
    """Iterated commutators linking the two eigenvalue equations.

    ``A_m = ad_{L_p}^m(pi)``, ``Ahat_m = (-1)^m ad_{p}^m(Lambda)``,
    ``B_m = ad_{pi}^m(L_p)``, ``Bhat_m = (-1)^m ad_{Lambda}^m(p)``.
    """
    if not in_AC(C, p):
        raise NotInAC(f"{p.to_text('z')} is not in A_C")
    data = data if data is not None else run_pipeline(C, certify=False)
    L = Lp(C, p, data.kbar, data.tau)
    pi_op = DiffOpX.mult(data.pi)
    pz = TransDiffOpZ.mult(RatFunZ(p))
    Lam = data.lambda_op
    psi = data.psi
    ordL = L.order
    top = max(m_max, ordL + 1)
    A, Ah, B, Bh = pi_op, Lam, L, pz
    rows = []
    for m in range(top + 1):
        sign = -1 if m % 2 else 1
        row = {"m": m}
        if m <= m_max:
            row["A_identity"] = waveform_apply_x(A, psi) == waveform_apply_z(Ah * sign, psi)
            row["B_identity"] = waveform_apply_x(B, psi) == waveform_apply_z(Bh * sign, psi)
        row["B_zero"] = B.is_zero()
        row["Bhat_zero"] = Bh.is_zero()
        row["A_order"] = A.order
        rows.append(row)
        if m < top:
            A = (L * A - A * L).reduce()
            Ah = pz * Ah - Ah * pz
            B = (pi_op * B - B * pi_op).reduce()
            Bh = Lam * Bh - Bh * Lam
    vanish = [r for r in rows if r["m"] > ordL]
    return {
        "p": p,
        "ord_Lp": ordL,
        "Lp": L,
        "rows": rows,
        "B_vanishes": all(r["B_zero"] and r["Bhat_zero"] for r in vanish),
        "identities_hold": all(r["A_identity"] and r["B_identity"] for r in rows if r["m"] <= m_max),
    }


def ad_operators(data: BispectralData, L: DiffOpX, p: Poly, m: int):
    """``(A_m, Ahat_m, B_m, Bhat_m)`` for a single ``m``."""
    pi_op = DiffOpX.mult(data.pi)
    pz = TransDiffOpZ.mult(RatFunZ(p))
    Lam = data.lambda_op
    A, Ah, B, Bh = pi_op, Lam, L, pz
    for _ in range(m):
        A = (L * A - A * L).reduce()
        Ah = pz * Ah - Ah * pz
        B = (pi_op * B - B * pi_op).reduce()
        Bh = Lam * Bh - Bh * Lam
    sign = -1 if m % 2 else 1
    return A, Ah * sign, B, Bh * sign


def lambda_family_commute(C: ConditionSpace, h: PolyExp, data: BispectralData | None = None) -> bool:
    """Do ``Lambda_g`` and ``Lambda_{g h}`` commute?"""
    if h.is_zero():
        raise ValueError("h must be nonzero")
    data = data if data is not None else run_pipeline(C, certify=False)
    Qh = (data.Qbar * DiffOpX.mult(h)).certify()
    other = lambda_op(C, Qh, data.kbar)
    comm = data.lambda_op * other - other * data.lambda_op
    return comm.is_zero()


# ---------------------------------------------------------------------------

FUZZ_POINTS = (GQ(0), GQ(1), GQ(-1), GQ(2), GQ(-2), GQ(0, 1))
FUZZ_COEFFS = (GQ(1), GQ(-1), GQ(2), GQ(-2), GQ(0, 1), GQ(0, -1))


def random_condition_space(rng: random.Random, max_dim: int = 3, max_order: int = 2,
                           max_terms: int = 2, max_qdeg: int | None = 6) -> ConditionSpace:
    """A random non-degenerate space drawn from the fuzz distribution.

    ``max_qdeg`` rejects spaces whose ``q_C`` would be of higher degree.
    """
    while True:
        dim = rng.randint(1, max_dim)
        basis = []
        for _ in range(dim):
            nterms = rng.randint(1, max_terms)
            terms = [((rng.choice(FUZZ_POINTS), rng.randint(0, max_order)), rng.choice(FUZZ_COEFFS))
                     for _ in range(nterms)]
            basis.append(Distribution(terms))
        try:
            C = ConditionSpace(basis)
            if tau(C).is_zero():
                continue
        except DegenerateSpace:
            continue
        if max_qdeg is not None and qpoly(C).degree > max_qdeg:
            continue
        return C
