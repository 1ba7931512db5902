"""Finite-dimensional commutative unital algebras over Q_p via structure
constants.

An algebra of dimension m is the data of an m x m x m tensor c with
e_i * e_j = sum_k c[i][j][k] e_k, plus the coordinates of 1.  Commutativity,
associativity and the unit law are checked at construction (associativity
via M_{e_i} M_{e_j} = M_{e_i e_j} on multiplication operators); internal
constructions whose tensors are read off from actual endomorphism algebras
may skip the quadratic checks above the documented size gate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import _series, linalg
from .context import PrimeContext
from .errors import (
    ContextMismatch,
    NotAUnit,
    OutsideExpDomain,
    OutsideLogDomain,
    OutsideRepresentableDomain,
    PadicError,
    PrecisionExhausted,
)
from .matrix import PadicMatrix
from .scalar import PadicScalar, big_exp

MAX_DIM = 64  # soft limit; keeps the m^5 validation desk-scale
_FULL_CHECK_DIM = 12


@dataclass(frozen=True)
class FinAlgebra:
    ctx: PrimeContext
    dim: int
    mul: tuple  # mul[i][j] = coordinate tuple of e_i * e_j
    one: tuple  # coordinates of the unit
    labels: tuple = ()
    # whether the stored residues ARE the exact structure constants (true
    # for hand-built and parsed tensors); solve-derived tensors (quotients,
    # spectral algebras) only approximate the true constants mod p^N, so
    # transcendental evaluations on them cannot claim lifted precision
    exact_structure: bool = True

    @staticmethod
    def create(ctx, mul, one, labels=None, validate=True, max_dim=MAX_DIM,
               exact_structure=True):
        m = len(mul)
        mul_t = tuple(tuple(tuple(row) for row in plane) for plane in mul)
        one_t = tuple(one)
        labels_t = tuple(labels) if labels else tuple("e%d" % i for i in range(m))
        if m > max_dim:
            raise PadicError("algebra dimension %d exceeds the soft limit %d" % (m, max_dim))
        alg = FinAlgebra(ctx, m, mul_t, one_t, labels_t, exact_structure)
        if validate:
            alg._validate(full=(m <= _FULL_CHECK_DIM))
        return alg

    def _validate(self, full=True):
        m = self.dim
        for i in range(m):
            for j in range(i):
                for k in range(m):
                    if not self.mul[i][j][k] == self.mul[j][i][k]:
                        raise PadicError(
                            "structure constants not commutative at (%d,%d,%d)" % (i, j, k)
                        )
        one = self.element(self.one)
        for i in range(m):
            if not one * self.basis_element(i) == self.basis_element(i):
                raise PadicError("unit vector is not an identity at basis %d" % i)
        if full:
            ops = [self.mult_operator(self.basis_element(i)) for i in range(m)]
            for i in range(m):
                for j in range(i + 1):
                    prod_op = self.mult_operator(self.basis_element(i) * self.basis_element(j))
                    if not (ops[i] @ ops[j]) == prod_op:
                        raise PadicError("structure constants not associative at (%d,%d)" % (i, j))

    # -- elements ---------------------------------------------------------

    def element(self, coords) -> "AlgElement":
        return AlgElement(self, tuple(coords))

    def basis_element(self, i) -> "AlgElement":
        return self.element(
            [self.scalar(1) if j == i else self.zero_scalar() for j in range(self.dim)]
        )

    def unit(self) -> "AlgElement":
        return self.element(self.one)

    def zero(self) -> "AlgElement":
        return self.element([self.zero_scalar() for _ in range(self.dim)])

    def scalar(self, n) -> PadicScalar:
        return PadicScalar.from_int(self.ctx, n)

    def zero_scalar(self) -> PadicScalar:
        return PadicScalar.zero(self.ctx)

    def scalar_element(self, c: PadicScalar) -> "AlgElement":
        return self.element([c * x for x in self.one])

    def from_ints(self, coords) -> "AlgElement":
        return self.element([PadicScalar.from_int(self.ctx, n) for n in coords])

    def mult_operator(self, x: "AlgElement") -> PadicMatrix:
        """Matrix of multiplication by x in the given basis."""
        cols = []
        for j in range(self.dim):
            col = [self.zero_scalar() for _ in range(self.dim)]
            for i, xi in enumerate(x.coords):
                if xi.is_zero:
                    continue
                for k, c in enumerate(self.mul[i][j]):
                    col[k] = col[k] + xi * c
            cols.append(col)
        return PadicMatrix.from_rows(self.ctx, [[cols[j][i] for j in range(self.dim)] for i in range(self.dim)])

    # -- convenient constructors -------------------------------------------

    @staticmethod
    def field(ctx: PrimeContext) -> "FinAlgebra":
        one = PadicScalar.from_int(ctx, 1)
        return FinAlgebra.create(ctx, [[[one]]], [one], labels=["1"])

    @staticmethod
    def from_power_relation(ctx: PrimeContext, rel) -> "FinAlgebra":
        """K[x]/(g) in the power basis 1, x, .., x^(s-1), where g is monic
        with x^s = sum rel[i] x^i (rel holds ints, Fractions or scalars)."""
        s = len(rel)
        relv = [
            r if isinstance(r, PadicScalar) else PadicScalar.from_int(ctx, r) for r in rel
        ]
        zero = PadicScalar.zero(ctx)
        one = PadicScalar.from_int(ctx, 1)

        def reduce_power(k):
            # coordinates of x^k
            coords = [zero] * s
            if k < s:
                coords[k] = one
                return coords
            prev = reduce_power(k - 1)
            out = [zero] * s
            carry = prev[s - 1]
            for i in range(s - 1):
                out[i + 1] = prev[i]
            for i in range(s):
                out[i] = out[i] + carry * relv[i]
            return out

        powers = [reduce_power(k) for k in range(2 * s - 1)]
        mul = [[powers[i + j] for j in range(s)] for i in range(s)]
        unit = [one] + [zero] * (s - 1)
        labels = ["1"] + ["x^%d" % k if k > 1 else "x" for k in range(1, s)]
        return FinAlgebra.create(ctx, mul, unit, labels=labels)

    def __repr__(self):
        return "FinAlgebra(p=%d, dim=%d)" % (self.ctx.p, self.dim)

    def __eq__(self, other):
        if not isinstance(other, FinAlgebra):
            return NotImplemented
        if self is other:
            return True
        if (self.ctx.p, self.dim) != (other.ctx.p, other.dim):
            return False
        return self.mul == other.mul and self.one == other.one

    __hash__ = None


@dataclass(frozen=True)
class AlgElement:
    algebra: FinAlgebra
    coords: tuple

    def _check(self, other: "AlgElement"):
        if self.algebra.ctx.p != other.algebra.ctx.p:
            raise ContextMismatch("mixed primes")
        if self.algebra.dim != other.algebra.dim:
            raise PadicError("elements of different algebras")

    def __add__(self, other):
        self._check(other)
        return AlgElement(self.algebra, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        self._check(other)
        return AlgElement(self.algebra, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        return AlgElement(self.algebra, tuple(-a for a in self.coords))

    def __mul__(self, other):
        if isinstance(other, PadicScalar):
            return AlgElement(self.algebra, tuple(other * a for a in self.coords))
        self._check(other)
        m = self.algebra.dim
        mul = self.algebra.mul
        out = [PadicScalar.zero(self.algebra.ctx) for _ in range(m)]
        for i, a in enumerate(self.coords):
            if a.is_zero:
                continue
            for j, b in enumerate(other.coords):
                if b.is_zero:
                    continue
                ab = a * b
                for k, c in enumerate(mul[i][j]):
                    if not c.is_zero:
                        out[k] = out[k] + ab * c
        return AlgElement(self.algebra, tuple(out))

    def __rmul__(self, other):
        if isinstance(other, PadicScalar):
            return self * other
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            return self.inv() ** (-k)
        out = self.algebra.unit()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def inv(self) -> "AlgElement":
        sols = linalg.solve(self.algebra.mult_operator(self).rows(), [list(self.algebra.one)])
        if sols is None:
            raise NotAUnit("element is not invertible to precision")
        return AlgElement(self.algebra, tuple(sols[0]))

    def is_zero_to_precision(self) -> bool:
        return all(c.is_zero for c in self.coords)

    def __eq__(self, other):
        if not isinstance(other, AlgElement):
            return NotImplemented
        return all(a == b for a, b in zip(self.coords, other.coords))

    __hash__ = None

    def agrees(self, other: "AlgElement", prec: int) -> bool:
        return all(a.agrees(b, prec) for a, b in zip(self.coords, other.coords))

    def min_valuation(self) -> int | None:
        vals = [c.v for c in self.coords if not c.is_zero]
        return min(vals) if vals else None

    def min_precision(self) -> int:
        return min(c.prec for c in self.coords)

    def __repr__(self):
        return "AlgElement[%s]" % ", ".join(c.to_string() for c in self.coords)

    def min_poly(self):
        """Monic minimal polynomial as a coefficient list [a_0..a_{s-1}, 1]
        with a_s = 1, via the Krylov sequence 1, x, x^2, ..."""
        m = self.algebra.dim
        powers = [self.algebra.unit().coords]
        cur = self.algebra.unit()
        for _ in range(m):
            cur = cur * self
            rows = [list(p) for p in powers]
            sols = linalg.solve([[rows[i][j] for i in range(len(rows))] for j in range(m)], [list(cur.coords)])
            if sols is not None:
                # x^s = sum sols[0][i] x^i ; monic poly is T^s - sum c_i T^i
                return [-c for c in sols[0]] + [PadicScalar.from_int(self.algebra.ctx, 1)]
            powers.append(cur.coords)
        raise PrecisionExhausted("minimal polynomial not found below the dimension bound")

    def is_nilpotent(self) -> bool:
        """x^dim vanishes to precision."""
        return (self ** self.algebra.dim).is_zero_to_precision()


@dataclass(frozen=True)
class Morphism:
    """Unital algebra morphism, stored by the images of the source basis."""

    source: FinAlgebra
    target: FinAlgebra
    images: tuple  # tuple of AlgElement over target

    @staticmethod
    def create(source, target, images, validate=True):
        f = Morphism(source, target, tuple(images))
        if validate:
            f._validate()
        return f

    def _validate(self):
        if not self.apply(self.source.unit()) == self.target.unit():
            raise PadicError("morphism does not preserve the unit")
        for i in range(self.source.dim):
            for j in range(i + 1):
                lhs = self.apply(self.source.basis_element(i) * self.source.basis_element(j))
                rhs = self.images[i] * self.images[j]
                if not lhs == rhs:
                    raise PadicError("morphism not multiplicative at (%d,%d)" % (i, j))

    def apply(self, x: AlgElement) -> AlgElement:
        out = self.target.zero()
        for xi, img in zip(x.coords, self.images):
            if not xi.is_zero:
                out = out + img * xi
        return out

    def is_surjective(self) -> bool:
        rows = [[img.coords[i] for img in self.images] for i in range(self.target.dim)]
        rank, _ = linalg.rank_with_margin(rows)
        return rank == self.target.dim

    def kernel_basis(self):
        rows = [[img.coords[i] for img in self.images] for i in range(self.target.dim)]
        return [self.source.element(v) for v in linalg.kernel_basis(rows)]


# -- nilradical and quotients ----------------------------------------------


def nilradical(A: FinAlgebra):
    """Basis of the ideal of nilpotents, as the radical of the trace form
    (valid in characteristic zero); raises PrecisionExhausted when the
    trace-form rank is ambiguous at working precision."""
    m = A.dim
    traces = []
    for l in range(m):
        t = PadicScalar.zero(A.ctx)
        for j in range(m):
            t = t + A.mul[l][j][j]
        traces.append(t)
    gram = []
    for i in range(m):
        row = []
        for j in range(m):
            g = PadicScalar.zero(A.ctx)
            for l in range(m):
                c = A.mul[i][j][l]
                if not c.is_zero:
                    g = g + c * traces[l]
            row.append(g)
        gram.append(row)
    basis = [A.element(v) for v in linalg.kernel_basis(gram)]
    for x in basis:
        if not (x ** m).is_zero_to_precision():
            raise PrecisionExhausted(
                "trace-form radical contains a non-nilpotent direction; "
                "raise the working precision"
            )
    return basis


def quotient_by_ideal(A: FinAlgebra, ideal_basis):
    """Quotient algebra A/I together with the projection morphism and a
    linear section of it (used to lift idempotents back)."""
    m = A.dim
    rows = [list(x.coords) for x in ideal_basis]
    if not rows:
        ident = Morphism.create(A, A, [A.basis_element(i) for i in range(m)], validate=False)
        return A, ident, ident
    e = linalg.eliminate(rows, reduce_above=True)
    pivot_cols = sorted(j for (_, j) in e.pivots)
    red_rows = {j: e.rows[i] for (i, j) in e.pivots}
    free_cols = [j for j in range(m) if j not in pivot_cols]
    s = len(free_cols)
    if s == 0:
        raise PadicError("quotient by the unit ideal")

    def project(coords):
        work = list(coords)
        for j in pivot_cols:
            cj = work[j]
            if cj.is_zero:
                continue
            pr = red_rows[j]
            pivval = pr[j]
            f = cj / pivval
            work = [x - f * y for x, y in zip(work, pr)]
        return [work[j] for j in free_cols]

    reps = [A.basis_element(j) for j in free_cols]
    mul = [[project((reps[i] * reps[j]).coords) for j in range(s)] for i in range(s)]
    one = project(A.one)
    S = FinAlgebra.create(
        A.ctx, mul, one,
        labels=[A.labels[j] for j in free_cols],
        validate=(s <= _FULL_CHECK_DIM),
        exact_structure=False,
    )
    proj = Morphism.create(
        A, S, [S.element(project(A.basis_element(i).coords)) for i in range(m)], validate=False
    )
    zero = A.zero_scalar()
    section_images = []
    for t in range(s):
        coords = [zero] * m
        coords[free_cols[t]] = A.scalar(1)
        section_images.append(A.element(coords))
    section = Morphism(S, A, tuple(section_images))  # linear only, not validated
    return S, proj, section


# -- exponential and logarithm ----------------------------------------------


def _newton_polygon_ok(minpoly, bound: int) -> bool:
    """All roots of the monic polynomial have valuation >= bound, iff
    val(a_i) >= (s - i) * bound for every coefficient."""
    s = len(minpoly) - 1
    for i in range(s):
        c = minpoly[i]
        if c.is_zero:
            continue
        if c.v < (s - i) * bound:
            return False
    return True


def _poly_eval(coeffs, x: AlgElement) -> AlgElement:
    """Evaluate a monic-or-not coefficient list (low degree first) at x."""
    A = x.algebra
    out = A.zero()
    for c in reversed(coeffs):
        out = out * x + A.scalar_element(c)
    return out


def _poly_derivative(coeffs):
    return [
        c * PadicScalar.from_int(c.ctx, k) for k, c in enumerate(coeffs) if k >= 1
    ]


def _semisimple_part(x: AlgElement):
    """Jordan-Chevalley over Q_p: the unique decomposition x = y + nu with
    nu nilpotent and y satisfying the separable polynomial h = minimal
    polynomial of x over A/nil (separable because A/nil is a product of
    fields).  y is found by the division-free-converging Newton iteration
    y <- y - h(y)/h'(y), which moves inside x + nil and terminates exactly.
    Returns (y, h)."""
    A = x.algebra
    nil = nilradical(A)
    if not nil:
        return x, x.min_poly()
    S, proj, _ = quotient_by_ideal(A, nil)
    h = proj.apply(x).min_poly()
    hprime = _poly_derivative(h)
    y = x
    for _ in range(max(1, A.dim).bit_length() + 2):
        hy = _poly_eval(h, y)
        if hy.is_zero_to_precision():
            break
        y = y - hy * _poly_eval(hprime, y).inv()
    if not _poly_eval(h, y).is_zero_to_precision():
        raise PrecisionExhausted("semisimple part did not converge")
    return y, h


def _separable_denominator_valuation(h) -> int:
    """val_p(Res(h, h')) for monic separable h: bounds the Lagrange
    denominators, so the power coefficients of T^n mod h have valuation
    >= n*e0 - this."""
    s = len(h) - 1
    if s <= 1:
        return 0
    hp = _poly_derivative(h)
    size = 2 * s - 1
    ctx = h[0].ctx
    zero = PadicScalar.zero(ctx)
    rows = []
    for i in range(s - 1):  # shifted copies of h (degree s, monic)
        row = [zero] * size
        for k, c in enumerate(h):
            row[i + k] = c
        rows.append(row)
    for i in range(s):  # shifted copies of h' (degree s-1)
        row = [zero] * size
        for k, c in enumerate(hp):
            row[i + k] = c
        rows.append(row)
    elim = linalg.eliminate(rows)
    if elim.rank < size:
        raise PrecisionExhausted("resultant of the separable part vanishes to precision")
    return sum(elim.rows[i][j].v for (i, j) in elim.pivots)


def _separable_series(y: AlgElement, h, kind: str, target: int) -> AlgElement:
    """exp(y) or log(1 + y) for y with separable minimal polynomial h whose
    roots all have valuation >= e0, via the series in Q_p[T]/(h).

    Truncation uses val(T^n mod h) >= n*e0 - D with D = val(Res(h, h')),
    and the closed-form Legendre bound val(n!) <= n/(p-1), so the tail
    vanishes mod p^target for every later term at once."""
    A = y.algebra
    ctx = A.ctx
    p = ctx.p
    e0 = ctx.e0
    s = len(h) - 1
    D = _separable_denominator_valuation(h)
    if kind == "exp":
        # n*e0 - D - n/(p-1) >= target for all n >= m_terms
        m_terms = ((target + D) * (p - 1)) // ((p - 1) * e0 - 1) + 1
        headroom = D + _series.factorial_valuation(m_terms, p)
    else:
        m_terms = 1
        while m_terms * e0 - D - _series.floor_log(m_terms, p) < target:
            m_terms += 1  # monotone: each step adds e0 >= any log jump
        headroom = D + _series.floor_log(m_terms, p)
    wctx = ctx.widen(headroom + 4)
    gw = [c.with_context(wctx) for c in h[:-1]]
    one_w = PadicScalar.from_int(wctx, 1)
    zero_w = PadicScalar.zero(wctx)
    r = [one_w] + [zero_w] * (s - 1)
    if kind == "exp":
        acc = [one_w] + [zero_w] * (s - 1)
        fact = 1
        for n in range(1, m_terms + 1):
            r = _shift_reduce(r, gw, zero_w)
            fact *= n
            inv_fact = PadicScalar.from_fraction(wctx, Fraction(1, fact))
            acc = [a + (c * inv_fact) for a, c in zip(acc, r)]
    else:
        acc = [zero_w] * s
        for n in range(1, m_terms + 1):
            r = _shift_reduce(r, gw, zero_w)
            ninv = PadicScalar.from_int(wctx, n).inv()
            if n % 2 == 0:
                ninv = -ninv
            acc = [a + (c * ninv) for a, c in zip(acc, r)]
    powers = [A.unit()]
    for _ in range(1, s):
        powers.append(powers[-1] * y)
    out = A.zero()
    for coeff, pw in zip(acc, powers):
        out = out + pw * _rehome(coeff, ctx)
    return out


def _rehome(c: PadicScalar, ctx) -> PadicScalar:
    prec = min(c.prec, ctx.default_precision)
    if c.is_zero or c.v >= prec:
        return PadicScalar.zero(ctx, prec)
    return PadicScalar(ctx, c.v, c.u % ctx.p ** (prec - c.v), prec)


def _shift_reduce(r, gw, zero_w):
    # multiply by T modulo the monic polynomial with lower coefficients gw
    s = len(r)
    carry = r[s - 1]
    out = [zero_w] + list(r[: s - 1])
    if not carry.is_zero:
        out = [o - carry * c for o, c in zip(out, gw)]
    return out


def _finite_exp(nu: AlgElement) -> AlgElement:
    """exp of a nilpotent element: the series terminates within dim steps."""
    A = nu.algebra
    out = A.unit()
    term = A.unit()
    fact = 1
    for n in range(1, A.dim + 1):
        term = term * nu
        if term.is_zero_to_precision():
            break
        fact *= n
        out = out + term * PadicScalar.from_fraction(A.ctx, Fraction(1, fact))
    return out


def _finite_log(nu: AlgElement) -> AlgElement:
    """log(1 + nu) for nilpotent nu: finite alternating sum."""
    A = nu.algebra
    out = A.zero()
    term = A.unit()
    for n in range(1, A.dim + 1):
        term = term * nu
        if term.is_zero_to_precision():
            break
        c = PadicScalar.from_fraction(A.ctx, Fraction(-1 if n % 2 == 0 else 1, n))
        out = out + term * c
    return out


def _componentwise(x: AlgElement, fn) -> AlgElement:
    """Apply fn on each connected component of the algebra and reassemble;
    distinct components can carry p-adically close eigen-scalars whose
    interpolation denominators would otherwise drown the precision."""
    from .components import connected_components

    A = x.algebra
    comps = connected_components(A)
    if len(comps) == 1:
        return fn(x)
    acc = A.zero()
    for comp in comps:
        ye = fn(comp.project.apply(x))
        acc = acc + comp.embed.apply(ye)
    return acc


def _lift_scalar(c: PadicScalar, wctx: PrimeContext) -> PadicScalar:
    """The canonical exact lift of a residue into a wider working context;
    the ambiguity of the choice is absorbed by the final function-precision
    cap."""
    if c.is_zero:
        return PadicScalar.zero(wctx)
    return PadicScalar.from_val_unit(wctx, c.v, c.u)


def _lift_algebra(A: FinAlgebra, wctx: PrimeContext) -> FinAlgebra:
    """Only valid for exact structure constants: the canonical residue lift
    of a solve-derived tensor is no longer associative beyond the native
    precision, and the component machinery would compute garbage there."""
    if not A.exact_structure:
        raise PadicError("cannot lift an inexact structure-constant tensor")
    mul = [
        [[_lift_scalar(c, wctx) for c in A.mul[i][j]] for j in range(A.dim)]
        for i in range(A.dim)
    ]
    one = [_lift_scalar(c, wctx) for c in A.one]
    return FinAlgebra.create(wctx, mul, one, labels=A.labels, validate=False)


def _eval_on_lift(x: AlgElement, fn, cap_fn):
    """Evaluate fn on an exact lift of x at widened precision, retrying
    with more headroom when interpolation denominators (p-adically close
    eigen-scalars across components) exhaust it, then cap the result at the
    function-level precision computed by cap_fn(lifted x, lifted result)."""
    A = x.algebra
    ctx = A.ctx
    target = min(x.min_precision(), ctx.default_precision)
    headroom = ctx.default_precision + 16
    last = None
    for _ in range(4):
        wctx = PrimeContext(ctx.p, ctx.default_precision + headroom)
        Aw = _lift_algebra(A, wctx)
        xw = Aw.element([_lift_scalar(c, wctx) for c in x.coords])
        try:
            out = _componentwise(xw, fn)
        except PrecisionExhausted as exc:
            last = exc
            headroom *= 2
            continue
        cap = cap_fn(target, xw, out)
        return A.element([_rehome(c.reduce(min(c.prec, cap)), ctx) for c in out.coords])
    raise PrecisionExhausted(
        "eigen-scalar separation beyond %d extra digits: %s" % (headroom, last)
    )


def _exp_cap(target, xw, out):
    mv = out.min_valuation()
    return target + min(0, mv if mv is not None else 0)


def _log_cap(target, uw, out):
    inv_mv = uw.inv().min_valuation()
    return target + min(0, inv_mv if inv_mv is not None else 0)


def _denominator_valuation(n: int, p: int, kind: str) -> int:
    return _series.factorial_valuation(n, p) if kind == "exp" else (
        _series.int_valuation(n, p) if n % p == 0 else 0
    )


def _tail_certified(a: int, n: int, e0: int, p: int, kind: str, target: int) -> bool:
    """Given val(x^m) >= a + m*e0 for every m > n (the window induction
    through the linear recurrence of the power orbit), check that every
    later term vanishes mod p^target.  Beyond the closed-form index the
    Legendre bound val(n!) <= n/(p-1) guarantees it; the finitely many
    indices before that are scanned exactly."""
    bound = max(n, ((target - a) * (p - 1)) // ((p - 1) * e0 - 1) + 1)
    for m in range(n + 1, bound + 1):
        if a + m * e0 - _denominator_valuation(m, p, kind) < target:
            return False
    return True


def _direct_series(x: AlgElement, kind: str) -> AlgElement:
    """Series for algebras whose structure constants are only known mod
    p^N: a straight-line bilinear computation on the canonical lift.

    No ring axioms beyond bilinearity are used (the lifted tensor need not
    be associative beyond p^N): powers are the orbit of the multiply-by-x
    operator, so the Cayley-Hamilton recurrence gains e0 per step once a
    full window of dim consecutive powers satisfies val(x^k) >= a + k*e0,
    and the tail past the certified index vanishes.  The result is capped
    at the input-sensitivity level: perturbing the tensor or x by p^N moves
    term n by at least p^(N + (n-1)*(e0 + c) - val(denominator)) where c is
    the most negative tensor valuation."""
    A = x.algebra
    ctx = A.ctx
    p = ctx.p
    e0 = ctx.e0
    N = min(x.min_precision(), ctx.default_precision)
    dim = A.dim
    c_min = 0
    for plane in A.mul:
        for row in plane:
            for c in row:
                if not c.is_zero and c.v < c_min:
                    c_min = c.v
    headroom = N + 32
    for _ in range(4):
        wctx = ctx.widen(headroom)
        Aw = _lift_algebra_raw(A, wctx)
        xw = Aw.element([_lift_scalar(c, wctx) for c in x.coords])
        acc, used_terms, orbit_deficit = _run_lifted_series(xw, kind, e0, p, N, dim)
        # error propagation: a p^N input perturbation enters term n once and
        # is then pushed around by powers of the multiplication operator,
        # whose entry valuations grow by e0 per step past the first dim of
        # them; the total deficit is a constant, not a factorial
        op_deficit = 0
        op_power = PadicMatrix.identity(wctx, dim)
        m_x = Aw.mult_operator(xw)
        for _ in range(dim - 1):
            op_power = op_power @ m_x
            mv = op_power.min_valuation()
            if mv is not None and mv < -op_deficit:
                op_deficit = -mv
        level = N - (max(0, orbit_deficit - c_min) + op_deficit + dim * e0)
        level = min(N, level)
        if level <= 0:
            raise PrecisionExhausted(
                "structure-constant denominators leave no certified digits"
            )
        if acc.min_precision() >= level:
            return A.element([_rehome(c.reduce(level), ctx) for c in acc.coords])
        headroom *= 2
    raise PrecisionExhausted("series headroom did not stabilise")


def _lift_algebra_raw(A: FinAlgebra, wctx: PrimeContext) -> FinAlgebra:
    """Canonical lift of a possibly inexact tensor: usable only for
    straight-line bilinear evaluation, never for ring-theoretic machinery."""
    mul = [
        [[_lift_scalar(c, wctx) for c in A.mul[i][j]] for j in range(A.dim)]
        for i in range(A.dim)
    ]
    one = [_lift_scalar(c, wctx) for c in A.one]
    return FinAlgebra.create(wctx, mul, one, labels=A.labels, validate=False,
                             exact_structure=False)


def _run_lifted_series(xw: AlgElement, kind: str, e0: int, p: int, target: int, dim: int):
    """Returns (series value, terms used, orbit deficit), the deficit being
    max over observed powers of n*e0 - val(x^n)."""
    Aw = xw.algebra
    power = Aw.unit()
    acc = Aw.unit() if kind == "exp" else Aw.zero()
    window = []
    deficit = 0
    fact = 1
    n = 0
    hard_cap = 400 * (target + dim)
    while True:
        n += 1
        if n > hard_cap:
            raise PrecisionExhausted("series did not certify its tail")
        power = power * xw
        mv = power.min_valuation()
        bound = (power.min_precision() if mv is None else mv) - n * e0
        if -bound > deficit:
            deficit = -bound
        window.append(bound)
        if len(window) > dim:
            window.pop(0)
        if kind == "exp":
            fact *= n
            coeff = PadicScalar.from_fraction(Aw.ctx, Fraction(1, fact))
        else:
            coeff = PadicScalar.from_fraction(Aw.ctx, Fraction(-1 if n % 2 == 0 else 1, n))
        acc = acc + power * coeff
        if len(window) == dim:
            a = min(window)
            if _tail_certified(a, n, e0, p, kind, target):
                return acc, n, deficit


def _exp_connected(x: AlgElement) -> AlgElement:
    """exp on a connected algebra: Jordan-Chevalley split
    exp(x) = exp(x_ss) * exp(x_nil), the nilpotent factor a finite exact
    sum and the semisimple factor either a scalar exponential (degree-1
    case, i.e. the eigen-scalar lies in Q_p) or the series over the
    irreducible separable minimal polynomial."""
    from .scalar import exp_scalar

    A = x.algebra
    ctx = A.ctx
    y, h = _semisimple_part(x)
    nu = x - y
    if len(h) == 2:
        a = -h[0]  # y = a * 1
        exp_ss = A.scalar_element(exp_scalar(a) if not a.is_zero else PadicScalar.from_int(ctx, 1, a.prec))
    else:
        target = min(x.min_precision(), ctx.default_precision)
        exp_ss = _separable_series(y, h, "exp", target)
    return exp_ss * _finite_exp(nu)


def _log_connected(u: AlgElement) -> AlgElement:
    """log on a connected algebra: log(u_ss) + log(1 + nu) with the
    unipotent factor an exact finite sum."""
    from .scalar import log_scalar

    A = u.algebra
    ctx = A.ctx
    t = u - A.unit()
    if t.is_zero_to_precision():
        prec = min(u.min_precision(), ctx.default_precision)
        return A.element([c.reduce(prec) for c in A.zero().coords])
    t_ss, h = _semisimple_part(t)
    u_ss = A.unit() + t_ss
    nu = u * u_ss.inv() - A.unit()
    if len(h) == 2:
        a = -h[0]  # t_ss = a * 1
        if a.is_zero:
            log_ss = A.zero()
        else:
            log_ss = A.scalar_element(log_scalar(PadicScalar.from_int(ctx, 1) + a))
    else:
        target = min(u.min_precision(), ctx.default_precision)
        log_ss = _separable_series(t_ss, h, "log", target)
    return log_ss + _finite_log(nu)


def alg_exp(x: AlgElement) -> AlgElement:
    """Exponential in a finite-dimensional commutative algebra.

    Domain: every eigen-scalar of x (root of its minimal polynomial) has
    valuation >= e0.  Computed componentwise through the Jordan-Chevalley
    split; on nilpotents the series is finite and exact.
    """
    A = x.algebra
    ctx = A.ctx
    if x.is_zero_to_precision():
        one = A.unit()
        prec = min(x.min_precision(), ctx.default_precision)
        return A.element([c.reduce(prec) for c in one.coords])
    if not _newton_polygon_ok(x.min_poly(), ctx.e0):
        raise OutsideExpDomain(
            "exp domain needs every eigen-scalar at valuation >= %d "
            "(Newton polygon of the minimal polynomial too shallow)" % ctx.e0
        )
    if x.is_nilpotent():
        return _finite_exp(x)
    if A.exact_structure:
        return _eval_on_lift(x, _exp_connected, _exp_cap)
    return _direct_series(x, "exp")


def alg_log(u: AlgElement) -> AlgElement:
    """Logarithm, inverse to alg_exp on its domain: every eigen-scalar of
    u - 1 must have valuation >= e0."""
    A = u.algebra
    ctx = A.ctx
    t = u - A.unit()
    if t.is_zero_to_precision():
        prec = min(u.min_precision(), ctx.default_precision)
        return A.element([c.reduce(prec) for c in A.zero().coords])
    if not _newton_polygon_ok(t.min_poly(), ctx.e0):
        raise OutsideLogDomain(
            "log domain needs u = 1 + (eigen-scalars of valuation >= %d)" % ctx.e0
        )
    if t.is_nilpotent():
        return _finite_log(t)
    if A.exact_structure:
        return _eval_on_lift(u, _log_connected, _log_cap)
    return _direct_series(t, "log")


def exp_G(x: AlgElement) -> AlgElement:
    """Lie-algebra exponential for the unit group of a connected algebra.

    The representable domain over Q_p is x = a + nu with a scalar of
    valuation >= e0 and nu nilpotent; the value is big_exp(a) * alg_exp(nu),
    functorial in algebra morphisms.
    """
    A = x.algebra
    ctx = A.ctx
    m = A.dim
    tr = A.mult_operator(x).trace()
    a = tr * PadicScalar.from_fraction(ctx, Fraction(1, m))
    nu = x - A.scalar_element(a)
    if not nu.is_nilpotent():
        raise OutsideRepresentableDomain(
            "no scalar + nilpotent decomposition: the algebra is not "
            "connected over Q_p at this element"
        )
    if not (a.is_zero or a.v >= ctx.e0):
        raise OutsideRepresentableDomain(
            "scalar part has valuation %s < e0 = %d; the global exponential "
            "is not representable there over Q_p" % (a.v, ctx.e0)
        )
    return alg_exp(nu) * big_exp(a)
