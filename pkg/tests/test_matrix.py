"""Matrix layer and elimination engine.

Rank oracle: exact Fraction-based Gaussian elimination (valid because the
fixtures have exact rational entries).  Matrix exp oracle: exact Fraction
series summed past the truncation bound, then reduced mod p^N.
"""

import random
from fractions import Fraction

import pytest

from padic_simpson.context import PrimeContext
from padic_simpson.errors import OutsideExpDomain, OutsideLogDomain, PrecisionExhausted
from padic_simpson import linalg
from padic_simpson.matrix import PadicMatrix, expm1_quotient, mat_exp, mat_log
from padic_simpson.scalar import PadicScalar

C5 = PrimeContext(5, 32)
C3 = PrimeContext(3, 32)
C2 = PrimeContext(2, 32)


def fraction_rank(rows):
    work = [[Fraction(x) for x in r] for r in rows]
    rank = 0
    cols = len(work[0]) if work else 0
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, len(work)) if work[i][c] != 0), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        for i in range(len(work)):
            if i != r and work[i][c] != 0:
                f = work[i][c] / work[r][c]
                work[i] = [a - f * b for a, b in zip(work[i], work[r])]
        r += 1
        rank += 1
    return rank


def fraction_mat_exp(rows, p, e0, prec):
    n = len(rows)
    ident = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    acc = [r[:] for r in ident]
    power = [r[:] for r in ident]
    k = 1
    while True:
        power = [
            [sum(power[i][t] * Fraction(rows[t][j]) for t in range(n)) for j in range(n)]
            for i in range(n)
        ]
        fk = 1
        for t in range(2, k + 1):
            fk *= t
        acc = [[acc[i][j] + power[i][j] / fk for j in range(n)] for i in range(n)]
        fv = 0
        m = k
        while m:
            m //= p
            fv += m
        if k * e0 - fv >= prec + 4:
            break
        k += 1
    mod = p ** prec
    return [
        [q.numerator * pow(q.denominator, -1, mod) % mod for q in row]
        for row in acc
    ]


def pm(ctx, rows):
    return PadicMatrix.from_ints(ctx, rows)


class TestElimination:
    def test_rank_against_fraction_oracle(self):
        rng = random.Random(3)
        for _ in range(40):
            n, m = rng.randint(1, 5), rng.randint(1, 5)
            rows = [[rng.randint(-20, 20) * 5 ** rng.randint(0, 2) for _ in range(m)] for _ in range(n)]
            a = pm(C5, rows)
            rank, margin = linalg.rank_with_margin(a.rows())
            assert rank == fraction_rank(rows), rows

    def test_kernel_is_null_space(self):
        rows = [[1, 2, 3], [2, 4, 6], [0, 5, 5]]
        a = pm(C5, rows)
        basis = linalg.kernel_basis(a.rows())
        assert len(basis) == 3 - fraction_rank(rows)
        for vec in basis:
            for row in a.rows():
                acc = row[0] * vec[0]
                for x, y in zip(row[1:], vec[1:]):
                    acc = acc + x * y
                assert acc.is_zero

    def test_solve_and_inverse(self):
        a = pm(C5, [[2, 1], [1, 1]])
        inv = a.inverse()
        assert (a @ inv).agrees(PadicMatrix.identity(C5, 2), 30)

    def test_precision_exhausted_on_thin_zero(self):
        # an entry vanishing to only 2 digits cannot support a rank decision
        thin = PadicScalar.zero(C5, 2)
        row = [[thin]]
        with pytest.raises(PrecisionExhausted):
            linalg.rank_with_margin(row, min_margin=4)

    def test_margin_reported(self):
        rank, margin = linalg.rank_with_margin(pm(C5, [[5, 0], [0, 1]]).rows())
        assert rank == 2
        assert margin is not None and margin > 0


class TestMatrixOps:
    def test_matmul_identity(self):
        a = pm(C5, [[1, 2], [3, 4]])
        assert a @ PadicMatrix.identity(C5, 2) == a

    def test_kron_shape_and_values(self):
        a = pm(C5, [[1, 2], [0, 1]])
        b = pm(C5, [[3]])
        k = a.kron(b)
        assert k.nrows == 2 and k[0, 1].residue(5) == 6

    def test_block_diag(self):
        a = pm(C5, [[1]])
        b = pm(C5, [[2, 0], [0, 3]])
        d = PadicMatrix.block_diag(a, b)
        assert d.nrows == 3
        assert d[0, 0] == PadicScalar.from_int(C5, 1)
        assert d[1, 2].is_zero

    def test_pow_inverse(self):
        a = pm(C5, [[1, 5], [0, 1]])
        assert (a ** -1 @ a).agrees(PadicMatrix.identity(C5, 2), 30)


class TestMatExpLog:
    def test_exp_zero_is_identity(self):
        z = PadicMatrix.zeros(C5, 3)
        assert mat_exp(z) == PadicMatrix.identity(C5, 3)

    def test_nilpotent_exp_exact(self):
        # theta^2 = 0 forces exp = 1 + theta
        t = pm(C5, [[0, 5], [0, 0]])
        assert mat_exp(t) == pm(C5, [[1, 5], [0, 1]])

    def test_nilpotent_log_exact(self):
        r = pm(C5, [[1, 5], [0, 1]])
        assert mat_log(r) == pm(C5, [[0, 5], [0, 0]])

    def test_exp_against_fraction_oracle(self):
        rng = random.Random(5)
        for ctx in (C3, C5, C2):
            e0 = ctx.e0
            for _ in range(6):
                n = rng.randint(1, 3)
                rows = [
                    [ctx.p ** e0 * rng.randint(0, ctx.p ** 3) for _ in range(n)]
                    for _ in range(n)
                ]
                expected = fraction_mat_exp(rows, ctx.p, e0, 32)
                got = mat_exp(pm(ctx, rows))
                assert got.residues(32) == expected, (ctx.p, rows)

    def test_domain_errors(self):
        with pytest.raises(OutsideExpDomain):
            mat_exp(pm(C5, [[1]]))
        with pytest.raises(OutsideExpDomain):
            mat_exp(pm(C2, [[2]]))
        with pytest.raises(OutsideLogDomain):
            mat_log(pm(C5, [[2]]))

    def test_round_trip_random_commuting(self):
        rng = random.Random(17)
        for ctx in (C3, C5):
            for _ in range(10):
                n = rng.randint(1, 4)
                d = [[ctx.p * rng.randint(0, ctx.p ** 4) if i <= j else 0 for j in range(n)] for i in range(n)]
                t = pm(ctx, d)
                assert mat_log(mat_exp(t)).agrees(t, 28)

    def test_expm1_quotient_witness(self):
        for ctx in (C3, C5, C2):
            t = pm(ctx, [[ctx.p ** ctx.e0 * 2, ctx.p ** ctx.e0], [0, ctx.p ** ctx.e0 * 3]])
            u = expm1_quotient(t)
            lhs = mat_exp(t) - PadicMatrix.identity(ctx, 2)
            assert lhs.agrees(t @ u, 30)
            assert u.commutes_with(t)
            # u = 1 mod p, hence a unit
            diff = u - PadicMatrix.identity(ctx, 2)
            assert diff.min_valuation() is None or diff.min_valuation() >= 1
