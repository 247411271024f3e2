"""Exact dense linear algebra over the rationals and prime fields.

Matrices are lists of rows. A linear map ``A -> B`` is stored as a
``dim B x dim A`` matrix acting on column vectors.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = list[list]


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % k for k in range(2, int(p ** 0.5) + 1))


class Field:
    """ℚ when ``p == 0``, otherwise the prime field with ``p`` elements."""

    def __init__(self, p: int = 0):
        if p and not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p

    def __repr__(self):
        return "Q" if not self.p else f"Fp {self.p}"

    def __eq__(self, other):
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(self.p)

    @property
    def zero(self):
        return Fraction(0) if not self.p else 0

    @property
    def one(self):
        return Fraction(1) if not self.p else 1

    def __call__(self, x):
        if not self.p:
            return Fraction(x)
        if isinstance(x, Fraction):
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        if isinstance(x, str):
            return self(Fraction(x))
        return int(x) % self.p

    def inv(self, a):
        if not self.p:
            return 1 / a
        return pow(a, -1, self.p)

    def norm(self, a):
        return a % self.p if self.p else a


QQ = Field(0)


def zeros(rows: int, cols: int, F: Field) -> Matrix:
    return [[F.zero] * cols for _ in range(rows)]


def identity(n: int, F: Field) -> Matrix:
    m = zeros(n, n, F)
    for i in range(n):
        m[i][i] = F.one
    return m


def convert(m: Sequence[Sequence], F: Field) -> Matrix:
    return [[F(x) for x in row] for row in m]


def matmul(a: Matrix, b: Matrix, F: Field, inner: int | None = None) -> Matrix:
    """``a @ b``; ``inner`` gives the shared dimension when it cannot be read off (empty rows)."""
    if inner is None:
        inner = len(b) if b else (len(a[0]) if a else 0)
    cols = len(b[0]) if b else 0
    out = []
    for row in a:
        r = []
        for j in range(cols):
            s = F.zero
            for k in range(inner):
                if row[k]:
                    s += row[k] * b[k][j]
            r.append(F.norm(s))
        out.append(r)
    return out


def matvec(a: Matrix, v: Sequence, F: Field) -> list:
    return [F.norm(sum((x * y for x, y in zip(row, v)), F.zero)) for row in a]


def is_zero(m: Matrix) -> bool:
    return all(not x for row in m for x in row)


def rref(m: Matrix, F: Field) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    a = [list(row) for row in m]
    rows = len(a)
    cols = len(a[0]) if a else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = F.inv(a[r][c])
        a[r] = [F.norm(x * inv) for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [F.norm(x - f * y) for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def rank(m: Matrix, F: Field) -> int:
    return len(rref(m, F)[1])


def nullspace(m: Matrix, F: Field, cols: int | None = None) -> list[list]:
    """Basis of the kernel, as column vectors, one per free variable."""
    if cols is None:
        cols = len(m[0]) if m else 0
    if not m:
        return [[F.one if i == j else F.zero for i in range(cols)] for j in range(cols)]
    r, pivots = rref(m, F)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [F.zero] * cols
        v[f] = F.one
        for i, pc in enumerate(pivots):
            v[pc] = F.norm(-r[i][f])
        basis.append(v)
    return basis


def columns(vectors: list[list], rows: int, F: Field) -> Matrix:
    """Matrix whose columns are ``vectors``."""
    return [[v[i] for v in vectors] for i in range(rows)]


def transpose(m: Matrix, cols: int | None = None) -> Matrix:
    if cols is None:
        cols = len(m[0]) if m else 0
    return [[row[j] for row in m] for j in range(cols)]


def solve(a: Matrix, b: Matrix, F: Field, cols: int | None = None) -> Matrix | None:
    """Some ``x`` with ``a @ x == b``, or ``None`` if there is none."""
    n = cols if cols is not None else (len(a[0]) if a else 0)
    k = len(b[0]) if b else 0
    aug = [list(ra) + list(rb) for ra, rb in zip(a, b)]
    r, pivots = rref(aug, F)
    if any(p >= n for p in pivots):
        return None
    x = zeros(n, k, F)
    for i, pc in enumerate(pivots):
        for j in range(k):
            x[pc][j] = r[i][n + j]
    return x


def hstack(blocks: list[Matrix], rows: int) -> Matrix:
    return [sum((list(b[i]) for b in blocks), []) for i in range(rows)]


def vstack(blocks: list[Matrix]) -> Matrix:
    return [list(row) for b in blocks for row in b]
