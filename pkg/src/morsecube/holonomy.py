"""Exact check of a two-generator representation into the isometries of H^4.

Entries live in Q(sqrt 2) and are stored as pairs of fractions
``(a, b)`` meaning ``a + b*sqrt(2)``.  The matrices themselves have entries
of the form ``(a + b*sqrt 2)/2``, but products and inverses leave that
set, so arithmetic is done in the whole field.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

LORENTZ_FORM = (1, 1, 1, 1, -1)
RELATOR = "A A B B a B B A A b"  # upper case is the inverse


@dataclass(frozen=True)
class QSqrt2:
    a: Fraction
    b: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))

    def __add__(self, other):
        other = _coerce(other)
        return QSqrt2(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return QSqrt2(-self.a, -self.b)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        return QSqrt2(self.a * other.a + 2 * self.b * other.b,
                      self.a * other.b + self.b * other.a)

    __rmul__ = __mul__

    def norm(self):
        return self.a * self.a - 2 * self.b * self.b

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("zero has no inverse")
        return QSqrt2(self.a / n, -self.b / n)

    def __truediv__(self, other):
        return self * _coerce(other).inverse()

    def __bool__(self):
        return bool(self.a or self.b)

    def __eq__(self, other):
        other = _coerce(other)
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b))

    def __float__(self):
        return float(self.a) + float(self.b) * 2 ** 0.5

    def __str__(self):
        if not self.b:
            return str(self.a)
        if not self.a:
            return f"{self.b}*r2"
        return f"{self.a}{'+' if self.b > 0 else '-'}{abs(self.b)}*r2"


def _coerce(x):
    return x if isinstance(x, QSqrt2) else QSqrt2(Fraction(x))


def half(a, b=0):
    """``(a + b*sqrt 2)/2``."""
    return QSqrt2(Fraction(a, 2), Fraction(b, 2))


class Matrix:
    """Square matrix over Q(sqrt 2)."""

    def __init__(self, rows):
        self.rows = tuple(tuple(_coerce(x) for x in row) for row in rows)
        self.n = len(self.rows)

    @classmethod
    def identity(cls, n):
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, entries):
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    def __matmul__(self, other):
        cols = list(zip(*other.rows))
        return Matrix([[sum((x * y for x, y in zip(row, col)), QSqrt2(0)) for col in cols]
                       for row in self.rows])

    def __eq__(self, other):
        return self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def transpose(self):
        return Matrix(list(zip(*self.rows)))

    def power(self, k):
        out = Matrix.identity(self.n)
        base = self if k >= 0 else self.inverse()
        for _ in range(abs(k)):
            out = out @ base
        return out

    def determinant(self):
        m = [list(r) for r in self.rows]
        det = QSqrt2(1)
        for col in range(self.n):
            piv = next((r for r in range(col, self.n) if m[r][col]), None)
            if piv is None:
                return QSqrt2(0)
            if piv != col:
                m[col], m[piv] = m[piv], m[col]
                det = -det
            det = det * m[col][col]
            for r in range(col + 1, self.n):
                if m[r][col]:
                    q = m[r][col] / m[col][col]
                    m[r] = [x - q * y for x, y in zip(m[r], m[col])]
        return det

    def inverse(self):
        n = self.n
        m = [list(r) + [QSqrt2(int(i == j)) for j in range(n)] for i, r in enumerate(self.rows)]
        for col in range(n):
            piv = next((r for r in range(col, n) if m[r][col]), None)
            if piv is None:
                raise ZeroDivisionError("singular matrix")
            m[col], m[piv] = m[piv], m[col]
            inv = m[col][col].inverse()
            m[col] = [x * inv for x in m[col]]
            for r in range(n):
                if r != col and m[r][col]:
                    q = m[r][col]
                    m[r] = [x - q * y for x, y in zip(m[r], m[col])]
        return Matrix([row[n:] for row in m])

    def order(self, limit=1000):
        """Smallest k >= 1 with M^k = 1, or None below ``limit``."""
        one = Matrix.identity(self.n)
        acc = self
        for k in range(1, limit + 1):
            if acc == one:
                return k
            acc = acc @ self
        return None

    def preserves(self, form):
        return self.transpose() @ form @ self == form


def generator_a():
    return Matrix([
        [half(1), half(-1), half(1), half(1), 0],
        [half(1), half(1), half(-1), half(1), 0],
        [half(1), half(-1), half(-1), half(-1), 0],
        [half(1), half(1), half(1), half(-1), 0],
        [0, 0, 0, 0, 1],
    ])


def generator_b():
    return Matrix([
        [half(-7), half(3), half(3), half(3), half(0, 6)],
        [half(-3), half(1), half(1), half(-1), half(0, 2)],
        [half(3), half(1), half(-1), half(-1), half(0, -2)],
        [half(3), half(-1), half(1), half(-1), half(0, -2)],
        [half(0, -6), half(0, 2), half(0, 2), half(0, 2), half(10)],
    ])


def evaluate_word(word, gens):
    """Product of generators along ``word`` (space-separated letters,
    upper case meaning the inverse), read left to right."""
    inverses = {}
    out = None
    for letter in word.split():
        key = letter.lower()
        m = gens[key]
        if letter.isupper():
            if key not in inverses:
                inverses[key] = m.inverse()
            m = inverses[key]
        out = m if out is None else out @ m
    return out


@dataclass
class HolonomyReport:
    order_a: int | None
    order_b: int | None
    relator_identity: bool
    form: tuple
    preserves_form: bool
    det_a: QSqrt2
    det_b: QSqrt2

    def checks(self):
        return [
            ("orders", self.order_a == 12 and self.order_b == 12,
             f"order(a)={self.order_a} order(b)={self.order_b}"),
            ("relator", self.relator_identity, f"word {RELATOR} evaluates to the identity"
             if self.relator_identity else f"word {RELATOR} is not the identity"),
            ("form", self.preserves_form, f"both preserve diag{self.form}"),
        ]

    @property
    def passed(self):
        return all(ok for _, ok, _ in self.checks())


def find_diagonal_form(mats, n=5):
    """Signed diagonal forms (first entry +1) preserved by every matrix."""
    from itertools import product

    found = []
    for signs in product((1, -1), repeat=n - 1):
        form = Matrix.diagonal((1,) + signs)
        if all(m.preserves(form) for m in mats):
            found.append((1,) + signs)
    return found


def verify_holonomy():
    a, b = generator_a(), generator_b()
    form = LORENTZ_FORM
    J = Matrix.diagonal(form)
    preserves = a.preserves(J) and b.preserves(J)
    if not preserves:
        alternatives = find_diagonal_form([a, b])
        if alternatives:
            form = alternatives[0]
            preserves = True
    relator = evaluate_word(RELATOR, {"a": a, "b": b})
    return HolonomyReport(a.order(), b.order(), relator == Matrix.identity(5), tuple(form),
                          preserves, a.determinant(), b.determinant())
