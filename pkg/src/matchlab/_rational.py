"""Exact rational helpers shared by the algebraic modules."""

from fractions import Fraction
from numbers import Rational


def to_fraction(x):
    """
    Convert a scalar to an exact :class:`~fractions.Fraction`.

    Floats go through their shortest decimal representation, so ``0.1``
    becomes ``1/10`` rather than the binary expansion.

    >>> to_fraction("3/4")
    Fraction(3, 4)
    >>> to_fraction(0.1)
    Fraction(1, 10)
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    # numpy scalars and the like
    if hasattr(x, "item"):
        return to_fraction(x.item())
    raise TypeError(f"cannot convert {x!r} to an exact rational")


def to_fractions(xs):
    return tuple(to_fraction(x) for x in xs)


def format_fraction(x):
    """Serialize as ``"p/q"`` (or ``"p"`` for integers)."""
    x = to_fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _rref(rows, ncols):
    """In-place reduced row echelon form; returns the pivot columns."""
    pivots = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        if piv != 1:
            rows[r] = [v / piv for v in rows[r]]
        pr = rows[r]
        for i in range(nrows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], pr)]
        pivots.append(c)
        r += 1
    return pivots


def rank(matrix):
    """Exact rank of a matrix given as a list of rows."""
    rows = [[Fraction(v) for v in row] for row in matrix]
    if not rows:
        return 0
    return len(_rref(rows, len(rows[0])))


def solve(matrix, rhs):
    """
    Solve ``matrix @ x = rhs`` exactly.

    Returns one solution (free variables set to zero) or ``None`` when the
    system is inconsistent.
    """
    ncols = len(matrix[0]) if matrix else 0
    rows = [[Fraction(v) for v in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    pivots = _rref(rows, ncols + 1)
    if pivots and pivots[-1] == ncols:
        return None
    x = [Fraction(0)] * ncols
    for r, c in enumerate(pivots):
        x[c] = rows[r][ncols]
    return x


def inverse(matrix):
    """Exact inverse of a square matrix; raises :class:`ValueError` if singular."""
    n = len(matrix)
    rows = [
        [Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)]
        for i, row in enumerate(matrix)
    ]
    pivots = _rref(rows, n)
    if len(pivots) < n:
        raise ValueError("matrix is singular")
    return [row[n:] for row in rows]


def matvec(matrix, x):
    return [sum((a * b for a, b in zip(row, x)), Fraction(0)) for row in matrix]


def transpose(matrix):
    return [list(col) for col in zip(*matrix)]


def matmul(a, b):
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]
