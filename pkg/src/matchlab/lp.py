"""
Exact rational linear programming: two-phase primal simplex with Bland's rule.

Problems are stated as ``minimize c.x subject to A_eq x = b_eq``, with
``x >= 0`` except for variables declared free. All arithmetic is done on
:class:`~fractions.Fraction`, so optimal values and basic solutions are exact
and pivoting is deterministic.
"""

from dataclasses import dataclass
from fractions import Fraction

from ._rational import to_fraction


class LPError(ArithmeticError):
    pass


@dataclass(frozen=True)
class LPResult:
    """
    Outcome of :func:`linprog_exact`.

    ``status`` is ``"optimal"``, ``"infeasible"`` or ``"unbounded"``. ``x``
    and ``value`` are set only when optimal.
    """

    status: str
    x: tuple = None
    value: Fraction = None
    iterations: int = 0

    @property
    def optimal(self):
        return self.status == "optimal"


class _Tableau:
    def __init__(self, rows, basis):
        self.rows = rows  # each row: coefficients + [rhs]
        self.basis = basis
        self.cost = None  # reduced costs + [-objective value]
        self.iterations = 0

    def pivot(self, r, c):
        row = self.rows[r]
        piv = row[c]
        if piv != 1:
            row = [v / piv for v in row]
            self.rows[r] = row
        nz = [j for j, v in enumerate(row) if v != 0]
        for i, other in enumerate(self.rows):
            f = other[c]
            if i != r and f != 0:
                for j in nz:
                    other[j] -= f * row[j]
        f = self.cost[c]
        if f != 0:
            for j in nz:
                self.cost[j] -= f * row[j]
        self.basis[r] = c
        self.iterations += 1

    def run(self, allowed):
        """Bland's rule iterations; returns False when unbounded."""
        while True:
            enter = next((j for j in allowed if self.cost[j] < 0), None)
            if enter is None:
                return True
            best = None
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    ratio = row[-1] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return False
            self.pivot(best[1], enter)


def _simplex(c, a_eq, b_eq):
    nrows = len(a_eq)
    nvars = len(c)
    rows = []
    for r, (row, b) in enumerate(zip(a_eq, b_eq)):
        row = list(row)
        if b < 0:
            row = [-v for v in row]
            b = -b
        rows.append(row + [Fraction(int(i == r)) for i in range(nrows)] + [b])
    art = list(range(nvars, nvars + nrows))
    tab = _Tableau(rows, list(art))
    # phase 1: minimize the sum of artificials
    ncols = nvars + nrows
    cost = [Fraction(0)] * (ncols + 1)
    for row in rows:
        for j in range(nvars):
            cost[j] -= row[j]
        cost[-1] -= row[-1]
    tab.cost = cost
    tab.run(range(nvars))
    if tab.cost[-1] != 0:
        return LPResult("infeasible", iterations=tab.iterations)
    # drive artificial variables out of the basis; drop redundant rows
    r = 0
    while r < len(tab.rows):
        if tab.basis[r] >= nvars:
            row = tab.rows[r]
            j = next((j for j in range(nvars) if row[j] != 0), None)
            if j is None:
                del tab.rows[r]
                del tab.basis[r]
                continue
            tab.pivot(r, j)
        r += 1
    for row in tab.rows:
        del row[nvars:ncols]
    # phase 2
    cost = list(c) + [Fraction(0)]
    for i, row in enumerate(tab.rows):
        cb = c[tab.basis[i]]
        if cb != 0:
            for j, v in enumerate(row):
                cost[j] -= cb * v
    tab.cost = cost
    if not tab.run(range(nvars)):
        return LPResult("unbounded", iterations=tab.iterations)
    x = [Fraction(0)] * nvars
    for i, row in enumerate(tab.rows):
        x[tab.basis[i]] = row[-1]
    return LPResult("optimal", tuple(x), -tab.cost[-1], tab.iterations)


def linprog_exact(c, a_eq, b_eq, free=()):
    """
    Minimize ``c.x`` subject to ``a_eq x = b_eq`` and ``x_j >= 0`` for
    ``j`` not in ``free``.

    Free variables are split into positive and negative parts internally.

    Examples
    --------

    >>> r = linprog_exact([1, 1], [[1, 2]], [4])
    >>> r.status, r.x, r.value
    ('optimal', (Fraction(0, 1), Fraction(2, 1)), Fraction(2, 1))
    >>> linprog_exact([-1], [[0]], [0]).status
    'unbounded'
    >>> linprog_exact([0], [[1]], [-1]).status
    'infeasible'
    """
    c = [to_fraction(v) for v in c]
    nvars = len(c)
    a_eq = [[to_fraction(v) for v in row] for row in a_eq]
    b_eq = [to_fraction(v) for v in b_eq]
    if any(len(row) != nvars for row in a_eq) or len(a_eq) != len(b_eq):
        raise LPError("inconsistent LP dimensions")
    free = sorted(set(free))
    # append the negative part of each free variable
    cc = c + [-c[j] for j in free]
    aa = [row + [-row[j] for j in free] for row in a_eq]
    res = _simplex(cc, aa, b_eq)
    if not res.optimal:
        return res
    x = list(res.x[:nvars])
    for t, j in enumerate(free):
        x[j] -= res.x[nvars + t]
    return LPResult("optimal", tuple(x), res.value, res.iterations)
