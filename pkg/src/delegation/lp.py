"""Dense exact-rational simplex for small linear programs.

Solves::

    maximize    c @ x
    subject to  A_ub @ x <= b_ub
                A_eq @ x == b_eq
                x >= 0

with exact rational arithmetic throughout. Two-phase method, Bland's rule
for pivoting (no cycling). Intended for the tiny systems that come out of
the trust checker, not for anything large.

Internally uses ``gmpy2.mpq`` when gmpy2 is installed (about ten times
faster than :class:`fractions.Fraction`); inputs and outputs are always
Fractions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

try:
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    _Q = Fraction

__all__ = ["LPResult", "InfeasibleError", "UnboundedError", "maximize"]


class InfeasibleError(ValueError):
    """The constraint set is empty."""


class UnboundedError(ValueError):
    """The objective is unbounded above on the feasible set."""


@dataclass(frozen=True)
class LPResult:
    x: tuple[Fraction, ...]
    value: Fraction


def _q(v):
    return _Q(Fraction(v)) if _Q is not Fraction else Fraction(v)


def _frac(v) -> Fraction:
    return Fraction(int(v.numerator), int(v.denominator))


def _pivot(tab: list[list[Fraction]], basis: list[int], row: int, col: int) -> None:
    piv = tab[row][col]
    prow = tab[row]
    if piv != 1:
        prow[:] = [v / piv for v in prow]
    for r, line in enumerate(tab):
        if r == row:
            continue
        f = line[col]
        if f:
            line[:] = [a - f * b for a, b in zip(line, prow)]
    basis[row] = col


def _run(tab: list[list[Fraction]], basis: list[int], ncols: int, allowed: int) -> None:
    # Objective row is last, stored as reduced costs of a *minimization*:
    # entering column has negative reduced cost.
    obj = tab[-1]
    m = len(tab) - 1
    while True:
        col = next((j for j in range(allowed) if obj[j] < 0), None)
        if col is None:
            return
        best = None
        row = None
        for r in range(m):
            a = tab[r][col]
            if a > 0:
                ratio = tab[r][ncols] / a
                if best is None or ratio < best or (ratio == best and basis[r] < basis[row]):
                    best, row = ratio, r
        if row is None:
            raise UnboundedError("objective unbounded")
        _pivot(tab, basis, row, col)


def maximize(
    c: Sequence,
    A_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    A_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
) -> LPResult:
    """Maximize ``c @ x`` over ``x >= 0`` subject to the given constraints.

    Every coefficient is converted with ``Fraction(...)``, so ints,
    Fractions and decimal strings are all accepted. Raises
    :class:`InfeasibleError` or :class:`UnboundedError`.
    """
    n = len(c)
    c = [_q(v) for v in c]
    rows: list[tuple[list, object, bool]] = []
    for a, b in zip(A_ub, b_ub):
        rows.append(([_q(v) for v in a], _q(b), True))
    for a, b in zip(A_eq, b_eq):
        rows.append(([_q(v) for v in a], _q(b), False))
    for a, _, _ in rows:
        if len(a) != n:
            raise ValueError("constraint row length does not match objective")

    if all(ub and b >= 0 for _, b, ub in rows):
        return _maximize_feasible_origin(c, [a for a, _, _ in rows], [b for _, b, _ in rows])

    n_slack = sum(1 for _, _, ub in rows if ub)
    m = len(rows)
    # Column layout: x (n) | slacks | artificials (one per row) | rhs
    n_art = m
    ncols = n + n_slack + n_art
    tab: list[list[Fraction]] = []
    basis: list[int] = []
    s = 0
    for i, (a, b, ub) in enumerate(rows):
        line = a + [_Q(0)] * (n_slack + n_art) + [b]
        if ub:
            line[n + s] = _Q(1)
            s += 1
        if b < 0:
            line = [-v for v in line]
        line[n + n_slack + i] = _Q(1)
        tab.append(line)
        basis.append(n + n_slack + i)

    # Phase 1: minimize the sum of artificials.
    phase1 = [_Q(0)] * (ncols + 1)
    for line in tab:
        for j in range(n + n_slack):
            phase1[j] -= line[j]
        phase1[ncols] -= line[ncols]
    tab.append(phase1)
    _run(tab, basis, ncols, n + n_slack)
    if tab[-1][ncols] != 0:
        raise InfeasibleError("no feasible point")

    # Drive artificials out of the basis where possible; drop redundant rows.
    r = 0
    while r < len(tab) - 1:
        if basis[r] >= n + n_slack:
            col = next((j for j in range(n + n_slack) if tab[r][j] != 0), None)
            if col is None:
                del tab[r]
                del basis[r]
                continue
            _pivot(tab, basis, r, col)
        r += 1

    # Phase 2: minimize -c @ x.
    obj = [_Q(0)] * (ncols + 1)
    for j in range(n):
        obj[j] = -c[j]
    for r, bcol in enumerate(basis):
        f = obj[bcol]
        if f:
            obj = [o - f * v for o, v in zip(obj, tab[r])]
    tab[-1] = obj
    _run(tab, basis, ncols, n + n_slack)

    x = [_Q(0)] * n
    for r, bcol in enumerate(basis):
        if bcol < n:
            x[bcol] = tab[r][ncols]
    value = sum((ci * xi for ci, xi in zip(c, x)), _Q(0))
    return LPResult(tuple(_frac(v) for v in x), _frac(value))


def _maximize_feasible_origin(c, A, b) -> LPResult:
    # x = 0 is feasible, so the slack basis starts phase 2 directly.
    n, m = len(c), len(A)
    ncols = n + m
    tab = []
    for i, (a, bi) in enumerate(zip(A, b)):
        line = a + [_Q(0)] * m + [bi]
        line[n + i] = _Q(1)
        tab.append(line)
    tab.append([-v for v in c] + [_Q(0)] * (m + 1))
    basis = list(range(n, n + m))
    _run(tab, basis, ncols, ncols)
    x = [_Q(0)] * n
    for r, bcol in enumerate(basis):
        if bcol < n:
            x[bcol] = tab[r][ncols]
    value = sum((ci * xi for ci, xi in zip(c, x)), _Q(0))
    return LPResult(tuple(_frac(v) for v in x), _frac(value))
