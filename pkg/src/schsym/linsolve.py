"""Exact Gaussian elimination over the rational-function field."""

from __future__ import annotations

from .ratfunc import RatFunc, RF_ONE, RF_ZERO


def solve(rows: list[list[RatFunc]], rhs: list[RatFunc]) -> list[RatFunc] | None:
    """Solve A x = b exactly; returns one solution (free unknowns set to 0)
    or None if inconsistent."""
    m = len(rows)
    n = len(rows[0]) if m else 0
    a = [list(r) + [rhs[i]] for i, r in enumerate(rows)]
    piv_col_of_row: list[int] = []
    row = 0
    for col in range(n):
        piv = next((r for r in range(row, m) if not a[r][col].is_zero()), None)
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        inv = RF_ONE / a[row][col]
        a[row] = [v * inv for v in a[row]]
        for r in range(m):
            if r != row and not a[r][col].is_zero():
                f = a[r][col]
                a[r] = [vr - f * vp for vr, vp in zip(a[r], a[row])]
        piv_col_of_row.append(col)
        row += 1
        if row == m:
            break
    for r in range(row, m):
        if not a[r][n].is_zero():
            return None
    x = [RF_ZERO] * n
    for r, col in enumerate(piv_col_of_row):
        x[col] = a[r][n]
    return x


def nullspace(rows: list[list[RatFunc]]) -> list[list[RatFunc]]:
    """Basis of the kernel of A, exactly."""
    m = len(rows)
    n = len(rows[0]) if m else 0
    a = [list(r) for r in rows]
    pivots: dict[int, int] = {}
    row = 0
    for col in range(n):
        piv = next((r for r in range(row, m) if not a[r][col].is_zero()), None)
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        inv = RF_ONE / a[row][col]
        a[row] = [v * inv for v in a[row]]
        for r in range(m):
            if r != row and not a[r][col].is_zero():
                f = a[r][col]
                a[r] = [vr - f * vp for vr, vp in zip(a[r], a[row])]
        pivots[col] = row
        row += 1
        if row == m:
            break
    basis = []
    free_cols = [c for c in range(n) if c not in pivots]
    for fc in free_cols:
        v = [RF_ZERO] * n
        v[fc] = RF_ONE
        for pc, pr in pivots.items():
            v[pc] = -a[pr][fc]
        basis.append(v)
    return basis
