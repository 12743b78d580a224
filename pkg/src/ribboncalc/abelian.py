"""Finitely generated abelian groups and exact integer Smith normal form.

All arithmetic is over Python ints, so there is no overflow or precision
concern.  The Smith form here is the canonical homology oracle for the rest
of the package: first homology groups of surgered boundaries are cokernels
of integer linking matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd


@dataclass(frozen=True)
class AbelianGroup:
    """A finitely generated abelian group in canonical form.

    ``torsion`` is the chain of invariant factors d1 | d2 | ... with every
    entry >= 2.  Two groups are isomorphic iff the dataclasses are equal.
    """

    free_rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.free_rank < 0:
            raise ValueError("free rank must be nonnegative")
        for d in self.torsion:
            if d < 2:
                raise ValueError("invariant factors must be >= 2")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a != 0:
                raise ValueError("invariant factors must form a divisibility chain")

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts) if parts else "0"


def smith_invariants(matrix: list[list[int]]) -> list[int]:
    """Diagonal of the Smith normal form, as nonnegative ints d1 | d2 | ...

    Zero entries (rank deficiency) are kept at the end of the list.  The
    input is not modified.
    """
    a = [list(map(int, row)) for row in matrix]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    for row in a:
        if len(row) != cols:
            raise ValueError("matrix rows have unequal lengths")

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]

    diag: list[int] = []
    t = 0
    while t < rows and t < cols:
        # Locate a nonzero pivot in the trailing submatrix.
        pivot = None
        for i in range(t, rows):
            for j in range(t, cols):
                if a[i][j] != 0:
                    pivot = (i, j)
                    break
            if pivot:
                break
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])

        while True:
            # Clear column t with row operations; a nonzero remainder has
            # smaller magnitude than the pivot, so swapping it up strictly
            # shrinks the pivot and the loop terminates.
            for i in range(t + 1, rows):
                while a[i][t] != 0:
                    q = a[i][t] // a[t][t]
                    for j in range(t, cols):
                        a[i][j] -= q * a[t][j]
                    if a[i][t]:
                        swap_rows(t, i)
            # Clear row t with column operations, same scheme.
            for j in range(t + 1, cols):
                while a[t][j] != 0:
                    q = a[t][j] // a[t][t]
                    for i in range(t, rows):
                        a[i][j] -= q * a[i][t]
                    if a[t][j]:
                        swap_cols(t, j)
            if any(a[i][t] for i in range(t + 1, rows)):
                continue
            # Pivot must divide the rest of the submatrix; if not, fold the
            # offending row into row t and redo the elimination.
            offender = None
            for i in range(t + 1, rows):
                for j in range(t + 1, cols):
                    if a[i][j] % a[t][t] != 0:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            for j in range(t, cols):
                a[t][j] += a[offender][j]
        diag.append(abs(a[t][t]))
        t += 1

    while len(diag) < min(rows, cols):
        diag.append(0)
    # Normalize the divisibility chain (defensive; the division fix above
    # already guarantees it for nonzero entries).
    nonzero = [d for d in diag if d]
    zeros = len(diag) - len(nonzero)
    for i in range(len(nonzero)):
        for j in range(i + 1, len(nonzero)):
            g = gcd(nonzero[i], nonzero[j])
            lcm = nonzero[i] // g * nonzero[j]
            nonzero[i], nonzero[j] = g, lcm
    return nonzero + [0] * zeros


def cokernel(matrix: list[list[int]], generators: int | None = None) -> AbelianGroup:
    """Cokernel of an integer matrix acting on Z^generators by columns.

    ``generators`` defaults to the number of rows, i.e. the matrix columns
    are relations among the row generators.
    """
    rows = len(matrix)
    if generators is None:
        generators = rows
    if rows == 0:
        return AbelianGroup(free_rank=generators)
    diag = smith_invariants(matrix)
    rank = sum(1 for d in diag if d != 0)
    torsion = tuple(d for d in diag if d > 1)
    return AbelianGroup(free_rank=generators - rank, torsion=torsion)


def symmetric_signature(matrix: list[list[int]]) -> int:
    """Signature of a symmetric integer matrix, computed exactly.

    Uses symmetric Gaussian reduction over the rationals; when the diagonal
    of the remaining block vanishes, a nonzero off-diagonal entry spans a
    hyperbolic plane contributing signature zero.
    """
    n = len(matrix)
    a = [[Fraction(matrix[i][j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(n):
            if a[i][j] != a[j][i]:
                raise ValueError("matrix is not symmetric")
    active = list(range(n))
    pos = neg = 0
    while active:
        piv = next((i for i in active if a[i][i] != 0), None)
        if piv is not None:
            p = a[piv][piv]
            if p > 0:
                pos += 1
            else:
                neg += 1
            rest = [i for i in active if i != piv]
            for i in rest:
                for j in rest:
                    a[i][j] -= a[i][piv] * a[piv][j] / p
            active = rest
            continue
        pair = None
        for i in active:
            for j in active:
                if i != j and a[i][j] != 0:
                    pair = (i, j)
                    break
            if pair:
                break
        if pair is None:
            break  # remaining block is zero
        i0, j0 = pair
        b = a[i0][j0]
        pos += 1
        neg += 1
        rest = [i for i in active if i not in (i0, j0)]
        for i in rest:
            for j in rest:
                a[i][j] -= (a[i][i0] * a[j0][j] + a[i][j0] * a[i0][j]) / b
        active = rest
    return pos - neg
