"""
Fraction-free rank over cyclotomic fields
"""
import logging
from typing import List, Sequence

from services.cyclotomic import CyclotomicNumber

logger = logging.getLogger(__name__)


def fraction_free_rank(rows: Sequence[Sequence[CyclotomicNumber]]) -> int:
    """Rank by Bareiss elimination; each step divides exactly by the previous pivot"""
    M: List[List[CyclotomicNumber]] = [[CyclotomicNumber.coerce(x) for x in row] for row in rows]
    if not M:
        return 0
    n_rows, n_cols = len(M), len(M[0])
    previous = CyclotomicNumber.one()
    rank = 0
    for col in range(n_cols):
        if rank == n_rows:
            break
        pivot_row = next((i for i in range(rank, n_rows) if not M[i][col].is_zero()), None)
        if pivot_row is None:
            continue
        M[rank], M[pivot_row] = M[pivot_row], M[rank]
        pivot = M[rank][col]
        for i in range(rank + 1, n_rows):
            factor = M[i][col]
            for j in range(col + 1, n_cols):
                M[i][j] = (pivot * M[i][j] - factor * M[rank][j]) / previous
            M[i][col] = CyclotomicNumber.zero()
        previous = pivot
        rank += 1
    logger.debug(f"Bareiss rank {rank} for {n_rows}x{n_cols} matrix")
    return rank
