"""Independent reference computations used only by the test suite."""

import sympy
from sympy.polys.domains import GF as SGF
from sympy.polys.matrices import DomainMatrix


def _to_sympy(A):
    F = A.field
    if F.kind == "Q":
        return DomainMatrix([[sympy.QQ(int(x.numerator), int(x.denominator)) for x in row] for row in A.entries],
                            (A.rows, A.cols), sympy.QQ)
    if F.order != F.characteristic:
        raise ValueError("oracle supports Q and prime fields only")
    dom = SGF(F.characteristic)
    return DomainMatrix([[dom(int(x)) for x in row] for row in A.entries], (A.rows, A.cols), dom)


def sympy_rank(A) -> int:
    return _to_sympy(A).rank() if A.rows and A.cols else 0


def jordan_type(N) -> list[int]:
    """Block sizes (descending) of a nilpotent matrix from rank(N^k); computed with sympy."""
    n = N.rows
    S = _to_sympy(N)
    ranks = [n]
    P = S
    while ranks[-1]:
        ranks.append(P.rank())
        P = P * S
    # number of blocks of size >= k is rank(N^(k-1)) - rank(N^k)
    at_least = [ranks[k - 1] - ranks[k] for k in range(1, len(ranks))]
    sizes = []
    for k in range(len(at_least), 0, -1):
        exactly = at_least[k - 1] - (at_least[k] if k < len(at_least) else 0)
        sizes.extend([k] * exactly)
    return sizes


def clebsch_gordan(a: int, b: int) -> list[int]:
    return sorted((a + b - 1 - 2 * i for i in range(min(a, b))), reverse=True)
