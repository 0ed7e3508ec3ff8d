"""Multi-indices, graded-lex index sets and monomial evaluation.

Multi-indices are plain tuples of non-negative ints.
"""
from itertools import combinations_with_replacement

import numpy as np

from .errors import CoordinateRangeError, DimensionMismatchError, IndexOverflowError

MAX_DEGREE = 32

N1 = "N1"
TWO_N1 = "2N1"
N1_UNION_2N1 = "N1_union_2N1"
ALL_UP_TO = "all_up_to"


def multi_index(entries):
    idx = tuple(int(e) for e in entries)
    if not idx:
        raise DimensionMismatchError("multi-index must have at least one entry")
    if any(e < 0 for e in idx):
        raise ValueError(f"negative entry in multi-index {idx}")
    return idx


def degree(n):
    return sum(n)


def zero_index(d):
    return (0,) * d


def unit_index(i, d):
    """Kronecker tuple with a 1 in (1-based) slot ``i``."""
    if d < 1:
        raise DimensionMismatchError(f"dimension must be >= 1, got {d}")
    if not 1 <= i <= d:
        raise CoordinateRangeError(f"coordinate {i} out of range 1..{d}")
    return tuple(1 if j == i - 1 else 0 for j in range(d))


def add(m, n):
    if len(m) != len(n):
        raise DimensionMismatchError(f"cannot add {m} and {n}")
    out = tuple(a + b for a, b in zip(m, n))
    if degree(out) > MAX_DEGREE:
        raise IndexOverflowError(f"{m} + {n} exceeds degree bound {MAX_DEGREE}")
    return out


def graded_lex_key(n):
    # (1,0) precedes (0,1) within a degree
    return (degree(n), tuple(-e for e in n))


def indices_up_to(d, D):
    if d < 1:
        raise DimensionMismatchError(f"dimension must be >= 1, got {d}")
    if D < 0:
        raise ValueError(f"degree bound must be >= 0, got {D}")
    out = []
    for deg in range(D + 1):
        level = []
        for combo in combinations_with_replacement(range(d), deg):
            n = [0] * d
            for c in combo:
                n[c] += 1
            level.append(tuple(n))
        out.extend(sorted(level, key=graded_lex_key))
    return out


def truncation_set(d, kind, D=None):
    """Ordered index set: ``N1``, ``2N1``, ``N1_union_2N1`` or ``all_up_to`` (needs ``D``)."""
    if d < 1:
        raise DimensionMismatchError(f"dimension must be >= 1, got {d}")
    zero = zero_index(d)
    units = [unit_index(i, d) for i in range(1, d + 1)]
    doubles = [tuple(2 * e for e in u) for u in units]
    if kind == N1:
        out = [zero] + units
    elif kind == TWO_N1:
        out = [zero] + doubles
    elif kind == N1_UNION_2N1:
        out = [zero] + units + doubles
    elif kind == ALL_UP_TO:
        if D is None:
            raise ValueError("all_up_to needs a degree bound D")
        return indices_up_to(d, D)
    else:
        raise ValueError(f"unknown truncation set kind {kind!r}")
    return sorted(out, key=graded_lex_key)


def monomial_eval(x, n, conj_n=None):
    """Evaluate ``x**n`` or, for complex points, ``z**m * conj(z)**conj_n``."""
    x = np.atleast_1d(np.asarray(x))
    if x.ndim != 1 or len(x) != len(n):
        raise DimensionMismatchError(f"point of dimension {x.shape} vs index {n}")
    out = 1
    for xi, e in zip(x.tolist(), n):
        if e:
            out = out * xi**e
    if conj_n is not None:
        if len(conj_n) != len(n):
            raise DimensionMismatchError(f"index {n} vs conjugate index {conj_n}")
        for xi, e in zip(x.tolist(), conj_n):
            if e:
                out = out * complex(xi).conjugate() ** e
    return out


def monomial_table(points, indices):
    """Matrix ``T[j, a] = points[j] ** indices[a]`` for an (s, d) array of points."""
    points = np.asarray(points)
    if points.ndim != 2:
        raise DimensionMismatchError("points must be an (s, d) array")
    s, d = points.shape
    exps = np.asarray(indices, dtype=int).reshape(len(indices), d)
    if len(indices) == 0:
        return np.ones((s, 0), dtype=points.dtype)
    # integer powers by repeated products keep 0**0 == 1 and stay exact for small ints
    out = np.ones((s, len(indices)), dtype=np.result_type(points.dtype, float))
    for c in range(d):
        col = points[:, c][:, None]
        out = out * col ** exps[:, c][None, :]
    return out


def to_json(n):
    return [int(e) for e in n]


def from_json(obj):
    return multi_index(obj)
