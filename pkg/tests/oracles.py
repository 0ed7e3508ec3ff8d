"""Brute-force reference computations, written without the library's code paths."""
import itertools

import numpy as np


def power(x, n):
    out = 1
    for xi, e in zip(x, n):
        for _ in range(e):
            out *= xi
    return out


def brute_moment(atoms, n):
    """sum_j w_j x_j^n over (point, weight) pairs, plain Python loops."""
    return sum(w * power(p, n) for p, w in atoms)


def brute_complex_moment(atoms, m, n):
    return sum(w * power(p, m) * power([complex(z).conjugate() for z in p], n) for p, w in atoms)


def brute_poly(coeffs, x):
    return sum(c * power(x, k) for k, c in coeffs.items())


def reweighted(atoms, coeffs):
    """Atoms of |p_xi|^2 dmu."""
    return [(p, w * abs(brute_poly(coeffs, p)) ** 2) for p, w in atoms]


def all_indices(d, D):
    return [n for n in itertools.product(range(D + 1), repeat=d) if sum(n) <= D]


def random_atoms(rng, d, max_atoms=5, lo=-2.0, hi=2.0, complex_points=False):
    s = int(rng.integers(1, max_atoms + 1))
    atoms = []
    for _ in range(s):
        p = rng.uniform(lo, hi, size=d)
        if complex_points:
            p = p + 1j * rng.uniform(lo, hi, size=d)
        w = float(rng.uniform(0.0, 1.0))
        atoms.append((p.tolist(), w if w > 0 else 0.5))
    return atoms


def random_coeffs(rng, d, max_deg, complex_coeffs=True, max_terms=4):
    idx = all_indices(d, max_deg)
    k = int(rng.integers(1, min(max_terms, len(idx)) + 1))
    chosen = rng.choice(len(idx), size=k, replace=False)
    out = {}
    for c in chosen:
        val = float(rng.normal())
        if complex_coeffs:
            val = complex(val, float(rng.normal()))
        out[idx[c]] = val
    return out


def random_psd_blocks(rng, r, s):
    """s random Hermitian PSD r x r matrices of random ranks."""
    blocks = []
    for _ in range(s):
        rank = int(rng.integers(0, r + 1))
        A = rng.normal(size=(r, rank)) + 1j * rng.normal(size=(r, rank))
        blocks.append(A @ A.conj().T)
    return blocks


def two_by_two_eigenvalues(a, b, c):
    """Closed-form eigenvalues of the real symmetric [[a, b], [b, c]]."""
    mean = (a + c) / 2
    rad = np.sqrt(((a - c) / 2) ** 2 + b * b)
    return mean - rad, mean + rad
