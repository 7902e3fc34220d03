"""Exact arithmetic helpers: rationals, integer matrices, Smith normal form.

Everything here works over `int` / `fractions.Fraction` and is deterministic.
Matrices are tuples of tuples (rows); vectors are tuples.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import SingularMap

Matrix = tuple[tuple[Fraction, ...], ...]
IntMatrix = tuple[tuple[int, ...], ...]


def frac(value) -> Fraction:
    """Parse ints, floats-free strings like '1/2' or '-3', and Fractions."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def iroot(n: int, k: int) -> int:
    """Floor of the k-th root of a nonnegative integer, exact."""
    if n < 0 or k <= 0:
        raise ValueError("iroot needs n >= 0, k > 0")
    if n in (0, 1):
        return n
    x = 1 << (-(-n.bit_length() // k))  # upper bound: 2^ceil(bits/k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x ** k > n:
        x -= 1
    return x


def nth_root_fraction(q: Fraction, k: int, digits: int = 50) -> tuple[Fraction, bool]:
    """k-th root of a positive rational.

    Returns (root, exact). When q is a perfect k-th power the root is exact;
    otherwise it is a correctly-rounded approximation with `digits` decimal
    digits, still returned as a Fraction.
    """
    if q <= 0:
        raise ValueError("nth_root_fraction needs q > 0")
    num, den = q.numerator, q.denominator
    rn, rd = iroot(num, k), iroot(den, k)
    if rn ** k == num and rd ** k == den:
        return Fraction(rn, rd), True
    scale = 10 ** digits
    # (num/den)^(1/k) = (num * den^(k-1))^(1/k) / den
    approx = iroot(num * den ** (k - 1) * scale ** k, k)
    return Fraction(approx, den * scale), False


def mat_from(rows: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(frac(x) for x in row) for row in rows)


def int_mat_from(rows: Sequence[Sequence]) -> IntMatrix:
    out = []
    for row in rows:
        r = []
        for x in row:
            f = frac(x)
            if f.denominator != 1:
                raise ValueError(f"expected integer entry, got {x!r}")
            r.append(f.numerator)
        out.append(tuple(r))
    return tuple(out)


def identity_matrix(n: int) -> IntMatrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def mat_mul(a, b):
    """Matrix product; works for int or Fraction entries."""
    m, k, n = len(a), len(b), len(b[0]) if b else 0
    assert all(len(row) == k for row in a)
    return tuple(
        tuple(sum(a[i][t] * b[t][j] for t in range(k)) for j in range(n))
        for i in range(m)
    )


def mat_vec(a, v):
    return tuple(sum(a[i][j] * v[j] for j in range(len(v))) for i in range(len(a)))


def det(rows) -> Fraction:
    """Exact determinant by fraction-free-ish Gaussian elimination."""
    n = len(rows)
    m = [[Fraction(x) for x in row] for row in rows]
    sign = 1
    out = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            sign = -sign
        p = m[col][col]
        out *= p
        for r in range(col + 1, n):
            if m[r][col] != 0:
                factor = m[r][col] / p
                for c in range(col, n):
                    m[r][c] -= factor * m[col][c]
    return sign * out


def inverse(rows) -> Matrix:
    """Exact inverse of a square matrix with rational entries."""
    n = len(rows)
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(rows)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            raise SingularMap("matrix is singular")
        m[col], m[pivot] = m[pivot], m[col]
        p = m[col][col]
        m[col] = [x / p for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                factor = m[r][col]
                m[r] = [a - factor * b for a, b in zip(m[r], m[col])]
    return tuple(tuple(row[n:]) for row in m)


def rank(rows) -> int:
    if not rows:
        return 0
    m = [[Fraction(x) for x in row] for row in rows]
    nrows, ncols = len(m), len(m[0])
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, nrows) if m[i][col] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        p = m[r][col]
        m[r] = [x / p for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
        if r == nrows:
            break
    return r


def rref(rows) -> Matrix:
    """Reduced row echelon form with zero rows dropped (canonical span basis)."""
    if not rows:
        return ()
    m = [[Fraction(x) for x in row] for row in rows]
    nrows, ncols = len(m), len(m[0])
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, nrows) if m[i][col] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        p = m[r][col]
        m[r] = [x / p for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
        if r == nrows:
            break
    return tuple(tuple(row) for row in m[:r])


def null_space(rows) -> Matrix:
    """Canonical rational basis (rows) of the null space of the given matrix."""
    if not rows:
        return ()
    ncols = len(rows[0])
    red = rref(rows)
    pivots = []
    for row in red:
        for j, x in enumerate(row):
            if x != 0:
                pivots.append(j)
                break
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for j in free:
        vec = [Fraction(0)] * ncols
        vec[j] = Fraction(1)
        for row, pj in zip(red, pivots):
            vec[pj] = -row[j]
        basis.append(tuple(vec))
    return tuple(basis)


def smith_normal_form(a: Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form over the integers.

    Returns (U, D, V) with U @ A @ V = D, U and V unimodular, D diagonal with
    d_1 | d_2 | ... (nonnegative), then zeros.
    """
    m = [list(row) for row in a]
    nr = len(m)
    nc = len(m[0]) if nr else 0
    u = [list(row) for row in identity_matrix(nr)]
    v = [list(row) for row in identity_matrix(nc)]

    def swap_rows(i, j):
        m[i], m[j] = m[j], m[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in m:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, c):  # row[dst] += c*row[src]
        m[dst] = [x + c * y for x, y in zip(m[dst], m[src])]
        u[dst] = [x + c * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, c):
        for row in m:
            row[dst] += c * row[src]
        for row in v:
            row[dst] += c * row[src]

    def negate_row(i):
        m[i] = [-x for x in m[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    while t < min(nr, nc):
        # find a pivot
        pos = None
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                if m[i][j] != 0 and (best is None or abs(m[i][j]) < best):
                    best = abs(m[i][j])
                    pos = (i, j)
        if pos is None:
            break
        swap_rows(t, pos[0])
        swap_cols(t, pos[1])
        while True:
            # clear column t
            done = True
            for i in range(t + 1, nr):
                if m[i][t] != 0:
                    q = m[i][t] // m[t][t]
                    add_row(t, i, -q)
                    if m[i][t] != 0:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, nc):
                if m[t][j] != 0:
                    q = m[t][j] // m[t][t]
                    add_col(t, j, -q)
                    if m[t][j] != 0:
                        swap_cols(t, j)
                        done = False
            if done:
                break
        if m[t][t] < 0:
            negate_row(t)
        t += 1

    # enforce divisibility chain
    changed = True
    while changed:
        changed = False
        for i in range(min(nr, nc) - 1):
            a_, b_ = m[i][i], m[i + 1][i + 1]
            if a_ != 0 and b_ % a_ != 0:
                # bring b into range with a via standard SNF trick
                add_col(i + 1, i, 1)
                # re-reduce the 2x2 corner
                while m[i + 1][i] != 0:
                    q = m[i][i] // m[i + 1][i] if m[i + 1][i] != 0 else 0
                    if abs(m[i + 1][i]) <= abs(m[i][i]):
                        q = m[i][i] // m[i + 1][i]
                        add_row(i + 1, i, -q)
                    swap_rows(i, i + 1)
                while m[i][i + 1] != 0:
                    q = m[i][i + 1] // m[i][i]
                    add_col(i, i + 1, -q)
                if m[i][i] < 0:
                    negate_row(i)
                if m[i + 1][i + 1] < 0:
                    negate_row(i + 1)
                changed = True
    return (tuple(tuple(r) for r in u),
            tuple(tuple(r) for r in m),
            tuple(tuple(r) for r in v))


def solve_integer(a: Sequence[Sequence[int]], b: Sequence[int]) -> tuple[int, ...] | None:
    """One integer solution y of A y = b, or None when none exists."""
    nr = len(a)
    nc = len(a[0]) if nr else 0
    u, d, v = smith_normal_form(a)
    ub = mat_vec(u, tuple(b))
    z = [0] * nc
    for i in range(nr):
        di = d[i][i] if i < nc else 0
        if di == 0:
            if ub[i] != 0:
                return None
        else:
            if ub[i] % di != 0:
                return None
            z[i] = ub[i] // di
    return mat_vec(v, tuple(z))


def lattice_contains(generators: Sequence[Sequence], target: Sequence) -> bool:
    """Does target lie in the set of integer combinations of the generator vectors?"""
    if not generators:
        return all(frac(x) == 0 for x in target)
    denom = 1
    for g in generators:
        for x in g:
            denom = denom * frac(x).denominator // _gcd(denom, frac(x).denominator)
    for x in target:
        denom = denom * frac(x).denominator // _gcd(denom, frac(x).denominator)
    n = len(target)
    # matrix whose columns are the generators, cleared of denominators
    a_int = tuple(tuple(int(frac(generators[j][i]) * denom)
                        for j in range(len(generators)))
                  for i in range(n))
    t_int = tuple(int(frac(x) * denom) for x in target)
    return solve_integer(a_int, t_int) is not None


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a or 1


def in_span_mod_lattice(directions: Sequence[Sequence],
                        delta: Sequence) -> bool:
    """Is delta in span_Q(directions) + Z^n?  directions given as row vectors."""
    n = len(delta)
    if directions:
        rows = tuple(tuple(frac(x) for x in d) for d in directions)
        ann = null_space(rows)  # basis of vectors orthogonal to every direction
    else:
        ann = tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))
    if not ann:
        return True
    proj_delta = mat_vec(ann, tuple(frac(x) for x in delta))
    # image of Z^n under the annihilator map: lattice spanned by its columns
    cols = tuple(tuple(ann[i][j] for i in range(len(ann))) for j in range(n))
    return lattice_contains(cols, proj_delta)
