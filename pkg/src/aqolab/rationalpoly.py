"""Exact polynomial arithmetic over the rationals.

Coefficient lists are low-to-high; Fraction everywhere, no floats.  Includes
Lagrange interpolation and an error-locator decoder that recovers a degree-d
polynomial from k samples of which at most t are corrupted (k >= d + 2t + 1).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DecodeFailureError, PreconditionError

Poly = list[Fraction]

ZERO = Fraction(0)
ONE = Fraction(1)


def poly_trim(p: Poly) -> Poly:
    while p and p[-1] == 0:
        p.pop()
    return p


def poly_eval(p, x: Fraction) -> Fraction:
    acc = ZERO
    for c in reversed(p):
        acc = acc * x + c
    return acc


def poly_add(a, b) -> Poly:
    out = [ZERO] * max(len(a), len(b))
    for i, c in enumerate(a):
        out[i] += c
    for i, c in enumerate(b):
        out[i] += c
    return poly_trim(out)


def poly_scale(a, s: Fraction) -> Poly:
    return poly_trim([c * s for c in a])


def poly_mul(a, b) -> Poly:
    if not a or not b:
        return []
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca == 0:
            continue
        for j, cb in enumerate(b):
            out[i + j] += ca * cb
    return poly_trim(out)


def poly_divmod(num, den) -> tuple[Poly, Poly]:
    den = poly_trim(list(den))
    if not den:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(num)
    quot = [ZERO] * max(0, len(rem) - len(den) + 1)
    inv_lead = ONE / den[-1]
    for i in range(len(rem) - len(den), -1, -1):
        c = rem[i + len(den) - 1] * inv_lead
        quot[i] = c
        if c != 0:
            for j, dc in enumerate(den):
                rem[i + j] -= c * dc
    return poly_trim(quot), poly_trim(rem)


def lagrange_interpolate(points) -> Poly:
    """Coefficients of the unique degree < len(points) interpolant."""
    xs = [x for x, _ in points]
    if len(set(xs)) != len(xs):
        raise PreconditionError("interpolation points must have distinct abscissae")
    result: Poly = []
    for i, (xi, yi) in enumerate(points):
        basis: Poly = [ONE]
        denom = ONE
        for j, (xj, _) in enumerate(points):
            if j == i:
                continue
            basis = poly_mul(basis, [-xj, ONE])
            denom *= xi - xj
        result = poly_add(result, poly_scale(basis, yi / denom))
    return result


def lagrange_basis_at(xs, i: int, x0: Fraction) -> Fraction:
    """L_i(x0) for nodes xs, evaluated directly as a product."""
    num = ONE
    den = ONE
    for j, xj in enumerate(xs):
        if j == i:
            continue
        num *= x0 - xj
        den *= xs[i] - xj
    return num / den


@dataclass(frozen=True)
class DecodedPolynomial:
    coefficients: tuple[Fraction, ...]
    error_locations: tuple[int, ...]

    def eval(self, x: Fraction) -> Fraction:
        return poly_eval(list(self.coefficients), x)


def _nullspace_vector(rows, n_cols: int) -> list[Fraction] | None:
    """One nonzero kernel vector of the k x n_cols rational matrix, or None."""
    mat = [list(r) for r in rows]
    pivots: list[tuple[int, int]] = []  # (row, col)
    row = 0
    for col in range(n_cols):
        pivot = next((r for r in range(row, len(mat)) if mat[r][col] != 0), None)
        if pivot is None:
            continue
        mat[row], mat[pivot] = mat[pivot], mat[row]
        inv = ONE / mat[row][col]
        mat[row] = [v * inv for v in mat[row]]
        for r in range(len(mat)):
            if r != row and mat[r][col] != 0:
                factor = mat[r][col]
                mat[r] = [a - factor * b for a, b in zip(mat[r], mat[row])]
        pivots.append((row, col))
        row += 1
        if row == len(mat):
            break
    pivot_cols = {c for _, c in pivots}
    free = [c for c in range(n_cols) if c not in pivot_cols]
    if not free:
        return None
    sol = [ZERO] * n_cols
    sol[free[-1]] = ONE
    for r, c in reversed(pivots):
        sol[c] = -sum(mat[r][j] * sol[j] for j in range(c + 1, n_cols))
    return sol


def berlekamp_welch(points, degree: int, t: int) -> DecodedPolynomial:
    """Recover P of degree <= `degree` from samples with <= t corruptions.

    Solves Q(x_i) = y_i E(x_i) for deg Q <= degree + t and deg E <= t, then
    P = Q / E.  Requirements: distinct x_i and t <= (k - degree - 1) / 2.
    """
    xs = [x for x, _ in points]
    ys = [y for _, y in points]
    k = len(points)
    if len(set(xs)) != k:
        raise PreconditionError("sample points must have distinct abscissae")
    if degree < 0 or t < 0:
        raise PreconditionError("degree and error budget must be nonnegative")
    if 2 * t > k - degree - 1:
        raise PreconditionError(
            f"error budget t={t} too large for k={k} samples of degree {degree}"
        )
    if t == 0:
        coeffs = lagrange_interpolate(points)
        if len(coeffs) > degree + 1:
            raise DecodeFailureError("clean interpolant exceeds the stated degree")
        return DecodedPolynomial(coefficients=tuple(coeffs), error_locations=())

    nq = degree + t + 1
    ne = t + 1
    rows = []
    for xi, yi in points:
        row = []
        power = ONE
        for _ in range(nq):
            row.append(power)
            power *= xi
        power = ONE
        for _ in range(ne):
            row.append(-yi * power)
            power *= xi
        rows.append(row)
    sol = _nullspace_vector(rows, nq + ne)
    if sol is None:
        raise DecodeFailureError("no nontrivial error-locator solution")
    q_poly = poly_trim(sol[:nq])
    e_poly = poly_trim(sol[nq:])
    if not e_poly:
        raise DecodeFailureError("error locator vanished identically")
    p_poly, rem = poly_divmod(q_poly, e_poly)
    if rem:
        raise DecodeFailureError("error locator does not divide the numerator")
    if len(p_poly) > degree + 1:
        raise DecodeFailureError("decoded polynomial exceeds the stated degree")
    errors = tuple(
        i for i, (xi, yi) in enumerate(points) if poly_eval(p_poly, xi) != yi
    )
    if len(errors) > t:
        raise DecodeFailureError(
            f"decoded polynomial disagrees with {len(errors)} > t = {t} samples"
        )
    return DecodedPolynomial(coefficients=tuple(p_poly), error_locations=errors)
