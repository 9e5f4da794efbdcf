"""Finsler energies: validation, fundamental form, sharp operator, sprays.

A validated structure caches its canonical objects (fundamental form matrix,
canonical spray, Berwald connection) and is immutable afterwards; the caches
are keyed by float coordinates only, so jet-valued evaluations never leak
lift-tagged values into shared state.
"""

from __future__ import annotations

import math

import numpy as np

from . import jets
from .calculus import (
    VectorField, VectorForm, d_K, d_function, exterior_derivative, field_apply,
    fn_bracket, frame_vector, identity_form, liouville_field,
    semibasic_residual, vertical_endomorphism,
)
from .core import BaseFunction, ScalarField, SampleGrid, sample_slit_points
from .errors import (
    HomogeneityFailure, NondegeneracyFailure, NotConnection, NotSemibasic,
    PositivityFailure,
)

DET_FLOOR = 1e-10
COND_LIMIT = 1e12
VALIDATION_TOL = 1e-9
CONNECTION_TOL = 1e-8


# ---------------------------------------------------------------------------
# fundamental form assembly


def _second_derivative(E, z, a, b):
    n2 = len(z)
    ea, eb = frame_vector(n2, a), frame_vector(n2, b)
    return jets.nth_directional(E.fn, z, [ea, eb])


def metric_matrix(E: ScalarField, n: int, z):
    """g_ij = d2 E / dy^i dy^j (the fundamental tensor)."""
    g = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            v = _second_derivative(E, z, n + i, n + j)
            g[i][j] = v
            g[j][i] = v
    return g


def omega_matrix(E: ScalarField, n: int, z):
    """Closed-form matrix of omega = d(d_J E): [[A, -g^T], [g, 0]].

    A_ij = E_{x^i y^j} - E_{x^j y^i} is the skew part of the mixed Hessian.
    """
    g = metric_matrix(E, n, z)
    mixed = [[_second_derivative(E, z, i, n + j) for j in range(n)] for i in range(n)]
    n2 = 2 * n
    m = [[0.0] * n2 for _ in range(n2)]
    for i in range(n):
        for j in range(n):
            m[i][j] = mixed[i][j] - mixed[j][i]
            m[i][n + j] = -g[j][i]
            m[n + i][j] = g[i][j]
    return m


class FundamentalForm:
    """The 2-form omega = d(d_J E), with a fast pointwise matrix path.

    ``two_form`` is assembled through the generic exterior calculus and is the
    reference path; ``matrix_at`` is the closed-form assembly used by linear
    solves.  Tests pin the two together.
    """

    def __init__(self, E: ScalarField, n: int):
        self.E = E
        self.n = n
        J = vertical_endomorphism(n)
        self.two_form = exterior_derivative(d_K(J, E))
        self.two_form.name = "omega"

    def matrix_at(self, z):
        return omega_matrix(self.E, self.n, z)

    def metric_at(self, z):
        return metric_matrix(self.E, self.n, z)

    def __call__(self, z, u, v):
        return self.two_form(z, u, v)


# ---------------------------------------------------------------------------
# linear solves over jet scalars


def _solve_jet_system(rows, rhs, z):
    """Gaussian elimination with pivoting on the real part, for jet entries."""
    m = [list(r) for r in rows]
    b = list(rhs)
    size = len(b)
    piv_max, piv_min = 0.0, math.inf
    for col in range(size):
        pivot_row = max(range(col, size), key=lambda r: abs(jets.realpart(m[r][col])))
        pv = abs(jets.realpart(m[pivot_row][col]))
        piv_max, piv_min = max(piv_max, pv), min(piv_min, pv)
        if pv == 0.0 or piv_max / pv > COND_LIMIT:
            raise NondegeneracyFailure(
                "fundamental form numerically singular during jet solve",
                point=[jets.realpart(c) for c in z], value=pv)
        if pivot_row != col:
            m[col], m[pivot_row] = m[pivot_row], m[col]
            b[col], b[pivot_row] = b[pivot_row], b[col]
        inv = 1.0 / m[col][col]
        for r in range(col + 1, size):
            f = m[r][col] * inv
            b[r] = b[r] - f * b[col]
            for c in range(col + 1, size):
                m[r][c] = m[r][c] - f * m[col][c]
    x = [0.0] * size
    for r in range(size - 1, -1, -1):
        acc = b[r]
        for c in range(r + 1, size):
            acc = acc - m[r][c] * x[c]
        x[r] = acc / m[r][r]
    return x


# ---------------------------------------------------------------------------
# the validated structure


class FinslerStructure:
    """Energy function E with its cached fundamental-form machinery."""

    def __init__(self, E: ScalarField, n: int, grid, validate: bool = True,
                 tol: float = VALIDATION_TOL, name: str = ""):
        self.E = E
        self.n = n
        self.grid = grid
        self.name = name or E.name or "finsler"
        self.omega = FundamentalForm(E, n)
        self._float_cache = {}
        self._spray = None
        self._berwald = None
        if validate:
            self._validate(tol)

    def __repr__(self):
        return f"FinslerStructure({self.name}, n={self.n})"

    def _validate(self, tol: float):
        C = liouville_field(self.n)
        CE = field_apply(C, self.E)
        for p in self.grid:
            z = p.coords()
            e = self.E(z)
            if not e > 0.0:
                raise PositivityFailure("energy not positive on the slit bundle",
                                        point=p, value=e)
            dev = CE(z) - 2.0 * e
            if abs(dev) > tol * max(1.0, abs(e)):
                raise HomogeneityFailure("energy not 2-homogeneous: CE != 2E",
                                         point=p, value=dev)
            det = abs(np.linalg.det(np.array(self.metric_at(z), dtype=float)))
            if det <= DET_FLOOR:
                raise NondegeneracyFailure("fundamental tensor degenerate",
                                           point=p, value=det)

    # -- cached pointwise data ------------------------------------------------

    def _omega_float(self, z):
        key = tuple(z)
        hit = self._float_cache.get(key)
        if hit is None:
            m = np.array(omega_matrix(self.E, self.n, z), dtype=float)
            cond = float(np.linalg.cond(m))
            hit = (m, cond)
            self._float_cache[key] = hit
        return hit

    def omega_matrix_at(self, z):
        return self.omega.matrix_at(z)

    def metric_at(self, z):
        return self.omega.metric_at(z)

    # -- sharp and friends ------------------------------------------------------

    def sharp_at(self, beta_values, z):
        """Solve sum_a X^a omega_ab = beta_b at one (possibly jet-valued) point."""
        if all(type(c) is not jets.Jet for c in z) \
                and all(type(c) is not jets.Jet for c in beta_values):
            m, cond = self._omega_float(z)
            if cond > COND_LIMIT:
                raise NondegeneracyFailure(
                    f"fundamental form ill-conditioned (cond={cond:.3e})",
                    point=list(z), value=cond)
            sol = np.linalg.solve(m.T, np.array(beta_values, dtype=float))
            return [float(v) + 0.0 for v in sol]  # +0.0 normalises -0.0
        m = self.omega.matrix_at(z)
        n2 = 2 * self.n
        rows = [[m[a][b] for a in range(n2)] for b in range(n2)]  # transpose
        return _solve_jet_system(rows, list(beta_values), z)


def validate_finsler(E: ScalarField, grid, n: int | None = None,
                     tol: float = VALIDATION_TOL, name: str = "") -> FinslerStructure:
    """Check positivity, 2-homogeneity, and nondegeneracy on the grid."""
    if n is None:
        n = grid.n if isinstance(grid, SampleGrid) else next(iter(grid)).n
    return FinslerStructure(E, n, grid, validate=True, tol=tol, name=name)


def fundamental_form(F: FinslerStructure) -> FundamentalForm:
    return F.omega


def sharp(F: FinslerStructure, beta) -> VectorField:
    """The unique X with i_X omega = beta, as a vector field."""
    n2 = 2 * F.n

    def ev(z):
        beta_values = [beta.fn(z, frame_vector(n2, b)) for b in range(n2)]
        return F.sharp_at(beta_values, z)

    return VectorField(ev, F.n, name=f"sharp({beta.name})", memo=True)


def gradient(F: FinslerStructure, f: ScalarField) -> VectorField:
    return sharp(F, d_function(f))


def canonical_spray(F: FinslerStructure) -> VectorField:
    """S0 = -(dE)#; a 2-homogeneous semispray."""
    if F._spray is None:
        F._spray = sharp(F, d_function(F.E).scale(-1.0))
        F._spray.name = "S0"
    return F._spray


def berwald_connection(F: FinslerStructure) -> VectorForm:
    """h0 = (Id + [J, S0]) / 2, the connection generated by the canonical spray."""
    if F._berwald is None:
        J = vertical_endomorphism(F.n)
        s0 = canonical_spray(F)
        h0 = (identity_form(F.n) + fn_bracket(J, s0)).scale(0.5)
        h0.name = "h0"
        h0._matrix_memo = {}
        F._berwald = h0
    return F._berwald


def conformal_change(F: FinslerStructure, f: BaseFunction) -> FinslerStructure:
    """Rescale the energy by exp(f^v); returns a freshly validated structure."""
    phi = ScalarField(lambda z: jets.exp(f.fn(z[:F.n])), F.n, name=f"exp({f.name}^v)")
    E2 = phi * F.E
    E2.name = f"{F.name}~conformal({f.name})"
    return FinslerStructure(E2, F.n, F.grid, validate=True, name=E2.name)


# ---------------------------------------------------------------------------
# conservativity residuals


def _d_form_E_residual(F: FinslerStructure, K: VectorForm, points) -> float:
    """sup over points and frame of |dE(K e_a)|."""
    n2 = 2 * F.n
    worst = 0.0
    for p in points:
        z = p.coords()
        m = K.matrix(z)
        for b in range(n2):
            col = [m[a][b] for a in range(n2)]
            worst = max(worst, abs(jets.directional(F.E.fn, z, col)))
    return worst


def conservative_form_residual(F: FinslerStructure, L: VectorForm,
                               points=None, pre_tol: float = CONNECTION_TOL) -> float:
    """sup |d_L E| for a semibasic vector 1-form (checked first)."""
    points = points if points is not None else F.grid
    r = semibasic_residual(L, points)
    if r > pre_tol:
        raise NotSemibasic(f"form is not semibasic, residual {r:.3e}")
    return _d_form_E_residual(F, L, points)


def projector_residual(F: FinslerStructure, h: VectorForm, points=None) -> float:
    """sup of |h^2 - h|, |J o h - J|, |h o J| over points and the frame."""
    points = points if points is not None else F.grid
    n, n2 = F.n, 2 * F.n
    J = vertical_endomorphism(F.n)
    jm = J.matrix([0.0] * n2)
    worst = 0.0
    for p in points:
        z = p.coords()
        m = h.matrix(z)
        for b in range(n2):
            col = [m[a][b] for a in range(n2)]
            hcol = [sum(m[a][c] * col[c] for c in range(n2)) for a in range(n2)]
            worst = max(worst, max(abs(hcol[a] - col[a]) for a in range(n2)))
            jh = [sum(jm[a][c] * col[c] for c in range(n2)) for a in range(n2)]
            jcol = [jm[a][b] for a in range(n2)]
            worst = max(worst, max(abs(jh[a] - jcol[a]) for a in range(n2)))
        for i in range(n):
            hj = [m[a][n + i] for a in range(n2)]
            worst = max(worst, max(abs(v) for v in hj))
    return worst


def conservative_connection_residual(F: FinslerStructure, h: VectorForm,
                                     points=None, pre_tol: float = CONNECTION_TOL) -> float:
    """sup |d_h E| for an Ehresmann connection (projector laws checked first)."""
    points = points if points is not None else F.grid
    r = projector_residual(F, h, points)
    if r > pre_tol:
        raise NotConnection(f"projector laws fail, residual {r:.3e}")
    return _d_form_E_residual(F, h, points)


# ---------------------------------------------------------------------------
# fixtures


def _energy_euclidean(n: int) -> ScalarField:
    def ev(z):
        return 0.5 * sum(z[n + i] * z[n + i] for i in range(n))

    return ScalarField(ev, n, "E_euclidean")


def _energy_riemannian_exp(n: int) -> ScalarField:
    def ev(z):
        quad = jets.exp(2.0 * z[0]) * z[n] * z[n]
        for i in range(1, n):
            quad = quad + z[n + i] * z[n + i]
        return 0.5 * quad

    return ScalarField(ev, n, "E_riemannian_exp")


def _energy_randers(n: int, drift: float = 0.3) -> ScalarField:
    def ev(z):
        norm = jets.sqrt(sum(z[n + i] * z[n + i] for i in range(n)))
        f = norm + drift * z[n]
        return 0.5 * f * f

    return ScalarField(ev, n, f"E_randers_{drift}")


FIXTURE_BUILDERS = {
    "euclidean": _energy_euclidean,
    "riemannian-exp": _energy_riemannian_exp,
    "randers-0.3": _energy_randers,
}


def fixture_ids():
    return list(FIXTURE_BUILDERS)


def fixture_energy(fixture_id: str, n: int = 2) -> ScalarField:
    try:
        return FIXTURE_BUILDERS[fixture_id](n)
    except KeyError:
        raise KeyError(f"unknown fixture id {fixture_id!r}; known: {fixture_ids()}") from None


def finsler_fixture(fixture_id: str, grid=None, n: int = 2) -> FinslerStructure:
    """Build and validate a named fixture on the given (or default) grid."""
    if grid is None:
        grid = sample_slit_points(n, 32, seed=42)
    return validate_finsler(fixture_energy(fixture_id, n), grid, n=n, name=fixture_id)
