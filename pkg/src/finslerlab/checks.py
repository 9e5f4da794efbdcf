"""The residual check registry: sixteen identities run per fixture.

Each check measures a sup-norm residual over the sample grid and passes when
it is below the check's tolerance.  Expected-error checks (a theorem whose
hypothesis must fail on a given input) count the declared error as success
and note it in the record.  Tolerances follow the conditioning hierarchy:
1e-9 for constructions, 1e-8 for theorem identities, 1e-7 for the one
third-derivative identity.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import jets
from .calculus import (
    DifferentialForm, VectorField, d_K, field_apply, fn_bracket,
    frame_vector, homogeneity_residual, insert_one_form, insert_vector,
    lie_derivative, liouville_field, potential, vertical_endomorphism,
    vertical_lift_function, vertical_lift_vector, zero_vector_form,
)
from .core import BaseFunction, sample_slit_points
from .errors import (
    DegenerateDegree, FinslerLabError, HypothesisFailure, NondegeneracyFailure,
    PositivityFailure,
)
from .finsler import (
    berwald_connection, canonical_spray, conformal_change,
    conservative_connection_residual, conservative_form_residual,
    finsler_fixture, fixture_ids, fundamental_form, sharp,
)
from .connections import (
    berwald, connection_from_semispray, conservative_lift,
    dh_omega_residual, form_matrix_residual, l_ehresmann_connection,
    projective_factor, semispray_from_vertical, tension, theta_operator,
    v_from_homogeneous, v_from_torsion_free, vector_field_residual,
    vector_form1_residual, vector_form2_residual, vertical_lift_test,
    vertical_residual, vincze_residual, wagner_connection, weak_torsion,
)
from .registry import base_function

TOL_CONSTRUCTION = 1e-9
TOL_THEOREM = 1e-8
TOL_THIRD_ORDER = 1e-7
NONCONSERVATIVE_MARGIN = 1e-3


@dataclass(frozen=True)
class CheckSpec:
    """One registered identity check."""

    id: str
    description: str
    fixtures: tuple
    tolerance: float
    runner: object = field(repr=False)


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one (check, fixture) cell."""

    id: str
    fixture: str
    samples: int
    max_residual: float
    tolerance: float
    passed: bool
    wall_time: float
    error: str | None = None

    def record(self) -> dict:
        """The stable report record (wall time excluded for reproducibility)."""
        rec = {
            "check": self.id,
            "fixture": self.fixture,
            "samples": self.samples,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }
        if self.error is not None:
            rec["error"] = self.error
        return rec


@dataclass
class CheckContext:
    grid: object
    seed: int


@dataclass
class Outcome:
    max_residual: float
    note: str | None = None


# ---------------------------------------------------------------------------
# deterministic random objects


def random_scalar_fields(n: int, count: int, seed: int):
    """Quadratic polynomials with uniform coefficients; smooth and well scaled."""
    rng = np.random.default_rng(seed)
    n2 = 2 * n
    out = []
    for _ in range(count):
        lin = rng.uniform(-1, 1, n2).tolist()
        quad = rng.uniform(-1, 1, (n2, n2)).tolist()

        def ev(z, lin=lin, quad=quad):
            acc = sum(lin[a] * z[a] for a in range(n2))
            for i in range(n2):
                for j in range(n2):
                    acc = acc + quad[i][j] * z[i] * z[j]
            return acc

        from .core import ScalarField
        out.append(ScalarField(ev, n))
    return out


def random_one_forms(n: int, count: int, seed: int, semibasic: bool = False):
    """1-forms with random affine coefficient functions."""
    rng = np.random.default_rng(seed)
    n2 = 2 * n
    limit = n if semibasic else n2
    out = []
    for _ in range(count):
        lin = rng.uniform(-1, 1, (n2, n2)).tolist()
        const = rng.uniform(-1, 1, n2).tolist()

        def ev(z, v, lin=lin, const=const):
            acc = 0.0
            for a in range(limit):
                coeff = const[a] + sum(lin[a][b] * z[b] for b in range(n2))
                acc = acc + coeff * v[a]
            return acc

        out.append(DifferentialForm(1, ev, n))
    return out


def _e_dy1(F) -> VectorField:
    n = F.n
    return VectorField(lambda z: [0.0] * n + [F.E(z)] + [0.0] * (n - 1), n, "E-dy1")


def _sup_form1(form, points, n2):
    worst = 0.0
    for p in points:
        z = p.coords()
        for a in range(n2):
            worst = max(worst, abs(form(z, frame_vector(n2, a))))
    return worst


def _sup_form2(form, points, n2):
    worst = 0.0
    for p in points:
        z = p.coords()
        for a in range(n2):
            for b in range(a + 1, n2):
                worst = max(worst, abs(form(z, frame_vector(n2, a), frame_vector(n2, b))))
    return worst


# ---------------------------------------------------------------------------
# check runners


def _chk01_axioms(F, ctx):
    C = liouville_field(F.n)
    CE = field_apply(C, F.E)
    worst = 0.0
    for p in ctx.grid:
        z = p.coords()
        e = F.E(z)
        if not e > 0.0:
            raise PositivityFailure("energy not positive", point=p, value=e)
        det = abs(np.linalg.det(np.array(F.metric_at(z), dtype=float)))
        if det <= 1e-10:
            raise NondegeneracyFailure("metric tensor degenerate", point=p, value=det)
        worst = max(worst, abs(CE(z) - 2.0 * e))
    return Outcome(worst)


def _chk02_omega_relations(F, ctx):
    n2 = 2 * F.n
    J = vertical_endomorphism(F.n)
    C = liouville_field(F.n)
    om = fundamental_form(F).two_form
    djE = d_K(J, F.E)
    worst = _sup_form2(insert_one_form(J, om), ctx.grid, n2)
    i_c_om = insert_vector(C, om)
    diff1 = DifferentialForm(1, lambda z, v: i_c_om(z, v) - djE(z, v), F.n)
    worst = max(worst, _sup_form1(diff1, ctx.grid, n2))
    lie = lie_derivative(C, om)
    diff2 = DifferentialForm(2, lambda z, u, v: lie(z, u, v) - om(z, u, v), F.n)
    return Outcome(max(worst, _sup_form2(diff2, ctx.grid, n2)))


def _chk03_sharp_round_trip(F, ctx):
    n2 = 2 * F.n
    om = fundamental_form(F)
    worst = 0.0
    betas = random_one_forms(F.n, 3, ctx.seed + 103) \
        + random_one_forms(F.n, 2, ctx.seed + 203, semibasic=True)
    for beta in betas:
        x = sharp(F, beta)
        for p in ctx.grid:
            z = p.coords()
            xz = x(z)
            m = om.matrix_at(z)
            for b in range(n2):
                ins = sum(xz[a] * m[a][b] for a in range(n2))
                worst = max(worst, abs(ins - beta(z, frame_vector(n2, b))))
    return Outcome(worst)


def _chk04_potential_lemma(F, ctx):
    s0 = canonical_spray(F)
    worst = 0.0
    for beta in random_one_forms(F.n, 5, ctx.seed + 104, semibasic=True):
        x = sharp(F, beta)
        xE = field_apply(x, F.E)
        for p in ctx.grid:
            z = p.coords()
            worst = max(worst, abs(xE(z) - beta(z, s0(z))))
    return Outcome(worst)


def _chk05_berwald(F, ctx):
    h0 = berwald(F)
    pts = list(ctx.grid)
    n2 = 2 * F.n
    worst = vector_form2_residual(weak_torsion(F, h0), pts)
    worst = max(worst, vector_form1_residual(tension(F, h0), pts))
    worst = max(worst, conservative_connection_residual(F, h0.form, pts))
    return Outcome(worst)


def _chk06_conservative_form(F, ctx):
    hbar, _ = wagner_connection(F, base_function("x1", F.n))
    L = hbar.form - berwald_connection(F)
    worst = conservative_form_residual(F, L, ctx.grid)
    hL = l_ehresmann_connection(F, L)
    translated = berwald_connection(F) + L
    worst = max(worst, form_matrix_residual(hL.form, translated, ctx.grid))
    return Outcome(worst)


def _chk07_biconditional(F, ctx):
    n = F.n
    J = vertical_endomorphism(n)
    f_v = vertical_lift_function(base_function("x1", n))
    _, L_W = wagner_connection(F, base_function("x1", n))
    fixtures = [
        ("zero", zero_vector_form(n)),
        ("wagner", L_W),
        ("fvJ", J.scale(f_v)),
        ("jv:E-dy1", fn_bracket(J, _e_dy1(F))),
        ("corollary", J.scale(f_v / (2.0 * F.E))),
    ]
    s0 = canonical_spray(F)
    worst, notes = 0.0, []
    tol = TOL_THEOREM
    for name, L in fixtures:
        hL = l_ehresmann_connection(F, L)
        a = conservative_connection_residual(F, hL.form, ctx.grid)
        pot = insert_vector(s0, L)
        b = vertical_lift_test(F, field_apply(pot, F.E), ctx.grid)
        small_a, small_b = a < tol, b < tol
        if small_a != small_b:
            worst = max(worst, max(a, b))
            notes.append(f"{name}: sides disagree (dhE={a:.2e}, dJ(L°E)={b:.2e})")
        elif small_a:
            worst = max(worst, max(a, b))
        else:
            if min(a, b) < NONCONSERVATIVE_MARGIN:
                worst = max(worst, max(a, b))
                notes.append(f"{name}: ambiguous nonconservative sides")
    return Outcome(worst, "; ".join(notes) if notes else None)


def _chk08_wagner(F, ctx):
    hbar, L_W = wagner_connection(F, base_function("x1", F.n))
    worst = conservative_connection_residual(F, hbar.form, ctx.grid)
    hL = l_ehresmann_connection(F, L_W)
    worst = max(worst, form_matrix_residual(hbar.form, hL.form, ctx.grid))
    pot = potential(L_W, canonical_spray(F), points=ctx.grid)
    worst = max(worst, vector_field_residual(pot, ctx.grid))
    return Outcome(worst)


def _chk09_conformal(F, ctx):
    f = base_function("x1", F.n)
    F2 = conformal_change(F, f)
    hbar, _ = wagner_connection(F, f)
    L = hbar.form - berwald_connection(F)
    worst = conservative_form_residual(F, L, ctx.grid)
    worst = max(worst, conservative_form_residual(F2, L, ctx.grid))
    # the scaling identity d_L E~ = phi d_L E behind the invariance
    dle = d_K(L, F.E)
    dle2 = d_K(L, F2.E)
    phi = vertical_lift_function(f)
    n2 = 2 * F.n
    for p in ctx.grid:
        z = p.coords()
        s = jets.exp(phi(z))
        for a in range(n2):
            ea = frame_vector(n2, a)
            worst = max(worst, abs(dle2(z, ea) - s * dle(z, ea)))
    # conservative L-Ehresmann connections stay conservative after the change
    hL2 = l_ehresmann_connection(F2, L)
    worst = max(worst, conservative_connection_residual(F2, hL2.form, ctx.grid))
    return Outcome(worst)


def _chk10_conservative_lift(F, ctx):
    n = F.n
    worst, notes = 0.0, []
    xv = vertical_lift_vector(
        [BaseFunction(lambda x, j=j: 1.0 if j == 0 else 0.0, n) for j in range(n)], n)
    U = conservative_lift(F, xv)
    worst = max(worst, vincze_residual(F, U, ctx.grid))

    def w_field(z):
        e = F.E(z)
        c = (jets.sqrt(e) - z[0]) / (2.0 * e)
        return [0.0] * n + [c * z[n + i] for i in range(n)]

    U2 = conservative_lift(F, VectorField(w_field, n, "w/(2E).C"))
    worst = max(worst, vincze_residual(F, U2, ctx.grid))

    try:
        conservative_lift(F, _e_dy1(F))
        return Outcome(float("inf"), "expected HypothesisFailure was not raised for E-dy1")
    except HypothesisFailure as e:
        notes.append(f"HypothesisFailure (expected) for E-dy1: residual {e.residual:.3e}")
    return Outcome(worst, "; ".join(notes))


def _chk11_theta_commutator(F, ctx):
    n = F.n
    J = vertical_endomorphism(n)
    C = liouville_field(n)
    f_v = vertical_lift_function(base_function("x1", n))
    _, L_W = wagner_connection(F, base_function("x1", n))
    worst = 0.0
    for L in (L_W, J.scale(f_v), fn_bracket(J, _e_dy1(F))):
        lhs = fn_bracket(C, theta_operator(F, L))
        rhs = theta_operator(F, fn_bracket(C, L))
        worst = max(worst, form_matrix_residual(lhs, rhs, ctx.grid))
    return Outcome(worst)


def _chk12_vertical_correspondence(F, ctx):
    n = F.n
    J = vertical_endomorphism(n)
    xv = vertical_lift_vector(
        [BaseFunction(lambda x, j=j: 1.0 if j == 0 else 0.0, n) for j in range(n)], n)
    worst = 0.0
    for L in (zero_vector_form(n), fn_bracket(J, _e_dy1(F))):
        V = v_from_torsion_free(F, L)
        worst = max(worst, vertical_residual(V, ctx.grid))
        worst = max(worst, form_matrix_residual(fn_bracket(J, V), L, ctx.grid))
        worst = max(worst, form_matrix_residual(fn_bracket(J, V + xv), L, ctx.grid))
    return Outcome(worst)


def _chk13_homogeneous_reconstruction(F, ctx):
    n = F.n
    J = vertical_endomorphism(n)
    V0 = _e_dy1(F)
    L = fn_bracket(J, V0)
    V = v_from_homogeneous(F, L, r=1.0)
    worst = form_matrix_residual(fn_bracket(J, V), L, ctx.grid)
    dev = V - V0
    worst = max(worst, vector_field_residual(dev, ctx.grid))
    notes = []
    try:
        v_from_homogeneous(F, L, r=-1.0)
        return Outcome(float("inf"), "expected DegenerateDegree was not raised")
    except DegenerateDegree:
        notes.append("DegenerateDegree (expected) for r=-1")
    return Outcome(worst, "; ".join(notes))


def _chk14_homogeneity_lemma(F, ctx):
    n = F.n
    J = vertical_endomorphism(n)
    half_y1_C = VectorField(
        lambda z: [0.0] * n + [0.5 * z[n] * z[n + i] for i in range(n)], n, "half-y1-C")
    worst = 0.0
    for V in (_e_dy1(F), half_y1_C):
        hL = l_ehresmann_connection(F, fn_bracket(J, V))
        worst = max(worst, vector_form1_residual(tension(F, hL), ctx.grid))
        sV = semispray_from_vertical(F, V)
        worst = max(worst, homogeneity_residual(sV, 2.0, ctx.grid))
    return Outcome(worst)


def _chk15_dh_omega(F, ctx):
    J = vertical_endomorphism(F.n)
    worst = dh_omega_residual(F, berwald(F), ctx.grid)
    hL = l_ehresmann_connection(F, fn_bracket(J, _e_dy1(F)))
    worst = max(worst, dh_omega_residual(F, hL, ctx.grid))
    return Outcome(worst)


def _chk16_spray_family(F, ctx):
    n = F.n
    J = vertical_endomorphism(n)
    V0 = _e_dy1(F)
    sV = semispray_from_vertical(F, V0)
    h1 = connection_from_semispray(F, sV)
    h2 = l_ehresmann_connection(F, fn_bracket(J, V0))
    worst = form_matrix_residual(h1.form, h2.form, ctx.grid)
    # projective factor on a verified related pair: V = sqrt(E) C / 2, U = 0
    V = VectorField(
        lambda z: [0.0] * n + [0.5 * jets.sqrt(F.E(z)) * z[n + i] for i in range(n)],
        n, "half-sqrtE-C")
    U = VectorField(lambda z: [0.0] * (2 * n), n, "0")
    lam, residual = projective_factor(F, V, U)
    worst = max(worst, residual)
    C = liouville_field(n)
    for p in ctx.grid:
        z = p.coords()
        worst = max(worst, abs(jets.directional(lam.fn, z, C(z)) - lam(z)))
    return Outcome(worst)


CHECKS = (
    CheckSpec("CHK-01", "energy axioms: positivity, 2-homogeneity, nondegenerate metric",
              tuple(fixture_ids()), TOL_CONSTRUCTION, _chk01_axioms),
    CheckSpec("CHK-02", "fundamental form relations: i_J w = 0, i_C w = d_J E, L_C w = w",
              tuple(fixture_ids()), TOL_THEOREM, _chk02_omega_relations),
    CheckSpec("CHK-03", "sharp operator round trip on random 1-forms",
              tuple(fixture_ids()), TOL_CONSTRUCTION, _chk03_sharp_round_trip),
    CheckSpec("CHK-04", "potential lemma: (sharp b) E = b(S0) for semibasic b",
              tuple(fixture_ids()), TOL_THEOREM, _chk04_potential_lemma),
    CheckSpec("CHK-05", "Berwald connection: zero torsion, zero tension, d_h E = 0",
              tuple(fixture_ids()), TOL_THEOREM, _chk05_berwald),
    CheckSpec("CHK-06", "conservative form: h_L collapses to h0 + L",
              tuple(fixture_ids()), TOL_THEOREM, _chk06_conservative_form),
    CheckSpec("CHK-07", "biconditional: h_L conservative iff L°E is a vertical lift",
              tuple(fixture_ids()), TOL_THEOREM, _chk07_biconditional),
    CheckSpec("CHK-08", "Wagner connection conservative and equal to its L-form deformation",
              tuple(fixture_ids()), TOL_THEOREM, _chk08_wagner),
    CheckSpec("CHK-09", "conformal change preserves form and connection conservativity",
              tuple(fixture_ids()), TOL_THEOREM, _chk09_conformal),
    CheckSpec("CHK-10", "conservative lift U = V + (d_[J,V]E)# incl. hypothesis-failure branch",
              tuple(fixture_ids()), TOL_THEOREM, _chk10_conservative_lift),
    CheckSpec("CHK-11", "Liouville commutator of the Theta operator",
              tuple(fixture_ids()), TOL_THEOREM, _chk11_theta_commutator),
    CheckSpec("CHK-12", "torsion-free forms come from vertical fields (V_L round trip)",
              tuple(fixture_ids()), TOL_THEOREM, _chk12_vertical_correspondence),
    CheckSpec("CHK-13", "homogeneous reconstruction V = L°/(r+1) and degenerate degree",
              tuple(fixture_ids()), TOL_THEOREM, _chk13_homogeneous_reconstruction),
    CheckSpec("CHK-14", "2-homogeneous V: homogeneous connection and spray S^V",
              tuple(fixture_ids()), TOL_THEOREM, _chk14_homogeneity_lemma),
    CheckSpec("CHK-15", "d_h omega vanishes for torsion-free deformations",
              tuple(fixture_ids()), TOL_THIRD_ORDER, _chk15_dh_omega),
    CheckSpec("CHK-16", "S^V generates the [J,V]-connection; projective factor formula",
              tuple(fixture_ids()), TOL_THEOREM, _chk16_spray_family),
)

CHECK_IDS = tuple(c.id for c in CHECKS)


def list_checks(only=None):
    """Check summaries in stable id order; unknown filters yield an empty list."""
    specs = sorted(CHECKS, key=lambda c: c.id)
    if only is None:
        return list(specs)
    wanted = set(only)
    return [c for c in specs if c.id in wanted]


def run_checks(config) -> tuple:
    """Run the configured (check, fixture) cells; returns (results, exit_code).

    Per-cell errors are captured in the result record, never aborting the
    suite; the exit code is 0 exactly when every cell passed.
    """
    grid = sample_slit_points(2, config.samples, config.seed)
    structures = {}
    build_errors = {}
    for fid in config.fixtures:
        try:
            structures[fid] = finsler_fixture(fid, grid)
        except FinslerLabError as e:
            build_errors[fid] = f"{type(e).__name__}: {e}"

    results = []
    for spec in list_checks(config.checks):
        tol = config.tolerances.get(spec.id, spec.tolerance)
        for fid in config.fixtures:
            if fid not in spec.fixtures:
                continue
            start = time.perf_counter()
            if fid in build_errors:
                results.append(CheckResult(spec.id, fid, config.samples, float("inf"),
                                           tol, False, 0.0, build_errors[fid]))
                continue
            ctx = CheckContext(grid=grid, seed=config.seed)
            try:
                outcome = spec.runner(structures[fid], ctx)
                residual, note = float(outcome.max_residual), outcome.note
            except FinslerLabError as e:
                residual, note = float("inf"), f"{type(e).__name__}: {e}"
            wall = time.perf_counter() - start
            passed = bool(residual < tol)
            results.append(CheckResult(spec.id, fid, config.samples, residual,
                                       tol, passed, wall, note))
    results.sort(key=lambda r: (r.id, r.fixture))
    exit_code = 0 if all(r.passed for r in results) else 1
    return results, exit_code
