"""Finsler layer: validation, omega, sharp, sprays, Berwald, conformal change."""

import math

import numpy as np
import pytest

from finslerlab import jets
from finslerlab.calculus import (
    DifferentialForm, VectorField, coordinate_one_form, d_function,
    exterior_derivative, fn_bracket, frame_vector, insert_one_form,
    insert_vector, lie_derivative, liouville_field, vertical_endomorphism,
)
from finslerlab.core import BaseFunction, ScalarField, point, sample_slit_points
from finslerlab.errors import (
    HomogeneityFailure, NondegeneracyFailure, NotConnection, PositivityFailure,
)
from finslerlab.finsler import (
    berwald_connection, canonical_spray, conformal_change,
    conservative_connection_residual, conservative_form_residual,
    finsler_fixture, fixture_ids, fundamental_form, gradient,
    projector_residual, sharp, validate_finsler,
)

from helpers import maxabs

N, N2 = 2, 4
P0 = point(0.0, 0.0, 1.0, 2.0)
GRID = sample_slit_points(N, 12, seed=5)

EUC = finsler_fixture("euclidean", GRID)
RIE = finsler_fixture("riemannian-exp", GRID)
RAN = finsler_fixture("randers-0.3", GRID)
ALL = [EUC, RIE, RAN]


def close(a, b, tol=1e-10):
    return maxabs([x - y for x, y in zip(a, b)]) < tol


# -- validation ----------------------------------------------------------------


def test_fixture_ids_exposed():
    assert fixture_ids() == ["euclidean", "riemannian-exp", "randers-0.3"]


def test_fixtures_validate():
    for F in ALL:
        assert F.n == 2


def test_positivity_failure():
    bad = ScalarField(lambda z: 0.5 * (z[2] * z[2] - z[3] * z[3]), N)
    with pytest.raises(PositivityFailure):
        validate_finsler(bad, GRID)


def test_nondegeneracy_failure():
    bad = ScalarField(lambda z: 0.5 * z[2] * z[2], N)
    with pytest.raises(NondegeneracyFailure):
        validate_finsler(bad, GRID)


def test_homogeneity_failure():
    def ev(z):
        q = z[2] * z[2] + z[3] * z[3]
        return 0.5 * q + 0.1 * z[2] * z[2] * jets.sqrt(q)

    with pytest.raises(HomogeneityFailure):
        validate_finsler(ScalarField(ev, N), GRID)


# -- fundamental form -------------------------------------------------------------


def test_omega_hand_values():
    om = fundamental_form(EUC)
    z = P0.coords()
    e = [frame_vector(N2, a) for a in range(N2)]
    assert abs(om(z, e[0], e[2]) + 1.0) < 1e-12   # omega(dx1, dy1) = -1
    assert abs(om(z, e[0], e[1])) < 1e-12          # no dx^dx part
    om_r = fundamental_form(RIE)
    assert abs(om_r(z, e[2], e[0]) - 1.0) < 1e-12  # g11 at p0 = e^0


def test_omega_two_paths_agree():
    for F in ALL:
        om = fundamental_form(F)
        for p in list(GRID)[:6]:
            z = p.coords()
            m = om.matrix_at(z)
            for a in range(N2):
                for b in range(N2):
                    assert abs(m[a][b] - om(z, frame_vector(N2, a), frame_vector(N2, b))) < 1e-9


def test_omega_matrix_block_structure():
    for F in ALL:
        for p in list(GRID)[:4]:
            z = p.coords()
            m = np.array(F.omega_matrix_at(z), dtype=float)
            g = np.array(F.metric_at(z), dtype=float)
            assert np.allclose(m[N:, :N], g, atol=1e-12)
            assert np.allclose(m[:N, N:], -g.T, atol=1e-12)
            assert np.allclose(m[N:, N:], 0.0, atol=1e-12)
            assert np.allclose(m, -m.T, atol=1e-10)


# -- sharp and gradient ------------------------------------------------------------


def test_sharp_hand_values():
    dx1 = coordinate_one_form(N, 0)
    s = sharp(EUC, dx1)
    assert close(s(P0.coords()), [0.0, 0.0, 1.0, 0.0])
    dE = d_function(EUC.E)
    s2 = sharp(EUC, dE)
    assert close(s2(P0.coords()), [-1.0, -2.0, 0.0, 0.0])
    zero = DifferentialForm(1, lambda z, v: 0.0, N)
    assert close(sharp(EUC, zero)(P0.coords()), [0.0] * 4)


def test_sharp_round_trip():
    rng = np.random.default_rng(17)
    for F in ALL:
        om = fundamental_form(F)
        for k in range(3):
            coef = rng.uniform(-1, 1, (N2, N2))
            beta = DifferentialForm(1, lambda z, v, c=coef: sum(
                sum(c[a][b] * z[b] for b in range(N2)) * v[a] for a in range(N2)), N)
            x = sharp(F, beta)
            for p in list(GRID)[:5]:
                z = p.coords()
                xz = x(z)
                for b in range(N2):
                    eb = frame_vector(N2, b)
                    assert abs(om(z, xz, eb) - beta(z, eb)) < 1e-9


def test_sharp_condition_failure():
    # bypass validation to reach the conditioning guard
    from finslerlab.finsler import FinslerStructure
    tiny = ScalarField(lambda z: 0.5 * (z[2] * z[2] + 1e-14 * z[3] * z[3]), N)
    F = FinslerStructure(tiny, N, GRID, validate=False)
    dx1 = coordinate_one_form(N, 0)
    with pytest.raises(NondegeneracyFailure):
        sharp(F, dx1)(P0.coords())


def test_gradient_examples():
    f_v = ScalarField(lambda z: z[0], N)  # (x1)^v
    g = gradient(EUC, f_v)
    assert close(g(P0.coords()), [0.0, 0.0, 1.0, 0.0])
    gE = gradient(EUC, EUC.E)
    assert close(gE(P0.coords()), [-1.0, -2.0, 0.0, 0.0])
    gc = gradient(EUC, ScalarField(lambda z: 4.0, N))
    assert close(gc(P0.coords()), [0.0] * 4)


# -- canonical spray and Berwald connection ------------------------------------------


def test_canonical_spray_values():
    assert close(canonical_spray(EUC)(P0.coords()), [1.0, 2.0, 0.0, 0.0])
    assert close(canonical_spray(RIE)(P0.coords()), [1.0, 2.0, -1.0, 0.0])


def test_spray_is_semispray_and_homogeneous():
    from finslerlab.calculus import homogeneity_residual
    J = vertical_endomorphism(N)
    C = liouville_field(N)
    for F in ALL:
        s0 = canonical_spray(F)
        for p in GRID:
            z = p.coords()
            assert close(J.apply(z, s0(z)), C(z), tol=1e-9)
        assert homogeneity_residual(s0, 2.0, GRID) < 1e-9


def test_berwald_euclidean_matrix():
    h0 = berwald_connection(EUC)
    m = h0.matrix(P0.coords())
    expected = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]
    assert maxabs([m[a][b] - expected[a][b] for a in range(N2) for b in range(N2)]) < 1e-10


def test_berwald_riemannian_column():
    h0 = berwald_connection(RIE)
    m = h0.matrix(P0.coords())
    col = [m[a][0] for a in range(N2)]
    assert close(col, [1.0, 0.0, -1.0, 0.0], tol=1e-9)  # dx1 - y1 dy1 at p0


def test_berwald_projector_laws():
    for F in ALL:
        assert projector_residual(F, berwald_connection(F)) < 1e-9


def test_berwald_conservative():
    for F in ALL:
        assert conservative_connection_residual(F, berwald_connection(F)) < 1e-9


def test_eq9_relations():
    J = vertical_endomorphism(N)
    C = liouville_field(N)
    for F in ALL:
        om = fundamental_form(F).two_form
        djE = insert_one_form(J, d_function(F.E))
        i_j_om = insert_one_form(J, om)
        i_c_om = insert_vector(C, om)
        lie_c_om = lie_derivative(C, om)
        for p in list(GRID)[:6]:
            z = p.coords()
            for a in range(N2):
                ea = frame_vector(N2, a)
                assert abs(i_c_om(z, ea) - djE(z, ea)) < 1e-9
                for b in range(a + 1, N2):
                    eb = frame_vector(N2, b)
                    assert abs(i_j_om(z, ea, eb)) < 1e-9
                    assert abs(lie_c_om(z, ea, eb) - om(z, ea, eb)) < 1e-8


def test_insert_vertical_frame_into_omega():
    # i_{dy1} omega = dx1 on the flat fixture
    om = fundamental_form(EUC).two_form
    dy1 = VectorField(lambda z: [0.0, 0.0, 1.0, 0.0], N)
    ins = insert_vector(dy1, om)
    z = P0.coords()
    vals = [ins(z, frame_vector(N2, b)) for b in range(N2)]
    assert close(vals, [1.0, 0.0, 0.0, 0.0], tol=1e-12)


def test_potential_of_omega_is_minus_dE():
    from finslerlab.calculus import potential
    s0 = canonical_spray(EUC)
    om = fundamental_form(EUC).two_form
    pot = potential(om, s0, points=GRID)
    dE = d_function(EUC.E)
    z = P0.coords()
    vals = [pot(z, frame_vector(N2, a)) for a in range(N2)]
    expected = [-dE(z, frame_vector(N2, a)) for a in range(N2)]
    assert close(vals, expected, tol=1e-10)
    assert close(expected, [0.0, 0.0, -1.0, -2.0], tol=1e-12)


def test_insert_berwald_into_omega():
    # the Berwald horizontal distribution is omega-Lagrangian on every fixture
    for F in ALL:
        om = fundamental_form(F).two_form
        ih_om = insert_one_form(berwald_connection(F), om)
        for p in list(GRID)[:4]:
            z = p.coords()
            for a in range(N2):
                for b in range(a + 1, N2):
                    ea, eb = frame_vector(N2, a), frame_vector(N2, b)
                    assert abs(ih_om(z, ea, eb) - om(z, ea, eb)) < 1e-9


# -- conformal change -----------------------------------------------------------------


def test_conformal_identity():
    F2 = conformal_change(EUC, BaseFunction(lambda x: 0.0, N, "0"))
    for p in list(GRID)[:4]:
        assert abs(F2.E(p.coords()) - EUC.E(p.coords())) < 1e-14


def test_conformal_energy_value():
    F2 = conformal_change(EUC, BaseFunction(lambda x: x[0], N, "x1"))
    assert abs(F2.E(P0.coords()) - 2.5) < 1e-14  # e^0 * 2.5


def test_conformal_scaling_relation():
    # d_L(E~) = phi d_L E for any semibasic L with base-only scale
    from finslerlab.calculus import d_K
    f = BaseFunction(lambda x: x[0], N, "x1")
    F2 = conformal_change(RIE, f)
    J = vertical_endomorphism(N)
    V = VectorField(lambda z: [0.0, 0.0, RIE.E(z), 0.0], N)
    L = fn_bracket(J, V)
    dle = d_K(L, RIE.E)
    dle2 = d_K(L, F2.E)
    for p in list(GRID)[:5]:
        z = p.coords()
        phi = math.exp(z[0])
        for a in range(N2):
            ea = frame_vector(N2, a)
            assert abs(dle2(z, ea) - phi * dle(z, ea)) < 1e-9


# -- conservativity residuals ---------------------------------------------------------


def test_conservative_form_zero():
    from finslerlab.calculus import zero_vector_form
    assert conservative_form_residual(EUC, zero_vector_form(N)) < 1e-15


def test_conservative_form_requires_semibasic():
    from finslerlab.calculus import identity_form
    from finslerlab.errors import NotSemibasic
    with pytest.raises(NotSemibasic):
        conservative_form_residual(EUC, identity_form(N))


def test_connection_residual_requires_projector():
    from finslerlab.calculus import identity_form
    with pytest.raises(NotConnection):
        conservative_connection_residual(EUC, identity_form(N))


def test_ee2_insertion_identity_with_berwald():
    # i_[K,Y] a = i_Y d_K a + d_K(i_Y a) - L_{KY} a with K = h0, Y = C
    from finslerlab.calculus import d_K, fn_bracket, insert_vector as ins
    from finslerlab.calculus import liouville_field as liou
    F = RIE
    h0 = berwald_connection(F)
    C = liou(N)
    alpha = d_function(F.E)
    br = fn_bracket(h0, C)
    lhs = insert_one_form(br, alpha)
    hc = VectorField(lambda z: h0.fn(z, C(z)), N)
    rhs1 = ins(C, d_K(h0, alpha))
    rhs2 = d_K(h0, ins(C, alpha))
    rhs3 = lie_derivative(hc, alpha)
    for p in list(GRID)[:4]:
        z = p.coords()
        for a in range(N2):
            ea = frame_vector(N2, a)
            val = lhs(z, ea) - (rhs1(z, ea) + rhs2(z, ea) - rhs3(z, ea))
            assert abs(val) < 1e-8


def test_form_skewness_sweep():
    # derived 2- and 3-forms flip sign under argument transposition
    import numpy as np
    rng = np.random.default_rng(23)
    for F in (EUC, RAN):
        om = fundamental_form(F).two_form
        dom = exterior_derivative(om)
        for p in list(GRID)[:3]:
            z = p.coords()
            u, v, w = (list(rng.uniform(-1, 1, N2)) for _ in range(3))
            assert abs(om(z, u, v) + om(z, v, u)) < 1e-12
            assert abs(dom(z, u, v, w) + dom(z, v, u, w)) < 1e-12
            assert abs(dom(z, u, v, w) + dom(z, u, w, v)) < 1e-12


def test_christoffel_oracle_riemannian():
    # independent oracle: spray from the standard Christoffel formula for
    # a(x) = diag(e^{2 x1}, 1)
    s0 = canonical_spray(RIE)

    def oracle(z):
        x1 = z[0]
        a = np.array([[math.exp(2 * x1), 0.0], [0.0, 1.0]])
        da = np.zeros((2, 2, 2))  # da[l][j][k] = d a_jk / d x^l
        da[0][0][0] = 2.0 * math.exp(2 * x1)
        ainv = np.linalg.inv(a)
        gamma = np.zeros((2, 2, 2))
        for i in range(2):
            for j in range(2):
                for k in range(2):
                    gamma[i][j][k] = 0.5 * sum(
                        ainv[i][l] * (da[j][l][k] + da[k][j][l] - da[l][j][k])
                        for l in range(2))
        y = np.array(z[2:])
        spray_y = [-sum(gamma[i][j][k] * y[j] * y[k] for j in range(2) for k in range(2))
                   for i in range(2)]
        return [z[2], z[3], spray_y[0], spray_y[1]]

    for p in GRID:
        z = p.coords()
        assert close(s0(z), oracle(z), tol=1e-9)
