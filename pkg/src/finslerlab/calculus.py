"""Vector fields, differential forms, vector-valued forms, and their calculus.

Everything is stored as a pure evaluator over flat bundle coordinates.  Forms
and vector forms are pointwise multilinear, so they are always evaluated on
constant coordinate vectors; derivative-based operators (exterior derivative,
Lie and Frolicher-Nijenhuis brackets) extend the arguments as constant fields,
which the tensoriality of each formula makes legitimate.

Degree and sign conventions:

* insertion of a vector 1-form K into a p-form:  (i_K a)(X_1..X_p) =
  sum_i a(X_1, .., K X_i, .., X_p);
* d_K := i_K d - (-1)^(k-1) d i_K, so on functions d_K f = df o K and for
  vector fields d_Y is the Lie derivative;
* the bracket satisfies d_[K,L] = d_K d_L - (-1)^(k l) d_L d_K as graded
  derivations (tested, not assumed);
* homogeneity degree r means [C, K] = (r - 1) K for vector fields and for
  vector 1-forms alike.
"""

from __future__ import annotations

import itertools

from . import jets
from .core import BaseFunction, ScalarField
from .errors import DegreeOutOfRange, NotSemibasic, NotSemispray

PRECHECK_TOL = 1e-8


def frame_vector(n2: int, a: int):
    v = [0.0] * n2
    v[a] = 1.0
    return v


def frame(n2: int):
    return [frame_vector(n2, a) for a in range(n2)]


def _is_float_point(z) -> bool:
    for c in z:
        if type(c) is jets.Jet:
            return False
    return True


# ---------------------------------------------------------------------------
# vector fields


class VectorField:
    """2n-component vector field over the coordinate frame (d/dx^i, d/dy^i)."""

    __slots__ = ("fn", "n", "name", "_memo")

    def __init__(self, fn, n: int, name: str = "", memo: bool = False):
        self.fn = fn
        self.n = n
        self.name = name
        self._memo = {} if memo else None

    def __call__(self, z):
        memo = self._memo
        if memo is None or not _is_float_point(z):
            return self.fn(z)
        key = tuple(z)
        hit = memo.get(key)
        if hit is None:
            hit = self.fn(z)
            memo[key] = hit
        return hit

    def __repr__(self):
        return f"VectorField({self.name or 'anonymous'}, n={self.n})"

    def component(self, a: int) -> ScalarField:
        return ScalarField(lambda z: self(z)[a], self.n)

    def __add__(self, other):
        return VectorField(lambda z: [a + b for a, b in zip(self(z), other(z))], self.n)

    def __sub__(self, other):
        return VectorField(lambda z: [a - b for a, b in zip(self(z), other(z))], self.n)

    def __neg__(self):
        return self.scale(-1.0)

    def scale(self, c):
        """Scale by a constant or a ScalarField coefficient."""
        if isinstance(c, ScalarField):
            return VectorField(lambda z: [c(z) * a for a in self(z)], self.n)
        return VectorField(lambda z: [c * a for a in self(z)], self.n)


def vector_field_from_components(components, n: int, name: str = "") -> VectorField:
    comps = list(components)

    def ev(z):
        return [c(z) for c in comps]

    return VectorField(ev, n, name)


def constant_vector_field(vec, n: int, name: str = "") -> VectorField:
    vals = [float(v) for v in vec]
    return VectorField(lambda z: list(vals), n, name)


def zero_vector_field(n: int) -> VectorField:
    return VectorField(lambda z: [0.0] * (2 * n), n, "0")


def field_apply(X: VectorField, f: ScalarField) -> ScalarField:
    """The function Xf = sum_a X^a df/dz^a."""

    def ev(z):
        return jets.directional(f.fn, z, X(z))

    return ScalarField(ev, X.n, name=f"({X.name}){f.name}" if X.name else "")


def lie_bracket(xi: VectorField, eta: VectorField) -> VectorField:
    """[xi, eta]^a = xi(eta^a) - eta(xi^a)."""

    def ev(z):
        xz = xi(z)
        ez, d_xi_eta = jets.jvp(eta.fn, z, xz)
        d_eta_xi = jets.directional(xi.fn, z, ez)
        return [a - b for a, b in zip(d_xi_eta, d_eta_xi)]

    return VectorField(ev, xi.n)


# ---------------------------------------------------------------------------
# canonical fields and lifts


def liouville_field(n: int) -> VectorField:
    """C = y^i d/dy^i, the radial vertical field."""

    def ev(z):
        return [0.0] * n + list(z[n:])

    return VectorField(ev, n, "C")


def vertical_lift_function(f: BaseFunction) -> ScalarField:
    """f^v(x, y) = f(x)."""
    return ScalarField(lambda z: f.fn(z[:f.n]), f.n, name=f"{f.name}^v")


def complete_lift_function(f: BaseFunction) -> ScalarField:
    """f^c(x, y) = y^i df/dx^i."""
    n = f.n

    def ev(z):
        return jets.directional(f.fn, z[:n], z[n:])

    return ScalarField(ev, n, name=f"{f.name}^c")


def vertical_lift_vector(components, n: int, name: str = "") -> VectorField:
    """X^v = (0, .., 0, X^1(x), .., X^n(x)) for base-only components."""
    comps = list(components)

    def ev(z):
        x = z[:n]
        return [0.0] * n + [c.fn(x) if isinstance(c, BaseFunction) else c(x) for c in comps]

    return VectorField(ev, n, name or "X^v")


# ---------------------------------------------------------------------------
# differential forms


class DifferentialForm:
    """Skew p-linear form, 0 <= p <= 3, evaluated on constant vectors."""

    __slots__ = ("degree", "fn", "n", "name")

    def __init__(self, degree: int, fn, n: int, name: str = ""):
        if not 0 <= degree <= 3:
            raise DegreeOutOfRange(f"form degree must be 0..3, got {degree}")
        self.degree = degree
        self.fn = fn
        self.n = n
        self.name = name

    def __call__(self, z, *vectors):
        if len(vectors) != self.degree:
            raise DegreeOutOfRange(
                f"{self.degree}-form called with {len(vectors)} vectors")
        return self.fn(z, *vectors)

    def __repr__(self):
        return f"DifferentialForm(p={self.degree}, {self.name or 'anonymous'})"

    def __add__(self, other):
        if other.degree != self.degree:
            raise DegreeOutOfRange("cannot add forms of different degree")
        return DifferentialForm(
            self.degree, lambda z, *v: self.fn(z, *v) + other.fn(z, *v), self.n)

    def __sub__(self, other):
        if other.degree != self.degree:
            raise DegreeOutOfRange("cannot subtract forms of different degree")
        return DifferentialForm(
            self.degree, lambda z, *v: self.fn(z, *v) - other.fn(z, *v), self.n)

    def scale(self, c):
        if isinstance(c, ScalarField):
            return DifferentialForm(self.degree, lambda z, *v: c(z) * self.fn(z, *v), self.n)
        return DifferentialForm(self.degree, lambda z, *v: c * self.fn(z, *v), self.n)


def zero_form(degree: int, n: int) -> DifferentialForm:
    return DifferentialForm(degree, lambda z, *v: 0.0, n, "0")


def function_form(f: ScalarField) -> DifferentialForm:
    """Wrap a scalar field as a 0-form."""
    return DifferentialForm(0, lambda z: f.fn(z), f.n, f.name)


def coordinate_one_form(n: int, a: int) -> DifferentialForm:
    """dz^a as a constant-coefficient 1-form."""
    return DifferentialForm(1, lambda z, v: v[a], n, f"dz[{a}]")


def d_function(f: ScalarField) -> DifferentialForm:
    """df as a 1-form: (df)(v) = D_v f."""

    def ev(z, v):
        return jets.directional(f.fn, z, v)

    return DifferentialForm(1, ev, f.n, name=f"d({f.name})" if f.name else "df")


def exterior_derivative(alpha: DifferentialForm) -> DifferentialForm:
    """d(alpha) by the alternating sum of coordinate-frame derivatives.

    Arguments are extended as constant fields, so no bracket terms appear.
    """
    p = alpha.degree
    if p > 2:
        raise DegreeOutOfRange("exterior derivative supported up to 2-forms")
    if p == 0:
        return DifferentialForm(1, lambda z, v: jets.directional(alpha.fn, z, v),
                                alpha.n, name=f"d({alpha.name})")

    def ev(z, *vectors):
        total = 0.0
        for i, v in enumerate(vectors):
            rest = vectors[:i] + vectors[i + 1:]
            term = jets.directional(lambda w: alpha.fn(w, *rest), z, v)
            total = total + term if i % 2 == 0 else total - term
        return total

    return DifferentialForm(p + 1, ev, alpha.n, name=f"d({alpha.name})")


# ---------------------------------------------------------------------------
# vector forms


class VectorForm:
    """Vector-valued skew k-form, k in {1, 2}; k = 0 is just VectorField."""

    __slots__ = ("degree", "fn", "n", "name", "_matrix_fn", "_matrix_memo")

    def __init__(self, degree: int, fn, n: int, name: str = "", matrix_fn=None,
                 memo_matrix: bool = False):
        if degree not in (1, 2):
            raise DegreeOutOfRange(f"vector form degree must be 1 or 2, got {degree}")
        self.degree = degree
        self.fn = fn
        self.n = n
        self.name = name
        self._matrix_fn = matrix_fn
        self._matrix_memo = {} if memo_matrix else None

    def __call__(self, z, *vectors):
        if len(vectors) != self.degree:
            raise DegreeOutOfRange(
                f"vector {self.degree}-form called with {len(vectors)} vectors")
        return self.fn(z, *vectors)

    def __repr__(self):
        return f"VectorForm(k={self.degree}, {self.name or 'anonymous'})"

    def matrix(self, z):
        """Columns matrix M[a][b] = component a of K(e_b) (degree 1 only)."""
        if self.degree != 1:
            raise DegreeOutOfRange("matrix only defined for vector 1-forms")
        memo = self._matrix_memo
        if memo is not None and _is_float_point(z):
            key = tuple(z)
            hit = memo.get(key)
            if hit is not None:
                return hit
            m = self._compute_matrix(z)
            memo[key] = m
            return m
        return self._compute_matrix(z)

    def _compute_matrix(self, z):
        if self._matrix_fn is not None:
            return self._matrix_fn(z)
        n2 = 2 * self.n
        cols = [self.fn(z, frame_vector(n2, b)) for b in range(n2)]
        return [[cols[b][a] for b in range(n2)] for a in range(n2)]

    def apply(self, z, vec):
        """K(z) applied to one constant vector (degree 1)."""
        return self.fn(z, vec)

    def __add__(self, other):
        if other.degree != self.degree:
            raise DegreeOutOfRange("cannot add vector forms of different degree")
        mfn = None
        if self.degree == 1:
            def mfn(z):
                a, b = self.matrix(z), other.matrix(z)
                return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]
        return VectorForm(self.degree,
                          lambda z, *v: [x + y for x, y in zip(self.fn(z, *v), other.fn(z, *v))],
                          self.n, matrix_fn=mfn)

    def __sub__(self, other):
        return self + other.scale(-1.0)

    def scale(self, c):
        if isinstance(c, ScalarField):
            mfn = None
            if self.degree == 1:
                def mfn(z):
                    s = c(z)
                    return [[s * x for x in row] for row in self.matrix(z)]
            return VectorForm(self.degree,
                              lambda z, *v: [c(z) * x for x in self.fn(z, *v)],
                              self.n, matrix_fn=mfn)
        mfn = None
        if self.degree == 1:
            def mfn(z):
                return [[c * x for x in row] for row in self.matrix(z)]
        return VectorForm(self.degree, lambda z, *v: [c * x for x in self.fn(z, *v)],
                          self.n, matrix_fn=mfn)


def _matvec(m, v):
    return [sum(row[b] * v[b] for b in range(len(v))) for row in m]


class ConstantVectorForm(VectorForm):
    """Vector 1-form with constant coefficients in the coordinate frame."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs, n: int, name: str = ""):
        self.coeffs = [list(row) for row in coeffs]
        super().__init__(1, lambda z, v: _matvec(self.coeffs, v), n, name,
                         matrix_fn=lambda z: [list(row) for row in self.coeffs])


def identity_form(n: int) -> ConstantVectorForm:
    n2 = 2 * n
    m = [[1.0 if a == b else 0.0 for b in range(n2)] for a in range(n2)]
    return ConstantVectorForm(m, n, "Id")


def vertical_endomorphism(n: int) -> ConstantVectorForm:
    """J: d/dx^i -> d/dy^i, d/dy^i -> 0."""
    n2 = 2 * n
    m = [[0.0] * n2 for _ in range(n2)]
    for i in range(n):
        m[n + i][i] = 1.0
    return ConstantVectorForm(m, n, "J")


def tensor_one_form_field(alpha: DifferentialForm, X: VectorField) -> VectorForm:
    """alpha (x) X as a vector 1-form: v -> alpha(v) X."""
    if alpha.degree != 1:
        raise DegreeOutOfRange("tensor product needs a 1-form")

    def ev(z, v):
        c = alpha.fn(z, v)
        return [c * a for a in X(z)]

    def mfn(z):
        xz = X(z)
        n2 = 2 * X.n
        row = [alpha.fn(z, frame_vector(n2, b)) for b in range(n2)]
        return [[row[b] * xa for b in range(n2)] for xa in xz]

    return VectorForm(1, ev, X.n, name=f"{alpha.name}(x){X.name}", matrix_fn=mfn)


def zero_vector_form(n: int, degree: int = 1) -> VectorForm:
    return VectorForm(degree, lambda z, *v: [0.0] * (2 * n), n, "0")


# ---------------------------------------------------------------------------
# insertions and derivations


def insert_vector(Y: VectorField, K):
    """i_Y K: plug the vector field into the first slot, lowering the degree."""
    if isinstance(K, DifferentialForm):
        if K.degree < 1:
            raise DegreeOutOfRange("cannot insert a vector into a 0-form")
        if K.degree == 1:
            return ScalarField(lambda z: K.fn(z, Y(z)), K.n,
                               name=f"i_{Y.name}{K.name}")
        return DifferentialForm(K.degree - 1,
                                lambda z, *v: K.fn(z, Y(z), *v), K.n,
                                name=f"i_{Y.name}{K.name}")
    if isinstance(K, VectorForm):
        if K.degree == 1:
            return VectorField(lambda z: K.fn(z, Y(z)), K.n, name=f"{K.name}({Y.name})")
        return VectorForm(1, lambda z, v: K.fn(z, Y(z), v), K.n,
                          name=f"i_{Y.name}{K.name}")
    raise TypeError(f"cannot insert a vector field into {type(K).__name__}")


def insert_one_form(K: VectorForm, alpha: DifferentialForm) -> DifferentialForm:
    """i_K alpha = sum over slots of alpha(.., K X_i, ..) for a vector 1-form K."""
    if K.degree != 1:
        raise DegreeOutOfRange("insertion derivation requires a vector 1-form")
    if alpha.degree < 1:
        raise DegreeOutOfRange("cannot insert into a 0-form")

    def ev(z, *vectors):
        total = 0.0
        for i in range(len(vectors)):
            replaced = list(vectors)
            replaced[i] = K.fn(z, vectors[i])
            total = total + alpha.fn(z, *replaced)
        return total

    return DifferentialForm(alpha.degree, ev, alpha.n, name=f"i_{K.name}{alpha.name}")


def d_K(K: VectorForm, target) -> DifferentialForm:
    """d_K on a scalar field (d_K f = df o K) or a form (i_K d - d i_K)."""
    if isinstance(target, ScalarField):
        if K.degree == 1:
            def ev(z, v):
                return jets.directional(target.fn, z, K.fn(z, v))
            return DifferentialForm(1, ev, K.n, name=f"d_{K.name}{target.name}")

        def ev2(z, u, v):
            return jets.directional(target.fn, z, K.fn(z, u, v))
        return DifferentialForm(2, ev2, K.n, name=f"d_{K.name}{target.name}")
    if isinstance(target, DifferentialForm):
        if target.degree == 0:
            return d_K(K, ScalarField(target.fn, target.n, target.name))
        if K.degree != 1:
            raise DegreeOutOfRange("d_K on forms implemented for vector 1-forms")
        if target.degree > 2:
            raise DegreeOutOfRange("result degree would exceed 3")
        return insert_one_form(K, exterior_derivative(target)) - \
            exterior_derivative(insert_one_form(K, target))
    raise TypeError(f"d_K target must be a scalar field or form, got {type(target).__name__}")


def lie_derivative(Y: VectorField, alpha: DifferentialForm) -> DifferentialForm:
    """L_Y alpha = i_Y d(alpha) + d(i_Y alpha) (Cartan)."""
    if alpha.degree == 0:
        return function_form(field_apply(Y, ScalarField(alpha.fn, alpha.n)))
    da = exterior_derivative(alpha)
    first = insert_vector(Y, da)
    iya = insert_vector(Y, alpha)
    if alpha.degree == 1:
        second = d_function(iya)
    else:
        second = exterior_derivative(iya)
    if isinstance(first, ScalarField):
        first = function_form(first)
    if isinstance(second, ScalarField):  # pragma: no cover - degrees align above
        second = function_form(second)
    return first + second


# ---------------------------------------------------------------------------
# Frolicher-Nijenhuis brackets


def _bracket_1_0(K: VectorForm, Y: VectorField) -> VectorForm:
    """[K, Y] X = [KX, Y] - K [X, Y], tensorial in X."""
    n2 = 2 * K.n
    const = getattr(K, "coeffs", None)

    def column(z, X):
        if const is not None:
            kx = _matvec(const, X)
            if any(v != 0.0 for v in kx):
                d_kx_Y = jets.directional(Y.fn, z, kx)
            else:
                d_kx_Y = [0.0] * n2
            d_x_Y = jets.directional(Y.fn, z, X)
            kdxy = _matvec(const, d_x_Y)
            return [a - b for a, b in zip(d_kx_Y, kdxy)]
        yz = Y(z)
        kxz = K.fn(z, X)
        d_kx_Y = jets.directional(Y.fn, z, kxz)
        d_y_KX = jets.directional(lambda w: K.fn(w, X), z, yz)
        d_x_Y = jets.directional(Y.fn, z, X)
        kdxy = K.fn(z, d_x_Y)
        return [a - b - c for a, b, c in zip(d_kx_Y, d_y_KX, kdxy)]

    def matrix_fn(z):
        # shared lifted evaluations across all columns
        if const is not None:
            lifted = {}
            cols = []
            for b in range(n2):
                e_b = frame_vector(n2, b)
                lifted[b] = jets.directional(Y.fn, z, e_b)
            for b in range(n2):
                kx = const_col(b)
                if all(v == 0.0 for v in kx):
                    d_kx_Y = [0.0] * n2
                else:
                    # KX is a frame combination; reuse frame lifts when it is a frame vector
                    hot = [i for i, v in enumerate(kx) if v != 0.0]
                    if len(hot) == 1 and kx[hot[0]] == 1.0:
                        d_kx_Y = lifted[hot[0]]
                    else:
                        d_kx_Y = jets.directional(Y.fn, z, kx)
                kdxy = _matvec(const, lifted[b])
                cols.append([a - c for a, c in zip(d_kx_Y, kdxy)])
            return [[cols[b][a] for b in range(n2)] for a in range(n2)]
        yz = Y(z)
        kmat = K.matrix(z)
        kmat_shift = jets.directional(lambda w: _flatten(K.matrix(w)), z, yz)
        frame_lifts = [jets.directional(Y.fn, z, frame_vector(n2, b)) for b in range(n2)]
        kcol_lifts = [jets.directional(Y.fn, z, [kmat[a][b] for a in range(n2)])
                      for b in range(n2)]
        cols = []
        for b in range(n2):
            d_y_KX = [kmat_shift[a * n2 + b] for a in range(n2)]
            kdxy = _matvec(kmat, frame_lifts[b])
            cols.append([p - q - r for p, q, r in zip(kcol_lifts[b], d_y_KX, kdxy)])
        return [[cols[b][a] for b in range(n2)] for a in range(n2)]

    def const_col(b):
        return [const[a][b] for a in range(n2)]

    return VectorForm(1, column, K.n, name=f"[{K.name},{Y.name}]", matrix_fn=matrix_fn)


def _flatten(m):
    return [x for row in m for x in row]


def _bracket_1_1(K: VectorForm, L: VectorForm) -> VectorForm:
    """Standard FN bracket of two vector 1-forms, on constant arguments.

    [K,L](X,Y) = [KX,LY] + [LX,KY] - K([LX,Y] + [X,LY]) - L([KX,Y] + [X,KY]);
    the (KL + LK)[X,Y] term vanishes for constant X, Y.
    """

    def kcol(z, v):
        return K.fn(z, v)

    def lcol(z, v):
        return L.fn(z, v)

    def ev(z, X, Y):
        kX, kY = kcol(z, X), kcol(z, Y)
        lX, lY = lcol(z, X), lcol(z, Y)
        # [KX, LY] and [LX, KY] with constant-extended coefficient fields
        d_kX_LY = jets.directional(lambda w: lcol(w, Y), z, kX)
        d_lY_KX = jets.directional(lambda w: kcol(w, X), z, lY)
        d_lX_KY = jets.directional(lambda w: kcol(w, Y), z, lX)
        d_kY_LX = jets.directional(lambda w: lcol(w, X), z, kY)
        # [LX, Y] = -D_Y(LX), [X, LY] = D_X(LY) for constant X, Y
        d_Y_LX = jets.directional(lambda w: lcol(w, X), z, Y)
        d_X_LY = jets.directional(lambda w: lcol(w, Y), z, X)
        d_Y_KX = jets.directional(lambda w: kcol(w, X), z, Y)
        d_X_KY = jets.directional(lambda w: kcol(w, Y), z, X)
        k_arg = [a - b for a, b in zip(d_X_LY, d_Y_LX)]
        l_arg = [a - b for a, b in zip(d_X_KY, d_Y_KX)]
        k_term = K.fn(z, k_arg)
        l_term = L.fn(z, l_arg)
        return [(p - q) + (r - s) - t - u
                for p, q, r, s, t, u in
                zip(d_kX_LY, d_lY_KX, d_lX_KY, d_kY_LX, k_term, l_term)]

    return VectorForm(2, ev, K.n, name=f"[{K.name},{L.name}]")


def fn_bracket(K, L):
    """Frolicher-Nijenhuis bracket for degrees (1,0), (0,1), (1,1) and (0,0)."""
    k_is_form = isinstance(K, VectorForm)
    l_is_form = isinstance(L, VectorForm)
    if not k_is_form and not l_is_form:
        return lie_bracket(K, L)
    if k_is_form and not l_is_form:
        if K.degree != 1:
            raise DegreeOutOfRange("bracket with a vector field needs a vector 1-form")
        return _bracket_1_0(K, L)
    if not k_is_form and l_is_form:
        if L.degree != 1:
            raise DegreeOutOfRange("bracket with a vector field needs a vector 1-form")
        # [Y, L] = -[L, Y] (degrees 0 and 1)
        return _bracket_1_0(L, K).scale(-1.0)
    if K.degree == 1 and L.degree == 1:
        return _bracket_1_1(K, L)
    raise DegreeOutOfRange(
        f"bracket of degrees ({K.degree},{L.degree}) would exceed degree 2")


# ---------------------------------------------------------------------------
# potentials and structural residuals


def _semispray_residual(S: VectorField, points) -> float:
    n = S.n
    worst = 0.0
    for p in points:
        z = p.coords()
        sz = S(z)
        for i in range(n):
            worst = max(worst, abs(sz[i] - z[n + i]))
    return worst


def potential(K, S: VectorField, points=None, tol: float = PRECHECK_TOL):
    """K deg minus one obtained by inserting a semispray; the potential of K.

    When sample points are supplied, the preconditions (K semibasic, S a
    semispray) are residual-tested first.
    """
    degree = K.degree if isinstance(K, (VectorForm, DifferentialForm)) else 0
    if degree < 1:
        raise DegreeOutOfRange("potential needs degree >= 1")
    if points is not None:
        if _semispray_residual(S, points) > tol:
            raise NotSemispray("J(S) != C beyond tolerance on the supplied points")
        r = semibasic_residual(K, points)
        if r > tol:
            raise NotSemibasic(f"potential needs a semibasic operand, residual {r:.3e}")
    return insert_vector(S, K)


def homogeneity_residual(K, r: float, points, C: VectorField | None = None) -> float:
    """sup norm of [C, K] - (r - 1) K over the points (and frame, for 1-forms)."""
    if isinstance(K, VectorField):
        C = C or liouville_field(K.n)
        dev = lie_bracket(C, K) - K.scale(r - 1.0)
        return max(max(abs(c) for c in dev(p.coords())) for p in points)
    if isinstance(K, VectorForm) and K.degree == 1:
        C = C or liouville_field(K.n)
        dev = fn_bracket(C, K) - K.scale(r - 1.0)
        n2 = 2 * K.n
        worst = 0.0
        for p in points:
            m = dev.matrix(p.coords())
            worst = max(worst, max(abs(x) for row in m for x in row))
        return worst
    raise TypeError("homogeneity defined for vector fields and vector 1-forms")


def semibasic_residual(K, points) -> float:
    """Deviation of K from being semibasic.

    Vector forms: sup of |J o K| and |K(vertical, ..)| over the frame.
    Differential forms: sup of |i_J K| over frame arguments (for 1-forms this
    is the same as vanishing on verticals).
    """
    if isinstance(K, VectorForm):
        n = K.n
        n2 = 2 * n
        worst = 0.0
        fr = frame(n2)
        for p in points:
            z = p.coords()
            if K.degree == 1:
                m = K.matrix(z)
                # J o K = 0: every column must be vertical (first n rows zero)
                for b in range(n2):
                    for i in range(n):
                        worst = max(worst, abs(m[i][b]))
                # K kills verticals: columns n..2n-1 vanish entirely
                for i in range(n):
                    for a in range(n2):
                        worst = max(worst, abs(m[a][n + i]))
            else:
                for i in range(n):
                    for b in range(n2):
                        val = K.fn(z, fr[n + i], fr[b])
                        # vertical insertion vanishes
                        worst = max(worst, max(abs(v) for v in val))
                # J o K = 0: output of K is vertical on every frame pair
                for a in range(n2):
                    for b in range(a + 1, n2):
                        val = K.fn(z, fr[a], fr[b])
                        worst = max(worst, max(abs(v) for v in val[:n]))
        return worst
    if isinstance(K, DifferentialForm):
        if K.degree < 1:
            raise DegreeOutOfRange("semibasic test needs degree >= 1")
        J = vertical_endomorphism(K.n)
        ijk = insert_one_form(J, K)
        n2 = 2 * K.n
        fr = frame(n2)
        worst = 0.0
        for p in points:
            z = p.coords()
            for args in itertools.combinations(fr, K.degree):
                worst = max(worst, abs(ijk.fn(z, *args)))
        return worst
    raise TypeError("semibasic test defined for forms and vector forms")
