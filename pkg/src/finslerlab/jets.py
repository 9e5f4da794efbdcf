"""First-order jet (dual number) arithmetic with safe nesting.

A ``Jet`` stores a value and one directional-derivative coefficient.  Nesting
jets inside jets yields exact mixed derivatives of any order; every lift gets
a fresh integer tag so that arithmetic between jets created at different
nesting levels cannot confuse their infinitesimals (the classic perturbation
confusion bug).  The tag order is the nesting order: when two jets meet, the
one with the larger tag is the outer wrapper and treats the other as a
constant coefficient.

Only operations needed by smooth energy functions on the slit bundle are
implemented: field arithmetic, constant powers, sqrt, exp, log, sin, cos.
"""

from __future__ import annotations

import itertools
import math

_TAGS = itertools.count(1)


def fresh_tag() -> int:
    """Return a new, globally unique lift tag (monotonically increasing)."""
    return next(_TAGS)


class Jet:
    """value + epsilon * dot, for one particular lift tag."""

    __slots__ = ("tag", "val", "dot")

    def __init__(self, tag, val, dot):
        self.tag = tag
        self.val = val
        self.dot = dot

    # -- helpers -----------------------------------------------------------

    def __repr__(self):
        return f"Jet<{self.tag}>({self.val!r}, {self.dot!r})"

    # -- ring operations ---------------------------------------------------

    def __add__(self, o):
        if type(o) is Jet:
            t = o.tag
            if t == self.tag:
                return Jet(t, self.val + o.val, self.dot + o.dot)
            if t > self.tag:
                return Jet(t, self + o.val, o.dot)
        return Jet(self.tag, self.val + o, self.dot)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.tag, -self.val, -self.dot)

    def __sub__(self, o):
        if type(o) is Jet:
            t = o.tag
            if t == self.tag:
                return Jet(t, self.val - o.val, self.dot - o.dot)
            if t > self.tag:
                return Jet(t, self - o.val, -o.dot)
        return Jet(self.tag, self.val - o, self.dot)

    def __rsub__(self, o):
        # o is scalar or lower-tag jet
        return Jet(self.tag, o - self.val, -self.dot)

    def __mul__(self, o):
        if type(o) is Jet:
            t = o.tag
            if t == self.tag:
                return Jet(t, self.val * o.val, self.val * o.dot + self.dot * o.val)
            if t > self.tag:
                return Jet(t, self * o.val, self * o.dot)
        return Jet(self.tag, self.val * o, self.dot * o)

    __rmul__ = __mul__

    def __truediv__(self, o):
        if type(o) is Jet:
            t = o.tag
            if t == self.tag:
                q = self.val / o.val
                return Jet(t, q, (self.dot - q * o.dot) / o.val)
            if t > self.tag:
                q = self / o.val
                return Jet(t, q, -q * o.dot / o.val)
        return Jet(self.tag, self.val / o, self.dot / o)

    def __rtruediv__(self, o):
        q = o / self.val
        return Jet(self.tag, q, -q * self.dot / self.val)

    def __pow__(self, p):
        if not isinstance(p, (int, float)):
            raise TypeError("jet powers must have constant numeric exponents")
        if p == 2:
            return self * self
        v = self.val ** p
        return Jet(self.tag, v, p * self.val ** (p - 1) * self.dot)

    # -- smooth primitives ---------------------------------------------------

    def sqrt(self):
        r = sqrt(self.val)
        return Jet(self.tag, r, self.dot / (2.0 * r))

    def exp(self):
        e = exp(self.val)
        return Jet(self.tag, e, e * self.dot)

    def log(self):
        return Jet(self.tag, log(self.val), self.dot / self.val)

    def sin(self):
        return Jet(self.tag, sin(self.val), cos(self.val) * self.dot)

    def cos(self):
        return Jet(self.tag, cos(self.val), -sin(self.val) * self.dot)


def sqrt(x):
    return x.sqrt() if type(x) is Jet else math.sqrt(x)


def exp(x):
    return x.exp() if type(x) is Jet else math.exp(x)


def log(x):
    return x.log() if type(x) is Jet else math.log(x)


def sin(x):
    return x.sin() if type(x) is Jet else math.sin(x)


def cos(x):
    return x.cos() if type(x) is Jet else math.cos(x)


def realpart(x) -> float:
    """Strip all jet layers, returning the underlying float value."""
    while type(x) is Jet:
        x = x.val
    return x


def lift(coords, direction, tag):
    """Wrap each coordinate as value + epsilon_tag * direction component."""
    return [Jet(tag, c, d) for c, d in zip(coords, direction)]


def primal(x, tag):
    """Value part of ``x`` with respect to the lift ``tag``."""
    if type(x) is Jet and x.tag == tag:
        return x.val
    return x


def tangent(x, tag):
    """Derivative part of ``x`` with respect to the lift ``tag`` (0.0 if constant)."""
    if type(x) is Jet and x.tag == tag:
        return x.dot
    return 0.0


def jvp(fn, coords, direction):
    """Evaluate ``fn`` and its directional derivative along ``direction``.

    ``fn`` maps a coordinate list to a scalar or a list of scalars; the return
    mirrors that shape as (value, derivative).
    """
    tag = fresh_tag()
    out = fn(lift(coords, direction, tag))
    if isinstance(out, (list, tuple)):
        return [primal(o, tag) for o in out], [tangent(o, tag) for o in out]
    return primal(out, tag), tangent(out, tag)


def directional(fn, coords, direction):
    """Directional derivative of a scalar-or-vector function (derivative only)."""
    return jvp(fn, coords, direction)[1]


def nth_directional(fn, coords, directions):
    """Exact mixed directional derivative D_{v1} ... D_{vk} fn at ``coords``.

    Each direction adds one nested lift; directions may themselves contain
    jets from enclosing lifts.
    """
    if not directions:
        return fn(coords)
    tag = fresh_tag()
    inner = nth_directional(fn, lift(coords, directions[-1], tag), directions[:-1])
    if isinstance(inner, (list, tuple)):
        return [tangent(c, tag) for c in inner]
    return tangent(inner, tag)
