"""Exact symbolic algebra of polynomial-coefficient differential operators.

Operators live in the algebra generated by the three coordinates x, y, z and
the three partial derivatives dx, dy, dz, subject to the single rewrite rule

    d_i r_j = r_j d_i + delta_ij.

Every operator is kept in normal order (all coordinate factors to the left of
all derivative factors), so an operator is a finite map from normal-ordered
monomials to coefficients and equality is decidable term by term.

Coefficients are exact: Gaussian rationals (Fraction real and imaginary
parts) times integer powers of the reduced Planck unit hbar, so identities
such as [x, p_x] = i*hbar hold with zero tolerance.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb, factorial
from typing import Iterable, Mapping, NamedTuple

AXES = ("x", "y", "z")

_COORD_INDEX = {"x": 0, "y": 1, "z": 2}
_DERIV_INDEX = {"dx": 0, "dy": 1, "dz": 2, "∂x": 0, "∂y": 1, "∂z": 2}

# cyclic successor pairs: axis k -> (i, j) with L_k proportional to r_i d_j - r_j d_i
_CYCLIC = {"x": ("y", "z"), "y": ("z", "x"), "z": ("x", "y")}


def _fraction_pair(value) -> tuple[Fraction, Fraction]:
    """Coerce a number (or an (re, im) pair) to exact rational parts."""
    if isinstance(value, tuple):
        re, im = value
        return Fraction(re), Fraction(im)
    if isinstance(value, complex):
        return Fraction(value.real), Fraction(value.imag)
    return Fraction(value), Fraction(0)


class ExactScalar:
    """An exact complex-rational polynomial in hbar.

    Stored sparsely as {hbar_power: (re, im)} with zero entries dropped.
    Products of operators raise the hbar degree (e.g. L_x * L_y carries
    hbar^2), so arbitrary powers are supported.
    """

    __slots__ = ("_terms",)

    def __init__(self, value=0, hbar_power: int = 0):
        if isinstance(value, ExactScalar):
            terms = dict(value._terms)
            if hbar_power:
                terms = {p + hbar_power: c for p, c in terms.items()}
        else:
            re, im = _fraction_pair(value)
            terms = {} if re == 0 and im == 0 else {hbar_power: (re, im)}
        self._terms = terms

    @classmethod
    def _raw(cls, terms: dict[int, tuple[Fraction, Fraction]]) -> "ExactScalar":
        out = object.__new__(cls)
        out._terms = {p: c for p, c in terms.items() if c != (0, 0)}
        return out

    @classmethod
    def i(cls) -> "ExactScalar":
        return cls((0, 1))

    @classmethod
    def hbar(cls, power: int = 1) -> "ExactScalar":
        return cls(1, hbar_power=power)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def items(self):
        """Iterate (hbar_power, (re, im)) pairs in ascending power order."""
        return sorted(self._terms.items())

    def __add__(self, other) -> "ExactScalar":
        other = other if isinstance(other, ExactScalar) else ExactScalar(other)
        terms = dict(self._terms)
        for p, (re, im) in other._terms.items():
            r0, i0 = terms.get(p, (Fraction(0), Fraction(0)))
            terms[p] = (r0 + re, i0 + im)
        return ExactScalar._raw(terms)

    def __neg__(self) -> "ExactScalar":
        return ExactScalar._raw({p: (-re, -im) for p, (re, im) in self._terms.items()})

    def __sub__(self, other) -> "ExactScalar":
        other = other if isinstance(other, ExactScalar) else ExactScalar(other)
        return self + (-other)

    def __mul__(self, other) -> "ExactScalar":
        other = other if isinstance(other, ExactScalar) else ExactScalar(other)
        terms: dict[int, tuple[Fraction, Fraction]] = {}
        for p1, (a, b) in self._terms.items():
            for p2, (c, d) in other._terms.items():
                re, im = a * c - b * d, a * d + b * c
                r0, i0 = terms.get(p1 + p2, (Fraction(0), Fraction(0)))
                terms[p1 + p2] = (r0 + re, i0 + im)
        return ExactScalar._raw(terms)

    __rmul__ = __mul__
    __radd__ = __add__

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactScalar):
            try:
                other = ExactScalar(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def as_complex(self, hbar: float = 1.0) -> complex:
        """Numeric value with hbar substituted (default 1, the numeric convention)."""
        out = 0j
        for p, (re, im) in self._terms.items():
            out += complex(re, im) * hbar**p
        return out

    def __repr__(self):
        return f"ExactScalar({dict(self.items())!r})"


class Monomial(NamedTuple):
    """Normal-ordered monomial x^a y^b z^c dx^d dy^e dz^f (coordinates left)."""

    coords: tuple[int, int, int]
    derivs: tuple[int, int, int]

    @property
    def is_identity(self) -> bool:
        return self.coords == (0, 0, 0) and self.derivs == (0, 0, 0)


IDENTITY_MONOMIAL = Monomial((0, 0, 0), (0, 0, 0))


def _bump(t: tuple[int, int, int], axis: int, by: int) -> tuple[int, int, int]:
    out = list(t)
    out[axis] += by
    return tuple(out)


def _monomial_product(a: Monomial, b: Monomial) -> list[tuple[Monomial, int]]:
    """Normal-order the product of two normal-ordered monomials.

    Commuting d^beta through x^gamma:
        d^beta x^gamma = sum_k C(beta,k) C(gamma,k) k! x^(gamma-k) d^(beta-k)
    componentwise over the three axes, hence the triple loop.
    """
    out = []
    kmax = [min(a.derivs[ax], b.coords[ax]) for ax in range(3)]
    for k0 in range(kmax[0] + 1):
        for k1 in range(kmax[1] + 1):
            for k2 in range(kmax[2] + 1):
                k = (k0, k1, k2)
                w = 1
                for ax in range(3):
                    w *= comb(a.derivs[ax], k[ax]) * comb(b.coords[ax], k[ax]) * factorial(k[ax])
                mono = Monomial(
                    tuple(a.coords[ax] + b.coords[ax] - k[ax] for ax in range(3)),
                    tuple(a.derivs[ax] + b.derivs[ax] - k[ax] for ax in range(3)),
                )
                out.append((mono, w))
    return out


class SymOp:
    """A finite sum of normal-ordered monomials with ExactScalar coefficients.

    Values are immutable once constructed; all arithmetic returns new objects,
    so SymOps are safe to share across threads.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, ExactScalar] | None = None):
        clean: dict[Monomial, ExactScalar] = {}
        for mono, coeff in (terms or {}).items():
            coeff = coeff if isinstance(coeff, ExactScalar) else ExactScalar(coeff)
            if not coeff.is_zero:
                clean[mono] = coeff
        self.terms = clean

    # ---- constructors ----
    @classmethod
    def zero(cls) -> "SymOp":
        return cls()

    @classmethod
    def identity(cls, coeff=1) -> "SymOp":
        return cls({IDENTITY_MONOMIAL: ExactScalar(coeff)})

    @classmethod
    def generator(cls, symbol: str) -> "SymOp":
        """Single coordinate or derivative letter: one of x,y,z,dx,dy,dz."""
        if symbol in _COORD_INDEX:
            return cls({Monomial(_bump((0, 0, 0), _COORD_INDEX[symbol], 1), (0, 0, 0)): ExactScalar(1)})
        if symbol in _DERIV_INDEX:
            return cls({Monomial((0, 0, 0), _bump((0, 0, 0), _DERIV_INDEX[symbol], 1)): ExactScalar(1)})
        raise ValueError(f"unknown generator symbol {symbol!r}")

    # ---- ring structure ----
    def __add__(self, other: "SymOp") -> "SymOp":
        terms = dict(self.terms)
        for mono, coeff in other.terms.items():
            acc = terms.get(mono)
            terms[mono] = coeff if acc is None else acc + coeff
        return SymOp(terms)

    def __neg__(self) -> "SymOp":
        return SymOp({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "SymOp") -> "SymOp":
        return self + (-other)

    def __mul__(self, other) -> "SymOp":
        if not isinstance(other, SymOp):
            return SymOp({m: c * ExactScalar(other) for m, c in self.terms.items()})
        out: dict[Monomial, ExactScalar] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                c12 = c1 * c2
                for mono, w in _monomial_product(m1, m2):
                    piece = c12 * w
                    acc = out.get(mono)
                    out[mono] = piece if acc is None else acc + piece
        return SymOp(out)

    def __rmul__(self, other) -> "SymOp":
        # scalars commute with everything
        return self * other

    def __pow__(self, n: int) -> "SymOp":
        if n < 0:
            raise ValueError("negative operator powers are not defined")
        out = SymOp.identity()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymOp):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __str__(self) -> str:
        return format_symop(self)

    def __repr__(self) -> str:
        return f"SymOp<{format_symop(self)}>"


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def normal_order(word: Iterable[str], coeff=1) -> SymOp:
    """Normal-order a word over {x,y,z,dx,dy,dz} with a scalar coefficient.

    The word is multiplied out left to right; each step applies the rewrite
    d_i r_j = r_j d_i + delta_ij until the result is in canonical form.
    """
    op = SymOp.identity(coeff)
    for symbol in word:
        op = op * SymOp.generator(symbol)
    return op


def mul(a: SymOp, b: SymOp) -> SymOp:
    return a * b


def commutator(a: SymOp, b: SymOp) -> SymOp:
    return a * b - b * a


def coordinate(axis: str) -> SymOp:
    return SymOp.generator(axis)


def derivative(axis: str) -> SymOp:
    return SymOp.generator("d" + axis)


def momentum(axis: str) -> SymOp:
    """p_axis = -i hbar d_axis."""
    return derivative(axis) * ExactScalar((0, -1), hbar_power=1)


def angular_momentum(axis: str) -> SymOp:
    """L_x = -i hbar (y dz - z dy) and cyclic permutations."""
    if axis not in _CYCLIC:
        raise ValueError(f"axis must be one of x, y, z, not {axis!r}")
    i, j = _CYCLIC[axis]
    body = coordinate(i) * derivative(j) - coordinate(j) * derivative(i)
    return body * ExactScalar((0, -1), hbar_power=1)


def rotation_generator(axis: str) -> SymOp:
    """The real generator i L_axis / hbar = r_i d_j - r_j d_i (cyclic i, j)."""
    i, j = _CYCLIC[axis]
    return coordinate(i) * derivative(j) - coordinate(j) * derivative(i)


def apply_to_polynomial(op: SymOp, poly: Mapping[tuple[int, int, int], object]) -> dict:
    """Apply a normal-ordered operator to a polynomial in x, y, z.

    The polynomial is a map exponent-triple -> coefficient.  Each operator
    term x^a d^b acts analytically: d^b picks up falling factorials, then the
    coordinate part shifts exponents.  Returns the resulting polynomial with
    ExactScalar coefficients (zero terms dropped).
    """
    out: dict[tuple[int, int, int], ExactScalar] = {}
    for mono, coeff in op.terms.items():
        for exps, pc in poly.items():
            w = 1
            new_exps = []
            for ax in range(3):
                d, e = mono.derivs[ax], exps[ax]
                if d > e:
                    w = 0
                    break
                w *= factorial(e) // factorial(e - d)
                new_exps.append(e - d + mono.coords[ax])
            if w == 0:
                continue
            key = tuple(new_exps)
            piece = coeff * ExactScalar(pc) * w
            acc = out.get(key)
            total = piece if acc is None else acc + piece
            if total.is_zero:
                out.pop(key, None)
            else:
                out[key] = total
    return out


# ---------------------------------------------------------------------------
# canonical printing
# ---------------------------------------------------------------------------

def _fmt_rational(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _coeff_atom(re: Fraction, im: Fraction) -> tuple[int, str]:
    """Return (sign, printed magnitude) for a Gaussian rational.

    Mixed real/imaginary values are parenthesised and carry sign +1; pure
    values have their sign extracted so terms join with ' + ' / ' - '.
    """
    if im == 0:
        sign = -1 if re < 0 else 1
        mag = abs(re)
        return sign, ("" if mag == 1 else _fmt_rational(mag))
    if re == 0:
        sign = -1 if im < 0 else 1
        mag = abs(im)
        return sign, ("i" if mag == 1 else _fmt_rational(mag) + "i")
    im_sign = "+" if im > 0 else "-"
    im_mag = abs(im)
    im_part = "i" if im_mag == 1 else _fmt_rational(im_mag) + "i"
    return 1, f"({_fmt_rational(re)}{im_sign}{im_part})"


def _power_str(base: str, exp: int) -> str:
    if exp == 0:
        return ""
    return base if exp == 1 else f"{base}^{exp}"


def format_symop(op: SymOp) -> str:
    """Canonical text form: normal-ordered terms sorted lexicographically.

    The output re-parses to the same operator (parse -> print is a fixed
    point): powers use ^, hbar prints as ħ, derivatives as ∂x, ∂y, ∂z, and
    adjacency means multiplication.
    """
    if op.is_zero:
        return "0"
    atoms: list[tuple[int, str]] = []
    for mono in sorted(op.terms, key=lambda m: (m.coords, m.derivs)):
        for power, (re, im) in op.terms[mono].items():
            sign, coeff = _coeff_atom(re, im)
            parts = [coeff, _power_str("ħ", power)]
            parts += [_power_str(AXES[ax], mono.coords[ax]) for ax in range(3)]
            parts += [_power_str("∂" + AXES[ax], mono.derivs[ax]) for ax in range(3)]
            body = "".join(parts)
            atoms.append((sign, body or "1"))
    first_sign, first_body = atoms[0]
    text = ("-" if first_sign < 0 else "") + first_body
    for sign, body in atoms[1:]:
        text += (" - " if sign < 0 else " + ") + body
    return text
