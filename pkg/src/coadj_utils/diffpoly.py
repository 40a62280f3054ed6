"""
Differential polynomials in jet variables of named fields on (t, x).

A ``DiffPoly`` maps monomials (sorted tuples of ``(JetVar, exponent)``) to
exact sympy coefficients that may involve the formal parameters
q, alpha, beta, c and e. Everything is immutable.

Text syntax (used by the CLI and by ``str``)::

    D', X''', Ddot, Xddot', q*X''' + 2*X'*D - 1/2*alpha*N^2

Primes count x-derivatives; the suffix ``dot``/``ddot``/``dddot`` counts
t-derivatives. Field names must not end in ``dot`` and must not collide
with a parameter name (``a`` and ``b`` are accepted as aliases of alpha and
beta on input).

Normal form modulo total x-derivatives is decided by linear algebra: terms
are grouped by their field content and x-weight, the image of ∂_x inside
each group is put in echelon form, and the remainder of the reduction is
the canonical representative. Columns are eliminated highest x-jet first,
starting from the lexicographically last field, so derivatives are moved
off smearing functions (μ, λ, ξ, ...) onto the physical fields.
"""

from __future__ import annotations

import functools
import logging
import re
from collections import defaultdict
from dataclasses import dataclass
from typing import (
    Callable,
    Dict,
    Hashable,
    Iterable,
    Iterator,
    List,
    Mapping,
    NamedTuple,
    Optional,
    Sequence,
    Set,
    Tuple,
    Union,
)

import numpy as np
import sympy as sp

from .config import ToolkitConfig, default_config
from .errors import (
    NonFiniteInputError,
    OrderBoundError,
    ParseError,
    SingularWindowError,
    UncoveredFieldError,
)

logger = logging.getLogger(__name__)

q, alpha, beta, c, e = sp.symbols("q alpha beta c e")
PARAMETERS: Dict[str, sp.Symbol] = {"q": q, "alpha": alpha, "beta": beta, "c": c, "e": e}
PARAMETER_ALIASES: Dict[str, sp.Symbol] = {**PARAMETERS, "a": alpha, "b": beta}

T_SYMBOL, X_SYMBOL = sp.symbols("t x", real=True)

Coefficient = sp.Expr
Scalar = Union[int, float, sp.Expr]


class JetVar(NamedTuple):
    """Field symbol with its t- and x-derivative orders."""

    field: str
    t: int = 0
    x: int = 0

    def shifted(self, direction: str, times: int = 1) -> "JetVar":
        if direction == "x":
            return JetVar(self.field, self.t, self.x + times)
        if direction == "t":
            return JetVar(self.field, self.t + times, self.x)
        raise ValueError(f"direction must be 't' or 'x', got {direction!r}")

    @property
    def order(self) -> int:
        return self.t + self.x

    def __str__(self) -> str:
        dots = "d" * (self.t - 1) + "dot" if self.t else ""
        return f"{self.field}{dots}{chr(39) * self.x}"


Monomial = Tuple[Tuple[JetVar, int], ...]

_ONE: Monomial = ()


# ----------------------------------------------------------------------
# coefficients and monomials
# ----------------------------------------------------------------------
def _canon(value: Scalar) -> Coefficient:
    """Canonical exact coefficient (Laurent-expanded, or cancelled rational)."""
    if isinstance(value, float):
        value = sp.Rational(repr(value))
    value = sp.sympify(value)
    if value.is_Number:
        return value
    value = sp.expand(value)
    if value.is_Number:
        return value
    if any(
        p.exp.is_negative and not p.base.is_Symbol for p in value.atoms(sp.Pow)
    ):
        value = sp.cancel(value)
    return value


def _is_zero(value: Coefficient) -> bool:
    # coefficients are canonical, so zero is structural
    return value == 0


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    merged = dict(a)
    for jet, exp in b:
        merged[jet] = merged.get(jet, 0) + exp
    return tuple(sorted(merged.items()))


def _mono_div(m: Monomial, g: Monomial) -> Optional[Monomial]:
    remaining = dict(m)
    for jet, exp in g:
        have = remaining.get(jet, 0)
        if have < exp:
            return None
        if have == exp:
            del remaining[jet]
        else:
            remaining[jet] = have - exp
    return tuple(sorted(remaining.items()))


def _mono_from(factors: Mapping[JetVar, int]) -> Monomial:
    return tuple(sorted((j, n) for j, n in factors.items() if n))


def _mono_str(m: Monomial) -> str:
    return "*".join(str(j) if n == 1 else f"{j}^{n}" for j, n in m)


def _derive_monomial(m: Monomial, direction: str) -> Dict[Monomial, int]:
    """Leibniz rule for one monomial; integer coefficients."""
    out: Dict[Monomial, int] = defaultdict(int)
    for jet, exp in m:
        factors = dict(m)
        factors[jet] -= 1
        shifted = jet.shifted(direction)
        factors[shifted] = factors.get(shifted, 0) + 1
        out[_mono_from(factors)] += exp
    return out


# ----------------------------------------------------------------------
# the polynomial type
# ----------------------------------------------------------------------
class DiffPoly:
    """Immutable differential polynomial with exact coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Optional[Mapping[Monomial, Scalar]] = None):
        clean: Dict[Monomial, Coefficient] = {}
        for mono, coeff in (terms or {}).items():
            value = _canon(coeff)
            if not _is_zero(value):
                clean[mono] = value
        self._terms = clean
        self._hash: Optional[int] = None

    # construction -------------------------------------------------------
    @classmethod
    def jet(cls, field: str, t: int = 0, x: int = 0) -> "DiffPoly":
        _check_field_name(field)
        return cls({((JetVar(field, t, x), 1),): 1})

    @classmethod
    def constant(cls, value: Scalar) -> "DiffPoly":
        return cls({_ONE: value})

    @classmethod
    def parameter(cls, name: str) -> "DiffPoly":
        if name not in PARAMETER_ALIASES:
            raise ParseError(f"unknown parameter {name!r}")
        return cls.constant(PARAMETER_ALIASES[name])

    # inspection ---------------------------------------------------------
    @property
    def terms(self) -> Dict[Monomial, Coefficient]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[Monomial, Coefficient]]:
        return iter(sorted(self._terms.items()))

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def jets(self) -> Set[JetVar]:
        return {j for mono in self._terms for j, _ in mono}

    def free_fields(self) -> Set[str]:
        return {j.field for j in self.jets()}

    fields = free_fields

    def parameters(self) -> Set[sp.Symbol]:
        out: Set[sp.Symbol] = set()
        for coeff in self._terms.values():
            out |= coeff.free_symbols
        return out

    def coefficient_of(self, monomial: Union[Monomial, "DiffPoly"]) -> Coefficient:
        """Coefficient of a monomial (given as tuple or as a one-term DiffPoly)."""
        if isinstance(monomial, DiffPoly):
            if len(monomial) != 1:
                raise ValueError("coefficient_of needs a single monomial")
            monomial = next(iter(monomial._terms))
        return self._terms.get(monomial, sp.Integer(0))

    def depends_on(self, fields: Iterable[str]) -> bool:
        names = set(fields)
        return any(j.field in names for j in self.jets())

    def max_order(self, direction: str = "x") -> int:
        jets = self.jets()
        if not jets:
            return 0
        return max(j.x if direction == "x" else j.t for j in jets)

    def leading_monomial(self) -> Optional[Monomial]:
        return max(self._terms) if self._terms else None

    # arithmetic ---------------------------------------------------------
    @staticmethod
    def _coerce(other: Union["DiffPoly", Scalar]) -> "DiffPoly":
        if isinstance(other, DiffPoly):
            return other
        return DiffPoly.constant(other)

    def __add__(self, other: Union["DiffPoly", Scalar]) -> "DiffPoly":
        other = self._coerce(other)
        merged: Dict[Monomial, Coefficient] = dict(self._terms)
        for mono, coeff in other._terms.items():
            merged[mono] = merged.get(mono, 0) + coeff
        return DiffPoly(merged)

    __radd__ = __add__

    def __neg__(self) -> "DiffPoly":
        return DiffPoly({m: -cf for m, cf in self._terms.items()})

    def __sub__(self, other: Union["DiffPoly", Scalar]) -> "DiffPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Scalar) -> "DiffPoly":
        return self._coerce(other) - self

    def __mul__(self, other: Union["DiffPoly", Scalar]) -> "DiffPoly":
        other = self._coerce(other)
        product: Dict[Monomial, Coefficient] = defaultdict(lambda: sp.Integer(0))
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                mono = _mono_mul(m1, m2)
                product[mono] = product[mono] + c1 * c2
        return DiffPoly(product)

    __rmul__ = __mul__

    def __truediv__(self, other: Scalar) -> "DiffPoly":
        if isinstance(other, DiffPoly):
            if other.jets():
                raise ParseError("division by a polynomial in jet variables")
            other = other.coefficient_of(_ONE)
        other = sp.sympify(other)
        if other == 0:
            raise ZeroDivisionError("division of a DiffPoly by zero")
        return self * (sp.Integer(1) / other)

    def __pow__(self, power: int) -> "DiffPoly":
        if not isinstance(power, int) or power < 0:
            raise ValueError(f"only non-negative integer powers are supported, got {power}")
        result = DiffPoly.constant(1)
        for _ in range(power):
            result = result * self
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, float, sp.Expr)):
            other = DiffPoly.constant(other)
        if not isinstance(other, DiffPoly):
            return NotImplemented
        if set(self._terms) != set(other._terms):
            return False
        return all(_is_zero(_canon(cf - other._terms[m])) for m, cf in self._terms.items())

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms))
        return self._hash

    # calculus -----------------------------------------------------------
    def total_derivative(
        self, direction: str = "x", times: int = 1, max_order: Optional[int] = None
    ) -> "DiffPoly":
        """∂_t or ∂_x by the Leibniz rule.

        Raises:
            OrderBoundError: a jet order would exceed ``max_order`` (default
                ``max_jet_order`` of the configuration)
        """
        bound = default_config().max_jet_order if max_order is None else max_order
        current = self
        for _ in range(times):
            result: Dict[Monomial, Coefficient] = defaultdict(lambda: sp.Integer(0))
            for mono, coeff in current._terms.items():
                for jet, _ in mono:
                    if (jet.x if direction == "x" else jet.t) + 1 > bound:
                        raise OrderBoundError(
                            f"{direction}-derivative of {jet} exceeds the jet order bound {bound}"
                        )
                for new, count in _derive_monomial(mono, direction).items():
                    result[new] = result[new] + count * coeff
            current = DiffPoly(result)
        return current

    def dx(self, times: int = 1) -> "DiffPoly":
        return self.total_derivative("x", times)

    def dt(self, times: int = 1) -> "DiffPoly":
        return self.total_derivative("t", times)

    def partial(self, jet: JetVar) -> "DiffPoly":
        """Partial derivative with respect to one jet variable."""
        out: Dict[Monomial, Coefficient] = {}
        for mono, coeff in self._terms.items():
            factors = dict(mono)
            exp = factors.get(jet, 0)
            if exp:
                factors[jet] = exp - 1
                out[_mono_from(factors)] = coeff * exp
        return DiffPoly(out)

    # structural transformations ----------------------------------------
    def substitute(self, mapping: Mapping[str, "DiffPoly"]) -> "DiffPoly":
        """Replace every jet of a mapped field by the matching derivative of its image."""
        cache: Dict[JetVar, DiffPoly] = {}

        def image(jet: JetVar) -> DiffPoly:
            if jet not in cache:
                value = mapping[jet.field]
                if jet.t:
                    value = value.total_derivative("t", jet.t)
                if jet.x:
                    value = value.total_derivative("x", jet.x)
                cache[jet] = value
            return cache[jet]

        total = DiffPoly()
        for mono, coeff in self._terms.items():
            term = DiffPoly({_ONE: coeff})
            kept: Dict[JetVar, int] = {}
            for jet, exp in mono:
                if jet.field in mapping:
                    term = term * image(jet) ** exp
                else:
                    kept[jet] = exp
            total = total + term * DiffPoly({_mono_from(kept): 1})
        return total

    def restrict(
        self,
        zero: Iterable[str] = (),
        t_independent: Iterable[str] = (),
        x_independent: Iterable[str] = (),
    ) -> "DiffPoly":
        """Gauge slice: drop listed fields and the t- or x-derivatives of others."""
        zero, t_ind, x_ind = set(zero), set(t_independent), set(x_independent)

        def vanishes(jet: JetVar) -> bool:
            return (
                jet.field in zero
                or (jet.field in t_ind and jet.t > 0)
                or (jet.field in x_ind and jet.x > 0)
            )

        return DiffPoly(
            {m: cf for m, cf in self._terms.items() if not any(vanishes(j) for j, _ in m)}
        )

    def rename(self, mapping: Mapping[str, str]) -> "DiffPoly":
        for new in mapping.values():
            _check_field_name(new)
        out: Dict[Monomial, Coefficient] = defaultdict(lambda: sp.Integer(0))
        for mono, coeff in self._terms.items():
            factors: Dict[JetVar, int] = defaultdict(int)
            for jet, exp in mono:
                factors[JetVar(mapping.get(jet.field, jet.field), jet.t, jet.x)] += exp
            new_mono = _mono_from(factors)
            out[new_mono] = out[new_mono] + coeff
        return DiffPoly(out)

    def subs_parameters(self, values: Mapping[Union[str, sp.Symbol], Scalar]) -> "DiffPoly":
        subs = {PARAMETER_ALIASES.get(k, k) if isinstance(k, str) else k: v for k, v in values.items()}
        return DiffPoly({m: cf.subs(subs) for m, cf in self._terms.items()})

    def map_coefficients(self, func: Callable[[Coefficient], Scalar]) -> "DiffPoly":
        return DiffPoly({m: func(cf) for m, cf in self._terms.items()})

    # numeric evaluation -------------------------------------------------
    def to_sympy(self, jet_symbols: Optional[Mapping[JetVar, sp.Expr]] = None) -> sp.Expr:
        """sympy expression; jets become symbols named by their text form."""
        jet_symbols = dict(jet_symbols or {})
        total = sp.Integer(0)
        for mono, coeff in self._terms.items():
            term = coeff
            for jet, exp in mono:
                sym = jet_symbols.setdefault(jet, sp.Symbol(str(jet)))
                term = term * sym**exp
            total += term
        return total

    def lambdify(
        self, parameters: Optional[Mapping[str, float]] = None
    ) -> Tuple[List[JetVar], Callable[..., np.ndarray]]:
        """Numeric function of the jets (in canonical order) for given parameter values."""
        poly = self.subs_parameters(parameters or {})
        jets = sorted(poly.jets())
        symbols = {j: sp.Dummy(str(j)) for j in jets}
        expr = poly.to_sympy(symbols)
        leftover = expr.free_symbols - set(symbols.values())
        if leftover:
            raise ParseError(f"unbound parameters: {sorted(map(str, leftover))}")
        return jets, sp.lambdify([symbols[j] for j in jets], expr, "numpy")

    # printing -----------------------------------------------------------
    def __str__(self) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for mono, coeff in sorted(self._terms.items()):
            pieces.append(_term_str(mono, coeff))
        text = pieces[0]
        for piece in pieces[1:]:
            text += f" - {piece[1:]}" if piece.startswith("-") else f" + {piece}"
        return text

    def __repr__(self) -> str:
        return f"DiffPoly({str(self)!r})"


def _term_str(mono: Monomial, coeff: Coefficient) -> str:
    body = _mono_str(mono)
    if not body:
        return f"({coeff})" if coeff.is_Add else str(coeff)
    if coeff == 1:
        return body
    if coeff == -1:
        return f"-{body}"
    text = f"({coeff})" if coeff.is_Add else str(coeff)
    return f"{text}*{body}"


def _check_field_name(name: str) -> None:
    if name in PARAMETER_ALIASES:
        raise ParseError(f"{name!r} is a parameter name, not a field")
    if name.endswith("dot"):
        raise ParseError(f"field name {name!r} must not end in 'dot'")


def jet(field: str, t: int = 0, x: int = 0) -> DiffPoly:
    """Shorthand for ``DiffPoly.jet``."""
    return DiffPoly.jet(field, t, x)


def const(value: Scalar) -> DiffPoly:
    return DiffPoly.constant(value)


# ----------------------------------------------------------------------
# linear reduction engine
# ----------------------------------------------------------------------
class LinearReducer:
    """Sparse echelon form over exact coefficients.

    Vectors are dicts column → coefficient. A total ``priority`` on columns
    decides pivots: the highest-priority nonzero column of each stored row is
    its pivot, so reduction removes high-priority columns first and the
    remainder is unique for a given spanned space.
    """

    def __init__(self, priority: Callable[[Hashable], Tuple]):
        self._priority = priority
        self._rows: Dict[Hashable, Tuple[Dict[Hashable, Coefficient], Dict[Hashable, Coefficient]]] = {}

    @property
    def rank(self) -> int:
        return len(self._rows)

    def reduce(
        self, vector: Mapping[Hashable, Scalar], track: bool = False
    ) -> Tuple[Dict[Hashable, Coefficient], Dict[Hashable, Coefficient]]:
        """Remainder of ``vector`` and (if tracked) the tag combination removed."""
        vec: Dict[Hashable, Coefficient] = {}
        for col, value in vector.items():
            value = _canon(value)
            if not _is_zero(value):
                vec[col] = value
        combination: Dict[Hashable, Coefficient] = defaultdict(lambda: sp.Integer(0))
        while True:
            pivots = [col for col in vec if col in self._rows]
            if not pivots:
                break
            col = max(pivots, key=self._priority)
            factor = vec[col]
            row, provenance = self._rows[col]
            for other, value in row.items():
                updated = _canon(vec.get(other, 0) - factor * value)
                if _is_zero(updated):
                    vec.pop(other, None)
                else:
                    vec[other] = updated
            if track:
                for tag, value in provenance.items():
                    combination[tag] = combination[tag] + factor * value
        return vec, {k: _canon(v) for k, v in combination.items() if not _is_zero(_canon(v))}

    def add(self, vector: Mapping[Hashable, Scalar], tag: Optional[Hashable] = None) -> bool:
        """Insert a row; returns False when it is already in the span."""
        track = tag is not None
        remainder, combination = self.reduce(vector, track=track)
        if not remainder:
            return False
        pivot = max(remainder, key=self._priority)
        inverse = sp.Integer(1) / remainder[pivot]
        row = {col: _canon(value * inverse) for col, value in remainder.items()}
        provenance: Dict[Hashable, Coefficient] = {}
        if track:
            provenance = {t: _canon(-v * inverse) for t, v in combination.items()}
            provenance[tag] = _canon(provenance.get(tag, 0) + inverse)
        self._rows[pivot] = (row, provenance)
        return True


# ----------------------------------------------------------------------
# normal form modulo total x-derivatives
# ----------------------------------------------------------------------
Content = Tuple[Tuple[str, int], ...]


def _signature(mono: Monomial) -> Tuple[Content, int]:
    content: List[Tuple[str, int]] = []
    weight = 0
    for jet, exp in mono:
        content.extend([(jet.field, jet.t)] * exp)
        weight += jet.x * exp
    return tuple(sorted(content)), weight


def _elimination_priority(mono: Monomial) -> Tuple:
    """x-order profile per (field, t) slot, lexicographically last field first."""
    profile: Dict[Tuple[str, int], List[int]] = defaultdict(list)
    for jet, exp in mono:
        profile[(jet.field, jet.t)].extend([jet.x] * exp)
    return tuple(
        (slot, tuple(sorted(profile[slot], reverse=True)))
        for slot in sorted(profile, reverse=True)
    )


def _distributions(slots: Content, weight: int) -> Iterator[Monomial]:
    """Monomials with the given content and total x-weight."""

    def assign(index: int, remaining: int, cap: int) -> Iterator[List[int]]:
        if index == len(slots):
            if remaining == 0:
                yield []
            return
        same_as_previous = index > 0 and slots[index] == slots[index - 1]
        top = min(remaining, cap) if same_as_previous else remaining
        for order in range(top, -1, -1):
            for rest in assign(index + 1, remaining - order, order):
                yield [order] + rest

    for orders in assign(0, weight, weight):
        factors: Dict[JetVar, int] = defaultdict(int)
        for (field, t), x in zip(slots, orders):
            factors[JetVar(field, t, x)] += 1
        yield _mono_from(factors)


@functools.lru_cache(maxsize=4096)
def _x_image(content: Content, weight: int) -> LinearReducer:
    reducer = LinearReducer(_elimination_priority)
    for mono in _distributions(content, weight - 1):
        reducer.add(_derive_monomial(mono, "x"))
    return reducer


def normal_form(p: DiffPoly, modulo_total_x_derivatives: bool = True) -> DiffPoly:
    """Canonical representative of p modulo ∂_x(anything).

    Idempotent; two densities integrate to the same functional on the
    circle exactly when their normal forms coincide.
    """
    if not modulo_total_x_derivatives or p.is_zero:
        return p
    groups: Dict[Tuple[Content, int], Dict[Monomial, Coefficient]] = defaultdict(dict)
    for mono, coeff in p._terms.items():
        groups[_signature(mono)][mono] = coeff
    out: Dict[Monomial, Coefficient] = {}
    for (content, weight), vec in groups.items():
        if weight == 0:
            out.update(vec)
            continue
        remainder, _ = _x_image(content, weight).reduce(vec)
        out.update(remainder)
    return DiffPoly(out)


def equivalent_mod_x(p: DiffPoly, other: DiffPoly) -> bool:
    """True when p − other is a total x-derivative."""
    return normal_form(p - other).is_zero


def is_total_derivative(p: DiffPoly) -> bool:
    return normal_form(p).is_zero


# ----------------------------------------------------------------------
# variational calculus
# ----------------------------------------------------------------------
def euler_variation(
    density: DiffPoly, field: str, max_order: Optional[int] = None
) -> DiffPoly:
    """δ/δfield = Σ (−∂_t)^i (−∂_x)^j ∂density/∂field_{i,j}."""
    total = DiffPoly()
    for jet_var in sorted(j for j in density.jets() if j.field == field):
        term = density.partial(jet_var)
        if jet_var.t:
            term = term.total_derivative("t", jet_var.t, max_order)
        if jet_var.x:
            term = term.total_derivative("x", jet_var.x, max_order)
        total = total + (term if jet_var.order % 2 == 0 else -term)
    return total


def time_momentum(lagrangian: DiffPoly, field: str, max_order: Optional[int] = None) -> DiffPoly:
    """Σ_k (−∂_x)^k ∂L/∂(∂_t ∂_x^k field): momentum conjugate to ``field``."""
    total = DiffPoly()
    for jet_var in sorted(j for j in lagrangian.jets() if j.field == field and j.t == 1):
        term = lagrangian.partial(jet_var)
        if jet_var.x:
            term = term.total_derivative("x", jet_var.x, max_order)
        total = total + (term if jet_var.x % 2 == 0 else -term)
    return total


@dataclass(frozen=True)
class SmearedFunctional:
    """∫ density dx, where ``density`` is linear in the smearing symbol's jets."""

    density: DiffPoly
    smearing: Optional[str] = None

    def __post_init__(self) -> None:
        if self.smearing is None:
            return
        for mono in self.density.terms:
            degree = sum(n for j, n in mono if j.field == self.smearing)
            if degree != 1:
                raise ValueError(
                    f"density is not linear in the smearing symbol {self.smearing!r}"
                )

    @classmethod
    def smear(cls, constraint: DiffPoly, symbol: str) -> "SmearedFunctional":
        """φ[μ] = ∫ μ φ."""
        return cls(DiffPoly.jet(symbol) * constraint, symbol)

    def variation(self, field: str) -> DiffPoly:
        return euler_variation(self.density, field)


# ----------------------------------------------------------------------
# closed-form verification
# ----------------------------------------------------------------------
def residual_expression(
    p: DiffPoly,
    bindings: Mapping[str, Union[str, sp.Expr]],
    parameters: Optional[Mapping[str, float]] = None,
) -> sp.Expr:
    """p with every field replaced by a closed-form function of (t, x)."""
    local = {"t": T_SYMBOL, "x": X_SYMBOL}
    exprs = {
        name: sp.sympify(value, locals=local) if isinstance(value, str) else value
        for name, value in bindings.items()
    }
    missing = p.free_fields() - set(exprs)
    if missing:
        raise UncoveredFieldError(f"no closed-form binding for fields {sorted(missing)}")
    jet_values = {
        j: sp.diff(exprs[j.field], T_SYMBOL, j.t, X_SYMBOL, j.x) for j in p.jets()
    }
    return p.subs_parameters(parameters or {}).to_sympy(jet_values)


def substitute_solution(
    p: DiffPoly,
    bindings: Mapping[str, Union[str, sp.Expr]],
    window: Tuple[Sequence[float], Sequence[float]] = ((0.1, 1.0), (0.0, 2.0 * np.pi)),
    parameters: Optional[Mapping[str, float]] = None,
    n_points: int = 41,
) -> float:
    """Max |p| on a (t, x) grid after binding fields to closed forms.

    Args:
        p: Polynomial to evaluate
        bindings: field name → sympy expression (or string) in t and x
        window: ((t_min, t_max), (x_min, x_max))
        parameters: Numeric values of q, alpha, ...
        n_points: Grid points per axis

    Raises:
        SingularWindowError: the bound expression is not finite on the window
    """
    expr = residual_expression(p, bindings, parameters)
    leftover = expr.free_symbols - {T_SYMBOL, X_SYMBOL}
    if leftover:
        raise ParseError(f"unbound symbols in closed form: {sorted(map(str, leftover))}")
    if expr.has(sp.DiracDelta):
        raise SingularWindowError(
            "closed form is not smooth (its derivatives contain DiracDelta); bind a single branch"
        )
    func = sp.lambdify((T_SYMBOL, X_SYMBOL), expr, "numpy")
    (t0, t1), (x0, x1) = window
    tt, xx = np.meshgrid(np.linspace(t0, t1, n_points), np.linspace(x0, x1, n_points))
    with np.errstate(all="ignore"):
        values = np.broadcast_to(np.asarray(func(tt, xx), dtype=complex), tt.shape)
    if not np.all(np.isfinite(values)):
        raise SingularWindowError(f"closed form is singular on window {window}")
    residual = float(np.max(np.abs(values)))
    logger.debug("closed-form residual %.3e on %dx%d grid", residual, n_points, n_points)
    return residual


# ----------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------
_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<name>[^\W\d]\w*'*)|(?P<op>\*\*|[-+*/^()]))"
)
_JET = re.compile(r"([^\W\d]\w*?)(d*dot)?('*)")


def _tokenize(text: str) -> List[Tuple[str, str]]:
    tokens: List[Tuple[str, str]] = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if not match or match.end() == pos:
            raise ParseError(f"unexpected character {text[pos:pos + 1]!r} at {pos} in {text!r}")
        kind = match.lastgroup
        tokens.append((kind, match.group(kind)))
        pos = match.end()
    return tokens


def parse_jet(name: str) -> JetVar:
    match = _JET.fullmatch(name)
    if not match:
        raise ParseError(f"malformed jet variable {name!r}")
    field, dots, primes = match.groups()
    t = len(dots) - 2 if dots else 0
    _check_field_name(field)
    return JetVar(field, t, len(primes))


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> Optional[Tuple[str, str]]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> Tuple[str, str]:
        token = self.peek()
        if token is None:
            raise ParseError(f"unexpected end of expression {self.text!r}")
        self.pos += 1
        return token

    def expect(self, op: str) -> None:
        kind, value = self.take()
        if kind != "op" or value != op:
            raise ParseError(f"expected {op!r}, found {value!r} in {self.text!r}")

    def parse(self) -> DiffPoly:
        result = self.expr()
        if self.peek() is not None:
            raise ParseError(f"trailing input {self.peek()[1]!r} in {self.text!r}")
        return result

    def expr(self) -> DiffPoly:
        result = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            _, op = self.take()
            rhs = self.term()
            result = result + rhs if op == "+" else result - rhs
        return result

    def term(self) -> DiffPoly:
        result = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            _, op = self.take()
            rhs = self.unary()
            result = result * rhs if op == "*" else result / rhs
        return result

    def unary(self) -> DiffPoly:
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> DiffPoly:
        base = self.atom()
        if self.peek() in (("op", "^"), ("op", "**")):
            self.take()
            exponent = self.unary()
            if exponent.jets() or len(exponent) > 1:
                raise ParseError(f"exponent must be a non-negative integer in {self.text!r}")
            value = exponent.coefficient_of(_ONE)
            if not (value.is_Integer and value >= 0):
                raise ParseError(f"exponent must be a non-negative integer in {self.text!r}")
            return base ** int(value)
        return base

    def atom(self) -> DiffPoly:
        kind, value = self.take()
        if kind == "num":
            return DiffPoly.constant(sp.Rational(value))
        if kind == "name":
            if value in PARAMETER_ALIASES:
                return DiffPoly.parameter(value)
            jet_var = parse_jet(value)
            return DiffPoly({((jet_var, 1),): 1})
        if value == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise ParseError(f"unexpected {value!r} in {self.text!r}")


def parse(text: str) -> DiffPoly:
    """Parse the textual differential-polynomial syntax."""
    if not text or not text.strip():
        raise ParseError("empty expression")
    return _Parser(text).parse()
