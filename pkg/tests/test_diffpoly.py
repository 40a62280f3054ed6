"""Unit tests for differential polynomials, normal forms and the text parser."""

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from coadj_utils.diffpoly import (
    PARAMETERS,
    DiffPoly,
    JetVar,
    SmearedFunctional,
    equivalent_mod_x,
    euler_variation,
    is_total_derivative,
    jet,
    normal_form,
    parse,
    parse_jet,
    substitute_solution,
    time_momentum,
)
from coadj_utils.errors import (
    OrderBoundError,
    ParseError,
    SingularWindowError,
    UncoveredFieldError,
)

MONOMIALS = ["X", "X'", "X''", "D", "D'", "X*D", "X'*D", "X*D''", "X^2", "N*X'"]


class TestParser:
    """Tests for parsing and printing the text syntax."""

    def test_gauss_law(self):
        """Test parsing a sum with parameters and primes."""
        parsed = parse("X*D' + 2*X'*D + q*X'''")
        built = (
            jet("X") * jet("D", x=1)
            + 2 * jet("X", x=1) * jet("D")
            + jet("X", x=3) * PARAMETERS["q"]
        )
        assert parsed == built

    @pytest.mark.parametrize(
        "text,expected",
        [
            ("Ddot", JetVar("D", 1, 0)),
            ("Xddot'", JetVar("X", 2, 1)),
            ("N''", JetVar("N", 0, 2)),
            ("mu1", JetVar("mu1", 0, 0)),
        ],
    )
    def test_parse_jet(self, text, expected):
        """Test dot and prime counting."""
        assert parse_jet(text) == expected

    def test_jet_printing(self):
        """Test that jets print in the input syntax."""
        assert str(JetVar("X", 2, 1)) == "Xddot'"
        assert str(JetVar("D", 1, 0)) == "Ddot"

    def test_print_parse_round_trip(self):
        """Test that printed polynomials parse back to themselves."""
        p = parse("1/2*alpha*N^2 - q/4*X'^2 + (1 + beta)*X*Ddot")
        assert parse(str(p)) == p

    def test_aliases(self):
        """Test that a and b stand for alpha and beta."""
        assert parse("a*X + b") == parse("alpha*X + beta")

    @pytest.mark.parametrize(
        "text",
        ["", "   ", "X +", "X $ D", "X^-1", "X^D", "(X + D", "q'", "X D"],
    )
    def test_malformed(self, text):
        """Test that malformed input raises ParseError."""
        with pytest.raises(ParseError):
            parse(text)

    def test_parameter_is_not_a_field(self):
        """Test that parameter names cannot be used as fields."""
        with pytest.raises(ParseError):
            jet("q")
        with pytest.raises(ParseError):
            jet("Xdot")

    def test_division_by_jet(self):
        """Test that division by a field is rejected."""
        with pytest.raises(ParseError):
            parse("X/D")


class TestCalculus:
    """Tests for derivatives, variations and structural maps."""

    def test_leibniz(self):
        """Test ∂_x(XD) = X′D + XD′."""
        assert parse("X*D").dx() == parse("X'*D + X*D'")

    def test_time_derivative(self):
        """Test ∂_t on mixed jets."""
        assert parse("X'^2").dt() == parse("2*X'*Xdot'")

    def test_order_bound(self):
        """Test that derivatives beyond the jet bound raise."""
        with pytest.raises(OrderBoundError):
            jet("X", x=8).dx()

    def test_partial(self):
        """Test partial derivative with respect to one jet."""
        assert parse("X'^2*D").partial(JetVar("X", 0, 1)) == parse("2*X'*D")

    def test_euler_variation(self):
        """Test δ/δX of X′²/2 is −X″."""
        assert euler_variation(parse("1/2*X'^2"), "X") == parse("-X''")

    def test_time_momentum(self):
        """Test the momentum of Ẋ²/2 − X′Ẋ′."""
        assert time_momentum(parse("1/2*Xdot^2 - X'*Xdot'"), "X") == parse("Xdot + X''")

    def test_substitute(self):
        """Test that substitution differentiates the image."""
        assert parse("X'").substitute({"X": parse("D^2")}) == parse("2*D*D'")

    def test_restrict(self):
        """Test gauge slices."""
        p = parse("A*B + Bdot + C' + B'")
        assert p.restrict(zero=["A"], t_independent=["B"], x_independent=["C"]) == parse("B'")

    def test_rename(self):
        """Test renaming fields merges coinciding monomials."""
        assert parse("X*Y + Y*Y").rename({"X": "Y"}) == parse("2*Y^2")

    def test_subs_parameters(self):
        """Test parameter substitution by name."""
        assert parse("c*X + q").subs_parameters({"c": 1, "q": 0}) == parse("X")

    def test_lambdify(self):
        """Test numeric evaluation of a polynomial."""
        jets, func = parse("q*X'*D").lambdify({"q": 2.0})
        assert [str(j) for j in jets] == ["D", "X'"]
        assert func(3.0, 0.5) == pytest.approx(3.0)

    def test_lambdify_unbound(self):
        """Test that missing parameter values raise ParseError."""
        with pytest.raises(ParseError, match="unbound parameters"):
            parse("q*X").lambdify()

    def test_inspection(self):
        """Test fields, parameters and orders."""
        p = parse("alpha*X''*Ddot + N")
        assert p.free_fields() == {"X", "D", "N"}
        assert p.parameters() == {PARAMETERS["alpha"]}
        assert p.max_order("x") == 2
        assert p.max_order("t") == 1
        assert p.coefficient_of(parse("N")) == 1
        assert p.depends_on(["N"])
        assert not p.depends_on(["pi"])


class TestNormalForm:
    """Tests for equality modulo total x-derivatives."""

    def test_total_derivative(self):
        """Test that X X′ integrates to zero."""
        assert is_total_derivative(parse("X*X'"))
        assert not is_total_derivative(parse("X*D'"))

    def test_integration_by_parts(self):
        """Test XD′ ≡ −X′D."""
        assert equivalent_mod_x(parse("X*D'"), parse("-X'*D"))

    def test_derivatives_leave_smearing(self):
        """Test that derivatives are moved off the smearing function."""
        assert normal_form(parse("mu'*X")) == parse("-mu*X'")

    def test_idempotent(self):
        """Test that the normal form is a fixed point."""
        p = parse("X'''*D*N + X*D''*N' + q*X'^2")
        once = normal_form(p)
        assert normal_form(once) == once
        assert equivalent_mod_x(p, once)

    def test_constant_part_untouched(self):
        """Test that x-weight zero terms are kept."""
        p = parse("X*D + 3")
        assert normal_form(p) == p

    @settings(max_examples=30, deadline=None)
    @given(
        coefficients=st.lists(st.integers(min_value=-5, max_value=5), min_size=len(MONOMIALS),
                              max_size=len(MONOMIALS))
    )
    def test_derivative_is_trivial(self, coefficients):
        """Test that ∂_x of any polynomial reduces to zero."""
        p = DiffPoly()
        for coefficient, text in zip(coefficients, MONOMIALS):
            p = p + coefficient * parse(text)
        assert is_total_derivative(p.dx())


class TestSmearing:
    """Tests for smeared functionals and closed-form substitution."""

    def test_variation(self):
        """Test δ/δX ∫ μ X′ = −μ′."""
        functional = SmearedFunctional.smear(parse("X'"), "mu")
        assert functional.variation("X") == parse("-mu'")

    def test_nonlinear_smearing_rejected(self):
        """Test that densities must be linear in the smearing symbol."""
        with pytest.raises(ValueError, match="not linear"):
            SmearedFunctional(parse("mu^2*X"), "mu")

    def test_substitute_solution(self):
        """Test a travelling wave solves Ẋ = X′."""
        residual = substitute_solution(parse("Xdot - X'"), {"X": "sin(x + t)"})
        assert residual < 1e-12

    def test_substitute_with_parameters(self):
        """Test numeric parameter binding."""
        residual = substitute_solution(
            parse("Xdot - q*X'"), {"X": "exp(2*(x + 2*t))"}, parameters={"q": 2.0}
        )
        assert residual < 1e-6

    def test_missing_binding(self):
        """Test that every field needs a closed form."""
        with pytest.raises(UncoveredFieldError):
            substitute_solution(parse("X*D"), {"X": "x"})

    def test_unbound_parameter(self):
        """Test that free parameters raise ParseError."""
        with pytest.raises(ParseError):
            substitute_solution(parse("q*X"), {"X": "x"})

    def test_singular_window(self):
        """Test that a pole inside the window raises SingularWindowError."""
        with pytest.raises(SingularWindowError):
            substitute_solution(parse("X"), {"X": "1/t"}, window=((0.0, 1.0), (0.0, 1.0)))

    def test_kinked_binding(self):
        """Test that a binding whose derivatives contain DiracDelta is rejected cleanly."""
        with pytest.raises(SingularWindowError, match="not smooth"):
            substitute_solution(parse("X''"), {"X": "Abs(x - 1)"}, window=((0.0, 1.0), (0.0, 2.0)))

    def test_sympy_conversion(self):
        """Test conversion to a sympy expression."""
        expr = parse("2*X*D'").to_sympy()
        assert expr == 2 * sp.Symbol("X") * sp.Symbol("D'")
        assert np.isclose(float(expr.subs({sp.Symbol("X"): 1, sp.Symbol("D'"): 2})), 4.0)
