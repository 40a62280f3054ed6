"""Unit tests for the Dirac constraint analyzer."""

import pytest

from coadj_utils.config import ToolkitConfig
from coadj_utils.diffpoly import DiffPoly, SmearedFunctional, jet, parse
from coadj_utils.dirac import (
    CASES,
    CanonicalPairSet,
    consistency_chain,
    custom_case,
    dxn_bracket_table,
    frozen_theory_brackets,
    gauge_variation,
    hamilton_equations,
    kinetic_term_checks,
    local_bracket,
    maxwell_gauge_generator,
    normalize_constraint,
    poisson_bracket,
    weak_reduce,
)
from coadj_utils.errors import ChainNonTerminationError, ParseError, UncoveredFieldError

PAIRS = CanonicalPairSet.of(("D", "X"))


class TestBrackets:
    """Tests for canonical pairs and Poisson brackets."""

    def test_duplicate_names(self):
        """Test that a field may appear in one pair only."""
        with pytest.raises(ValueError, match="distinct"):
            CanonicalPairSet.of(("D", "X"), ("X", "pi"))

    def test_pair_accessors(self):
        """Test coordinates, momenta and fields."""
        pairs = CanonicalPairSet.of(("D", "X"), ("N", "pi"))
        assert pairs.coordinates == ("D", "N")
        assert pairs.momenta == ("X", "pi")
        assert pairs.fields == frozenset({"D", "X", "N", "pi"})

    def test_canonical_bracket(self):
        """Test {D[μ], X[λ]} = μλ."""
        bracket = poisson_bracket(
            SmearedFunctional.smear(jet("D"), "mu"), SmearedFunctional.smear(jet("X"), "lambda"), PAIRS
        )
        assert bracket == parse("mu*lambda")

    def test_antisymmetry(self):
        """Test {F, G} = −{G, F} modulo total derivatives."""
        f = SmearedFunctional.smear(parse("X*D'"), "mu")
        g = SmearedFunctional.smear(parse("1/2*X^2"), "lambda")
        assert (poisson_bracket(f, g, PAIRS) + poisson_bracket(g, f, PAIRS)).is_zero

    def test_local_bracket(self):
        """Test the local density {D(x), X[μ]} = μ."""
        assert local_bracket(jet("D"), SmearedFunctional.smear(jet("X"), "mu"), PAIRS) == jet("mu")

    def test_uncovered_field(self):
        """Test that fields outside the pairs raise UncoveredFieldError."""
        with pytest.raises(UncoveredFieldError):
            poisson_bracket(parse("Z*X"), parse("X"), PAIRS)

    def test_extra_symbols(self):
        """Test that listed extra symbols are accepted."""
        bracket = poisson_bracket(parse("lambda*D"), parse("1/2*X^2"), PAIRS, extra_symbols=["lambda"])
        assert bracket == parse("lambda*X")

    def test_gauge_variation(self):
        """Test δD and δX generated by ∫ ξX²/2."""
        generator = SmearedFunctional.smear(parse("1/2*X^2"), "xi")
        assert gauge_variation("D", generator, PAIRS) == parse("xi*X")
        assert gauge_variation("X", generator, PAIRS).is_zero

    def test_gauge_variation_unknown_field(self):
        """Test that a field outside the pairs raises."""
        with pytest.raises(UncoveredFieldError):
            gauge_variation("N", parse("X"), PAIRS)

    def test_hamilton_equations(self):
        """Test Ḋ = X and Ẋ = 0 for H = X²/2."""
        equations = hamilton_equations(parse("1/2*X^2"), PAIRS)
        assert equations["D"] == jet("X")
        assert equations["X"].is_zero


class TestWeakReduction:
    """Tests for reduction modulo constraints."""

    def test_derivative_of_constraint(self):
        """Test that D X″ vanishes weakly when X′ is a constraint."""
        reduction = weak_reduce(parse("D*X''"), [parse("X'")])
        assert reduction.vanishes
        assert reduction.decomposition

    def test_remainder(self):
        """Test that an independent term survives."""
        reduction = weak_reduce(parse("D + X'"), [parse("X'")])
        assert reduction.remainder == jet("D")

    def test_zero(self):
        """Test that zero reduces trivially."""
        assert weak_reduce(DiffPoly(), [parse("X")]).vanishes

    @pytest.mark.parametrize(
        "text,normalized,factor",
        [
            ("-2*X*X' + 4*X''", "-X*X' + 2*X''", 2),
            ("-3*X''", "X''", -3),
            ("1/2*X^2", "X^2", "1/2"),
        ],
    )
    def test_normalize_constraint(self, text, normalized, factor):
        """Test removal of the rational content with a positive leading term."""
        result, scale = normalize_constraint(parse(text))
        assert result == parse(normalized)
        assert str(scale) == str(factor)


class TestConsistencyChain:
    """Tests for the constraint algorithm on the case library."""

    @pytest.fixture(scope="class")
    def dxn_report(self):
        return CASES["dxn"]().run()

    def test_dxn_constraints(self, dxn_report):
        """Test the four constraints and one multiplier condition."""
        assert [c.name for c in dxn_report.constraints] == ["phi1", "phi2", "phi3", "phi4"]
        assert len(dxn_report.multiplier_conditions) == 1
        assert dxn_report.terminated
        assert not dxn_report.inconsistent

    def test_dxn_provenance(self, dxn_report):
        """Test that the secondaries descend from the primary."""
        assert dxn_report.constraint("phi1").provenance == "primary"
        assert dxn_report.constraint("phi2").parent == 0
        assert dxn_report.constraint("phi3").step == 2
        with pytest.raises(KeyError):
            dxn_report.constraint("phi9")

    def test_dxn_classes(self, dxn_report):
        """Test the first/second class split."""
        assert dxn_report.classes == {
            "phi1": "first", "phi2": "second", "phi3": "second", "phi4": "first",
        }
        assert dxn_report.gauge_generators == ["phi1", "phi4"]

    def test_dxn_serialization(self, dxn_report):
        """Test the dictionary and table forms of the report."""
        record = dxn_report.to_dict()
        assert record["gauge_generators"] == ["phi1", "phi4"]
        assert len(record["steps"]) == 4
        rows = dxn_report.summary_rows()
        assert [row["name"] for row in rows] == ["phi1", "phi2", "phi3", "phi4"]
        assert set(rows[0]) == {"name", "provenance", "density", "class", "strict_class"}

    def test_maxwell(self):
        """Test that both Maxwell constraints are first class."""
        report = CASES["maxwell"]().run()
        assert len(report.constraints) == 2
        assert set(report.classes.values()) == {"first"}

    def test_iteration_cap(self):
        """Test that the chain stops at ``chain_iterations``."""
        with pytest.raises(ChainNonTerminationError):
            CASES["dxn"]().run(ToolkitConfig(chain_iterations=1))

    def test_multiplier_count(self):
        """Test that each primary needs a multiplier."""
        with pytest.raises(ValueError, match="multiplier"):
            consistency_chain(DiffPoly(), [jet("X")], [], PAIRS)

    def test_inconsistent_theory(self):
        """Test that a constant remainder marks the theory inconsistent."""
        report = consistency_chain(parse("N"), [jet("pi")], ["lambda"], CanonicalPairSet.of(("N", "pi")))
        assert report.inconsistent
        assert report.steps[0].outcome == "inconsistent"

    def test_custom_case(self):
        """Test a case built from a JSON-style record."""
        case = custom_case(
            {
                "name": "maxwell-copy",
                "hamiltonian": "1/2*B1^2 - A0*B1'",
                "primaries": ["B0"],
                "multipliers": ["lambda"],
                "pairs": [["A0", "B0"], ["A1", "B1"]],
            }
        )
        assert case.name == "maxwell-copy"
        assert case.run().classes == {"phi1": "first", "phi2": "first"}

    def test_custom_case_missing_key(self):
        """Test that incomplete records raise ParseError."""
        with pytest.raises(ParseError, match="missing"):
            custom_case({"hamiltonian": "X"})


class TestCaseStudies:
    """Tests for the bracket identities of the worked theories."""

    def test_frozen_brackets(self):
        """Test brackets and variations of the frozen theory."""
        checks = frozen_theory_brackets()
        assert all(check.holds for check in checks), [c.to_dict() for c in checks if not c.holds]

    def test_frozen_relations(self):
        """Test the recorded sign conventions."""
        relations = {check.name: check.relation for check in frozen_theory_brackets()}
        assert relations["delta1 D"] == "equal"
        assert relations["{phi1[mu], phi1[lambda]}"] == "equal"

    def test_kinetic_term(self):
        """Test the identities of the alternative kinetic term."""
        checks = kinetic_term_checks()
        assert all(check.holds for check in checks), [c.to_dict() for c in checks if not c.holds]

    def test_maxwell_gauge_generator(self):
        """Test δA_μ = ∂_μ ε."""
        checks = maxwell_gauge_generator()
        assert set(checks) == {"A0", "A1"}
        assert all(check.holds for check in checks.values())

    def test_dxn_bracket_table(self):
        """Test that φ₃ and φ₂ do not commute weakly."""
        table = dxn_bracket_table()
        assert set(table) == {"{phi3, phi2[mu]}", "{phi2, phi3[mu]}"}
        assert not table["{phi3, phi2[mu]}"].vanishes
