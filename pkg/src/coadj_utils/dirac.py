"""
Dirac constraint analysis over differential polynomials.

Poisson brackets use smeared functionals: F[μ] = ∫ μ f. With canonical
pairs (q, p) and {q(x), p(y)} = δ(x − y),

    {F, G} = ∫ Σ (δF/δq · δG/δp − δF/δp · δG/δq)

returned as a density in normal form. The local density of {φ(x), G} is
obtained by smearing φ with a fresh symbol s and taking δ/δs, which is
exact.

Weak equality is decided by ``weak_reduce``: an ansatz of multiplier
monomials times x-derivatives of the constraints is generated by dividing
the monomials of the target, and the remainder of an exact echelon
reduction is returned.
"""

from __future__ import annotations

import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import sympy as sp

from .config import ToolkitConfig, default_config
from .diffpoly import (
    DiffPoly,
    JetVar,
    LinearReducer,
    Monomial,
    SmearedFunctional,
    _mono_div,
    euler_variation,
    jet,
    normal_form,
    parse,
    substitute_solution,
)
from .errors import ChainNonTerminationError, OrderBoundError, ParseError, UncoveredFieldError

logger = logging.getLogger(__name__)

SMEARING = "smear"

Functional = Union[SmearedFunctional, DiffPoly]


# ----------------------------------------------------------------------
# phase space
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class CanonicalPairSet:
    """(coordinate, momentum) field names."""

    pairs: Tuple[Tuple[str, str], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "pairs", tuple(tuple(p) for p in self.pairs))
        names = [name for pair in self.pairs for name in pair]
        if len(set(names)) != len(names):
            raise ValueError(f"canonical pair names must be distinct: {names}")

    @classmethod
    def of(cls, *pairs: Tuple[str, str]) -> "CanonicalPairSet":
        return cls(tuple(pairs))

    @property
    def coordinates(self) -> Tuple[str, ...]:
        return tuple(p[0] for p in self.pairs)

    @property
    def momenta(self) -> Tuple[str, ...]:
        return tuple(p[1] for p in self.pairs)

    @property
    def fields(self) -> frozenset:
        return frozenset(self.coordinates + self.momenta)

    def check_covers(self, density: DiffPoly, extra: Iterable[str] = ()) -> None:
        """Raise UncoveredFieldError for fields outside the pairs and ``extra``."""
        uncovered = density.free_fields() - self.fields - set(extra)
        if uncovered:
            raise UncoveredFieldError(
                f"fields {sorted(uncovered)} belong to no canonical pair "
                f"and are not smearing or multiplier symbols"
            )


def _density(f: Functional) -> Tuple[DiffPoly, Tuple[str, ...]]:
    if isinstance(f, SmearedFunctional):
        return f.density, ((f.smearing,) if f.smearing else ())
    return f, ()


def _bracket_integrand(
    f: DiffPoly, g: DiffPoly, pairs: CanonicalPairSet
) -> DiffPoly:
    total = DiffPoly()
    for coord, mom in pairs.pairs:
        total = total + euler_variation(f, coord) * euler_variation(g, mom)
        total = total - euler_variation(f, mom) * euler_variation(g, coord)
    return total


def poisson_bracket(
    f: Functional,
    g: Functional,
    pairs: CanonicalPairSet,
    extra_symbols: Iterable[str] = (),
) -> DiffPoly:
    """{F, G} as a density in normal form modulo total x-derivatives.

    Raises:
        UncoveredFieldError: a density involves a field outside ``pairs``
            that is not a smearing symbol or listed in ``extra_symbols``
    """
    f_density, f_smear = _density(f)
    g_density, g_smear = _density(g)
    allowed = set(extra_symbols) | set(f_smear) | set(g_smear)
    pairs.check_covers(f_density, allowed)
    pairs.check_covers(g_density, allowed)
    return normal_form(_bracket_integrand(f_density, g_density, pairs))


def local_bracket(
    phi: DiffPoly,
    g: Functional,
    pairs: CanonicalPairSet,
    extra_symbols: Iterable[str] = (),
) -> DiffPoly:
    """Local density of {φ(x), G}."""
    g_density, g_smear = _density(g)
    symbol = SMEARING
    while symbol in phi.free_fields() | g_density.free_fields():
        symbol += "_"
    allowed = set(extra_symbols) | set(g_smear) | {symbol}
    pairs.check_covers(phi, allowed)
    pairs.check_covers(g_density, allowed)
    integrand = _bracket_integrand(jet(symbol) * phi, g_density, pairs)
    return euler_variation(integrand, symbol)


def gauge_variation(
    field_name: str, generator: Functional, pairs: CanonicalPairSet
) -> DiffPoly:
    """δF = {F, G} for a basic field F."""
    density, _ = _density(generator)
    for coord, mom in pairs.pairs:
        if field_name == coord:
            return euler_variation(density, mom)
        if field_name == mom:
            return -euler_variation(density, coord)
    raise UncoveredFieldError(f"{field_name!r} belongs to no canonical pair")


def hamilton_equations(hamiltonian: DiffPoly, pairs: CanonicalPairSet) -> Dict[str, DiffPoly]:
    """q̇ = δH/δp and ṗ = −δH/δq for every canonical pair."""
    out = {}
    for coord, mom in pairs.pairs:
        out[coord] = euler_variation(hamiltonian, mom)
        out[mom] = -euler_variation(hamiltonian, coord)
    return out


# ----------------------------------------------------------------------
# weak reduction
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class WeakReduction:
    """p = Σ c_{i,k} ∂_x^k φ_i + remainder."""

    remainder: DiffPoly
    decomposition: Dict[Tuple[int, int], DiffPoly]
    capped: bool = False

    @property
    def vanishes(self) -> bool:
        return self.remainder.is_zero


def _weak_priority(mono: Monomial) -> Tuple:
    orders = [j.t + j.x for j, _ in mono]
    return (max(orders, default=0), sum(orders), sum(n for _, n in mono), mono)


def _jet_cap_ok(mono: Monomial, cap: int) -> bool:
    return all(j.t + j.x <= cap for j, _ in mono)


def weak_reduce(
    p: DiffPoly,
    constraints: Sequence[DiffPoly],
    config: Optional[ToolkitConfig] = None,
) -> WeakReduction:
    """Reduce p modulo the constraints and their x-derivatives.

    The multiplier ansatz is built by dividing monomials of p (and of
    already generated candidates, for ``weak_rounds`` rounds) by monomials of
    the generators ∂_x^k φ_i, k ≤ ``weak_derivative_order``; multipliers with
    a jet above ``weak_coefficient_order`` are skipped and flagged.
    """
    cfg = config or default_config()
    if p.is_zero:
        return WeakReduction(p, {})
    generators: Dict[Tuple[int, int], DiffPoly] = {}
    for i, phi in enumerate(constraints):
        current = phi
        for k in range(cfg.weak_derivative_order + 1):
            if current.is_zero:
                break
            generators[(i, k)] = current
            try:
                current = current.total_derivative("x")
            except OrderBoundError:
                break

    seen: set = set()
    candidates: List[Tuple[Tuple[int, int, Monomial], DiffPoly]] = []
    frontier = set(p.terms)
    known = set(frontier)
    capped = False
    for _ in range(cfg.weak_rounds):
        fresh: set = set()
        for target in sorted(frontier):
            for key, gen in generators.items():
                for gen_mono in gen.terms:
                    multiplier = _mono_div(target, gen_mono)
                    if multiplier is None:
                        continue
                    tag = key + (multiplier,)
                    if tag in seen:
                        continue
                    seen.add(tag)
                    if not _jet_cap_ok(multiplier, cfg.weak_coefficient_order):
                        capped = True
                        continue
                    product = DiffPoly({multiplier: 1}) * gen
                    candidates.append((tag, product))
                    fresh |= set(product.terms) - known
        known |= fresh
        frontier = fresh
        if not frontier:
            break

    reducer = LinearReducer(_weak_priority)
    for tag, product in candidates:
        reducer.add(product.terms, tag=tag)
    remainder, combination = reducer.reduce(p.terms, track=True)

    decomposition: Dict[Tuple[int, int], DiffPoly] = defaultdict(DiffPoly)
    for (i, k, multiplier), coeff in combination.items():
        decomposition[(i, k)] = decomposition[(i, k)] + DiffPoly({multiplier: coeff})
    if capped:
        logger.debug("weak reduction skipped multipliers above jet order %d", cfg.weak_coefficient_order)
    logger.debug(
        "weak_reduce: %d candidates, rank %d, %d remainder terms",
        len(candidates), reducer.rank, len(remainder),
    )
    return WeakReduction(
        DiffPoly(remainder),
        {k: v for k, v in decomposition.items() if not v.is_zero},
        capped,
    )


def normalize_constraint(p: DiffPoly) -> Tuple[DiffPoly, sp.Rational]:
    """Divide out the rational content; the leading coefficient becomes positive.

    Returns:
        (normalized, factor) with p = factor · normalized
    """
    if p.is_zero:
        return p, sp.Integer(1)
    items = list(p.items())
    numerics = [sp.Rational(cf.as_coeff_Mul()[0]) for _, cf in items]
    numerator = 0
    denominator = 1
    for value in numerics:
        numerator = math.gcd(numerator, abs(int(value.p)))
        denominator = denominator * int(value.q) // math.gcd(denominator, int(value.q))
    factor = sp.Rational(numerator, denominator)
    if p.coefficient_of(p.leading_monomial()).as_coeff_Mul()[0] < 0:
        factor = -factor
    return p / factor, factor


# ----------------------------------------------------------------------
# consistency chain
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class ConstraintEntry:
    name: str
    density: DiffPoly
    provenance: str
    step: int
    parent: Optional[int] = None
    raw: Optional[DiffPoly] = None
    factor: sp.Rational = sp.Integer(1)
    multiplier: Optional[str] = None

    def to_dict(self) -> Dict:
        return {
            "name": self.name,
            "density": str(self.density),
            "provenance": self.provenance,
            "step": self.step,
            "parent": self.parent,
            "raw": str(self.raw if self.raw is not None else self.density),
            "factor": str(self.factor),
            "multiplier": self.multiplier,
        }


@dataclass(frozen=True)
class ChainStep:
    """Outcome of bracketing one constraint with H_T."""

    constraint: int
    bracket: DiffPoly
    remainder: DiffPoly
    outcome: str

    def to_dict(self) -> Dict:
        return {
            "constraint": self.constraint,
            "bracket": str(self.bracket),
            "remainder": str(self.remainder),
            "outcome": self.outcome,
        }


@dataclass(frozen=True)
class BracketEntry:
    """{φ_i(x), φ_j[s]} and its weak remainder."""

    first: int
    second: int
    smearing: str
    bracket: DiffPoly
    weak: DiffPoly

    def to_dict(self) -> Dict:
        return {
            "first": self.first,
            "second": self.second,
            "smearing": self.smearing,
            "bracket": str(self.bracket),
            "weak": str(self.weak),
        }


@dataclass
class ConstraintChainReport:
    constraints: List[ConstraintEntry] = field(default_factory=list)
    steps: List[ChainStep] = field(default_factory=list)
    multiplier_conditions: List[DiffPoly] = field(default_factory=list)
    bracket_table: List[BracketEntry] = field(default_factory=list)
    strict_bracket_table: List[BracketEntry] = field(default_factory=list)
    classes: Dict[str, str] = field(default_factory=dict)
    strict_classes: Dict[str, str] = field(default_factory=dict)
    terminated: bool = False
    inconsistent: bool = False

    def constraint(self, name: str) -> ConstraintEntry:
        for entry in self.constraints:
            if entry.name == name:
                return entry
        raise KeyError(name)

    @property
    def gauge_generators(self) -> List[str]:
        return [name for name, label in self.classes.items() if label == "first"]

    def to_dict(self) -> Dict:
        return {
            "constraints": [c.to_dict() for c in self.constraints],
            "steps": [s.to_dict() for s in self.steps],
            "multiplier_conditions": [str(m) for m in self.multiplier_conditions],
            "bracket_table": [b.to_dict() for b in self.bracket_table],
            "strict_bracket_table": [b.to_dict() for b in self.strict_bracket_table],
            "classes": dict(self.classes),
            "strict_classes": dict(self.strict_classes),
            "gauge_generators": self.gauge_generators,
            "terminated": self.terminated,
            "inconsistent": self.inconsistent,
        }

    def summary_rows(self) -> List[Dict[str, str]]:
        return [
            {
                "name": c.name,
                "provenance": c.provenance,
                "density": str(c.density),
                "class": self.classes.get(c.name, "?"),
                "strict_class": self.strict_classes.get(c.name, "?"),
            }
            for c in self.constraints
        ]


def consistency_chain(
    hamiltonian: DiffPoly,
    primaries: Sequence[DiffPoly],
    multipliers: Sequence[str],
    pairs: CanonicalPairSet,
    config: Optional[ToolkitConfig] = None,
) -> ConstraintChainReport:
    """Run the Dirac consistency algorithm to termination and classify.

    Each constraint is bracketed with H_T = H + Σ λ_i φ_i and weakly reduced.
    A zero remainder is consistent; a remainder free of multipliers becomes a
    secondary constraint (stored normalized, with the raw remainder and the
    factor); a multiplier-dependent remainder is a multiplier condition; a
    nonzero constant marks the theory inconsistent.

    Raises:
        ChainNonTerminationError: more than ``chain_iterations`` brackets
    """
    cfg = config or default_config()
    if len(primaries) != len(multipliers):
        raise ValueError("every primary constraint needs exactly one multiplier")
    extras = set(multipliers)
    total_h = hamiltonian
    for lam, phi in zip(multipliers, primaries):
        total_h = total_h + jet(lam) * phi
    pairs.check_covers(total_h, extras)

    report = ConstraintChainReport()
    for i, (phi, lam) in enumerate(zip(primaries, multipliers)):
        report.constraints.append(
            ConstraintEntry(f"phi{i + 1}", phi, "primary", 0, multiplier=lam)
        )

    index = 0
    processed = 0
    while index < len(report.constraints):
        if processed >= cfg.chain_iterations:
            raise ChainNonTerminationError(
                f"consistency chain did not terminate within {cfg.chain_iterations} brackets"
            )
        entry = report.constraints[index]
        bracket = local_bracket(entry.density, total_h, pairs, extras)
        reduction = weak_reduce(bracket, [c.density for c in report.constraints], cfg)
        remainder = reduction.remainder
        if remainder.is_zero:
            outcome = "consistent"
        elif remainder.depends_on(extras):
            outcome = "multiplier-condition"
            normalized, _ = normalize_constraint(remainder)
            report.multiplier_conditions.append(normalized)
        elif not remainder.jets():
            outcome = "inconsistent"
            report.inconsistent = True
        else:
            outcome = "secondary"
            normalized, factor = normalize_constraint(remainder)
            report.constraints.append(
                ConstraintEntry(
                    f"phi{len(report.constraints) + 1}",
                    normalized,
                    "secondary",
                    entry.step + 1,
                    parent=index,
                    raw=remainder,
                    factor=factor,
                )
            )
        logger.debug("chain step %d (%s): %s -> %s", processed, entry.name, outcome, remainder)
        report.steps.append(ChainStep(index, bracket, remainder, outcome))
        index += 1
        processed += 1
    report.terminated = True

    report.bracket_table, report.classes = classify(
        report.constraints, report.multiplier_conditions, pairs, extras, True, cfg
    )
    report.strict_bracket_table, report.strict_classes = classify(
        report.constraints, report.multiplier_conditions, pairs, extras, False, cfg
    )
    logger.info(
        "constraint chain: %d constraints, %d multiplier conditions, classes %s",
        len(report.constraints), len(report.multiplier_conditions), report.classes,
    )
    return report


def classify(
    constraints: Sequence[ConstraintEntry],
    multiplier_conditions: Sequence[DiffPoly],
    pairs: CanonicalPairSet,
    extras: Iterable[str],
    multiplier_convention: bool,
    config: Optional[ToolkitConfig] = None,
) -> Tuple[List[BracketEntry], Dict[str, str]]:
    """Pairwise weak brackets and first/second class labels.

    With ``multiplier_convention`` the partner of a primary constraint is
    smeared with that primary's multiplier and the multiplier conditions
    join the constraints as weak relations; otherwise every bracket uses a
    generic smearing function and only constraints count.
    """
    cfg = config or default_config()
    extras = set(extras)
    densities = [c.density for c in constraints]
    relations = densities + (list(multiplier_conditions) if multiplier_convention else [])
    table: List[BracketEntry] = []
    for i in range(len(constraints)):
        for j in range(i, len(constraints)):
            first, second = i, j
            smearing = SMEARING
            if multiplier_convention:
                if constraints[i].multiplier:
                    smearing = constraints[i].multiplier
                elif constraints[j].multiplier:
                    first, second = j, i
                    smearing = constraints[j].multiplier
            functional = SmearedFunctional.smear(constraints[second].density, smearing)
            bracket = local_bracket(constraints[first].density, functional, pairs, extras)
            weak = weak_reduce(bracket, relations, cfg).remainder
            table.append(BracketEntry(first, second, smearing, bracket, weak))

    classes = {}
    for i, entry in enumerate(constraints):
        involved = [b for b in table if i in (b.first, b.second)]
        classes[entry.name] = "first" if all(b.weak.is_zero for b in involved) else "second"
    return table, classes


# ----------------------------------------------------------------------
# case library
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class ConstraintCase:
    name: str
    hamiltonian: DiffPoly
    primaries: Tuple[DiffPoly, ...]
    multipliers: Tuple[str, ...]
    pairs: CanonicalPairSet
    description: str = ""

    def run(self, config: Optional[ToolkitConfig] = None) -> ConstraintChainReport:
        return consistency_chain(
            self.hamiltonian, self.primaries, self.multipliers, self.pairs, config
        )


def diff_gauss_law() -> DiffPoly:
    """φ₂ = XD′ + 2X′D + qX‴."""
    return parse("X*D' + 2*X'*D + q*X'''")


def coadjoint_action_density(vector: str, coadjoint: str = "D") -> DiffPoly:
    """𝒢[ξ; D] = ξD′ + 2ξ′D + qξ‴."""
    return parse(f"{vector}*{coadjoint}' + 2*{vector}'*{coadjoint} + q*{vector}'''")


def alternative_kinetic_term() -> DiffPoly:
    """T = ½DX² − (q/4)X′² + (q/2)XX″."""
    return parse("1/2*D*X^2 - q/4*X'^2 + q/2*X*X''")


def dxn_case() -> ConstraintCase:
    """H_T = X²/2 + X𝒢[N; D] + λπ with primary π."""
    hamiltonian = parse("1/2*X^2") + jet("X") * coadjoint_action_density("N")
    return ConstraintCase(
        "dxn",
        hamiltonian,
        (jet("pi"),),
        ("lambda",),
        CanonicalPairSet.of(("D", "X"), ("N", "pi")),
        "diff field D with momentum X and lapse N",
    )


def frozen_case() -> ConstraintCase:
    """H_T = μ₁ X²/2 + μ₂ φ₂."""
    return ConstraintCase(
        "frozen",
        DiffPoly(),
        (parse("1/2*X^2"), diff_gauss_law()),
        ("mu1", "mu2"),
        CanonicalPairSet.of(("D", "X")),
        "kinetic term and diff-Gauss law imposed as constraints",
    )


def alternative_case() -> ConstraintCase:
    """Single constraint T = ½DX² − (q/4)X′² + (q/2)XX″."""
    return ConstraintCase(
        "alternative",
        DiffPoly(),
        (alternative_kinetic_term(),),
        ("mu",),
        CanonicalPairSet.of(("D", "X")),
        "alternative kinetic term as the only constraint",
    )


def maxwell_case() -> ConstraintCase:
    """1+1 reduction: H = ½B₁² − A₀B₁′ + λB₀."""
    return ConstraintCase(
        "maxwell",
        parse("1/2*B1^2 - A0*B1'"),
        (jet("B0"),),
        ("lambda",),
        CanonicalPairSet.of(("A0", "B0"), ("A1", "B1")),
        "Maxwell theory with momenta B^mu reduced to one spatial dimension",
    )


def custom_case(record: Mapping) -> ConstraintCase:
    """Case from a record {hamiltonian, pairs, primaries, multipliers}."""
    try:
        return ConstraintCase(
            record.get("name", "custom"),
            parse(record["hamiltonian"]) if record["hamiltonian"] else DiffPoly(),
            tuple(parse(p) for p in record["primaries"]),
            tuple(record["multipliers"]),
            CanonicalPairSet(tuple(tuple(p) for p in record["pairs"])),
            record.get("description", ""),
        )
    except KeyError as exc:
        raise ParseError(f"constraint case record is missing {exc}") from exc


CASES = {
    "dxn": dxn_case,
    "frozen": frozen_case,
    "alternative": alternative_case,
    "maxwell": maxwell_case,
}


# ----------------------------------------------------------------------
# case-study checks
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class IdentityCheck:
    """A computed expression compared with a printed one."""

    name: str
    computed: DiffPoly
    expected: DiffPoly
    relation: str
    holds: bool
    note: str = ""

    def to_dict(self) -> Dict:
        return {
            "name": self.name,
            "computed": str(self.computed),
            "expected": str(self.expected),
            "relation": self.relation,
            "holds": self.holds,
            "note": self.note,
        }


def _relation(computed: DiffPoly, expected: DiffPoly, modulo_x: bool = True) -> str:
    nf = normal_form if modulo_x else (lambda p: p)
    if nf(computed - expected).is_zero:
        return "equal"
    if nf(computed + expected).is_zero:
        return "negated"
    return "different"


def maxwell_gauge_generator() -> Dict[str, IdentityCheck]:
    """δA_μ = ∂_μ ε from G = ∫(ε̇ B⁰ − ε ∂₁B¹)."""
    case = maxwell_case()
    generator = SmearedFunctional(parse("epsilondot*B0 - epsilon*B1'"), "epsilon")
    checks = {}
    for field_name, expected in (("A0", jet("epsilon", t=1)), ("A1", jet("epsilon", x=1))):
        computed = gauge_variation(field_name, generator, case.pairs)
        relation = _relation(computed, expected, modulo_x=False)
        checks[field_name] = IdentityCheck(
            f"delta {field_name}", computed, expected, relation, relation == "equal"
        )
    return checks


def frozen_theory_brackets() -> List[IdentityCheck]:
    """Brackets and gauge variations of the frozen theory against the printed forms."""
    pairs = CanonicalPairSet.of(("D", "X"))
    phi1, phi2 = parse("1/2*X^2"), diff_gauss_law()
    mu, lam = "mu", "lambda"
    smeared = lambda density, s: SmearedFunctional.smear(density, s)  # noqa: E731

    checks = []
    computed = poisson_bracket(smeared(phi1, mu), smeared(phi1, lam), pairs)
    checks.append(IdentityCheck("{phi1[mu], phi1[lambda]}", computed, DiffPoly(),
                                _relation(computed, DiffPoly()), computed.is_zero))

    computed = poisson_bracket(smeared(phi1, mu), smeared(phi2, lam), pairs)
    printed = -(parse("2*lambda*mu'") * phi1 + parse("3*mu*lambda") * phi1.dx())
    relation = _relation(computed, printed)
    checks.append(IdentityCheck(
        "{phi1[mu], phi2[lambda]}", computed, printed, relation, relation == "equal",
        "printed with phi2' where phi1' is meant; both sides vanish weakly",
    ))

    computed = poisson_bracket(smeared(phi2, mu), smeared(phi2, lam), pairs)
    printed = parse("mu*lambda' - mu'*lambda") * phi2
    relation = _relation(computed, printed)
    checks.append(IdentityCheck(
        "{phi2[mu], phi2[lambda]}", computed, printed, relation, relation in ("equal", "negated"),
        "sign follows the orientation {D(x), X(y)} = delta(x - y)",
    ))

    xi = "xi"
    for label, generator_density, fld, printed_text, allowed in (
        ("delta1 D", phi1, "D", "xi*X", ("equal",)),
        ("delta1 X", phi1, "X", "0", ("equal",)),
        ("delta2 D", phi2, "D", "xi*D' + 2*xi'*D + q*xi'''", ("equal", "negated")),
        ("delta2 X", phi2, "X", "xi*X' - xi'*X", ("equal", "negated")),
    ):
        computed = gauge_variation(fld, smeared(generator_density, xi), pairs)
        printed = parse(printed_text)
        relation = _relation(computed, printed, modulo_x=False)
        checks.append(IdentityCheck(
            label, computed, printed, relation, relation in allowed,
            "" if relation == "equal" else "matches the printed form with xi -> -xi",
        ))
    return checks


def kinetic_term_checks(
    q_value: float = 1.3,
    window: Tuple[Tuple[float, float], Tuple[float, float]] = ((0.0, 1.0), (0.0, 6.28)),
) -> List[IdentityCheck]:
    """Identities of the alternative kinetic term T = ½DX² − (q/4)X′² + (q/2)XX″."""
    pairs = CanonicalPairSet.of(("D", "X"))
    t_density = alternative_kinetic_term()
    gauss = diff_gauss_law()
    checks = []

    derivative = t_density.dx()
    half = jet("X") * gauss / 2
    relation = "equal" if (derivative - half).is_zero else "different"
    checks.append(IdentityCheck(
        "T' = X G / 2", derivative, half, relation, relation == "equal",
        "the printed identity T' = X G holds up to the factor 1/2",
    ))

    reduced = t_density.subs_parameters({"q": 0}).dx()
    reduced_expected = jet("X") * gauss.subs_parameters({"q": 0}) / 2
    relation = "equal" if (reduced - reduced_expected).is_zero else "different"
    checks.append(IdentityCheck("T' at q = 0", reduced, reduced_expected, relation,
                                relation == "equal"))

    bracket = poisson_bracket(
        SmearedFunctional.smear(t_density, "mu"), SmearedFunctional.smear(t_density, "lambda"), pairs
    )
    checks.append(IdentityCheck("{T[mu], T[lambda]}", bracket, DiffPoly(),
                                _relation(bracket, DiffPoly()), bracket.is_zero,
                                "vanishes identically, not only weakly"))

    local = local_bracket(t_density, SmearedFunctional.smear(gauss, "xi"), pairs)
    expected = -jet("xi") * t_density.dx()
    relation = _relation(local, expected, modulo_x=False)
    checks.append(IdentityCheck("{T, G[xi]} = -xi T'", local, expected, relation,
                                relation == "equal"))

    f = "x + 3/10*sin(x + t)"
    schwarzian_f = (
        f"diff({f}, x, 3)/diff({f}, x) - 3/2*(diff({f}, x, 2)/diff({f}, x))**2"
    )
    residual = substitute_solution(
        t_density,
        {"D": f"{q_value}*({schwarzian_f})", "X": f"(1 + t**2)/diff({f}, x)"},
        window,
        {"q": q_value},
    )
    checks.append(IdentityCheck(
        "T = 0 on D = q S_x f, X = P/f'", DiffPoly.constant(sp.Float(residual, 3)),
        DiffPoly(), "equal" if residual < 1e-9 else "different", residual < 1e-9,
        f"max residual {residual:.2e}",
    ))
    return checks


def dxn_bracket_table(config: Optional[ToolkitConfig] = None) -> Dict[str, WeakReduction]:
    """Mixed brackets of the diff-Gauss law φ₂ and φ₃ = XX′, reduced modulo {φ₂, φ₃}."""
    pairs = CanonicalPairSet.of(("D", "X"))
    phi2, phi3 = diff_gauss_law(), parse("X*X'")
    out = {}
    for label, first, second in (("{phi3, phi2[mu]}", phi3, phi2), ("{phi2, phi3[mu]}", phi2, phi3)):
        bracket = local_bracket(first, SmearedFunctional.smear(second, "mu"), pairs)
        out[label] = weak_reduce(bracket, [phi2, phi3], config)
    return out
