# Fuzzy-FX Fuzzy Engine Module: Mamdani inference over three inputs
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np
import skfuzzy as fuzz

from fuzzy_fx.exceptions import FuzzyFxConfigError, NoRuleFiredError
from fuzzy_fx.logger import get_logger

logger = get_logger(__name__)

INPUTS_PER_SYSTEM = 3
RULES_PER_SYSTEM = 12
DEFAULT_RESOLUTION = 1001


class Term(str, Enum):
    """Linguistic terms shared by every input and the output."""

    BUY = "buy"
    NEUTRAL = "neutral"
    SELL = "sell"

    @property
    def code(self) -> str:
        return self.value[0].upper()

    @classmethod
    def from_code(cls, code: str) -> Term:
        for term in cls:
            if code.strip().upper() in (term.code, term.value.upper()):
                return term
        raise FuzzyFxConfigError(f"Unknown linguistic term '{code}' (expected B, N or S)")

    def mirrored(self) -> Term:
        if self is Term.BUY:
            return Term.SELL
        if self is Term.SELL:
            return Term.BUY
        return self


@dataclass(frozen=True)
class MembershipFunction:
    """Trapezoid ramping up a->b, flat at 1 on [b, c], ramping down c->d."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        if not (self.a <= self.b <= self.c <= self.d):
            raise FuzzyFxConfigError(
                f"Trapezoid breakpoints must satisfy a <= b <= c <= d, got {self.breakpoints}"
            )

    @property
    def breakpoints(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    def sample(self, universe: np.ndarray) -> np.ndarray:
        return fuzz.trapmf(np.asarray(universe, dtype=float), list(self.breakpoints))

    def degree(self, x: float) -> float:
        return float(self.sample(np.array([x], dtype=float))[0])


def membership(mf: MembershipFunction, x: float) -> float:
    """Degree of ``x`` in the trapezoid ``mf``."""
    return mf.degree(x)


@dataclass(frozen=True)
class TermSet:
    """Buy/neutral/sell trapezoids over one variable's domain."""

    domain_min: float
    domain_max: float
    terms: Mapping[Term, MembershipFunction]

    def __post_init__(self):
        if not self.domain_min < self.domain_max:
            raise FuzzyFxConfigError(
                f"Empty domain [{self.domain_min}, {self.domain_max}] for term set"
            )
        missing = [t.value for t in Term if t not in self.terms]
        if missing:
            raise FuzzyFxConfigError(f"Term set lacks terms: {missing}")
        object.__setattr__(self, "terms", MappingProxyType(dict(self.terms)))
        gap = self._coverage_gap()
        if gap is not None:
            raise FuzzyFxConfigError(f"Term set does not cover x = {gap}")

    def _coverage_gap(self) -> float | None:
        # Memberships are piecewise linear, so checking every breakpoint and every
        # midpoint between consecutive breakpoints decides coverage exactly.
        points = {self.domain_min, self.domain_max}
        for mf in self.terms.values():
            points.update(p for p in mf.breakpoints if self.domain_min <= p <= self.domain_max)
        ordered = sorted(points)
        samples = ordered + [(lo + hi) / 2.0 for lo, hi in zip(ordered, ordered[1:])]
        for x in samples:
            if max(mf.degree(x) for mf in self.terms.values()) <= 0.0:
                return x
        return None

    @property
    def midpoint(self) -> float:
        return (self.domain_min + self.domain_max) / 2.0

    def clamp(self, x: float) -> float:
        return min(max(float(x), self.domain_min), self.domain_max)

    def reflect(self, x: float) -> float:
        """Mirror ``x`` about the domain midpoint."""
        return self.domain_min + self.domain_max - x

    def fuzzify(self, x: float) -> dict[Term, float]:
        clamped = self.clamp(x)
        return {term: self.terms[term].degree(clamped) for term in Term}

    def fuzzify_many(self, xs: Sequence[float]) -> list[dict[Term, float]]:
        """``fuzzify`` over several values with one sampling pass per term."""
        clamped = np.clip(np.asarray(xs, dtype=float), self.domain_min, self.domain_max)
        sampled = {term: self.terms[term].sample(clamped) for term in Term}
        return [{term: float(sampled[term][i]) for term in Term} for i in range(len(clamped))]


def fuzzify(x: float, ts: TermSet) -> dict[Term, float]:
    """Degrees of ``x`` (clamped into the domain) in each term of ``ts``."""
    return ts.fuzzify(x)


@dataclass(frozen=True)
class FuzzyRule:
    """``if in1 is t1 and in2 is t2 and in3 is t3 then out is consequent``."""

    antecedent: tuple[Term, Term, Term]
    consequent: Term

    def __post_init__(self):
        if len(self.antecedent) != INPUTS_PER_SYSTEM:
            raise FuzzyFxConfigError(
                f"A rule needs {INPUTS_PER_SYSTEM} antecedent terms, got {len(self.antecedent)}"
            )

    @classmethod
    def parse(cls, text: str) -> FuzzyRule:
        """Parse ``"B,B,N->B"``."""
        left, arrow, right = text.partition("->")
        if not arrow:
            raise FuzzyFxConfigError(f"Rule '{text}' lacks '->'")
        antecedent = tuple(Term.from_code(code) for code in left.split(","))
        if len(antecedent) != INPUTS_PER_SYSTEM:
            raise FuzzyFxConfigError(
                f"Rule '{text}' needs {INPUTS_PER_SYSTEM} antecedent terms"
            )
        return cls(antecedent, Term.from_code(right))  # type: ignore[arg-type]

    def __str__(self) -> str:
        return f"{','.join(t.code for t in self.antecedent)}->{self.consequent.code}"

    def mirrored(self) -> FuzzyRule:
        return FuzzyRule(
            tuple(t.mirrored() for t in self.antecedent),  # type: ignore[arg-type]
            self.consequent.mirrored(),
        )


def fire_rule(rule: FuzzyRule, fuzzified: Sequence[Mapping[Term, float]]) -> float:
    """Mamdani AND: the minimum antecedent degree."""
    return min(degrees[term] for degrees, term in zip(fuzzified, rule.antecedent))


@dataclass(frozen=True)
class FuzzyVerdict:
    """Defuzzified output ``res`` and how many rules contributed to it."""

    res: float
    fired_rule_count: int


@dataclass(frozen=True)
class FuzzySystem:
    """
    Three-input, one-output Mamdani system.

    Each rule's consequent is clipped at its firing strength, the clipped sets are
    max-aggregated on a uniform grid over the output domain, and the crisp output is
    the centroid of the aggregate.
    """

    input_term_sets: tuple[TermSet, TermSet, TermSet]
    output_term_set: TermSet
    rules: tuple[FuzzyRule, ...]
    resolution: int = DEFAULT_RESOLUTION
    name: str = ""
    _universe: np.ndarray = field(init=False, repr=False, compare=False)
    _consequents: Mapping[Term, np.ndarray] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "input_term_sets", tuple(self.input_term_sets))
        object.__setattr__(self, "rules", tuple(self.rules))
        if len(self.input_term_sets) != INPUTS_PER_SYSTEM:
            raise FuzzyFxConfigError(
                f"A fuzzy system takes {INPUTS_PER_SYSTEM} inputs, got {len(self.input_term_sets)}"
            )
        out = self.output_term_set
        if (out.domain_min, out.domain_max) != (0.0, 1.0):
            raise FuzzyFxConfigError(
                f"Output domain must be [0, 1], got [{out.domain_min}, {out.domain_max}]"
            )
        if len(self.rules) != RULES_PER_SYSTEM:
            raise FuzzyFxConfigError(
                f"A fuzzy system needs exactly {RULES_PER_SYSTEM} rules, got {len(self.rules)}"
            )
        seen: set[tuple[Term, ...]] = set()
        for rule in self.rules:
            if rule.antecedent in seen:
                raise FuzzyFxConfigError(f"Duplicate rule antecedent in '{rule}'")
            seen.add(rule.antecedent)
        if self.resolution < 2:
            raise FuzzyFxConfigError(f"Resolution must be at least 2, got {self.resolution}")

        universe = np.linspace(out.domain_min, out.domain_max, self.resolution)
        consequents = {term: mf.sample(universe) for term, mf in out.terms.items()}
        object.__setattr__(self, "_universe", universe)
        object.__setattr__(self, "_consequents", MappingProxyType(consequents))

    def with_resolution(self, resolution: int) -> FuzzySystem:
        return FuzzySystem(
            self.input_term_sets, self.output_term_set, self.rules, resolution, self.name
        )

    def fuzzify(self, inputs: Sequence[float]) -> list[dict[Term, float]]:
        if len(inputs) != INPUTS_PER_SYSTEM:
            raise ValueError(f"Expected {INPUTS_PER_SYSTEM} inputs, got {len(inputs)}")
        first = self.input_term_sets[0]
        if all(ts is first for ts in self.input_term_sets):
            return first.fuzzify_many(inputs)
        return [ts.fuzzify(x) for ts, x in zip(self.input_term_sets, inputs)]

    def infer(self, inputs: Sequence[float]) -> FuzzyVerdict:
        degrees = self.fuzzify(inputs)
        aggregate = np.zeros_like(self._universe)
        fired = 0
        for rule in self.rules:
            strength = fire_rule(rule, degrees)
            if strength <= 0.0:
                continue
            fired += 1
            aggregate = np.fmax(aggregate, np.fmin(strength, self._consequents[rule.consequent]))

        if fired == 0 or aggregate.sum() <= 0.0:
            logger.debug(f"No rule fired in {self.name or 'fuzzy system'} for inputs {inputs}")
            raise NoRuleFiredError(
                f"No rule of {self.name or 'the fuzzy system'} fired for inputs {tuple(inputs)}"
            )

        res = centroid(self._universe, aggregate)
        return FuzzyVerdict(res=min(max(res, 0.0), 1.0), fired_rule_count=fired)


def centroid(universe: np.ndarray, mu: np.ndarray) -> float:
    """
    Centroid of a sampled membership function, linear between grid points.

    Same integral as ``skfuzzy.defuzz(universe, mu, "centroid")``, summed with numpy
    instead of a per-segment loop.
    """
    x1, x2 = universe[:-1], universe[1:]
    y1, y2 = mu[:-1], mu[1:]
    width = x2 - x1
    area = 0.5 * width * (y1 + y2)
    moment = width / 6.0 * (y1 * (2.0 * x1 + x2) + y2 * (x1 + 2.0 * x2))
    return float(moment.sum() / max(area.sum(), np.finfo(float).eps))


def infer(sys: FuzzySystem, inputs: Sequence[float]) -> FuzzyVerdict:
    """Run Mamdani inference; raises NoRuleFiredError when the aggregate is empty."""
    return sys.infer(inputs)
