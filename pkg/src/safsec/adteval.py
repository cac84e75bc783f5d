"""Bottom-up quantitative evaluation of attack-defense trees.

An attribute domain fixes how OR/AND refinements and countermeasure
attachments combine values.  Built-in domains follow the standard semantics
from the quantitative attack-tree literature:

  cost         or=min, and=sum, counter=attack cost + defense bypass cost
  probability  or=max, and=product, counter=attack * (1 - effectiveness)
  time         or=min, and=max (parallel attacker); ``time_sequential``
               uses and=sum for a single-threaded attacker

Probability OR defaults to max (worst single path); a policy file may select
noisy-OR instead.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import reduce
from typing import Callable, Optional

from .confidence import SecurityVerdict
from .model import AdtNode, AttackDefenseTree, Refinement


class EvaluationError(Exception):
    pass


@dataclass(frozen=True)
class AttributeDomain:
    name: str
    or_combine: Callable[[float, float], float]
    and_combine: Callable[[float, float], float]
    counter_combine: Callable[[float, float], float]
    leaf_default: Optional[float] = None
    attribute_key: Optional[str] = None  # leaf attribute name; defaults to name

    @property
    def key(self) -> str:
        return self.attribute_key if self.attribute_key is not None else self.name


def _noisy_or(a: float, b: float) -> float:
    return 1.0 - (1.0 - a) * (1.0 - b)


COST = AttributeDomain(
    name="cost",
    or_combine=min,
    and_combine=lambda a, b: a + b,
    counter_combine=lambda attack, bypass: attack + bypass,
)

PROBABILITY = AttributeDomain(
    name="probability",
    or_combine=max,
    and_combine=lambda a, b: a * b,
    counter_combine=lambda attack, effectiveness: attack * (1.0 - effectiveness),
)

TIME = AttributeDomain(
    name="time",
    or_combine=min,
    and_combine=max,
    counter_combine=lambda attack, delay: attack + delay,
)

TIME_SEQUENTIAL = replace(
    TIME,
    name="time_sequential",
    and_combine=lambda a, b: a + b,
    attribute_key="time",
)

BUILTIN_DOMAINS: dict[str, AttributeDomain] = {
    d.name: d for d in (COST, PROBABILITY, TIME, TIME_SEQUENTIAL)
}


def get_domain(name: str) -> AttributeDomain:
    try:
        return BUILTIN_DOMAINS[name]
    except KeyError:
        known = ", ".join(sorted(BUILTIN_DOMAINS))
        raise EvaluationError(f"unknown attribute domain {name!r} (known: {known})")


def evaluate(tree: AttackDefenseTree, domain: AttributeDomain) -> dict[str, float]:
    """Value of every node (keyed by tree path) under the given domain."""
    values: dict[str, float] = {}

    def rec(path: str, node: AdtNode) -> float:
        if node.refinement is Refinement.LEAF:
            value = node.attribute(domain.key)
            if value is None:
                value = domain.leaf_default
            if value is None:
                raise EvaluationError(
                    f"leaf {node.label!r} has no {domain.key!r} attribute "
                    f"and the domain defines no default"
                )
        else:
            child_values = [
                rec(f"{path}.{i}", child) for i, child in enumerate(node.children)
            ]
            combine = (
                domain.and_combine
                if node.refinement is Refinement.AND
                else domain.or_combine
            )
            value = reduce(combine, child_values)
        if node.counter is not None:
            counter_value = rec(f"{path}.c", node.counter)
            value = domain.counter_combine(value, counter_value)
        values[path] = value
        return value

    rec("root", tree.root)
    return values


@dataclass(frozen=True)
class VerdictPolicy:
    """Threshold comparison on the root value, or no assessment at all."""

    unassessed: bool = False
    attribute: str = "probability"
    op: str = "<="  # "<=" or ">="
    threshold: float = 0.0
    prob_or: str = "max"  # "max" | "noisy_or"

    def __post_init__(self) -> None:
        if self.op not in ("<=", ">="):
            raise ValueError(f"comparison must be <= or >=, got {self.op!r}")
        if self.prob_or not in ("max", "noisy_or"):
            raise ValueError(f"prob_or must be max or noisy_or, got {self.prob_or!r}")

    def domain(self) -> AttributeDomain:
        d = get_domain(self.attribute)
        if d.name == "probability" and self.prob_or == "noisy_or":
            d = replace(d, or_combine=_noisy_or)
        return d


UNASSESSED = VerdictPolicy(unassessed=True)


def verdict(tree: AttackDefenseTree, policy: VerdictPolicy) -> SecurityVerdict:
    """Compare the root's evaluated value against the policy threshold."""
    if policy.unassessed:
        return SecurityVerdict.NO_ASSESSMENT
    root_value = evaluate(tree, policy.domain())["root"]
    if policy.op == "<=":
        ok = root_value <= policy.threshold
    else:
        ok = root_value >= policy.threshold
    return SecurityVerdict.ACCEPTABLE_RISK if ok else SecurityVerdict.UNACCEPTABLE_RISK


def load_policy(text: str) -> VerdictPolicy:
    """Parse the key=value policy format.

    Keys: ``unassessed`` (true/false), ``attribute``, ``op`` (<= or >=),
    ``threshold``, ``prob_or`` (max or noisy_or).  Lines starting with ``#``
    and blank lines are ignored.
    """
    fields: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise EvaluationError(f"policy line {lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        fields[key.strip()] = value.strip()
    unknown = set(fields) - {"unassessed", "attribute", "op", "threshold", "prob_or"}
    if unknown:
        raise EvaluationError(f"unknown policy keys: {', '.join(sorted(unknown))}")
    if fields.get("unassessed", "").lower() in ("true", "yes", "1"):
        return UNASSESSED
    try:
        return VerdictPolicy(
            attribute=fields.get("attribute", "probability"),
            op=fields.get("op", "<="),
            threshold=float(fields.get("threshold", "0")),
            prob_or=fields.get("prob_or", "max"),
        )
    except ValueError as exc:
        raise EvaluationError(str(exc))
