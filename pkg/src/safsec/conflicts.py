"""Requirement conflict detection via closed-world contradiction search.

Candidates are requirement pairs whose clause heads share a signal.  A
candidate is confirmed by enumerating every truth assignment of the declared
input signals (each contributing its positive or negated atom), forward
chaining the clauses to a least fixed point, and reporting any assignment
under which some signal is derived with both polarities.  Negated signals
are distinct atoms, so nothing follows from the mere absence of a fact:
an atom holds only if a rule supports it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from .model import Clause, Diagnostic, Literal, Requirement

MAX_INPUTS = 20

Atom = tuple[str, bool]  # (signal, polarity)


@dataclass(frozen=True)
class AttributedClause:
    clause: Clause
    requirement_id: str = ""


@dataclass(frozen=True)
class RuleSet:
    rules: tuple[AttributedClause, ...]
    inputs: tuple[str, ...]  # sorted
    warnings: tuple[Diagnostic, ...] = ()

    @classmethod
    def from_requirements(cls, reqs: Sequence[Requirement]) -> "RuleSet":
        """Union the requirements' clauses and inputs.

        A signal that is a clause head anywhere is derived; declaring it as an
        input elsewhere only earns a warning, the head status wins.
        """
        rules = tuple(
            AttributedClause(clause, req.id) for req in reqs for clause in req.clauses
        )
        heads = {ac.clause.head.signal for ac in rules}
        inputs: set[str] = set()
        warnings: list[Diagnostic] = []
        for req in reqs:
            for sig in req.inputs:
                if sig in heads:
                    warnings.append(
                        Diagnostic(
                            f"signal {sig!r} declared input in requirement "
                            f"{req.id!r} but derived by a clause head; "
                            f"treating it as derived",
                            severity="warning",
                        )
                    )
                else:
                    inputs.add(sig)
        return cls(rules, tuple(sorted(inputs)), tuple(warnings))


@dataclass(frozen=True)
class ContradictionWitness:
    input_assignment: dict[str, bool]
    derived_atoms: frozenset[Atom]
    conflicted_signal: str
    involved_requirements: tuple[str, ...]
    fired_clauses: tuple[Clause, ...] = ()


def conflict_candidates(
    reqs: Sequence[Requirement], wide: bool = False
) -> list[tuple[str, str]]:
    """Requirement pairs sharing a head signal (or any signal with ``wide``)."""
    pairs: list[tuple[str, str]] = []
    for r1, r2 in combinations(reqs, 2):
        s1 = r1.all_signals() if wide else r1.head_signals()
        s2 = r2.all_signals() if wide else r2.head_signals()
        if s1 & s2:
            pairs.append((r1.id, r2.id))
    return pairs


def _lit_atom(lit: Literal) -> Atom:
    return (lit.signal, lit.positive)


def forward_chain(
    rules: Iterable[AttributedClause], facts: set[Atom]
) -> tuple[set[Atom], list[AttributedClause]]:
    """Least fixed point of the definite rules over signed atoms.

    Returns the derived set and the clauses that fired, in firing order.
    Terminates in at most one pass per derivable atom.
    """
    derived = set(facts)
    fired: list[AttributedClause] = []
    fired_set: set[int] = set()
    changed = True
    while changed:
        changed = False
        for idx, ac in enumerate(rules):
            if idx in fired_set:
                continue
            if all(_lit_atom(lit) in derived for lit in ac.clause.body):
                fired.append(ac)
                fired_set.add(idx)
                head = _lit_atom(ac.clause.head)
                if head not in derived:
                    derived.add(head)
                changed = True
    return derived, fired


def find_contradictions(rules: RuleSet) -> list[ContradictionWitness]:
    """Witnesses for every input assignment deriving both polarities of a signal."""
    if len(rules.inputs) > MAX_INPUTS:
        raise ValueError(
            f"{len(rules.inputs)} input signals exceed the enumeration bound of "
            f"{MAX_INPUTS}; decompose the model into smaller requirement groups"
        )
    witnesses: list[ContradictionWitness] = []
    n = len(rules.inputs)
    for pattern in range(2**n):
        assignment = {
            sig: bool((pattern >> i) & 1) for i, sig in enumerate(rules.inputs)
        }
        facts = {(sig, value) for sig, value in assignment.items()}
        derived, fired = forward_chain(rules.rules, facts)
        signals = {sig for sig, _ in derived}
        conflicted = sorted(
            sig for sig in signals if (sig, True) in derived and (sig, False) in derived
        )
        if conflicted:
            involved = tuple(
                sorted({ac.requirement_id for ac in fired if ac.requirement_id})
            )
            witnesses.append(
                ContradictionWitness(
                    input_assignment=assignment,
                    derived_atoms=frozenset(derived),
                    conflicted_signal=conflicted[0],
                    involved_requirements=involved,
                    fired_clauses=tuple(ac.clause for ac in fired),
                )
            )
    return witnesses


def replay(rules: RuleSet, witness: ContradictionWitness) -> bool:
    """Re-run chaining on the witness's assignment; True iff it reproduces."""
    facts = {(sig, value) for sig, value in witness.input_assignment.items()}
    derived, _ = forward_chain(rules.rules, facts)
    return frozenset(derived) == witness.derived_atoms


@dataclass(frozen=True)
class PairReport:
    first: str
    second: str
    witnesses: tuple[ContradictionWitness, ...]
    warnings: tuple[Diagnostic, ...] = ()

    @property
    def consistent(self) -> bool:
        return not self.witnesses


def check_pair(r1: Requirement, r2: Requirement) -> PairReport:
    """Confirm or refute a conflict candidate from exactly two requirements."""
    rules = RuleSet.from_requirements([r1, r2])
    witnesses = find_contradictions(rules)
    return PairReport(r1.id, r2.id, tuple(witnesses), rules.warnings)
