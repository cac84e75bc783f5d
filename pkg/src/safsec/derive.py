"""Derivation of a preliminary attack-defense tree from an annotated GSN model.

Each hazard-annotated goal becomes an attack branch named after its guide
word and traced component.  Solution annotations expand into attack
fragments: voters by M-of-N subset enumeration, fault trees via their
minimal cut sets, FMEA tables row by row.  Voter fragments cross-cut: a
voter traced to component X shows up in every hazard branch for X, because
stopping or triggering the voter stops or triggers the component.
"""

from __future__ import annotations

from itertools import combinations
from typing import Mapping, Optional

from . import fta as fta_mod
from .model import (
    Actor,
    AdtNode,
    AttackDefenseTree,
    FailureMode,
    FaultTree,
    FmeaTable,
    GsnModel,
    GsnNode,
    GuideWord,
    Impact,
    NodeKind,
    Refinement,
    VoterMeta,
)

MAX_VOTER_SIGNALS = 12

ATTACK_VERB = {
    GuideWord.DISCLOSURE: "Disclose",
    GuideWord.DISCONNECTED: "Disconnect",
    GuideWord.DELAY: "Delay",
    GuideWord.DELETION: "Delete",
    GuideWord.STOPPING: "Stop",
    GuideWord.DENIAL: "Deny",
    GuideWord.TRIGGER: "Trigger",
    GuideWord.INSERTION: "Insert",
    GuideWord.RESET: "Reset",
    GuideWord.MANIPULATION: "Manipulate",
}

SEVERITY_BANDS = ((3, Impact.LOW), (7, Impact.MEDIUM), (10, Impact.HIGH))


class DerivationError(Exception):
    pass


def _leaf(label: str, impact: Optional[Impact] = None) -> AdtNode:
    return AdtNode(actor=Actor.ATTACK, label=label, impact=impact)


def _node(
    label: str,
    refinement: Refinement,
    children: list[AdtNode],
    impact: Optional[Impact] = None,
) -> AdtNode:
    if not children:
        return _leaf(label, impact)
    return AdtNode(
        actor=Actor.ATTACK,
        label=label,
        refinement=refinement,
        children=tuple(children),
        impact=impact,
    )


def severity_to_impact(severity: int) -> Impact:
    for bound, impact in SEVERITY_BANDS:
        if severity <= bound:
            return impact
    return Impact.HIGH


def voter_attack_subtree(meta: VoterMeta, mode: GuideWord) -> AdtNode:
    """Attack fragment against an M-of-N voter for trigger or stopping hazards."""
    if meta.problems:
        raise DerivationError("; ".join(meta.problems))
    if mode is GuideWord.STOPPING:
        return _leaf(f"deny_service voter {meta.trace}")
    if mode is not GuideWord.TRIGGER:
        raise DerivationError(
            f"voter attacks are defined for trigger/stopping only, got {mode.value}"
        )
    if len(meta.signals) > MAX_VOTER_SIGNALS:
        raise DerivationError(
            f"voter with {len(meta.signals)} signals exceeds the subset "
            f"enumeration bound of {MAX_VOTER_SIGNALS}"
        )
    children: list[AdtNode] = [_leaf(f"tamper voter {meta.trace}")]
    for subset in combinations(meta.signals, meta.threshold):
        if len(subset) == 1:
            children.append(_leaf(f"spoof {subset[0]}"))
        else:
            children.append(
                _node(
                    "spoof " + ", ".join(subset),
                    Refinement.AND,
                    [_leaf(f"spoof {sig}") for sig in subset],
                )
            )
    return _node(f"defeat voter {meta.trace}", Refinement.OR, children)


def fta_attack_subtree(tree: FaultTree) -> Optional[AdtNode]:
    """Attack fragment triggering the tree's top event via any minimal cut set."""
    fragments: list[AdtNode] = []
    for cut in fta_mod.canonical_order(fta_mod.minimal_cut_sets(tree)):
        if len(cut) == 1:
            fragments.append(_leaf(f"trigger {cut[0]}"))
        else:
            fragments.append(
                _node(
                    "trigger " + ", ".join(cut),
                    Refinement.AND,
                    [_leaf(f"trigger {ev}") for ev in cut],
                )
            )
    if not fragments:
        return None
    if len(fragments) == 1:
        return fragments[0]
    return _node(f"trigger {tree.name}", Refinement.OR, fragments)


def fmea_attack_subtree(table: FmeaTable) -> list[AdtNode]:
    """One attack fragment per FMEA row, keyed on its failure mode."""
    fragments: list[AdtNode] = []
    for row in table.rows:
        impact = severity_to_impact(row.severity)
        if row.failure_mode is FailureMode.LOSS_OF_FUNCTION:
            fragments.append(
                _node(
                    f"disable {row.function}",
                    Refinement.OR,
                    [
                        _leaf(f"deny_service {row.function}"),
                        _leaf(f"tamper {row.function}"),
                    ],
                    impact,
                )
            )
        elif row.failure_mode is FailureMode.ERRONEOUS:
            fragments.append(_leaf(f"tamper {row.function}", impact))
        elif row.failure_mode is FailureMode.UNINTENDED_ACTION:
            fragments.append(_leaf(f"trigger {row.function}", impact))
        else:  # partial loss: hit one redundant sub-function
            fragments.append(
                _leaf(f"deny_service sub-function of {row.function}", impact)
            )
    return fragments


def _nearest_hazard_ancestor(model: GsnModel, node: GsnNode) -> Optional[str]:
    cur = node.parent
    while cur is not None:
        ancestor = model.node(cur)
        if ancestor.kind is NodeKind.GOAL and ancestor.hazard is not None:
            return ancestor.id
        cur = ancestor.parent
    return None


def derive_adt(
    model: GsnModel,
    fault_trees: Mapping[str, FaultTree] = {},
    fmea_tables: Mapping[str, FmeaTable] = {},
) -> AttackDefenseTree:
    """Build the preliminary attack tree for the item assessed by the model."""
    hazard_goals = [n for n in model.goals() if n.hazard is not None]
    if not hazard_goals:
        raise DerivationError(
            f"nothing to derive: gsn {model.name!r} has no hazard-annotated goals"
        )
    solutions = [n for n in model.nodes if n.kind is NodeKind.SOLUTION]
    for sol in solutions:
        if sol.fta_ref is not None and sol.fta_ref not in fault_trees:
            raise DerivationError(f"solution {sol.id!r}: unresolved fta_ref {sol.fta_ref!r}")
        if sol.fmea_ref is not None and sol.fmea_ref not in fmea_tables:
            raise DerivationError(f"solution {sol.id!r}: unresolved fmea_ref {sol.fmea_ref!r}")

    branches: list[AdtNode] = []
    for goal in hazard_goals:
        hazard = goal.hazard
        assert hazard is not None
        fragments: list[AdtNode] = []
        for sol in solutions:
            # Voters cross-cut by trace; FTA/FMEA fragments attach under the
            # hazard goal they argue for (strategies in between are skipped).
            if (
                sol.voter is not None
                and sol.voter.trace == hazard.trace
                and hazard.mechanism in (GuideWord.TRIGGER, GuideWord.STOPPING)
            ):
                fragments.append(voter_attack_subtree(sol.voter, hazard.mechanism))
            if _nearest_hazard_ancestor(model, sol) != goal.id:
                continue
            if sol.fta_ref is not None:
                fragment = fta_attack_subtree(fault_trees[sol.fta_ref])
                if fragment is not None:
                    fragments.append(fragment)
            if sol.fmea_ref is not None:
                fragments.extend(fmea_attack_subtree(fmea_tables[sol.fmea_ref]))
        label = f"{ATTACK_VERB[hazard.mechanism]} {hazard.trace}"
        branches.append(_node(label, Refinement.OR, fragments, hazard.impact))

    root = AdtNode(
        actor=Actor.ATTACK,
        label=f"Attack {model.name}",
        refinement=Refinement.OR,
        children=tuple(branches),
    )
    return AttackDefenseTree(name=f"Attack {model.name}", root=root)
