"""Scripted replay of the collaborative safety/security assessment cycle.

A scenario names a GSN model and an ADT, acceptance thresholds on the root
goal's confidence triple, and one action per round.  Each round applies its
action, re-evaluates the ADT under the current verdict policy, folds the
verdict into the freshly aggregated evidence triple (updates never compound
across rounds), and stops as soon as the thresholds hold.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from . import adteval
from .confidence import SecurityVerdict, apply_security_links
from .model import (
    AddCounterAction,
    AdtNode,
    AttackDefenseTree,
    ConfidenceTriple,
    DefeaterCount,
    Document,
    GsnModel,
    NodeKind,
    Scenario,
    ScenarioAction,
    SetDefeatersAction,
    SetPolicyAction,
)

TRANSCRIPT_NOTE = (
    "each round starts from the freshly aggregated evidence triple; "
    "verdict updates do not compound across rounds"
)


class ProcessError(Exception):
    pass


@dataclass(frozen=True)
class RoundEntry:
    round: int
    action: str
    verdict: SecurityVerdict
    triple: ConfidenceTriple


@dataclass(frozen=True)
class Transcript:
    scenario: str
    note: str
    initial_triple: ConfidenceTriple
    entries: tuple[RoundEntry, ...]
    status: str  # "accepted" | "exhausted"

    @property
    def final_triple(self) -> ConfidenceTriple:
        return self.entries[-1].triple if self.entries else self.initial_triple


def attach_counter(
    tree: AttackDefenseTree, at_label: str, counter: AdtNode
) -> AttackDefenseTree:
    """Return a copy of the tree with a countermeasure under the labeled node."""

    def rec(node: AdtNode) -> tuple[AdtNode, bool]:
        if node.label == at_label:
            if node.counter is not None:
                raise ProcessError(
                    f"node {at_label!r} already carries a countermeasure"
                )
            if counter.actor is not node.actor.opposite:
                raise ProcessError(
                    f"countermeasure for {at_label!r} must have opposite actor"
                )
            return replace(node, counter=counter), True
        new_children = []
        found = False
        for child in node.children:
            new_child, hit = rec(child)
            found = found or hit
            new_children.append(new_child)
        if found:
            return replace(node, children=tuple(new_children)), True
        return node, False

    new_root, found = rec(tree.root)
    if not found:
        raise ProcessError(f"unknown adt node {at_label!r}")
    return replace(tree, root=new_root)


def set_defeaters(
    model: GsnModel, goal_id: str, outruled: int, total: int
) -> GsnModel:
    for node in model.nodes:
        if node.id == goal_id:
            if node.kind is not NodeKind.GOAL:
                raise ProcessError(f"node {goal_id!r} is not a goal")
            new_node = replace(node, defeaters=DefeaterCount(outruled, total))
            return replace(
                model,
                nodes=tuple(new_node if n.id == goal_id else n for n in model.nodes),
            )
    raise ProcessError(f"unknown goal {goal_id!r}")


def describe_action(action: ScenarioAction) -> str:
    if isinstance(action, SetPolicyAction):
        if action.unassessed:
            return "set_policy unassessed"
        return (
            f"set_policy {action.attribute} {action.op} {action.threshold:g}"
        )
    if isinstance(action, AddCounterAction):
        return f"add_counter {action.node.label!r} at {action.at_label!r}"
    return f"set_defeaters {action.goal_id} {action.outruled}/{action.total}"


def _root_goal_id(model: GsnModel) -> str:
    root = model.root()
    if root.kind is not NodeKind.GOAL:
        raise ProcessError(f"root node {root.id!r} of gsn {model.name!r} is not a goal")
    return root.id


def run_process(document: Document, scenario: Scenario) -> Transcript:
    try:
        model = document.gsns[scenario.gsn_name]
    except KeyError:
        raise ProcessError(f"unknown gsn model {scenario.gsn_name!r}")
    try:
        adt = document.adts[scenario.adt_name]
    except KeyError:
        raise ProcessError(f"unknown adt {scenario.adt_name!r}")

    policy = adteval.UNASSESSED
    root_goal = _root_goal_id(model)

    def current_triple() -> tuple[SecurityVerdict, ConfidenceTriple]:
        v = adteval.verdict(adt, policy)
        linked = apply_security_links(model, {scenario.adt_name: v})
        return v, linked.triples[root_goal]

    _, triple = current_triple()
    initial = triple
    if scenario.thresholds.met_by(triple):
        return Transcript(scenario.name, TRANSCRIPT_NOTE, initial, (), "accepted")

    entries: list[RoundEntry] = []
    for round_no, action in enumerate(scenario.actions, start=1):
        if round_no > scenario.max_rounds:
            break
        try:
            if isinstance(action, SetPolicyAction):
                if action.unassessed:
                    policy = adteval.UNASSESSED
                else:
                    policy = adteval.VerdictPolicy(
                        attribute=action.attribute,
                        op=action.op,
                        threshold=action.threshold,
                    )
            elif isinstance(action, AddCounterAction):
                adt = attach_counter(adt, action.at_label, action.node)
            elif isinstance(action, SetDefeatersAction):
                model = set_defeaters(
                    model, action.goal_id, action.outruled, action.total
                )
        except (ProcessError, ValueError) as exc:
            raise ProcessError(f"round {round_no}: {exc}")
        try:
            verdict, triple = current_triple()
        except adteval.EvaluationError as exc:
            raise ProcessError(f"round {round_no}: {exc}")
        entries.append(RoundEntry(round_no, describe_action(action), verdict, triple))
        if scenario.thresholds.met_by(triple):
            return Transcript(
                scenario.name, TRANSCRIPT_NOTE, initial, tuple(entries), "accepted"
            )
    return Transcript(scenario.name, TRANSCRIPT_NOTE, initial, tuple(entries), "exhausted")
