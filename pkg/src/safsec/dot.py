"""Graphviz DOT rendering for GSN models, fault trees, and ADTs.

Presentation only: attack nodes are red boxes, defense nodes green, and
countermeasure attachments use dotted edges.  AND refinements and gates are
marked in the node label.
"""

from __future__ import annotations

from .model import (
    AdtNode,
    AttackDefenseTree,
    FaultTree,
    GsnModel,
    NodeKind,
    Refinement,
)

GSN_SHAPES = {
    NodeKind.GOAL: "box",
    NodeKind.STRATEGY: "parallelogram",
    NodeKind.SOLUTION: "circle",
    NodeKind.CONTEXT: "ellipse",
}


def _esc(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def gsn_to_dot(model: GsnModel) -> str:
    lines = [f'digraph "{_esc(model.name)}" {{', "  rankdir=TB;"]
    for node in model.nodes:
        label = f"{node.id}\\n{_esc(node.text)}"
        if node.defeaters is not None:
            label += f"\\n{node.defeaters.outruled}/{node.defeaters.total}"
        lines.append(
            f'  "{node.id}" [shape={GSN_SHAPES[node.kind]}, label="{label}"];'
        )
    for node in model.nodes:
        if node.parent is not None:
            lines.append(f'  "{node.parent}" -> "{node.id}";')
    for link in model.security_links:
        anchor = f"adt_{link.adt_name}"
        lines.append(
            f'  "{anchor}" [shape=note, label="ADT: {_esc(link.adt_name)}\\nw = {link.weight:g}"];'
        )
        lines.append(f'  "{link.goal_id}" -> "{anchor}" [style=dotted];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def fta_to_dot(tree: FaultTree) -> str:
    lines = [f'digraph "{_esc(tree.name)}" {{', "  rankdir=TB;"]
    for gid, op, _ in tree.gates:
        lines.append(f'  "{gid}" [shape=invtrapezium, label="{gid}\\n[{op.value}]"];')
    for event in sorted(tree.basic_events):
        lines.append(f'  "{event}" [shape=circle];')
    for gid, _, children in tree.gates:
        for child in children:
            lines.append(f'  "{gid}" -> "{child}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def adt_to_dot(tree: AttackDefenseTree) -> str:
    lines = [f'digraph "{_esc(tree.name)}" {{', "  rankdir=TB;"]

    def emit(path: str, node: AdtNode) -> None:
        label = _esc(node.label)
        if node.refinement is not Refinement.LEAF:
            label += f"\\n[{node.refinement.value}]"
        if node.impact is not None:
            label += f"\\nimpact: {node.impact.value}"
        color = "indianred" if node.actor.value == "attack" else "palegreen"
        shape = "box" if node.actor.value == "attack" else "ellipse"
        lines.append(
            f'  "{path}" [shape={shape}, style=filled, fillcolor={color}, '
            f'label="{label}"];'
        )
        for i, child in enumerate(node.children):
            child_path = f"{path}.{i}"
            emit(child_path, child)
            lines.append(f'  "{path}" -> "{child_path}";')
        if node.counter is not None:
            counter_path = f"{path}.c"
            emit(counter_path, node.counter)
            lines.append(f'  "{path}" -> "{counter_path}" [style=dotted];')

    emit("root", tree.root)
    lines.append("}")
    return "\n".join(lines) + "\n"
