"""Structural validation of parsed documents.

Turns every type invariant into a diagnostic rather than an exception, so a
single pass reports all problems.  The result is sorted, which makes it
independent of declaration order.
"""

from __future__ import annotations

from typing import Optional

from .model import (
    AdtNode,
    AttackDefenseTree,
    Diagnostic,
    Document,
    FaultTree,
    FmeaTable,
    GsnModel,
    NodeKind,
    Refinement,
    Requirement,
    Scenario,
    sort_key,
)


def validate_model(
    document: Document, components: Optional[set[str]] = None
) -> list[Diagnostic]:
    """Check every invariant; empty list means the document is well formed.

    ``components``, when given, switches on strict trace checking: every
    ``trace=`` token must name a declared component.  By default traces are
    free-form tokens declared implicitly by first use.
    """
    diags: list[Diagnostic] = []
    for block in document.blocks:
        if isinstance(block, GsnModel):
            diags.extend(_check_gsn(block, document))
        elif isinstance(block, FaultTree):
            diags.extend(_check_fta(block))
        elif isinstance(block, FmeaTable):
            diags.extend(_check_fmea(block))
        elif isinstance(block, AttackDefenseTree):
            diags.extend(_check_adt(block))
        elif isinstance(block, Requirement):
            diags.extend(_check_requirement(block))
        elif isinstance(block, Scenario):
            diags.extend(_check_scenario(block, document))
    if components is not None:
        diags.extend(_check_traces(document, components))
    return sorted(diags, key=sort_key)


def _err(message: str, context: str) -> Diagnostic:
    return Diagnostic(message, severity="error", context=context)


def _check_gsn(model: GsnModel, document: Document) -> list[Diagnostic]:
    ctx = f"gsn {model.name}"
    diags: list[Diagnostic] = []
    ids = [n.id for n in model.nodes]
    for dup in sorted({i for i in ids if ids.count(i) > 1}):
        diags.append(_err(f"duplicate node id {dup!r}", ctx))

    roots = model.roots()
    if not model.nodes:
        diags.append(_err("model has no nodes", ctx))
    elif not roots:
        diags.append(_err("no root node (every node has a parent)", ctx))
    elif len(roots) > 1:
        names = ", ".join(sorted(n.id for n in roots))
        diags.append(_err(f"multiple roots: {names}", ctx))

    known = set(ids)
    for node in model.nodes:
        nctx = f"{ctx}/{node.id}"
        if node.parent is not None and node.parent not in known:
            diags.append(_err(f"unknown parent node {node.parent!r}", nctx))
        if node.kind is not NodeKind.GOAL:
            if node.defeaters is not None:
                diags.append(_err("defeater counts allowed only on goals", nctx))
            if node.hazard is not None:
                diags.append(_err("hazard meta-data allowed only on goals", nctx))
        if node.kind is not NodeKind.SOLUTION:
            for attr in ("voter", "fta_ref", "fmea_ref"):
                if getattr(node, attr) is not None:
                    diags.append(
                        _err(f"{attr} annotation allowed only on solutions", nctx)
                    )
        if node.defeaters is not None:
            for p in node.defeaters.problems:
                diags.append(_err(p, nctx))
        if node.voter is not None:
            for p in node.voter.problems:
                diags.append(_err(p, nctx))
        if node.fta_ref is not None and node.fta_ref not in document.ftas:
            diags.append(_err(f"unresolved fta_ref {node.fta_ref!r}", nctx))
        if node.fmea_ref is not None and node.fmea_ref not in document.fmeas:
            diags.append(_err(f"unresolved fmea_ref {node.fmea_ref!r}", nctx))

    # Cycle check over parent pointers: every node must reach a root.
    for node in model.nodes:
        seen = set()
        cur: Optional[str] = node.id
        while cur is not None and cur in known:
            if cur in seen:
                diags.append(_err(f"cycle through node {node.id!r}", ctx))
                break
            seen.add(cur)
            cur = model.node(cur).parent

    goal_ids = {n.id for n in model.goals()}
    linked: set[str] = set()
    for link in model.security_links:
        lctx = f"{ctx}/security_link {link.adt_name!r}"
        if link.goal_id not in known:
            diags.append(_err(f"unknown goal {link.goal_id!r}", lctx))
        elif link.goal_id not in goal_ids:
            diags.append(_err(f"security link target {link.goal_id!r} is not a goal", lctx))
        if link.weight < 0:
            diags.append(_err(f"negative weight {link.weight}", lctx))
        if link.goal_id in linked:
            diags.append(_err(f"multiple security links on goal {link.goal_id!r}", lctx))
        linked.add(link.goal_id)
    return diags


def _check_fta(tree: FaultTree) -> list[Diagnostic]:
    ctx = f"fta {tree.name}"
    diags: list[Diagnostic] = []
    gate_ids = [gid for gid, _, _ in tree.gates]
    for dup in sorted({g for g in gate_ids if gate_ids.count(g) > 1}):
        diags.append(_err(f"duplicate gate {dup!r}", ctx))
    for clash in sorted(set(gate_ids) & tree.basic_events):
        diags.append(_err(f"{clash!r} declared both gate and basic event", ctx))

    declared = set(gate_ids) | tree.basic_events
    if tree.top not in declared:
        diags.append(_err(f"top event {tree.top!r} not declared", ctx))
    for gid, _, children in tree.gates:
        for child in children:
            if child not in declared:
                diags.append(_err(f"gate {gid!r} references unknown node {child!r}", ctx))

    # Cycle detection by DFS from each gate.
    def has_cycle(start: str) -> bool:
        stack, on_path = [(start, iter(tree.gate(start)[1] if tree.gate(start) else ()))], {start}
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                on_path.discard(node)
                continue
            if nxt in on_path:
                return True
            gate = tree.gate(nxt)
            if gate is not None:
                stack.append((nxt, iter(gate[1])))
                on_path.add(nxt)
        return False

    cyclic = any(has_cycle(gid) for gid in gate_ids)
    if cyclic:
        diags.append(_err("fault tree contains a cycle", ctx))
        return diags

    # Reachability from the top event; unreachable declarations are rejected.
    reachable: set[str] = set()
    frontier = [tree.top]
    while frontier:
        cur = frontier.pop()
        if cur in reachable:
            continue
        reachable.add(cur)
        gate = tree.gate(cur)
        if gate is not None:
            frontier.extend(gate[1])
    for orphan in sorted(declared - reachable):
        diags.append(_err(f"node {orphan!r} unreachable from top event", ctx))
    return diags


def _check_fmea(table: FmeaTable) -> list[Diagnostic]:
    ctx = f"fmea {table.name}"
    diags: list[Diagnostic] = []
    ids = [r.id for r in table.rows]
    for dup in sorted({i for i in ids if ids.count(i) > 1}):
        diags.append(_err(f"duplicate row id {dup!r}", ctx))
    for row in table.rows:
        for p in row.problems:
            diags.append(_err(p, f"{ctx}/{row.id}"))
    return diags


def _check_adt_node(node: AdtNode, ctx: str, diags: list[Diagnostic]) -> None:
    if node.children and node.refinement is Refinement.LEAF:
        diags.append(_err(f"node {node.label!r} has children but no AND/OR refinement", ctx))
    if not node.children and node.refinement is not Refinement.LEAF:
        diags.append(
            _err(f"{node.refinement.value} node {node.label!r} has no children", ctx)
        )
    for child in node.children:
        if child.actor is not node.actor:
            diags.append(
                _err(
                    f"refinement child {child.label!r} of {node.label!r} "
                    f"has mismatching actor",
                    ctx,
                )
            )
        _check_adt_node(child, ctx, diags)
    if node.counter is not None:
        if node.counter.actor is not node.actor.opposite:
            diags.append(
                _err(f"countermeasure of {node.label!r} must have opposite actor", ctx)
            )
        _check_adt_node(node.counter, ctx, diags)
    keys = [k for k, _ in node.attributes]
    for dup in sorted({k for k in keys if keys.count(k) > 1}):
        diags.append(_err(f"duplicate attribute {dup!r} on {node.label!r}", ctx))


def _check_adt(tree: AttackDefenseTree) -> list[Diagnostic]:
    diags: list[Diagnostic] = []
    _check_adt_node(tree.root, f"adt {tree.name}", diags)
    return diags


def _check_requirement(req: Requirement) -> list[Diagnostic]:
    ctx = f"requirement {req.id}"
    diags: list[Diagnostic] = []
    heads = req.head_signals()
    for clause in req.clauses:
        for lit in clause.body:
            if lit.signal not in req.inputs and lit.signal not in heads:
                diags.append(
                    _err(
                        f"signal {lit.signal!r} neither declared input nor derived",
                        ctx,
                    )
                )
    if req.meta is not None and hasattr(req.meta, "problems"):
        for p in req.meta.problems:
            diags.append(_err(p, ctx))
    return diags


def _check_scenario(scenario: Scenario, document: Document) -> list[Diagnostic]:
    ctx = f"scenario {scenario.name}"
    diags: list[Diagnostic] = []
    t = scenario.thresholds
    for name, v in (
        ("min_belief", t.min_belief),
        ("max_disbelief", t.max_disbelief),
        ("max_uncertainty", t.max_uncertainty),
    ):
        if not 0.0 <= v <= 1.0:
            diags.append(_err(f"threshold {name} must be in [0, 1], got {v}", ctx))
    if scenario.max_rounds < 1:
        diags.append(_err("max_rounds must be positive", ctx))
    if not scenario.actions:
        diags.append(_err("scenario has no rounds", ctx))
    if scenario.gsn_name not in document.gsns:
        diags.append(_err(f"unknown gsn model {scenario.gsn_name!r}", ctx))
    if scenario.adt_name not in document.adts:
        diags.append(_err(f"unknown adt {scenario.adt_name!r}", ctx))
    return diags


def _check_traces(document: Document, components: set[str]) -> list[Diagnostic]:
    diags: list[Diagnostic] = []
    for model in document.gsns.values():
        for node in model.nodes:
            for meta in (node.hazard, node.voter):
                if meta is not None and meta.trace not in components:
                    diags.append(
                        _err(
                            f"undeclared component {meta.trace!r}",
                            f"gsn {model.name}/{node.id}",
                        )
                    )
    for req in document.requirements.values():
        if req.trace not in components:
            diags.append(
                _err(f"undeclared component {req.trace!r}", f"requirement {req.id}")
            )
    return sorted(diags, key=sort_key)
