"""Shared domain types for safety and security assurance models.

Everything here is an immutable value object.  Scalar types that feed the
confidence arithmetic (ConfidenceTriple) enforce their invariants at
construction time; structural types (GsnModel, FaultTree, ...) are built
leniently by the parser and checked by :mod:`safsec.validate`, which turns
invariant violations into located diagnostics instead of exceptions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional, Union

SUM_TOLERANCE = 1e-9


class GuideWord(Enum):
    """Controlled vocabulary bridging hazard mechanisms and attack verbs."""

    DISCLOSURE = "disclosure"
    DISCONNECTED = "disconnected"
    DELAY = "delay"
    DELETION = "deletion"
    STOPPING = "stopping"
    DENIAL = "denial"
    TRIGGER = "trigger"
    INSERTION = "insertion"
    RESET = "reset"
    MANIPULATION = "manipulation"


class Impact(Enum):
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"

    @property
    def rank(self) -> int:
        return {"low": 0, "medium": 1, "high": 2}[self.value]


class NodeKind(Enum):
    GOAL = "goal"
    STRATEGY = "strategy"
    SOLUTION = "solution"
    CONTEXT = "context"


class GateOp(Enum):
    AND = "AND"
    OR = "OR"


class FailureMode(Enum):
    LOSS_OF_FUNCTION = "loss_of_function"
    ERRONEOUS = "erroneous"
    UNINTENDED_ACTION = "unintended_action"
    PARTIAL_LOSS = "partial_loss"


class RequirementKind(Enum):
    SAFETY = "safety"
    SAFETY_DESIGN = "safety_design"
    SECURITY = "security"
    SECURITY_DESIGN = "security_design"


class Actor(Enum):
    ATTACK = "attack"
    DEFENSE = "defense"

    @property
    def opposite(self) -> "Actor":
        return Actor.DEFENSE if self is Actor.ATTACK else Actor.ATTACK


class Refinement(Enum):
    AND = "AND"
    OR = "OR"
    LEAF = "leaf"


@dataclass(frozen=True)
class ConfidenceTriple:
    """Belief/disbelief/uncertainty opinion; components sum to 1."""

    belief: float
    disbelief: float
    uncertainty: float

    def __post_init__(self) -> None:
        for name in ("belief", "disbelief", "uncertainty"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise TypeError(f"{name} must be a number, got {v!r}")
            if math.isnan(v) or not -SUM_TOLERANCE <= v <= 1 + SUM_TOLERANCE:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        total = self.belief + self.disbelief + self.uncertainty
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise ValueError(f"components must sum to 1, got {total}")

    def rounded(self, digits: int = 2) -> tuple[float, float, float]:
        return (
            round(self.belief, digits),
            round(self.disbelief, digits),
            round(self.uncertainty, digits),
        )


@dataclass(frozen=True)
class DefeaterCount:
    """Outruled defeaters out of the total identified for a goal."""

    outruled: int
    total: int

    @property
    def problems(self) -> list[str]:
        out = []
        if self.outruled < 0 or self.total < 0:
            out.append("defeater counts must be non-negative")
        if self.outruled > self.total:
            out.append(
                f"outruled defeaters ({self.outruled}) exceed total ({self.total})"
            )
        return out

    def __add__(self, other: "DefeaterCount") -> "DefeaterCount":
        return DefeaterCount(self.outruled + other.outruled, self.total + other.total)


@dataclass(frozen=True)
class HazardMeta:
    """Domain-specific hazard annotation on a goal."""

    impact: Impact
    mechanism: GuideWord
    trace: str


@dataclass(frozen=True)
class VoterMeta:
    """M-of-N voter mechanism annotation on a solution."""

    signals: tuple[str, ...]
    threshold: int
    trace: str

    @property
    def problems(self) -> list[str]:
        out = []
        if not self.signals:
            out.append("voter requires at least one signal")
        if self.threshold < 1:
            out.append("voter threshold must be positive")
        elif self.signals and self.threshold > len(self.signals):
            out.append(
                f"voter threshold ({self.threshold}) exceeds signal count "
                f"({len(self.signals)})"
            )
        return out


@dataclass(frozen=True)
class GsnNode:
    id: str
    kind: NodeKind
    text: str
    parent: Optional[str] = None
    defeaters: Optional[DefeaterCount] = None
    hazard: Optional[HazardMeta] = None
    voter: Optional[VoterMeta] = None
    fta_ref: Optional[str] = None
    fmea_ref: Optional[str] = None


@dataclass(frozen=True)
class SecurityLink:
    """Attachment of a security assessment (an ADT) to a goal, with weight."""

    goal_id: str
    adt_name: str
    weight: float


@dataclass(frozen=True)
class GsnModel:
    name: str
    nodes: tuple[GsnNode, ...]
    security_links: tuple[SecurityLink, ...] = ()

    def node(self, node_id: str) -> GsnNode:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)

    def has_node(self, node_id: str) -> bool:
        return any(n.id == node_id for n in self.nodes)

    def roots(self) -> list[GsnNode]:
        return [n for n in self.nodes if n.parent is None]

    def root(self) -> GsnNode:
        roots = self.roots()
        if len(roots) != 1:
            raise ValueError(f"model {self.name!r} has {len(roots)} roots")
        return roots[0]

    def children(self, node_id: str) -> list[GsnNode]:
        return [n for n in self.nodes if n.parent == node_id]

    def goals(self) -> list[GsnNode]:
        return [n for n in self.nodes if n.kind is NodeKind.GOAL]

    def links_for(self, goal_id: str) -> list[SecurityLink]:
        return [l for l in self.security_links if l.goal_id == goal_id]


@dataclass(frozen=True)
class FaultTree:
    name: str
    top: str
    gates: tuple[tuple[str, GateOp, tuple[str, ...]], ...]
    basic_events: frozenset[str]

    def gate(self, gate_id: str) -> Optional[tuple[GateOp, tuple[str, ...]]]:
        for gid, op, children in self.gates:
            if gid == gate_id:
                return op, children
        return None

    @property
    def gate_ids(self) -> set[str]:
        return {gid for gid, _, _ in self.gates}


@dataclass(frozen=True)
class FmeaRow:
    id: str
    function: str
    failure_mode: FailureMode
    severity: int
    occurrence: int
    detection: int
    effect: str = ""
    cause: str = ""

    @property
    def rpn(self) -> int:
        return self.severity * self.occurrence * self.detection

    @property
    def problems(self) -> list[str]:
        out = []
        for name in ("severity", "occurrence", "detection"):
            v = getattr(self, name)
            if not 1 <= v <= 10:
                out.append(f"{name} must be in 1..10, got {v}")
        return out


@dataclass(frozen=True)
class FmeaTable:
    name: str
    rows: tuple[FmeaRow, ...]


@dataclass(frozen=True)
class AdtNode:
    actor: Actor
    label: str
    refinement: Refinement = Refinement.LEAF
    children: tuple["AdtNode", ...] = ()
    counter: Optional["AdtNode"] = None
    attributes: tuple[tuple[str, float], ...] = ()
    impact: Optional[Impact] = None

    def attribute(self, name: str) -> Optional[float]:
        for key, value in self.attributes:
            if key == name:
                return value
        return None


@dataclass(frozen=True)
class AttackDefenseTree:
    name: str
    root: AdtNode

    def walk(self) -> Iterator[tuple[str, AdtNode]]:
        """Yield (path, node) pairs in preorder; counters get suffix ``.c``."""

        def rec(path: str, node: AdtNode) -> Iterator[tuple[str, AdtNode]]:
            yield path, node
            for i, child in enumerate(node.children):
                yield from rec(f"{path}.{i}", child)
            if node.counter is not None:
                yield from rec(f"{path}.c", node.counter)

        return rec("root", self.root)

    def find_by_label(self, label: str) -> Optional[str]:
        for path, node in self.walk():
            if node.label == label:
                return path
        return None


@dataclass(frozen=True)
class Literal:
    """Signed signal reference; ``positive=False`` means classical negation."""

    signal: str
    positive: bool = True

    def negated(self) -> "Literal":
        return Literal(self.signal, not self.positive)

    def __str__(self) -> str:
        return self.signal if self.positive else f"!{self.signal}"


@dataclass(frozen=True)
class Clause:
    """Implication clause: conjunction of body literals entails the head."""

    body: tuple[Literal, ...]
    head: Literal

    def signals(self) -> set[str]:
        return {lit.signal for lit in self.body} | {self.head.signal}

    def __str__(self) -> str:
        if not self.body:
            return f"=> {self.head}"
        return " & ".join(map(str, self.body)) + f" => {self.head}"


@dataclass(frozen=True)
class Requirement:
    id: str
    kind: RequirementKind
    trace: str
    clauses: tuple[Clause, ...] = ()
    inputs: frozenset[str] = frozenset()
    meta: Union[HazardMeta, VoterMeta, None] = None

    def head_signals(self) -> set[str]:
        return {c.head.signal for c in self.clauses}

    def all_signals(self) -> set[str]:
        out: set[str] = set(self.inputs)
        for c in self.clauses:
            out |= c.signals()
        return out


@dataclass(frozen=True)
class Thresholds:
    min_belief: float
    max_disbelief: float
    max_uncertainty: float

    def met_by(self, triple: ConfidenceTriple) -> bool:
        return (
            triple.belief >= self.min_belief
            and triple.disbelief <= self.max_disbelief
            and triple.uncertainty <= self.max_uncertainty
        )


@dataclass(frozen=True)
class SetPolicyAction:
    """Switch the verdict policy used for the scenario's ADT."""

    unassessed: bool = False
    attribute: str = ""
    op: str = "<="
    threshold: float = 0.0


@dataclass(frozen=True)
class AddCounterAction:
    """Attach a countermeasure node under the ADT node with the given label."""

    at_label: str
    node: AdtNode


@dataclass(frozen=True)
class SetDefeatersAction:
    """Revise a goal's defeater evidence counts."""

    goal_id: str
    outruled: int
    total: int


ScenarioAction = Union[SetPolicyAction, AddCounterAction, SetDefeatersAction]


@dataclass(frozen=True)
class Scenario:
    name: str
    gsn_name: str
    adt_name: str
    thresholds: Thresholds
    max_rounds: int
    actions: tuple[ScenarioAction, ...]


Block = Union[GsnModel, AttackDefenseTree, FaultTree, FmeaTable, Requirement, Scenario]


@dataclass(frozen=True)
class Document:
    """All blocks of one model file, in declaration order."""

    blocks: tuple[Block, ...] = ()

    def _by_name(self, cls) -> dict:
        out = {}
        for b in self.blocks:
            if isinstance(b, cls):
                key = b.id if isinstance(b, Requirement) else b.name
                out[key] = b
        return out

    @property
    def gsns(self) -> dict[str, GsnModel]:
        return self._by_name(GsnModel)

    @property
    def adts(self) -> dict[str, AttackDefenseTree]:
        return self._by_name(AttackDefenseTree)

    @property
    def ftas(self) -> dict[str, FaultTree]:
        return self._by_name(FaultTree)

    @property
    def fmeas(self) -> dict[str, FmeaTable]:
        return self._by_name(FmeaTable)

    @property
    def requirements(self) -> dict[str, Requirement]:
        return self._by_name(Requirement)

    @property
    def scenarios(self) -> dict[str, Scenario]:
        return self._by_name(Scenario)

    def replace_block(self, old: Block, new: Block) -> "Document":
        return Document(tuple(new if b is old else b for b in self.blocks))


@dataclass(frozen=True)
class Diagnostic:
    message: str
    severity: str = "error"  # "error" | "warning"
    line: Optional[int] = None
    column: Optional[int] = None
    context: str = ""

    def __str__(self) -> str:
        loc = f"{self.line}:{self.column}: " if self.line is not None else ""
        ctx = f" [{self.context}]" if self.context else ""
        return f"{loc}{self.severity}: {self.message}{ctx}"


def sort_key(diag: Diagnostic) -> tuple:
    return (
        diag.line if diag.line is not None else -1,
        diag.column if diag.column is not None else -1,
        diag.severity,
        diag.message,
        diag.context,
    )
