"""Recursive-descent parser for the ``.ssm`` model format.

Diagnostics carry line/column of the offending token.  Parsing aborts after
20 errors.  Syntax errors inside a block skip ahead to the next top-level
block keyword so that independent blocks still get checked.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..model import (
    Actor,
    AddCounterAction,
    AdtNode,
    AttackDefenseTree,
    Clause,
    DefeaterCount,
    Diagnostic,
    Document,
    FailureMode,
    FaultTree,
    FmeaRow,
    FmeaTable,
    GateOp,
    GsnModel,
    GsnNode,
    GuideWord,
    HazardMeta,
    Impact,
    Literal,
    NodeKind,
    Refinement,
    Requirement,
    RequirementKind,
    Scenario,
    ScenarioAction,
    SecurityLink,
    SetDefeatersAction,
    SetPolicyAction,
    Thresholds,
    VoterMeta,
)
from .lexer import LexError, Token, tokenize

MAX_ERRORS = 20
BLOCK_KEYWORDS = {"gsn", "adt", "fta", "fmea", "requirement", "scenario"}


@dataclass
class ParseResult:
    document: Optional[Document]
    diagnostics: list[Diagnostic]

    @property
    def ok(self) -> bool:
        return self.document is not None


class _Abort(Exception):
    pass


class _SyntaxError(Exception):
    def __init__(self, message: str, token: Token):
        super().__init__(message)
        self.message = message
        self.token = token


class Parser:
    def __init__(self, text: str):
        self.diagnostics: list[Diagnostic] = []
        try:
            self.tokens = list(tokenize(text))
        except LexError as exc:
            self.tokens = [Token("EOF", "", exc.line, exc.column)]
            self._record(exc.message, exc.line, exc.column)
        self.pos = 0

    # --- token utilities -------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def at_ident(self, *words: str) -> bool:
        tok = self.peek()
        return tok.kind == "IDENT" and tok.value in words

    def expect(self, kind: str, value: Optional[str] = None) -> Token:
        tok = self.peek()
        if tok.kind != kind or (value is not None and tok.value != value):
            want = value if value is not None else kind
            raise _SyntaxError(f"expected {want!r}, got {tok.value or tok.kind!r}", tok)
        return self.advance()

    def expect_ident(self, *values: str) -> Token:
        tok = self.peek()
        if tok.kind != "IDENT" or (values and tok.value not in values):
            want = " or ".join(repr(v) for v in values) if values else "identifier"
            raise _SyntaxError(f"expected {want}, got {tok.value or tok.kind!r}", tok)
        return self.advance()

    def expect_string(self) -> str:
        return self.expect("STRING").value

    def expect_int(self) -> int:
        return int(self.expect("INT").value)

    def expect_num(self) -> float:
        tok = self.peek()
        if tok.kind not in ("INT", "FLOAT"):
            raise _SyntaxError(f"expected number, got {tok.value or tok.kind!r}", tok)
        self.advance()
        return float(tok.value)

    def expect_punct(self, value: str) -> Token:
        tok = self.peek()
        if tok.kind != "PUNCT" or tok.value != value:
            raise _SyntaxError(f"expected {value!r}, got {tok.value or tok.kind!r}", tok)
        return self.advance()

    def expect_kv_ident(self, key: str) -> Token:
        self.expect_ident(key)
        self.expect_punct("=")
        return self.expect("IDENT")

    def _record(self, message: str, line: int, column: int) -> None:
        self.diagnostics.append(
            Diagnostic(message, severity="error", line=line, column=column)
        )
        if len(self.diagnostics) >= MAX_ERRORS:
            raise _Abort()

    def _record_at(self, message: str, tok: Token) -> None:
        self._record(message, tok.line, tok.column)

    def _skip_to_next_block(self) -> None:
        depth = 0
        while True:
            tok = self.peek()
            if tok.kind == "EOF":
                return
            if tok.kind == "PUNCT" and tok.value == "{":
                depth += 1
            elif tok.kind == "PUNCT" and tok.value == "}":
                depth = max(0, depth - 1)
            elif (
                tok.kind == "IDENT"
                and tok.value in BLOCK_KEYWORDS
                and depth == 0
            ):
                return
            self.advance()

    # --- enum helpers ----------------------------------------------------

    def _enum(self, enum_cls, tok: Token, what: str):
        try:
            return enum_cls(tok.value)
        except ValueError:
            options = ", ".join(e.value for e in enum_cls)
            raise _SyntaxError(f"unknown {what} {tok.value!r} (one of: {options})", tok)

    # --- entry point -----------------------------------------------------

    def parse(self) -> ParseResult:
        blocks: list = []
        try:
            while self.peek().kind != "EOF":
                tok = self.peek()
                if not (tok.kind == "IDENT" and tok.value in BLOCK_KEYWORDS):
                    self._record_at(
                        f"expected block keyword (gsn, adt, fta, fmea, requirement, "
                        f"scenario), got {tok.value or tok.kind!r}",
                        tok,
                    )
                    self.advance()
                    self._skip_to_next_block()
                    continue
                try:
                    block = getattr(self, f"_parse_{tok.value}")()
                    blocks.append(block)
                except _SyntaxError as exc:
                    self._record_at(exc.message, exc.token)
                    self._skip_to_next_block()
        except _Abort:
            self.diagnostics.append(
                Diagnostic("too many errors, giving up", severity="error")
            )
        errors = [d for d in self.diagnostics if d.severity == "error"]
        document = Document(tuple(blocks)) if not errors else None
        return ParseResult(document, self.diagnostics)

    # --- blocks ----------------------------------------------------------

    def _parse_gsn(self) -> GsnModel:
        self.expect_ident("gsn")
        name = self.expect_string()
        self.expect_punct("{")
        nodes: list[GsnNode] = []
        links: list[SecurityLink] = []
        under_refs: list[tuple[str, Token]] = []
        while not (self.peek().kind == "PUNCT" and self.peek().value == "}"):
            if self.at_ident("goal", "strategy", "solution", "context"):
                node, under_tok = self._parse_gsn_node()
                nodes.append(node)
                if under_tok is not None:
                    under_refs.append((node.id, under_tok))
            elif self.at_ident("security_link"):
                links.append(self._parse_security_link())
            else:
                raise _SyntaxError(
                    f"expected gsn node or security_link, got "
                    f"{self.peek().value or self.peek().kind!r}",
                    self.peek(),
                )
        self.expect_punct("}")
        known = {n.id for n in nodes}
        for node_id, tok in under_refs:
            if tok.value not in known:
                self._record_at(
                    f"node {node_id!r} refers to undefined node {tok.value!r}", tok
                )
        return GsnModel(name=name, nodes=tuple(nodes), security_links=tuple(links))

    def _parse_gsn_node(self) -> tuple[GsnNode, Optional[Token]]:
        kind = NodeKind(self.expect_ident().value)
        node_id = self.expect("IDENT").value
        text = self.expect_string()
        parent = None
        under_tok = None
        if self.at_ident("under"):
            self.advance()
            under_tok = self.expect("IDENT")
            parent = under_tok.value
        defeaters = hazard = voter = fta_ref = fmea_ref = None
        if self.peek().kind == "PUNCT" and self.peek().value == "{":
            self.advance()
            while not (self.peek().kind == "PUNCT" and self.peek().value == "}"):
                attr = self.expect("IDENT")
                if attr.value == "defeaters":
                    self.expect_ident("outruled")
                    self.expect_punct("=")
                    outruled = self.expect_int()
                    self.expect_ident("total")
                    self.expect_punct("=")
                    total = self.expect_int()
                    defeaters = DefeaterCount(outruled, total)
                elif attr.value == "hazard":
                    impact = self._enum(
                        Impact, self.expect_kv_ident("impact"), "impact level"
                    )
                    mech = self._enum(
                        GuideWord, self.expect_kv_ident("mechanism"), "guide word"
                    )
                    trace = self.expect_kv_ident("trace").value
                    hazard = HazardMeta(impact=impact, mechanism=mech, trace=trace)
                elif attr.value == "voter":
                    self.expect_ident("signals")
                    self.expect_punct("=")
                    signals = self._parse_id_list()
                    self.expect_ident("threshold")
                    self.expect_punct("=")
                    threshold = self.expect_int()
                    trace = self.expect_kv_ident("trace").value
                    voter = VoterMeta(
                        signals=tuple(signals), threshold=threshold, trace=trace
                    )
                elif attr.value == "fta_ref":
                    self.expect_punct("=")
                    fta_ref = self.expect_string()
                elif attr.value == "fmea_ref":
                    self.expect_punct("=")
                    fmea_ref = self.expect_string()
                else:
                    raise _SyntaxError(
                        f"unknown node attribute {attr.value!r}", attr
                    )
            self.expect_punct("}")
        node = GsnNode(
            id=node_id,
            kind=kind,
            text=text,
            parent=parent,
            defeaters=defeaters,
            hazard=hazard,
            voter=voter,
            fta_ref=fta_ref,
            fmea_ref=fmea_ref,
        )
        return node, under_tok

    def _parse_security_link(self) -> SecurityLink:
        self.expect_ident("security_link")
        self.expect_ident("under")
        goal_id = self.expect("IDENT").value
        self.expect_ident("adt")
        self.expect_punct("=")
        adt_name = self.expect_string()
        self.expect_ident("weight")
        self.expect_punct("=")
        weight = self.expect_num()
        return SecurityLink(goal_id=goal_id, adt_name=adt_name, weight=weight)

    def _parse_id_list(self) -> list[str]:
        self.expect_punct("[")
        ids = [self.expect("IDENT").value]
        while self.peek().kind == "PUNCT" and self.peek().value == ",":
            self.advance()
            ids.append(self.expect("IDENT").value)
        self.expect_punct("]")
        return ids

    def _parse_fta(self) -> FaultTree:
        self.expect_ident("fta")
        name = self.expect_string()
        self.expect_punct("{")
        self.expect_ident("top")
        top_tok = self.expect("IDENT")
        gates: list[tuple[str, GateOp, tuple[str, ...]]] = []
        events: list[str] = []
        child_refs: list[Token] = []
        while not (self.peek().kind == "PUNCT" and self.peek().value == "}"):
            if self.at_ident("gate"):
                self.advance()
                gate_id = self.expect("IDENT").value
                op = GateOp(self.expect_ident("AND", "OR").value)
                self.expect_punct("[")
                child_tokens = [self.expect("IDENT")]
                while self.peek().kind == "PUNCT" and self.peek().value == ",":
                    self.advance()
                    child_tokens.append(self.expect("IDENT"))
                self.expect_punct("]")
                child_refs.extend(child_tokens)
                gates.append((gate_id, op, tuple(t.value for t in child_tokens)))
            elif self.at_ident("event"):
                self.advance()
                events.append(self.expect("IDENT").value)
            else:
                raise _SyntaxError(
                    f"expected gate or event, got {self.peek().value or self.peek().kind!r}",
                    self.peek(),
                )
        self.expect_punct("}")
        declared = {g for g, _, _ in gates} | set(events)
        if top_tok.value not in declared:
            self._record_at(f"top event {top_tok.value!r} not declared", top_tok)
        for tok in child_refs:
            if tok.value not in declared:
                self._record_at(f"undefined node {tok.value!r}", tok)
        return FaultTree(
            name=name,
            top=top_tok.value,
            gates=tuple(gates),
            basic_events=frozenset(events),
        )

    def _parse_fmea(self) -> FmeaTable:
        self.expect_ident("fmea")
        name = self.expect_string()
        self.expect_punct("{")
        rows: list[FmeaRow] = []
        while self.at_ident("row"):
            self.advance()
            row_id = self.expect("IDENT").value
            self.expect_ident("function")
            self.expect_punct("=")
            function = self.expect_string()
            mode = self._enum(
                FailureMode, self.expect_kv_ident("mode"), "failure mode"
            )
            self.expect_ident("severity")
            self.expect_punct("=")
            severity = self.expect_int()
            self.expect_ident("occurrence")
            self.expect_punct("=")
            occurrence = self.expect_int()
            self.expect_ident("detection")
            self.expect_punct("=")
            detection = self.expect_int()
            effect = cause = ""
            if self.at_ident("effect"):
                self.advance()
                self.expect_punct("=")
                effect = self.expect_string()
            if self.at_ident("cause"):
                self.advance()
                self.expect_punct("=")
                cause = self.expect_string()
            rows.append(
                FmeaRow(
                    id=row_id,
                    function=function,
                    failure_mode=mode,
                    severity=severity,
                    occurrence=occurrence,
                    detection=detection,
                    effect=effect,
                    cause=cause,
                )
            )
        self.expect_punct("}")
        return FmeaTable(name=name, rows=tuple(rows))

    def _parse_requirement(self) -> Requirement:
        self.expect_ident("requirement")
        req_id = self.expect("IDENT").value
        kind = self._enum(
            RequirementKind, self.expect_kv_ident("kind"), "requirement kind"
        )
        trace = self.expect_kv_ident("trace").value
        self.expect_punct("{")
        inputs: list[str] = []
        if self.at_ident("inputs"):
            self.advance()
            self.expect_punct("=")
            inputs = self._parse_id_list()
        clauses: list[Clause] = []
        while self.at_ident("clause"):
            self.advance()
            body: list[Literal] = []
            if self.peek().kind != "ARROW":
                body.append(self._parse_literal())
                while self.peek().kind == "PUNCT" and self.peek().value == "&":
                    self.advance()
                    body.append(self._parse_literal())
            self.expect("ARROW")
            head = self._parse_literal()
            clauses.append(Clause(body=tuple(body), head=head))
        self.expect_punct("}")
        return Requirement(
            id=req_id,
            kind=kind,
            trace=trace,
            clauses=tuple(clauses),
            inputs=frozenset(inputs),
        )

    def _parse_literal(self) -> Literal:
        positive = True
        if self.peek().kind == "PUNCT" and self.peek().value == "!":
            self.advance()
            positive = False
        return Literal(signal=self.expect("IDENT").value, positive=positive)

    def _parse_adt(self) -> AttackDefenseTree:
        self.expect_ident("adt")
        name = self.expect_string()
        self.expect_punct("{")
        root = self._parse_adt_node()
        self.expect_punct("}")
        return AttackDefenseTree(name=name, root=root)

    def _parse_adt_node(self) -> AdtNode:
        actor = Actor(self.expect_ident("attack", "defense").value)
        refinement = Refinement.LEAF
        if self.at_ident("AND", "OR"):
            refinement = Refinement(self.advance().value)
        label = self.expect_string()
        children: list[AdtNode] = []
        counter: Optional[AdtNode] = None
        attributes: list[tuple[str, float]] = []
        impact: Optional[Impact] = None
        if self.peek().kind == "PUNCT" and self.peek().value == "{":
            self.advance()
            while not (self.peek().kind == "PUNCT" and self.peek().value == "}"):
                if self.at_ident("attack", "defense"):
                    children.append(self._parse_adt_node())
                elif self.at_ident("counter"):
                    tok = self.advance()
                    if counter is not None:
                        raise _SyntaxError(
                            "at most one countermeasure per node", tok
                        )
                    counter = self._parse_adt_node()
                elif self.at_ident("attr"):
                    self.advance()
                    key = self.expect("IDENT").value
                    self.expect_punct("=")
                    attributes.append((key, self.expect_num()))
                elif self.at_ident("impact"):
                    self.advance()
                    self.expect_punct("=")
                    impact = self._enum(Impact, self.expect("IDENT"), "impact level")
                else:
                    raise _SyntaxError(
                        f"expected adt item, got {self.peek().value or self.peek().kind!r}",
                        self.peek(),
                    )
            self.expect_punct("}")
        return AdtNode(
            actor=actor,
            label=label,
            refinement=refinement,
            children=tuple(children),
            counter=counter,
            attributes=tuple(attributes),
            impact=impact,
        )

    def _parse_scenario(self) -> Scenario:
        self.expect_ident("scenario")
        name = self.expect_string()
        self.expect_punct("{")
        self.expect_ident("gsn")
        self.expect_punct("=")
        gsn_name = self.expect_string()
        self.expect_ident("adt")
        self.expect_punct("=")
        adt_name = self.expect_string()
        self.expect_ident("thresholds")
        self.expect_ident("min_belief")
        self.expect_punct("=")
        min_belief = self.expect_num()
        self.expect_ident("max_disbelief")
        self.expect_punct("=")
        max_disbelief = self.expect_num()
        self.expect_ident("max_uncertainty")
        self.expect_punct("=")
        max_uncertainty = self.expect_num()
        self.expect_ident("max_rounds")
        self.expect_punct("=")
        max_rounds = self.expect_int()
        actions: list[ScenarioAction] = []
        while not (self.peek().kind == "PUNCT" and self.peek().value == "}"):
            actions.append(self._parse_action())
        self.expect_punct("}")
        return Scenario(
            name=name,
            gsn_name=gsn_name,
            adt_name=adt_name,
            thresholds=Thresholds(min_belief, max_disbelief, max_uncertainty),
            max_rounds=max_rounds,
            actions=tuple(actions),
        )

    def _parse_action(self) -> ScenarioAction:
        tok = self.expect_ident("set_policy", "add_counter", "set_defeaters")
        if tok.value == "set_policy":
            if self.at_ident("unassessed"):
                self.advance()
                return SetPolicyAction(unassessed=True)
            attribute = self.expect_kv_ident("attribute").value
            self.expect_ident("op")
            self.expect_punct("=")
            op_tok = self.expect("STRING")
            if op_tok.value not in ("<=", ">="):
                raise _SyntaxError(
                    f"op must be \"<=\" or \">=\", got {op_tok.value!r}", op_tok
                )
            self.expect_ident("threshold")
            self.expect_punct("=")
            threshold = self.expect_num()
            return SetPolicyAction(
                attribute=attribute, op=op_tok.value, threshold=threshold
            )
        if tok.value == "add_counter":
            self.expect_ident("at")
            self.expect_punct("=")
            at_label = self.expect_string()
            node = self._parse_adt_node()
            return AddCounterAction(at_label=at_label, node=node)
        self.expect_ident("goal")
        self.expect_punct("=")
        goal_id = self.expect("IDENT").value
        self.expect_ident("outruled")
        self.expect_punct("=")
        outruled = self.expect_int()
        self.expect_ident("total")
        self.expect_punct("=")
        total = self.expect_int()
        return SetDefeatersAction(goal_id=goal_id, outruled=outruled, total=total)


def parse(text: str) -> ParseResult:
    return Parser(text).parse()
