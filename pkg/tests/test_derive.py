from math import comb

import pytest

from safsec.derive import (
    DerivationError,
    derive_adt,
    fmea_attack_subtree,
    fta_attack_subtree,
    severity_to_impact,
    voter_attack_subtree,
)
from safsec.model import (
    Actor,
    DefeaterCount,
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
    NodeKind,
    Refinement,
    VoterMeta,
)

GOAL, SOLUTION, STRATEGY = NodeKind.GOAL, NodeKind.SOLUTION, NodeKind.STRATEGY


def voter(*signals, threshold):
    return VoterMeta(signals=tuple(signals), threshold=threshold, trace="V")


class TestVoterSubtree:
    def test_2_of_2_trigger(self):
        frag = voter_attack_subtree(voter("Gyro", "Crash", threshold=2), GuideWord.TRIGGER)
        assert frag.refinement is Refinement.OR
        labels = [c.label for c in frag.children]
        assert labels == ["tamper voter V", "spoof Gyro, Crash"]
        spoof = frag.children[1]
        assert spoof.refinement is Refinement.AND
        assert [c.label for c in spoof.children] == ["spoof Gyro", "spoof Crash"]

    def test_1_of_2_trigger_has_plain_leaves(self):
        frag = voter_attack_subtree(voter("S1", "S2", threshold=1), GuideWord.TRIGGER)
        assert [c.label for c in frag.children] == [
            "tamper voter V",
            "spoof S1",
            "spoof S2",
        ]
        assert all(c.refinement is Refinement.LEAF for c in frag.children)

    def test_stopping_is_denial_of_service_leaf(self):
        frag = voter_attack_subtree(voter("S1", "S2", threshold=2), GuideWord.STOPPING)
        assert frag.refinement is Refinement.LEAF
        assert frag.label == "deny_service voter V"

    def test_other_guide_words_rejected(self):
        with pytest.raises(DerivationError):
            voter_attack_subtree(voter("S1", threshold=1), GuideWord.DISCLOSURE)

    @pytest.mark.parametrize("n,m", [(3, 2), (5, 3), (6, 1), (4, 4)])
    def test_subset_count(self, n, m):
        meta = voter(*(f"S{i}" for i in range(n)), threshold=m)
        frag = voter_attack_subtree(meta, GuideWord.TRIGGER)
        # One tamper leaf plus C(n, m) subset fragments.
        assert len(frag.children) == 1 + comb(n, m)

    def test_signal_bound(self):
        meta = voter(*(f"S{i}" for i in range(13)), threshold=2)
        with pytest.raises(DerivationError, match="bound"):
            voter_attack_subtree(meta, GuideWord.TRIGGER)


class TestFtaSubtree:
    def test_single_cut_set_becomes_and(self):
        t = FaultTree(
            name="F",
            top="Y",
            gates=(("Y", GateOp.AND, ("B", "C")),),
            basic_events=frozenset("BC"),
        )
        frag = fta_attack_subtree(t)
        assert frag.refinement is Refinement.AND
        assert [c.label for c in frag.children] == ["trigger B", "trigger C"]

    def test_multiple_cut_sets_or_over_ands(self):
        t = FaultTree(
            name="F",
            top="Y",
            gates=(("Y", GateOp.OR, ("A", "BC")), ("BC", GateOp.AND, ("B", "C"))),
            basic_events=frozenset("ABC"),
        )
        frag = fta_attack_subtree(t)
        assert frag.refinement is Refinement.OR
        assert [c.label for c in frag.children] == ["trigger A", "trigger B, C"]


class TestFmeaSubtree:
    def test_loss_of_function(self):
        table = FmeaTable(
            name="T",
            rows=(
                FmeaRow(
                    id="r1",
                    function="brake",
                    failure_mode=FailureMode.LOSS_OF_FUNCTION,
                    severity=5,
                    occurrence=1,
                    detection=1,
                ),
            ),
        )
        (frag,) = fmea_attack_subtree(table)
        assert frag.refinement is Refinement.OR
        assert [c.label for c in frag.children] == [
            "deny_service brake",
            "tamper brake",
        ]
        assert frag.impact is Impact.MEDIUM

    def test_erroneous_high_severity(self):
        table = FmeaTable(
            name="T",
            rows=(
                FmeaRow(
                    id="r1",
                    function="steer",
                    failure_mode=FailureMode.ERRONEOUS,
                    severity=9,
                    occurrence=1,
                    detection=1,
                ),
            ),
        )
        (frag,) = fmea_attack_subtree(table)
        assert frag.refinement is Refinement.LEAF
        assert frag.label == "tamper steer"
        assert frag.impact is Impact.HIGH

    def test_empty_table(self):
        assert fmea_attack_subtree(FmeaTable(name="T", rows=())) == []

    @pytest.mark.parametrize(
        "severity,expected",
        [(1, Impact.LOW), (3, Impact.LOW), (4, Impact.MEDIUM), (7, Impact.MEDIUM), (8, Impact.HIGH), (10, Impact.HIGH)],
    )
    def test_severity_banding(self, severity, expected):
        assert severity_to_impact(severity) is expected


class TestDeriveAdt:
    def test_airbag_derivation(self, airbag_doc):
        model = airbag_doc.gsns["Airbag"]
        tree = derive_adt(model, airbag_doc.ftas, airbag_doc.fmeas)
        root = tree.root
        assert root.label == "Attack Airbag"
        assert root.refinement is Refinement.OR
        assert root.actor is Actor.ATTACK
        by_label = {c.label: c for c in root.children}
        assert set(by_label) == {"Stop Airbag", "Trigger Airbag"}

        stop = by_label["Stop Airbag"]
        assert stop.impact is Impact.LOW
        assert [c.label for c in stop.children] == ["deny_service voter Airbag"]

        trigger = by_label["Trigger Airbag"]
        assert trigger.impact is Impact.HIGH
        (defeat,) = trigger.children
        assert [c.label for c in defeat.children] == [
            "tamper voter Airbag",
            "spoof Gyroscope, CrashDetector",
        ]

    def test_voter_cross_cuts_all_branches(self, airbag_doc):
        # The voter hangs under the trigger hazard only, yet attacks on it
        # appear in both branches because it is traced to the same component.
        model = airbag_doc.gsns["Airbag"]
        tree = derive_adt(model)

        def labels(node):
            yield node.label
            for child in node.children:
                yield from labels(child)

        for branch in tree.root.children:
            assert any("voter Airbag" in l for l in labels(branch))

    def test_deterministic(self, airbag_doc):
        model = airbag_doc.gsns["Airbag"]
        assert derive_adt(model) == derive_adt(model)

    def test_hazard_without_solutions_becomes_leaf(self):
        model = GsnModel(
            name="Pump",
            nodes=(
                GsnNode(
                    "G1",
                    GOAL,
                    "no overpressure",
                    hazard=HazardMeta(Impact.HIGH, GuideWord.TRIGGER, "Pump"),
                ),
            ),
        )
        tree = derive_adt(model)
        (branch,) = tree.root.children
        assert branch.refinement is Refinement.LEAF
        assert branch.label == "Trigger Pump"
        assert branch.impact is Impact.HIGH

    def test_no_hazards_is_an_error(self):
        model = GsnModel(name="Empty", nodes=(GsnNode("G1", GOAL, "safe"),))
        with pytest.raises(DerivationError, match="nothing to derive"):
            derive_adt(model)

    def test_fta_solution_attaches_under_its_hazard(self):
        fault_tree = FaultTree(
            name="FT",
            top="Y",
            gates=(("Y", GateOp.AND, ("B", "C")),),
            basic_events=frozenset("BC"),
        )
        model = GsnModel(
            name="Item",
            nodes=(
                GsnNode("G0", GOAL, "root"),
                GsnNode(
                    "G1",
                    GOAL,
                    "hazard",
                    parent="G0",
                    hazard=HazardMeta(Impact.LOW, GuideWord.TRIGGER, "Item"),
                ),
                GsnNode("ST", STRATEGY, "by analysis", parent="G1"),
                GsnNode("S1", SOLUTION, "fta done", parent="ST", fta_ref="FT"),
            ),
        )
        tree = derive_adt(model, {"FT": fault_tree}, {})
        (branch,) = tree.root.children
        (frag,) = branch.children
        assert [c.label for c in frag.children] == ["trigger B", "trigger C"]

    def test_impact_preserved_per_branch(self, airbag_doc):
        model = airbag_doc.gsns["Airbag"]
        tree = derive_adt(model)
        verb = {GuideWord.STOPPING: "Stop", GuideWord.TRIGGER: "Trigger"}
        hazard_impacts = {
            f"{verb[g.hazard.mechanism]} {g.hazard.trace}": g.hazard.impact
            for g in model.goals()
            if g.hazard is not None
        }
        for branch in tree.root.children:
            assert branch.impact is hazard_impacts[branch.label]
