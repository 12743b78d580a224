"""Middle-level data, finger graphs, caps and the positivity decision."""

import random

import pytest

from ribboncalc import (AccessoryLoop, Cap, Finger, MiddleLevelData,
                        MiddleError, RibbonDescriptor, STANDARD_CAP, chplus,
                        finger_graph, geometric_matrix, is_positive_ribbon,
                        make_descriptor, validate_middle, whitney_set)

from genlib import oracle_cycle_exists, random_acyclic_middle, random_cyclic_middle

CHP = Cap(chplus())


def middle(pairs, fingers=(), loops=()):
    return MiddleLevelData(
        pairs,
        tuple(Finger(*f) for f in fingers),
        tuple(AccessoryLoop(i, tuple(fs)) for i, fs in loops))


class TestValidateMiddle:
    def test_clean(self):
        m = middle(2, [("f1", 1, 2, "w1")], [("l1", ["f1"])])
        assert validate_middle(m) == []

    def test_out_of_range_sphere(self):
        m = middle(1, [("f1", 1, 2, "w1")])
        assert any("outside" in v for v in validate_middle(m))

    def test_duplicate_ids(self):
        m = middle(2, [("f1", 1, 2, "w1"), ("f1", 2, 1, "w2")])
        assert any("duplicate finger" in v for v in validate_middle(m))

    def test_loop_over_missing_finger(self):
        m = middle(2, [], [("l1", ["nope"])])
        assert any("missing finger" in v for v in validate_middle(m))

    def test_empty_loop_rejected_at_construction(self):
        with pytest.raises(ValueError):
            AccessoryLoop("l1", ())

    def test_nonpositive_pairs(self):
        assert any("positive" in v for v in validate_middle(middle(0)))


class TestGeometricMatrix:
    def test_identity_without_fingers(self):
        assert geometric_matrix(middle(3)) == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]

    def test_each_finger_adds_a_pair(self):
        m = middle(2, [("f1", 1, 2, "w1"), ("f2", 1, 2, "w2"),
                       ("f3", 2, 1, "w3")])
        assert geometric_matrix(m) == [[1, 4], [2, 1]]


class TestFingerGraph:
    def test_acyclic_report(self):
        m = middle(3, [("f1", 1, 2, "w1"), ("f2", 2, 3, "w2")])
        g = finger_graph(m, restrict_to_loops=False)
        assert g.acyclic
        assert g.edges == (("f1", 1, 2), ("f2", 2, 3))

    def test_self_loop_is_a_cycle(self):
        m = middle(1, [("f1", 1, 1, "w1")])
        g = finger_graph(m, restrict_to_loops=False)
        assert g.cycles == ((1,),)

    def test_two_cycle(self):
        m = middle(2, [("f1", 1, 2, "w1"), ("f2", 2, 1, "w2")])
        g = finger_graph(m, restrict_to_loops=False)
        assert not g.acyclic
        assert set(g.cycles[0]) == {1, 2}

    def test_loop_restriction_can_hide_cycles(self):
        # A cycle among fingers no accessory loop touches is not reported
        # when the search is seeded from loops only.
        m = middle(3, [("f1", 1, 2, "w1"), ("f2", 2, 1, "w2"),
                       ("f3", 3, 1, "w3")],
                   [("l1", ["f3"])])
        assert not finger_graph(m, restrict_to_loops=True).acyclic \
            or finger_graph(m, restrict_to_loops=False).cycles
        unrestricted = finger_graph(m, restrict_to_loops=False)
        assert not unrestricted.acyclic

    def test_oracle_agreement(self):
        rng = random.Random(29)
        for _ in range(200):
            m = (random_acyclic_middle(rng) if rng.random() < 0.5
                 else random_cyclic_middle(rng))
            g = finger_graph(m, restrict_to_loops=False)
            assert g.acyclic == (not oracle_cycle_exists(m))


class TestCapsAndDescriptors:
    def test_standard_cap(self):
        assert STANDARD_CAP.standard and not STANDARD_CAP.positive

    def test_chplus_cap_positive(self):
        assert CHP.positive and not CHP.standard

    def test_total_cap_assignment_enforced(self):
        m = middle(2, [("f1", 1, 2, "w1")], [("l1", ["f1"])])
        with pytest.raises(MiddleError, match="missing"):
            RibbonDescriptor(m, (("w1", CHP),))
        with pytest.raises(MiddleError, match="unknown"):
            RibbonDescriptor(m, (("w1", CHP), ("l1", CHP), ("zz", CHP)))

    def test_whitney_set(self):
        m = middle(2, [("f1", 1, 2, "w1"), ("f2", 1, 2, "w2")],
                   [("l1", ["f1", "f2"]), ("l2", ["f2"])])
        assert whitney_set(m, "l1") == {"w1", "w2"}
        assert whitney_set(m, "l2") == {"w2"}


class TestPositivityDecision:
    def build(self, loops, caps, fingers):
        m = middle(max(max(f[1], f[2]) for f in fingers), fingers, loops)
        return make_descriptor(m, caps)

    def test_singleton_with_positive_accessory(self):
        r = self.build([("l1", ["f1"])], {"w1": CHP, "l1": CHP},
                       [("f1", 1, 1, "w1")])
        decision = is_positive_ribbon(r)
        assert decision.positive and decision.witness_loop == "l1"
        assert bool(decision)

    def test_singleton_with_standard_accessory_refused(self):
        r = self.build([("l1", ["f1"])], {"w1": CHP, "l1": STANDARD_CAP},
                       [("f1", 1, 1, "w1")])
        decision = is_positive_ribbon(r)
        assert not decision.positive
        assert decision.refusals[0][0] == "l1"
        assert "accessory cap" in decision.refusals[0][1]

    def test_nonpositive_whitney_cap_refused_first(self):
        r = self.build([("l1", ["f1"])],
                       {"w1": STANDARD_CAP, "l1": CHP},
                       [("f1", 1, 1, "w1")])
        decision = is_positive_ribbon(r)
        assert not decision.positive
        assert "w1" in decision.refusals[0][1]

    def test_larger_set_skips_accessory_cap_clause(self):
        r = self.build([("l1", ["f1", "f2"])],
                       {"w1": CHP, "w2": CHP, "l1": STANDARD_CAP},
                       [("f1", 1, 2, "w1"), ("f2", 2, 1, "w2")])
        assert is_positive_ribbon(r).positive

    def test_two_fingers_from_one_sphere_refused(self):
        r = self.build([("l1", ["f1", "f2"])],
                       {"w1": CHP, "w2": CHP, "l1": STANDARD_CAP},
                       [("f1", 1, 2, "w1"), ("f2", 1, 2, "w2")])
        decision = is_positive_ribbon(r)
        assert not decision.positive
        assert "more than one finger" in decision.refusals[0][1]

    def test_second_loop_can_rescue(self):
        r = self.build([("l1", ["f1", "f2"]), ("l2", ["f3"])],
                       {"w1": CHP, "w2": CHP, "w3": CHP,
                        "l1": STANDARD_CAP, "l2": CHP},
                       [("f1", 1, 2, "w1"), ("f2", 1, 2, "w2"),
                        ("f3", 2, 2, "w3")])
        decision = is_positive_ribbon(r)
        assert decision.positive and decision.witness_loop == "l2"
        # the refusal of the first loop is still reported
        assert decision.refusals and decision.refusals[0][0] == "l1"

    def test_no_loops_refused(self):
        r = self.build([], {"w1": CHP}, [("f1", 1, 1, "w1")])
        decision = is_positive_ribbon(r)
        assert not decision.positive
        assert decision.refusals == (("", "no accessory loops"),)
