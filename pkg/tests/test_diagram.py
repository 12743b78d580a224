"""Kirby diagrams: validation, invariants and the move set."""

import random

import pytest

from ribboncalc import (AbelianGroup, Component, ForbiddenMove, KirbyDiagram,
                        MoveError, add_cancelling_pair, assert_geometric,
                        blow_down, blow_up, boundary_homology, cancel_pair,
                        dualize, empty_diagram, euler_char, handle_slide,
                        signature, twist_blow_up, validate, zero_dot_swap)

from genlib import random_diagram


def unknot(framing, name="u"):
    return KirbyDiagram(name=name,
                        components=(Component("u", "framed", framing),))


def hopf_12():
    return add_cancelling_pair(empty_diagram(), "12", ids=("d", "h"))


def h1plus(d):
    return boundary_homology(d, "plus")[0]


class TestValidate:
    def test_empty_is_clean(self):
        assert validate(empty_diagram()) == []

    def test_magnitude_violation(self):
        d = KirbyDiagram(name="x", components=(
            Component("a", "framed", 0), Component("b", "framed", 0)))
        d = d.with_links({("a", "b"): (2, 0)})
        codes = {v.code for v in validate(d)}
        assert "magnitude" in codes and "parity" not in codes

    def test_parity_violation(self):
        d = KirbyDiagram(name="x", components=(
            Component("a", "framed", 0), Component("b", "framed", 0)))
        d = d.with_links({("a", "b"): (1, 2)})
        assert {v.code for v in validate(d)} == {"parity"}

    def test_dotted_dotted_linking(self):
        d = KirbyDiagram(name="x", components=(
            Component("a", "dotted"), Component("b", "dotted")))
        d = d.with_links({("a", "b"): (1, 1)})
        assert "dotted-dotted" in {v.code for v in validate(d)}

    def test_paren_requires_dual_flag(self):
        d = KirbyDiagram(name="x",
                         components=(Component("p", "parenframed", 2),))
        assert "paren-without-dual" in {v.code for v in validate(d)}

    def test_random_diagrams_are_clean(self):
        rng = random.Random(7)
        for _ in range(100):
            assert validate(random_diagram(rng)) == []


class TestInvariants:
    def test_empty(self):
        d = empty_diagram()
        assert euler_char(d) == 1
        assert signature(d) == 0

    def test_single_blowup(self):
        d = blow_up(empty_diagram(), -1)
        assert euler_char(d) == 2
        assert signature(d) == -1
        assert h1plus(d) == AbelianGroup(0)

    def test_zero_framed_unknot_boundary(self):
        assert h1plus(unknot(0)) == AbelianGroup(1)

    def test_pm1_unknot_boundary_is_trivial(self):
        assert h1plus(unknot(1)) == AbelianGroup(0)
        assert h1plus(unknot(-1)) == AbelianGroup(0)

    def test_hopf_pair(self):
        d = hopf_12()
        assert euler_char(d) == 1
        assert signature(d) == 0
        assert h1plus(d) == AbelianGroup(0)

    def test_lens_space_boundary(self):
        assert h1plus(unknot(5)) == AbelianGroup(0, (5,))

    def test_hidden_one_handles_add_free_summands(self):
        d = KirbyDiagram(name="x", hidden_one_handles=2, dual_flag=True)
        assert h1plus(d) == AbelianGroup(2)
        assert boundary_homology(d, "minus")[0] == AbelianGroup(2)

    def test_caveat_flag_tracks_three_handles(self):
        d = KirbyDiagram(name="x", three_handles=1)
        assert boundary_homology(d, "plus")[1] is True
        assert boundary_homology(empty_diagram(), "plus")[1] is False

    def test_minus_side_needs_dual(self):
        with pytest.raises(MoveError):
            boundary_homology(empty_diagram(), "minus")


class TestHandleSlide:
    def two_unknots(self, f1, f2, alg=0, geom=0):
        d = KirbyDiagram(name="x", components=(
            Component("a", "framed", f1), Component("b", "framed", f2)))
        return d.with_links({("a", "b"): (alg, geom)})

    def test_framing_rule(self):
        # f' = f_a + f_b + 2 * alg(a, b)
        d = self.two_unknots(2, 3, alg=1, geom=1)
        out = handle_slide(d, "a", "b", 1)
        assert out.framing("a") == 2 + 3 + 2 * 1

    def test_reverse_slide_restores_alg(self):
        d = self.two_unknots(2, 3, alg=1, geom=1)
        out = handle_slide(handle_slide(d, "a", "b", 1), "a", "b", -1)
        assert out.alg("a", "b") == d.alg("a", "b")
        assert out.framing("a") == d.framing("a")
        assert out.geom("a", "b") >= d.geom("a", "b")

    def test_dotted_over_undotted_forbidden(self):
        d = KirbyDiagram(name="x", components=(
            Component("a", "dotted"), Component("b", "framed", 0)))
        with pytest.raises(ForbiddenMove):
            handle_slide(d, "a", "b", 1)

    def test_dotted_over_dotted_allowed(self):
        d = KirbyDiagram(name="x", components=(
            Component("a", "dotted"), Component("b", "dotted")))
        out = handle_slide(d, "a", "b", 1)
        assert out.alg("a", "b") == 0

    def test_framed_over_dotted_allowed(self):
        d = KirbyDiagram(name="x", components=(
            Component("a", "framed", 1), Component("b", "dotted")))
        d = d.with_links({("a", "b"): (1, 1)})
        out = handle_slide(d, "a", "b", -1)
        assert out.framing("a") == 1 + 0 + 2 * (-1) * 1

    def test_cannot_slide_over_paren(self):
        d = dualize(unknot(3))
        with pytest.raises(MoveError):
            handle_slide(d, "m_u", "u", 1)

    def test_self_slide_rejected(self):
        with pytest.raises(MoveError):
            handle_slide(unknot(0), "u", "u", 1)

    def test_third_party_links_transfer(self):
        d = KirbyDiagram(name="x", components=(
            Component("a", "framed", 0), Component("b", "framed", 0),
            Component("c", "framed", 0)))
        d = d.with_links({("b", "c"): (2, 2)})
        out = handle_slide(d, "a", "b", 1)
        assert out.alg("a", "c") == 2
        assert out.geom("a", "c") == 2

    def test_homology_invariance(self):
        d = self.two_unknots(2, 3, alg=1, geom=1)
        assert h1plus(handle_slide(d, "a", "b", 1)) == h1plus(d)

    def test_sigma_chi_preserved_over_framed(self):
        d = self.two_unknots(2, 3, alg=1, geom=1)
        out = handle_slide(d, "a", "b", -1)
        assert signature(out) == signature(d)
        assert euler_char(out) == euler_char(d)


class TestBlowUpDown:
    def test_blow_up_contract(self):
        d = unknot(0)
        out = blow_up(d, 1, new_id="e")
        assert out.framing("e") == 1
        assert euler_char(out) == euler_char(d) + 1
        assert signature(out) == signature(d) + 1
        assert h1plus(out) == h1plus(d)

    def test_blow_down_inverse(self):
        d = unknot(0)
        assert blow_down(blow_up(d, -1, new_id="e"), "e") == d

    def test_blow_down_two_disjoint(self):
        d = blow_up(blow_up(empty_diagram(), 1, "e1"), -1, "e2")
        assert blow_down(blow_down(d, "e1"), "e2") == empty_diagram()

    def test_blow_down_rejects_linked(self):
        d = blow_up(unknot(0), 1, new_id="e")
        d = d.with_links({("u", "e"): (1, 1)})
        with pytest.raises(MoveError):
            blow_down(d, "e")

    def test_blow_down_rejects_wrong_framing(self):
        with pytest.raises(MoveError):
            blow_down(unknot(2), "u")


class TestTwistBlowUp:
    def test_single_strand(self):
        d = unknot(0)
        out = twist_blow_up(d, 1, {"u": 1}, new_id="e")
        assert out.framing("u") == 1
        assert out.framing("e") == 1
        assert out.alg("u", "e") == 1
        assert out.geom("u", "e") == 1
        # [0] and [[1,1],[1,1]] both have cokernel Z
        assert h1plus(out) == h1plus(d) == AbelianGroup(1)

    def test_pairwise_deltas(self):
        d = KirbyDiagram(name="x", components=(
            Component("a", "framed", 0), Component("b", "framed", 0)))
        out = twist_blow_up(d, -1, {"a": 1, "b": 2}, new_id="e")
        assert out.alg("a", "b") == -2
        assert out.framing("a") == -1
        assert out.framing("b") == -4
        assert out.alg("a", "e") == -1 and out.alg("b", "e") == -2
        assert out.geom("a", "e") == 1 and out.geom("b", "e") == 2

    def test_homology_and_chi_sigma(self):
        d = KirbyDiagram(name="x", components=(
            Component("a", "framed", 2), Component("b", "framed", 0)))
        d = d.with_links({("a", "b"): (1, 1)})
        out = twist_blow_up(d, 1, {"a": 1, "b": 1}, new_id="e")
        assert h1plus(out) == h1plus(d)
        assert euler_char(out) == euler_char(d) + 1
        assert signature(out) == signature(d) + 1

    def test_rejects_empty_strands(self):
        with pytest.raises(MoveError):
            twist_blow_up(unknot(0), 1, {})

    def test_rejects_dotted_strand(self):
        # A dotted circle cannot slide off the new handle, so twisting it
        # would change the boundary.
        d = KirbyDiagram(name="x", components=(
            Component("a", "dotted"), Component("b", "framed", 0)))
        with pytest.raises(MoveError):
            twist_blow_up(d, 1, {"a": 1, "b": 1}, new_id="e")


class TestZeroDotSwap:
    def test_round_trip(self):
        d = unknot(0)
        swapped = zero_dot_swap(d, "u")
        assert swapped.component("u").kind == "dotted"
        back = zero_dot_swap(swapped, "u")
        assert back.component("u").kind == "framed"
        assert back.framing("u") == 0

    def test_homology_unchanged_both_ways(self):
        d = unknot(0)
        assert h1plus(zero_dot_swap(d, "u")) == h1plus(d) == AbelianGroup(1)

    def test_rejects_nonzero_framing(self):
        with pytest.raises(MoveError):
            zero_dot_swap(unknot(1), "u")

    def test_rejects_linking_a_dot(self):
        d = KirbyDiagram(name="x", components=(
            Component("a", "framed", 0), Component("b", "dotted")))
        d = d.with_links({("a", "b"): (1, 1)})
        with pytest.raises(MoveError):
            zero_dot_swap(d, "a")


class TestCancellingPairs:
    def test_one_two_roundtrip(self):
        d = hopf_12()
        assert h1plus(d) == AbelianGroup(0)
        assert cancel_pair(d, "d", "h") == empty_diagram()

    def test_two_three_roundtrip(self):
        d = add_cancelling_pair(empty_diagram(), "23", ids=("h",))
        assert d.three_handles == 1
        out = cancel_pair(d, None, "h")
        assert out == empty_diagram()

    def test_chi_unchanged(self):
        d = empty_diagram()
        assert euler_char(add_cancelling_pair(d, "12")) == euler_char(d)
        assert euler_char(add_cancelling_pair(d, "23")) == euler_char(d)

    def test_cancel_12_names_blocking_component(self):
        d = hopf_12()
        d = blow_up(d, 1, new_id="x")
        d = d.with_links({("d", "h"): (1, 1), ("d", "x"): (0, 2)})
        with pytest.raises(MoveError, match="x"):
            cancel_pair(d, "d", "h")

    def test_cancel_23_requires_three_handle(self):
        d = unknot(0, name="h").with_links({})
        with pytest.raises(MoveError):
            cancel_pair(d, None, "u")


class TestAssertGeometric:
    def setup_method(self):
        d = KirbyDiagram(name="x", components=(
            Component("a", "framed", 0), Component("b", "framed", 0)))
        self.d = d.with_links({("a", "b"): (1, 3)})

    def test_lowering(self):
        assert assert_geometric(self.d, "a", "b", 1).geom("a", "b") == 1

    def test_cannot_raise(self):
        with pytest.raises(MoveError):
            assert_geometric(self.d, "a", "b", 5)

    def test_cannot_go_below_alg(self):
        with pytest.raises(MoveError):
            assert_geometric(self.d, "a", "b", 0)

    def test_parity_enforced(self):
        with pytest.raises(MoveError):
            assert_geometric(self.d, "a", "b", 2)


class TestDualize:
    def test_single_framed_unknot(self):
        out = dualize(unknot(3))
        assert out.component("u").kind == "parenframed"
        assert out.component("u").framing == -3
        assert out.component("m_u").framing == 0
        assert out.alg("m_u", "u") == 1
        assert out.dual_flag and out.four_handles == 1

    def test_single_dotted_circle(self):
        d = KirbyDiagram(name="x", components=(Component("a", "dotted"),))
        out = dualize(d)
        assert out.component("a").kind == "parenframed"
        assert out.three_handles == 1
        assert not any(c.id.startswith("m_") for c in out.components)

    def test_mirror_negates_linking(self):
        d = KirbyDiagram(name="x", components=(
            Component("a", "framed", 2), Component("b", "framed", 0)))
        d = d.with_links({("a", "b"): (1, 1)})
        out = dualize(d)
        assert out.alg("a", "b") == -1
        assert out.geom("a", "b") == 1

    def test_three_handles_become_hidden(self):
        d = KirbyDiagram(name="x", three_handles=2)
        assert dualize(d).hidden_one_handles == 2

    def test_double_dualize_rejected(self):
        with pytest.raises(MoveError):
            dualize(dualize(unknot(0)))

    def test_minus_boundary_matches_original_plus(self):
        d = KirbyDiagram(name="x", components=(
            Component("a", "framed", 2), Component("b", "framed", 0)))
        d = d.with_links({("a", "b"): (1, 1)})
        assert boundary_homology(dualize(d), "minus")[0] == h1plus(d)
