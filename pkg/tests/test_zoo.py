"""Zoo machines against their counting oracles, including interference."""
import math
import re

import pytest

from qpakit import zoo
from qpakit.evolve import recognize, trace
from qpakit.model import QpaError, STACK_BASE, validate_structure
from qpakit.wellformed import check_all

from conftest import words_up_to

Z = STACK_BASE
SEVENTH = 1.0 / 7.0


def in_l3(w):
    return w.count("a") == w.count("b") == w.count("c")


def in_l5(w):
    return (w.count("a") == w.count("b")) != (w.count("a") == w.count("c"))


class TestEveryEntry:
    def test_structure_and_conditions(self):
        for entry in zoo.entries().values():
            assert validate_structure(entry.spec) == [], entry.name
            summary = check_all(entry.spec)
            assert summary.passed, entry.name
            assert summary.worst_residual < 1e-9

    def test_oracles_are_total(self):
        for entry in zoo.entries().values():
            alphabet = "".join(sorted(entry.spec.alphabets.sigma))
            for word in words_up_to(alphabet, 3):
                assert entry.language_oracle(word) in (True, False)

    def test_members_meet_claimed_probability(self):
        for entry in zoo.entries().values():
            alphabet = "".join(sorted(entry.spec.alphabets.sigma))
            for word in words_up_to(alphabet, 4):
                r = recognize(entry.spec, word)
                if entry.language_oracle(word):
                    assert r.p_accept >= entry.claimed_probability - 1e-9, (entry.name, word)
                else:
                    assert r.p_accept < 0.5, (entry.name, word)


class TestL1:
    def test_single_one_accepts(self):
        assert recognize(zoo.l1_rpa().spec, "1").p_accept == pytest.approx(1.0, abs=1e-9)

    def test_empty_word_rejects(self):
        assert recognize(zoo.l1_rpa().spec, "").p_reject == pytest.approx(1.0, abs=1e-9)

    def test_matches_regex_oracle_exhaustively(self):
        entry = zoo.l1_rpa()
        pattern = re.compile(r"[01]*1")
        for word in words_up_to("01", 8):
            r = recognize(entry.spec, word)
            want = pattern.fullmatch(word) is not None
            assert want == entry.language_oracle(word)
            assert r.p_accept == pytest.approx(1.0 if want else 0.0, abs=1e-9)
            assert r.halted and r.steps == len(word) + 2

    def test_unreachable_states_present(self):
        # the table needs q2 and q3 for reversibility even though no run
        # ever enters them
        spec = zoo.l1_rpa().spec
        assert {"q2", "q3"} <= spec.states
        for steps in (trace(spec, "0110"),):
            for s in steps:
                for c, _ in s.entries:
                    assert c.state not in {"q2", "q3"}


class TestL2:
    @pytest.mark.parametrize("word,accept", [
        ("ab", True), ("ba", True), ("aabb", True), ("", True),
        ("a", False), ("b", False), ("aab", False),
    ])
    def test_verdicts(self, word, accept):
        r = recognize(zoo.l2_rpa().spec, word)
        assert r.p_accept == pytest.approx(1.0 if accept else 0.0, abs=1e-9)
        assert r.p_accept + r.p_reject == pytest.approx(1.0, abs=1e-9)

    def test_matches_counting_oracle_exhaustively(self):
        entry = zoo.l2_rpa()
        for word in words_up_to("ab", 8):
            r = recognize(entry.spec, word)
            want = word.count("a") == word.count("b")
            assert r.p_accept == pytest.approx(1.0 if want else 0.0, abs=1e-9)
            assert r.halted

    def test_step_count_is_word_plus_pops_plus_two(self):
        # a matched symbol costs one extra stay; the bound is exact
        spec = zoo.l2_rpa().spec
        for word in words_up_to("ab", 7):
            r = recognize(spec, word)
            pops = _l2_pops(word)
            assert r.steps == len(word) + pops + 2, word


def _l2_pops(word: str) -> int:
    depth = 0
    pops = 0
    for ch in word:
        delta = 1 if ch == "a" else -1
        if depth * delta < 0:
            pops += 1
        depth += delta
    return pops


class TestL3:
    def test_members_exactly_two_thirds(self):
        spec = zoo.l3_qpa().spec
        for word in ("", "abc", "cba", "aabbcc", "abccba"):
            r = recognize(spec, word)
            assert r.p_accept == pytest.approx(2 / 3, abs=1e-9), word

    def test_nonmembers_reject_with_two_thirds_or_more(self):
        spec = zoo.l3_qpa().spec
        for word in ("a", "ab", "abcc", "aab", "ccc"):
            r = recognize(spec, word)
            assert r.p_reject >= 2 / 3 - 1e-9, word

    def test_exhaustive_up_to_length_four(self):
        spec = zoo.l3_qpa().spec
        for word in words_up_to("abc", 4):
            r = recognize(spec, word)
            if in_l3(word):
                assert r.p_accept == pytest.approx(2 / 3, abs=1e-9)
            else:
                assert r.p_reject >= 2 / 3 - 1e-9


class TestL5:
    def test_member_hits_four_sevenths_exactly(self):
        r = recognize(zoo.l5_qpa().spec, "ab")
        assert r.p_accept == pytest.approx(4 * SEVENTH, abs=1e-9)

    def test_balanced_word_annihilates_to_three_sevenths(self):
        r = recognize(zoo.l5_qpa().spec, "abc")
        assert r.p_accept == pytest.approx(3 * SEVENTH, abs=1e-9)
        assert r.p_reject == pytest.approx(4 * SEVENTH, abs=1e-9)

    def test_neither_comparison_three_sevenths(self):
        r = recognize(zoo.l5_qpa().spec, "aab")
        assert r.p_accept == pytest.approx(3 * SEVENTH, abs=1e-9)

    def test_cancelled_configuration_never_carries_mass(self):
        # on balanced words both comparators hit the end marker at the
        # same step and the shared accept amplitudes cancel exactly
        spec = zoo.l5_qpa().spec
        for word in ("", "abc", "abcabc", "aabbcc", "cabbca"):
            for s in trace(spec, word):
                for c, amp in s.entries:
                    if c.state == "acc":
                        assert abs(amp) < 1e-12, (word, s.step)
            r = recognize(spec, word)
            assert r.p_accept == pytest.approx(3 * SEVENTH, abs=1e-9)

    def test_surviving_branch_does_reach_the_shared_accept(self):
        # positive control for the annihilation check: with only one
        # comparison positive, the shared accept state carries sqrt(1/7)
        acc_amps = [
            amp
            for s in trace(zoo.l5_qpa().spec, "ab")
            for c, amp in s.entries
            if c.state == "acc"
        ]
        assert len(acc_amps) == 1
        assert abs(acc_amps[0]) == pytest.approx(math.sqrt(SEVENTH), abs=1e-12)

    def test_exhaustive_up_to_length_four(self):
        spec = zoo.l5_qpa().spec
        for word in words_up_to("abc", 4):
            r = recognize(spec, word)
            if in_l5(word):
                assert r.p_accept >= 4 * SEVENTH - 1e-9, word
            else:
                assert r.p_accept <= 3 * SEVENTH + 1e-9, word

    def test_long_balanced_words_stay_synchronized(self):
        # both comparators make one pop per matched pair, so they reach
        # the end marker together however the symbols are interleaved
        import random
        spec = zoo.l5_qpa().spec
        rng = random.Random(9)
        base = list("aaabbbccc")
        for _ in range(10):
            rng.shuffle(base)
            word = "".join(base)
            r = recognize(spec, word)
            assert r.p_accept == pytest.approx(3 * SEVENTH, abs=1e-9), word
        r = recognize(spec, "abcabcabcabc")
        assert r.p_accept == pytest.approx(3 * SEVENTH, abs=1e-9)


class TestComparatorGadget:
    def test_equal_counts_with_ignored_symbol(self):
        gadget = zoo.comparator_gadget("a", "b", ignore_symbols=("c",), prefix="t")
        rpa = gadget.as_rpa()
        assert recognize(rpa, "acb").p_accept == pytest.approx(1.0, abs=1e-9)

    def test_unequal_counts(self):
        gadget = zoo.comparator_gadget("b", "c", ignore_symbols=("a",), prefix="t")
        rpa = gadget.as_rpa()
        assert recognize(rpa, "bbc").p_reject == pytest.approx(1.0, abs=1e-9)

    def test_two_symbol_gadget_reproduces_count_language(self):
        rpa = zoo.comparator_gadget("a", "b", prefix="g").as_rpa()
        assert check_all(rpa).passed
        for word in words_up_to("ab", 8):
            want = word.count("a") == word.count("b")
            assert recognize(rpa, word).p_accept == pytest.approx(
                1.0 if want else 0.0, abs=1e-9), word

    def test_standalone_gadgets_are_well_formed(self):
        for ignore in ((), ("c",), ("c", "d")):
            rpa = zoo.comparator_gadget("a", "b", ignore_symbols=ignore, prefix="g").as_rpa()
            assert check_all(rpa).passed, ignore

    def test_overlapping_roles_rejected(self):
        with pytest.raises(QpaError):
            zoo.comparator_gadget("a", "a")
        with pytest.raises(QpaError):
            zoo.comparator_gadget("a", "b", ignore_symbols=("a",))


class TestReversibleHaltingBounds:
    def test_l1_halts_in_word_plus_two(self):
        spec = zoo.l1_rpa().spec
        for word in words_up_to("01", 6):
            r = recognize(spec, word, halt_eps=1e-12)
            assert r.halted and r.steps == len(word) + 2

    def test_l2_halts_within_three_halves(self):
        spec = zoo.l2_rpa().spec
        for word in words_up_to("ab", 8):
            r = recognize(spec, word, halt_eps=1e-12)
            assert r.halted
            assert r.steps <= 2 + len(word) + len(word) // 2

    def test_probability_mass_is_binary(self):
        for name in ("l1", "l2"):
            spec = zoo.entries()[name].spec
            alphabet = "".join(sorted(spec.alphabets.sigma))
            for word in words_up_to(alphabet, 5):
                r = recognize(spec, word)
                assert r.p_accept + r.p_reject == pytest.approx(1.0, abs=1e-9)
                assert min(abs(r.p_accept), abs(r.p_accept - 1.0)) < 1e-9


class TestFixtureRegistry:
    def test_export_names(self):
        names = set(zoo.fixture_specs())
        assert names == {"l1", "l2", "l3", "l5", "nonunitary"}

    def test_nonunitary_is_not_an_entry(self):
        assert "nonunitary" not in zoo.entries()
        assert not check_all(zoo.nonunitary_example()).passed
