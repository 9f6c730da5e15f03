"""End-to-end checks of the reduction pipeline against the brute-force oracle."""

import unittest

from helpers import (
    accepted_words,
    all_words,
    make_rng,
    random_expr,
    random_hypothesis,
    random_word,
)
from kahyp.automata import accepts, language_equiv, nfa_to_dict, state_language, thompson
from kahyp.closure import (
    BudgetReason,
    Closed,
    ClosureConfig,
    canonical_labels,
    closure_fixpoint,
    saturate,
)
from kahyp.decide import VerdictKind, ka_h_equiv
from kahyp.lang_oracle import (
    bounded_closure,
    enumerate_language,
    one_step_closure,
    stabilized_closure,
)
from kahyp.reduce import Reduced, Undefined, reduce_expr
from kahyp.solutions import extract_expr, least_solution, reverse_solution_check
from kahyp.syntax import Atom, Hypothesis, parse_expr, parse_hypothesis


def hyp(text):
    return parse_hypothesis(text)[0]


# small budgets keep the random corpora quick; a case that runs out is skipped
DESK = ClosureConfig(max_rounds=10, max_states=600)


class TestWorkedExamples(unittest.TestCase):
    def test_singleton_closure(self):
        result = bounded_closure(parse_expr("aaaa"), [hyp("a<=aa")], 4, 0)
        self.assertEqual(result.words, {"a", "aa", "aaa", "aaaa"})

    def test_multi_round_patching(self):
        h = hyp("a<=ba")
        outcome = reduce_expr(parse_expr("bba"), h, ClosureConfig(variant="t0"))
        self.assertIsInstance(outcome, Reduced)
        self.assertEqual(outcome.rounds, 3)
        words = accepted_words(outcome.automaton, 5)
        self.assertEqual(words, ["a", "ba", "bba"])
        self.assertEqual(set(words), bounded_closure(parse_expr("bba"), [h], 5, 2).words)
        for m in outcome.history:
            self.assertTrue(reverse_solution_check(m))

    def test_saturation_success(self):
        prefix = reduce_expr(parse_expr("a"), hyp("ba<=a"))
        self.assertTrue(language_equiv(prefix.automaton, thompson(parse_expr("b*a"))))
        suffix = reduce_expr(parse_expr("a"), hyp("ab<=a"))
        self.assertTrue(language_equiv(suffix.automaton, thompson(parse_expr("ab*"))))
        self.assertTrue(reverse_solution_check(prefix.automaton))
        self.assertTrue(reverse_solution_check(suffix.automaton))

    def test_plain_rounds_diverge(self):
        cfg = ClosureConfig(variant="t0", max_rounds=8)
        outcome = reduce_expr(parse_expr("a"), hyp("ba<=a"), cfg)
        self.assertIsInstance(outcome, Undefined)
        self.assertEqual(outcome.reason, BudgetReason.ROUND_BUDGET)
        sizes = [m.num_states for m in outcome.history]
        self.assertTrue(all(x < y for x, y in zip(sizes, sizes[1:])))

    def test_non_regular_closure(self):
        cfg = ClosureConfig(max_rounds=8)
        outcome = reduce_expr(parse_expr("(ab)*"), hyp("ab<=ba"), cfg)
        self.assertIsInstance(outcome, Undefined)
        verdict = ka_h_equiv(parse_expr("(ab)*"), parse_expr("a*b*"), [hyp("ab<=ba")], cfg)
        self.assertEqual(verdict.kind, VerdictKind.UNKNOWN)

    def test_saturated_rounds_diverge_on_regular_closure(self):
        h = hyp("ab<=ba")
        outcome = reduce_expr(parse_expr("ba*"), h, ClosureConfig(max_rounds=8))
        self.assertIsInstance(outcome, Undefined)
        sample = bounded_closure(parse_expr("ba*"), [h], 6, 3)
        self.assertEqual(sample.words, enumerate_language(parse_expr("a*ba*"), 6).words)

    def test_saturation_structure(self):
        m = thompson(parse_expr("ab+ba"))
        sat = saturate(m, "a")
        before = {tuple(t) for t in nfa_to_dict(m)["transitions"]}
        after = {tuple(t) for t in nfa_to_dict(sat)["transitions"]}
        added = after - before
        self.assertEqual(len(added), 2)
        self.assertTrue(all(label == "eps" for _, label, _ in added))
        self.assertIn((m.final, "eps", 2), added)
        self.assertIn((3, "eps", m.initial), added)
        self.assertTrue(reverse_solution_check(sat))

    def test_commuting_actions(self):
        # b commutes with t, a and u; both sides put one b somewhere in (ta)*u
        hs = []
        for text in ["ba==ab", "bt==tb", "bu==ub"]:
            hs.extend(parse_hypothesis(text, "btau"))
        self.assertEqual(len(hs), 6)
        left = parse_expr("b(ta)*u", "btau")
        right = parse_expr("(ta)*ub", "btau")
        left_sample = stabilized_closure(left, hs, 8)
        right_sample = stabilized_closure(right, hs, 8)
        self.assertTrue(left_sample.stable and right_sample.stable)
        self.assertEqual(left_sample.words, right_sample.words)
        self.assertIn("tabu", left_sample.words)
        verdict = ka_h_equiv(left, right, hs, ClosureConfig(max_rounds=6, max_states=2000))
        self.assertIn(verdict.kind, {VerdictKind.EQUIVALENT, VerdictKind.UNKNOWN})


class TestKleeneRoundTrip(unittest.TestCase):
    def test_extraction_from_thompson(self):
        rng = make_rng(100)
        for _ in range(500):
            e = random_expr(rng, rng.randint(1, 12))
            self.assertTrue(language_equiv(thompson(extract_expr(thompson(e))), thompson(e)))

    def test_least_solution_matches_state_language(self):
        rng = make_rng(101)
        words = list(all_words(8))
        for _ in range(40):
            m = thompson(random_expr(rng, rng.randint(1, 12)))
            s = least_solution(m)
            for x in m.states:
                expected = {u for u in words if accepts(state_language(m, x), u)}
                self.assertEqual(enumerate_language(s[x], 8).words, expected)


class TestReductionLaws(unittest.TestCase):
    """Closed reductions agree with the bounded closure and are closed per state."""

    @classmethod
    def setUpClass(cls):
        rng = make_rng(102)
        cls.cases = []
        for _ in range(120):
            g = random_expr(rng, rng.randint(1, 8))
            h = random_hypothesis(rng, lhs_size=4, max_rhs=2)
            outcome = reduce_expr(g, h, DESK)
            if isinstance(outcome, Reduced):
                cls.cases.append((g, h, outcome))

    def test_some_cases_close(self):
        self.assertGreater(len(self.cases), 10)

    def test_fragment_equals_bounded_closure(self):
        checked = 0
        for g, h, outcome in self.cases:
            sample = stabilized_closure(g, [h], 6)
            if not sample.stable:
                continue
            checked += 1
            self.assertEqual(
                set(accepted_words(outcome.automaton, 6)),
                sample.words.words,
                msg=f"{g} under {h}",
            )
        self.assertGreater(checked, 0)

    def test_every_state_is_closed(self):
        for _, h, outcome in self.cases[:40]:
            m = outcome.automaton
            for x in m.states:
                fragment = enumerate_language(extract_expr(m, x), 6)
                self.assertEqual(one_step_closure(fragment, [h], 6).words, fragment.words)

    def test_reverse_duality(self):
        for _, _, outcome in self.cases[:40]:
            self.assertTrue(reverse_solution_check(outcome.automaton))


class TestContractionTotality(unittest.TestCase):
    def test_plain_rounds_terminate(self):
        rng = make_rng(103)
        cfg = ClosureConfig(variant="t0")
        for _ in range(200):
            g = random_expr(rng, rng.randint(1, 12))
            letter = rng.choice("ab")
            h = Hypothesis(Atom(letter), random_word(rng, rng.randint(1, 3)))
            outcome = reduce_expr(g, h, cfg)
            if isinstance(outcome, Undefined):
                # only the read-back may give up; the rounds themselves always close
                self.assertEqual(outcome.reason, BudgetReason.STATE_BUDGET, msg=f"{g} under {h}")
                self.assertIsInstance(closure_fixpoint(thompson(g), h, cfg), Closed)


class TestOrderIndependence(unittest.TestCase):
    def test_reversed_sites(self):
        rng = make_rng(104)
        compared = 0
        while compared < 50:
            m = thompson(random_expr(rng, rng.randint(1, 8)))
            h = random_hypothesis(rng, lhs_size=3, max_rhs=2)
            forward = closure_fixpoint(m, h, DESK)
            if not isinstance(forward, Closed):
                continue
            backward = closure_fixpoint(m, h, DESK, reverse_sites=True)
            self.assertIsInstance(backward, Closed)
            self.assertEqual(forward.rounds_used, backward.rounds_used)
            left = canonical_labels(forward.result)
            by_label = {label: x for x, label in canonical_labels(backward.result).items()}
            self.assertEqual(set(left.values()), set(by_label))
            for x, label in left.items():
                self.assertTrue(
                    language_equiv(
                        state_language(forward.result, x),
                        state_language(backward.result, by_label[label]),
                    )
                )
            compared += 1


if __name__ == "__main__":
    unittest.main()
