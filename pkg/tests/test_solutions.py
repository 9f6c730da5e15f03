import unittest

from helpers import accepted_words, make_rng, random_expr
from kahyp.automata import language_equiv, state_language, thompson
from kahyp.closure import ClosureConfig, closure_fixpoint, saturate
from kahyp.solutions import (
    ExpressionTooLarge,
    Solution,
    extract_expr,
    least_solution,
    live_states,
    reverse_solution_check,
    verify_solution,
)
from kahyp.syntax import ZERO, Atom, Star, Sum, add, expr_size, parse_expr, parse_hypothesis


def nfa(text):
    return thompson(parse_expr(text))


def same_language(e, m):
    return bool(language_equiv(thompson(e), m))


class TestLeastSolution(unittest.TestCase):
    def test_single_letter(self):
        m = nfa("a")
        s = least_solution(m)
        self.assertTrue(same_language(s[m.initial], nfa("a")))
        self.assertTrue(same_language(s.for_state(m.final), nfa("1")))

    def test_star_prefix(self):
        m = nfa("b*a")
        self.assertTrue(same_language(least_solution(m)[m.initial], nfa("b*a")))

    def test_saturated_patch_result(self):
        outcome = closure_fixpoint(nfa("a"), parse_hypothesis("ba<=a")[0])
        m = outcome.result
        self.assertTrue(same_language(least_solution(m)[m.initial], nfa("b*a")))

    def test_dead_states_get_zero(self):
        m = nfa("a0+b")
        s = least_solution(m)
        dead = set(m.states) - live_states(m)
        self.assertTrue(dead)
        for x in dead:
            self.assertEqual(s[x], ZERO)

    def test_equals_state_language_everywhere(self):
        rng = make_rng(30)
        for _ in range(60):
            m = thompson(random_expr(rng, rng.randint(1, 10)))
            s = least_solution(m)
            self.assertEqual(set(s.assignment), set(m.states))
            for x in m.states:
                self.assertTrue(
                    same_language(s[x], state_language(m, x)), msg=f"state {x} of {m}"
                )

    def test_kleene_round_trip(self):
        rng = make_rng(31)
        for _ in range(100):
            e = random_expr(rng, rng.randint(1, 12))
            self.assertTrue(same_language(extract_expr(thompson(e)), thompson(e)), msg=str(e))


class TestExtract(unittest.TestCase):
    def test_per_state(self):
        m = nfa("ab+b*")
        for x in m.states:
            self.assertTrue(same_language(extract_expr(m, x), state_language(m, x)))

    def test_deterministic(self):
        e = parse_expr("(a+ba)*b(ab)*")
        self.assertEqual(extract_expr(thompson(e)), extract_expr(thompson(e)))
        self.assertEqual(least_solution(thompson(e)), least_solution(thompson(e)))

    def test_empty_language(self):
        self.assertEqual(extract_expr(nfa("0")), ZERO)
        self.assertEqual(extract_expr(nfa("a0")), ZERO)

    def test_epsilon_loops(self):
        e = extract_expr(nfa("(1+a)*"))
        self.assertEqual(accepted_words(thompson(e), 3), ["", "a", "aa", "aaa"])

    def test_size_limit(self):
        with self.assertRaises(ExpressionTooLarge) as ctx:
            extract_expr(nfa("abab"), max_size=1)
        self.assertEqual(ctx.exception.limit, 1)
        self.assertGreater(ctx.exception.size, 1)
        e = extract_expr(nfa("abab"), max_size=100)
        self.assertLessEqual(expr_size(e), 100)

    def test_closed_contraction_stays_small(self):
        m = closure_fixpoint(
            nfa("((ab+b)ab)**"), parse_hypothesis("a<=ab")[0], ClosureConfig(variant="t0")
        ).result
        e = extract_expr(m, max_size=50_000)
        self.assertTrue(same_language(e, m))


class TestVerify(unittest.TestCase):
    def test_least_solution_verifies(self):
        rng = make_rng(32)
        for _ in range(30):
            m = thompson(random_expr(rng, rng.randint(1, 10)))
            self.assertTrue(verify_solution(m, least_solution(m)))

    def test_zero_everywhere_fails(self):
        m = nfa("a")
        self.assertFalse(verify_solution(m, Solution({x: ZERO for x in m.states})))

    def test_missing_state_fails(self):
        m = nfa("a")
        self.assertFalse(verify_solution(m, Solution({m.initial: Atom("a")})))

    def test_raising_by_the_full_language_keeps_a_solution(self):
        top = Star(Sum(Atom("a"), Atom("b")))
        rng = make_rng(33)
        for _ in range(20):
            m = thompson(random_expr(rng, rng.randint(1, 10)))
            s = least_solution(m)
            raised = Solution({x: add(s[x], top) for x in m.states})
            self.assertTrue(verify_solution(m, raised))

    def test_solution_bounds_state_language(self):
        # saturation only adds transitions, so its least solution also solves m
        m = nfa("ab+ba")
        bigger = least_solution(saturate(m, "a"))
        self.assertTrue(verify_solution(m, bigger))
        grew = False
        for x in m.states:
            inside = set(accepted_words(thompson(bigger[x]), 6))
            exact = set(accepted_words(state_language(m, x), 6))
            self.assertTrue(exact <= inside)
            grew = grew or exact != inside
        self.assertTrue(grew)


class TestReverseSolution(unittest.TestCase):
    def test_examples(self):
        self.assertTrue(reverse_solution_check(nfa("ab")))
        self.assertTrue(reverse_solution_check(nfa("ab+ba")))
        self.assertTrue(reverse_solution_check(saturate(nfa("ab+ba"), "a")))

    def test_random(self):
        rng = make_rng(34)
        for _ in range(40):
            self.assertTrue(reverse_solution_check(thompson(random_expr(rng, rng.randint(1, 10)))))


if __name__ == "__main__":
    unittest.main()
