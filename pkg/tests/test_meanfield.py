"""
Testes para a equação de campo médio e o experimento de unicidade.
"""
import unittest
import sys
import os
import warnings

from math import factorial

import numpy as np
from scipy.linalg import LinAlgWarning

# Adiciona o diretório raiz ao path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.config.settings import Config
from src.models.harmonics import E2Vector, GridField, HarmonicIndex, SphCoeffs
from src.models.meanfield import IterationTrace, NonzeroCandidate, UniquenessReport
from src.services.meanfield_service import MeanFieldService, P2_NORM_CONSTANT, _exp_remainder
from src.services.sphharm_service import SphHarmService
from src.utils.errors import ConfigurationError, PreconditionError, RangeError
from src.utils.helpers import trial_rng

SLOW = os.getenv('HAWKLAB_SLOW') == '1'


def _rotate_about_pole(c: SphCoeffs, alpha: float) -> SphCoeffs:
    """Coeficientes de f(θ, φ - α)."""
    out = c.c.copy()
    for idx in HarmonicIndex.iterate(c.L):
        if idx.m > 0:
            i_cos, i_sin = idx.position, HarmonicIndex(idx.l, -idx.m).position
            cos_a, sin_a = np.cos(idx.m * alpha), np.sin(idx.m * alpha)
            out[i_cos] = c.c[i_cos] * cos_a - c.c[i_sin] * sin_a
            out[i_sin] = c.c[i_cos] * sin_a + c.c[i_sin] * cos_a
    return SphCoeffs(c.L, out)


class TestResidual(unittest.TestCase):
    """Testes para o resíduo Δu - 6 + 6eᵘ."""

    def test_zero_is_solution(self):
        """Testa resíduo nulo em u = 0."""
        self.assertEqual(MeanFieldService.residual(SphCoeffs.zeros(8)).norm(), 0.0)

    def test_constant_field(self):
        """Testa u constante: resíduo 6(eᶜ - 1) no modo (0,0)."""
        c = 0.1
        u = SphCoeffs.constant(c, 8)
        residual = MeanFieldService.residual(u)
        self.assertAlmostEqual(residual.get(0, 0), 6 * np.expm1(c) * 2 * np.sqrt(np.pi), places=13)
        self.assertLess(np.max(np.abs(residual.c[1:])), 1e-14)

    def test_lifted_form(self):
        """Testa a forma levantada (Δ+6)u - 6(1+u-eᵘ)."""
        u = SphHarmService.random_field(8, 0.1, trial_rng(2, 0))
        self.assertLess(MeanFieldService.lifted_form_check(u), 1e-13)

    def test_rotation_equivariance(self):
        """Testa residual(Ru) = R·residual(u) para rotação resolvida pela grade."""
        L = 8
        u = SphHarmService.random_field(L, 0.1, trial_rng(3, 0))
        alpha = 2 * np.pi * 7 / MeanFieldService.fine_grid(L).n_phi
        rotated = MeanFieldService.residual(_rotate_about_pole(u, alpha))
        expected = _rotate_about_pole(MeanFieldService.residual(u), alpha)
        np.testing.assert_allclose(rotated.c, expected.c, atol=1e-12)

    def test_matches_direct_evaluation(self):
        """Testa o resíduo contra Δu - 6 + 6eᵘ avaliado numa grade independente."""
        L = 8
        u = SphHarmService.random_field(L, 0.1, trial_rng(3, 1))
        grid = SphHarmService.build_grid(32)
        lap = SphHarmService.synthesize(SphHarmService.laplace_beltrami(u), grid).values
        values = SphHarmService.synthesize(u, grid).values
        direct = SphHarmService.analyze(GridField(grid, lap + 6.0 * np.expm1(values)), L)
        np.testing.assert_allclose(MeanFieldService.residual(u).c, direct.c, atol=1e-13)

    def test_overflow_guard(self):
        """Testa sup|u| > 50."""
        with self.assertRaises(RangeError):
            MeanFieldService.residual(SphCoeffs.constant(60.0, 8))

    def test_series_remainder(self):
        """Testa o resto de eᵘ perto de zero."""
        u = np.array([1e-6, -0.3, 0.4])
        expected = np.exp(u) - 1 - u - u ** 2 / 2
        np.testing.assert_allclose(_exp_remainder(u, 3), expected, rtol=1e-12, atol=1e-30)


class TestLyapunovSchmidt(unittest.TestCase):
    """Testes para a iteração de Lyapunov-Schmidt."""

    def test_zero_start(self):
        """Testa ponto inicial nulo."""
        state, trace = MeanFieldService.ls_iterate(SphCoeffs.zeros(8))
        self.assertTrue(state.converged)
        self.assertEqual(state.iterations, 0)
        self.assertEqual(len(trace), 1)

    def test_small_start_converges_to_zero(self):
        """Testa convergência de um ponto pequeno para u = 0."""
        u0 = SphHarmService.random_field(8, 0.05, trial_rng(0, 0))
        state, trace = MeanFieldService.ls_iterate(u0, delta0=0.05)
        self.assertTrue(state.converged)
        self.assertLessEqual(state.sup_norm, Config.ZERO_SOLUTION_TOL)
        frame = trace.to_frame()
        self.assertEqual(list(frame.columns), ['k', 'sup_norm', 'residual', 'u1_norm', 'u2_norm'])
        self.assertTrue(np.all(np.diff(frame['k']) == 1))

    def test_step_from_degree_two(self):
        """Testa u = δY20: a nova norma de u2 fica abaixo de Cδ^{3/2}."""
        for delta in (0.05, 0.01):
            state = MeanFieldService.state(SphCoeffs.unit(HarmonicIndex(2, 0), 12) * delta)
            new = MeanFieldService.ls_step(state)
            self.assertLessEqual(new.u2.norm(), 10.0 * delta ** 1.5)
            self.assertGreater(new.u2.norm(), 0.0)

    def test_step_from_degree_four(self):
        """Testa u = δY40: o novo u1 fica abaixo de Cδ²."""
        delta = 0.05
        state = MeanFieldService.state(SphCoeffs.unit(HarmonicIndex(4, 0), 12) * delta)
        new = MeanFieldService.ls_step(state)
        u1_sup = SphHarmService.synthesize(new.u1, SphHarmService.build_grid(12)).sup()
        self.assertLessEqual(u1_sup, 10.0 * delta ** 2)

    def test_trace_decreases(self):
        """Testa sup|u_k| estritamente decrescente após o primeiro passo."""
        u0 = SphHarmService.random_field(8, 0.05, trial_rng(0, 1))
        state, trace = MeanFieldService.ls_iterate(u0, delta0=0.05)
        self.assertTrue(state.converged)
        self.assertTrue(np.all(np.diff(trace.sup_norms[1:]) < 0))

    def test_large_start_leaves_regime(self):
        """Testa sup|u| ≥ 1: a iteração para sem convergir."""
        state, _ = MeanFieldService.ls_iterate(SphCoeffs.constant(1.5, 8))
        self.assertFalse(state.converged)


class TestNewton(unittest.TestCase):
    """Testes para o Newton regularizado."""

    def test_band_requirement(self):
        """Testa banda menor que 8."""
        with self.assertRaises(ConfigurationError):
            MeanFieldService.newton_solve(SphCoeffs.zeros(4))

    def test_converges_to_zero(self):
        """Testa Newton a partir de um ponto pequeno."""
        u0 = SphHarmService.random_field(8, 0.05, trial_rng(4, 0))
        state = MeanFieldService.newton_solve(u0)
        self.assertLessEqual(state.sup_norm, 1e-10)
        self.assertLess(state.residual_norm, 1e-11)

    def test_bordered_matrix_at_zero(self):
        """Testa a matriz bordeada bem condicionada onde J(0) é singular."""
        J = MeanFieldService.jacobian(SphCoeffs.zeros(8))
        M = MeanFieldService.bordered_matrix(J)
        self.assertEqual(M.shape, (86, 86))
        np.testing.assert_array_equal(M[4:9, 81:], np.eye(5))
        np.testing.assert_array_equal(M[81:, 4:9], np.eye(5))
        self.assertEqual(np.linalg.matrix_rank(J), 76)
        self.assertLess(np.linalg.cond(M), 100.0)

    def test_constant_log2_start(self):
        """Testa u0 = log 2 constante sem sistema mal condicionado."""
        with warnings.catch_warnings():
            warnings.simplefilter('error', LinAlgWarning)
            state = MeanFieldService.newton_solve(SphCoeffs.constant(np.log(2.0), 8))
        self.assertTrue(state.converged)
        self.assertLessEqual(state.sup_norm, Config.ZERO_SOLUTION_TOL)

    def test_solvers_agree(self):
        """Testa Newton e Lyapunov-Schmidt chegando ao mesmo limite."""
        u0 = SphHarmService.random_field(8, 0.05, trial_rng(4, 1))
        ls_state, _ = MeanFieldService.ls_iterate(u0)
        newton_state = MeanFieldService.newton_solve(u0)
        self.assertTrue(ls_state.converged and newton_state.converged)
        distance = SphHarmService.synthesize(ls_state.u - newton_state.u, MeanFieldService.fine_grid(8)).sup()
        self.assertLessEqual(distance, 1e-10)

    def test_centroid_of_degree_one(self):
        """Testa ∫x₃e^{az} = 2πΣ_{k ímpar} 2aᵏ/(k!(k+2)) com a = 0.1√(3/4π)."""
        u = SphCoeffs.unit(HarmonicIndex(1, 0), 8) * 0.1
        a = 0.1 * np.sqrt(3 / (4 * np.pi))
        expected = 2 * np.pi * sum(2 * a ** k / (factorial(k) * (k + 2)) for k in range(1, 21, 2))
        x1, x2, x3 = MeanFieldService.centroid_residual(u)
        self.assertAlmostEqual(x3, expected, delta=1e-12)
        self.assertGreater(x3, 0.2)
        self.assertAlmostEqual(x1, 0.0, delta=1e-14)
        self.assertAlmostEqual(x2, 0.0, delta=1e-14)

    def test_jacobian_at_zero(self):
        """Testa J(0) = diag(6 - l(l+1))."""
        J = MeanFieldService.jacobian(SphCoeffs.zeros(8))
        degrees = SphCoeffs.zeros(8).degrees()
        np.testing.assert_allclose(J, np.diag(6.0 - degrees * (degrees + 1)), atol=1e-14)

    def test_centroid_of_zero(self):
        """Testa centróide nulo da esfera redonda."""
        np.testing.assert_allclose(MeanFieldService.centroid_residual(SphCoeffs.zeros(8)), 0.0, atol=1e-14)


class TestProjectionIdentity(unittest.TestCase):
    """Testes para a identidade |P₂(u₂²)| = (1/7)√(5/π)|u₂|²."""

    def test_constant(self):
        """Testa a constante (1/7)√(5/π)."""
        self.assertAlmostEqual(P2_NORM_CONSTANT, np.sqrt(5 / np.pi) / 7, places=15)

    def test_closed_form_matches_quadrature(self):
        """Testa a forma fechada de P₂(u₂²) contra a quadratura."""
        rng = trial_rng(9, 0)
        for _ in range(5):
            v = E2Vector(rng.standard_normal(5))
            u2 = v.to_coeffs(2)
            numeric = SphHarmService.project_E2(SphHarmService.product_project(u2, u2, L_out=4))
            np.testing.assert_allclose(MeanFieldService.p2_closed_form(v).lam, numeric.lam, atol=1e-12)

    def test_norm_identity_single(self):
        """Testa a identidade em Y20."""
        lhs, rhs = MeanFieldService.p2_norm_identity_check(E2Vector([0, 0, 1, 0, 0]))
        self.assertAlmostEqual(lhs, rhs, places=13)

    def test_sweep(self):
        """Testa a varredura de vetores unitários."""
        draws = 1000 if SLOW else 50
        self.assertLess(MeanFieldService.p2_identity_sweep(draws, seed=0), 1e-12)


class TestUniqueness(unittest.TestCase):
    """Testes para o experimento de unicidade local."""

    def test_small_experiment(self):
        """Testa tentativas pequenas: todas convergem para zero."""
        report = MeanFieldService.uniqueness_experiment(0.05, 3, seed=1, L=8)
        self.assertEqual(report.converged_to_zero, 3)
        self.assertTrue(report.all_zero)
        self.assertEqual(len(report.traces), 3)
        self.assertLessEqual(report.max_solver_distance, 1e-10)
        data = report.to_dict()
        self.assertEqual(data['trials'], 3)
        self.assertEqual(data['converged'], 3)

    def test_thread_pool_matches_serial(self):
        """Testa resultado idêntico com e sem threads."""
        serial = MeanFieldService.uniqueness_experiment(0.05, 2, seed=3, L=8, workers=1)
        pooled = MeanFieldService.uniqueness_experiment(0.05, 2, seed=3, L=8, workers=2)
        for a, b in zip(serial.traces, pooled.traces):
            np.testing.assert_array_equal(a.sup_norms, b.sup_norms)

    def test_delta_bounds(self):
        """Testa delta fora de [0, 0.2]."""
        with self.assertRaises(PreconditionError):
            MeanFieldService.uniqueness_experiment(0.3, 1)

    def test_band_bounds(self):
        """Testa banda insuficiente."""
        with self.assertRaises(ConfigurationError):
            MeanFieldService.uniqueness_experiment(0.05, 1, L=6)

    @unittest.skipUnless(SLOW, "varredura completa só com HAWKLAB_SLOW=1")
    def test_acceptance_sweep(self):
        """Testa 100 tentativas em delta = 0.05, banda 12."""
        report = MeanFieldService.uniqueness_experiment(0.05, 100, seed=0, L=12, workers=4)
        self.assertTrue(report.all_zero)
        self.assertGreaterEqual(report.decay_exponent_estimate, 1.4)


class TestRecords(unittest.TestCase):
    """Testes para traços e relatórios."""

    def test_trace_order(self):
        """Testa passos fora de ordem."""
        state = MeanFieldService.state(SphCoeffs.zeros(8))
        trace = IterationTrace(delta0=0.0)
        trace.append(0, state)
        with self.assertRaises(ValueError):
            trace.append(0, state)

    def test_report_counts(self):
        """Testa contagem inconsistente de tentativas."""
        with self.assertRaises(ValueError):
            UniquenessReport(
                delta=0.05, trials=2, seed=0, converged_to_zero=1, nonzero_candidates=[],
                decay_exponent_estimate=1.5, min_decay_ratio=1.5, effective_constant=1.0,
                worst_residual=0.0, max_solver_distance=0.0, traces=[],
            )

    def test_classify_trial(self):
        """Testa zero, sem convergência e candidato não nulo."""
        zero = MeanFieldService.state(SphCoeffs.zeros(8))
        small = MeanFieldService.state(SphCoeffs.constant(1e-12, 8), converged=False)
        large = MeanFieldService.state(SphCoeffs.constant(0.1, 8))
        self.assertEqual(MeanFieldService.classify_trial(0, zero, zero), 'zero')
        self.assertEqual(MeanFieldService.classify_trial(1, zero, small), 'non_converged')
        candidate = MeanFieldService.classify_trial(2, zero, large)
        self.assertIsInstance(candidate, NonzeroCandidate)
        self.assertEqual(candidate.solver, 'newton')
        self.assertTrue(candidate.converged)

    def test_non_converged_counted_apart(self):
        """Testa tentativas sem convergência fora da lista de candidatos."""
        report = UniquenessReport(
            delta=0.05, trials=2, seed=0, converged_to_zero=1, nonzero_candidates=[],
            decay_exponent_estimate=1.5, min_decay_ratio=1.5, effective_constant=1.0,
            worst_residual=0.0, max_solver_distance=0.0, non_converged_trials=[1],
        )
        self.assertFalse(report.all_zero)
        data = report.to_dict()
        self.assertEqual(data['non_converged'], 1)
        self.assertEqual(data['non_converged_trials'], [1])
        self.assertEqual(data['nonzero_candidates'], [])

    def test_nearly_round_relation(self):
        """Testa K - 1 = 2(1 - e^{-u}) na solução nula."""
        state = MeanFieldService.state(SphCoeffs.zeros(8))
        self.assertLess(MeanFieldService.nearly_round_relation_check(state), 1e-12)

    def test_nearly_round_requires_solution(self):
        """Testa a relação fora de uma solução."""
        state = MeanFieldService.state(SphHarmService.random_field(8, 0.1, trial_rng(0, 0)))
        with self.assertRaises(PreconditionError):
            MeanFieldService.nearly_round_relation_check(state)


if __name__ == '__main__':
    unittest.main()
