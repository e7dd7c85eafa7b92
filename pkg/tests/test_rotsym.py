"""
Testes para métricas rotacionalmente simétricas, perfil candidato e cotas.
"""
import unittest
import sys
import os

import numpy as np

# Adiciona o diretório raiz ao path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.config.settings import Config
from src.models.radial import RadialMetric, CANDIDATE_LABEL, PROFILE_COLUMNS
from src.services.rotsym_service import RotSymService, EUCLIDEAN_CONSTANT
from src.utils.errors import ConfigurationError, DomainError, PreconditionError

SLOW = os.getenv('HAWKLAB_SLOW') == '1'
FOUR_PI = 4 * np.pi


class TestRadialMetric(unittest.TestCase):
    """Testes para as famílias de métricas."""

    def test_ads_horizon(self):
        """Testa o horizonte r³ + r = 2m (r = 1 para m = 1)."""
        metric = RadialMetric.ads_schwarzschild(1.0)
        self.assertAlmostEqual(metric.r_min, 1.0, places=14)
        self.assertEqual(metric.mode, 'hyperbolic')
        self.assertTrue(metric.has_horizon)

    def test_mass_profile_default_scale(self):
        """Testa a = 2m∞ e φ positivo."""
        metric = RadialMetric.mass_profile(1.0)
        self.assertEqual(metric.params['a'], 2.0)
        self.assertFalse(metric.has_horizon)
        self.assertAlmostEqual(metric.mass_function(1e4), 1.0, places=6)

    def test_mass_profile_with_horizon(self):
        """Testa perfil de massa concentrado demais."""
        with self.assertRaises(ConfigurationError):
            RadialMetric.mass_profile(1.0, a=0.5)

    def test_from_name(self):
        """Testa a construção pelo nome."""
        self.assertEqual(RadialMetric.from_name('schwarzschild', m=2.0).r_min, 4.0)
        with self.assertRaises(ConfigurationError):
            RadialMetric.from_name('kerr')

    def test_with_mode(self):
        """Testa troca do modo da massa."""
        metric = RadialMetric.flat().with_mode('hyperbolic')
        self.assertEqual(metric.mode, 'hyperbolic')
        with self.assertRaises(ConfigurationError):
            metric.with_mode('spherical')


class TestSphereData(unittest.TestCase):
    """Testes para a geometria das esferas centradas."""

    def test_flat_ball(self):
        """Testa volume e massa na bola euclidiana."""
        flat = RadialMetric.flat()
        self.assertAlmostEqual(RotSymService.volume(flat, 1.0), FOUR_PI / 3, places=12)
        s = RotSymService.sphere_data(flat, 2.0)
        self.assertAlmostEqual(s.H, 1.0)
        self.assertAlmostEqual(s.m_H, 0.0)

    def test_custom_constant_profile(self):
        """Testa φ ≡ 1 personalizado com derivada numérica."""
        custom = RadialMetric.custom(lambda r: 1.0)
        self.assertEqual(custom.dphi(3.0), 0.0)
        self.assertAlmostEqual(RotSymService.volume(custom, 1.0), FOUR_PI / 3, places=12)
        self.assertAlmostEqual(RotSymService.sphere_data(custom, 2.0).m_H, 0.0)

    def test_schwarzschild_mass(self):
        """Testa m_H = m nas esferas de Schwarzschild."""
        metric = RadialMetric.schwarzschild(1.0)
        for r in (2.1, 3.0, 5.0, 10.0, 50.0):
            with self.subTest(r=r):
                self.assertAlmostEqual(RotSymService.hawking_mass_sphere(metric, r), 1.0, places=12)
                self.assertAlmostEqual(RotSymService.sphere_data(metric, r).m_H, 1.0, places=12)

    def test_horizon_volume_finite(self):
        """Testa volume finito a partir do horizonte."""
        metric = RadialMetric.schwarzschild(1.0)
        self.assertTrue(np.isfinite(RotSymService.volume(metric, 3.0)))

    def test_radius_below_horizon(self):
        """Testa raio abaixo de r_min."""
        with self.assertRaises(DomainError):
            RotSymService.sphere_data(RadialMetric.schwarzschild(1.0), 1.5)

    def test_gauss_equation(self):
        """Testa a equação de Gauss nas esferas centradas."""
        for metric in (RadialMetric.schwarzschild(1.0), RadialMetric.hyperbolic(), RadialMetric.mass_profile(1.0)):
            self.assertLess(RotSymService.gauss_equation_check(metric, 3.0), 1e-12)

    def test_ads_mass(self):
        """Testa m_H = m em AdS-Schwarzschild no modo hiperbólico."""
        metric = RadialMetric.ads_schwarzschild(1.0)
        for r in (1.5, 3.0, 10.0):
            self.assertAlmostEqual(RotSymService.hawking_mass_sphere(metric, r), 1.0, delta=1e-9)

    def test_unit_ball_area(self):
        """Testa I(4π/3) = 4π."""
        flat = RadialMetric.flat()
        sample = RotSymService.profile_sample(flat, FOUR_PI / 3)
        self.assertAlmostEqual(sample.I, FOUR_PI, delta=1e-12)

    def test_hyperbolic_mass_vanishes(self):
        """Testa m_H = 0 em H³ no modo hiperbólico."""
        self.assertAlmostEqual(RotSymService.hawking_mass_sphere(RadialMetric.hyperbolic(), 2.0), 0.0)


class TestCurvature(unittest.TestCase):
    """Testes para a curvatura escalar fechada."""

    def test_closed_forms(self):
        """Testa R nas famílias com valor fechado."""
        radii = [2.5, 4.0, 8.0]
        cases = [
            (RadialMetric.flat(), 0.0),
            (RadialMetric.schwarzschild(1.0), 0.0),
            (RadialMetric.hyperbolic(), -6.0),
            (RadialMetric.ads_schwarzschild(1.0), -6.0),
        ]
        for metric, expected in cases:
            report = RotSymService.curvature_check(metric, radii)
            self.assertLess(report.max_deviation, 1e-10)
            np.testing.assert_allclose(report.R, expected, atol=1e-10)
            self.assertLess(report.max_dphi_deviation, 1e-8)

    def test_mass_profile_nonnegative(self):
        """Testa R = 4m'(r)/r² ≥ 0."""
        report = RotSymService.curvature_check(RadialMetric.mass_profile(1.0), np.linspace(0.1, 20, 15))
        self.assertGreaterEqual(report.min_R, 0.0)


class TestProfile(unittest.TestCase):
    """Testes para o perfil candidato I(V)."""

    def test_radius_for_volume(self):
        """Testa a inversão V(r) euclidiana."""
        self.assertAlmostEqual(RotSymService.radius_for_volume(RadialMetric.flat(), FOUR_PI / 3), 1.0, places=13)

    def test_flat_profile(self):
        """Testa I = (36π)^{1/3}V^{2/3} e I'₊ = H."""
        flat = RadialMetric.flat()
        radii = np.linspace(0.5, 3.0, 6)
        curve = RotSymService.profile_curve(flat, RotSymService.volume_grid(flat, radii), radii)
        V, I = curve.column('V'), curve.column('I')
        np.testing.assert_allclose(I, EUCLIDEAN_CONSTANT * V ** (2 / 3), rtol=1e-12)
        np.testing.assert_allclose(curve.column('I_plus'), curve.column('H'), rtol=1e-8)
        np.testing.assert_allclose(curve.column('mH_plus_normalized'), 0.0, atol=1e-8)
        self.assertEqual(curve.label, CANDIDATE_LABEL)
        self.assertEqual(list(curve.to_frame().columns), PROFILE_COLUMNS)

    def test_volume_grid_requires_increasing(self):
        """Testa raios fora de ordem."""
        with self.assertRaises(DomainError):
            RotSymService.volume_grid(RadialMetric.flat(), [1.0, 0.5])

    def test_profile_requires_positive_volume(self):
        """Testa volume nulo."""
        with self.assertRaises(DomainError):
            RotSymService.profile_curve(RadialMetric.flat(), [0.0, 1.0])

    def test_hawking_plus(self):
        """Testa m⁺_H na esfera euclidiana e na de Schwarzschild."""
        r = 3.0
        self.assertAlmostEqual(RotSymService.hawking_plus(FOUR_PI * r * r, 2 / r), 0.0, places=10)
        phi = 1 - 2 / r
        mass = RotSymService.hawking_plus(FOUR_PI * r * r, 2 * np.sqrt(phi) / r, normalized=True)
        self.assertAlmostEqual(mass, 1.0, places=12)

    def test_bray_equality_flat(self):
        """Testa I'' igual à cota de Bray na bola euclidiana."""
        r = 2.0
        bound = RotSymService.bray_bound(FOUR_PI * r * r, 2 / r)
        self.assertAlmostEqual(bound, -1 / (2 * np.pi * r ** 4), places=14)

    def test_schwarzschild_monotone(self):
        """Testa monotonicidade de m⁺_H e Bray em Schwarzschild."""
        metric = RadialMetric.schwarzschild(1.0)
        radii = np.linspace(2.1, 30.0, 25)
        curve = RotSymService.profile_curve(metric, RotSymService.volume_grid(metric, radii), radii)
        report = RotSymService.monotonicity_report(curve)
        self.assertTrue(report.passed)
        self.assertTrue(report.constant_mass)
        self.assertLess(report.max_kink, 1e-6)
        self.assertLess(report.comparison_residual, 1e-5)

    def test_bray_margin_absolute(self):
        """Testa a margem de Bray como diferença cota - I'' sem normalização."""
        flat = RadialMetric.flat()
        radii = np.linspace(0.3, 2.0, 6)
        curve = RotSymService.profile_curve(flat, RotSymService.volume_grid(flat, radii), radii)
        report = RotSymService.monotonicity_report(curve)
        I, I_plus, I_second = curve.column('I'), curve.column('I_plus'), curve.column('I_second')
        margins = np.array([RotSymService.bray_bound(i, d) for i, d in zip(I, I_plus)]) - I_second
        self.assertEqual(report.bray_min_margin, float(np.min(margins[1:-1])))
        self.assertEqual(report.bray_violations, int(np.sum(margins[1:-1] < -Config.TOL_BRAY)))

    def test_monotonicity_needs_samples(self):
        """Testa perfil com menos de 3 amostras."""
        flat = RadialMetric.flat()
        curve = RotSymService.profile_curve(flat, [1.0, 2.0])
        with self.assertRaises(PreconditionError):
            RotSymService.monotonicity_report(curve)


class TestComparison(unittest.TestCase):
    """Testes para a comparação com o perfil modelo."""

    def test_flat_equality(self):
        """Testa igualdade com o perfil euclidiano."""
        flat = RadialMetric.flat()
        radii = np.linspace(0.5, 4.0, 8)
        curve = RotSymService.profile_curve(flat, RotSymService.volume_grid(flat, radii), radii)
        report = RotSymService.shi_bound_check(curve)
        self.assertTrue(report.passed)
        self.assertTrue(report.equality)

    def test_mass_profile_strict(self):
        """Testa desigualdade estrita com massa positiva."""
        metric = RadialMetric.mass_profile(1.0)
        radii = np.linspace(0.5, 20.0, 12)
        curve = RotSymService.profile_curve(metric, RotSymService.volume_grid(metric, radii), radii)
        report = RotSymService.shi_bound_check(curve)
        self.assertTrue(report.passed)
        self.assertTrue(report.strict)

    def test_gaps_are_absolute(self):
        """Testa folgas I - (36π)^{1/3}V^{2/3} sem normalização."""
        metric = RadialMetric.mass_profile(1.0)
        radii = np.linspace(0.5, 20.0, 12)
        curve = RotSymService.profile_curve(metric, RotSymService.volume_grid(metric, radii), radii)
        report = RotSymService.shi_bound_check(curve)
        gaps = curve.column('I') - EUCLIDEAN_CONSTANT * curve.column('V') ** (2 / 3)
        self.assertEqual(report.max_gap, float(np.max(gaps)))
        self.assertEqual(report.min_gap, float(np.min(gaps)))
        self.assertEqual(report.worst_V, float(curve.column('V')[np.argmax(gaps)]))

    def test_hyperbolic_ball(self):
        """Testa H³ contra a bola geodésica hiperbólica."""
        metric = RadialMetric.hyperbolic()
        radii = np.linspace(0.2, 3.0, 8)
        curve = RotSymService.profile_curve(metric, RotSymService.volume_grid(metric, radii), radii)
        report = RotSymService.shi_bound_check(curve)
        self.assertEqual(report.mode, 'hyperbolic')
        self.assertTrue(report.equality)

    def test_hyperbolic_ball_profile(self):
        """Testa a inversão de V(ρ) = π(sinh 2ρ - 2ρ)."""
        rho = 1.3
        V = RotSymService.hyperbolic_ball_volume(rho)
        self.assertAlmostEqual(V, np.pi * (np.sinh(2 * rho) - 2 * rho), places=12)
        self.assertAlmostEqual(RotSymService.hyperbolic_ball_profile(V), FOUR_PI * np.sinh(rho) ** 2, places=10)

    def test_small_ball_series(self):
        """Testa V(ρ) ≈ 4πρ³/3 para ρ pequeno."""
        rho = 1e-4
        self.assertAlmostEqual(RotSymService.hyperbolic_ball_volume(rho) / (FOUR_PI * rho ** 3 / 3), 1.0, places=7)

    def test_horizon_rejected(self):
        """Testa métrica com horizonte."""
        metric = RadialMetric.schwarzschild(1.0)
        curve = RotSymService.profile_curve(metric, [1.0, 2.0, 3.0])
        with self.assertRaises(PreconditionError):
            RotSymService.shi_bound_check(curve)

    def test_uncertified_curvature(self):
        """Testa H³ no modo plano (R = -6 < 0)."""
        metric = RadialMetric.hyperbolic().with_mode('flat')
        curve = RotSymService.profile_curve(metric, [0.5, 1.0, 2.0])
        with self.assertRaises(PreconditionError):
            RotSymService.shi_bound_check(curve)

    def test_small_volume_limit(self):
        """Testa I/((36π)^{1/3}V^{2/3}) → 1."""
        report = RotSymService.small_volume_asymptotics(RadialMetric.mass_profile(1.0))
        self.assertTrue(report.passed)
        self.assertAlmostEqual(report.limit, 1.0, delta=1e-4)

    def test_small_volume_horizon(self):
        """Testa assintótica com horizonte."""
        with self.assertRaises(PreconditionError):
            RotSymService.small_volume_asymptotics(RadialMetric.schwarzschild(1.0))


class TestFlowAndStability(unittest.TestCase):
    """Testes para o fluxo normal e a estabilidade das esferas."""

    def test_all_kinds_flow(self):
        """Testa o fluxo normal nas cinco famílias."""
        cases = [
            (RadialMetric.flat(), 1.0),
            (RadialMetric.schwarzschild(1.0), 3.0),
            (RadialMetric.hyperbolic(), 0.5),
            (RadialMetric.ads_schwarzschild(1.0), 2.0),
            (RadialMetric.mass_profile(1.0), 1.0),
        ]
        for metric, r0 in cases:
            with self.subTest(kind=metric.kind):
                report = RotSymService.normal_flow_check(metric, r0, samples=6)
                self.assertLess(report.max(), 1e-8)

    def test_stability_gap(self):
        """Testa Λ₂ = 6m/r³ em Schwarzschild."""
        metric = RadialMetric.schwarzschild(1.0)
        self.assertAlmostEqual(RotSymService.stability_gap(metric, 3.0), 6.0 / 27.0, places=14)

    def test_cy_sphere(self):
        """Testa a desigualdade de área em esferas de Schwarzschild."""
        check = RotSymService.cy_sphere_check(RadialMetric.schwarzschild(1.0), 5.0)
        self.assertTrue(check.holds(1e-12))
        self.assertAlmostEqual(check.lhs, 16 * np.pi * 2 / 5, places=10)

    @unittest.skipUnless(SLOW, "perfil denso só com HAWKLAB_SLOW=1")
    def test_dense_mass_profile(self):
        """Testa 200 amostras do perfil de massa."""
        metric = RadialMetric.mass_profile(1.0)
        radii = np.linspace(0.1, 40.0, 200)
        curve = RotSymService.profile_curve(metric, RotSymService.volume_grid(metric, radii), radii)
        self.assertTrue(RotSymService.monotonicity_report(curve).passed)


if __name__ == '__main__':
    unittest.main()
