"""
Serviço para métricas rotacionalmente simétricas: esferas centradas, perfil
isoperimétrico candidato, massa de Hawking e verificações de comparação.
"""
import logging
import warnings
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import IntegrationWarning, quad, solve_ivp
from scipy.optimize import brentq

from src.config.settings import Config
from src.models.radial import (
    AsymptoticsReport, CurvatureReport, FlowReport, MonotonicityReport, ProfileCurve,
    ProfileSample, RadialMetric, ShiReport, SphereData,
)
from src.models.spectral import SurfaceGeometry
from src.services.surfspec_service import SurfSpecService
from src.utils.errors import (
    DomainError, FormulaRegressionError, IntegrationError, PreconditionError, RangeError,
)
from src.utils.helpers import strictly_increasing

logger = logging.getLogger(__name__)

EUCLIDEAN_CONSTANT = (36.0 * np.pi) ** (1.0 / 3.0)
_FOUR_PI = 4.0 * np.pi
_SIXTEEN_PI = 16.0 * np.pi


def _quad(func, a: float, b: float, rtol: float, **kwargs) -> float:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always', IntegrationWarning)
        value, error = quad(func, a, b, epsabs=0.0, epsrel=rtol, limit=200, **kwargs)
    if not np.isfinite(value):
        raise IntegrationError(f"quadratura não finita em [{a:.6g}, {b:.6g}]")
    if caught and error > 1e3 * rtol * abs(value):
        logger.error(f"Quadratura sem convergência em [{a:.6g}, {b:.6g}]: erro estimado {error:.3e}")
        raise IntegrationError(f"quadratura sem convergência em [{a:.6g}, {b:.6g}] (erro {error:.3e})")
    return value


def _volume_density(metric: RadialMetric):
    return lambda s: _FOUR_PI * s * s / np.sqrt(metric.phi(s))


def _volume_between(metric: RadialMetric, a: float, b: float, rtol: float) -> float:
    """∫_a^b 4πs²φ^{-1/2} ds com sinal; singularidade de horizonte tratada por peso algébrico."""
    if a > b:
        return -_volume_between(metric, b, a, rtol)
    if a == b:
        return 0.0
    if metric.has_horizon and a <= metric.r_min:
        r_min = metric.r_min
        edge = _FOUR_PI * r_min ** 2 / np.sqrt(metric.dphi(r_min))

        def smooth(s):
            d = s - r_min
            return edge if d <= 0 else _FOUR_PI * s * s * np.sqrt(d / metric.phi(s))

        return _quad(smooth, r_min, b, rtol, weight='alg', wvar=(-0.5, 0.0))
    return _quad(_volume_density(metric), a, b, rtol)


def _arc_between(metric: RadialMetric, a: float, b: float) -> float:
    """Distância radial ∫_a^b φ^{-1/2} ds."""
    if a > b:
        return -_arc_between(metric, b, a)
    return _quad(lambda s: 1.0 / np.sqrt(metric.phi(s)), a, b, Config.INCREMENT_RTOL)


def _solve_increment(func, target: float, guess: float, lower: float) -> float:
    """Raiz de func(x) = target com x do sinal de target, func crescente e func(0) = 0."""
    if target == 0:
        return 0.0
    if target > 0:
        hi = 2.0 * guess
        while func(hi) < target:
            hi *= 2.0
        lo = 0.0
    else:
        lo = 2.0 * guess
        if lo <= lower or func(lo) > target:
            lo = lower
        hi = 0.0
    return brentq(lambda x: func(x) - target, lo, hi, xtol=1e-300, rtol=1e-15, maxiter=200)


def _radius_increment(metric: RadialMetric, r: float, dV: float) -> float:
    """Δr com ∫_r^{r+Δr} 4πs²φ^{-1/2} ds = dV."""
    rate = _FOUR_PI * r * r / np.sqrt(metric.phi(r))
    return _solve_increment(
        lambda x: _volume_between(metric, r, r + x, Config.INCREMENT_RTOL),
        dV, dV / rate, metric.r_min - r,
    )


def _arc_increment(metric: RadialMetric, r: float, dt: float) -> float:
    """Δr percorrido pelo fluxo normal unitário em tempo dt."""
    return _solve_increment(
        lambda x: _arc_between(metric, r, r + x),
        dt, dt * np.sqrt(metric.phi(r)), metric.r_min - r,
    )


def _area_increment(r: float, dr: float) -> float:
    return _FOUR_PI * dr * (2.0 * r + dr)


def _sinh2_minus_2x(x: float) -> float:
    """sinh(2x) - 2x sem cancelamento para x pequeno."""
    if abs(x) >= 0.5:
        return np.sinh(2.0 * x) - 2.0 * x
    y = 2.0 * x
    term, total = y ** 3 / 6.0, 0.0
    for k in range(5, 60, 2):
        total += term
        term *= y * y / (k * (k - 1))
    return total


class RotSymService:
    """Operações sobre métricas g = φ(r)⁻¹dr² + r²g_{S²}."""

    @staticmethod
    def _check_radius(metric: RadialMetric, r: float):
        if r <= metric.r_min:
            raise DomainError(f"raio {r} não está acima de r_min = {metric.r_min:.12g}")
        if not metric.phi(r) > 0:
            raise DomainError(f"φ({r}) = {metric.phi(r)} não é positivo")

    @staticmethod
    def volume(metric: RadialMetric, r: float, rtol: Optional[float] = None) -> float:
        """Volume da região entre r_min e a esfera de raio r."""
        RotSymService._check_radius(metric, r)
        return _volume_between(metric, metric.r_min, r, Config.QUAD_RTOL if rtol is None else rtol)

    @staticmethod
    def hawking_mass_sphere(metric: RadialMetric, r: float) -> float:
        """m_H da esfera centrada: (r/2)(1 - φ), ou (r/2)(1 + r² - φ) no modo hiperbólico."""
        excess = r * r if metric.mode == 'hyperbolic' else 0.0
        return 0.5 * r * (1.0 + excess - metric.phi(r))

    @staticmethod
    def scalar_curvature(metric: RadialMetric, r: float) -> float:
        phi, dphi = metric.phi(r), metric.dphi(r)
        return -2.0 * dphi / r + 2.0 * (1.0 - phi) / (r * r)

    @staticmethod
    def sphere_data(metric: RadialMetric, r: float) -> SphereData:
        """
        Geometria da esfera centrada de raio de área r.

        Args:
            metric (RadialMetric): Métrica
            r (float): Raio de área (> r_min)

        Returns:
            SphereData: Área, curvaturas, volume e massa de Hawking
        """
        RotSymService._check_radius(metric, r)
        phi, dphi = metric.phi(r), metric.dphi(r)
        H = 2.0 * np.sqrt(phi) / r
        return SphereData(
            r=r,
            area=_FOUR_PI * r * r,
            H=H,
            A_sq=0.5 * H * H,
            A0_sq=0.0,
            Ric_nn=-dphi / r,
            R=RotSymService.scalar_curvature(metric, r),
            V=RotSymService.volume(metric, r),
            m_H=RotSymService.hawking_mass_sphere(metric, r),
        )

    @staticmethod
    def curvature_check(metric: RadialMetric, r_samples: Sequence[float]) -> CurvatureReport:
        """
        Confere R e Ric(n,n) com os valores fechados de cada família.

        Raises:
            FormulaRegressionError: Desvio acima de TOL_CURVATURE
        """
        radii, Rs, Rics = [], [], []
        worst, worst_dphi = 0.0, 0.0
        for r in r_samples:
            RotSymService._check_radius(metric, r)
            R = RotSymService.scalar_curvature(metric, r)
            ric = -metric.dphi(r) / r
            expected = {
                'flat': (0.0, 0.0),
                'schwarzschild': (0.0, None),
                'hyperbolic': (-6.0, -2.0),
                'ads_schwarzschild': (-6.0, None),
                'mass_profile': (4.0 * metric.dmass(r) / (r * r), None),
            }.get(metric.kind, (None, None))

            deviation = 0.0
            if expected[0] is not None:
                deviation = max(deviation, abs(R - expected[0]))
            if expected[1] is not None:
                deviation = max(deviation, abs(ric - expected[1]))
            if deviation > Config.TOL_CURVATURE:
                logger.error(f"Curvatura de {metric.kind} em r={r}: desvio {deviation:.3e}")
                raise FormulaRegressionError(
                    f"curvatura de {metric.kind} fora do valor fechado em r={r} (desvio {deviation:.3e})"
                )

            # φ' fechado contra diferença central com extrapolação
            h = 1e-3 * r
            if r - 2 * h > metric.r_min:
                d1 = (metric.phi(r + h) - metric.phi(r - h)) / (2 * h)
                d2 = (metric.phi(r + 2 * h) - metric.phi(r - 2 * h)) / (4 * h)
                fd = (4.0 * d1 - d2) / 3.0
                worst_dphi = max(worst_dphi, abs(fd - metric.dphi(r)) / max(1.0, abs(metric.dphi(r))))

            worst = max(worst, deviation)
            radii.append(float(r))
            Rs.append(R)
            Rics.append(ric)

        return CurvatureReport(metric.kind, radii, Rs, Rics, worst, worst_dphi)

    @staticmethod
    def gauss_equation_check(metric: RadialMetric, r: float) -> float:
        """|R/2 - Ric(n,n) + ½(H² - |A|²) - 1/r²| na esfera centrada."""
        s = RotSymService.sphere_data(metric, r)
        K = 0.5 * s.R - s.Ric_nn + 0.5 * (s.H ** 2 - s.A_sq)
        return abs(K - 1.0 / (r * r))

    @staticmethod
    def stability_gap(metric: RadialMetric, r: float) -> float:
        """Λ₂ da esfera centrada: 2/r² - 2φ/r² + φ'/r."""
        RotSymService._check_radius(metric, r)
        return (2.0 - 2.0 * metric.phi(r)) / (r * r) + metric.dphi(r) / r

    @staticmethod
    def surface_geometry(metric: RadialMetric, r: float):
        """Dados extrínsecos da esfera no formato de SurfSpecService.cy_inequality_check."""
        s = RotSymService.sphere_data(metric, r)
        return SurfaceGeometry(H=s.H, A0_sq=s.A0_sq, R=s.R, area=s.area)

    @staticmethod
    def normal_flow_check(metric: RadialMetric, r0: float, t_span: Tuple[float, float] = (0.0, 1.0),
                          step: float = 1e-3, samples: Optional[int] = None) -> FlowReport:
        """
        Verifica dA/dt = ∫H, dV/dt = A e dH/dt = -|A|² - Ric(n,n) ao longo do fluxo normal unitário.

        Args:
            metric (RadialMetric): Métrica
            r0 (float): Raio inicial
            t_span (Tuple[float, float]): Intervalo de tempo
            step (float): Passo das diferenças centradas
            samples (int, optional): Número de instantes verificados

        Returns:
            FlowReport: Maiores resíduos das três identidades
        """
        RotSymService._check_radius(metric, r0)
        samples = Config.FLOW_SAMPLES if samples is None else samples
        t0, t1 = t_span

        def rhs(t, y):
            phi = metric.phi(y[0])
            if not phi > 0:
                return [np.nan]
            return [np.sqrt(phi)]

        solution = solve_ivp(rhs, t_span, [r0], method='DOP853', rtol=1e-13, atol=1e-14, dense_output=True)
        if not solution.success:
            raise RangeError(f"fluxo normal falhou: {solution.message}")

        times = np.linspace(t0 + 2 * step, t1 - 2 * step, samples)
        radii = solution.sol(times)[0]
        if np.any(~np.isfinite(radii)) or np.any(radii <= metric.r_min):
            raise RangeError(f"fluxo normal saiu do domínio r > {metric.r_min:.6g}")

        worst = np.zeros(3)
        for r in radii:
            RotSymService._check_radius(metric, r)
            s = RotSymService.sphere_data(metric, r)

            def centered(h):
                up, down = _arc_increment(metric, r, h), _arc_increment(metric, r, -h)
                dA = (_area_increment(r, up) - _area_increment(r, down)) / (2 * h)
                dV = (_volume_between(metric, r, r + up, Config.INCREMENT_RTOL)
                      - _volume_between(metric, r, r + down, Config.INCREMENT_RTOL)) / (2 * h)
                Hp = 2.0 * np.sqrt(metric.phi(r + up)) / (r + up)
                Hm = 2.0 * np.sqrt(metric.phi(r + down)) / (r + down)
                return np.array([dA, dV, (Hp - Hm) / (2 * h)])

            d = (4.0 * centered(step) - centered(2 * step)) / 3.0
            residuals = np.abs([
                d[0] - s.H * s.area,
                d[1] - s.area,
                d[2] + s.A_sq + s.Ric_nn,
            ])
            worst = np.maximum(worst, residuals)

        report = FlowReport(float(worst[0]), float(worst[1]), float(worst[2]), r0, (t0, t1))
        logger.info(f"Fluxo normal ({metric.kind}, r0={r0}): resíduos {np.array2string(worst, precision=3)}")
        return report

    @staticmethod
    def radius_for_volume(metric: RadialMetric, V: float) -> float:
        """Inverte V(r) por bracketing e bisseção."""
        if V <= 0:
            raise DomainError(f"volume deve ser positivo, recebeu {V}")
        lo = metric.r_min
        hi = max(2.0 * metric.r_min, (3.0 * V / _FOUR_PI) ** (1.0 / 3.0), 1e-12)
        for _ in range(200):
            if RotSymService.volume(metric, hi) >= V:
                break
            lo, hi = hi, 2.0 * hi
        else:
            raise DomainError(f"volume {V} fora do alcance da métrica")
        return brentq(lambda r: _volume_between(metric, metric.r_min, r, Config.QUAD_RTOL * 1e-3) - V,
                      lo, hi, xtol=1e-300, rtol=Config.ROOT_RTOL)

    @staticmethod
    def volume_grid(metric: RadialMetric, radii: Sequence[float]) -> np.ndarray:
        """Volumes das esferas de raios crescentes, acumulando cascas."""
        radii = np.asarray(radii, dtype=float)
        if not strictly_increasing(radii):
            raise DomainError("raios devem ser estritamente crescentes")
        volumes = np.empty_like(radii)
        volumes[0] = RotSymService.volume(metric, radii[0], rtol=Config.INCREMENT_RTOL)
        for k in range(1, len(radii)):
            volumes[k] = volumes[k - 1] + _volume_between(metric, radii[k - 1], radii[k], Config.INCREMENT_RTOL)
        return volumes

    @staticmethod
    def hawking_plus(I: float, I_plus: float, mode: str = 'flat', normalized: bool = False) -> float:
        """
        m⁺_H = √I(16π - I·I'₊²); no modo hiperbólico usa I(I'₊² - 4).

        Args:
            I (float): Área do perfil
            I_plus (float): Derivada à direita
            mode (str): 'flat' ou 'hyperbolic'
            normalized (bool): Divide por (16π)^{3/2}

        Returns:
            float: Massa de Hawking maximal
        """
        if I <= 0:
            raise DomainError(f"I deve ser positivo, recebeu {I}")
        shift = 4.0 if mode == 'hyperbolic' else 0.0
        value = np.sqrt(I) * (_SIXTEEN_PI - I * (I_plus ** 2 - shift))
        return float(value / _SIXTEEN_PI ** 1.5 if normalized else value)

    @staticmethod
    def _one_sided_derivative(metric: RadialMetric, r: float, h: float) -> float:
        """dI/dV unilateral (sinal de h) com dois níveis de Richardson."""
        def quotient(step):
            return _area_increment(r, _radius_increment(metric, r, step)) / step

        d1, d2, d4 = quotient(h), quotient(2 * h), quotient(4 * h)
        first, second = 2.0 * d1 - d2, 2.0 * d2 - d4
        return (4.0 * first - second) / 3.0

    @staticmethod
    def _second_derivative(metric: RadialMetric, r: float, h: float) -> float:
        def central(step):
            up = _area_increment(r, _radius_increment(metric, r, step))
            down = _area_increment(r, _radius_increment(metric, r, -step))
            return (up + down) / (step * step)

        return (4.0 * central(h) - central(2 * h)) / 3.0

    @staticmethod
    def profile_sample(metric: RadialMetric, V: float, r: Optional[float] = None) -> ProfileSample:
        r = RotSymService.radius_for_volume(metric, V) if r is None else r
        s = RotSymService.sphere_data(metric, r)
        I_plus = RotSymService._one_sided_derivative(metric, r, Config.DERIVATIVE_STEP * V)
        I_minus = RotSymService._one_sided_derivative(metric, r, -Config.DERIVATIVE_STEP * V)
        I_second = RotSymService._second_derivative(metric, r, Config.SECOND_DERIVATIVE_STEP * V)
        return ProfileSample(
            V=V, r=r, I=s.area, I_plus=I_plus, I_minus=I_minus, I_second=I_second, H=s.H,
            mH_plus=RotSymService.hawking_plus(s.area, I_plus, metric.mode),
            mH_plus_normalized=RotSymService.hawking_plus(s.area, I_plus, metric.mode, normalized=True),
            R_at_r=s.R, stability_gap=RotSymService.stability_gap(metric, r), Ric_nn=s.Ric_nn,
        )

    @staticmethod
    def profile_curve(metric: RadialMetric, V_grid: Sequence[float],
                      radii: Optional[Sequence[float]] = None) -> ProfileCurve:
        """
        Perfil candidato I(V) das esferas centradas.

        Args:
            metric (RadialMetric): Métrica
            V_grid (Sequence[float]): Volumes estritamente crescentes
            radii (Sequence[float], optional): Raios já conhecidos para cada volume

        Returns:
            ProfileCurve: Amostras (V, I, I'₊, I'₋, I'', H, m⁺_H, ...)
        """
        V_grid = np.asarray(V_grid, dtype=float)
        if V_grid.ndim != 1 or V_grid.size == 0:
            raise DomainError("grade de volumes vazia")
        if not strictly_increasing(V_grid):
            raise DomainError("grade de volumes deve ser estritamente crescente")
        if V_grid[0] <= 0:
            raise DomainError(f"volume {V_grid[0]} fora do alcance")

        samples = []
        for k, V in enumerate(V_grid):
            r = None if radii is None else float(radii[k])
            samples.append(RotSymService.profile_sample(metric, float(V), r))
        logger.info(f"Perfil candidato de {metric.kind}: {len(samples)} amostras")
        return ProfileCurve(metric=metric, samples=samples)

    @staticmethod
    def bray_bound(I: float, I_prime: float, mode: str = 'flat') -> float:
        """(16π - 3I'²I)/(4I²); com R ≥ -6 soma 12I ao numerador."""
        extra = 12.0 * I if mode == 'hyperbolic' else 0.0
        return (_SIXTEEN_PI - 3.0 * I_prime ** 2 * I + extra) / (4.0 * I * I)

    @staticmethod
    def monotonicity_report(curve: ProfileCurve, tol_scale: float = 1.0) -> MonotonicityReport:
        """
        Monotonicidade de m⁺_H e desigualdade diferencial de Bray.

        Args:
            curve (ProfileCurve): Perfil com ao menos 3 amostras
            tol_scale (float): Fator sobre as tolerâncias

        Returns:
            MonotonicityReport: Menor incremento, margem de Bray e verificações de derivadas
        """
        if len(curve) < 3:
            raise PreconditionError(f"monotonicidade exige ≥ 3 amostras, recebeu {len(curve)}")
        mode = curve.metric.mode
        V = curve.column('V')
        I = curve.column('I')
        I_plus = curve.column('I_plus')
        I_minus = curve.column('I_minus')
        I_second = curve.column('I_second')
        H = curve.column('H')
        mass = curve.column('mH_plus_normalized')

        increments = np.diff(mass)
        worst_inc = int(np.argmin(increments))

        bounds = np.array([RotSymService.bray_bound(i, d, mode) for i, d in zip(I, I_plus)])
        margins = bounds - I_second
        interior = slice(1, len(curve) - 1)
        bray_tol = Config.TOL_BRAY * tol_scale
        worst_bray = int(np.argmin(margins[interior])) + 1

        # I''·I² + ∫(|A|² + Ric(n,n)) = 0 nas esferas centradas
        integrand = 0.5 * H ** 2 + curve.column('Ric_nn')
        comparison = np.abs(I_second * I ** 2 + I * integrand) / np.maximum(1.0, I * np.abs(integrand))

        report = MonotonicityReport(
            min_increment=float(increments[worst_inc]),
            worst_increment_V=float(V[worst_inc + 1]),
            bray_min_margin=float(margins[worst_bray]),
            bray_worst_V=float(V[worst_bray]),
            bray_violations=int(np.sum(margins[interior] < -bray_tol)),
            max_kink=float(np.max(np.abs(I_plus - I_minus))),
            max_derivative_vs_H=float(max(np.max(np.abs(I_plus - H)), np.max(np.abs(I_minus - H)))),
            comparison_residual=float(np.max(comparison)),
            constant_mass=bool(np.ptp(mass) <= 1e-5),
            tolerance=Config.TOL_MONOTONE * tol_scale,
            bray_tolerance=bray_tol,
        )
        if not report.passed:
            logger.warning(f"Monotonicidade violada em {curve.metric.kind}: incremento mínimo "
                           f"{report.min_increment:.3e}, {report.bray_violations} violações de Bray")
        return report

    @staticmethod
    def hyperbolic_ball_volume(rho: float) -> float:
        """V(ρ) = π(sinh 2ρ - 2ρ)."""
        return np.pi * _sinh2_minus_2x(rho)

    @staticmethod
    def hyperbolic_ball_profile(V: float) -> float:
        """Área 4π sinh²ρ da bola geodésica hiperbólica de volume V."""
        if V <= 0:
            raise DomainError(f"volume deve ser positivo, recebeu {V}")
        hi = max(1.0, (3.0 * V / _FOUR_PI) ** (1.0 / 3.0))
        while RotSymService.hyperbolic_ball_volume(hi) < V:
            hi *= 2.0
        rho = brentq(lambda x: RotSymService.hyperbolic_ball_volume(x) - V, 0.0, hi,
                     xtol=1e-300, rtol=1e-15)
        return _FOUR_PI * np.sinh(rho) ** 2

    @staticmethod
    def shi_bound_check(curve: ProfileCurve, mode: Optional[str] = None,
                        tol_scale: float = 1.0) -> ShiReport:
        """
        Compara o perfil com o euclidiano (36π)^{1/3}V^{2/3} ou com a bola hiperbólica.

        Raises:
            PreconditionError: Métrica com horizonte ou sinal de curvatura não certificado
        """
        metric = curve.metric
        mode = metric.mode if mode is None else mode
        if metric.has_horizon:
            raise PreconditionError(f"comparação de perfil exige métrica sem horizonte ({metric.kind})")

        radii = curve.column('r')
        certification = RotSymService.curvature_check(metric, radii)
        floor = -6.0 if mode == 'hyperbolic' else 0.0
        if certification.min_R < floor - Config.TOL_CURVATURE:
            raise PreconditionError(
                f"curvatura escalar {certification.min_R:.6g} < {floor} em {metric.kind}: comparação não certificada"
            )

        V = curve.column('V')
        I = curve.column('I')
        if mode == 'hyperbolic':
            reference = np.array([RotSymService.hyperbolic_ball_profile(v) for v in V])
        else:
            reference = EUCLIDEAN_CONSTANT * V ** (2.0 / 3.0)

        tol = Config.TOL_SHI * tol_scale
        gaps = I - reference
        worst = int(np.argmax(gaps))
        report = ShiReport(
            mode=mode,
            max_gap=float(gaps[worst]),
            min_gap=float(np.min(gaps)),
            worst_V=float(V[worst]),
            equality=bool(np.all(np.abs(gaps) <= tol)),
            strict=bool(np.all(gaps < 0)),
            tolerance=tol,
        )
        logger.info(f"Cota de perfil ({mode}) em {metric.kind}: folga máxima {report.max_gap:.3e}, "
                    f"igualdade={report.equality}")
        return report

    @staticmethod
    def small_volume_asymptotics(metric: RadialMetric, volumes: Optional[Sequence[float]] = None,
                                 tol_scale: float = 1.0) -> AsymptoticsReport:
        """
        Razões I(V)/((36π)^{1/3}V^{2/3}) para V → 0 e o limite extrapolado.
        """
        if metric.has_horizon:
            raise PreconditionError(f"assintótica de volume pequeno exige métrica sem horizonte ({metric.kind})")
        volumes = 10.0 ** -np.arange(2, 9) if volumes is None else np.asarray(volumes, dtype=float)
        ratios = []
        for V in volumes:
            r = RotSymService.radius_for_volume(metric, V)
            ratios.append(_FOUR_PI * r * r / (EUCLIDEAN_CONSTANT * V ** (2.0 / 3.0)))
        ratios = np.array(ratios)
        limit = float(np.polyfit(volumes ** (2.0 / 3.0), ratios, 1)[1]) if len(volumes) >= 2 else float(ratios[-1])
        return AsymptoticsReport(tuple(volumes), tuple(ratios), limit, Config.TOL_ASYMPTOTIC * tol_scale)

    @staticmethod
    def cy_sphere_check(metric: RadialMetric, r: float, mode: Optional[str] = None):
        """Aplica cy_inequality_check a uma esfera centrada com estabilidade certificada."""
        gap = RotSymService.stability_gap(metric, r)
        if gap < -Config.TOL_MONOTONE:
            raise PreconditionError(f"esfera de raio {r} instável (Λ₂ = {gap:.3e})")
        geometry = RotSymService.surface_geometry(metric, r)
        return SurfSpecService.cy_inequality_check(geometry, metric.mode if mode is None else mode)
