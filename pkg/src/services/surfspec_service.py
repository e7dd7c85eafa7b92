"""
Serviço de geometria intrínseca e espectros de métricas conformes na esfera.
"""
import logging
from typing import Optional, Tuple

import numpy as np
from scipy import linalg

from src.config.settings import Config
from src.models.harmonics import GridField, SphCoeffs
from src.models.spectral import (
    CYCheck, ConformalMetric, EigenCluster, GradientIdentity, SPHERE_CONFORMAL_VOLUME,
    SpectralOperator, SpectrumReport, SurfaceGeometry,
)
from src.services.sphharm_service import SphHarmService
from src.utils.errors import (
    AssemblyError, ConfigurationError, DimensionError, DomainError, PreconditionError,
)

logger = logging.getLogger(__name__)

MODES = ('flat', 'hyperbolic')


def _check_mode(mode: str):
    if mode not in MODES:
        raise DomainError(f"modo '{mode}' inválido; use {' ou '.join(MODES)}")


def _cluster(values: np.ndarray, tol: float):
    clusters = []
    for value in np.sort(values):
        if clusters and abs(value - clusters[-1][-1]) <= tol:
            clusters[-1].append(value)
        else:
            clusters.append([value])
    return [EigenCluster(float(np.mean(group)), len(group)) for group in clusters]


class SurfSpecService:
    """Operações sobre métricas conformes g = eᵘg₀."""

    @staticmethod
    def gauss_curvature(u: SphCoeffs) -> GridField:
        """
        K = e^{-u}(1 - ½Δ_{g₀}u) na grade sobreamostrada.

        Args:
            u (SphCoeffs): Expoente conforme (banda ≥ 4)

        Returns:
            GridField: Curvatura nodal
        """
        if u.L < Config.MIN_BAND_LIMIT:
            raise ConfigurationError(f"curvatura exige banda ≥ {Config.MIN_BAND_LIMIT}, recebeu {u.L}")
        grid = SphHarmService.build_grid(2 * u.L)
        values = SphHarmService.synthesize(u, grid).values
        lap = SphHarmService.synthesize(SphHarmService.laplace_beltrami(u), grid).values
        return GridField(grid, np.exp(-values) * (1.0 - 0.5 * lap))

    @staticmethod
    def area(u: SphCoeffs) -> float:
        grid = SphHarmService.build_grid(2 * max(u.L, Config.MIN_BAND_LIMIT // 2))
        return grid.integrate(np.exp(SphHarmService.synthesize(u, grid).values))

    @staticmethod
    def normalize_area(u: SphCoeffs) -> SphCoeffs:
        """Soma a u a constante que leva a área a 4π."""
        shift = np.log(SPHERE_CONFORMAL_VOLUME / SurfSpecService.area(u))
        return u + SphCoeffs.constant(shift, u.L)

    @staticmethod
    def conformal_metric(u: SphCoeffs) -> ConformalMetric:
        K = SurfSpecService.gauss_curvature(u)
        metric = ConformalMetric(u=u, area=SurfSpecService.area(u), K=K)
        logger.debug(f"Métrica conforme: área {metric.area:.12g}")
        return metric

    @staticmethod
    def potential(metric: ConformalMetric, shift: float = 0.0, curvature: float = 1.0) -> GridField:
        """Potencial q = curvature·K + shift na grade da métrica."""
        return GridField(metric.grid, curvature * metric.K.values + shift)

    @staticmethod
    def assemble_operator(metric: ConformalMetric, q: GridField) -> SpectralOperator:
        """
        Monta rigidez ⟨Y_a, (-Δ_{g₀} + eᵘq)Y_b⟩ e massa ⟨Y_a, eᵘY_b⟩.

        Args:
            metric (ConformalMetric): Métrica conforme
            q (GridField): Potencial na grade da métrica

        Returns:
            SpectralOperator: Matrizes simétricas, massa positiva definida
        """
        if q.grid.L != metric.grid.L:
            raise DimensionError(f"potencial na grade de banda {q.grid.L}, métrica na banda {metric.grid.L}")
        L = metric.u.L
        grid = metric.grid
        B = SphHarmService.basis(grid, L)
        weight = (grid.node_weights * metric.conformal_factor()).ravel()

        mass = B.T @ (weight[:, None] * B)
        stiffness = B.T @ ((weight * q.values.ravel())[:, None] * B)
        degrees = metric.u.degrees()
        stiffness += np.diag(degrees * (degrees + 1.0))

        mass = 0.5 * (mass + mass.T)
        stiffness = 0.5 * (stiffness + stiffness.T)
        try:
            linalg.cholesky(mass)
        except linalg.LinAlgError as e:
            logger.error("Matriz de massa não é positiva definida")
            raise AssemblyError("matriz de massa não é positiva definida") from e
        return SpectralOperator(q=q, stiffness=stiffness, mass=mass, L=L)

    @staticmethod
    def _eigh(operator: SpectralOperator, n_eigs: int):
        n = min(n_eigs, operator.mass.shape[0])
        try:
            return linalg.eigh(operator.stiffness, operator.mass, subset_by_index=[0, n - 1])
        except linalg.LinAlgError as e:
            raise AssemblyError(f"problema generalizado mal posto: {e}") from e

    @staticmethod
    def _check_band(metric: ConformalMetric):
        if metric.u.L < Config.SPECTRAL_MIN_BAND_LIMIT:
            raise ConfigurationError(
                f"espectro exige banda ≥ {Config.SPECTRAL_MIN_BAND_LIMIT}, recebeu {metric.u.L}"
            )

    @staticmethod
    def spectrum(metric: ConformalMetric, q: GridField, n_eigs: Optional[int] = None) -> SpectrumReport:
        """
        Menores autovalores de (-Δ_g + q)ψ = λψ pela forma generalizada em g₀.

        Args:
            metric (ConformalMetric): Métrica (banda ≥ 12)
            q (GridField): Potencial
            n_eigs (int, optional): Quantidade de autovalores

        Returns:
            SpectrumReport: Autovalores agrupados com λ₂, Λ₂ e a folga de El Soufi-Ilias
        """
        SurfSpecService._check_band(metric)
        n_eigs = Config.N_EIGS if n_eigs is None else n_eigs
        operator = SurfSpecService.assemble_operator(metric, q)
        values, vectors = SurfSpecService._eigh(operator, n_eigs)

        lambda2 = float(values[1])
        Lambda2 = SurfSpecService._meanzero_min(operator)
        gap = SurfSpecService._esi_gap(metric, q, lambda2)
        report = SpectrumReport(
            area=metric.area, eigenvalues=values, clusters=_cluster(values, Config.TOL_DEGENERACY),
            lambda2=lambda2, Lambda2=Lambda2, esi_gap=gap, eigenvectors=vectors,
        )
        logger.info(f"Espectro: λ₂={lambda2:.12g}, Λ₂={Lambda2:.12g}, folga={gap:.3e}")
        return report

    @staticmethod
    def _meanzero_min(operator: SpectralOperator) -> float:
        # ∫ψ dμ_g = 0  ⟺  cᵀ M e₀ = 0
        constant = np.zeros(operator.mass.shape[0])
        constant[0] = 2.0 * np.sqrt(np.pi)
        Z = linalg.null_space((operator.mass @ constant)[None, :])
        S = Z.T @ operator.stiffness @ Z
        M = Z.T @ operator.mass @ Z
        values = linalg.eigh(0.5 * (S + S.T), 0.5 * (M + M.T), eigvals_only=True, subset_by_index=[0, 0])
        return float(values[0])

    @staticmethod
    def lambda2_meanzero(metric: ConformalMetric, q: GridField) -> float:
        """Λ₂: menor quociente de Rayleigh sobre funções de média zero em g."""
        SurfSpecService._check_band(metric)
        return SurfSpecService._meanzero_min(SurfSpecService.assemble_operator(metric, q))

    @staticmethod
    def _esi_gap(metric: ConformalMetric, q: GridField, lambda2: float) -> float:
        return 2.0 * SPHERE_CONFORMAL_VOLUME + metric.integrate(q.values) - lambda2 * metric.area

    @staticmethod
    def esi_check(metric: ConformalMetric, q: GridField) -> float:
        """
        Folga [8π + ∫q dμ_g] - λ₂|Σ|, não negativa para esferas.
        """
        if abs(metric.area - SPHERE_CONFORMAL_VOLUME) > Config.TOL_AREA * SPHERE_CONFORMAL_VOLUME:
            raise PreconditionError(f"métrica sem área normalizada (área {metric.area:.12g})")
        return SurfSpecService.spectrum(metric, q, n_eigs=2).esi_gap

    @staticmethod
    def grad_identity_check(u: SphCoeffs, solution: bool = False) -> GradientIdentity:
        """
        Identidades de gradiente para φ = (x₁, x₂, x₃).

        Args:
            u (SphCoeffs): Expoente conforme
            solution (bool): Também compara |∇φ|² com 3 - K (u deve resolver Δu = 6 - 6eᵘ)

        Returns:
            GradientIdentity: sup|Σ|∇_gφᵢ|² - 2e^{-u}| e, se pedido, sup||∇_gφ|² - (3 - K)|
        """
        K = SurfSpecService.gauss_curvature(u)
        grid = K.grid
        exp_minus_u = np.exp(-SphHarmService.synthesize(u, grid).values)
        round_energy = sum(
            SphHarmService.gradient_norm_sq(SphHarmService.coordinate_field(i), grid).values
            for i in (1, 2, 3)
        )
        grad_sq = exp_minus_u * round_energy
        conformal_sup = float(np.max(np.abs(grad_sq - 2.0 * exp_minus_u)))

        solution_sup = None
        if solution:
            from src.services.meanfield_service import MeanFieldService
            residual = MeanFieldService.residual(u).norm()
            if residual > Config.SOLUTION_RESIDUAL:
                raise PreconditionError(f"u não resolve a equação de campo médio (resíduo {residual:.3e})")
            solution_sup = float(np.max(np.abs(grad_sq - (3.0 - K.values))))
        return GradientIdentity(conformal_sup, solution_sup)

    @staticmethod
    def eigenfunction_identity_check(metric: ConformalMetric) -> Tuple[float, float]:
        """
        Autofunções do triplo de autovalor zero de -Δ + K - 3, normalizadas para Σφᵢ² ≡ 1.

        Returns:
            Tuple[float, float]: (variação de Σφᵢ², sup||∇_gφ|² - (3 - K)|)
        """
        SurfSpecService._check_band(metric)
        q = SurfSpecService.potential(metric, shift=-3.0)
        _, vectors = SurfSpecService._eigh(SurfSpecService.assemble_operator(metric, q), 4)
        grid = metric.grid
        L = metric.u.L

        phis = [SphCoeffs(L, vectors[:, k]) for k in (1, 2, 3)]
        square_sum = sum(SphHarmService.synthesize(phi, grid).values ** 2 for phi in phis)
        scale = metric.area / metric.integrate(square_sum)
        square_sum = scale * square_sum

        round_energy = sum(SphHarmService.gradient_norm_sq(phi, grid).values for phi in phis) * scale
        grad_sq = round_energy / metric.conformal_factor()
        spread = float(np.max(square_sum) - np.min(square_sum))
        return spread, float(np.max(np.abs(grad_sq - (3.0 - metric.K.values))))

    @staticmethod
    def cy_inequality_check(geometry: SurfaceGeometry, mode: str = 'flat',
                            weights: Optional[np.ndarray] = None) -> CYCheck:
        """
        Os dois lados de 16π - ∫H² ≥ (2/3)∫(R + |A⁰|²) para superfícies estáveis.

        No modo hiperbólico usa ∫(H² - 4) e R + 6.
        """
        _check_mode(mode)
        H_sq = geometry.H_sq_integral()
        curvature = geometry.integral(geometry.R, weights) + geometry.integral(geometry.A0_sq, weights)
        if mode == 'hyperbolic':
            H_sq -= 4.0 * geometry.area
            curvature += 6.0 * geometry.area
        return CYCheck(lhs=16.0 * np.pi - H_sq, rhs=2.0 / 3.0 * curvature, mode=mode)

    @staticmethod
    def willmore_and_hawking(area: float, H_sq_integral: float, mode: str = 'flat') -> Tuple[float, float]:
        """
        Funcional de Willmore e massa de Hawking.

        Args:
            area (float): Área da superfície
            H_sq_integral (float): ∫H² dμ
            mode (str): 'flat' ou 'hyperbolic' (usa ∫(H² - 4))

        Returns:
            Tuple[float, float]: (W, m_H)
        """
        _check_mode(mode)
        if area <= 0:
            raise DomainError(f"área deve ser positiva, recebeu {area}")
        integral = H_sq_integral - 4.0 * area if mode == 'hyperbolic' else H_sq_integral
        willmore = 0.25 * integral
        mass = np.sqrt(area) * (16.0 * np.pi - integral) / (16.0 * np.pi) ** 1.5
        return float(willmore), float(mass)
