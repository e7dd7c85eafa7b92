"""
Serviço de harmônicos esféricos reais: avaliação, quadratura, transformadas e produtos.
"""
import logging
from functools import lru_cache
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.special import roots_legendre

from src.config.settings import Config
from src.models.harmonics import (
    E2Vector, GauntCheck, GauntIdentity, GauntReport, GridField, HarmonicIndex,
    SphCoeffs, SphGrid,
)
from src.utils.errors import (
    ConfigurationError, DimensionError, DomainError, IdentityViolationError,
    ResolutionError,
)

logger = logging.getLogger(__name__)

_PI = np.pi
_SQRT_PI = np.sqrt(np.pi)

# Formas fechadas da tabela real (l = 0, 1, 2, 4)
_CLOSED_FORMS = {
    (0, 0): lambda t, p: 0.5 * np.sqrt(1 / _PI) * np.ones_like(t),
    (1, -1): lambda t, p: np.sqrt(3 / (4 * _PI)) * np.sin(t) * np.sin(p),
    (1, 0): lambda t, p: np.sqrt(3 / (4 * _PI)) * np.cos(t) * np.ones_like(p),
    (1, 1): lambda t, p: np.sqrt(3 / (4 * _PI)) * np.sin(t) * np.cos(p),
    (2, -2): lambda t, p: 0.25 * np.sqrt(15 / _PI) * np.sin(t) ** 2 * np.sin(2 * p),
    (2, -1): lambda t, p: 0.25 * np.sqrt(15 / _PI) * np.sin(2 * t) * np.sin(p),
    (2, 0): lambda t, p: 0.25 * np.sqrt(5 / _PI) * (3 * np.cos(t) ** 2 - 1) * np.ones_like(p),
    (2, 1): lambda t, p: 0.25 * np.sqrt(15 / _PI) * np.sin(2 * t) * np.cos(p),
    (2, 2): lambda t, p: 0.25 * np.sqrt(15 / _PI) * np.sin(t) ** 2 * np.cos(2 * p),
    (4, -4): lambda t, p: 3 / 16 * np.sqrt(35 / _PI) * np.sin(t) ** 4 * np.sin(4 * p),
    (4, -3): lambda t, p: 0.75 * np.sqrt(35 / (2 * _PI)) * np.sin(t) ** 3 * np.cos(t) * np.sin(3 * p),
    (4, -2): lambda t, p: 3 / 8 * np.sqrt(5 / _PI) * np.sin(t) ** 2 * (7 * np.cos(t) ** 2 - 1) * np.sin(2 * p),
    (4, -1): lambda t, p: 3 / 8 * np.sqrt(10 / _PI) * np.sin(t) * np.cos(t) * (7 * np.cos(t) ** 2 - 3) * np.sin(p),
    (4, 0): lambda t, p: 3 / 16 * np.sqrt(1 / _PI) * (35 * np.cos(t) ** 4 - 30 * np.cos(t) ** 2 + 3) * np.ones_like(p),
    (4, 1): lambda t, p: 3 / 8 * np.sqrt(10 / _PI) * np.sin(t) * np.cos(t) * (7 * np.cos(t) ** 2 - 3) * np.cos(p),
    (4, 2): lambda t, p: 3 / 8 * np.sqrt(5 / _PI) * np.sin(t) ** 2 * (7 * np.cos(t) ** 2 - 1) * np.cos(2 * p),
    (4, 3): lambda t, p: 0.75 * np.sqrt(35 / (2 * _PI)) * np.sin(t) ** 3 * np.cos(t) * np.cos(3 * p),
    (4, 4): lambda t, p: 3 / 16 * np.sqrt(35 / _PI) * np.sin(t) ** 4 * np.cos(4 * p),
}

_C = 1.0 / (4 * _PI)
_S15 = np.sqrt(15 / _PI) / 14
_P5 = np.sqrt(5 / _PI) / 7
_H5 = np.sqrt(5 / _PI) / 14

# Tabela de produtos de harmônicos de grau 2 (mais o produto de grau 1 de Hersch).
# O termo Y_{2,-1} de Y_{2,2}Y_{2,-1} tem sinal negativo: é o que a simetria
# de ∫Y_aY_bY_c impõe a partir da linha Y_{2,-1}².
GAUNT_IDENTITIES = (
    GauntIdentity('Y_{2,0}^2', (2, 0), (2, 0), {
        (4, 0): 3 / 7 * np.sqrt(1 / _PI), (2, 0): _P5, (0, 0): _C}),
    GauntIdentity('Y_{2,-2}^2', (2, -2), (2, -2), {
        (4, 4): -0.5 * np.sqrt(5 / (7 * _PI)), (4, 0): np.sqrt(1 / _PI) / 14,
        (2, 0): -_P5, (0, 0): _C}),
    GauntIdentity('Y_{2,2}^2', (2, 2), (2, 2), {
        (4, 4): 0.5 * np.sqrt(5 / (7 * _PI)), (4, 0): np.sqrt(1 / _PI) / 14,
        (2, 0): -_P5, (0, 0): _C}),
    GauntIdentity('Y_{2,-1}^2', (2, -1), (2, -1), {
        (4, 2): -_P5, (4, 0): -2 / 7 * np.sqrt(1 / _PI), (2, 2): -_S15,
        (2, 0): _H5, (0, 0): _C}),
    GauntIdentity('Y_{2,1}^2', (2, 1), (2, 1), {
        (4, 2): _P5, (4, 0): -2 / 7 * np.sqrt(1 / _PI), (2, 2): _S15,
        (2, 0): _H5, (0, 0): _C}),
    GauntIdentity('Y_{2,-2}Y_{2,2}', (2, -2), (2, 2), {
        (4, -4): 0.5 * np.sqrt(5 / (7 * _PI))}),
    GauntIdentity('Y_{2,-2}Y_{2,0}', (2, -2), (2, 0), {
        (4, -2): _S15, (2, -2): -_P5}),
    GauntIdentity('Y_{2,2}Y_{2,0}', (2, 2), (2, 0), {
        (4, 2): _S15, (2, 2): -_P5}),
    GauntIdentity('Y_{2,-1}Y_{2,0}', (2, -1), (2, 0), {
        (4, -1): np.sqrt(15 / (2 * _PI)) / 7, (2, -1): _H5}),
    GauntIdentity('Y_{2,1}Y_{2,0}', (2, 1), (2, 0), {
        (4, 1): np.sqrt(15 / (2 * _PI)) / 7, (2, 1): _H5}),
    GauntIdentity('Y_{2,-1}Y_{2,1}', (2, -1), (2, 1), {
        (4, -2): _P5, (2, -2): _S15}),
    GauntIdentity('Y_{2,-2}Y_{2,-1}', (2, -2), (2, -1), {
        (4, 3): -0.5 * np.sqrt(5 / (14 * _PI)), (4, 1): -np.sqrt(5 / (2 * _PI)) / 14,
        (2, 1): _S15}),
    GauntIdentity('Y_{2,2}Y_{2,1}', (2, 2), (2, 1), {
        (4, 3): 0.5 * np.sqrt(5 / (14 * _PI)), (4, 1): -np.sqrt(5 / (2 * _PI)) / 14,
        (2, 1): _S15}),
    GauntIdentity('Y_{2,-2}Y_{2,1}', (2, -2), (2, 1), {
        (4, -3): 0.5 * np.sqrt(5 / (14 * _PI)), (4, -1): -np.sqrt(5 / (2 * _PI)) / 14,
        (2, -1): _S15}),
    GauntIdentity('Y_{2,2}Y_{2,-1}', (2, 2), (2, -1), {
        (4, -3): 0.5 * np.sqrt(5 / (14 * _PI)), (4, -1): np.sqrt(5 / (2 * _PI)) / 14,
        (2, -1): -_S15}),
    GauntIdentity('Y_{1,0}^2', (1, 0), (1, 0), {
        (2, 0): 1 / np.sqrt(5 * _PI), (0, 0): _C}),
)


def _normalized_legendre(L: int, x: np.ndarray) -> np.ndarray:
    """
    Funções de Legendre associadas totalmente normalizadas, sem fase de Condon-Shortley.

    Args:
        L (int): Grau máximo
        x (np.ndarray): Valores de cos θ

    Returns:
        np.ndarray: Array P[l, m, ...] com P[l, m] = N_lm P_l^m(x), m ≥ 0
    """
    x = np.asarray(x, dtype=np.float64)
    s = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    P = np.zeros((L + 1, L + 1) + x.shape)
    P[0, 0] = 1.0 / np.sqrt(4 * _PI)

    # Diagonal e subdiagonal
    for m in range(1, L + 1):
        P[m, m] = np.sqrt((2 * m + 1) / (2 * m)) * s * P[m - 1, m - 1]
    for m in range(L):
        P[m + 1, m] = np.sqrt(2 * m + 3) * x * P[m, m]

    # Recorrência de três termos em l
    for m in range(L + 1):
        for l in range(m + 2, L + 1):
            a = np.sqrt((4 * l * l - 1) / (l * l - m * m))
            b = np.sqrt(((l - 1) ** 2 - m * m) / (4 * (l - 1) ** 2 - 1))
            P[l, m] = a * (x * P[l - 1, m] - b * P[l - 2, m])
    return P


def _real_harmonics(L: int, theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Matriz [..., (L+1)²] dos harmônicos reais nos pontos (θ, φ) dados."""
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    P = _normalized_legendre(L, np.cos(theta))
    out = np.empty(theta.shape + (HarmonicIndex.count(L),))
    root2 = np.sqrt(2.0)
    for l in range(L + 1):
        base = l * l + l
        out[..., base] = P[l, 0]
        for m in range(1, l + 1):
            out[..., base + m] = root2 * P[l, m] * np.cos(m * phi)
            out[..., base - m] = root2 * P[l, m] * np.sin(m * phi)
    return out


@lru_cache(maxsize=None)
def _grid(L: int) -> SphGrid:
    x, w = roots_legendre(2 * L + 2)
    # θ crescente
    x, w = x[::-1], w[::-1]
    return SphGrid(L=L, theta_nodes=np.arccos(x), theta_weights=w, n_phi=4 * L + 1)


@lru_cache(maxsize=None)
def _basis(L_grid: int, L_basis: int) -> np.ndarray:
    grid = _grid(L_grid)
    theta, phi = grid.mesh()
    B = _real_harmonics(L_basis, theta, phi).reshape(-1, HarmonicIndex.count(L_basis))
    B.setflags(write=False)
    return B


class SphHarmService:
    """Operações sobre harmônicos esféricos reais em S²."""

    @staticmethod
    def eval_real_ylm(idx: HarmonicIndex, theta, phi):
        """
        Avalia o harmônico real ortonormal Y_{l,m}.

        Args:
            idx (HarmonicIndex): Índice (l, m)
            theta: Colatitude(s) em radianos
            phi: Longitude(s) em radianos

        Returns:
            float ou np.ndarray: Valor(es) do harmônico
        """
        theta_arr, phi_arr = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
        closed = _CLOSED_FORMS.get((idx.l, idx.m))
        if closed is not None:
            value = closed(theta_arr, phi_arr)
        else:
            value = _real_harmonics(idx.l, theta_arr, phi_arr)[..., idx.position]
        return float(value) if np.ndim(value) == 0 else value

    @staticmethod
    def build_grid(L: int) -> SphGrid:
        """
        Constrói a grade de quadratura para limite de banda L.

        Args:
            L (int): Limite de banda (≥ 4)

        Returns:
            SphGrid: 2L+2 nós de Gauss-Legendre em cos θ e 4L+1 longitudes
        """
        if L < Config.MIN_BAND_LIMIT:
            raise ConfigurationError(
                f"limite de banda {L} < {Config.MIN_BAND_LIMIT}: E₂ e produtos de grau 4 não cabem"
            )
        return _grid(int(L))

    @staticmethod
    def basis(grid: SphGrid, L: int) -> np.ndarray:
        """Matriz nós × coeficientes dos harmônicos até o grau L na grade."""
        return _basis(grid.L, L)

    @staticmethod
    def analyze(f: GridField, L_out: Optional[int] = None) -> SphCoeffs:
        """Coeficientes de um campo nodal por quadratura."""
        L_out = f.grid.L if L_out is None else L_out
        if L_out > f.grid.L:
            raise DimensionError(f"análise até grau {L_out} numa grade de banda {f.grid.L}")
        B = _basis(f.grid.L, L_out)
        weighted = (f.grid.node_weights * f.values).ravel()
        return SphCoeffs(L_out, B.T @ weighted)

    @staticmethod
    def synthesize(c: SphCoeffs, grid: SphGrid) -> GridField:
        """Valores nodais de um vetor de coeficientes."""
        if grid.L < c.L:
            raise DimensionError(f"síntese de banda {c.L} numa grade de banda {grid.L}")
        B = _basis(grid.L, c.L)
        return GridField(grid, (B @ c.c).reshape(grid.shape))

    @staticmethod
    def laplace_beltrami(c: SphCoeffs) -> SphCoeffs:
        """Aplica Δ da esfera redonda: multiplica (l, m) por -l(l+1)."""
        l = c.degrees()
        return SphCoeffs(c.L, -l * (l + 1) * c.c)

    @staticmethod
    def product_project(a: SphCoeffs, b: SphCoeffs, L_out: Optional[int] = None,
                        grid: Optional[SphGrid] = None) -> SphCoeffs:
        """
        Projeta o produto pontual a·b no limite de banda L_out.

        Args:
            a (SphCoeffs): Primeiro fator
            b (SphCoeffs): Segundo fator
            L_out (int, optional): Banda de saída (padrão: maior banda dos fatores)
            grid (SphGrid, optional): Grade de quadratura a usar

        Returns:
            SphCoeffs: Coeficientes do produto, exatos quando L_out ≥ L_a + L_b
        """
        L_out = max(a.L, b.L) if L_out is None else L_out
        if grid is None:
            grid = _grid(max(Config.MIN_BAND_LIMIT, a.L, b.L, L_out))
        elif a.L + b.L + L_out > 4 * grid.L:
            raise ResolutionError(
                f"grade de banda {grid.L} não integra produtos de grau {a.L}+{b.L} contra grau {L_out}"
            )
        fa = SphHarmService.synthesize(a, grid).values
        fb = SphHarmService.synthesize(b, grid).values
        return SphHarmService.analyze(GridField(grid, fa * fb), L_out)

    @staticmethod
    def project_E2(c: SphCoeffs) -> E2Vector:
        """Os cinco coeficientes de grau 2."""
        if c.L < 2:
            raise DomainError(f"projeção em E₂ exige banda ≥ 2, recebeu {c.L}")
        return E2Vector(c.c[4:9])

    @staticmethod
    def complement_E2(c: SphCoeffs) -> SphCoeffs:
        """Projetor complementar P⊥: zera o bloco de grau 2."""
        out = np.array(c.c)
        out[4:9] = 0.0
        return SphCoeffs(c.L, out)

    @staticmethod
    def gradient_norm_sq(c: SphCoeffs, grid: SphGrid) -> GridField:
        """
        |∇f|² nodal na métrica redonda, via |∇f|² = ½Δ(f²) - fΔf.
        """
        if grid.L < 2 * c.L:
            raise DimensionError(f"|∇f|² de banda {2 * c.L} numa grade de banda {grid.L}")
        square = SphHarmService.product_project(c, c, L_out=2 * c.L, grid=grid)
        half_lap_sq = SphHarmService.synthesize(SphHarmService.laplace_beltrami(square), grid).values
        f = SphHarmService.synthesize(c, grid).values
        lap_f = SphHarmService.synthesize(SphHarmService.laplace_beltrami(c), grid).values
        return GridField(grid, 0.5 * half_lap_sq - f * lap_f)

    @staticmethod
    def coordinate_field(i: int, L: int = 1) -> SphCoeffs:
        """Função coordenada x_i restrita a S² como combinação de grau 1."""
        positions = {1: (1, 1), 2: (1, -1), 3: (1, 0)}
        if i not in positions:
            raise DomainError(f"índice de coordenada {i} fora de 1..3")
        return SphCoeffs.unit(HarmonicIndex(*positions[i]), L) * np.sqrt(4 * _PI / 3)

    @staticmethod
    def hersch_energy(i: int, grid: Optional[SphGrid] = None) -> float:
        """∫|∇x_i|² na esfera redonda (vale 8π/3)."""
        grid = grid or _grid(Config.MIN_BAND_LIMIT)
        x_i = SphHarmService.coordinate_field(i)
        return SphHarmService.gradient_norm_sq(x_i, grid).integral()

    @staticmethod
    def orthonormality_sweep(L: int) -> float:
        """Maior desvio |∫Y_aY_b - δ_ab| na grade de banda L."""
        grid = SphHarmService.build_grid(L)
        B = _basis(grid.L, L)
        gram = B.T @ (grid.node_weights.ravel()[:, None] * B)
        return float(np.max(np.abs(gram - np.eye(gram.shape[0]))))

    @staticmethod
    def gaunt_table_check(L: int = 12, tolerance: Optional[float] = None,
                          strict: bool = True) -> GauntReport:
        """
        Reproduz numericamente a tabela de produtos de harmônicos.

        Args:
            L (int): Limite de banda da grade (≥ 8)
            tolerance (float, optional): Desvio absoluto máximo por coeficiente
            strict (bool): Levanta IdentityViolationError se alguma identidade falhar

        Returns:
            GauntReport: Desvio máximo por identidade
        """
        if L < Config.GAUNT_MIN_BAND_LIMIT:
            raise ResolutionError(
                f"verificação da tabela exige banda ≥ {Config.GAUNT_MIN_BAND_LIMIT}, recebeu {L}"
            )
        tolerance = Config.TOL_IDENTITY if tolerance is None else tolerance
        grid = SphHarmService.build_grid(L)
        checks = []
        for identity in GAUNT_IDENTITIES:
            a = SphCoeffs.unit(HarmonicIndex(*identity.left), L)
            b = SphCoeffs.unit(HarmonicIndex(*identity.right), L)
            product = SphHarmService.product_project(a, b, L_out=L, grid=grid)
            expected = SphCoeffs.from_dict(_as_coefficients(identity.expected), L)
            deviation = np.abs(product.c - expected.c)
            worst = HarmonicIndex.from_position(int(np.argmax(deviation)))
            max_dev = float(deviation.max())
            checks.append(GauntCheck(identity.name, max_dev, (worst.l, worst.m), max_dev <= tolerance))
            logger.debug(f"{identity.name}: desvio máximo {max_dev:.3e} em {worst!r}")

        report = GauntReport(L=L, tolerance=tolerance, checks=tuple(checks))
        if report.failures:
            names = ', '.join(f"{c.name} (coeficiente {c.worst_coefficient})" for c in report.failures)
            logger.error(f"Identidades da tabela violadas: {names}")
            if strict:
                raise IdentityViolationError(f"identidades violadas: {names}", report=report)
        else:
            logger.info(f"Tabela de produtos reproduzida: {len(checks)}/{len(checks)} identidades")
        return report

    @staticmethod
    def random_field(L: int, sup_bound: float, rng: np.random.Generator) -> SphCoeffs:
        """Campo aleatório de banda L escalado para sup|u| = sup_bound na grade fina."""
        degrees = np.floor(np.sqrt(np.arange(HarmonicIndex.count(L))))
        c = SphCoeffs(L, rng.standard_normal(HarmonicIndex.count(L)) / (1.0 + degrees) ** 2)
        if sup_bound == 0.0:
            return SphCoeffs.zeros(L)
        sup = SphHarmService.synthesize(c, _grid(max(Config.MIN_BAND_LIMIT, 2 * L))).sup()
        return c * (sup_bound / sup)


def _as_coefficients(expected: Dict[Tuple[int, int], float]) -> Dict[Tuple[int, int], float]:
    """Converte a constante 1/(4π) no coeficiente (0,0) equivalente."""
    out = dict(expected)
    if (0, 0) in out:
        out[(0, 0)] = out[(0, 0)] * 2.0 * _SQRT_PI
    return out
