"""
Tipos de dados para métricas conformes g = eᵘg₀ e seus espectros.
"""
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from src.models.harmonics import GridField, SphCoeffs
from src.services.sphharm_service import SphHarmService

SPHERE_CONFORMAL_VOLUME = 4.0 * np.pi


@dataclass(frozen=True, eq=False)
class ConformalMetric:
    """Métrica g = eᵘg₀ na esfera, com área e curvatura de Gauss."""

    u: SphCoeffs
    area: float
    K: GridField

    @property
    def grid(self):
        return self.K.grid

    def conformal_factor(self) -> np.ndarray:
        """eᵘ nos nós da grade de K."""
        return np.exp(SphHarmService.synthesize(self.u, self.grid).values)

    def integrate(self, values: np.ndarray) -> float:
        """∫ f dμ_g por quadratura."""
        return self.grid.integrate(values * self.conformal_factor())

    def gauss_bonnet(self) -> float:
        return self.integrate(self.K.values)

    def to_dict(self) -> Dict:
        return {'band_limit': self.u.L, 'area': self.area, 'gauss_bonnet': self.gauss_bonnet()}

    def __repr__(self):
        return f'<ConformalMetric L={self.u.L} area={self.area:.6g}>'


@dataclass(frozen=True, eq=False)
class SpectralOperator:
    """Par (rigidez, massa) de (-Δ_{g₀} + eᵘq, eᵘ) na base harmônica."""

    q: GridField
    stiffness: np.ndarray
    mass: np.ndarray
    L: int

    def is_symmetric(self, tol: float = 1e-12) -> bool:
        return (np.max(np.abs(self.stiffness - self.stiffness.T)) <= tol * max(1.0, np.max(np.abs(self.stiffness)))
                and np.max(np.abs(self.mass - self.mass.T)) <= tol * max(1.0, np.max(np.abs(self.mass))))


@dataclass(frozen=True)
class EigenCluster:
    value: float
    multiplicity: int

    def to_dict(self) -> Dict:
        return {'value': self.value, 'multiplicity': self.multiplicity}


@dataclass(eq=False)
class SpectrumReport:
    """Autovalores agrupados, λ₂, Λ₂ e folga da desigualdade de El Soufi-Ilias."""

    area: float
    eigenvalues: np.ndarray
    clusters: List[EigenCluster]
    lambda2: float
    Lambda2: float
    esi_gap: float
    eigenvectors: Optional[np.ndarray] = None

    def multiplicities(self) -> List[int]:
        return [c.multiplicity for c in self.clusters]

    def distinct_values(self) -> List[float]:
        return [c.value for c in self.clusters]

    def to_dict(self) -> Dict:
        return {
            'area': self.area,
            'eigenvalues': [c.to_dict() for c in self.clusters],
            'lambda2': self.lambda2,
            'Lambda2': self.Lambda2,
            'esi_gap': self.esi_gap,
        }


Scalar = Union[float, np.ndarray]


@dataclass(frozen=True)
class SurfaceGeometry:
    """
    Dados extrínsecos de uma superfície esférica.

    Campos nodais são amostrados na esfera de parâmetros e integrados com a
    medida induzida área/(4π)·dμ_{S²} (esferas de área constante por nó).
    """

    H: float
    A0_sq: Scalar
    R: Scalar
    area: float

    def integral(self, values: Scalar, weights: Optional[np.ndarray] = None) -> float:
        values = np.asarray(values, dtype=float)
        if values.ndim == 0:
            return float(values) * self.area
        if weights is None:
            raise ValueError("campo nodal exige pesos de quadratura")
        return float(np.sum(weights * values)) * self.area / float(np.sum(weights))

    def H_sq_integral(self) -> float:
        return self.H ** 2 * self.area


@dataclass(frozen=True)
class CYCheck:
    """Os dois lados de 16π - ∫H² ≥ (2/3)∫(R + |A⁰|²)."""

    lhs: float
    rhs: float
    mode: str

    @property
    def gap(self) -> float:
        return self.lhs - self.rhs

    def holds(self, tol: float) -> bool:
        return self.lhs >= self.rhs - tol

    def to_dict(self) -> Dict:
        return {'lhs': self.lhs, 'rhs': self.rhs, 'gap': self.gap, 'mode': self.mode}


@dataclass(frozen=True)
class GradientIdentity:
    """Desvios das identidades de gradiente do mapa conforme."""

    conformal_sup: float
    solution_sup: Optional[float] = None

    def as_tuple(self) -> Tuple[float, Optional[float]]:
        return self.conformal_sup, self.solution_sup
