"""
Tipos de dados dos harmônicos esféricos reais.
"""
from dataclasses import dataclass, field
from typing import Dict, Iterator, Tuple

import numpy as np
import pandas as pd

from src.utils.errors import DimensionError, DomainError


def _frozen(array) -> np.ndarray:
    out = np.array(array, dtype=np.float64)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, order=True)
class HarmonicIndex:
    """Índice (l, m) de um harmônico real; m<0 é o ramo seno, m>0 o ramo cosseno."""

    l: int
    m: int

    def __post_init__(self):
        if self.l < 0 or abs(self.m) > self.l:
            raise DomainError(f"índice harmônico inválido (l={self.l}, m={self.m})")

    @property
    def position(self) -> int:
        """Posição no vetor de coeficientes em ordem (l, m) lexicográfica."""
        return self.l * self.l + self.l + self.m

    @property
    def eigenvalue(self) -> int:
        """Autovalor l(l+1) de -Δ na esfera redonda."""
        return self.l * (self.l + 1)

    @classmethod
    def from_position(cls, k: int) -> 'HarmonicIndex':
        l = int(np.floor(np.sqrt(k)))
        return cls(l, k - l * l - l)

    @staticmethod
    def count(L: int) -> int:
        return (L + 1) ** 2

    @classmethod
    def iterate(cls, L: int) -> Iterator['HarmonicIndex']:
        for l in range(L + 1):
            for m in range(-l, l + 1):
                yield cls(l, m)

    def to_dict(self) -> Dict[str, int]:
        return {'l': self.l, 'm': self.m}

    def __repr__(self):
        return f'Y({self.l},{self.m})'


@dataclass(frozen=True, eq=False)
class SphGrid:
    """Grade de quadratura: Gauss-Legendre em cos θ e longitudes uniformes."""

    L: int
    theta_nodes: np.ndarray
    theta_weights: np.ndarray
    n_phi: int

    def __post_init__(self):
        object.__setattr__(self, 'theta_nodes', _frozen(self.theta_nodes))
        object.__setattr__(self, 'theta_weights', _frozen(self.theta_weights))

    @property
    def n_theta(self) -> int:
        return len(self.theta_nodes)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.n_theta, self.n_phi)

    @property
    def phi_nodes(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.n_phi) / self.n_phi

    @property
    def node_weights(self) -> np.ndarray:
        """Pesos por nó (θ-major, φ-minor) cuja soma é 4π."""
        return np.outer(self.theta_weights, np.full(self.n_phi, 2.0 * np.pi / self.n_phi))

    def mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        """Retorna (θ, φ) em malha com a forma da grade."""
        return np.meshgrid(self.theta_nodes, self.phi_nodes, indexing='ij')

    def cartesian(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Coordenadas (x1, x2, x3) dos nós na esfera unitária."""
        theta, phi = self.mesh()
        return np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)

    def integrate(self, values: np.ndarray) -> float:
        """Quadratura de valores nodais sobre S²."""
        return float(np.sum(self.node_weights * values))

    def to_frame(self):
        """Tabela `theta,weight` da grade."""
        return pd.DataFrame({'theta': self.theta_nodes, 'weight': self.theta_weights})

    def __repr__(self):
        return f'<SphGrid L={self.L}: {self.n_theta}x{self.n_phi}>'


@dataclass(frozen=True, eq=False)
class GridField:
    """Campo escalar amostrado nos nós de uma grade."""

    grid: SphGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.size != self.grid.n_theta * self.grid.n_phi:
            raise DimensionError(
                f"campo com {values.size} valores para grade {self.grid.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise DomainError("campo com valores não finitos")
        object.__setattr__(self, 'values', _frozen(values.reshape(self.grid.shape)))

    def integral(self) -> float:
        return self.grid.integrate(self.values)

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def __repr__(self):
        return f'<GridField {self.grid.shape} sup={self.sup():.3g}>'


@dataclass(frozen=True, eq=False)
class SphCoeffs:
    """Vetor de coeficientes harmônicos reais com limite de banda L."""

    L: int
    c: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.c, dtype=np.float64).ravel()
        if c.size != HarmonicIndex.count(self.L):
            raise DimensionError(
                f"{c.size} coeficientes para limite de banda {self.L} "
                f"(esperado {HarmonicIndex.count(self.L)})"
            )
        object.__setattr__(self, 'c', _frozen(c))

    @classmethod
    def zeros(cls, L: int) -> 'SphCoeffs':
        return cls(L, np.zeros(HarmonicIndex.count(L)))

    @classmethod
    def unit(cls, idx: HarmonicIndex, L: int) -> 'SphCoeffs':
        """Harmônico Y_idx isolado."""
        if idx.l > L:
            raise DimensionError(f"{idx!r} fora do limite de banda {L}")
        c = np.zeros(HarmonicIndex.count(L))
        c[idx.position] = 1.0
        return cls(L, c)

    @classmethod
    def constant(cls, value: float, L: int) -> 'SphCoeffs':
        """Campo constante; o coeficiente (0,0) de 1 é 2√π."""
        c = np.zeros(HarmonicIndex.count(L))
        c[0] = value * 2.0 * np.sqrt(np.pi)
        return cls(L, c)

    @classmethod
    def from_dict(cls, entries: Dict[Tuple[int, int], float], L: int) -> 'SphCoeffs':
        c = np.zeros(HarmonicIndex.count(L))
        for (l, m), value in entries.items():
            idx = HarmonicIndex(l, m)
            if idx.l > L:
                raise DimensionError(f"{idx!r} fora do limite de banda {L}")
            c[idx.position] += value
        return cls(L, c)

    def get(self, l: int, m: int) -> float:
        return float(self.c[HarmonicIndex(l, m).position])

    def resized(self, L: int) -> 'SphCoeffs':
        """Trunca ou completa com zeros até o limite de banda L."""
        c = np.zeros(HarmonicIndex.count(L))
        n = min(c.size, self.c.size)
        c[:n] = self.c[:n]
        return SphCoeffs(L, c)

    def norm(self) -> float:
        """Norma L² do campo representado (Parseval)."""
        return float(np.linalg.norm(self.c))

    def degrees(self) -> np.ndarray:
        return np.floor(np.sqrt(np.arange(self.c.size))).astype(int)

    def _aligned(self, other: 'SphCoeffs') -> Tuple[np.ndarray, np.ndarray, int]:
        L = max(self.L, other.L)
        return self.resized(L).c, other.resized(L).c, L

    def __add__(self, other: 'SphCoeffs') -> 'SphCoeffs':
        a, b, L = self._aligned(other)
        return SphCoeffs(L, a + b)

    def __sub__(self, other: 'SphCoeffs') -> 'SphCoeffs':
        a, b, L = self._aligned(other)
        return SphCoeffs(L, a - b)

    def __mul__(self, scalar: float) -> 'SphCoeffs':
        return SphCoeffs(self.L, self.c * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> 'SphCoeffs':
        return SphCoeffs(self.L, -self.c)

    def to_dict(self) -> Dict:
        return {
            'L': self.L,
            'coefficients': [
                {'l': idx.l, 'm': idx.m, 'value': float(self.c[k])}
                for k, idx in enumerate(HarmonicIndex.iterate(self.L))
            ],
        }

    def __repr__(self):
        return f'<SphCoeffs L={self.L} norm={self.norm():.3g}>'


@dataclass(frozen=True, eq=False)
class E2Vector:
    """Coeficientes (λ₋₂, λ₋₁, λ₀, λ₁, λ₂) de um elemento de E₂ = ker(Δ+6)."""

    lam: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=np.float64).ravel()
        if lam.size != 5:
            raise DimensionError(f"E2Vector exige 5 coeficientes, recebeu {lam.size}")
        object.__setattr__(self, 'lam', _frozen(lam))

    @classmethod
    def zero(cls) -> 'E2Vector':
        return cls(np.zeros(5))

    def norm_sq(self) -> float:
        return float(np.dot(self.lam, self.lam))

    def norm(self) -> float:
        return float(np.sqrt(self.norm_sq()))

    def to_coeffs(self, L: int = 2) -> SphCoeffs:
        c = np.zeros(HarmonicIndex.count(L))
        c[4:9] = self.lam
        return SphCoeffs(L, c)

    def to_dict(self) -> Dict[str, float]:
        return {f'lambda_{m}': float(v) for m, v in zip(range(-2, 3), self.lam)}

    def __repr__(self):
        return f'<E2Vector {np.array2string(self.lam, precision=3)}>'


@dataclass(frozen=True)
class GauntIdentity:
    """Decomposição fechada de um produto de dois harmônicos."""

    name: str
    left: Tuple[int, int]
    right: Tuple[int, int]
    expected: Dict[Tuple[int, int], float]


@dataclass(frozen=True)
class GauntCheck:
    """Resultado numérico de uma identidade da tabela."""

    name: str
    max_deviation: float
    worst_coefficient: Tuple[int, int]
    passed: bool

    def to_dict(self) -> Dict:
        return {
            'name': self.name,
            'max_deviation': self.max_deviation,
            'worst_coefficient': list(self.worst_coefficient),
            'passed': self.passed,
        }


@dataclass(frozen=True)
class GauntReport:
    """Relatório da verificação da tabela de produtos."""

    L: int
    tolerance: float
    checks: Tuple[GauntCheck, ...]

    @property
    def failures(self) -> Tuple[GauntCheck, ...]:
        return tuple(check for check in self.checks if not check.passed)

    @property
    def max_deviation(self) -> float:
        return max((check.max_deviation for check in self.checks), default=0.0)

    def to_dict(self) -> Dict:
        return {
            'band_limit': self.L,
            'tolerance': self.tolerance,
            'identities': [check.to_dict() for check in self.checks],
            'passed': len(self.checks) - len(self.failures),
            'failures': [check.name for check in self.failures],
            'max_deviation': self.max_deviation,
        }
