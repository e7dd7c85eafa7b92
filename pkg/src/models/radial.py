"""
Métricas rotacionalmente simétricas g = φ(r)⁻¹dr² + r²g_{S²} e dados derivados.
"""
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import brentq

from src.utils.errors import ConfigurationError

KINDS = ('flat', 'schwarzschild', 'hyperbolic', 'ads_schwarzschild', 'mass_profile', 'custom')
CANDIDATE_LABEL = 'centered-sphere candidate profile'


@dataclass(frozen=True, eq=False)
class RadialMetric:
    """Perfil radial φ com fronteira interna r_min e modo da massa de Hawking."""

    kind: str
    phi: Callable[[float], float] = field(repr=False)
    dphi: Callable[[float], float] = field(repr=False)
    r_min: float = 0.0
    mode: str = 'flat'
    params: Dict[str, float] = field(default_factory=dict)

    @classmethod
    def flat(cls) -> 'RadialMetric':
        return cls('flat', lambda r: 1.0, lambda r: 0.0)

    @classmethod
    def schwarzschild(cls, m: float) -> 'RadialMetric':
        if m <= 0:
            raise ConfigurationError(f"massa de Schwarzschild deve ser positiva, recebeu {m}")
        return cls('schwarzschild', lambda r: 1.0 - 2.0 * m / r, lambda r: 2.0 * m / r ** 2,
                   r_min=2.0 * m, params={'m': m})

    @classmethod
    def hyperbolic(cls) -> 'RadialMetric':
        return cls('hyperbolic', lambda r: 1.0 + r * r, lambda r: 2.0 * r, mode='hyperbolic')

    @classmethod
    def ads_schwarzschild(cls, m: float) -> 'RadialMetric':
        if m <= 0:
            raise ConfigurationError(f"massa de AdS-Schwarzschild deve ser positiva, recebeu {m}")
        # horizonte: r³ + r - 2m = 0
        horizon = brentq(lambda r: r ** 3 + r - 2.0 * m, 0.0, 2.0 * m, xtol=1e-15, rtol=1e-15)
        return cls('ads_schwarzschild', lambda r: 1.0 + r * r - 2.0 * m / r,
                   lambda r: 2.0 * r + 2.0 * m / r ** 2, r_min=horizon, mode='hyperbolic',
                   params={'m': m})

    @classmethod
    def mass_profile(cls, m_inf: float, a: Optional[float] = None) -> 'RadialMetric':
        """
        φ = 1 - 2m(r)/r com m(r) = m∞r³/(r³+a³).

        O máximo de 2m(r)/r é 2^{5/3}m∞/(3a), atingido em r³ = 2a³.
        """
        a = 2.0 * m_inf if a is None else a
        if m_inf <= 0 or a <= 0:
            raise ConfigurationError(f"perfil de massa exige m∞ > 0 e a > 0, recebeu ({m_inf}, {a})")
        peak = 2.0 ** (5.0 / 3.0) * m_inf / (3.0 * a)
        if peak >= 1.0:
            raise ConfigurationError(
                f"perfil de massa com horizonte: max 2m(r)/r = {peak:.6g} ≥ 1 (m∞={m_inf}, a={a})"
            )
        a3 = a ** 3

        def phi(r):
            return 1.0 - 2.0 * m_inf * r * r / (r ** 3 + a3)

        def dphi(r):
            return -2.0 * m_inf * r * (2.0 * a3 - r ** 3) / (r ** 3 + a3) ** 2

        metric = cls('mass_profile', phi, dphi, params={'m_inf': m_inf, 'a': a})
        samples = np.geomspace(1e-3 * a, 1e3 * a, 200)
        if min(phi(r) for r in samples) <= 0:
            raise ConfigurationError("perfil de massa com φ ≤ 0 em raio amostrado")
        return metric

    @classmethod
    def custom(cls, phi: Callable[[float], float], dphi: Optional[Callable[[float], float]] = None,
               r_min: float = 0.0, mode: str = 'flat') -> 'RadialMetric':
        if dphi is None:
            def dphi(r):
                h = 1e-5 * max(1.0, abs(r))
                return (phi(r + h) - phi(r - h)) / (2.0 * h)
        return cls('custom', phi, dphi, r_min=r_min, mode=mode)

    @classmethod
    def from_name(cls, kind: str, m: float = 1.0, a: Optional[float] = None) -> 'RadialMetric':
        builders = {
            'flat': lambda: cls.flat(),
            'schwarzschild': lambda: cls.schwarzschild(m),
            'hyperbolic': lambda: cls.hyperbolic(),
            'ads_schwarzschild': lambda: cls.ads_schwarzschild(m),
            'mass_profile': lambda: cls.mass_profile(m, a),
        }
        if kind not in builders:
            raise ConfigurationError(f"métrica '{kind}' desconhecida; opções: {', '.join(builders)}")
        return builders[kind]()

    def with_mode(self, mode: str) -> 'RadialMetric':
        if mode not in ('flat', 'hyperbolic'):
            raise ConfigurationError(f"modo '{mode}' inválido")
        return RadialMetric(self.kind, self.phi, self.dphi, self.r_min, mode, dict(self.params))

    @property
    def has_horizon(self) -> bool:
        return self.r_min > 0

    def mass_function(self, r: float) -> float:
        """m(r) = (r/2)(1 - φ)."""
        return 0.5 * r * (1.0 - self.phi(r))

    def dmass(self, r: float) -> float:
        """m'(r) = (1 - φ - rφ')/2."""
        return 0.5 * (1.0 - self.phi(r) - r * self.dphi(r))

    def to_dict(self) -> Dict:
        return {'kind': self.kind, 'mode': self.mode, 'r_min': self.r_min, **self.params}

    def __repr__(self):
        params = ', '.join(f'{k}={v:g}' for k, v in self.params.items())
        return f'<RadialMetric {self.kind}({params}) mode={self.mode}>'


@dataclass(frozen=True)
class SphereData:
    """Geometria da esfera centrada de raio de área r."""

    r: float
    area: float
    H: float
    A_sq: float
    A0_sq: float
    Ric_nn: float
    R: float
    V: float
    m_H: float

    def to_dict(self) -> Dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class ProfileSample:
    V: float
    r: float
    I: float
    I_plus: float
    I_minus: float
    I_second: float
    H: float
    mH_plus: float
    mH_plus_normalized: float
    R_at_r: float
    stability_gap: float
    Ric_nn: float


PROFILE_COLUMNS = ['V', 'I', 'I_plus', 'H', 'mH_plus', 'mH_plus_normalized', 'R_at_r', 'stability_gap',
                   'r', 'I_minus', 'I_second']


@dataclass(eq=False)
class ProfileCurve:
    """Perfil candidato amostrado (esferas centradas)."""

    metric: RadialMetric
    samples: List[ProfileSample]
    label: str = CANDIDATE_LABEL

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(s, name) for s in self.samples])

    def __len__(self):
        return len(self.samples)

    def to_frame(self):
        return pd.DataFrame([[getattr(s, c) for c in PROFILE_COLUMNS] for s in self.samples],
                            columns=PROFILE_COLUMNS)


@dataclass
class CurvatureReport:
    kind: str
    radii: List[float]
    R: List[float]
    Ric_nn: List[float]
    max_deviation: float
    max_dphi_deviation: float

    @property
    def min_R(self) -> float:
        return float(min(self.R)) if self.R else float('nan')

    def to_dict(self) -> Dict:
        return {
            'kind': self.kind,
            'max_deviation': self.max_deviation,
            'max_dphi_deviation': self.max_dphi_deviation,
            'min_R': self.min_R,
            'samples': [{'r': r, 'R': R, 'Ric_nn': ric} for r, R, ric in zip(self.radii, self.R, self.Ric_nn)],
        }


@dataclass(frozen=True)
class FlowReport:
    area_residual: float
    volume_residual: float
    mean_curvature_residual: float
    r0: float
    t_span: Tuple[float, float]

    def as_tuple(self) -> Tuple[float, float, float]:
        return self.area_residual, self.volume_residual, self.mean_curvature_residual

    def max(self) -> float:
        return max(self.as_tuple())

    def to_dict(self) -> Dict:
        return {
            'r0': self.r0,
            't_span': list(self.t_span),
            'area_residual': self.area_residual,
            'volume_residual': self.volume_residual,
            'mean_curvature_residual': self.mean_curvature_residual,
        }


@dataclass(frozen=True)
class MonotonicityReport:
    min_increment: float
    worst_increment_V: float
    bray_min_margin: float
    bray_worst_V: float
    bray_violations: int
    max_kink: float
    max_derivative_vs_H: float
    comparison_residual: float
    constant_mass: bool
    tolerance: float
    bray_tolerance: float

    @property
    def passed(self) -> bool:
        return self.min_increment >= -self.tolerance and self.bray_violations == 0

    def to_dict(self) -> Dict:
        return {**self.__dict__, 'passed': self.passed}


@dataclass(frozen=True)
class ShiReport:
    mode: str
    max_gap: float
    min_gap: float
    worst_V: float
    equality: bool
    strict: bool
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_gap <= self.tolerance

    def to_dict(self) -> Dict:
        return {**self.__dict__, 'passed': self.passed}


@dataclass(frozen=True)
class AsymptoticsReport:
    volumes: Tuple[float, ...]
    ratios: Tuple[float, ...]
    limit: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return abs(self.ratios[-1] - 1.0) <= self.tolerance

    def to_dict(self) -> Dict:
        return {
            'volumes': list(self.volumes),
            'ratios': list(self.ratios),
            'limit': self.limit,
            'passed': self.passed,
        }
