"""
Tipos de dados da equação de campo médio Δu = 6 - 6eᵘ.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from src.models.harmonics import E2Vector, SphCoeffs


@dataclass(frozen=True, eq=False)
class MeanFieldState:
    """Iterado u = u1 + u2 com normas recalculadas."""

    u: SphCoeffs
    residual_norm: float
    sup_norm: float
    u1: SphCoeffs
    u2: E2Vector
    converged: bool = True
    iterations: int = 0

    @property
    def L(self) -> int:
        return self.u.L

    def with_status(self, converged: bool, iterations: int) -> 'MeanFieldState':
        return MeanFieldState(self.u, self.residual_norm, self.sup_norm, self.u1, self.u2,
                              converged, iterations)

    def to_dict(self) -> Dict:
        return {
            'band_limit': self.u.L,
            'residual_norm': self.residual_norm,
            'sup_norm': self.sup_norm,
            'u1_norm': self.u1.norm(),
            'u2': self.u2.to_dict(),
            'converged': self.converged,
            'iterations': self.iterations,
        }

    def __repr__(self):
        return (f'<MeanFieldState L={self.u.L} sup={self.sup_norm:.3e} '
                f'residual={self.residual_norm:.3e}>')


@dataclass(frozen=True)
class TraceRecord:
    k: int
    sup_norm: float
    residual: float
    u1_norm: float
    u2_norm: float


@dataclass
class IterationTrace:
    """Registros por passo da iteração de Lyapunov-Schmidt."""

    delta0: float
    records: List[TraceRecord] = field(default_factory=list)

    def append(self, k: int, state: MeanFieldState):
        if self.records and k <= self.records[-1].k:
            raise ValueError(f"passo {k} fora de ordem")
        self.records.append(
            TraceRecord(k, state.sup_norm, state.residual_norm, state.u1.norm(), state.u2.norm())
        )

    @property
    def sup_norms(self) -> np.ndarray:
        return np.array([r.sup_norm for r in self.records])

    def decay_pairs(self, window: float) -> Tuple[np.ndarray, np.ndarray]:
        """Pares (s_k, s_{k+1}) com s_k ≤ window e ambos positivos."""
        s = self.sup_norms
        if s.size < 2:
            return np.empty(0), np.empty(0)
        prev, nxt = s[:-1], s[1:]
        mask = (prev <= window) & (prev > 0) & (nxt > 0)
        return prev[mask], nxt[mask]

    def to_frame(self):
        return pd.DataFrame(
            [(r.k, r.sup_norm, r.residual, r.u1_norm, r.u2_norm) for r in self.records],
            columns=['k', 'sup_norm', 'residual', 'u1_norm', 'u2_norm'],
        )

    def __len__(self):
        return len(self.records)


@dataclass(frozen=True, eq=False)
class NonzeroCandidate:
    """Solução candidata que não convergiu para zero."""

    trial: int
    solver: str
    u: SphCoeffs
    residual: float
    sup_norm: float
    centroid_residual: Tuple[float, float, float]
    converged: bool

    def to_dict(self) -> Dict:
        return {
            'trial': self.trial,
            'solver': self.solver,
            'residual': self.residual,
            'sup_norm': self.sup_norm,
            'centroid_residual': list(self.centroid_residual),
            'converged': self.converged,
            'u': self.u.to_dict(),
        }


@dataclass
class UniquenessReport:
    """Resultado do experimento de unicidade local."""

    delta: float
    trials: int
    seed: int
    converged_to_zero: int
    nonzero_candidates: List[NonzeroCandidate]
    decay_exponent_estimate: float
    min_decay_ratio: float
    effective_constant: float
    worst_residual: float
    max_solver_distance: float
    traces: List[IterationTrace] = field(default_factory=list, repr=False)
    non_converged_trials: List[int] = field(default_factory=list)
    p2_max_relative_gap: Optional[float] = None

    def __post_init__(self):
        if self.converged_to_zero + len(self.nonzero_candidates) + len(self.non_converged_trials) != self.trials:
            raise ValueError("contagem de tentativas inconsistente")

    @property
    def all_zero(self) -> bool:
        return self.converged_to_zero == self.trials

    def to_dict(self) -> Dict:
        return {
            'delta': self.delta,
            'trials': self.trials,
            'seed': self.seed,
            'converged': self.converged_to_zero,
            'non_converged': len(self.non_converged_trials),
            'non_converged_trials': list(self.non_converged_trials),
            'exponent_estimate': self.decay_exponent_estimate,
            'min_decay_ratio': self.min_decay_ratio,
            'effective_constant': self.effective_constant,
            'worst_residual': self.worst_residual,
            'max_solver_distance': self.max_solver_distance,
            'p2_max_relative_gap': self.p2_max_relative_gap,
            'nonzero_candidates': [c.to_dict() for c in self.nonzero_candidates],
        }
