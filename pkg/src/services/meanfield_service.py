"""
Serviço da equação de campo médio Δu = 6 - 6eᵘ na esfera redonda.

Reúne o resíduo, a iteração de Lyapunov-Schmidt com controle da bifurcação
em E₂, um Newton regularizado no espaço de coeficientes e o experimento de
unicidade local.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from math import factorial
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy import linalg
from tqdm import tqdm

from src.config.settings import Config
from src.models.harmonics import E2Vector, GridField, SphCoeffs, SphGrid
from src.models.meanfield import (
    IterationTrace, MeanFieldState, NonzeroCandidate, UniquenessReport,
)
from src.services.sphharm_service import SphHarmService
from src.services.surfspec_service import SurfSpecService
from src.utils.errors import (
    ConfigurationError, LinearSolveError, PreconditionError, RangeError,
)
from src.utils.helpers import trial_rng

logger = logging.getLogger(__name__)

# |P₂(u₂²)| = P2_NORM_CONSTANT·|u₂|²
P2_NORM_CONSTANT = np.sqrt(5.0 / np.pi) / 7.0

_SERIES_RADIUS = 0.5
_SERIES_TERMS = 30
# posições de Y₂,₋₂..Y₂,₂ no vetor de coeficientes
_E2_SLICE = slice(4, 9)
# fluxo aleatório da varredura de E₂, separado dos fluxos por tentativa
_P2_STREAM = 2 ** 31


def _exp_remainder(u: np.ndarray, order: int) -> np.ndarray:
    """eᵘ - Σ_{k<order} uᵏ/k!, por série perto de zero para evitar cancelamento."""
    u = np.asarray(u, dtype=np.float64)
    out = np.empty_like(u)
    small = np.abs(u) < _SERIES_RADIUS

    us = u[small]
    term = us ** order / factorial(order)
    acc = term.copy()
    for k in range(order + 1, order + _SERIES_TERMS):
        term = term * us / k
        acc += term
    out[small] = acc

    ub = u[~small]
    head = np.zeros_like(ub)
    for k in range(order):
        head += ub ** k / factorial(k)
    out[~small] = np.exp(ub) - head
    return out


class MeanFieldService:
    """Operações da equação de campo médio."""

    @staticmethod
    def fine_grid(L: int) -> SphGrid:
        """Grade sobreamostrada 2× usada para eᵘ."""
        return SphHarmService.build_grid(2 * L)

    @staticmethod
    def _nodal(u: SphCoeffs, grid: SphGrid) -> np.ndarray:
        values = SphHarmService.synthesize(u, grid).values
        sup = float(np.max(np.abs(values)))
        if sup > Config.EXP_OVERFLOW_SUP:
            logger.error(f"sup|u| = {sup:.3g} excede {Config.EXP_OVERFLOW_SUP}")
            raise RangeError(f"eᵘ fora da faixa: sup|u| = {sup:.3g} > {Config.EXP_OVERFLOW_SUP}")
        return values

    @staticmethod
    def residual(u: SphCoeffs) -> SphCoeffs:
        """
        Coeficientes de Δu - 6 + 6eᵘ com eᵘ avaliado na grade sobreamostrada.

        Args:
            u (SphCoeffs): Expoente conforme

        Returns:
            SphCoeffs: Resíduo na banda de u
        """
        grid = MeanFieldService.fine_grid(u.L)
        values = MeanFieldService._nodal(u, grid)
        nonlinear = SphHarmService.analyze(GridField(grid, np.expm1(values)), u.L)
        return SphHarmService.laplace_beltrami(u) + 6.0 * nonlinear

    @staticmethod
    def state(u: SphCoeffs, converged: bool = True, iterations: int = 0) -> MeanFieldState:
        """Monta o estado com resíduo, sup e decomposição u = u1 + u2."""
        grid = MeanFieldService.fine_grid(u.L)
        sup = SphHarmService.synthesize(u, grid).sup()
        residual = MeanFieldService.residual(u).norm()
        u2 = SphHarmService.project_E2(u) if u.L >= 2 else E2Vector.zero()
        u1 = SphHarmService.complement_E2(u) if u.L >= 2 else u
        return MeanFieldState(u, residual, sup, u1, u2, converged, iterations)

    @staticmethod
    def lifted_form_check(u: SphCoeffs) -> float:
        """
        Distância L² entre (Δ+6)u - 6(1+u-eᵘ) e Δu - 6 + 6eᵘ.
        """
        grid = MeanFieldService.fine_grid(u.L)
        values = MeanFieldService._nodal(u, grid)
        one_plus_u_minus_exp = SphHarmService.analyze(GridField(grid, values - np.expm1(values)), u.L)
        lifted = SphHarmService.laplace_beltrami(u) + 6.0 * u - 6.0 * one_plus_u_minus_exp
        return (lifted - MeanFieldService.residual(u)).norm()

    @staticmethod
    def ls_step(state: MeanFieldState) -> MeanFieldState:
        """
        Um passo da iteração de Lyapunov-Schmidt.

        u1 resolve (Δ+6)u1 = 6·P⊥(1+u-eᵘ) na diagonal dos coeficientes. Em
        seguida, com u1 novo, a norma de u2 é fixada pela equação de bifurcação
        P₂(u₂²) = -P₂(2u₁u₂ + u₁²) - 2P₂(eᵘ-1-u-u²/2), usando |P₂u₂²| = p|u₂|².

        Args:
            state (MeanFieldState): Estado atual (sup|u| < 1)

        Returns:
            MeanFieldState: Estado atualizado
        """
        if state.sup_norm >= 1.0:
            raise PreconditionError(f"passo de Lyapunov-Schmidt exige sup|u| < 1, recebeu {state.sup_norm:.3g}")

        u = state.u
        L = u.L
        grid = MeanFieldService.fine_grid(L)

        # u1 = -6 P⊥(eᵘ-1-u) / (6 - l(l+1)), l ≠ 2
        values = MeanFieldService._nodal(u, grid)
        rem2 = SphHarmService.analyze(GridField(grid, _exp_remainder(values, 2)), L)
        degrees = u.degrees()
        denom = 6.0 - degrees * (degrees + 1.0)
        mask = degrees != 2
        c1 = np.zeros_like(rem2.c)
        c1[mask] = -6.0 * rem2.c[mask] / denom[mask]
        u1 = SphCoeffs(L, c1)

        v1 = SphHarmService.synthesize(u1, grid).values
        v2 = SphHarmService.synthesize(state.u2.to_coeffs(L), grid).values
        terms = -(2.0 * v1 * v2 + v1 * v1) - 2.0 * _exp_remainder(v1 + v2, 3)
        t2 = SphHarmService.project_E2(SphHarmService.analyze(GridField(grid, terms), L))

        new_norm = np.sqrt(t2.norm() / P2_NORM_CONSTANT)
        if state.u2.norm() > 0:
            direction = state.u2.lam / state.u2.norm()
        elif t2.norm() > 0:
            direction = t2.lam / t2.norm()
        else:
            direction = np.zeros(5)
        u2 = E2Vector(new_norm * direction)

        return MeanFieldService.state(u1 + u2.to_coeffs(L), state.converged, state.iterations + 1)

    @staticmethod
    def _stop(previous: MeanFieldState, current: MeanFieldState, tol: float) -> bool:
        if current.sup_norm <= Config.SUP_FLOOR:
            return True
        update = SphHarmService.synthesize(current.u - previous.u,
                                           MeanFieldService.fine_grid(current.L)).sup()
        return current.residual_norm <= tol and update <= Config.SUP_FLOOR

    @staticmethod
    def ls_iterate(u0: SphCoeffs, max_iters: Optional[int] = None, tol: Optional[float] = None,
                   delta0: Optional[float] = None) -> Tuple[MeanFieldState, IterationTrace]:
        """
        Itera ls_step até o critério de parada.

        Args:
            u0 (SphCoeffs): Ponto inicial
            max_iters (int, optional): Limite de iterações
            tol (float, optional): Limite de resíduo
            delta0 (float, optional): Cota de pequenez registrada no traço

        Returns:
            Tuple[MeanFieldState, IterationTrace]: Estado final e traço por passo
        """
        max_iters = Config.MAX_ITERS if max_iters is None else max_iters
        tol = Config.RESIDUAL_FLOOR if tol is None else tol

        state = MeanFieldService.state(u0)
        trace = IterationTrace(delta0=state.sup_norm if delta0 is None else delta0)
        trace.append(0, state)
        if state.sup_norm <= Config.SUP_FLOOR:
            return state.with_status(True, 0), trace

        for k in range(1, max_iters + 1):
            try:
                new_state = MeanFieldService.ls_step(state)
            except PreconditionError as e:
                logger.warning(f"Iteração de Lyapunov-Schmidt saiu do regime no passo {k}: {e}")
                return state.with_status(False, k - 1), trace
            trace.append(k, new_state)
            logger.debug(f"LS passo {k}: sup={new_state.sup_norm:.3e} resíduo={new_state.residual_norm:.3e}")
            done = MeanFieldService._stop(state, new_state, tol)
            state = new_state
            if done:
                return state.with_status(True, k), trace

        logger.warning(f"Iteração de Lyapunov-Schmidt sem convergência em {max_iters} passos")
        return state.with_status(False, max_iters), trace

    @staticmethod
    def jacobian(u: SphCoeffs) -> np.ndarray:
        """Matriz de Δ + 6eᵘ na base harmônica: diag(6-l(l+1)) + 6⟨Y_a,(eᵘ-1)Y_b⟩."""
        grid = MeanFieldService.fine_grid(u.L)
        values = MeanFieldService._nodal(u, grid)
        B = SphHarmService.basis(grid, u.L)
        weights = (grid.node_weights * np.expm1(values)).ravel()
        degrees = u.degrees()
        return np.diag(6.0 - degrees * (degrees + 1.0)) + 6.0 * (B.T @ (weights[:, None] * B))

    @staticmethod
    def bordered_matrix(J: np.ndarray) -> np.ndarray:
        """[[J, B], [Bᵀ, 0]] com B formado pelas colunas de Y₂,ₘ, m = -2..2."""
        n = J.shape[0]
        B = np.zeros((n, 5))
        B[_E2_SLICE, :] = np.eye(5)
        return np.block([[J, B], [B.T, np.zeros((5, 5))]])

    @staticmethod
    def newton_solve(u0: SphCoeffs, max_iters: Optional[int] = None,
                     tol: Optional[float] = None) -> MeanFieldState:
        """
        Newton regularizado para o resíduo em coeficientes.

        Como Δ+6 anula E₂ em u = 0, o Jacobiano é bordeado pelas cinco direções
        de E₂: M = [[J, B], [Bᵀ, 0]]. As equações normais (MᵀM + εI)z = Mᵀr,
        com ε proporcional a |F|, são resolvidas para o resíduo e para as cinco
        direções de borda. A parte do passo em E₂ vem do sistema 5×5 que anula
        o multiplicador, também regularizado.

        Args:
            u0 (SphCoeffs): Ponto inicial (banda ≥ 8)
            max_iters (int, optional): Limite de iterações
            tol (float, optional): Limite de resíduo

        Returns:
            MeanFieldState: Estado convergido ou o melhor iterado marcado como não convergido
        """
        if u0.L < Config.MEANFIELD_MIN_BAND_LIMIT:
            raise ConfigurationError(
                f"newton_solve exige banda ≥ {Config.MEANFIELD_MIN_BAND_LIMIT}, recebeu {u0.L}"
            )
        max_iters = Config.MAX_ITERS if max_iters is None else max_iters
        tol = Config.RESIDUAL_FLOOR if tol is None else tol

        state = MeanFieldService.state(u0)
        if state.sup_norm <= Config.SUP_FLOOR:
            return state.with_status(True, 0)
        best = state

        for k in range(1, max_iters + 1):
            F = MeanFieldService.residual(state.u).c
            if not np.any(F):
                return state.with_status(True, k - 1)
            n = F.size
            M = MeanFieldService.bordered_matrix(MeanFieldService.jacobian(state.u))
            eps = Config.TIKHONOV * np.linalg.norm(F)

            # coluna 0: resíduo; colunas 1..5: direções de borda
            rhs = np.zeros((n + 5, 6))
            rhs[:n, 0] = -F
            rhs[n:, 1:] = np.eye(5)
            try:
                Z = linalg.solve(M.T @ M + eps * np.eye(n + 5), M.T @ rhs, assume_a='pos')
                T = Z[n:, 1:]
                a = linalg.solve(T.T @ T + eps * np.eye(5), -T.T @ Z[n:, 0], assume_a='pos')
            except linalg.LinAlgError as e:
                logger.error(f"Sistema de Newton singular no passo {k}: {e}")
                raise LinearSolveError(f"sistema de Newton singular no passo {k}") from e

            du = Z[:n, 0] + Z[:n, 1:] @ a
            new_state = MeanFieldService.state(state.u + SphCoeffs(state.u.L, du))
            logger.debug(f"Newton passo {k}: sup={new_state.sup_norm:.3e} resíduo={new_state.residual_norm:.3e}")

            if new_state.residual_norm <= best.residual_norm:
                best = new_state
            done = MeanFieldService._stop(state, new_state, tol)
            state = new_state
            if done:
                return state.with_status(True, k)

        logger.warning(f"Newton sem convergência em {max_iters} passos; resíduo {best.residual_norm:.3e}")
        return best.with_status(False, max_iters)

    @staticmethod
    def centroid_residual(u: SphCoeffs) -> Tuple[float, float, float]:
        """Momentos ∫x_i eᵘ dμ_{g₀}, i = 1..3."""
        grid = MeanFieldService.fine_grid(u.L)
        weight = np.exp(MeanFieldService._nodal(u, grid))
        return tuple(grid.integrate(x * weight) for x in grid.cartesian())

    @staticmethod
    def p2_closed_form(v: E2Vector) -> E2Vector:
        """P₂(u₂²) em forma fechada a partir de (λ₋₂, λ₋₁, λ₀, λ₁, λ₂)."""
        lm2, lm1, l0, l1, l2 = v.lam
        p = P2_NORM_CONSTANT
        r3 = np.sqrt(3.0)
        return E2Vector([
            p * (r3 * lm1 * l1 - 2.0 * lm2 * l0),
            p * (lm1 * l0 + r3 * (lm2 * l1 - lm1 * l2)),
            0.5 * p * (2.0 * (l0 ** 2 - lm2 ** 2 - l2 ** 2) + l1 ** 2 + lm1 ** 2),
            p * (l0 * l1 + r3 * (lm2 * lm1 + l1 * l2)),
            0.5 * p * (r3 * (l1 ** 2 - lm1 ** 2) - 4.0 * l0 * l2),
        ])

    @staticmethod
    def p2_norm_identity_check(v: E2Vector) -> Tuple[float, float]:
        """
        Compara |P₂(u₂²)| por quadratura com (1/7)√(5/π)·Σλᵢ².

        Returns:
            Tuple[float, float]: (lhs, rhs)
        """
        u2 = v.to_coeffs(2)
        square = SphHarmService.product_project(u2, u2, L_out=4)
        lhs = SphHarmService.project_E2(square).norm()
        return lhs, P2_NORM_CONSTANT * v.norm_sq()

    @staticmethod
    def p2_identity_sweep(draws: int, seed: int) -> float:
        """Maior desvio relativo da identidade de projeção sobre vetores unitários aleatórios."""
        rng = trial_rng(seed, _P2_STREAM)
        worst = 0.0
        for _ in range(draws):
            lam = rng.standard_normal(5)
            lhs, rhs = MeanFieldService.p2_norm_identity_check(E2Vector(lam / np.linalg.norm(lam)))
            worst = max(worst, abs(lhs - rhs) / rhs)
        return worst

    @staticmethod
    def _run_trial(delta: float, seed: int, trial: int, L: int):
        u0 = SphHarmService.random_field(L, delta, trial_rng(seed, trial))
        ls_state, trace = MeanFieldService.ls_iterate(u0, delta0=delta)
        newton_state = MeanFieldService.newton_solve(u0)
        return ls_state, trace, newton_state

    @staticmethod
    def classify_trial(trial: int, ls_state: MeanFieldState,
                       newton_state: MeanFieldState) -> Union[str, NonzeroCandidate]:
        """
        Classifica uma tentativa: 'zero', 'non_converged' ou um candidato não nulo.

        Só estados convergidos com sup|u| acima da tolerância viram candidatos;
        execuções sem convergência são contadas à parte.
        """
        finals = (('ls', ls_state), ('newton', newton_state))
        nonzero = [(solver, s) for solver, s in finals
                   if s.converged and s.sup_norm > Config.ZERO_SOLUTION_TOL]
        if nonzero:
            solver, final = nonzero[-1]
            logger.warning(f"Tentativa {trial}: candidato não nulo ({solver}) sup={final.sup_norm:.3e}")
            return NonzeroCandidate(
                trial=trial, solver=solver, u=final.u, residual=final.residual_norm,
                sup_norm=final.sup_norm, centroid_residual=MeanFieldService.centroid_residual(final.u),
                converged=final.converged,
            )
        stalled = [solver for solver, s in finals if not s.converged]
        if stalled:
            logger.warning(f"Tentativa {trial}: sem convergência ({', '.join(stalled)})")
            return 'non_converged'
        return 'zero'

    @staticmethod
    def uniqueness_experiment(delta: float, trials: int, seed: int = 0, L: Optional[int] = None,
                              workers: Optional[int] = None) -> UniquenessReport:
        """
        Sorteia pontos iniciais pequenos e verifica a convergência para u = 0.

        Args:
            delta (float): Cota sup|u₀| ≤ delta (≤ 0.2)
            trials (int): Número de tentativas
            seed (int): Semente; cada tentativa usa o fluxo (seed, índice)
            L (int, optional): Limite de banda
            workers (int, optional): Threads para tentativas concorrentes

        Returns:
            UniquenessReport: Contagens, candidatos não nulos e expoente de decaimento
        """
        if delta < 0 or delta > Config.DELTA_MAX:
            raise PreconditionError(f"delta deve estar em [0, {Config.DELTA_MAX}], recebeu {delta}")
        L = Config.BAND_LIMIT if L is None else L
        if L < Config.MEANFIELD_MIN_BAND_LIMIT:
            raise ConfigurationError(f"campo médio exige banda ≥ {Config.MEANFIELD_MIN_BAND_LIMIT}, recebeu {L}")

        logger.info(f"Experimento de unicidade: delta={delta}, {trials} tentativas, semente {seed}")

        def run(trial):
            return MeanFieldService._run_trial(delta, seed, trial, L)

        progress = dict(total=trials, desc='tentativas', disable=not Config.SHOW_PROGRESS)
        if workers and workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(tqdm(pool.map(run, range(trials)), **progress))
        else:
            results = [run(trial) for trial in tqdm(range(trials), **progress)]

        zero = 0
        candidates: List[NonzeroCandidate] = []
        non_converged: List[int] = []
        slopes, ratios, constants = [], [], []
        worst_residual, max_distance = 0.0, 0.0
        fine = MeanFieldService.fine_grid(L)

        for trial, (ls_state, trace, newton_state) in enumerate(results):
            worst_residual = max(worst_residual, ls_state.residual_norm, newton_state.residual_norm)
            max_distance = max(max_distance, SphHarmService.synthesize(ls_state.u - newton_state.u, fine).sup())

            outcome = MeanFieldService.classify_trial(trial, ls_state, newton_state)
            if isinstance(outcome, NonzeroCandidate):
                candidates.append(outcome)
            elif outcome == 'zero':
                zero += 1
            else:
                non_converged.append(trial)

            prev, nxt = trace.decay_pairs(Config.DECAY_WINDOW)
            if prev.size:
                ratios.extend(np.log(nxt) / np.log(prev))
                constants.extend(nxt / prev ** 1.5)
            if prev.size >= 2:
                slopes.append(np.polyfit(np.log(prev), np.log(nxt), 1)[0])

        report = UniquenessReport(
            delta=delta, trials=trials, seed=seed, converged_to_zero=zero,
            nonzero_candidates=candidates,
            decay_exponent_estimate=float(np.median(slopes)) if slopes else float('nan'),
            min_decay_ratio=float(np.min(ratios)) if ratios else float('nan'),
            effective_constant=float(np.max(constants)) if constants else float('nan'),
            worst_residual=worst_residual, max_solver_distance=max_distance,
            traces=[trace for _, trace, _ in results],
            non_converged_trials=non_converged,
        )
        logger.info(f"Convergiram para zero: {zero}/{trials}; expoente {report.decay_exponent_estimate:.3f}")
        return report

    @staticmethod
    def nearly_round_relation_check(state: MeanFieldState) -> float:
        """
        sup|(K - 1) - 2(1 - e^{-u})| para uma solução da equação.
        """
        if state.residual_norm > Config.SOLUTION_RESIDUAL:
            raise PreconditionError(
                f"relação de quase-redondeza exige solução (resíduo {state.residual_norm:.3e} > "
                f"{Config.SOLUTION_RESIDUAL})"
            )
        K = SurfSpecService.gauss_curvature(state.u)
        values = SphHarmService.synthesize(state.u, K.grid).values
        return float(np.max(np.abs((K.values - 1.0) + 2.0 * np.expm1(-values))))
