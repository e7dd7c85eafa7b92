import os
import sys
# DON'T CHANGE THIS !!!
sys.path.insert(0, os.path.dirname(os.path.dirname(__file__)))

import logging
from functools import wraps
from pathlib import Path
from typing import Optional

import numpy as np
import typer
from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from src.config.settings import Config
from src.models.harmonics import SphCoeffs
from src.models.radial import RadialMetric
from src.models.run_config import RunConfig
from src.reports.report_generator import ReportGenerator
from src.services.meanfield_service import MeanFieldService
from src.services.rotsym_service import RotSymService
from src.services.sphharm_service import SphHarmService
from src.services.surfspec_service import SurfSpecService
from src.utils.errors import HawkLabError, PreconditionError
from src.utils.helpers import read_coefficients, trial_rng

app = typer.Typer(
    help=f"{Config.APP_NAME}: laboratório numérico de rigidez da massa de Hawking.",
    no_args_is_help=True,
    add_completion=False,
)
console = Console(stderr=True)
logger = logging.getLogger(__name__)

EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG, EXIT_CANDIDATE = 0, 1, 2, 3

# Faixas padrão de raios por família (multiplicadas por m onde há escala de massa)
_DEFAULT_RADII = {
    'flat': lambda metric: (0.1, 10.0),
    'schwarzschild': lambda metric: (2.1 * metric.params['m'], 40.0 * metric.params['m']),
    'hyperbolic': lambda metric: (0.1, 5.0),
    'ads_schwarzschild': lambda metric: (1.05 * metric.r_min, max(10.0, 4.0 * metric.r_min)),
    'mass_profile': lambda metric: (0.1, 40.0),
}


def _setup_logging(level: str):
    logging.basicConfig(
        level=level.upper(),
        format='%(message)s',
        datefmt='[%X]',
        handlers=[RichHandler(console=console, show_path=False, rich_tracebacks=False)],
        force=True,
    )


def _guarded(command):
    """Converte exceções do laboratório em códigos de saída."""
    @wraps(command)
    def wrapper(*args, **kwargs):
        try:
            code = command(*args, **kwargs)
        except HawkLabError as e:
            logger.error(f"{type(e).__name__}: {e}")
            raise typer.Exit(code=e.exit_code)
        except ValidationError as e:
            logger.error(f"Configuração inválida: {e}")
            raise typer.Exit(code=EXIT_CONFIG)
        except OSError as e:
            logger.error(f"Erro de arquivo: {e}")
            raise typer.Exit(code=EXIT_CONFIG)
        raise typer.Exit(code=code or EXIT_OK)
    return wrapper


def _config(ctx: typer.Context, **local) -> RunConfig:
    options = dict(ctx.obj or {})
    config_file = options.pop('config_file', None)
    return RunConfig.build(config_file, **options, **local)


def _summary(title: str, rows):
    table = Table(title=title)
    table.add_column('verificação')
    table.add_column('valor', justify='right')
    table.add_column('ok', justify='center')
    for name, value, ok in rows:
        table.add_row(name, value if isinstance(value, str) else f"{value:.6g}", '✔' if ok else '✘')
    console.print(table)


@app.callback()
def main(
    ctx: typer.Context,
    band_limit: Optional[int] = typer.Option(None, '--band-limit', help='Limite de banda L.'),
    seed: Optional[int] = typer.Option(None, '--seed', help='Semente dos sorteios.'),
    out: Optional[Path] = typer.Option(None, '--out', help='Diretório de saída (padrão: HAWKLAB_OUT).'),
    tol_scale: Optional[float] = typer.Option(None, '--tol-scale', help='Fator sobre as tolerâncias.'),
    config_file: Optional[Path] = typer.Option(None, '--config', help='Manifesto chave=valor.'),
    workers: Optional[int] = typer.Option(None, '--workers', help='Threads para tentativas independentes.'),
    log_level: str = typer.Option(Config.LOG_LEVEL, '--log-level', help='Nível de log.'),
):
    """Opções globais compartilhadas pelos subcomandos."""
    _setup_logging(log_level)
    ctx.obj = {
        'band_limit': band_limit, 'seed': seed, 'out': out, 'tol_scale': tol_scale,
        'config_file': config_file, 'workers': workers,
    }


@app.command('sht-check')
@_guarded
def cmd_sht_check(ctx: typer.Context):
    """Tabela de produtos, energia de Hersch e ortonormalidade."""
    config = _config(ctx)
    L = config.band_limit
    tol = Config.TOL_IDENTITY * config.tol_scale

    gaunt = SphHarmService.gaunt_table_check(L, tolerance=tol, strict=False)
    grid = SphHarmService.build_grid(L)
    hersch = [SphHarmService.hersch_energy(i, grid) for i in (1, 2, 3)]
    orthonormality = SphHarmService.orthonormality_sweep(L)

    ReportGenerator.write_json(ReportGenerator.sht_report(gaunt, hersch, orthonormality, L),
                               config.out, 'sht_report.json')
    ReportGenerator.write_csv(grid.to_frame(), config.out, 'grid.csv')

    hersch_ok = all(abs(value - 8.0 * np.pi / 3.0) <= tol for value in hersch)
    ortho_ok = orthonormality <= Config.TOL_ROUND_TRIP * config.tol_scale
    _summary('sht-check', [
        ('identidades', f"{len(gaunt.checks) - len(gaunt.failures)}/{len(gaunt.checks)}", not gaunt.failures),
        ('desvio máximo', gaunt.max_deviation, not gaunt.failures),
        ('energia de Hersch', max(hersch), hersch_ok),
        ('ortonormalidade', orthonormality, ortho_ok),
    ])
    for failure in gaunt.failures:
        console.print(f"[red]identidade violada:[/red] {failure.name} em Y{failure.worst_coefficient}")
    return EXIT_OK if (not gaunt.failures and hersch_ok and ortho_ok) else EXIT_VIOLATION


@app.command('meanfield')
@_guarded
def cmd_meanfield(
    ctx: typer.Context,
    delta: Optional[float] = typer.Option(None, '--delta', help='Cota sup|u₀| ≤ delta.'),
    trials: Optional[int] = typer.Option(None, '--trials', help='Número de tentativas.'),
    p2_draws: Optional[int] = typer.Option(None, '--p2-draws', help='Sorteios da identidade de projeção.'),
):
    """Experimento de unicidade local e identidade de projeção em E₂."""
    config = _config(ctx, delta=delta, trials=trials, p2_draws=p2_draws)
    config.require_band(Config.MEANFIELD_MIN_BAND_LIMIT)

    report = MeanFieldService.uniqueness_experiment(
        config.delta, config.trials, config.seed, config.band_limit, config.workers,
    )
    report.p2_max_relative_gap = MeanFieldService.p2_identity_sweep(config.p2_draws, config.seed)

    for trial, trace in enumerate(report.traces):
        ReportGenerator.write_csv(trace.to_frame(), config.out, f'traces/trial_{trial:04d}.csv')
    for candidate in report.nonzero_candidates:
        ReportGenerator.write_coefficients(candidate.u, config.out, f'candidates/trial_{candidate.trial:04d}.txt')
    ReportGenerator.write_json(ReportGenerator.uniqueness_report(report, config.to_dict()),
                               config.out, 'uniqueness_report.json')

    p2_ok = report.p2_max_relative_gap <= Config.TOL_IDENTITY * config.tol_scale
    _summary('meanfield', [
        ('convergiram para zero', f"{report.converged_to_zero}/{report.trials}", report.all_zero),
        ('sem convergência', len(report.non_converged_trials), not report.non_converged_trials),
        ('expoente de decaimento', report.decay_exponent_estimate, True),
        ('identidade de projeção', report.p2_max_relative_gap, p2_ok),
    ])
    if not p2_ok:
        return EXIT_VIOLATION
    if report.nonzero_candidates:
        console.print(f"[yellow]{len(report.nonzero_candidates)} candidato(s) não nulo(s) registrados[/yellow]")
        return EXIT_CANDIDATE
    if report.non_converged_trials:
        console.print(f"[red]tentativas sem convergência:[/red] {report.non_converged_trials}")
        return EXIT_VIOLATION
    return EXIT_OK


@app.command('spectrum')
@_guarded
def cmd_spectrum(
    ctx: typer.Context,
    u_source: Optional[str] = typer.Option(None, '--u', help="Fonte de u: zero, random ou file."),
    u_file: Optional[Path] = typer.Option(None, '--u-file', help='Arquivo de coeficientes `l m valor`.'),
    u_sup: Optional[float] = typer.Option(None, '--u-sup', help='sup|u| para u aleatório.'),
    n_eigs: Optional[int] = typer.Option(None, '--n-eigs', help='Quantidade de autovalores.'),
):
    """Espectro de -Δ_g + K, Λ₂ e desigualdade de El Soufi-Ilias."""
    config = _config(ctx, u_source=u_source, u_file=u_file, u_sup=u_sup, n_eigs=n_eigs)
    config.require_band(Config.SPECTRAL_MIN_BAND_LIMIT)
    L = config.band_limit

    if config.u_source == 'file':
        u = read_coefficients(config.u_file, L)
    elif config.u_source == 'random':
        u = SphHarmService.random_field(L, config.u_sup, trial_rng(config.seed, 0))
    else:
        u = SphCoeffs.zeros(L)

    u = SurfSpecService.normalize_area(u)
    metric = SurfSpecService.conformal_metric(u)
    report = SurfSpecService.spectrum(metric, SurfSpecService.potential(metric), config.n_eigs)
    shifted = SurfSpecService.spectrum(metric, SurfSpecService.potential(metric, shift=-3.0), config.n_eigs)
    spread, grad_dev = SurfSpecService.eigenfunction_identity_check(metric)

    extra = {
        'potential': 'K',
        'shifted_potential': {'potential': 'K-3', **shifted.to_dict()},
        'eigenfunction_identity': {'sum_of_squares_spread': spread, 'gradient_deviation': grad_dev},
    }
    ReportGenerator.write_json(ReportGenerator.spectrum_report(report, metric, extra), config.out,
                               'spectrum_report.json')
    ReportGenerator.write_coefficients(u, config.out, 'u.txt')

    tol = Config.TOL_ESI * config.tol_scale
    ok = report.esi_gap >= -tol and shifted.esi_gap >= -tol
    _summary('spectrum', [
        ('λ₂(-Δ+K)', report.lambda2, True),
        ('Λ₂(-Δ+K-3)', shifted.Lambda2, shifted.Lambda2 <= shifted.lambda2 + Config.TOL_DEGENERACY),
        ('folga ESI', min(report.esi_gap, shifted.esi_gap), ok),
    ])
    return EXIT_OK if ok else EXIT_VIOLATION


@app.command('profile')
@_guarded
def cmd_profile(
    ctx: typer.Context,
    metric_kind: Optional[str] = typer.Option(None, '--metric', help='flat, schwarzschild, hyperbolic, ads_schwarzschild, mass_profile.'),
    m: Optional[float] = typer.Option(None, '--m', help='Massa m (ou m∞).'),
    a: Optional[float] = typer.Option(None, '--a', help='Escala do perfil de massa.'),
    mode: Optional[str] = typer.Option(None, '--mode', help='flat ou hyperbolic.'),
    r_start: Optional[float] = typer.Option(None, '--r-start', help='Primeiro raio amostrado.'),
    r_stop: Optional[float] = typer.Option(None, '--r-stop', help='Último raio amostrado.'),
    samples: Optional[int] = typer.Option(None, '--samples', help='Número de amostras.'),
    volumes: Optional[str] = typer.Option(None, '--volumes', help='Volumes separados por vírgula.'),
    small_volume: Optional[bool] = typer.Option(None, '--small-volume/--no-small-volume',
                                                help='Assintótica de volume pequeno (padrão: sem horizonte).'),
):
    """Perfil candidato, monotonicidade de m⁺_H, cotas de perfil e fluxo normal."""
    config = _config(ctx, metric=metric_kind, m=m, a=a, mode=mode, r_start=r_start, r_stop=r_stop,
                     samples=samples, volumes=volumes)
    metric = RadialMetric.from_name(config.metric, config.m, config.a)
    if config.mode is not None:
        metric = metric.with_mode(config.mode)
    if small_volume and metric.has_horizon:
        raise PreconditionError(f"assintótica de volume pequeno não se aplica a {metric.kind} (horizonte)")

    start, stop = _DEFAULT_RADII[metric.kind](metric)
    radii = np.linspace(config.r_start or start, config.r_stop or stop, config.samples)
    if config.volumes:
        curve = RotSymService.profile_curve(metric, config.volumes)
        radii = curve.column('r')
    else:
        curve = RotSymService.profile_curve(metric, RotSymService.volume_grid(metric, radii), radii)

    tol_scale = config.tol_scale
    sections = {
        'curvature': RotSymService.curvature_check(metric, radii),
        'monotonicity': RotSymService.monotonicity_report(curve, tol_scale),
        'normal_flow': RotSymService.normal_flow_check(metric, float(radii[0])),
    }
    checks = [
        ('monotonicidade de m⁺_H', sections['monotonicity'].min_increment, sections['monotonicity'].passed),
        ('fluxo normal', sections['normal_flow'].max(),
         sections['normal_flow'].max() <= Config.TOL_FLOW * tol_scale),
    ]

    stable = [r for r in radii if RotSymService.stability_gap(metric, r) >= 0]
    if stable:
        cy = [RotSymService.cy_sphere_check(metric, r) for r in stable]
        worst = min(cy, key=lambda c: c.gap)
        sections['cy_inequality'] = {'stable_spheres': len(stable), **worst.to_dict()}
        checks.append(('desigualdade de área', worst.gap, worst.holds(Config.TOL_MONOTONE * tol_scale)))

    if not metric.has_horizon:
        shi = RotSymService.shi_bound_check(curve, tol_scale=tol_scale)
        sections['shi_bound'] = shi
        checks.append(('cota de perfil', shi.max_gap, shi.passed))
    if small_volume or (small_volume is None and not metric.has_horizon):
        asymptotics = RotSymService.small_volume_asymptotics(metric, tol_scale=tol_scale)
        sections['small_volume'] = asymptotics
        checks.append(('volume pequeno', asymptotics.ratios[-1], asymptotics.passed))

    ReportGenerator.write_csv(curve.to_frame(), config.out, 'profile.csv')
    ReportGenerator.write_json(ReportGenerator.profile_report(curve, sections), config.out, 'profile_report.json')
    _summary(f'profile ({metric.kind})', checks)
    return EXIT_OK if all(ok for _, _, ok in checks) else EXIT_VIOLATION


if __name__ == '__main__':
    app()
