"""
Configurações do laboratório numérico de massa de Hawking.
"""
import os
from dotenv import load_dotenv

# Carrega variáveis de ambiente do arquivo .env
load_dotenv()


def _env_float(name: str, default: float) -> float:
    return float(os.getenv(name, str(default)))


class Config:
    """Configurações base."""

    # Aplicação
    APP_NAME = os.getenv('APP_NAME', 'HawkLab')
    APP_VERSION = os.getenv('APP_VERSION', '1.0.0')
    LOG_LEVEL = os.getenv('HAWKLAB_LOG_LEVEL', 'INFO').upper()
    SHOW_PROGRESS = os.getenv('HAWKLAB_PROGRESS', 'True').lower() == 'true'

    # Execução
    BAND_LIMIT = int(os.getenv('HAWKLAB_BAND_LIMIT', '12'))
    SEED = int(os.getenv('HAWKLAB_SEED', '0'))
    OUTPUT_DIR = os.getenv('HAWKLAB_OUT', 'results')
    TOL_SCALE = _env_float('HAWKLAB_TOL_SCALE', 1.0)
    REPORT_SCHEMA = 1
    SIGNIFICANT_DIGITS = 17

    # Harmônicos esféricos
    MIN_BAND_LIMIT = 4
    MEANFIELD_MIN_BAND_LIMIT = 8
    GAUNT_MIN_BAND_LIMIT = 8
    TOL_IDENTITY = 1e-12
    TOL_ROUND_TRIP = 1e-12

    # Equação de campo médio
    DELTA_DEFAULT = 0.05
    DELTA_MAX = 0.2
    TRIALS_DEFAULT = 100
    TIKHONOV = 1e-10
    MAX_ITERS = 50
    SUP_FLOOR = 1e-13
    RESIDUAL_FLOOR = 1e-12
    ZERO_SOLUTION_TOL = 1e-11
    EXP_OVERFLOW_SUP = 50.0
    TOL_LIFTED = 1e-13
    TOL_NEARLY_ROUND = 1e-8
    DECAY_WINDOW = 1e-3
    P2_SWEEP_DRAWS = 1000

    # Espectro de superfícies
    SPECTRAL_MIN_BAND_LIMIT = 12
    N_EIGS = 9
    TOL_DEGENERACY = 1e-8
    TOL_GAUSS_BONNET = 1e-10
    TOL_ESI = 1e-8
    TOL_AREA = 1e-10
    SOLUTION_RESIDUAL = 1e-10

    # Métricas rotacionalmente simétricas
    QUAD_RTOL = 1e-10
    INCREMENT_RTOL = 1e-13
    ROOT_RTOL = 1e-15
    DERIVATIVE_STEP = 1e-4
    SECOND_DERIVATIVE_STEP = 1e-3
    TOL_PROFILE = 1e-10
    TOL_CURVATURE = 1e-10
    TOL_FLOW = 1e-8
    TOL_BRAY = 1e-6
    TOL_MONOTONE = 1e-8
    TOL_SHI = 1e-8
    TOL_ASYMPTOTIC = 1e-4
    PROFILE_SAMPLES = 200
    FLOW_SAMPLES = 64


class TestingConfig(Config):
    """Configurações para testes."""
    TESTING = True
    SHOW_PROGRESS = False
    LOG_LEVEL = 'WARNING'


# Configuração baseada no ambiente
config = {
    'testing': TestingConfig,
    'default': Config
}
