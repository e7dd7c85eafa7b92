"""
Configuração de execução da linha de comando.
"""
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.config.settings import Config
from src.utils.errors import ConfigurationError
from src.utils.helpers import parse_float_list, parse_key_values

METRIC_KINDS = ('flat', 'schwarzschild', 'hyperbolic', 'ads_schwarzschild', 'mass_profile')
U_SOURCES = ('zero', 'random', 'file')


class RunConfig(BaseModel):
    """Parâmetros de um experimento: padrões < arquivo chave=valor < opções."""

    model_config = ConfigDict(extra='forbid', frozen=True)

    band_limit: int = Field(default_factory=lambda: Config.BAND_LIMIT, ge=Config.MIN_BAND_LIMIT)
    seed: int = Field(default_factory=lambda: Config.SEED, ge=0)
    out: Path = Field(default_factory=lambda: Path(Config.OUTPUT_DIR))
    tol_scale: float = Field(default_factory=lambda: Config.TOL_SCALE, gt=0)
    workers: int = Field(default=1, ge=1)

    # campo médio
    delta: float = Field(default=Config.DELTA_DEFAULT, ge=0, le=Config.DELTA_MAX)
    trials: int = Field(default=Config.TRIALS_DEFAULT, ge=0)
    p2_draws: int = Field(default=Config.P2_SWEEP_DRAWS, ge=1)

    # espectro
    u_source: str = 'zero'
    u_file: Optional[Path] = None
    u_sup: float = Field(default=0.2, ge=0)
    n_eigs: int = Field(default=Config.N_EIGS, ge=2)

    # perfil
    metric: str = 'flat'
    m: float = Field(default=1.0, gt=0)
    a: Optional[float] = Field(default=None, gt=0)
    mode: Optional[str] = None
    r_start: Optional[float] = Field(default=None, gt=0)
    r_stop: Optional[float] = Field(default=None, gt=0)
    samples: int = Field(default=Config.PROFILE_SAMPLES, ge=3)
    volumes: Optional[List[float]] = None

    @field_validator('u_source')
    @classmethod
    def _valid_source(cls, value: str) -> str:
        if value not in U_SOURCES:
            raise ValueError(f"fonte de u deve ser uma de {', '.join(U_SOURCES)}")
        return value

    @field_validator('metric')
    @classmethod
    def _valid_metric(cls, value: str) -> str:
        value = value.replace('-', '_')
        if value not in METRIC_KINDS:
            raise ValueError(f"métrica deve ser uma de {', '.join(METRIC_KINDS)}")
        return value

    @field_validator('mode')
    @classmethod
    def _valid_mode(cls, value: Optional[str]) -> Optional[str]:
        if value is not None and value not in ('flat', 'hyperbolic'):
            raise ValueError("modo deve ser 'flat' ou 'hyperbolic'")
        return value

    @field_validator('volumes', mode='before')
    @classmethod
    def _split_volumes(cls, value: Any) -> Any:
        if isinstance(value, str):
            return parse_float_list(value)
        return value

    @model_validator(mode='after')
    def _check_ranges(self) -> 'RunConfig':
        if self.u_source == 'file' and self.u_file is None:
            raise ValueError("fonte 'file' exige u_file")
        if self.r_start is not None and self.r_stop is not None and self.r_stop <= self.r_start:
            raise ValueError("r_stop deve ser maior que r_start")
        return self

    def require_band(self, minimum: int) -> None:
        if self.band_limit < minimum:
            raise ConfigurationError(f"limite de banda {self.band_limit} < {minimum} para este comando")

    @classmethod
    def build(cls, config_file: Optional[Path] = None, **overrides: Any) -> 'RunConfig':
        """
        Mescla o arquivo chave=valor com as opções da linha de comando.

        Args:
            config_file (Path, optional): Manifesto chave=valor
            **overrides: Opções explícitas (None é ignorado)

        Returns:
            RunConfig: Configuração validada
        """
        values: Dict[str, Any] = {}
        if config_file is not None:
            values.update(parse_key_values(Path(config_file).read_text(encoding='utf-8')))
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)

    def to_dict(self) -> Dict[str, Any]:
        data = self.model_dump(mode='json')
        data.pop('out', None)
        return data
