"""
Gerador de relatórios JSON e tabelas CSV dos experimentos.
"""
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd

from src.config.settings import Config
from src.utils.helpers import format_coefficients

logger = logging.getLogger(__name__)


class _Raw(str):
    """Número já formatado que vai ao JSON sem aspas."""


def _normalize(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _normalize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_normalize(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_normalize(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            return None
        return _Raw(f"{value:.{Config.SIGNIFICANT_DIGITS}g}")
    if isinstance(value, Path):
        return str(value)
    return value


def _encode(value: Any, indent: int = 0) -> str:
    pad = '  ' * (indent + 1)
    if isinstance(value, _Raw):
        return str(value)
    if isinstance(value, dict):
        if not value:
            return '{}'
        items = [f"{pad}{json.dumps(k, ensure_ascii=False)}: {_encode(v, indent + 1)}" for k, v in value.items()]
        return '{\n' + ',\n'.join(items) + '\n' + '  ' * indent + '}'
    if isinstance(value, list):
        if not value:
            return '[]'
        items = [f"{pad}{_encode(v, indent + 1)}" for v in value]
        return '[\n' + ',\n'.join(items) + '\n' + '  ' * indent + ']'
    return json.dumps(value, ensure_ascii=False)


class ReportGenerator:
    """Gerador de relatórios e tabelas dos experimentos."""

    @staticmethod
    def render_json(payload: Dict) -> str:
        """
        Serializa um relatório com 17 dígitos significativos e campo `schema`.

        Args:
            payload (Dict): Conteúdo do relatório

        Returns:
            str: JSON determinístico
        """
        body = {'schema': Config.REPORT_SCHEMA, **payload}
        return _encode(_normalize(body)) + '\n'

    @staticmethod
    def write_json(payload: Dict, out_dir: Path, name: str) -> Path:
        path = Path(out_dir) / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(ReportGenerator.render_json(payload), encoding='utf-8')
        logger.info(f"Relatório salvo em {path}")
        return path

    @staticmethod
    def write_csv(frame: pd.DataFrame, out_dir: Path, name: str) -> Path:
        """Grava uma tabela com 17 dígitos significativos."""
        path = Path(out_dir) / name
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format=f'%.{Config.SIGNIFICANT_DIGITS}g', lineterminator='\n')
        logger.info(f"Tabela salva em {path}")
        return path

    @staticmethod
    def write_coefficients(coeffs, out_dir: Path, name: str) -> Path:
        path = Path(out_dir) / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(format_coefficients(coeffs), encoding='utf-8')
        return path

    @staticmethod
    def sht_report(gaunt, hersch, orthonormality: float, band_limit: int) -> Dict:
        """Resumo da verificação de harmônicos."""
        return {
            'band_limit': band_limit,
            'gaunt': gaunt.to_dict(),
            'hersch_energy': {f'x{i}': value for i, value in enumerate(hersch, start=1)},
            'hersch_expected': 8.0 * np.pi / 3.0,
            'orthonormality_max_deviation': orthonormality,
        }

    @staticmethod
    def uniqueness_report(report, config: Optional[Dict] = None) -> Dict:
        payload = report.to_dict()
        if config is not None:
            payload['config'] = config
        return payload

    @staticmethod
    def spectrum_report(report, metric, extra: Optional[Dict] = None) -> Dict:
        payload = report.to_dict()
        payload['gauss_bonnet'] = metric.gauss_bonnet()
        payload.update(extra or {})
        return payload

    @staticmethod
    def profile_report(curve, sections: Dict[str, Any]) -> Dict:
        payload = {
            'label': curve.label,
            'metric': curve.metric.to_dict(),
            'samples': len(curve),
        }
        for key, section in sections.items():
            payload[key] = section.to_dict() if hasattr(section, 'to_dict') else section
        return payload
