"""
Testes para o gerador de relatórios.
"""
import unittest
import sys
import os
import json
import tempfile
from pathlib import Path

import numpy as np
import pandas as pd

# Adiciona o diretório raiz ao path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.config.settings import Config
from src.models.radial import RadialMetric
from src.reports.report_generator import ReportGenerator
from src.services.rotsym_service import RotSymService
from src.services.sphharm_service import SphHarmService
from src.utils.helpers import read_coefficients


class TestJson(unittest.TestCase):
    """Testes para a serialização JSON."""

    def test_schema_and_precision(self):
        """Testa o campo schema e 17 dígitos significativos."""
        text = ReportGenerator.render_json({'value': 0.1, 'count': np.int64(3)})
        data = json.loads(text)
        self.assertEqual(data['schema'], Config.REPORT_SCHEMA)
        self.assertEqual(data['count'], 3)
        self.assertIn('0.10000000000000001', text)
        self.assertEqual(data['value'], 0.1)

    def test_non_finite_as_null(self):
        """Testa NaN e infinito como null."""
        data = json.loads(ReportGenerator.render_json({'a': float('nan'), 'b': [np.inf, 1.5]}))
        self.assertIsNone(data['a'])
        self.assertEqual(data['b'], [None, 1.5])

    def test_nested_structures(self):
        """Testa dicionários, arrays e booleanos do numpy."""
        payload = {'arr': np.array([1.0, 2.5]), 'flag': np.bool_(True), 'empty': {}, 'text': 'ok'}
        data = json.loads(ReportGenerator.render_json(payload))
        self.assertEqual(data['arr'], [1.0, 2.5])
        self.assertIs(data['flag'], True)
        self.assertEqual(data['empty'], {})
        self.assertEqual(data['text'], 'ok')

    def test_deterministic(self):
        """Testa saída idêntica para o mesmo conteúdo."""
        payload = {'x': [0.1, 0.2], 'y': {'z': 1e-300}}
        self.assertEqual(ReportGenerator.render_json(payload), ReportGenerator.render_json(payload))


class TestFiles(unittest.TestCase):
    """Testes para arquivos gerados."""

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.out = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def test_csv(self):
        """Testa CSV com 17 dígitos e subdiretório criado."""
        frame = pd.DataFrame({'k': [0, 1], 'sup_norm': [0.1, 1e-14]})
        path = ReportGenerator.write_csv(frame, self.out, 'traces/trial_0000.csv')
        lines = path.read_text(encoding='utf-8').splitlines()
        self.assertEqual(lines[0], 'k,sup_norm')
        self.assertEqual(lines[1], '0,0.10000000000000001')

    def test_coefficients_round_trip(self):
        """Testa o arquivo de coeficientes gravado."""
        u = SphHarmService.random_field(4, 0.1, np.random.default_rng(0))
        path = ReportGenerator.write_coefficients(u, self.out, 'u.txt')
        np.testing.assert_array_equal(read_coefficients(path, 4).c, u.c)

    def test_sht_report(self):
        """Testa o resumo da verificação de harmônicos."""
        gaunt = SphHarmService.gaunt_table_check(8)
        payload = ReportGenerator.sht_report(gaunt, [8 * np.pi / 3] * 3, 1e-15, 8)
        path = ReportGenerator.write_json(payload, self.out, 'sht_report.json')
        data = json.loads(path.read_text(encoding='utf-8'))
        self.assertEqual(data['band_limit'], 8)
        self.assertEqual(set(data['hersch_energy']), {'x1', 'x2', 'x3'})

    def test_profile_report(self):
        """Testa seções com e sem to_dict."""
        flat = RadialMetric.flat()
        curve = RotSymService.profile_curve(flat, [0.5, 1.0, 2.0])
        sections = {'monotonicity': RotSymService.monotonicity_report(curve), 'extra': {'n': 1}}
        data = json.loads(ReportGenerator.render_json(ReportGenerator.profile_report(curve, sections)))
        self.assertEqual(data['samples'], 3)
        self.assertEqual(data['metric']['kind'], 'flat')
        self.assertIn('passed', data['monotonicity'])
        self.assertEqual(data['extra'], {'n': 1})


if __name__ == '__main__':
    unittest.main()
