"""
Funções auxiliares para o projeto.
"""
import re
from pathlib import Path
from typing import Dict, Iterable, List, Tuple, Union

import numpy as np

from src.models.harmonics import HarmonicIndex, SphCoeffs
from src.utils.errors import ParseError

_KEY_RE = re.compile(r'^[A-Za-z_][A-Za-z0-9_\-]*$')


def format_number(value: float, digits: int = 17) -> str:
    """
    Formata um número real com dígitos significativos suficientes para ida e volta.

    Args:
        value (float): Valor a ser formatado
        digits (int): Dígitos significativos

    Returns:
        str: Valor formatado (ex: "0.28209479177387814")
    """
    return f"{float(value):.{digits}g}"


def format_coefficients(c: SphCoeffs) -> str:
    """
    Serializa coeficientes no formato texto `l m valor`, uma entrada por linha.

    Args:
        c (SphCoeffs): Coeficientes

    Returns:
        str: Conteúdo do arquivo
    """
    lines = [
        f"{idx.l} {idx.m} {format_number(value)}"
        for idx, value in zip(HarmonicIndex.iterate(c.L), c.c)
    ]
    return '\n'.join(lines) + '\n'


def parse_coefficients(text: str, L: int = None) -> SphCoeffs:
    """
    Lê coeficientes no formato `l m valor`.

    Linhas vazias e comentários iniciados por '#' são ignorados. Entradas
    ausentes valem zero.

    Args:
        text (str): Conteúdo do arquivo
        L (int, optional): Limite de banda; padrão é o maior grau presente

    Returns:
        SphCoeffs: Coeficientes lidos
    """
    entries: Dict[Tuple[int, int], float] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue

        tokens = line.split()
        if len(tokens) != 3:
            raise ParseError(f"esperado 'l m valor', encontrado {len(tokens)} campos", line=number)
        try:
            l, m = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise ParseError(f"índice não inteiro em '{line}'", line=number)
        try:
            value = float(tokens[2])
        except ValueError:
            raise ParseError(f"valor não numérico '{tokens[2]}'", line=number)

        if l < 0 or abs(m) > l:
            raise ParseError(f"índice inválido (l={l}, m={m})", line=number)
        if not np.isfinite(value):
            raise ParseError(f"valor não finito '{tokens[2]}'", line=number)
        if (l, m) in entries:
            raise ParseError(f"coeficiente ({l},{m}) repetido", line=number)
        entries[(l, m)] = value

    max_l = max((l for l, _ in entries), default=0)
    L = max_l if L is None else L
    if max_l > L:
        raise ParseError(f"grau {max_l} acima do limite de banda {L}")
    return SphCoeffs.from_dict(entries, L)


def read_coefficients(path: Union[str, Path], L: int = None) -> SphCoeffs:
    """Lê um arquivo de coeficientes do disco."""
    return parse_coefficients(Path(path).read_text(encoding='utf-8'), L)


def parse_key_values(text: str) -> Dict[str, str]:
    """
    Lê um manifesto `chave=valor`.

    Args:
        text (str): Conteúdo do arquivo

    Returns:
        Dict[str, str]: Pares lidos, chaves normalizadas com '_' no lugar de '-'
    """
    values: Dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ParseError(f"linha sem '=': '{line}'", line=number)

        key, value = (part.strip() for part in line.split('=', 1))
        if not _KEY_RE.match(key):
            raise ParseError(f"chave inválida '{key}'", line=number)
        values[key.replace('-', '_').lower()] = value
    return values


def parse_float_list(text: str) -> List[float]:
    """Converte 'a,b,c' em lista de reais."""
    try:
        return [float(token) for token in text.split(',') if token.strip()]
    except ValueError:
        raise ParseError(f"lista numérica inválida '{text}'")


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """
    Gerador baseado em contador para a tentativa `trial`.

    O fluxo depende só de (seed, trial), então a ordem de execução das
    tentativas não altera os sorteios.
    """
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=(trial,))
    return np.random.Generator(np.random.Philox(sequence))


def strictly_increasing(values: Iterable[float]) -> bool:
    arr = np.asarray(list(values), dtype=float)
    return bool(np.all(np.diff(arr) > 0))
