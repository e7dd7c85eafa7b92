"""
Hierarquia de exceções do laboratório.

Cada classe carrega o código de saída usado pela linha de comando.
"""
from typing import Any, Optional


class HawkLabError(Exception):
    """Erro base do laboratório."""

    exit_code = 1


class ConfigurationError(HawkLabError, ValueError):
    """Configuração inválida (limite de banda, parâmetros de métrica, etc.)."""

    exit_code = 2


class ParseError(ConfigurationError):
    """Arquivo de entrada mal formado."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"linha {line}: {message}"
        super().__init__(message)


class DimensionError(ConfigurationError):
    """Tamanhos incompatíveis entre grade e coeficientes."""


class ResolutionError(ConfigurationError):
    """Grade insuficiente para integrar o produto exatamente."""


class DomainError(HawkLabError, ValueError):
    """Argumento fora do domínio da operação."""

    exit_code = 2


class PreconditionError(HawkLabError, ValueError):
    """Pré-condição da operação não satisfeita."""

    exit_code = 2


class RangeError(HawkLabError, ArithmeticError):
    """Valor fora da faixa numérica suportada."""


class IntegrationError(HawkLabError, ArithmeticError):
    """Quadratura ou inversão que não convergiu."""


class LinearSolveError(HawkLabError, ArithmeticError):
    """Sistema linear singular mesmo após a regularização."""


class AssemblyError(HawkLabError, ArithmeticError):
    """Matriz de massa que não é positiva definida."""


class IdentityViolationError(HawkLabError, AssertionError):
    """Identidade matemática violada além da tolerância."""

    def __init__(self, message: str, report: Any = None):
        self.report = report
        super().__init__(message)


class FormulaRegressionError(IdentityViolationError):
    """Fórmula fechada que deixou de bater com o valor esperado."""
