"""
Utilitários e hierarquia de erros.
"""
