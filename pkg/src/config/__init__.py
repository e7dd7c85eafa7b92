"""
Módulo de configuração do laboratório.
"""
