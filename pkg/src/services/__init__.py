"""
Serviços numéricos do laboratório.
"""
