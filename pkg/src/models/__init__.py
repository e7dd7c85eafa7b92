"""
Modelos de dados: coeficientes harmônicos, estados de campo médio, espectros e perfis radiais.
"""
