"""
Relatórios JSON e tabelas CSV.
"""
