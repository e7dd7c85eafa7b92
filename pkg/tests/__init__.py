"""
Testes do laboratório. Execute com `python -m unittest discover tests`.

Varreduras no tamanho de aceitação só rodam com HAWKLAB_SLOW=1.
"""
import os

os.environ.setdefault('HAWKLAB_PROGRESS', 'false')
os.environ.setdefault('HAWKLAB_LOG_LEVEL', 'WARNING')
