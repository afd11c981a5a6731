"""
tetradjet: Relatividad General de primer orden con tétradas sobre el fibrado de jets J(E)
"""

__version__ = '0.1.0'
__author__ = 'Equipo tetradjet'
