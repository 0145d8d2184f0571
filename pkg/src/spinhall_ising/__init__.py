"""Ising machine built from stochastic Spin-Hall-effect MTJ cells."""

__version__ = "0.1.0"
