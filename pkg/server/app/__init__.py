"""Gravity-mode spectrum and linearized waves of a stratified atmosphere touching vacuum."""

__version__ = "0.1.0"
