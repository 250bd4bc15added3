"""
Likelihood Lab - Backend
Exact-oracle laboratory for maximum likelihood, one-way puzzles and distribution learning
"""

__version__ = "0.1.0"
