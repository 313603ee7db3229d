"""Occur-check analysis for definite clause programs: MMA/MMA⁻ unification, NSTO/WNSTO, modes and SLD trees."""

__version__ = "0.1.0"
