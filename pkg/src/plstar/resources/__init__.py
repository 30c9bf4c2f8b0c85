"""
Configuration schemas for plstar.
"""

from .schemas import DomainConfig, FuelConfig, PlstarConfig

__all__ = ["DomainConfig", "FuelConfig", "PlstarConfig"]
