"""
Utility modules for plstar.
"""

from .config import load_config, merge_overrides, parse_domain_flag

__all__ = ["load_config", "merge_overrides", "parse_domain_flag"]
