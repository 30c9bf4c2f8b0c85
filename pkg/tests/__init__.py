"""
Test suite for plstar.
"""
