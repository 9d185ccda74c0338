"""
Tests for cachecost.
"""
