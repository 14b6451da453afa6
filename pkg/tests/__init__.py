"""
Unit tests for aircon.
"""
