"""
Coded caching with placement cost.

This package computes optimal coded-caching placements when pushing content
into user caches is not free, cross-checks the closed-form optimum against an
exhaustive vertex oracle, and simulates the placement/delivery scheme at the
byte level. It ships a command-line tool and an MCP server.
"""

__version__ = "0.1.0"
