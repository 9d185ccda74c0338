"""
Tool modules for the cachecost MCP server.

- solve: closed-form optimum, thresholds
- verify: oracle cross-check over a grid, corner-point claims
- simulate: byte-level scheme simulation
- sweep: sweep datasets
"""

from cachecost.tools import solve
from cachecost.tools import verify
from cachecost.tools import simulate
from cachecost.tools import sweep

__all__ = [
    "solve",
    "verify",
    "simulate",
    "sweep",
]
