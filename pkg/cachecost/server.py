#!/usr/bin/env python3
"""
cachecost MCP server.

Exposes the placement-cost solver to MCP clients over stdio:
- solve / thresholds: closed-form optimum and regime boundaries
- verify / check_claims: cross-checks against the vertex oracle
- simulate: byte-level placement and delivery run with decoding
- sweep: sweep datasets written as CSV/JSON
"""

import logging

from cachecost.config import config

# Configure logging to stderr (required for stdio transport)
logging.basicConfig(
    level=config.LOG_LEVEL,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    handlers=[logging.StreamHandler()]
)
logger = logging.getLogger(__name__)

from cachecost.shared import mcp

# Importing the tool modules registers their tools on the shared instance
from cachecost.tools import (  # noqa: F401
    simulate,
    solve,
    sweep,
    verify,
)


def main():
    """Entry point for the MCP server."""
    logger.info("Starting cachecost MCP server...")
    mcp.run()


if __name__ == "__main__":
    main()
