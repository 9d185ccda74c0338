"""
Shared MCP server instance for all tool modules.

Import `mcp` from this module to register tools.
"""

import logging
from contextlib import asynccontextmanager
from pathlib import Path
from typing import Any, AsyncIterator, Dict

from mcp.server.fastmcp import FastMCP

from cachecost import __version__
from cachecost.config import config

logger = logging.getLogger(__name__)


@asynccontextmanager
async def server_lifespan(server: FastMCP) -> AsyncIterator[Dict[str, Any]]:
    """
    Manage MCP server startup and shutdown.

    Makes sure the dataset output directory exists before any sweep tool runs.
    """
    logger.info("=" * 60)
    logger.info(f"cachecost MCP server {__version__} - STARTUP")
    output_dir = Path(config.OUTPUT_DIR)
    try:
        output_dir.mkdir(parents=True, exist_ok=True)
        logger.info(f"  datasets are written to: {output_dir.resolve()}")
    except OSError as e:
        logger.error(f"  cannot create output directory {output_dir}: {e}")
    logger.info(f"  comparison tolerance: {config.TOLERANCE:g}")
    logger.info("=" * 60)
    try:
        yield {"output_dir": output_dir}
    finally:
        logger.info("cachecost MCP server - SHUTDOWN")


mcp = FastMCP(
    "cachecost_mcp",
    lifespan=server_lifespan
)
