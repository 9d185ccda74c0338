"""
Command dispatch for MCP tools.

Solver runs are synchronous and can be CPU heavy (verification grids,
sweeps), so tools hand them to the default thread pool instead of blocking
the server's event loop. Errors come back as an "error" entry rather than an
exception so tools can always return a string.
"""

import asyncio
import json
import logging
from typing import Any, Callable

from pydantic import ValidationError

from cachecost.errors import CacheCostError

logger = logging.getLogger(__name__)


async def execute_command(command_type: str, fn: Callable[..., Any], *args: Any, **kwargs: Any) -> dict[str, Any]:
    """
    Run a solver command off the event loop.

    Args:
        command_type: Short label used in logs (e.g., "solve", "sweep")
        fn: Synchronous callable returning a JSON-serializable result
        *args, **kwargs: Arguments for fn

    Returns:
        Dictionary with 'result' or 'error' key
    """
    logger.info(f"[{command_type}] started")
    try:
        loop = asyncio.get_running_loop()
        result = await loop.run_in_executor(None, lambda: fn(*args, **kwargs))
        logger.info(f"[{command_type}] finished")
        return {"result": result}

    except ValidationError as e:
        logger.warning(f"[{command_type}] invalid input: {e}")
        return {"error": f"INVALID_INPUT [{command_type}]: {e}"}
    except CacheCostError as e:
        logger.warning(f"[{command_type}] {type(e).__name__}: {e}")
        return {"error": f"{type(e).__name__} [{command_type}]: {e}"}
    except OSError as e:
        logger.error(f"[{command_type}] I/O error: {e}")
        return {"error": f"IO_ERROR [{command_type}]: {e}"}


def format_response(response: dict[str, Any]) -> str:
    """
    Format a command response for MCP output.

    Args:
        response: Response dictionary from execute_command

    Returns:
        Formatted string for MCP tool response
    """
    if response.get("error"):
        return f"Error: {response['error']}"

    result = response.get("result", response)
    if isinstance(result, (dict, list)):
        return json.dumps(result, indent=2)
    return str(result)
