"""
Utility helper functions for the spectral checker.
Contains the quadrature retry decorator and time utilities.
"""

from datetime import datetime
from functools import wraps
import logging

import pytz

from constants.constants import DEFAULT_TIMEZONE, INITIAL_OFFSET_STEP, MAX_OFFSET_STEP, MAX_RETRIES
from core.errors import PoleCollisionError

logger = logging.getLogger(__name__)


def _find_contour(args, kwargs):
    from core.quad import ContourSpec

    for key, value in kwargs.items():
        if isinstance(value, ContourSpec):
            return ('kw', key), value
    for index, value in enumerate(args):
        if isinstance(value, ContourSpec):
            return ('pos', index), value
    return None, None


def retry_with_node_perturbation(
    max_retries=MAX_RETRIES,
    initial_step=INITIAL_OFFSET_STEP,
    max_step=MAX_OFFSET_STEP
):
    """Decorator for retrying quadratures whose nodes hit a pole, with a perturbed node offset."""
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            step = initial_step
            last_exception = None
            args = list(args)

            for attempt in range(max_retries):
                try:
                    return func(*args, **kwargs)
                except PoleCollisionError as e:
                    last_exception = e
                    where, contour = _find_contour(args, kwargs)
                    if contour is None or attempt == max_retries - 1:
                        logger.error(f"Pole collision, no retry left: {e}")
                        raise
                    logger.warning(f"Pole collision in {func.__name__}. Shifting node offset by {step} "
                                   f"(Attempt {attempt + 1}/{max_retries})")
                    moved = contour.with_offset(contour.offset + step)
                    if where[0] == 'kw':
                        kwargs[where[1]] = moved
                    else:
                        args[where[1]] = moved
                    step = min(step * 2, max_step)

            raise last_exception

        return wrapper
    return decorator


def get_report_time(timezone=DEFAULT_TIMEZONE):
    """Get current time in the report time zone."""
    try:
        return datetime.now(pytz.timezone(timezone))
    except Exception as e:
        logger.error(f"Error getting time for zone {timezone}: {e}", exc_info=True)
        return datetime.now(pytz.utc)


def format_timestamp(dt):
    """Format datetime object to readable string."""
    try:
        return dt.strftime('%Y-%m-%d %H:%M:%S %Z')
    except Exception as e:
        logger.error(f"Error formatting timestamp: {e}", exc_info=True)
        return str(dt)
