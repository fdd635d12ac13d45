"""Pen testing, deferred-acceptance auctions and virtual pricing."""

from ._pentest import *  # noqa: F401,F403
from ._pentest import __doc__  # noqa: F401
