"""Two-unicast linear network coding: cut vectors, rate regions and code construction."""

__version__ = "0.1.0"
