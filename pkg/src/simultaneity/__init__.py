"""Clock-synchronisation conventions as executable, deterministic simulations."""

__version__ = "0.1.0"
