"""Participatory governance: proposal engine, public ledger, simulator and game-theory toolkit."""

__version__ = "0.1.0"
