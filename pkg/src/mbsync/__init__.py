"""Mailbox synchronizability of communicating finite-state machines."""

__version__ = "0.1.0"
