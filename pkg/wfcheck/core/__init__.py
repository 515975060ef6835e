"""Core configuration for the wfcheck command line."""

from .config import Settings, settings

__all__ = ['Settings', 'settings']
