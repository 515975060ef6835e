"""
wfcheck command line.

Components:
- core: settings loaded from WFCHECK_ environment variables
- formatters: table and JSON rendering
- commands: sub-command handlers
- main: RunConfig, run and the click group
"""
