"""Service layer for the command-line front end.

Config loading, CSV exchange, solve/sweep orchestration and operator
diagnostics live here so the CLI stays a thin argument-parsing shell.
"""
