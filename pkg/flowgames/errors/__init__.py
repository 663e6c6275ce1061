"""
Error handling module for the flowgames package.

This module provides the exception hierarchy shared by the library modules and
the helpers the CLI uses to turn file and schema problems into diagnostics.
"""
