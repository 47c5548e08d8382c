"""Utility functions"""
# Modules are imported directly (app.utils.logging_setup, app.utils.templates, app.utils.time_utils)

__all__ = []
