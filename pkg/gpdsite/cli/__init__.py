"""Groupoid files, presets, reports and the ``gpdsite`` command."""
