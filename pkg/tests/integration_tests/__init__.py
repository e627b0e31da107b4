"""Integration tests: full training runs with directional assertions."""
