"""Smoke tests for critical invariants."""
