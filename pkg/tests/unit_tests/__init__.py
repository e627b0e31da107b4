"""Unit tests for relkd components."""
