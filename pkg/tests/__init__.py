"""Test package for servidor."""
