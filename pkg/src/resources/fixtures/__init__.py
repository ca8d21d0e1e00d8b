"""Bundled graph and chain fixtures (package data)."""
