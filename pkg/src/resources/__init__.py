"""Package data: bundled fixtures."""
