"""Step definitions package."""
