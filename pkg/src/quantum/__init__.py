"""Dense pure-state simulation."""
