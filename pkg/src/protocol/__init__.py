"""The classical verifier."""
