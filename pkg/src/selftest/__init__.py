"""Self-test audit of prover strategies."""
