"""Query symbols the verifier may send to a prover."""

from enum import Enum


class QuerySymbol(str, Enum):
    """Measurement setting names; IDENTITY means the prover idles and reports +1."""

    X = "X"
    Z = "Z"
    DPLUS = "D+"
    DMINUS = "D-"
    IDENTITY = "I"

    @classmethod
    def measured(cls) -> tuple["QuerySymbol", ...]:
        """The four symbols that trigger an actual measurement."""
        return (cls.X, cls.Z, cls.DPLUS, cls.DMINUS)

    def __str__(self) -> str:
        return self.value


# Bit position of each measured symbol inside a vertex's 4-bit block
SYMBOL_INDEX = {symbol: i for i, symbol in enumerate(QuerySymbol.measured())}
