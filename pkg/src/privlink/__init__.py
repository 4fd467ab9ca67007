"""Record linkage, private set intersection, and disclosure-limitation toolkit."""

__version__ = "0.1.0"
