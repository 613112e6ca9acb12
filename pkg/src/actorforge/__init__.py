"""actorforge: dataflow actors for contracts, a sequential contract VM, and the tools between them."""

__version__ = "0.1.0"
