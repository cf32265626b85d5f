"""Static re-entrancy analysis of EVM runtime bytecode."""

__version__ = "0.1.0"
