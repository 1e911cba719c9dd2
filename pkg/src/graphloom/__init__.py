"""graphloom: schema-driven typed property graph construction."""

__version__ = "0.1.0"
