"""Scientific claim analysis: extraction, retrieval, verification, and evaluation."""

__version__ = "0.1.0"
