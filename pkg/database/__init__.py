from .db import ResultsDatabase

__all__ = ["ResultsDatabase"]
