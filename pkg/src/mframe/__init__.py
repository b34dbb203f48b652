"""Moving-frame computation of differential invariants, recurrences and syzygies."""

__version__ = "0.1.0"
