"""Perfect circle-valued Morse functions on coloured right-angled polytopes."""

__version__ = "0.1.0"
