"""tacpress: tactile-aware three-finger syringe pressing at desk scale."""

__version__ = "0.1.0"
