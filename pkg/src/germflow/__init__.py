"""Classical germs, transition probability spaces and mean-field limits."""

__version__ = "0.1.0"
