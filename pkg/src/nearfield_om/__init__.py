"""Design and verification toolkit for a membrane-over-microtoroid optomechanical system."""

__version__ = "0.1.0"
