"""cfkit: abstract continued fractions in exact arithmetic"""
__version__ = "1.0.0"
