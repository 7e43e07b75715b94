"""
Services module for the numerics.

Curve, surface, energy and flow computations, plus artifact I/O and the
reproduction pipeline that strings them together.
"""
