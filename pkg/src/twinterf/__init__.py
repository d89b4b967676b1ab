"""
Two-particle interference toolkit: HOM, extended HOM and HBT patterns from a
single n-port engine.
"""
__version__ = '0.1.0'
