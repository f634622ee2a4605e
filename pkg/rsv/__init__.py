"""
rsv - Distributionally robust reach-avoid safety verification for uncertain MDPs.
"""

__version__ = "0.1.0"
