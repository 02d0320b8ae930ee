"""
Hellinger geometric discord toolkit
"""

__version__ = "1.0.0"
