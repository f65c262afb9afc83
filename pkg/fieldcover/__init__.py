"""
fieldcover - coverage path planning for agricultural fields with obstacles.
"""

__version__ = "0.1.0"
