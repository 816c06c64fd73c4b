"""Integrated guidance and control toolkit for a 150 mm fixed-wing MAV."""

__version__ = "0.1.0"
