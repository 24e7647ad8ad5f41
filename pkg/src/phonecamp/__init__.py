"""Toolkit for detecting, clustering, labeling, and characterizing
phone-number-based spam campaigns across social platforms."""

__version__ = "0.1.0"
