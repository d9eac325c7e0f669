"""Scan driver, champions, histograms and table verification."""
