
"""Exact group algebra and linear algebra on Grassmannians."""
