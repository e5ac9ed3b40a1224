"""Ingredient pairing toolkit.

Builds NPMI pairing scores from a recipe corpus, trains a Siamese
wide&deep regressor to predict scores for unseen ingredient pairs, and
serves ranked pairing recommendations over a CLI and an HTTP API.
"""

__version__ = "0.1.0"
