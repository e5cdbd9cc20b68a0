"""Subsection-level legislative bill similarity.

Parse bills into subsections, sample candidate pairs, generate synthetic
labelled pairs, classify pairs with affine-gap local alignment features and
multinomial logistic regression, and aggregate subsection labels into
section- and bill-level similarity.
"""

__version__ = "0.1.0"
