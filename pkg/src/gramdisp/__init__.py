"""Distribution-based prediction of the degree of grammaticalization of German prepositions."""

__version__ = "0.1.0"
