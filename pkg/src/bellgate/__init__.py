"""bellgate: exact LP feasibility checks for hidden-variable models.

Decides, with rational certificates, whether the single-qubit planar scenario
admits a decomposition-compatible hidden-variable model and whether the
corresponding two-party correlations admit a local model, and converts
witnesses between the two pictures.
"""

__version__ = "0.1.0"
