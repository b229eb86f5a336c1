"""ilkit: a self-contained toolkit for ionic-liquid property workflows.

Covers SMILES parsing and canonicalization, physicochemical descriptors,
graph featurization, fingerprints and similarity, dataset schemas with
synthetic-system generation, baseline regressors, grouped cross-validation,
thermodynamic cycle relations, and Tanimoto-guided beam-search screening.
"""

__version__ = "0.1.0"
