"""Weight and stopping-set spectral shapes of irregular D-GLDPC ensembles."""

__version__ = "0.1.0"
