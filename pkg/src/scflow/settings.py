"""Global numerical settings.

A single mutable record holds the default tolerances used across the
package.  The environment variable ``SCFFLOW_TOL`` overrides the default
absolute tolerance at import time.
"""
import os
from contextlib import contextmanager
from dataclasses import dataclass


@dataclass
class Settings:
    tol: float = 1e-10
    # a lower/derived series term counts as zero below this norm
    series_tol: float = 1e-9
    # semisimplicity: eigendecomposition must reconstruct to this level
    semisimple_tol: float = 1e-8
    # singular values below rank_tol * sigma_max span the derivation kernel
    rank_tol: float = 1e-10
    # soliton certificates
    fit_tol: float = 1e-8


def _from_env() -> Settings:
    s = Settings()
    raw = os.environ.get("SCFFLOW_TOL")
    if raw:
        s.tol = float(raw)
    return s


settings = _from_env()


@contextmanager
def override(**kwargs):
    """Temporarily change fields of the global settings record."""
    old = {k: getattr(settings, k) for k in kwargs}
    for k, v in kwargs.items():
        setattr(settings, k, v)
    try:
        yield settings
    finally:
        for k, v in old.items():
            setattr(settings, k, v)
