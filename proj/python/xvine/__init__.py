"""X-vine models for multivariate extremes."""

import json

from ._xvine import Model, XVineError, pair_tau, tail_chi, tail_density
from ._xvine import fit as _fit

__all__ = ["Model", "XVineError", "fit", "load_model", "pair_tau", "tail_chi", "tail_density"]


def load_model(path):
    with open(path) as f:
        return Model.from_json(f.read())


def fit(data, k=0, input="raw", trunc="mbic", q=0, psi0=0.9, threads=1):
    """Fit an X-vine to an n x d array; returns the report as a dict.

    `input="raw"` rank-transforms upper-tail data with k exceedances per column,
    `input="inverted"` takes an inverted-Pareto sample as is.
    """
    return json.loads(_fit(data, k=k, input=input, trunc=trunc, q=q, psi0=psi0, threads=threads))
