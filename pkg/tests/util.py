"""Shared instance builders for the test suite."""

import numpy as np

from cjopt.feasibility import check_existence
from cjopt.model import (
    ChannelSet,
    SystemParams,
    channel_inversion_precoder,
    generate_rayleigh,
)


def make_instance(seed, n=8, k=3, l=6, z=2, sigma2=1.0, tau=2.0, p_tot=100.0,
                  gain_db_b=0.0):
    params = SystemParams(n=n, k=k, l=l, z=z, sigma2=sigma2, tau=tau, p_tot=p_tot)
    ch = generate_rayleigh(params, gain_db_b=gain_db_b, rng_seed=seed)
    pre = channel_inversion_precoder(ch, params.tau)
    return params, ch, pre


def feasible_instance(seed, **kw):
    """First feasible draw at or after `seed` (skips infeasible channels)."""
    while True:
        params, ch, pre = make_instance(seed, **kw)
        if check_existence(pre, params).feasible:
            return params, ch, pre
        seed += 1


def random_psd(rng, n, scale=1.0):
    M = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * (M @ M.conj().T)


def custom_channels(F, H, B, G):
    return ChannelSet(
        F=np.asarray(F, dtype=complex),
        H=np.asarray(H, dtype=complex),
        B=np.asarray(B, dtype=complex),
        G=np.asarray(G, dtype=complex),
    )
