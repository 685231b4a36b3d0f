"""
proxies/fss.py
Furthest sphere sampling: greedy selection maximizing the minimum normalized
separation ``‖x_n − x_m‖ / (r_n + r_m + ε)`` to the spheres already chosen.
"""

import logging

import numpy as np

from core.constants import KIND_MEDIAL
from core.errors import NotEnoughCandidates
from proxies.candidates import FssConfig
from proxies.spheres import ProxySet, Spheres

logger = logging.getLogger(__name__)


def furthest_sphere_sampling(candidates: Spheres, cfg: FssConfig) -> ProxySet:
    """
    Select ``cfg.m_select`` spheres from *candidates*.

    The first pick is the largest sphere; later picks maximize the minimum
    normalized separation. Ties go to the lowest index.

    ``cfg.epsilon`` must be resolved (or set) by the caller; ``None`` counts as 0.

    Raises
    ------
    NotEnoughCandidates
        If more spheres are requested than there are candidates.
    """
    m, n = cfg.m_select, len(candidates)
    if n == 0 or m > n:
        raise NotEnoughCandidates(f"requested {m} spheres from {n} candidates")
    eps = cfg.epsilon or 0.0
    c, r = candidates.centers, candidates.radii

    order = np.empty(m, dtype=np.int64)
    order[0] = int(np.argmax(r))
    chosen = np.zeros(n, dtype=bool)
    chosen[order[0]] = True
    min_sep = np.full(n, np.inf)
    separations = np.empty(m - 1)

    for k in range(1, m):
        last = order[k - 1]
        sep = np.linalg.norm(c - c[last], axis=1) / (r + r[last] + eps)
        np.minimum(min_sep, sep, out=min_sep)
        score = np.where(chosen, -np.inf, min_sep)
        pick = int(np.argmax(score))
        order[k] = pick
        separations[k - 1] = score[pick]
        chosen[pick] = True

    logger.debug("FSS picked %d of %d spheres (last separation %.4g)",
                 m, n, separations[-1] if m > 1 else float("nan"))
    return ProxySet(spheres=candidates.take(order), kind=KIND_MEDIAL, separations=separations, order=order)
