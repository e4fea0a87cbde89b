"""Covering-LP view of weighted caching.

One eviction variable per (page, epoch): x_p(r) says whether page p is
evicted between its r-th and (r+1)-st requests. A request for page p opens
p's next epoch variable and, once more pages have been requested than fit in
the cache, emits the row sum over the other requested pages' current epoch
variables, normalized by |B(j)| - h.
"""

from __future__ import annotations

from typing import Hashable, Mapping

from .constraints import SparseConstraint


class CacheModel:
    """Tracks request counts and the epoch-variable registry."""

    def __init__(self, page_weights: Mapping[Hashable, float], cache_size: int):
        if cache_size < 1:
            raise ValueError(f"cache size must be at least 1, got {cache_size}")
        self.page_weights = {p: float(w) for p, w in page_weights.items()}
        for p, w in self.page_weights.items():
            if w < 0.0:
                raise ValueError(f"page {p!r} has negative weight {w}")
        self.cache_size = cache_size
        self.request_counts: dict[Hashable, int] = {}
        self.var_index: dict[tuple[Hashable, int], int] = {}
        self.var_costs: list[float] = []
        self.var_names: list[tuple[Hashable, int]] = []
        self.requests_seen = 0
        self.constraints_emitted = 0

    def _register(self, page, epoch: int) -> int:
        key = (page, epoch)
        if key not in self.var_index:
            self.var_index[key] = len(self.var_costs)
            self.var_costs.append(self.page_weights[page])
            self.var_names.append(key)
        return self.var_index[key]

    def request(self, page) -> SparseConstraint | None:
        """Process one request; returns the emitted row, or None while the
        requested set still fits in the cache."""
        if page not in self.page_weights:
            raise KeyError(f"unknown page {page!r}")
        self.requests_seen += 1
        epoch = self.request_counts.get(page, 0) + 1
        self.request_counts[page] = epoch
        self._register(page, epoch)

        overflow = len(self.request_counts) - self.cache_size
        if overflow <= 0:
            return None
        coeff = 1.0 / overflow
        entries = []
        for p, r in self.request_counts.items():
            if p == page:
                continue
            entries.append((self.var_index[(p, r)], coeff))
        constraint = SparseConstraint(self.constraints_emitted, tuple(entries))
        self.constraints_emitted += 1
        return constraint

    def current_epoch_vars(self) -> dict[Hashable, int]:
        """Variable index of each requested page's current epoch."""
        return {p: self.var_index[(p, r)] for p, r in self.request_counts.items()}
