from collections import defaultdict
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from ..constants import EXHAUSTIVE_MATCH_LIMIT
from .descriptors import DescriptorSet, hamming_matrix

LSH_KEY_BYTES = 4
NO_DISTANCE = np.iinfo(np.int32).max


@dataclass(frozen=True)
class MatchSet:
    """One-to-one (index_a, index_b, hamming distance) correspondences."""

    pairs: List[Tuple[int, int, int]] = field(default_factory=list)

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    @property
    def indices_a(self):
        return [a for a, _, _ in self.pairs]

    @property
    def indices_b(self):
        return [b for _, b, _ in self.pairs]


def _bits(descriptors):
    if isinstance(descriptors, DescriptorSet):
        return descriptors.bits
    return np.asarray(descriptors, dtype=np.uint8).reshape(-1, 32)


def _two_nearest_exhaustive(a, b):
    distances = hamming_matrix(a, b)
    if distances.shape[1] == 1:
        best = np.zeros(len(a), dtype=np.int64)
        return best, distances[:, 0], np.full(len(a), NO_DISTANCE)
    part = np.argpartition(distances, 1, axis=1)[:, :2]
    rows = np.arange(len(a))[:, None]
    pair = distances[rows, part]
    swap = pair[:, 1] < pair[:, 0]
    # keep the lowest index among equally near neighbours
    tie = (pair[:, 1] == pair[:, 0]) & (part[:, 1] < part[:, 0])
    flip = swap | tie
    part[flip] = part[flip][:, ::-1]
    pair[flip] = pair[flip][:, ::-1]
    return part[:, 0], pair[:, 0], pair[:, 1]


def _lsh_tables(b):
    tables = []
    for offset in range(0, b.shape[1], LSH_KEY_BYTES):
        buckets = defaultdict(list)
        keys = b[:, offset : offset + LSH_KEY_BYTES]
        for index, key in enumerate(keys):
            buckets[key.tobytes()].append(index)
        tables.append(buckets)
    return tables


def _two_nearest_lsh(a, b):
    """
    Approximate two nearest neighbours by bucketing on 32-bit substrings.

    Only descriptors sharing at least one substring with the query are
    compared exactly; queries with no candidates get no neighbour.
    """
    tables = _lsh_tables(b)
    best = np.full(len(a), -1, dtype=np.int64)
    first = np.full(len(a), NO_DISTANCE, dtype=np.int64)
    second = np.full(len(a), NO_DISTANCE, dtype=np.int64)
    for i, query in enumerate(a):
        candidates = set()
        for t, offset in enumerate(range(0, a.shape[1], LSH_KEY_BYTES)):
            key = query[offset : offset + LSH_KEY_BYTES].tobytes()
            candidates.update(tables[t].get(key, ()))
        if not candidates:
            continue
        candidates = np.array(sorted(candidates))
        distances = hamming_matrix(query[None], b[candidates])[0]
        order = np.argsort(distances, kind="stable")
        best[i] = candidates[order[0]]
        first[i] = distances[order[0]]
        if len(order) > 1:
            second[i] = distances[order[1]]
    return best, first, second


def _two_nearest(a, b):
    if max(len(a), len(b)) < EXHAUSTIVE_MATCH_LIMIT:
        return _two_nearest_exhaustive(a, b)
    return _two_nearest_lsh(a, b)


def match(a, b, ratio=0.8):
    """
    Ratio-test matching with a mutual cross-check.

    A pair (i, j) is kept when j is the nearest b-descriptor to a[i] with
    distance below `ratio` times the second-nearest distance, and i is in
    turn the nearest a-descriptor to b[j].
    """
    if not 0 < ratio < 1:
        raise ValueError(f"Ratio must lie in (0, 1), got {ratio}")
    a_bits, b_bits = _bits(a), _bits(b)
    if len(a_bits) == 0 or len(b_bits) == 0:
        return MatchSet([])

    forward, first, second = _two_nearest(a_bits, b_bits)
    backward, _, _ = _two_nearest(b_bits, a_bits)

    pairs = []
    for i in range(len(a_bits)):
        j = int(forward[i])
        if j < 0:
            continue
        if second[i] != NO_DISTANCE and not first[i] < ratio * second[i]:
            continue
        if backward[j] != i:
            continue
        pairs.append((i, j, int(first[i])))
    return MatchSet(pairs)
