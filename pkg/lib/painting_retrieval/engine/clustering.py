"""
Two-stage K-means grouping of the museum: first into brightness sets, then by texture within each set.

:author: Doug Skrypa
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING, NamedTuple, Sequence

import numpy as np

from ..descriptors.base import DescriptorKind
from ..exceptions import FewerImagesThanClusters, InvalidArgument

if TYPE_CHECKING:
    from .index import MuseumIndex

__all__ = ['KMeansResult', 'kmeans', 'two_stage_cluster', 'kmeans_cluster']
log = logging.getLogger(__name__)


class KMeansResult(NamedTuple):
    #: The cluster index of each row
    assignments: np.ndarray
    centroids: np.ndarray
    #: The within-cluster sum of squares after each iteration
    inertia: tuple[float, ...]
    iterations: int


def _squared_distances(data: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    return ((data[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)


def _init_centroids(data: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding"""
    chosen = [int(rng.integers(len(data)))]
    closest = _squared_distances(data, data[chosen]).min(axis=1)
    while len(chosen) < k:
        total = closest.sum()
        if total <= 0:
            # Every remaining point coincides with a chosen centroid
            index = int(rng.integers(len(data)))
        else:
            index = int(rng.choice(len(data), p=closest / total))
        chosen.append(index)
        closest = np.minimum(closest, _squared_distances(data, data[[index]])[:, 0])
    return data[chosen].copy()


def kmeans(data: np.ndarray, k: int, seed: int = 0, max_iter: int = 100) -> KMeansResult:
    """
    Lloyd's algorithm with k-means++ seeding and Euclidean distance.  Points are assigned to the nearest centroid
    (ties go to the lowest cluster index); a cluster that loses every point keeps its previous centroid.  Iteration
    stops when the assignments no longer change, or after ``max_iter`` iterations.

    :param data: Array with shape ``(n, features)`` (1D input is treated as one feature)
    :param k: The number of clusters
    :param seed: Seed for the centroid initialization
    :param max_iter: The iteration limit
    """
    data = np.asarray(data, dtype=np.float64)
    if data.ndim == 1:
        data = data[:, None]
    if k < 1:
        raise InvalidArgument(f'Invalid {k=} - expected an integer >= 1')
    if len(data) < k:
        raise FewerImagesThanClusters(len(data), k)

    rng = np.random.default_rng(seed)
    centroids = _init_centroids(data, k, rng)
    assignments = np.full(len(data), -1, dtype=np.int64)
    inertia = []
    iterations = 0
    for iterations in range(1, max_iter + 1):
        distances = _squared_distances(data, centroids)
        updated = distances.argmin(axis=1)
        inertia.append(float(distances[np.arange(len(data)), updated].sum()))
        if np.array_equal(updated, assignments):
            break
        assignments = updated
        for cluster in range(k):
            if (members := assignments == cluster).any():
                centroids[cluster] = data[members].mean(axis=0)

    return KMeansResult(assignments, centroids, tuple(inertia), iterations)


def two_stage_cluster(
    labels: Sequence[int],
    brightness: Sequence[float],
    textures: np.ndarray,
    k_bright: int = 2,
    k_texture: int = 5,
    seed: int = 0,
    max_iter: int = 100,
) -> dict[int, int]:
    """
    Split the paintings into ``k_bright`` sets by mean brightness, then split each set into up to ``k_texture``
    clusters by texture descriptor.

    Sets are numbered from darkest to brightest, and the texture clusters within each set are numbered by ascending
    centroid norm.  A set with fewer than ``k_texture`` paintings is split into as many clusters as it has paintings.

    :param labels: The label of each painting
    :param brightness: The mean gray level of each painting
    :param textures: Texture descriptors with shape ``(n, features)``
    :param k_bright: The number of brightness sets
    :param k_texture: The number of texture clusters per set
    :param seed: Seed for every K-means run
    :param max_iter: The iteration limit for every K-means run
    :return: Mapping of label to cluster id (``set * k_texture + texture cluster``)
    """
    labels = list(labels)
    if len(labels) < k_bright * k_texture:
        raise FewerImagesThanClusters(len(labels), k_bright * k_texture)
    textures = np.asarray(textures, dtype=np.float64)
    bright = kmeans(np.asarray(brightness, dtype=np.float64), k_bright, seed, max_iter)
    set_order = np.argsort(bright.centroids[:, 0], kind='stable')

    clusters = {}
    for set_index, set_id in enumerate(set_order):
        members = np.nonzero(bright.assignments == set_id)[0]
        if not len(members):
            continue
        k = min(k_texture, len(members))
        texture = kmeans(textures[members], k, seed, max_iter)
        cluster_order = np.argsort(np.linalg.norm(texture.centroids, axis=1), kind='stable')
        rank = np.empty(k, dtype=np.int64)
        rank[cluster_order] = np.arange(k)
        for member, assignment in zip(members, texture.assignments):
            clusters[labels[member]] = int(set_index * k_texture + rank[assignment])

    log.debug(f'Clustered {len(labels)} paintings into {len(set(clusters.values()))} groups')
    return clusters


def kmeans_cluster(
    index: MuseumIndex, k_bright: int = 2, k_texture: int = 5, seed: int = 0, max_iter: int = 100
) -> dict[int, int]:
    """Cluster the museum by entry brightness, then by HOG descriptor."""
    entries = index.entries
    return two_stage_cluster(
        [entry.label for entry in entries],
        [entry.brightness for entry in entries],
        index.matrix(DescriptorKind.HOG) if entries else np.zeros((0, 1)),
        k_bright,
        k_texture,
        seed,
        max_iter,
    )
