"""
Museum indexing, ranking, clustering, persistence, and query execution.
"""

from .clustering import KMeansResult, kmeans, kmeans_cluster, two_stage_cluster
from .index import FORMAT_VERSION, GalleryEntry, MuseumIndex, build_index
from .query import QueryOutcome, query, query_paths
from .ranking import CropDescriptors, DescriptorWeights, Scored, combine_rankings, rank_by_descriptor
from .ranking import rank_by_features, rank_by_text
from .storage import load_index, save_index
