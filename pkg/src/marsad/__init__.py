"""MARSAD: social-media monitoring and analytics engine.

Ingests archived post datasets, runs queued analyses (subtopics, word
cloud, sentiment, propaganda, trends, spatial, network, post analysis),
persists structured results and serves them over an HTTP API with a
relabeling feedback loop.
"""

__version__ = "0.1.0"
