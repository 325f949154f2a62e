"""Drug repositioning toolkit.

Embedding and prediction models over heterogeneous biological networks
and a biomedical knowledge graph, a persistent model registry, an HTTP
prediction service with explanation endpoints, and a CLI.
"""

__version__ = "0.1.0"
