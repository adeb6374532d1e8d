from .retrieval import RepoClipFactory
from .style import ContentLabelFactory, ShotStyleFactory

__all__ = ["ContentLabelFactory", "RepoClipFactory", "ShotStyleFactory"]
