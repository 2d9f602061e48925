from .base import Application, InputError
from .spantree import SpanningTrees, UGraph, parse_graph
from .topsort import Poset, TopSorts, parse_poset

APPS = {cls.name: cls for cls in (TopSorts, SpanningTrees)}

__all__ = [
    "APPS", "Application", "InputError", "Poset", "SpanningTrees", "TopSorts",
    "UGraph", "parse_graph", "parse_poset",
]
