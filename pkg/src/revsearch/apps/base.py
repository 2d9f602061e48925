from __future__ import annotations

from ..engine import SearchProblem
from ..node import PruneMode
from ..options import APP_OPTIONS


class InputError(ValueError):
    """The application could not build a problem from its input text."""


class Application(SearchProblem):
    """A SearchProblem that can be built from an input blob plus app options."""

    name = ""
    options = APP_OPTIONS
    noun = "nodes"

    def __init__(self, countonly: bool = False, prune: PruneMode = PruneMode.OFF):
        self.countonly = countonly
        self.prune = PruneMode(prune)

    @classmethod
    def from_input(cls, text: str, countonly: bool = False,
                   prune: PruneMode = PruneMode.OFF) -> "Application":
        raise NotImplementedError

    def summary(self, total: int) -> str:
        return f"number of {self.noun}={total}\n"
