from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class OptionSpec:
    name: str
    arity: int  # 0 = flag, 1 = takes one value


FRAMEWORK_OPTIONS = (
    OptionSpec("-maxd", 1),
    OptionSpec("-maxnodes", 1),
    OptionSpec("-scale", 1),
    OptionSpec("-lmin", 1),
    OptionSpec("-lmax", 1),
    OptionSpec("-maxbuf", 1),
    OptionSpec("-freq", 1),
    OptionSpec("-hist", 1),
    OptionSpec("-checkp", 1),
    OptionSpec("-stop", 1),
    OptionSpec("-restart", 1),
)

APP_OPTIONS = (
    OptionSpec("-countonly", 0),
    OptionSpec("-prune", 1),
)


class OptionCollision(ValueError):
    pass


def check_unique(*tables) -> None:
    seen = set()
    for table in tables:
        for spec in table:
            if spec.name in seen:
                raise OptionCollision(f"option {spec.name} defined twice")
            seen.add(spec.name)
