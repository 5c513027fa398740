"""Reference spectra used by the test-suite and the narrative scripts."""
from __future__ import annotations

from .geometry import CubeUnion, validate_union

DEMO_CONFIGS: dict[str, dict] = {
    "d1p2": {"dim": 1, "beta": 1.0, "corners": [[0.0], [2.5]]},
    "d1p3": {"dim": 1, "beta": 1.0, "corners": [[0.0], [1.6], [3.25]]},
    "d2p2": {"dim": 2, "beta": 1.0, "corners": [[0.0, 0.0], [1.5, 0.4]]},
    "d2p3": {"dim": 2, "beta": 1.0, "corners": [[0.0, 0.0], [1.3, 0.6], [-0.4, 2.2]]},
    "d3p2": {"dim": 3, "beta": 1.0, "corners": [[0.0, 0.0, 0.0], [1.25, 0.5, 0.3]]},
}


def demo_union(name: str) -> CubeUnion:
    cfg = DEMO_CONFIGS[name]
    return validate_union(cfg["dim"], cfg["beta"], cfg["corners"])
