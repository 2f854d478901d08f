"""Bundled analysis inputs.

Each preset is a complete input document for the analyze pipeline: a root
system datum plus a moment polytope given by vertices or by inequalities.
"""

import copy
from typing import Dict, List, Tuple

from .errors import UnknownCatalogName

PRESETS: Dict[str, Dict] = {
    "so4-case1": {
        "description": "SO(4) frame, quadrilateral polytope; the minimizer "
                       "sits on a chamber wall.",
        "input": {
            "root_system": {"catalog": "A1xA1"},
            "polytope": {"vertices": [[0, 0], [3, 3], [3, 0],
                                      ["3/2", "-3/2"]]},
        },
    },
    "so4-case2": {
        "description": "SO(4) frame, pentagon polytope; the minimizer sits "
                       "on a chamber wall.",
        "input": {
            "root_system": {"catalog": "A1xA1"},
            "polytope": {"vertices": [[0, 0], [3, 3], [3, 1], [2, -1],
                                      ["3/2", "-3/2"]]},
        },
    },
    "so4-case1-ineqlist": {
        "description": "SO(4) frame, quadrilateral given by inequalities; "
                       "h is not coercive (divergent minimizer).",
        "input": {
            "root_system": {"catalog": "A1xA1"},
            "polytope": {"inequalities": [
                {"normal": [-1, -1], "offset": 0},
                {"normal": [-1, 1], "offset": 0},
                {"normal": [1, 0], "offset": 2},
                {"normal": [0, -1], "offset": 2},
                {"normal": [1, -1], "offset": 3},
            ]},
        },
    },
    "so4-case2-ineqlist": {
        "description": "SO(4) frame, inequality list with one redundant "
                       "constraint; h is not coercive (divergent minimizer).",
        "input": {
            "root_system": {"catalog": "A1xA1"},
            "polytope": {"inequalities": [
                {"normal": [-1, -1], "offset": 0},
                {"normal": [-1, 1], "offset": 0},
                {"normal": [1, 0], "offset": 2},
                {"normal": [0, -1], "offset": 2},
                {"normal": [1, -1], "offset": 3},
                {"normal": [2, -1], "offset": 5},
            ]},
        },
    },
    "sl2": {
        "description": "SL(2) frame, segment [0, 3]; Kähler-Einstein case "
                       "with a wall multiplier at the origin.",
        "input": {
            "root_system": {"catalog": "A1"},
            "polytope": {"vertices": [[0], [3]]},
        },
    },
    "sl2-balanced": {
        "description": "SL(2) frame, segment [0, 8/3]; the barycenter lands "
                       "exactly on 2rho (semistable boundary).",
        "input": {
            "root_system": {"catalog": "A1"},
            "polytope": {"vertices": [[0], ["8/3"]]},
        },
    },
}


def list_presets() -> List[Tuple[str, str]]:
    return [(name, PRESETS[name]["description"]) for name in sorted(PRESETS)]


def get_preset(name: str) -> Dict:
    if name not in PRESETS:
        known = ", ".join(sorted(PRESETS))
        raise UnknownCatalogName(f"unknown preset {name!r}; available: {known}")
    return copy.deepcopy(PRESETS[name]["input"])
