"""Ready-made model files for the standard examples.

Each builder returns decoded JSON; :func:`gallery_model` turns it into a
parsed :class:`~posconv.io.Model`.
"""

import numpy as np

from .exceptions import UnknownGallery
from .groups import DYADICS, koopman_counterexample
from .io import model_from_dict, rep_to_dict, to_jsonable


def _cells(n, prefix="x"):
    return [f"{prefix}{i}" for i in range(n)]


def irreducible_ctmc(n=8):
    """Conservative jump process with all rates positive:
    ``r_ji = 0.1 (1 + (3i + 5j) mod 7)``."""
    i, j = np.meshgrid(np.arange(n), np.arange(n))
    B = 0.1 * (1 + (3 * i + 5 * j) % 7)
    np.fill_diagonal(B, 0.0)
    return {
        "name": "irreducible-ctmc",
        "space": {"atoms": _cells(n, "s"), "weights": [1.0] * n, "p": 1},
        "representation": {"kind": "continuous", "jump": B.tolist(), "flow": None,
                           "killing": None},
        "index_class": {"type": "reals"},
        "options": {"horizon": 64},
    }


def dyadic_counterexample():
    """Translations of Z/3Z indexed by the dyadic rationals."""
    rep = koopman_counterexample(DYADICS, 3)
    out = {"name": "dyadic-counterexample", **to_jsonable(rep_to_dict(rep))}
    out["options"] = {"horizon": 64}
    return out


def _flow_jump(p, weights):
    n = 4
    return {
        "space": {"atoms": _cells(n), "weights": weights, "p": p},
        "representation": {
            "kind": "continuous",
            # uniform redistribution at total rate 1, self-jumps included
            "jump": np.full((n, n), 1.0 / n).tolist(),
            "flow": {"rate": 1.0, "map": [1, 2, 3, 0]},
            "killing": None,
        },
        "index_class": {"type": "reals"},
        "options": {"horizon": 64},
    }


def jump_flow():
    """Rotation of a four-cell circle plus uniform jumps, both at rate 1."""
    return {"name": "jump-flow", **_flow_jump(1, [0.25] * 4)}


def am_space_dual():
    """The jump-flow dynamics on sup-normed sequences."""
    return {"name": "am-space-dual", **_flow_jump("inf", [1.0] * 4)}


def gaussian(window=(-5.0, 5.0), n=200):
    """Heat flow on a window, absorbed at the edges."""
    return {
        "name": "gaussian",
        "space": {"grid": {"window": list(window), "n": n}, "p": 1},
        "representation": {"kind": "continuous", "jump": {"builtin": "dirichlet-heat"}},
        "index_class": {"type": "reals"},
        "options": {"horizon": 64, "dt": 1.0},
    }


def atom():
    """A point mass next to a rotating four-cell circle: cells jump to the
    atom at rate 1 and the atom releases into the first cell at rate 1."""
    n = 5
    B = np.zeros((n, n))
    B[0, 1:] = 1.0
    B[1, 0] = 1.0
    return {
        "name": "atom",
        "space": {"atoms": ["atom"] + _cells(4, "c"), "weights": [1.0] + [0.25] * 4, "p": 1},
        "representation": {"kind": "continuous", "jump": B.tolist(),
                           "flow": {"rate": 1.0, "map": [0, 2, 3, 4, 1]}, "killing": None},
        "index_class": {"type": "reals"},
        "options": {"horizon": 64, "atom": 0},
    }


GALLERY = {
    "irreducible-ctmc": irreducible_ctmc,
    "dyadic-counterexample": dyadic_counterexample,
    "jump-flow": jump_flow,
    "gaussian": gaussian,
    "am-space-dual": am_space_dual,
    "atom": atom,
}


def gallery_names():
    return list(GALLERY)


def gallery_dict(name):
    try:
        builder = GALLERY[name]
    except KeyError:
        raise UnknownGallery(f"no gallery model named {name!r}; choose from "
                             f"{', '.join(GALLERY)}") from None
    return builder()


def gallery_model(name):
    return model_from_dict(gallery_dict(name))


__all__ = ["GALLERY", "gallery_names", "gallery_dict", "gallery_model"]
