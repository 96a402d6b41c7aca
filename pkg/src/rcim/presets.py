"""Named simulation presets.

The ``*-table1`` presets reproduce the published simulation parameters row
by row (largest size, disorder-sample count, equilibration exponent, ladder
bounds and rung count per disorder strength). The ``*-desk`` presets are the
scaled-down campaigns the acceptance suite runs on a workstation: same
physics, smaller L / tau / disorder counts.
"""

from __future__ import annotations

import copy

# (p, L_max, N_eps, tau, N_T, T_min, T_max) per disorder strength.
TABLE1 = {
    "four_body_vertex": [
        (0.000, 16, 500, 20, 55, 2.40, 12.80),
        (0.050, 16, 500, 20, 42, 2.30, 11.40),
        (0.100, 16, 500, 20, 41, 2.20, 10.15),
        (0.150, 16, 500, 20, 42, 2.10, 8.42),
        (0.200, 16, 500, 20, 41, 2.00, 6.80),
        (0.250, 16, 500, 20, 42, 1.90, 4.97),
        (0.265, 16, 500, 20, 34, 1.80, 3.53),
        (0.270, 16, 500, 20, 34, 1.60, 3.32),
        (0.272, 12, 500, 20, 34, 1.60, 3.30),
        (0.274, 12, 500, 20, 34, 1.53, 3.21),
        (0.276, 12, 500, 20, 34, 1.53, 3.21),
        (0.280, 12, 500, 20, 34, 1.33, 3.18),
    ],
    "six_body_edge": [
        (0.000, 12, 250, 20, 47, 0.20, 1.28),
        (0.003, 12, 250, 20, 44, 0.20, 1.25),
        (0.006, 12, 250, 20, 42, 0.20, 1.22),
        (0.009, 12, 250, 20, 39, 0.20, 1.17),
        (0.012, 12, 250, 20, 38, 0.20, 1.14),
        (0.015, 10, 250, 21, 48, 0.10, 1.35),
        (0.016, 10, 250, 21, 48, 0.10, 1.35),
        (0.017, 10, 250, 21, 48, 0.10, 1.35),
        (0.018, 10, 250, 21, 48, 0.10, 1.35),
        (0.019, 10, 250, 21, 48, 0.10, 1.35),
        (0.020, 10, 250, 21, 48, 0.10, 1.35),
        (0.021, 10, 250, 21, 48, 0.10, 1.35),
    ],
    "rpim": [
        (0.000, 24, 500, 19, 51, 0.40, 2.08),
        (0.006, 24, 500, 19, 43, 0.40, 1.95),
        (0.012, 24, 500, 19, 41, 0.40, 1.77),
        (0.018, 24, 500, 19, 43, 0.35, 1.64),
        (0.024, 24, 500, 19, 42, 0.30, 1.49),
        (0.027, 24, 250, 19, 43, 0.20, 1.28),
        (0.028, 24, 250, 19, 43, 0.20, 1.28),
        (0.029, 24, 250, 19, 43, 0.20, 1.28),
        (0.030, 24, 250, 19, 43, 0.20, 1.28),
        (0.031, 24, 250, 19, 43, 0.20, 1.28),
        (0.032, 24, 250, 19, 43, 0.20, 1.28),
        (0.023, 24, 250, 19, 43, 0.20, 1.28),  # as published (out of order in the source table)
        (0.034, 24, 250, 19, 43, 0.20, 1.28),
        (0.035, 24, 250, 19, 43, 0.20, 1.28),
    ],
}


def ladder_row(kind: str, p: float):
    """The published (T_min, T_max, N_T) for the row closest in p."""
    rows = TABLE1[kind]
    row = min(rows, key=lambda r: abs(r[0] - p))
    return {"t_min": row[5], "t_max": row[6], "n_t": row[4]}


def _full_scale(kind: str) -> dict:
    rows = TABLE1[kind]
    sizes = {r[1] for r in rows}
    return {
        "schema": 1,
        "model": kind,
        "L": sorted({4, 6, 8, max(sizes)} | {s for s in sizes}),
        "p": [r[0] for r in rows],
        "ladder": {"mode": "geometric"},  # bounds resolved per p from the table
        "tau": max(r[3] for r in rows),
        "n_disorder": max(r[2] for r in rows),
        "stride": 1,
        "seed": 20180810,
        "workers": 1,
        "start": "random",
    }


PRESETS: dict[str, dict] = {
    # paper-scale campaigns (cluster-sized; ship so the published numbers are
    # one config away)
    "fourbody-table1": _full_scale("four_body_vertex"),
    "sixbody-table1": _full_scale("six_body_edge"),
    "rpim-table1": _full_scale("rpim"),
    # desk-scale campaigns used by the acceptance suite
    "fourbody-p0-desk": {
        "schema": 1,
        "model": "four_body_vertex",
        "L": [4, 6, 8, 10, 12],
        "p": [0.0],
        "ladder": {"mode": "geometric", "t_min": 2.40, "t_max": 12.80, "n_t": 56},
        "tau": 13,
        "n_disorder": 1,
        "stride": 1,
        "seed": 9001,
        "workers": 1,
        "start": "up",
    },
    "sixbody-p0-desk": {
        "schema": 1,
        "model": "six_body_edge",
        "L": [4, 6, 8, 10],
        "p": [0.0],
        "ladder": {"mode": "geometric", "t_min": 0.20, "t_max": 1.28, "n_t": 48},
        "tau": 13,
        "n_disorder": 1,
        "stride": 2,
        "seed": 9002,
        "workers": 1,
        "start": "up",
    },
    "rpim-p0-desk": {
        "schema": 1,
        "model": "rpim",
        "L": [4, 6, 8, 10, 12],
        "p": [0.0],
        "ladder": {"mode": "geometric", "t_min": 0.40, "t_max": 2.08, "n_t": 48},
        "tau": 12,
        "n_disorder": 1,
        "stride": 2,
        "seed": 9003,
        "workers": 1,
        "start": "up",
    },
    "fourbody-p020-desk": {
        "schema": 1,
        "model": "four_body_vertex",
        "L": [4, 6, 8],
        "p": [0.20],
        "ladder": {"mode": "geometric", "t_min": 2.00, "t_max": 6.80, "n_t": 30},
        "tau": 12,
        "n_disorder": 8,
        "stride": 1,
        "seed": 9004,
        "workers": 2,
        "start": "random",
    },
    "sixbody-p012-desk": {
        "schema": 1,
        "model": "six_body_edge",
        "L": [8],
        "p": [0.012],
        "ladder": {"mode": "geometric", "t_min": 0.20, "t_max": 1.14, "n_t": 28},
        "tau": 13,
        "n_disorder": 6,
        "stride": 4,
        "seed": 9005,
        "workers": 2,
        "start": "random",
    },
    "rpim-tscan-desk": {
        "schema": 1,
        "model": "rpim",
        "L": [8],
        "p": [0.024, 0.028, 0.032, 0.036, 0.040],
        "ladder": {"mode": "geometric", "t_min": 0.45, "t_max": 1.35, "n_t": 24},
        "tau": 12,
        "n_disorder": 12,
        "stride": 2,
        "seed": 9006,
        "workers": 2,
        "start": "random",
    },
}


def get_preset(name: str) -> dict:
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}")
    return copy.deepcopy(PRESETS[name])
