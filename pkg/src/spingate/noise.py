"""Coherent (quasi-static) parameter noise and robustness sweeps.

Two physical noise kinds map onto disjoint coordinate sets of the
compiled parameter vector:

* "charge"  shifts every exchange-coupling coefficient (the weight-2
  terms), modelling electrostatic detuning of the inter-site barriers;
* "nuclear" shifts the single-site Z-field coefficients, modelling a
  slowly varying magnetic background.

A perturbation either adds the amplitude delta outright
("deterministic-shift") or adds one shared draw u ~ Uniform[0, delta]
per realization ("uniform-sample").  Perturbed vectors are returned
unwrapped: the cost is 2*pi-periodic anyway, and the unwrapped values
keep their physical reading as coefficient shifts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cost import CostEvaluator
from .errors import NegativeAmplitude
from .hamiltonian import HamiltonianSpec
from .seeding import derive_rng, derive_subseed

NOISE_KINDS = ("charge", "nuclear")
NOISE_MODES = ("deterministic-shift", "uniform-sample")

DEFAULT_DELTA_GRID = np.round(np.arange(0, 21) * 0.025, 6)


@dataclass(frozen=True)
class CoherentNoise:
    """One noise setting: which coordinates, how strong, drawn how."""

    kind: str
    delta: float
    mode: str = "deterministic-shift"
    samples: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.mode not in NOISE_MODES:
            raise ValueError(f"unknown noise mode {self.mode!r}")
        if not np.isfinite(self.delta) or self.delta < 0.0:
            raise NegativeAmplitude(f"noise amplitude must be >= 0, got {self.delta!r}")
        if self.samples < 1:
            raise ValueError("samples must be positive")

    def affected_indices(self, spec: HamiltonianSpec) -> list[int]:
        if self.kind == "charge":
            return spec.coupling_indices()
        return spec.local_indices("Z")


def perturb(theta: np.ndarray, noise: CoherentNoise, spec: HamiltonianSpec,
            realization: int = 0) -> np.ndarray:
    """Shifted copy of theta; unaffected coordinates are bit-identical.

    Deterministic mode adds noise.delta; sampled mode adds one shared
    u ~ Uniform[0, delta] drawn from (noise.seed, realization).
    """
    theta = np.asarray(theta, dtype=float)
    out = theta.copy()
    if noise.delta == 0.0:
        return out
    if noise.mode == "deterministic-shift":
        shift = noise.delta
    else:
        rng = derive_rng(noise.seed, realization)
        shift = rng.uniform(0.0, noise.delta)
    idx = noise.affected_indices(spec)
    out[idx] += shift
    return out


def robustness_sweep(evaluator: CostEvaluator, theta_star: np.ndarray,
                     kind: str, delta_grid, mode: str = "deterministic-shift",
                     samples: int = 200, seed: int = 0) -> list[dict]:
    """Fidelity of the compiled gate as the noise amplitude grows.

    Returns one row per grid point: {delta, mean_fidelity, std_fidelity,
    samples}.  Deterministic mode needs a single evaluation per point;
    sampled mode averages `samples` realizations with per-point derived
    seeds.  The grid must be non-negative and strictly ascending.
    """
    grid = np.asarray(delta_grid, dtype=float)
    if grid.size == 0 or np.any(grid < 0.0) or np.any(np.diff(grid) <= 0.0):
        raise ValueError("delta grid must be non-negative and strictly ascending")
    spec = evaluator.circuit.spec
    rows = []
    for gi, delta in enumerate(grid):
        noise = CoherentNoise(kind=kind, delta=float(delta), mode=mode,
                              samples=samples, seed=derive_subseed(seed, gi))
        if mode == "deterministic-shift" or delta == 0.0:
            f = 1.0 - evaluator.cost(perturb(theta_star, noise, spec))
            rows.append({"delta": float(delta), "mean_fidelity": f,
                         "std_fidelity": 0.0, "samples": 1})
        else:
            fids = np.empty(samples)
            for r in range(samples):
                fids[r] = 1.0 - evaluator.cost(perturb(theta_star, noise, spec, r))
            rows.append({"delta": float(delta),
                         "mean_fidelity": float(fids.mean()),
                         "std_fidelity": float(fids.std()),
                         "samples": samples})
    return rows
