"""Gate-infidelity cost and its gradients.

The cost is C(theta) = 1 - |Tr(V^dag U(theta))|^2 / d^2, i.e. one minus the
normalized Hilbert-Schmidt overlap between the compiled circuit and the
target.  Three evaluation modes share this definition:

* "exact-trace"          direct trace of the dense circuit unitary;
* "hs-test-statevector"  the literal two-register overlap-test circuit;
* "hs-test-density"      the density-matrix route with a noise plan.

Parameters are angles with period 2*pi; every evaluation canonically wraps
its input first, so wrapping a vector never changes its cost, bit for bit.

Gradients exist for the noiseless modes only: a central finite difference
(2Q cost calls) and an adjoint-style sweep over the product of per-gate
matrices (one forward and one backward pass).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from .ansatz import (AnsatzCircuit, circuit_unitary, gate_matrices,
                     layer_unitary)
from .errors import DimMismatch, LengthMismatch, NoisyModeUnsupported
from .hamiltonian import wrap_angles
from .linalg import hs_overlap
from .simulator import (NoisyCircuitPlan, bell_prep_state,
                        hs_test_probability, readout_vector)
from .targets import TargetGate

MODES = ("exact-trace", "hs-test-statevector", "hs-test-density")

CENTRAL_DIFF_STEP = 1e-6


@dataclass
class CostEvaluator:
    """Cost C(theta) for one circuit/target pair in a fixed evaluation mode."""

    circuit: AnsatzCircuit
    target: TargetGate
    mode: str = "exact-trace"
    plan: NoisyCircuitPlan | None = None
    eval_count: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown cost mode {self.mode!r}")
        if self.target.n != self.circuit.n:
            raise DimMismatch("target and circuit act on different qubit counts")
        if self.mode == "hs-test-density":
            if self.plan is None:
                raise ValueError("hs-test-density mode needs a noise plan")
            if self.plan.circuit is not self.circuit:
                self.plan = NoisyCircuitPlan(self.circuit, self.plan.channel,
                                             self.plan.placement,
                                             self.plan.target_qubits)
            self._prepare_density_fastpath()
        self._v_dag = self.target.matrix.conj().T
        self._dim = 2 ** self.circuit.n

    def _prepare_density_fastpath(self):
        """Fixed pieces of the density route, in system-superoperator layout.

        The mirror register of the overlap test is untouched between
        preparation and readout, so the noisy circuit acts as a linear map
        on the system (row, col) index pair alone.  Reordering the Bell
        density matrix to (system pair, mirror pair) turns each layer into
        one 64x64 matrix product; the readout probability collapses to a
        fixed trace against the evolved map.  Tests pin this route to the
        literal density evolution in the simulator module.
        """
        n = self.circuit.n
        d = 2 ** n
        d2 = d * d

        def pair_layout(mat_d2: np.ndarray) -> np.ndarray:
            # (row index, col index) -> (system pair, mirror pair)
            return mat_d2.reshape(d, d, d, d).transpose(0, 2, 1, 3).reshape(d2, d2)

        u = bell_prep_state(n)
        self._rho0_pair = pair_layout(np.outer(u, u.conj()))
        w = readout_vector(self.target)
        x = pair_layout(np.outer(w.conj(), w))
        self._readout_pair = self._rho0_pair @ x.T
        # channel superoperator on the system pair index, bit order
        # (r_1..r_n, c_1..c_n)
        qubits = set(self.plan.target_qubits)
        eye4 = np.eye(4, dtype=complex)
        s_full = None
        for q in range(1, n + 1):
            s4 = self.plan.channel.superop4 if q in qubits else eye4
            s_full = s4 if s_full is None else np.kron(s_full, s4)
        # reorder bits from (r1 c1 r2 c2 ...) to (r1..rn c1..cn)
        old_positions = [2 * q for q in range(n)] + [2 * q + 1 for q in range(n)]
        nbits = 2 * n
        perm = np.empty(d2, dtype=int)
        for idx in range(d2):
            bits = [(idx >> (nbits - 1 - k)) & 1 for k in range(nbits)]
            old_idx = 0
            for k in range(nbits):
                old_idx |= bits[k] << (nbits - 1 - old_positions[k])
            perm[idx] = old_idx
        self._channel_pair = np.ascontiguousarray(s_full[np.ix_(perm, perm)])

    def _density_cost_fast(self, theta: np.ndarray) -> float:
        circuit = self.circuit
        ul = layer_unitary(circuit, theta)
        s_full = self._channel_pair
        placement = self.plan.placement
        if placement == "after-each-gate":
            k = None
            for g in gate_matrices(circuit, theta):
                step = s_full @ np.kron(g, g.conj())
                k = step if k is None else step @ k
        elif placement == "after-each-layer":
            k = s_full @ np.kron(ul, ul.conj())
        else:  # final-only
            k = np.kron(ul, ul.conj())
        total = np.linalg.matrix_power(k, circuit.m)
        if placement == "final-only":
            total = s_full @ total
        p = np.einsum("ij,ji->", self._readout_pair, total).real
        return 1.0 - float(min(max(p, 0.0), 1.0))

    @property
    def noisy(self) -> bool:
        return self.mode == "hs-test-density"

    def _check(self, theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.circuit.q,):
            raise LengthMismatch(
                f"expected {self.circuit.q} parameters, got shape {theta.shape}")
        return wrap_angles(theta)

    def cost(self, theta: np.ndarray) -> float:
        """Infidelity in [0, 1]; increments eval_count thread-safely."""
        theta = self._check(theta)
        with self._lock:
            self.eval_count += 1
        if self.mode == "exact-trace":
            u = circuit_unitary(self.circuit, theta)
            return 1.0 - hs_overlap(u, self.target.matrix)
        if self.mode == "hs-test-statevector":
            return 1.0 - hs_test_probability(self.circuit, theta, self.target)
        return self._density_cost_fast(theta)

    def fidelity(self, theta: np.ndarray) -> float:
        return 1.0 - self.cost(theta)

    def gradient(self, theta: np.ndarray, method: str = "adjoint") -> np.ndarray:
        """dC/dtheta for noiseless modes; raises NoisyModeUnsupported otherwise."""
        if self.noisy:
            raise NoisyModeUnsupported("gradients are defined for noiseless modes only")
        if method == "central-diff":
            return self._gradient_central(theta)
        if method == "adjoint":
            return self._gradient_adjoint(theta)
        raise ValueError(f"unknown gradient method {method!r}")

    def _gradient_central(self, theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        h = CENTRAL_DIFF_STEP
        grad = np.empty(self.circuit.q)
        for j in range(self.circuit.q):
            up = theta.copy()
            dn = theta.copy()
            up[j] += h
            dn[j] -= h
            grad[j] = (self.cost(up) - self.cost(dn)) / (2.0 * h)
        return grad

    def _gradient_adjoint(self, theta: np.ndarray) -> np.ndarray:
        """Analytic gradient from one forward and one backward product sweep.

        With T = Tr(V^dag U) and U a product of factors exp(-i theta_j P_j t0),
        each factor contributes Tr(B_k (-i t0 P_j) A_k) to dT/dtheta_j, where
        A_k is the product up to and including factor k and B_k the remaining
        left product including V^dag.  Then dC/dtheta_j =
        -(2/d^2) Re(conj(T) dT/dtheta_j).
        """
        theta = self._check(theta)
        circuit = self.circuit
        q = circuit.q
        gs = gate_matrices(circuit, theta)
        paulis = circuit.spec.matrices()
        n_gates = circuit.m * q
        d = self._dim
        # forward cumulative products A_k, flattened over layers
        fwd = np.empty((n_gates, d, d), dtype=complex)
        acc = None
        for k in range(n_gates):
            g = gs[k % q]
            acc = g.copy() if acc is None else g @ acc
            fwd[k] = acc
        t_val = np.trace(self._v_dag @ acc)
        # backward sweep accumulating dT/dtheta
        dt = np.zeros(q, dtype=complex)
        back = self._v_dag.copy()
        scale = -1j * circuit.t0
        for k in range(n_gates - 1, -1, -1):
            j = k % q
            prod = back @ paulis[j] @ fwd[k]
            dt[j] += scale * np.trace(prod)
            back = back @ gs[j]
        grad = -(2.0 / (d * d)) * (np.conj(t_val) * dt).real
        return grad

    def gradient_stats(self, samples: int, init, seed: int) -> "GradientStats":
        """Variance of each gradient coordinate over init-scheme draws.

        Draws `samples` parameter vectors from the init scheme with a
        dedicated RNG seeded by `seed`, evaluates the adjoint gradient at
        each, and reports per-coordinate mean and variance plus the pooled
        variance over all coordinates.
        """
        if samples < 1:
            raise ValueError("need at least one sample")
        rng = np.random.default_rng(np.random.SeedSequence([int(seed)]))
        grads = np.empty((samples, self.circuit.q))
        for s in range(samples):
            theta = init.sample(rng, self.circuit.q)
            grads[s] = self._gradient_adjoint(theta)
        return GradientStats(
            samples=samples,
            mean=grads.mean(axis=0),
            variance=grads.var(axis=0),
            overall_variance=float(grads.var()),
        )


@dataclass(frozen=True)
class GradientStats:
    """Per-coordinate gradient statistics over random initializations."""

    samples: int
    mean: np.ndarray
    variance: np.ndarray
    overall_variance: float
