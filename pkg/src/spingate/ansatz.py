"""Layered product-formula circuit generated by a parameterized chain Hamiltonian.

One layer applies, in canonical term order, the factor exp(-i theta_j P_j t0)
for every term of the Hamiltonian spec; the full circuit repeats that layer
m times with the same parameter vector (parameters are shared across layers,
so the circuit has Q knobs regardless of depth).  In rotation-gate language
each factor is R_alpha(2 theta_j t0) on one site or R_alpha,alpha(2 theta_j t0)
on an adjacent pair: the conventional half-angle in the exponent means the
applied rotation angle is twice theta_j t0.

The slice duration t0 is fixed to 1 throughout the package, which makes the
parameters dimensionless angles with period 2*pi.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimMismatch, InvalidDepth, LengthMismatch
from .hamiltonian import PAULI_1Q, HamiltonianSpec
from .linalg import apply_to_qubits, kron


@dataclass(frozen=True)
class GateOp:
    """One rotation factor of a layer.

    `angle_scale` converts the shared parameter to the applied rotation
    angle: angle = angle_scale * theta_j, with the matrix
    exp(-i * angle/2 * P) = exp(-i * theta_j * t0 * P).
    """

    axis: str
    qubits: tuple[int, ...]
    param_index: int
    angle_scale: float

    @property
    def kind(self) -> str:
        return "single-rotation" if len(self.qubits) == 1 else "two-rotation"

    def local_generator(self) -> np.ndarray:
        """The Pauli acting on just this gate's qubits (2x2 or 4x4)."""
        if len(self.qubits) == 1:
            return PAULI_1Q[self.axis]
        return kron(PAULI_1Q[self.axis], PAULI_1Q[self.axis])


@dataclass(frozen=True)
class AnsatzCircuit:
    """m identical layers of per-term rotations; all layers share one theta."""

    spec: HamiltonianSpec
    m: int
    t0: float
    layer: tuple[GateOp, ...]

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def q(self) -> int:
        return self.spec.q

    @property
    def gate_count(self) -> int:
        return self.m * len(self.layer)

    def two_qubit_gate_count(self) -> int:
        return self.m * sum(1 for g in self.layer if len(g.qubits) == 2)


def build_hva(spec: HamiltonianSpec, m: int, t0: float = 1.0) -> AnsatzCircuit:
    """Build the m-layer circuit for a Hamiltonian spec; m must be >= 1."""
    if not isinstance(m, (int, np.integer)) or isinstance(m, bool) or m < 1:
        raise InvalidDepth(f"layer count must be a positive integer, got {m!r}")
    gates = []
    for j, term in enumerate(spec.terms):
        qubits = tuple(i + 1 for i, c in enumerate(term.letters) if c != "I")
        axis = next(c for c in term.letters if c != "I")
        gates.append(GateOp(axis=axis, qubits=qubits, param_index=j,
                            angle_scale=2.0 * t0))
    return AnsatzCircuit(spec=spec, m=int(m), t0=float(t0), layer=tuple(gates))


def _check_theta(circuit: AnsatzCircuit, theta: np.ndarray) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (circuit.q,):
        raise LengthMismatch(f"expected {circuit.q} parameters, got shape {theta.shape}")
    return theta


def gate_matrices(circuit: AnsatzCircuit, theta: np.ndarray) -> np.ndarray:
    """Per-term full-register factor matrices for one layer, shape (Q, 2^n, 2^n).

    Each Pauli string squares to the identity, so the factor is
    cos(a) I - i sin(a) P with a = theta_j * t0.
    """
    theta = _check_theta(circuit, theta)
    a = theta * circuit.t0
    paulis = circuit.spec.matrices()
    d = 2 ** circuit.n
    eye = np.eye(d)
    return (np.cos(a)[:, None, None] * eye
            - 1j * np.sin(a)[:, None, None] * paulis)


def layer_unitary(circuit: AnsatzCircuit, theta: np.ndarray) -> np.ndarray:
    """Ordered product of one layer's factors (term 1 applied first)."""
    gs = gate_matrices(circuit, theta)
    u = gs[0]
    for g in gs[1:]:
        u = g @ u
    return u


def circuit_unitary(circuit: AnsatzCircuit, theta: np.ndarray) -> np.ndarray:
    """Dense unitary of the whole circuit: the layer unitary raised to m."""
    ul = layer_unitary(circuit, theta)
    u = ul
    for _ in range(circuit.m - 1):
        u = ul @ u
    return u


def apply_circuit(circuit: AnsatzCircuit, theta: np.ndarray, psi: np.ndarray,
                  first_qubit: int = 1) -> np.ndarray:
    """Apply the circuit gate by gate to a state on >= n qubits.

    The circuit occupies qubits first_qubit .. first_qubit+n-1 of the
    register.  With first_qubit = 1 this matches circuit_unitary (x) I on
    the trailing qubits.
    """
    theta = _check_theta(circuit, theta)
    psi = np.asarray(psi, dtype=complex)
    n_reg = int(np.log2(psi.size))
    if 2 ** n_reg != psi.size:
        raise DimMismatch(f"state size {psi.size} is not a power of 2")
    if first_qubit < 1 or first_qubit + circuit.n - 1 > n_reg:
        raise DimMismatch("circuit does not fit in the register at that offset")
    offset = first_qubit - 1
    a = theta * circuit.t0
    locals_ = []
    for g in circuit.layer:
        gen = g.local_generator()
        ang = a[g.param_index]
        mat = np.cos(ang) * np.eye(gen.shape[0]) - 1j * np.sin(ang) * gen
        locals_.append((mat, tuple(q + offset for q in g.qubits)))
    out = psi
    for _ in range(circuit.m):
        for mat, qubits in locals_:
            out = apply_to_qubits(out, mat, qubits, n_reg)
    return out
