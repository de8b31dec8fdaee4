"""Truncated Floquet operators, their eigen-decomposition, and dynamics.

The one-period operator of a rank-N kicked system decomposes as
V = U + sum_k R_k with R_k = (e^{i lambda_k/hbar} - 1) |psi_k><psi_k| U and
U the diagonal unperturbed evolution.  Each R_k has a single nonzero singular
value |e^{i lambda_k/hbar} - 1| = sqrt(2(1 - cos lambda_k/hbar)), so the
perturbation is trace class with an explicitly checkable norm.

Two conventions are kept behind a flag: ``additive_r_k`` is the sum form
above; ``exponential_product`` multiplies the kick factor with the opposite
sign of lambda, so V_additive(lambda) = V_product(-lambda) entrywise.  The
sign ambiguity between the two is inherent to the kicked-evolution
literature; the additive form is the default because the trace-class
computation is stated in it.

Everything is dense and desk-scale: dim <= 4096.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
import scipy.linalg

from .errors import (
    EnsembleError,
    ProvenanceError,
    ResourceLimitError,
    ToleranceError,
    TrivialPerturbationError,
)
from .spectral import (
    BaseSpectrum,
    KickEnsemble,
    KickState,
    ThetaSequence,
    alpha_sequence,
    theta_sequence,
)

__all__ = [
    "MAX_DIM",
    "FloquetMatrix",
    "EigenDecomposition",
    "DynamicsTrace",
    "build_floquet",
    "truncate_state",
    "perturbation_trace_norm",
    "eigen_decompose",
    "evolve",
    "wiener_average",
]

MAX_DIM = 4096
UNITARITY_TOL = 1e-10
Convention = Literal["additive_r_k", "exponential_product"]


@dataclass(frozen=True)
class FloquetMatrix:
    """Dense truncated Floquet operator with its construction provenance."""

    dim: int
    entries: np.ndarray
    convention: Convention
    spectrum: BaseSpectrum
    ensemble: KickEnsemble
    theta: ThetaSequence
    unitarity_defect: float

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=np.complex128)
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)


def truncate_state(state: KickState, dim: int) -> KickState:
    """Fit a kick state to ``dim`` coefficients: cut or zero-pad, renormalise.

    The weight lost to a cut is added to the state's recorded tail so the
    truncation error stays visible.
    """
    if state.dim == dim:
        return state
    if state.dim < dim:
        coeffs = np.zeros(dim, dtype=np.complex128)
        coeffs[: state.dim] = state.coefficients
        return KickState(coefficients=coeffs, gamma=state.gamma,
                         support=state.support, lost_tail=state.lost_tail)
    coeffs = np.array(state.coefficients[:dim])
    kept = float(np.sum(np.abs(coeffs) ** 2))
    if kept <= 0.0:
        raise EnsembleError("truncation removed all of the state's weight")
    coeffs /= math.sqrt(kept)
    dropped = float(np.sum(np.abs(state.coefficients[dim:]) ** 2))
    support = tuple(i for i in state.support if i < dim)
    return KickState(coefficients=coeffs, gamma=state.gamma, support=support,
                     lost_tail=state.lost_tail + dropped)


def perturbation_trace_norm(lambda_over_hbar: float) -> float:
    """sqrt(2(1 - cos lambda/hbar)) = |e^{i lambda/hbar} - 1|.

    The single nonzero singular value of R_k, hence its trace norm.
    """
    return math.sqrt(max(0.0, 2.0 * (1.0 - math.cos(lambda_over_hbar))))


def build_floquet(spec: BaseSpectrum, ensemble: KickEnsemble, dim: int,
                  convention: Convention = "additive_r_k") -> FloquetMatrix:
    """Assemble the dim-truncated Floquet operator V for the given kicks.

    U = diag(e^{i theta_n}) carries the unperturbed eigenphases; the kick
    factor is I + sum_k (e^{+-i lambda_k/hbar} - 1) P_k applied from the
    left, with + for the additive convention and - for the product form.
    Ensemble states are truncated and renormalised to ``dim`` first; the
    ensemble must stay orthonormal after that cut.
    """
    if dim < 2:
        raise ValueError("dim must be at least 2")
    if dim > MAX_DIM:
        raise ResourceLimitError(f"dim = {dim} exceeds the dense limit {MAX_DIM}")
    if convention not in ("additive_r_k", "exponential_product"):
        raise ValueError(f"unknown convention {convention!r}")

    theta = theta_sequence(spec, dim)
    u_diag = np.exp(1j * theta.values)

    if len(ensemble):
        truncated = KickEnsemble(
            states=tuple(truncate_state(s, dim) for s in ensemble.states),
            strengths=ensemble.strengths,
        )
    else:
        truncated = ensemble

    sign = 1.0 if convention == "additive_r_k" else -1.0
    kick = np.eye(dim, dtype=np.complex128)
    for state, strength in zip(truncated.states, truncated.strengths):
        lam = strength / spec.hbar
        mu = np.exp(1j * sign * lam) - 1.0
        if abs(mu) < 1e-12:
            raise TrivialPerturbationError(
                f"kick strength {strength} is a no-op: lambda/hbar congruent "
                "to 0 mod 2*pi")
        psi = state.coefficients
        kick += mu * np.outer(psi, psi.conj())
    entries = kick * u_diag[None, :]  # (I + sum mu_k P_k) @ diag(u)

    gram = entries.conj().T @ entries
    defect = float(np.max(np.abs(gram - np.eye(dim))))
    if defect > UNITARITY_TOL * dim:
        raise ToleranceError(
            f"unitarity defect {defect:.3e} exceeds {UNITARITY_TOL * dim:.3e}")
    return FloquetMatrix(dim=dim, entries=entries, convention=convention,
                         spectrum=spec, ensemble=truncated, theta=theta,
                         unitarity_defect=defect)


@dataclass(frozen=True)
class EigenDecomposition:
    """Sorted eigenphases of V with spectral weights per kick state.

    weights[k, i] = |<psi_k | v_i>|**2; each row sums to 1 because the Schur
    vectors of a normal matrix form an orthonormal eigenbasis.
    """

    eigenphases: np.ndarray
    weights: np.ndarray
    vectors: np.ndarray
    source: FloquetMatrix

    def point_mass_sum(self, k: int) -> float:
        """sum_i w_{k,i}**2, the Wiener limit of the survival time average."""
        return float(np.sum(self.weights[k] ** 2))


def eigen_decompose(matrix: FloquetMatrix,
                    ensemble: KickEnsemble | None = None) -> EigenDecomposition:
    """Full eigen-decomposition of the (normal) Floquet operator.

    Goes through a complex Schur triangularisation so the eigenbasis is
    orthonormal by construction; eigenvalue moduli are validated against 1
    rather than assumed.
    """
    if matrix.unitarity_defect > UNITARITY_TOL * matrix.dim:
        raise ToleranceError("input matrix is not unitary to tolerance")
    ensemble = matrix.ensemble if ensemble is None else ensemble
    t, z = scipy.linalg.schur(np.asarray(matrix.entries), output="complex")
    eigvals = np.diag(t)
    moduli_defect = float(np.max(np.abs(np.abs(eigvals) - 1.0)))
    if moduli_defect > UNITARITY_TOL:
        raise ToleranceError(
            f"eigenvalue moduli deviate from 1 by {moduli_defect:.3e}")
    phases = np.angle(eigvals) % (2.0 * math.pi)
    order = np.argsort(phases, kind="stable")
    phases = phases[order]
    vectors = z[:, order]
    if len(ensemble):
        overlaps = np.vstack([state.coefficients.conj() @ vectors
                              for state in ensemble.states])
        weights = np.abs(overlaps) ** 2
    else:
        weights = np.zeros((0, matrix.dim))
    phases.setflags(write=False)
    weights.setflags(write=False)
    return EigenDecomposition(eigenphases=phases, weights=weights,
                              vectors=vectors, source=matrix)


@dataclass(frozen=True)
class DynamicsTrace:
    """Per-kick survival amplitudes c_n = <psi|V^n|psi> and energies <H0>_n."""

    amplitudes: np.ndarray
    energies: np.ndarray
    source: FloquetMatrix
    state: KickState

    @property
    def n_kicks(self) -> int:
        return int(self.amplitudes.size) - 1

    def survival(self) -> np.ndarray:
        """|c_n|**2 for n = 0..n_kicks."""
        return np.abs(self.amplitudes) ** 2

    def cesaro_mean(self) -> float:
        """(1/T) sum_{n=1}^{T} |c_n|**2 at the largest available T."""
        if self.n_kicks < 1:
            raise ValueError("need at least one kick for a time average")
        return float(np.mean(self.survival()[1:]))


def evolve(matrix: FloquetMatrix, state: KickState,
           spec: BaseSpectrum | None = None, n_kicks: int = 1,
           _chunk: int = 1024) -> DynamicsTrace:
    """Iterate V on a state for n_kicks periods via phase multiplication.

    Works in the eigenbasis (one Schur decomposition up front), so the cost
    per kick is O(dim) for the survival amplitude and O(dim^2 / chunk
    batching) for the energies; no repeated matrix-vector products.
    """
    if n_kicks < 1:
        raise ValueError("n_kicks must be at least 1")
    spec = matrix.spectrum if spec is None else spec
    psi = truncate_state(state, matrix.dim).coefficients
    decomp = eigen_decompose(matrix, matrix.ensemble)
    z = decomp.vectors
    phases = decomp.eigenphases
    d = z.conj().T @ psi
    h0 = alpha_sequence(spec, matrix.dim)

    steps = np.arange(n_kicks + 1)
    amplitudes = np.empty(n_kicks + 1, dtype=np.complex128)
    energies = np.empty(n_kicks + 1, dtype=np.float64)
    weights = np.abs(d) ** 2
    for lo in range(0, n_kicks + 1, _chunk):
        hi = min(lo + _chunk, n_kicks + 1)
        block = np.exp(1j * np.outer(steps[lo:hi], phases))
        amplitudes[lo:hi] = block @ weights.astype(np.complex128)
        coeffs = (block * d[None, :]) @ z.T  # basis amplitudes per kick
        energies[lo:hi] = (np.abs(coeffs) ** 2) @ h0
    return DynamicsTrace(amplitudes=amplitudes, energies=energies,
                         source=matrix, state=state)


def wiener_average(trace: DynamicsTrace, decomposition: EigenDecomposition,
                   k: int) -> tuple[float, float]:
    """Cesaro mean of |c_n|**2 against the point-mass sum sum_i w_{k,i}**2.

    For a finite (hence pure point) matrix the two converge together as the
    averaging time grows; the pair is returned for comparison.  The trace and
    the decomposition must come from the same operator, and the evolved state
    must be the ensemble state k.
    """
    if trace.source is not decomposition.source:
        raise ProvenanceError("trace and decomposition come from different operators")
    ensemble = decomposition.source.ensemble
    if not 0 <= k < len(ensemble):
        raise ProvenanceError(f"ensemble has no state {k}")
    reference = ensemble.states[k].coefficients
    evolved = truncate_state(trace.state, decomposition.source.dim).coefficients
    if not np.allclose(reference, evolved, atol=1e-12):
        raise ProvenanceError("trace was not generated from ensemble state k")
    return trace.cesaro_mean(), decomposition.point_mass_sum(k)
