"""Quasi-energy spectra of the driven chain by two independent routes.

Route one builds the truncated extended-zone (Fourier-block) matrix:
blocks indexed by harmonics m, m' in [-N_F, N_F], diagonal blocks
H_static + m*omega*I, first off-diagonal blocks the Fourier components
of the drive f(z) = kappa*omega*sin(omega*z + phase0) times the gradient
operator D.  Route two multiplies midpoint-sampled exponential steps
into the one-period propagator U(Z_p) and takes eigenvalue logarithms.
Both fold quasi-energy real parts into the first zone (-omega/2, omega/2]
and select/weight the N physical modes; their agreement is the strongest
correctness check in the package.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceCapError, DimensionCapError, ParameterError, SolverError
from .linalg import Spectrum, eig_dense, expm, matrix_norm_1, principal_log_eigenvalues
from .model import ModelParams, build_static_hamiltonian, drive_operator, hamiltonian_at

#: Hard cap on the extended matrix dimension N*(2*N_F+1).
DEFAULT_DIM_CAP = 20000
#: Cap for the N_F convergence search.
NF_CAP = 512
#: Cap for propagator step doubling.
MAX_PROPAGATOR_STEPS = 1 << 21
#: Eigenvector overlap above which two extended-matrix modes count as
#: folded replicas of each other.
REPLICA_OVERLAP = 0.99
#: m=0 weight gap below which two candidates competing for a slot are
#: flagged as an ambiguous selection.
SELECTION_GAP = 1e-6


class Method(enum.Enum):
    """How a spectrum was produced."""

    EXTENDED = "extended"
    PROPAGATOR = "propagator"
    STATIC = "static"
    STATIC_EFFECTIVE = "effective"


@dataclass(frozen=True)
class FloquetSpectrum:
    """N physical quasi-energies with site-resolved mode weights.

    ``quasi_energies`` are sorted ascending by (Re, Im) with Re folded
    into (-omega/2, omega/2] (Im is reported unfolded).  Row k of
    ``mode_weights`` is the site probability profile of mode k,
    normalized to 1.  ``omega`` is the folding modulus; it is 0 for the
    static methods, which do not fold.  ``flags`` carries diagnostics
    such as ambiguous physical-mode selection.
    """

    quasi_energies: np.ndarray
    mode_weights: np.ndarray
    method: Method
    n_floquet: int
    omega: float
    params: ModelParams | None = None
    flags: tuple[str, ...] = field(default=())

    @property
    def n_modes(self) -> int:
        return self.quasi_energies.shape[0]

    @property
    def max_imag(self) -> float:
        return float(np.abs(self.quasi_energies.imag).max())


def fold_real(x, omega: float):
    """Fold real parts into the first zone (-omega/2, omega/2]."""
    x = np.asarray(x, dtype=np.float64)
    shifts = np.ceil((x - omega / 2.0) / omega)
    return x - omega * shifts


def drive_fourier_coefficients(params: ModelParams) -> tuple[complex, complex]:
    """(c_plus, c_minus) with f(z) = c_plus e^{i w z} + c_minus e^{-i w z}."""
    amplitude = params.kappa * params.omega
    c_plus = (amplitude / 2j) * np.exp(1j * params.phase0)
    c_minus = -(amplitude / 2j) * np.exp(-1j * params.phase0)
    return complex(c_plus), complex(c_minus)


def build_floquet_matrix(params: ModelParams, n_floquet: int,
                         dim_cap: int = DEFAULT_DIM_CAP) -> np.ndarray:
    """Truncated extended-zone matrix of dimension N*(2*N_F+1).

    Block (m, m') is H_static + m*omega*I on the diagonal, c_plus*D for
    m - m' = +1, c_minus*D for m - m' = -1, zero otherwise.  Blocks are
    stored in ascending-m order.
    """
    if n_floquet < 1:
        raise ParameterError(f"n_floquet must be >= 1, got {n_floquet}")
    n = params.n_sites
    n_blocks = 2 * n_floquet + 1
    dim = n * n_blocks
    if dim > dim_cap:
        raise DimensionCapError(
            f"extended matrix dimension {dim} = {n}*(2*{n_floquet}+1) "
            f"exceeds cap {dim_cap}"
        )
    h_static = build_static_hamiltonian(params)
    d = drive_operator(params)
    c_plus, c_minus = drive_fourier_coefficients(params)
    hf = np.zeros((dim, dim), dtype=np.complex128)
    eye = np.eye(n)
    for i in range(n_blocks):
        m = i - n_floquet
        hf[i * n:(i + 1) * n, i * n:(i + 1) * n] = h_static + m * params.omega * eye
    for i in range(n_blocks - 1):
        hf[(i + 1) * n:(i + 2) * n, i * n:(i + 1) * n] = c_plus * d
        hf[i * n:(i + 1) * n, (i + 1) * n:(i + 2) * n] = c_minus * d
    return hf


def _block_shift_overlap(candidate: np.ndarray, selected: np.ndarray,
                         shift: int, n_sites: int, n_blocks: int) -> float:
    """|<candidate, selected shifted by `shift` blocks>| for replica detection."""
    if abs(shift) >= n_blocks:
        return 0.0
    sel = selected.reshape(n_blocks, n_sites)
    shifted = np.zeros_like(sel)
    if shift >= 0:
        shifted[shift:] = sel[:n_blocks - shift]
    else:
        shifted[:n_blocks + shift] = sel[-shift:]
    return float(abs(np.vdot(candidate, shifted.reshape(-1))))


def _select_physical_modes(spectrum: Spectrum, params: ModelParams,
                           n_floquet: int) -> tuple[np.ndarray, np.ndarray, tuple[str, ...]]:
    """Pick the N modes with maximal m=0 Fourier weight, skipping replicas."""
    n = params.n_sites
    n_blocks = 2 * n_floquet + 1
    dim = n * n_blocks
    probs = np.abs(spectrum.eigenvectors) ** 2
    site_weights_m0 = probs.reshape(n_blocks, n, dim)[n_floquet]  # (site, mode)
    w0 = site_weights_m0.sum(axis=0)
    order = np.argsort(-w0, kind="stable")
    evals = spectrum.eigenvalues
    selected: list[int] = []
    flags: list[str] = []
    cursor = 0
    for cursor, idx in enumerate(order):
        if len(selected) == n:
            break
        is_replica = False
        for s in selected:
            shift = int(round((evals[idx].real - evals[s].real) / params.omega))
            if shift == 0:
                continue
            overlap = _block_shift_overlap(
                spectrum.eigenvectors[:, idx], spectrum.eigenvectors[:, s],
                shift, n, n_blocks)
            if overlap > REPLICA_OVERLAP:
                is_replica = True
                break
        if not is_replica:
            selected.append(int(idx))
    else:
        cursor = len(order)
    if len(selected) < n:
        raise SolverError(
            f"physical-mode selection found only {len(selected)} of {n} modes"
        )
    # Ambiguity diagnostic: a non-replica candidate nearly ties the weakest
    # selected mode.  Only candidates inside the weight gap can qualify.
    floor_w0 = w0[selected].min()
    for idx in order[cursor:]:
        if w0[idx] < floor_w0 - SELECTION_GAP:
            break
        is_replica = any(
            _block_shift_overlap(
                spectrum.eigenvectors[:, idx], spectrum.eigenvectors[:, s],
                int(round((evals[idx].real - evals[s].real) / params.omega)), n, n_blocks)
            > REPLICA_OVERLAP
            for s in selected
            if int(round((evals[idx].real - evals[s].real) / params.omega)) != 0
        )
        if not is_replica:
            flags.append("ambiguous_selection")
            break
    sel = np.array(selected, dtype=int)
    site_marginals = site_weights_m0[:, sel].T  # (mode, site)
    return sel, site_marginals, tuple(flags)


def quasi_energies_extended(params: ModelParams, n_floquet: int,
                            dim_cap: int = DEFAULT_DIM_CAP) -> FloquetSpectrum:
    """Quasi-energies from the truncated extended-zone matrix.

    Diagonalizes the block matrix, folds real parts into the first zone,
    and keeps the N modes carrying maximal weight in the m=0 Fourier
    block (greedy by descending weight, with a replica guard rejecting
    candidates whose block-shifted eigenvector overlaps a selected mode
    by more than REPLICA_OVERLAP).  Mode weights are the renormalized
    m=0 site marginals.
    """
    hf = build_floquet_matrix(params, n_floquet, dim_cap=dim_cap)
    spectrum = eig_dense(hf)
    sel, marginals, flags = _select_physical_modes(spectrum, params, n_floquet)
    totals = marginals.sum(axis=1, keepdims=True)
    if np.any(totals <= 0.0):
        raise SolverError("selected mode has vanishing m=0 weight")
    weights = marginals / totals
    eps = fold_real(spectrum.eigenvalues[sel].real, params.omega) \
        + 1j * spectrum.eigenvalues[sel].imag
    order = np.lexsort((eps.imag, eps.real))
    return FloquetSpectrum(
        quasi_energies=eps[order],
        mode_weights=weights[order],
        method=Method.EXTENDED,
        n_floquet=n_floquet,
        omega=params.omega,
        params=params,
        flags=flags,
    )


def default_n_steps(params: ModelParams, samples: int = 16) -> int:
    """max(1024, ceil(64 * ||H|| * Z_p)) with ||H|| sampled over one period."""
    z_period = params.drive_period
    grid = (np.arange(samples) + 0.5) * (z_period / samples)
    norm = max(float(matrix_norm_1(hamiltonian_at(z, params))) for z in grid)
    return max(1024, int(math.ceil(64.0 * norm * z_period)))


def one_period_propagator(params: ModelParams, n_steps: int,
                          chunk: int = 2048) -> np.ndarray:
    """U(Z_p) = product of expm(-i H(z_k) dz) over midpoint samples z_k."""
    n = params.n_sites
    z_period = params.drive_period
    dz = z_period / n_steps
    h_static = build_static_hamiltonian(params)
    d_diag = np.diag(drive_operator(params))
    u = np.eye(n, dtype=np.complex128)
    amplitude = params.kappa * params.omega
    for start in range(0, n_steps, chunk):
        stop = min(start + chunk, n_steps)
        z = (np.arange(start, stop) + 0.5) * dz
        f = amplitude * np.sin(params.omega * z + params.phase0)
        generators = np.broadcast_to(h_static, (stop - start, n, n)).copy()
        generators[:, np.arange(n), np.arange(n)] += f[:, None] * d_diag
        steps = expm(-1j * dz * generators)
        u = _ordered_product(steps) @ u
    return u


def _ordered_product(steps: np.ndarray) -> np.ndarray:
    """Time-ordered product steps[-1] @ ... @ steps[0] by pairwise reduction."""
    while steps.shape[0] > 1:
        k = steps.shape[0]
        paired = steps[1:k - k % 2:2] @ steps[0:k - k % 2:2]
        if k % 2:
            paired = np.concatenate([paired, steps[-1:]], axis=0)
        steps = paired
    return steps[0]


def quasi_energies_propagator(params: ModelParams, n_steps: int | None = None,
                              converge_tol: float | None = None) -> FloquetSpectrum:
    """Quasi-energies from the one-period propagator.

    eps = (i/Z_p) * log mu over the eigenvalues mu of U(Z_p), with the
    fixed principal branch; a final fold maps the -omega/2 branch edge
    onto +omega/2 so Re(eps) lies in (-omega/2, omega/2].  Mode weights
    come from the eigenvectors of U.  With ``converge_tol`` set, n_steps
    is doubled until no quasi-energy moves by more than the tolerance
    under the optimal matching, and the refined spectrum is returned.
    """
    if n_steps is None:
        n_steps = default_n_steps(params)
    elif n_steps < 100:
        raise ParameterError(f"n_steps must be >= 100, got {n_steps}")

    def compute(steps: int) -> FloquetSpectrum:
        u = one_period_propagator(params, steps)
        spectrum = eig_dense(u)
        logs = principal_log_eigenvalues(spectrum.eigenvalues)
        z_period = params.drive_period
        eps = 1j * logs / z_period
        eps = fold_real(eps.real, params.omega) + 1j * eps.imag
        weights = (np.abs(spectrum.eigenvectors) ** 2).T
        weights = weights / weights.sum(axis=1, keepdims=True)
        order = np.lexsort((eps.imag, eps.real))
        return FloquetSpectrum(
            quasi_energies=eps[order],
            mode_weights=weights[order],
            method=Method.PROPAGATOR,
            n_floquet=0,
            omega=params.omega,
            params=params,
        )

    result = compute(n_steps)
    if converge_tol is None:
        return result
    while True:
        if 2 * n_steps > MAX_PROPAGATOR_STEPS:
            raise ConvergenceCapError(
                f"propagator did not stabilize below {converge_tol:g} "
                f"within {MAX_PROPAGATOR_STEPS} steps"
            )
        refined = compute(2 * n_steps)
        move = matched_distance(result, refined)
        n_steps *= 2
        result = refined
        if move < converge_tol:
            return result


def spectral_distance(a: FloquetSpectrum, b: FloquetSpectrum) -> float:
    """Max matched distance between two spectra under sorted (Re, Im) pairing.

    This is the module-wide convention for comparing spectra across
    methods.  It is cheap but can mispair modes whose real parts nearly
    tie while their imaginary parts differ; use ``matched_distance`` when
    that regime matters (it does inside the convergence searches).
    """
    if a.n_modes != b.n_modes:
        raise ParameterError("spectra have different mode counts")
    return float(np.abs(a.quasi_energies - b.quasi_energies).max())


def _min_cost_assignment(cost: np.ndarray) -> np.ndarray:
    """Column assigned to each row minimizing total cost (O(n^3) Hungarian)."""
    n = cost.shape[0]
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    row_of_col = np.zeros(n + 1, dtype=int)
    path = np.zeros(n + 1, dtype=int)
    for i in range(1, n + 1):
        row_of_col[0] = i
        j0 = 0
        least = np.full(n + 1, np.inf)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = row_of_col[j0]
            delta = np.inf
            j1 = 0
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = cost[i0 - 1, j - 1] - u[i0] - v[j]
                if cur < least[j]:
                    least[j] = cur
                    path[j] = j0
                if least[j] < delta:
                    delta = least[j]
                    j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[row_of_col[j]] += delta
                    v[j] -= delta
                else:
                    least[j] -= delta
            j0 = j1
            if row_of_col[j0] == 0:
                break
        while j0 != 0:
            j1 = path[j0]
            row_of_col[j0] = row_of_col[j1]
            j0 = j1
    result = np.empty(n, dtype=int)
    for j in range(1, n + 1):
        result[row_of_col[j] - 1] = j - 1
    return result


def matched_distance(a: FloquetSpectrum, b: FloquetSpectrum) -> float:
    """Max pair distance under the optimal (assignment) matching.

    Robust replacement for sorted pairing when real parts nearly tie:
    modes are matched by minimizing the total |eps_a - eps_b| cost, so
    ordering noise between runs cannot fake a large spectral movement.
    """
    if a.n_modes != b.n_modes:
        raise ParameterError("spectra have different mode counts")
    cost = np.abs(a.quasi_energies[:, None] - b.quasi_energies[None, :])
    columns = _min_cost_assignment(cost)
    return float(cost[np.arange(cost.shape[0]), columns].max())


def converge_nf(params: ModelParams, tol: float,
                nf_cap: int = NF_CAP, dim_cap: int = DEFAULT_DIM_CAP) -> int:
    """Smallest N_F at which the physical spectrum is stable under N_F -> N_F+2.

    Searches by doubling from 2, then bisects.  Stability means the
    selected quasi-energy multiset moves by less than ``tol`` under the
    optimal matching.  Raises ConvergenceCapError above ``nf_cap``.
    """
    if tol <= 0:
        raise ParameterError(f"tol must be positive, got {tol}")
    cache: dict[int, FloquetSpectrum] = {}

    def spectrum(nf: int) -> FloquetSpectrum:
        if nf not in cache:
            cache[nf] = quasi_energies_extended(params, nf, dim_cap=dim_cap)
        return cache[nf]

    def delta(nf: int) -> float:
        return matched_distance(spectrum(nf), spectrum(nf + 2))

    nf = 2
    last = delta(nf)
    while last >= tol:
        if 2 * nf > nf_cap:
            raise ConvergenceCapError(
                f"N_F search exceeded cap {nf_cap}; last delta {last:.3e} at N_F={nf}"
            )
        nf *= 2
        last = delta(nf)
    if nf == 2:
        return 2
    lo = nf // 2  # delta(lo) >= tol
    hi = nf       # delta(hi) < tol
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if delta(mid) < tol:
            hi = mid
        else:
            lo = mid
    return hi
