"""CHSH nonlocality certification built on anchor entries.

An *anchor* is a crossed entry rho[(m0,p0),(n0,q0)] whose column labels
(N0, Q0) are non-degenerate in their respective spectra. Reordering each
party's basis so the anchor spans the leading 2x2 corner, one measures

    A1 = sigma_z (+) 1,   A2 = sigma_x (+) 1,
    B1 = b1.sigma (+) 1,  B2 = b2.sigma (+) 1,

with b1, b2 unit vectors of opposite azimuth (polar angle theta, azimuth
phi). The CHSH score decomposes over four fixed product observables whose
expectations are plain entry sums of the reordered matrix, which yields a
closed-form maximum over the angles:

    max F = 2 * [1 + sqrt(4*|anchor|^2 + <Oz>^2) - <Oz>],

strictly above the classical bound 2 whenever the anchor entry is nonzero.
A grid maximizer over the raw trace expression serves as an independent
numerical cross-check of the closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import PAULI_X, PAULI_Y, PAULI_Z, kron
from .structure import (
    EPS_ZERO,
    AdditiveStructure,
    DensityMatrix,
    TextureError,
    _check_dims,
    _matrix_of,
    validate_additivity,
)

TSIRELSON_BOUND = 2.0 * math.sqrt(2.0)


@dataclass(frozen=True)
class AnchorEntry:
    """Crossed entry rho[(m0,p0),(n0,q0)] with (N0, Q0) non-degenerate."""

    m0: int
    p0: int
    n0: int
    q0: int
    value: complex

    @property
    def alice(self) -> tuple[int, int]:
        return (self.m0, self.n0)

    @property
    def bob(self) -> tuple[int, int]:
        return (self.p0, self.q0)

    def row(self, d_b: int) -> int:
        return self.m0 * d_b + self.p0

    def col(self, d_b: int) -> int:
        return self.n0 * d_b + self.q0


@dataclass(frozen=True)
class BasisReordering:
    """Basis orders putting the anchor pairs first on each side.

    ``alice_order[k]`` is the original Alice index sitting at position k
    after the reordering (anchor row index first, column index second, the
    rest in ascending original order); likewise for Bob.
    """

    alice_order: tuple[int, ...]
    bob_order: tuple[int, ...]

    @property
    def d_a(self) -> int:
        return len(self.alice_order)

    @property
    def d_b(self) -> int:
        return len(self.bob_order)

    @property
    def alice_perm(self) -> tuple[int, ...]:
        """Map original index -> new position."""
        perm = [0] * self.d_a
        for pos, orig in enumerate(self.alice_order):
            perm[orig] = pos
        return tuple(perm)

    @property
    def bob_perm(self) -> tuple[int, ...]:
        perm = [0] * self.d_b
        for pos, orig in enumerate(self.bob_order):
            perm[orig] = pos
        return tuple(perm)

    def product_order(self) -> tuple[int, ...]:
        """Original flat index sitting at each new flat position."""
        return tuple(
            a * self.d_b + b for a in self.alice_order for b in self.bob_order
        )

    def apply(self, rho) -> np.ndarray:
        """Conjugate a matrix by the induced permutation of the product basis."""
        mat = _matrix_of(rho)
        if mat.shape[0] != self.d_a * self.d_b:
            raise ValueError(
                f"dimension mismatch: matrix has dim {mat.shape[0]}, "
                f"reordering needs {self.d_a * self.d_b}"
            )
        idx = np.asarray(self.product_order())
        return mat[np.ix_(idx, idx)].copy()


@dataclass(frozen=True, eq=False)
class ChshObservables:
    """The four +/-1-valued measurements entering the CHSH score."""

    a1: np.ndarray
    a2: np.ndarray
    b1: np.ndarray
    b2: np.ndarray
    theta: float
    phi: float


@dataclass(frozen=True)
class OExpectations:
    """Expectations of the four product observables behind the CHSH score."""

    o0: float
    ox: float
    oy: float
    oz: float

    @property
    def vector(self) -> tuple[float, float, float]:
        return (self.ox, self.oy, self.oz)

    @property
    def vector_norm(self) -> float:
        return math.sqrt(self.ox**2 + self.oy**2 + self.oz**2)


@dataclass(frozen=True, eq=False)
class ChshCertificate:
    """Closed-form CHSH maximum for one anchor, with the attaining settings.

    The observables live in the reordered basis described by ``reorder``.
    ``f_max`` exceeds 2 exactly when the anchor entry is nonzero and never
    exceeds the Tsirelson bound 2*sqrt(2).
    """

    anchor: AnchorEntry
    reorder: BasisReordering
    f_max: float
    theta_opt: float
    phi_opt: float
    observables: ChshObservables


def _require_texture(mat: np.ndarray, s: AdditiveStructure, tol: float) -> None:
    violations = validate_additivity(mat, s, tol)
    if violations:
        raise TextureError(violations)


def _is_nondegenerate_pair(s: AdditiveStructure, m: int, p: int) -> bool:
    return (
        s.alice_deg(s.j_alice[m]) == 1 and s.bob_deg(s.j_bob[p]) == 1
    )


def find_anchor_entries(rho, s: AdditiveStructure, tol: float = EPS_ZERO) -> list[AnchorEntry]:
    """All anchor entries above ``tol``, scanned in ascending flat order.

    Each unordered position pair contributes at most one anchor. When the
    upper-triangle orientation has a degenerate column pair but the row
    pair (M0, P0) is non-degenerate, the conjugate entry takes over the
    anchor role.
    """
    mat = _matrix_of(rho)
    _check_dims(mat, s)
    _require_texture(mat, s, tol)

    anchors: list[AnchorEntry] = []
    rows, cols = np.nonzero(np.abs(mat) > tol)
    for row, col in zip(rows.tolist(), cols.tolist()):
        if row >= col:
            continue
        m, p = s.split_index(row)
        n, q = s.split_index(col)
        if m == n or p == q:
            continue
        if (
            abs(s.j_alice[m] - s.j_alice[n]) <= s.eps_j
            or abs(s.j_bob[p] - s.j_bob[q]) <= s.eps_j
        ):
            continue  # equal eigenvalues on either side: within-sector entry, not crossed
        if _is_nondegenerate_pair(s, n, q):
            anchors.append(AnchorEntry(m, p, n, q, complex(mat[row, col])))
        elif _is_nondegenerate_pair(s, m, p):
            anchors.append(AnchorEntry(n, q, m, p, complex(mat[col, row])))
    return anchors


def reorder_basis(anchor: AnchorEntry, s: AdditiveStructure) -> BasisReordering:
    """Basis orders with the anchor's index pairs moved to the 2x2 corner."""
    alice_rest = [i for i in range(s.d_a) if i not in (anchor.m0, anchor.n0)]
    bob_rest = [i for i in range(s.d_b) if i not in (anchor.p0, anchor.q0)]
    return BasisReordering(
        alice_order=(anchor.m0, anchor.n0, *alice_rest),
        bob_order=(anchor.p0, anchor.q0, *bob_rest),
    )


def _corner_block(two_by_two: np.ndarray, dim: int, tail: float) -> np.ndarray:
    """dim x dim matrix with a 2x2 corner and ``tail`` times identity after it."""
    if dim < 2:
        raise ValueError("party dimension must be at least 2")
    out = np.zeros((dim, dim), dtype=complex)
    out[:2, :2] = two_by_two
    if dim > 2:
        out[2:, 2:] = tail * np.eye(dim - 2)
    return out


def _bloch(bx: float, by: float, bz: float) -> np.ndarray:
    return bx * PAULI_X + by * PAULI_Y + bz * PAULI_Z


def build_observables(theta: float, phi: float, d_a: int, d_b: int) -> ChshObservables:
    """CHSH observables for polar angle ``theta`` and azimuth ``phi``.

    Alice's settings are fixed (z and x Pauli corners); Bob's two settings
    share the polar angle and take opposite azimuthal directions. All four
    matrices square to the identity.
    """
    if not (-1e-12 <= theta <= math.pi + 1e-12):
        raise ValueError(f"theta must lie in [0, pi], got {theta!r}")
    if not (-math.pi - 1e-12 <= phi <= math.pi + 1e-12):
        raise ValueError(f"phi must lie in [-pi, pi], got {phi!r}")
    st, ct = math.sin(theta), math.cos(theta)
    cp, sp = math.cos(phi), math.sin(phi)
    a1 = _corner_block(PAULI_Z, d_a, tail=1.0)
    a2 = _corner_block(PAULI_X, d_a, tail=1.0)
    b1 = _corner_block(_bloch(st * cp, st * sp, ct), d_b, tail=1.0)
    b2 = _corner_block(_bloch(-st * cp, -st * sp, ct), d_b, tail=1.0)
    return ChshObservables(a1=a1, a2=a2, b1=b1, b2=b2, theta=theta, phi=phi)


def build_o_operators(d_a: int, d_b: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """The four product observables (O0, Ox, Oy, Oz) behind the CHSH score.

    O0 collects the Bob-tail identity part; Ox, Oy, Oz are the corner
    correlation parts along the respective Pauli axes.
    """
    if d_a < 2 or d_b < 2:
        raise ValueError("both parties need dimension at least 2")
    zero2 = np.zeros((2, 2), dtype=complex)
    alice_z = _corner_block(PAULI_Z, d_a, tail=1.0)
    alice_x = _corner_block(PAULI_X, d_a, tail=1.0)
    o0 = kron(alice_z, _corner_block(zero2, d_b, tail=1.0))
    oz = kron(alice_z, _corner_block(PAULI_Z, d_b, tail=0.0))
    ox = kron(alice_x, _corner_block(PAULI_X, d_b, tail=0.0))
    oy = kron(alice_x, _corner_block(PAULI_Y, d_b, tail=0.0))
    return o0, ox, oy, oz


def o_expectations(rho, d_a: int, d_b: int) -> OExpectations:
    """Expectations of the four product observables from matrix entries.

    Works directly on the entries of the (reordered) matrix, without
    building any operator; agrees with Tr(rho * O_i) to machine precision.
    """
    mat = _matrix_of(rho)
    if mat.shape[0] != d_a * d_b:
        raise ValueError(
            f"dimension mismatch: matrix has dim {mat.shape[0]}, expected {d_a}*{d_b}"
        )
    tensor = mat.reshape(d_a, d_b, d_a, d_b)
    diag = np.einsum("ijij->ij", tensor).real

    o0 = float(np.sum(diag[0, 2:]) - np.sum(diag[1, 2:]) + np.sum(diag[2:, 2:]))
    oz = float(
        (diag[0, 0] - diag[0, 1])
        + (diag[1, 1] - diag[1, 0])
        + np.sum(diag[2:, 0] - diag[2:, 1])
    )
    cross = tensor[0, 0, 1, 1] + tensor[1, 0, 0, 1] + np.sum(tensor[2:, 0, 2:, 1].diagonal())
    ox = float(2.0 * cross.real)
    oy = float(-2.0 * cross.imag)
    return OExpectations(o0=o0, ox=ox, oy=oy, oz=oz)


def f_value(rho, obs: ChshObservables) -> float:
    """CHSH score Tr(rho * [A1 (x) (B1+B2) + A2 (x) (B1-B2)])."""
    mat = _matrix_of(rho)
    dim = obs.a1.shape[0] * obs.b1.shape[0]
    if mat.shape[0] != dim:
        raise ValueError(
            f"dimension mismatch: matrix has dim {mat.shape[0]}, observables need {dim}"
        )
    chsh_op = kron(obs.a1, obs.b1 + obs.b2) + kron(obs.a2, obs.b1 - obs.b2)
    return float(np.trace(mat @ chsh_op).real)


def _validate_anchor(anchor: AnchorEntry, s: AdditiveStructure) -> None:
    m, p, n, q = anchor.m0, anchor.p0, anchor.n0, anchor.q0
    for idx, bound in ((m, s.d_a), (n, s.d_a)):
        if not 0 <= idx < bound:
            raise ValueError(f"anchor Alice index {idx} out of range")
    for idx, bound in ((p, s.d_b), (q, s.d_b)):
        if not 0 <= idx < bound:
            raise ValueError(f"anchor Bob index {idx} out of range")
    if not (s.on_shell(m, p) and s.on_shell(n, q)):
        raise ValueError("anchor pairs must lie on the J shell")
    if abs(s.j_alice[m] - s.j_alice[n]) <= s.eps_j or abs(s.j_bob[p] - s.j_bob[q]) <= s.eps_j:
        raise ValueError("anchor must be a crossed entry (distinct eigenvalues per party)")
    if not _is_nondegenerate_pair(s, n, q):
        raise ValueError("anchor column labels (N0, Q0) must be non-degenerate")


def f_max_closed_form(rho, anchor: AnchorEntry, s: AdditiveStructure) -> ChshCertificate:
    """Closed-form CHSH maximum over the angle family, for a given anchor.

    The maximum is attained when Bob's first setting aligns with the
    expectation vector (<Ox>, <Oy>, <Oz>) of the reordered state; the
    aligned angles are returned together with the observables they define.
    """
    mat = _matrix_of(rho)
    _check_dims(mat, s)
    _validate_anchor(anchor, s)
    reorder = reorder_basis(anchor, s)
    rho_r = reorder.apply(mat)
    d_a, d_b = s.d_a, s.d_b

    a_abs = abs(mat[anchor.row(d_b), anchor.col(d_b)])
    # diagonal entries surviving the anchor conditions, all nonnegative
    diag = np.einsum("ijij->ij", rho_r.reshape(d_a, d_b, d_a, d_b)).real
    oz = float(diag[0, 0] + diag[1, 1] + np.sum(diag[2:, 0]))
    f_max = 2.0 * (1.0 + math.hypot(2.0 * a_abs, oz) - oz)

    exp = o_expectations(rho_r, d_a, d_b)
    norm = exp.vector_norm
    if norm <= EPS_ZERO:
        theta_opt, phi_opt = 0.0, 0.0
    else:
        theta_opt = math.acos(min(1.0, max(-1.0, exp.oz / norm))) + 0.0
        phi_opt = math.atan2(exp.oy, exp.ox) + 0.0  # +0.0 folds -0.0 into 0.0
    obs = build_observables(theta_opt, phi_opt, d_a, d_b)
    return ChshCertificate(
        anchor=anchor,
        reorder=reorder,
        f_max=f_max,
        theta_opt=theta_opt,
        phi_opt=phi_opt,
        observables=obs,
    )


def _alice_contractions(rho_r: np.ndarray, d_a: int, d_b: int) -> tuple[np.ndarray, np.ndarray]:
    """Partial traces against the two fixed Alice observables.

    Returns (W1 + W2, W1 - W2) with W_i[j, l] = sum_{ik} rho[(ij),(kl)] A_i[k, i],
    so that Tr(rho * (A_i (x) B)) = sum_{jl} W_i[j, l] * B[l, j] for any B.
    """
    a1 = _corner_block(PAULI_Z, d_a, tail=1.0)
    a2 = _corner_block(PAULI_X, d_a, tail=1.0)
    tensor = rho_r.reshape(d_a, d_b, d_a, d_b)
    w1 = np.einsum("ijkl,ki->jl", tensor, a1)
    w2 = np.einsum("ijkl,ki->jl", tensor, a2)
    return w1 + w2, w1 - w2


def _bob_settings(thetas: np.ndarray, phis: np.ndarray, d_b: int) -> tuple[np.ndarray, np.ndarray]:
    """Stacked B1 and B2 matrices for paired angle arrays."""
    n = thetas.shape[0]
    st, ct = np.sin(thetas), np.cos(thetas)
    off = st * np.exp(-1j * phis)  # upper-right entry of b.sigma
    b1 = np.zeros((n, d_b, d_b), dtype=complex)
    tail = np.arange(2, d_b)
    b1[:, tail, tail] = 1.0
    b2 = b1.copy()
    b1[:, 0, 0] = ct
    b1[:, 1, 1] = -ct
    b1[:, 0, 1] = off
    b1[:, 1, 0] = off.conj()
    b2[:, 0, 0] = ct
    b2[:, 1, 1] = -ct
    b2[:, 0, 1] = -off
    b2[:, 1, 0] = -off.conj()
    return b1, b2


def _f_points(
    w_sum: np.ndarray,
    w_diff: np.ndarray,
    d_b: int,
    thetas: np.ndarray,
    phis: np.ndarray,
) -> np.ndarray:
    """CHSH scores at paired (theta, phi) points via the precontracted state."""
    b1, b2 = _bob_settings(thetas, phis, d_b)
    vals = np.einsum("jl,glj->g", w_sum, b1) + np.einsum("jl,glj->g", w_diff, b2)
    return vals.real


def _grid_max(
    w_sum: np.ndarray,
    w_diff: np.ndarray,
    d_b: int,
    thetas: np.ndarray,
    phis: np.ndarray,
    chunk: int = 1 << 16,
) -> tuple[float, float, float]:
    best = -math.inf
    best_t = best_p = 0.0
    n_phi = phis.shape[0]
    rows_per_chunk = max(1, chunk // n_phi)
    for start in range(0, thetas.shape[0], rows_per_chunk):
        th = thetas[start : start + rows_per_chunk]
        th_flat = np.repeat(th, n_phi)
        ph_flat = np.tile(phis, th.shape[0])
        vals = _f_points(w_sum, w_diff, d_b, th_flat, ph_flat)
        k = int(np.argmax(vals))
        if vals[k] > best:
            best = float(vals[k])
            best_t = float(th_flat[k])
            best_p = float(ph_flat[k])
    return best, best_t, best_p


def grid_verify(
    rho,
    anchor: AnchorEntry,
    s: AdditiveStructure,
    n_theta: int = 1024,
    n_phi: int = 2048,
    refine_levels: int = 3,
) -> float:
    """Numerical CHSH maximum by grid search over the measurement angles.

    Evaluates the raw trace expression on a uniform n_theta x n_phi grid
    over theta in [0, pi], phi in [-pi, pi], then zooms into the best cell
    ``refine_levels`` times (10x finer per level). Independent of the
    closed form: never exceeds it, and converges to it as the grid refines.
    """
    if n_theta < 2 or n_phi < 2:
        raise ValueError("need at least a 2x2 grid")
    mat = _matrix_of(rho)
    _check_dims(mat, s)
    _validate_anchor(anchor, s)
    rho_r = reorder_basis(anchor, s).apply(mat)
    w_sum, w_diff = _alice_contractions(rho_r, s.d_a, s.d_b)

    thetas = np.linspace(0.0, math.pi, n_theta)
    phis = np.linspace(-math.pi, math.pi, n_phi)
    best, best_t, best_p = _grid_max(w_sum, w_diff, s.d_b, thetas, phis)

    d_theta = math.pi / (n_theta - 1)
    d_phi = 2.0 * math.pi / (n_phi - 1)
    for _ in range(refine_levels):
        thetas = np.linspace(max(0.0, best_t - d_theta), min(math.pi, best_t + d_theta), 21)
        phis = np.linspace(best_p - d_phi, best_p + d_phi, 21)
        cand, cand_t, cand_p = _grid_max(w_sum, w_diff, s.d_b, thetas, phis)
        if cand > best:
            best, best_t, best_p = cand, cand_t, cand_p
        d_theta /= 10.0
        d_phi /= 10.0
    return best


def certify_nonlocality(rho, s: AdditiveStructure, tol: float = EPS_ZERO) -> ChshCertificate | None:
    """Best CHSH certificate over all anchors, or None when no anchor exists.

    Absence of an anchor makes no locality claim; it only means this
    construction cannot certify a violation. Anchors are scanned in
    ascending flat order and ties in the maximum keep the first.
    """
    anchors = find_anchor_entries(rho, s, tol)
    best: ChshCertificate | None = None
    for anchor in anchors:
        cert = f_max_closed_form(rho, anchor, s)
        if best is None or cert.f_max > best.f_max:
            best = cert
    return best
