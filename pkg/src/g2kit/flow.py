"""Fourier-mode model of the cylinder decay flow.

The linearized operator on a flat torus cross-section T^d pairs exact
p-forms against coexact (p-1)-forms mode by mode.  On a lattice mode
m != 0 the exterior derivative acts on constant-coefficient forms as
wedging with 2*pi*m, so each mode contributes a finite symmetric block

    L_m = 2*pi*|m| * [[0, M], [M^T, 0]],

where M is the wedge map by the unit vector m/|m| compressed to its
coimage and image by a singular value decomposition.  Wedging with a
unit vector is a partial isometry, so the eigenvalues of L_m are
+-2*pi*|m|, each with multiplicity equal to the wedge rank, and the
spectral gap mu of the assembled operator is 2*pi at every cutoff.

Degree convention: p = min(3, d).  In the ambient seven-dimensional
picture the pairing couples 3-forms to 2-forms; on a 2-torus that
bidegree collapses, and lowering the degree there keeps every spectral
statement intact.
"""

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import CutoffTooLarge, IntegratorError, InvalidOperand

MAX_DIMENSION = 100_000

INTEGRATOR_RTOL = 1e-9
INTEGRATOR_ATOL = 1e-12


def _wedge_matrix(vector, d, p):
    """Matrix of xi -> v ^ xi from (p-1)-forms to p-forms.

    Bases are lexicographically ordered index combinations.
    """
    rows = list(itertools.combinations(range(d), p))
    cols = list(itertools.combinations(range(d), p - 1))
    row_index = {c: i for i, c in enumerate(rows)}
    W = np.zeros((len(rows), len(cols)))
    for j, idx in enumerate(cols):
        for i in range(d):
            if i in idx:
                continue
            merged = tuple(sorted(idx + (i,)))
            sign = (-1) ** merged.index(i)
            W[row_index[merged], j] += sign * vector[i]
    return W


@dataclass(frozen=True)
class ModeBlock:
    """One lattice mode's contribution to the operator.

    coupling is the compressed wedge map M (r x r, numerically the
    identity); plus_basis and minus_basis are orthonormal columns
    spanning the growing and decaying eigenspaces of the 2r x 2r block.
    """

    mode: tuple
    norm_sq: int
    weight: float
    coupling: np.ndarray
    plus_basis: np.ndarray
    minus_basis: np.ndarray

    @property
    def size(self):
        return 2 * self.coupling.shape[0]

    def matrix(self):
        r = self.coupling.shape[0]
        out = np.zeros((2 * r, 2 * r))
        out[:r, r:] = self.coupling
        out[r:, :r] = self.coupling.T
        return self.weight * out

    def eigenvalues(self):
        s = np.linalg.svd(self.coupling, compute_uv=False)
        return np.concatenate([self.weight * s, -self.weight * s])


@dataclass(frozen=True)
class ModeSystem:
    """Truncated mode model of the linear operator with its splitting."""

    d: int
    N: int
    p: int
    modes: tuple
    blocks: tuple
    dim: int
    mu: float
    _stacked: np.ndarray = field(repr=False)
    _plus: np.ndarray = field(repr=False)
    _minus: np.ndarray = field(repr=False)

    @property
    def block_size(self):
        return self.blocks[0].size

    def matvec(self, x):
        b = self.block_size
        y = np.einsum("kij,kj->ki", self._stacked,
                      np.asarray(x).reshape(-1, b))
        return y.reshape(-1)

    def spectrum(self):
        """All eigenvalues, computed blockwise, sorted ascending."""
        return np.sort(np.concatenate([b.eigenvalues() for b in self.blocks]))

    def spectrum_table(self):
        """Exact eigenvalue bookkeeping: {|m|^2: multiplicity of +2pi*sqrt(k)}.

        Negative eigenvalues carry the same multiplicities by the pairing
        symmetry of the blocks.
        """
        table = {}
        for b in self.blocks:
            r = b.coupling.shape[0]
            table[b.norm_sq] = table.get(b.norm_sq, 0) + r
        return dict(sorted(table.items()))

    def dense_operator(self):
        """The full operator as one dense symmetric matrix."""
        if self.dim > 5000:
            raise CutoffTooLarge(
                f"dense operator would be {self.dim} x {self.dim}")
        out = np.zeros((self.dim, self.dim))
        o = 0
        for b in self.blocks:
            out[o:o + b.size, o:o + b.size] = b.matrix()
            o += b.size
        return out

    def ambient_operator(self):
        """Independent assembly on the uncompressed form spaces.

        Block-diagonal over modes of 2*pi*|m| * [[0, W], [W^T, 0]] with W
        the raw wedge matrix (no SVD).  Contains the kernel of the wedge
        maps, so its spectrum is the retained one plus zeros.  Used as an
        eigendecomposition oracle against spectrum().
        """
        a = math.comb(self.d, self.p)
        bdim = a + math.comb(self.d, self.p - 1)
        total = bdim * len(self.modes)
        if total > 5000:
            raise CutoffTooLarge(
                f"ambient operator would be {total} x {total}")
        out = np.zeros((total, total))
        for k, m in enumerate(self.modes):
            norm = math.sqrt(sum(c * c for c in m))
            W = _wedge_matrix(np.array(m) / norm, self.d, self.p)
            o = k * bdim
            out[o:o + a, o + a:o + bdim] = 2 * math.pi * norm * W
            out[o + a:o + bdim, o:o + a] = 2 * math.pi * norm * W.T
        return out

    def project_plus(self, x):
        return self._plus @ (self._plus.T @ np.asarray(x, dtype=float))

    def project_minus(self, x):
        return self._minus @ (self._minus.T @ np.asarray(x, dtype=float))

    def random_minus_state(self, seed, norm=1.0):
        """A state in the decaying subspace B- with the requested norm."""
        rng = np.random.default_rng(seed)
        c = rng.standard_normal(self._minus.shape[1])
        x = self._minus @ c
        return FlowState(norm * x / np.linalg.norm(x))

    def random_plus_state(self, seed, norm=1.0):
        rng = np.random.default_rng(seed)
        c = rng.standard_normal(self._plus.shape[1])
        x = self._plus @ c
        return FlowState(norm * x / np.linalg.norm(x))

    def minus_eigenstate(self, block_index, which=0, norm=1.0):
        """An exact eigenvector of L in B- supported on one mode block."""
        x = np.zeros(self.dim)
        o = sum(b.size for b in self.blocks[:block_index])
        col = self.blocks[block_index].minus_basis[:, which]
        x[o:o + col.size] = col
        return FlowState(norm * x)


@dataclass(frozen=True)
class FlowState:
    """Coefficient vector over the mode basis at a time."""

    x: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        arr = np.asarray(self.x, dtype=float)
        if arr.ndim != 1 or not np.all(np.isfinite(arr)):
            raise InvalidOperand("state must be a finite vector")
        object.__setattr__(self, "x", arr)

    @property
    def norm(self):
        return float(np.linalg.norm(self.x))

    def split(self, system):
        plus = system.project_plus(self.x)
        return FlowState(plus, self.t), FlowState(self.x - plus, self.t)


def build_mode_system(d, N):
    """Assemble the truncated operator over modes 0 < |m|_inf <= N."""
    if not isinstance(d, int) or not 2 <= d <= 6:
        raise InvalidOperand(f"cross-section dimension must be 2..6, got {d}")
    if not isinstance(N, int) or N < 1:
        raise InvalidOperand(f"cutoff must be a positive integer, got {N}")
    p = min(3, d)
    n_modes = (2 * N + 1) ** d - 1
    rank = math.comb(d - 1, p - 1)
    if n_modes * 2 * rank > MAX_DIMENSION:
        raise CutoffTooLarge(
            f"{n_modes} modes x block size {2 * rank} exceeds "
            f"the {MAX_DIMENSION}-coefficient budget")

    blocks = []
    modes = []
    for m in itertools.product(range(-N, N + 1), repeat=d):
        if all(c == 0 for c in m):
            continue
        modes.append(m)
        norm_sq = sum(c * c for c in m)
        norm = math.sqrt(norm_sq)
        W = _wedge_matrix(np.array(m) / norm, d, p)
        U, s, Vt = np.linalg.svd(W)
        r = int(np.sum(s > 0.5))
        if r != rank or s[r - 1] < 1e-12:
            raise InvalidOperand(
                "wedge map rank mismatch; operator not injective on the "
                "retained subspace")
        M = U[:, :r].T @ W @ Vt[:r].T
        # eigenvectors of [[0, M], [M^T, 0]] from the SVD of M
        P, sig, Qt = np.linalg.svd(M)
        plus = np.vstack([P, Qt.T]) / math.sqrt(2)
        minus = np.vstack([P, -Qt.T]) / math.sqrt(2)
        blocks.append(ModeBlock(
            mode=m, norm_sq=norm_sq, weight=2 * math.pi * norm,
            coupling=M, plus_basis=plus, minus_basis=minus))

    dim = sum(b.size for b in blocks)
    mu = 2 * math.pi * math.sqrt(min(b.norm_sq for b in blocks))
    stacked = np.stack([b.matrix() for b in blocks])
    plus_cols = []
    minus_cols = []
    o = 0
    for b in blocks:
        for basis, cols in ((b.plus_basis, plus_cols),
                            (b.minus_basis, minus_cols)):
            block_cols = np.zeros((dim, basis.shape[1]))
            block_cols[o:o + b.size] = basis
            cols.append(block_cols)
        o += b.size
    return ModeSystem(
        d=d, N=N, p=p, modes=tuple(modes), blocks=tuple(blocks), dim=dim,
        mu=mu, _stacked=stacked, _plus=np.hstack(plus_cols),
        _minus=np.hstack(minus_cols))


@dataclass(frozen=True)
class QuadraticMap:
    """Homogeneous quadratic vector field with a recorded Lipschitz bound.

    tensor[i, j, k] is symmetric in (j, k); lipschitz_bound is the
    measured Lipschitz constant of the map on the ball of ball_radius.
    """

    tensor: np.ndarray
    lipschitz_bound: float
    ball_radius: float

    def __call__(self, x):
        return np.einsum("ijk,j,k->i", self.tensor, x, x)

    def jacobian(self, x):
        return 2.0 * np.einsum("ijk,k->ij", self.tensor, x)


def _tensor_operator_norm(tensor, rng, restarts=6, iters=40):
    """max over unit u of the spectral norm of tensor[:, :, u].

    Alternating power iteration with random restarts; the maximizer is a
    critical point of the trilinear form w^T T(u) v.
    """
    n = tensor.shape[0]
    best = 0.0
    for _ in range(restarts):
        u = rng.standard_normal(n)
        u /= np.linalg.norm(u)
        w = rng.standard_normal(n)
        w /= np.linalg.norm(w)
        v = rng.standard_normal(n)
        v /= np.linalg.norm(v)
        for _ in range(iters):
            w = np.einsum("ijk,j,k->i", tensor, v, u)
            w /= max(np.linalg.norm(w), 1e-300)
            v = np.einsum("ijk,i,k->j", tensor, w, u)
            v /= max(np.linalg.norm(v), 1e-300)
            u = np.einsum("ijk,i,j->k", tensor, w, v)
            nu = np.linalg.norm(u)
            u /= max(nu, 1e-300)
        best = max(best, float(np.einsum("ijk,i,j,k", tensor, w, v, u)))
    return best


def random_quadratic(system, k, ball_radius=1.0, seed=0):
    """Random symmetric quadratic map with Lipschitz bound k on the ball.

    The raw Gaussian tensor is rescaled so that the measured supremum of
    the Jacobian norm over the ball of ball_radius equals k.
    """
    if not k > 0 or not ball_radius > 0:
        raise InvalidOperand("Lipschitz bound and radius must be positive")
    n = system.dim
    rng = np.random.default_rng(seed)
    t = rng.standard_normal((n, n, n))
    t = 0.5 * (t + t.transpose(0, 2, 1))
    # Lipschitz constant on the ball: sup over |x| <= rho of |DQ(x)|,
    # and DQ(x) = 2 T(., ., x) is linear in x
    c = 2.0 * ball_radius * _tensor_operator_norm(t, rng)
    return QuadraticMap(tensor=(k / c) * t, lipschitz_bound=float(k),
                        ball_radius=float(ball_radius))


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution of dx/dt = Lx + Q(x) with norm bookkeeping."""

    times: np.ndarray
    states: np.ndarray
    norms: np.ndarray
    plus_norms: np.ndarray
    minus_norms: np.ndarray
    decaying: bool
    escaped: bool
    fitted_rate: Optional[float]
    ball_radius: float


def _fit_rate(times, norms):
    half = len(times) // 2
    t = times[half:]
    y = np.log(np.maximum(norms[half:], 1e-300))
    slope = np.polyfit(t, y, 1)[0]
    return float(-slope)


def integrate_flow(system, Q, x0, T, samples=201):
    """Integrate dx/dt = Lx + Q(x) from a FlowState over [0, T].

    Q may be None for the linear flow.  Trajectories that leave the
    quadratic map's calibration ball are reported as non-decaying and
    get no fitted rate.
    """
    if Q is not None and Q.lipschitz_bound >= system.mu / 2:
        raise InvalidOperand(
            "quadratic Lipschitz bound must stay below mu/2")
    if not isinstance(x0, FlowState):
        x0 = FlowState(np.asarray(x0, dtype=float))
    if Q is None:
        fun = lambda t, x: system.matvec(x)
    else:
        fun = lambda t, x: system.matvec(x) + Q(x)
    sol = solve_ivp(fun, (0.0, float(T)), x0.x, method="RK45",
                    t_eval=np.linspace(0.0, float(T), samples),
                    rtol=INTEGRATOR_RTOL, atol=INTEGRATOR_ATOL)
    if not sol.success:
        raise IntegratorError(sol.message)
    states = sol.y.T
    norms = np.linalg.norm(states, axis=1)
    plus = np.array([np.linalg.norm(system.project_plus(s)) for s in states])
    minus = np.array([np.linalg.norm(system.project_minus(s)) for s in states])
    radius = Q.ball_radius if Q is not None else math.inf
    escaped = bool(np.any(norms > radius))
    # a trajectory that has turned around (norm rising off its minimum)
    # is on its way out of the ball and counts as non-decaying
    turned = norms[-1] > 1.05 * float(np.min(norms))
    decaying = (not escaped) and (not turned) and norms[-1] < norms[0]
    rate = _fit_rate(sol.t, norms) if decaying else None
    return Trajectory(times=sol.t, states=states, norms=norms,
                      plus_norms=plus, minus_norms=minus, decaying=decaying,
                      escaped=escaped, fitted_rate=rate, ball_radius=radius)


@dataclass(frozen=True)
class GapCheck:
    monotone: bool
    dominance: Optional[bool]

    @property
    def ok(self):
        return self.monotone and self.dominance is not False


def monotone_gap_check(traj, tol=1e-7):
    """Check growth of |x+| - |x-| and, on decaying runs, |x+| <= |x-|.

    Works purely on the trajectory's sampled norms, so hand-built
    trajectories can serve as negative controls.  Returns a GapCheck;
    dominance is None for non-decaying trajectories.
    """
    gap = traj.plus_norms - traj.minus_norms
    slack = tol * max(1.0, float(np.max(np.abs(gap))))
    monotone = bool(np.all(np.diff(gap) >= -slack))
    dominance = None
    if traj.decaying:
        scale = max(1.0, float(np.max(traj.minus_norms)))
        dominance = bool(np.all(traj.plus_norms
                                <= traj.minus_norms + tol * scale))
    return GapCheck(monotone=monotone, dominance=dominance)


def decay_trials(d=2, N=1, k_frac=0.1, trials=20, seed=0,
                 ball_radius=1.0, start_norm=0.01, horizon=None):
    """Seeded ensemble of quadratic perturbation runs.

    Each trial draws a fresh quadratic map with Lipschitz bound
    k = k_frac * mu and a random small start in B-, integrates over
    the horizon (default 2/mu), and records the fitted rate and the
    gap diagnostics.  Returns (system, list of (trajectory, GapCheck)).

    A generic start is not on the stable manifold: the quadratic
    coupling feeds the growing subspace at order k*|x0|^2, which takes
    over after roughly log(1/(k*|x0|))/(2*mu).  The default horizon
    and start norm keep the whole window well inside the decaying
    regime, so the ensemble exercises the rate bound rather than the
    escape branch.
    """
    system = build_mode_system(d, N)
    k = k_frac * system.mu
    T = 2.0 / system.mu if horizon is None else horizon
    out = []
    for i in range(trials):
        Q = random_quadratic(system, k, ball_radius, seed=seed + i)
        x0 = system.random_minus_state(seed=seed + 10_000 + i,
                                       norm=start_norm)
        traj = integrate_flow(system, Q, x0, T=T)
        out.append((traj, monotone_gap_check(traj)))
    return system, out
