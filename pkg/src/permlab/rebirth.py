"""Finite-state symmetric chains, rebirthed potentials, local-time simulation,
and the isomorphism check tying local times to chi-square vectors.

Everything here is exact finite linear algebra plus continuous-time jump
simulation.  Local times are occupation times divided by the reference
measure, so that the expected total local time started from x equals the
potential matrix row u(x, .), and summing local time against the measure
recovers elapsed time path by path as a pure bookkeeping identity.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from . import _linalg as la
from .sampling import philox, sample_chi_square

__all__ = [
    "FiniteChain",
    "RebirthExtension",
    "partial_rebirth_potential",
    "full_rebirth_potential",
    "PartialRebirthModel",
    "FullRebirthModel",
    "SimulationResult",
    "EKReport",
    "ek_identity_check",
    "chain_from_spec",
    "potential_from_spec",
]

_EVENT_CAP = 200_000


@dataclass
class FiniteChain:
    """Transient chain given by a killing generator Q and reference measure m.

    Q has nonnegative off-diagonal rates and nonpositive row sums; the row-sum
    deficit is the killing rate.  Symmetry of diag(m) @ Q is required so the
    potential matrix is symmetric.
    """

    Q: np.ndarray
    m: np.ndarray

    def __post_init__(self):
        self.Q = np.asarray(self.Q, dtype=float)
        self.m = np.asarray(self.m, dtype=float)
        n = self.Q.shape[0]
        if self.Q.shape != (n, n) or self.m.shape != (n,):
            raise ValueError("generator and measure shapes disagree")
        if np.any(self.m <= 0.0):
            raise ValueError("reference measure must be strictly positive")
        off = self.Q - np.diag(np.diag(self.Q))
        if np.any(off < 0.0):
            raise ValueError("off-diagonal rates must be nonnegative")
        if np.any(np.diag(self.Q) >= 0.0):
            raise ValueError("every state needs a positive holding rate")
        rowsum = np.sum(self.Q, axis=1)
        if np.any(rowsum > 1e-12):
            raise ValueError("generator row sums must be nonpositive")
        weighted = self.m[:, None] * self.Q
        if np.max(np.abs(weighted - weighted.T)) > 1e-10 * np.max(np.abs(weighted)):
            raise ValueError("chain is not symmetric with respect to m")

    @property
    def n_states(self) -> int:
        return self.Q.shape[0]

    @property
    def kill_rates(self) -> np.ndarray:
        return -np.sum(self.Q, axis=1)

    def occupation(self, rate: float = 0.0) -> np.ndarray:
        """Expected discounted occupation times (rate*I - Q)^-1."""
        n = self.n_states
        mat = rate * np.eye(n) - self.Q
        return np.asarray(la.inv(np.asarray(mat, dtype=la.LD)), dtype=float)

    def potential(self, rate: float = 0.0) -> np.ndarray:
        """Potential density matrix u(x, y) = occupation / m(y); symmetric."""
        if rate == 0.0 and np.all(self.kill_rates <= 1e-14):
            raise ValueError("conservative chain has no 0-potential")
        u = self.occupation(rate) / self.m[None, :]
        return 0.5 * (u + u.T)

    def killed(self, alpha: float) -> "FiniteChain":
        """The same chain killed at an extra exponential rate alpha."""
        return FiniteChain(self.Q - alpha * np.eye(self.n_states), self.m)


@dataclass
class RebirthExtension:
    """Potential of a partially reborn chain on states + return point."""

    u_ext: np.ndarray
    m_ext: np.ndarray
    f: np.ndarray
    mu: np.ndarray
    inverse_m_matrix_ok: bool


def partial_rebirth_potential(u: np.ndarray, mu: np.ndarray, m: np.ndarray,
                              *, warn_mass=None) -> RebirthExtension:
    """Extend the potential by a return point fed by the measure mu.

    f(y) = sum_x u(x, y) mu(x); the extension has u + f(y) on the base block,
    f(y) along the return-point row, and ones in the return-point column.
    Mass above 1 is allowed for analysis but flagged, since no transient
    process realizes it.
    """
    u = np.asarray(u, dtype=float)
    mu = np.asarray(mu, dtype=float)
    m = np.asarray(m, dtype=float)
    n = u.shape[0]
    if np.any(mu < 0.0):
        raise ValueError("rebirth measure must be nonnegative")
    if np.max(np.abs(u - u.T)) > 1e-10 * np.max(np.abs(u)):
        raise ValueError("potential matrix must be symmetric")
    if np.any(u <= 0.0):
        raise ValueError("potential matrix must be strictly positive")
    mass = float(np.sum(mu))
    if mass > 1.0 + 1e-12 and warn_mass is not None:
        warn_mass(mass)
    f = u.T @ mu
    ext = np.empty((n + 1, n + 1))
    ext[:n, :n] = u + f[None, :]
    ext[n, :n] = f
    ext[:n, n] = 1.0
    ext[n, n] = 1.0
    m_ext = np.concatenate([m, [1.0]])
    inv_ok = True
    if mass <= 1.0 + 1e-12 and mass > 0.0:
        a = np.asarray(la.inv(np.asarray(ext, dtype=la.LD)), dtype=float)
        scaled = a / np.abs(np.diag(a))[:, None]
        off = scaled - np.diag(np.diag(scaled))
        inv_ok = bool(np.max(off) <= 1e-10)
    return RebirthExtension(ext, m_ext, f, mu, inv_ok)


def full_rebirth_potential(u_p: np.ndarray, mu: np.ndarray, m: np.ndarray,
                           p: float) -> np.ndarray:
    """Resolvent density of the fully reborn process.

    w(x, y) = u_p(x, y) + (1/p - sum_z u_p(x, z) m(z)) f(y) / ||f||_1 with
    f(y) = sum_x u_p(x, y) mu(x).  Requires p * row-mass < 1 everywhere, and
    the output satisfies p * sum_y w(x, y) m(y) = 1 identically.
    """
    u_p = np.asarray(u_p, dtype=float)
    mu = np.asarray(mu, dtype=float)
    m = np.asarray(m, dtype=float)
    if p <= 0.0:
        raise ValueError("resolvent rate must be positive")
    if abs(float(np.sum(mu)) - 1.0) > 1e-12:
        raise ValueError("full rebirth needs a probability measure")
    row_mass = u_p @ m
    if np.any(p * row_mass >= 1.0):
        raise ValueError("p * potential mass reaches 1: inconsistent base")
    f = u_p.T @ mu
    f_norm = float(f @ m)
    w = u_p + np.outer(1.0 / p - row_mass, f / f_norm)
    return w


def chain_from_spec(spec: dict) -> tuple[FiniteChain, np.ndarray, dict]:
    """Parse the model JSON for simulation: needs a generator.

    The schema also admits a bare potential matrix (see potential_from_spec),
    but holding rates cannot be recovered from it, so simulation commands
    insist on the generator form.
    """
    _validate_model_fields(spec)
    if "generator" not in spec:
        raise ValueError("simulation needs a 'generator'; a potential matrix "
                         "alone has no holding rates")
    chain = FiniteChain(np.asarray(spec["generator"], float),
                        np.asarray(spec["m"], float))
    mu = np.asarray(spec["mu"], dtype=float)
    extras = {k: spec[k] for k in ("p", "alpha") if k in spec}
    return chain, mu, extras


def potential_from_spec(spec: dict) -> tuple[np.ndarray, np.ndarray, np.ndarray, dict]:
    """(u, m, mu, extras) from a model given by a generator or a potential."""
    _validate_model_fields(spec)
    m = np.asarray(spec["m"], dtype=float)
    mu = np.asarray(spec["mu"], dtype=float)
    extras = {k: spec[k] for k in ("p", "alpha") if k in spec}
    if "potential" in spec:
        u = np.asarray(spec["potential"], dtype=float)
        if np.max(np.abs(u - u.T)) > 1e-10 * np.max(np.abs(u)):
            raise ValueError("potential matrix must be symmetric")
        return u, m, mu, extras
    chain = FiniteChain(np.asarray(spec["generator"], float), m)
    return chain.potential(), m, mu, extras


def _validate_model_fields(spec: dict):
    required = {"states", "m", "mu"}
    allowed = required | {"generator", "potential", "p", "alpha"}
    extra = set(spec) - allowed
    if extra:
        raise ValueError(f"unknown fields in model spec: {sorted(extra)}")
    missing = required - set(spec)
    if missing:
        raise ValueError(f"model spec missing fields: {sorted(missing)}")
    if "generator" not in spec and "potential" not in spec:
        raise ValueError("model spec needs a 'generator' or a 'potential'")


@dataclass
class SimulationResult:
    local_times: np.ndarray      # (paths, states + 1), return point last
    elapsed: np.ndarray          # (paths,)
    occupation_error: np.ndarray  # |sum L*m - elapsed| per path
    events: int


@dataclass
class PartialRebirthModel:
    chain: FiniteChain
    mu: np.ndarray

    def __post_init__(self):
        self.mu = np.asarray(self.mu, dtype=float)
        if np.any(self.mu < 0.0):
            raise ValueError("rebirth measure must be nonnegative")
        if float(np.sum(self.mu)) > 1.0 + 1e-12:
            raise ValueError("simulation needs rebirth mass at most 1")

    def extension(self) -> RebirthExtension:
        u = self.chain.potential()
        return partial_rebirth_potential(u, self.mu, self.chain.m)

    def simulate(self, x_start: int, n_paths: int, seed: int,
                 event_cap: int = _EVENT_CAP) -> SimulationResult:
        """Jump-chain simulation with local-time accumulation.

        The chain runs until absorption; at each death of the base chain the
        path visits the return point, waits an exponential time with rate
        1 + |mu|, and either re-enters with law mu or dies for good.
        """
        chain = self.chain
        n = chain.n_states
        star = n
        dead = -1
        mass = float(np.sum(self.mu))
        hold_rate = np.concatenate([-np.diag(chain.Q), [1.0 + mass]])
        m_ext = np.concatenate([chain.m, [1.0]])

        # per-state transition tables over targets (states..., star, dead)
        table = np.zeros((n + 1, n + 2))
        for x in range(n):
            rate = hold_rate[x]
            for y in range(n):
                if y != x:
                    table[x, y] = chain.Q[x, y] / rate
            table[x, star] = chain.kill_rates[x] / rate
        table[star, :n] = self.mu / (1.0 + mass)
        table[star, n + 1] = 1.0 / (1.0 + mass)
        table /= np.sum(table, axis=1, keepdims=True)
        cumtable = np.cumsum(table, axis=1)

        rng = philox(seed)
        state = np.full(n_paths, x_start, dtype=np.int64)
        L = np.zeros((n_paths, n + 1))
        elapsed = np.zeros(n_paths)
        alive = state != dead
        events = 0
        while np.any(alive):
            if events > event_cap:
                raise RuntimeError(
                    f"path did not terminate within {event_cap} events; "
                    f"{int(np.sum(alive))} paths alive")
            idx = np.nonzero(alive)[0]
            s = state[idx]
            hold = rng.exponential(1.0, size=len(idx)) / hold_rate[s]
            np.add.at(L, (idx, s), hold / m_ext[s])
            elapsed[idx] += hold
            u = rng.random(len(idx))
            nxt = (u[:, None] > cumtable[s]).sum(axis=1)
            state[idx] = np.where(nxt == n + 1, dead, nxt)
            alive = state != dead
            events += 1
        occ_err = np.abs(L @ m_ext - elapsed)
        return SimulationResult(L, elapsed, occ_err, events)


@dataclass
class FullRebirthModel:
    """Chain reborn with probability one, observed up to an independent
    exponential clock of rate p.

    The expected local time accumulated before the clock rings reproduces the
    resolvent-rate potential of the reborn process.
    """

    chain: FiniteChain
    mu: np.ndarray
    p: float

    def __post_init__(self):
        self.mu = np.asarray(self.mu, dtype=float)
        if abs(float(np.sum(self.mu)) - 1.0) > 1e-12 or np.any(self.mu < 0.0):
            raise ValueError("full rebirth needs a probability measure")
        if self.p <= 0.0:
            raise ValueError("observation rate must be positive")
        if np.all(self.chain.kill_rates <= 1e-14):
            raise ValueError("base chain never dies, so rebirth is vacuous")

    def potential(self) -> np.ndarray:
        u_p = self.chain.potential(rate=self.p)
        return full_rebirth_potential(u_p, self.mu, self.chain.m, self.p)

    def simulate(self, x_start: int, n_paths: int, seed: int,
                 event_cap: int = _EVENT_CAP) -> SimulationResult:
        """Local times until the rate-p clock; deaths restart at mu.

        The clock is drawn once per path and the final holding interval is
        truncated at it, so the identity sum L * m = elapsed still holds
        exactly path by path.
        """
        chain = self.chain
        n = chain.n_states
        hold_rate = -np.diag(chain.Q)
        jump = np.zeros((n, n + 1))          # targets: states..., rebirth
        for x in range(n):
            for y in range(n):
                if y != x:
                    jump[x, y] = chain.Q[x, y] / hold_rate[x]
            jump[x, n] = chain.kill_rates[x] / hold_rate[x]
        jump /= np.sum(jump, axis=1, keepdims=True)
        cumjump = np.cumsum(jump, axis=1)

        rng = philox(seed)
        clock = rng.exponential(1.0 / self.p, size=n_paths)
        state = np.full(n_paths, x_start, dtype=np.int64)
        L = np.zeros((n_paths, n))
        elapsed = np.zeros(n_paths)
        alive = np.ones(n_paths, dtype=bool)
        events = 0
        mu_cum = np.cumsum(self.mu)
        while np.any(alive):
            if events > event_cap:
                raise RuntimeError("full-rebirth simulation exceeded the "
                                   f"event cap with {int(np.sum(alive))} alive")
            idx = np.nonzero(alive)[0]
            s = state[idx]
            hold = rng.exponential(1.0, size=len(idx)) / hold_rate[s]
            over = elapsed[idx] + hold > clock[idx]
            hold = np.where(over, clock[idx] - elapsed[idx], hold)
            np.add.at(L, (idx, s), hold / chain.m[s])
            elapsed[idx] += hold
            alive[idx[over]] = False
            live = idx[~over]
            if len(live):
                nxt = (rng.random(len(live))[:, None]
                       > cumjump[state[live]]).sum(axis=1)
                reborn = nxt == n
                if np.any(reborn):
                    draws = (rng.random(int(np.sum(reborn)))[:, None]
                             > mu_cum[None, :]).sum(axis=1)
                    nxt[reborn] = draws
                state[live] = nxt
            events += 1
        occ_err = np.abs(L @ chain.m - elapsed)
        return SimulationResult(L, elapsed, occ_err, events)


@dataclass
class EKReport:
    lhs: float
    rhs: float
    z: float
    lhs_se: float
    rhs_se: float


def _simulate_conditioned(chain: FiniteChain, y: int, n_paths: int,
                          seed: int, event_cap: int = _EVENT_CAP) -> np.ndarray:
    """Local times of the chain reweighted by its potential column at y.

    Transition probabilities are tilted by h = u(., y); the tilt removes all
    killing except an extra death channel at y itself with rate
    1/(m(y) h(y)), which is the exact finite-state form of the conditioned
    process entering the isomorphism identity.
    """
    n = chain.n_states
    u = chain.potential()
    h = u[:, y]
    if np.any(h <= 0.0):
        raise ValueError("potential column vanishes: chain not irreducible enough")
    hold_rate = -np.diag(chain.Q)
    dead = -1
    table = np.zeros((n, n + 1))
    for x in range(n):
        for z_ in range(n):
            if z_ != x:
                table[x, z_] = chain.Q[x, z_] * h[z_] / (hold_rate[x] * h[x])
        if x == y:
            table[x, n] = 1.0 / (chain.m[y] * h[y] * hold_rate[y])
    table = np.clip(table, 0.0, None)
    table /= np.sum(table, axis=1, keepdims=True)
    cumtable = np.cumsum(table, axis=1)

    rng = philox(seed)
    state = np.full(n_paths, y, dtype=np.int64)
    L = np.zeros((n_paths, n))
    alive = state != dead
    events = 0
    while np.any(alive):
        if events > event_cap:
            raise RuntimeError("conditioned path did not terminate")
        idx = np.nonzero(alive)[0]
        s = state[idx]
        hold = rng.exponential(1.0, size=len(idx)) / hold_rate[s]
        np.add.at(L, (idx, s), hold / chain.m[s])
        nxt = (rng.random(len(idx))[:, None] > cumtable[s]).sum(axis=1)
        state[idx] = np.where(nxt == n, dead, nxt)
        alive = state != dead
        events += 1
    return L


def ek_identity_check(chain: FiniteChain, y: int, F, n_paths: int,
                      seed: int) -> EKReport:
    """Monte Carlo check of the local-time isomorphism on a finite chain.

    Left side: F applied to local times of the conditioned chain plus an
    independent chi-square vector of order 1 with the potential as kernel.
    Right side: F under the chi-square law reweighted by 2 X(y) / u(y, y).
    Both sides use independent streams; the z-score compares the two means.
    """
    v = chain.potential()
    L = _simulate_conditioned(chain, y, n_paths, seed)
    x_left = sample_chi_square(v, 1, n_paths, seed + 1)
    lhs_samples = np.asarray(F(L + x_left), dtype=float)
    x_right = sample_chi_square(v, 1, n_paths, seed + 2)
    weights = 2.0 * x_right[:, y] / v[y, y]
    rhs_samples = weights * np.asarray(F(x_right), dtype=float)
    lhs = float(np.mean(lhs_samples))
    rhs = float(np.mean(rhs_samples))
    lhs_se = float(np.std(lhs_samples, ddof=1) / sqrt(n_paths))
    rhs_se = float(np.std(rhs_samples, ddof=1) / sqrt(n_paths))
    denom = sqrt(lhs_se ** 2 + rhs_se ** 2)
    z = 0.0 if denom == 0.0 else (lhs - rhs) / denom
    return EKReport(lhs, rhs, z, lhs_se, rhs_se)
