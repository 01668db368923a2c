"""Interferometric realization of the optimal instrument family, with a
shot-noise simulator and the reconstruction pipeline for the error and
disturbance estimates.

A polarization qubit traverses a two-path interferometer whose path state
is prepared as |phi0> = cos(a)|A> + e^{i phi} sin(a)|B>.  One arm applies
a polarization-dependent phase (interaction U), then a balanced output
splitter with the real symmetric convention

    <C| = (<A| + <B|)/sqrt(2),   <D| = (<A| - <B|)/sqrt(2)

produces the two outcome ports.  The Kraus operator of port P is the
partial inner product K_P = <P| U |phi0> (taken on the path factor), which
is normalized by construction.  The interaction is fixed to

    U = 1 (x) |A><A|  -  i sigma_z (x) |B><B|

(polarization slow factor); with this sign and arm assignment the
instrument parameters come out as

    gamma = sin(2 a) sin(phi),
    beta  = atan2(sin(2 a) cos(phi), cos(2 a)),

and shifting phi by pi exchanges the two ports exactly, so a single
physical port measured at phi and phi + pi realizes both outcomes.

Dataset generation is deterministic given (config, seed): every (state,
port) cell draws from its own substream keyed by the state index and the
port's reduced phase, which makes the phi <-> phi + pi port swap an exact
identity at the count level.  Estimators are pure functions of datasets.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize

from .instruments import Instrument, povm_of, validate_instrument
from .measures import (
    diagonal_channel_disturbance_exact,
    measurement_error_exact,
)
from .qmath import ID2, SIGMA_X, SIGMA_Y, SIGMA_Z
from .states import density_to_bloch, linear_pol_state, sm7_state_list
from .supopt import DegenerateFit, parabolic_refine

__all__ = [
    "InsufficientCounts",
    "BS_CONVENTION",
    "InterferometerSetting",
    "ExperimentConfig",
    "Record",
    "SimulatedDataset",
    "BranchEstimate",
    "EstimatedTradeoff",
    "gamma_beta_from_setting",
    "instrument_from_setting",
    "analytic_tradeoff_of_setting",
    "simulate_dataset",
    "reconstruct_branch_states",
    "estimate_delta",
    "estimate_Delta",
    "estimate_tradeoff",
    "dataset_to_json",
    "dataset_from_json",
]

BS_CONVENTION = "real-symmetric-bs/phase-in-arm-B"

_BASES = ("x", "y", "z")

# Output-port bras in the (A, B) path basis.
_PORTS = {
    1: np.array([1.0, 1.0]) / np.sqrt(2.0),
    2: np.array([1.0, -1.0]) / np.sqrt(2.0),
}


class InsufficientCounts(ValueError):
    """Raised when a dataset lacks the counts needed for reconstruction."""


@dataclass(frozen=True)
class InterferometerSetting:
    """Interferometer knobs: splitting angle alpha and relative phase phi."""

    alpha: float
    phi: float
    convention: str = BS_CONVENTION

    def __post_init__(self):
        if not (0.0 <= self.alpha <= 0.5 * np.pi):
            raise ValueError(f"alpha = {self.alpha} outside [0, pi/2]")
        if self.convention != BS_CONVENTION:
            raise ValueError(f"unsupported convention {self.convention!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    """Simulation run description.

    ``shots_per_basis`` is the per-analyzer-setting sample count; ``None``
    selects the exact (infinite-statistics) mode, in which the dataset
    stores expected frequencies instead of integer counts.
    ``intensity_noise`` is the relative std of a Gaussian factor applied
    to the port intensities.  ``fit_amplitude`` switches the target-curve
    fit from offset-only to offset plus amplitude.
    """

    setting: InterferometerSetting
    thetas: tuple = None
    shots_per_basis: int | None = 10**6
    intensity_noise: float = 0.0
    seed: int = 0
    fit_amplitude: bool = False

    def __post_init__(self):
        thetas = self.thetas
        if thetas is None:
            thetas = tuple(sm7_state_list())
        object.__setattr__(self, "thetas", tuple(float(t) for t in thetas))
        if len(self.thetas) == 0:
            raise ValueError("thetas must be non-empty")
        if self.shots_per_basis is not None and self.shots_per_basis < 1:
            raise ValueError(
                f"shots_per_basis = {self.shots_per_basis} must be >= 1")
        if self.intensity_noise < 0.0:
            raise ValueError("intensity_noise must be >= 0")


@dataclass(frozen=True)
class Record:
    """Counts of one (state, port, analysis basis) cell."""

    theta_deg: float
    port: int
    basis: str
    n_plus: float
    n_minus: float
    intensity: float


@dataclass(frozen=True)
class SimulatedDataset:
    config: ExperimentConfig
    records: tuple


@dataclass(frozen=True)
class BranchEstimate:
    """Reconstructed conditional state and probability of one port."""

    rho: np.ndarray
    probability: float


@dataclass(frozen=True)
class EstimatedTradeoff:
    delta_hat: float
    Delta_hat: float
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (-1e-12 <= self.delta_hat <= 1.0 + 1e-12):
            raise ValueError(f"delta_hat = {self.delta_hat} outside [0, 1]")
        if not (-1e-12 <= self.Delta_hat <= 1.0 + 1e-12):
            raise ValueError(f"Delta_hat = {self.Delta_hat} outside [0, 1]")


# ---------------------------------------------------------------------------
# Setting -> instrument
# ---------------------------------------------------------------------------

def gamma_beta_from_setting(s: InterferometerSetting):
    """Instrument parameters (gamma, beta) realized by a setting.

    beta is evaluated with the two-argument arctangent of the Kraus
    coefficient components, which stays finite where tan(2 alpha) blows
    up.  |gamma| <= 1 always; gamma is negative when the phase puts the
    majority weight on the other port.
    """
    two_a = 2.0 * s.alpha
    gamma = float(np.sin(two_a) * np.sin(s.phi))
    beta = float(np.arctan2(np.sin(two_a) * np.cos(s.phi), np.cos(two_a)))
    return gamma, beta


def _interaction_unitary():
    proj_a = np.diag([1.0, 0.0]).astype(complex)
    proj_b = np.diag([0.0, 1.0]).astype(complex)
    return np.kron(ID2, proj_a) + np.kron(-1j * SIGMA_Z, proj_b)


def instrument_from_setting(s: InterferometerSetting) -> Instrument:
    """Kraus pair realized by the interferometer at a given setting.

    K_P = <P| U |phi0> on the path factor; port C (symmetric output) is
    outcome 1.  The pair is normalized to rounding error and agrees with
    the optimal family at (gamma, beta) from
    :func:`gamma_beta_from_setting` up to a global phase per Kraus
    operator (for gamma >= 0).
    """
    phi0 = np.array([np.cos(s.alpha), np.exp(1j * s.phi) * np.sin(s.alpha)])
    u = _interaction_unitary().reshape(2, 2, 2, 2)
    gamma, beta = gamma_beta_from_setting(s)
    kraus = []
    for port in (1, 2):
        bra = _PORTS[port]
        k = np.einsum("r,prqs,s->pq", bra.conj(), u, phi0)
        kraus.append(k)
    label = {"family": "interferometer", "alpha": s.alpha, "phi": s.phi,
             "gamma": gamma, "beta": beta}
    return validate_instrument(kraus[0], kraus[1], label)


def analytic_tradeoff_of_setting(s: InterferometerSetting):
    """Exact (delta, Delta) of the instrument realized at a setting."""
    ins = instrument_from_setting(s)
    return (measurement_error_exact(povm_of(ins)),
            diagonal_channel_disturbance_exact(ins))


# ---------------------------------------------------------------------------
# Simulation
# ---------------------------------------------------------------------------

def _port_stream(seed, theta_index, phase):
    # Key the substream by the port's reduced phase so that the
    # phi <-> phi + pi port exchange maps streams onto each other.
    reduced = float(phase) % (2.0 * np.pi)
    key = int(round(reduced * 1e12)) % (2**63)
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(theta_index, key))
    return np.random.Generator(np.random.PCG64(ss))


def _branch(ins, rho, port):
    k = ins.k1 if port == 1 else ins.k2
    out = k @ rho @ k.conj().T
    p = float(np.trace(out).real)
    if p > 1e-12:
        return out / p, p
    return 0.5 * ID2, max(p, 0.0)


def simulate_dataset(cfg: ExperimentConfig) -> SimulatedDataset:
    """Generate per-(state, port, basis) counts for the configured run.

    For each prepared state the two port branches are sampled in the
    three Pauli analysis bases with ``shots_per_basis`` samples each, and
    a separate intensity count measures the port probability.  Exact mode
    (``shots_per_basis=None``) stores expected frequencies.  Deterministic
    given the config.
    """
    ins = instrument_from_setting(cfg.setting)
    exact = cfg.shots_per_basis is None
    n = cfg.shots_per_basis
    records = []
    for ti, theta in enumerate(cfg.thetas):
        rho = linear_pol_state(theta)
        for port in (1, 2):
            branch_rho, p = _branch(ins, rho, port)
            bloch = density_to_bloch(branch_rho)
            rng = None
            if not exact:
                rng = _port_stream(cfg.seed, ti, cfg.setting.phi + (port - 1) * np.pi)
            plus_probs = np.clip(0.5 * (1.0 + bloch), 0.0, 1.0)
            cells = []
            for b, pp in zip(_BASES, plus_probs):
                if exact:
                    cells.append((b, pp, 1.0 - pp))
                else:
                    n_plus = int(rng.binomial(n, pp))
                    cells.append((b, n_plus, n - n_plus))
            if exact:
                intensity = p
            else:
                intensity = int(rng.binomial(n, np.clip(p, 0.0, 1.0)))
                if cfg.intensity_noise > 0.0:
                    factor = 1.0 + rng.normal(0.0, cfg.intensity_noise)
                    intensity = max(0, int(round(intensity * factor)))
            for b, n_plus, n_minus in cells:
                records.append(Record(theta, port, b, n_plus, n_minus, intensity))
    return SimulatedDataset(cfg, tuple(records))


# ---------------------------------------------------------------------------
# Reconstruction
# ---------------------------------------------------------------------------

def _eigh2(h):
    # Spectral decomposition of a 2x2 Hermitian matrix, by hand.
    a = h[0, 0].real
    c = h[1, 1].real
    b = h[0, 1]
    mid = 0.5 * (a + c)
    r = np.hypot(0.5 * (a - c), abs(b))
    lam_hi, lam_lo = mid + r, mid - r
    if r < 1e-15:
        return (lam_hi, lam_lo), (np.array([1.0, 0.0], dtype=complex),
                                  np.array([0.0, 1.0], dtype=complex))
    if abs(b) < 1e-15:
        if a >= c:
            v_hi = np.array([1.0, 0.0], dtype=complex)
            v_lo = np.array([0.0, 1.0], dtype=complex)
        else:
            v_hi = np.array([0.0, 1.0], dtype=complex)
            v_lo = np.array([1.0, 0.0], dtype=complex)
        return (lam_hi, lam_lo), (v_hi, v_lo)
    v_hi = np.array([b, lam_hi - a], dtype=complex)
    v_hi /= np.linalg.norm(v_hi)
    v_lo = np.array([-np.conj(v_hi[1]), np.conj(v_hi[0])])
    return (lam_hi, lam_lo), (v_hi, v_lo)


def _project_to_density(h):
    # Eigenvalue truncation and renormalization onto the state space.
    (lam_hi, lam_lo), (v_hi, v_lo) = _eigh2(h)
    w_hi, w_lo = max(lam_hi, 0.0), max(lam_lo, 0.0)
    total = w_hi + w_lo
    if total <= 0.0:
        return 0.5 * ID2
    out = (w_hi * np.outer(v_hi, v_hi.conj())
           + w_lo * np.outer(v_lo, v_lo.conj())) / total
    return 0.5 * (out + out.conj().T)


def reconstruct_branch_states(d: SimulatedDataset):
    """Linear-inversion tomography of every (state, port) branch.

    Returns a dict mapping (theta_deg, port) to a :class:`BranchEstimate`.
    Pauli expectations come from the per-basis count asymmetries; if the
    inverted matrix has a negative eigenvalue it is projected back to the
    closest state by eigenvalue truncation.  Port probabilities are the
    normalized intensities.  Raises :class:`InsufficientCounts` if any
    basis of any branch has zero total counts.
    """
    cells = {}
    intensities = {}
    for r in d.records:
        cells[(r.theta_deg, r.port, r.basis)] = (r.n_plus, r.n_minus)
        intensities[(r.theta_deg, r.port)] = r.intensity

    out = {}
    for theta in d.config.thetas:
        total_i = sum(intensities.get((theta, port), 0.0) for port in (1, 2))
        if total_i <= 0.0:
            raise InsufficientCounts(f"no intensity recorded at theta = {theta}")
        for port in (1, 2):
            means = []
            for b in _BASES:
                try:
                    n_plus, n_minus = cells[(theta, port, b)]
                except KeyError:
                    raise InsufficientCounts(
                        f"missing basis {b!r} at theta = {theta}, port {port}")
                tot = n_plus + n_minus
                if tot <= 0:
                    raise InsufficientCounts(
                        f"zero shots in basis {b!r} at theta = {theta}, port {port}")
                means.append((n_plus - n_minus) / tot)
            rho = 0.5 * (ID2 + means[0] * SIGMA_X + means[1] * SIGMA_Y
                         + means[2] * SIGMA_Z)
            lam_lo = 0.5 * (rho[0, 0].real + rho[1, 1].real) - np.hypot(
                0.5 * (rho[0, 0].real - rho[1, 1].real), abs(rho[0, 1]))
            if lam_lo < 0.0:
                rho = _project_to_density(rho)
            p = intensities[(theta, port)] / total_i
            out[(theta, port)] = BranchEstimate(rho, float(p))
    return out


def _channel_output(branches, theta):
    b1 = branches[(theta, 1)]
    b2 = branches[(theta, 2)]
    return b1.probability * b1.rho + b2.probability * b2.rho


# ---------------------------------------------------------------------------
# Estimation
# ---------------------------------------------------------------------------

def _target_model(thetas_deg, theta0_deg, amplitude):
    ang = np.deg2rad(np.asarray(thetas_deg) - theta0_deg)
    return 0.5 * (1.0 + amplitude * np.cos(ang))


def _fit_target(thetas_deg, p1_hat):
    """Locate the target-measurement orientation theta0.

    The measured curve is fitted with the instrument's own probability
    model (1 + A cos(theta - theta0)) / 2, amplitude and offset free;
    this identifies the measurement axis even for weakly informative
    instruments, where fitting the unit-amplitude ideal curve directly
    would rotate the axis to soak up the amplitude mismatch.  For fixed
    theta0 the optimal amplitude is linear least squares in closed form.
    Returns (theta0 in [0, 360), fitted amplitude in [0, 1]).
    """
    thetas_deg = np.asarray(thetas_deg)
    p1_hat = np.asarray(p1_hat)
    resid = p1_hat - 0.5

    def best_amp(t0):
        c = np.cos(np.deg2rad(thetas_deg - t0))
        denom = np.sum(c * c)
        if denom <= 0.0:
            return 0.0
        return float(min(max(2.0 * np.sum(resid * c) / denom, 0.0), 1.0))

    def sse(t0, amp):
        return float(np.sum(
            (p1_hat - _target_model(thetas_deg, t0, amp)) ** 2))

    scan = np.arange(0.0, 360.0, 0.25)
    costs = [sse(t0, best_amp(t0)) for t0 in scan]
    t0 = float(scan[int(np.argmin(costs))])

    res = minimize(lambda x: sse(x[0], best_amp(x[0])), np.array([t0]),
                   method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-18, "maxiter": 400})
    theta0 = float(res.x[0]) % 360.0
    return theta0, best_amp(theta0)


def _parabola_near_max(thetas, values, window_deg=25.0):
    thetas = np.asarray(thetas)
    values = np.asarray(values)
    i_max = int(np.argmax(values))
    mask = np.abs(thetas - thetas[i_max]) <= window_deg
    if np.count_nonzero(mask) < 3:
        return None
    try:
        est = parabolic_refine(np.column_stack([thetas[mask], values[mask]]))
    except DegenerateFit:
        return None
    sample_max = float(values[i_max])
    gap = est.value - sample_max
    return {
        "vertex_theta_deg": float(est.params[0]),
        "vertex_value": est.value,
        "gap": float(gap),
        "rel_gap": float(gap / sample_max) if sample_max > 0.0 else 0.0,
    }


def estimate_delta(d: SimulatedDataset):
    """Measurement-error estimate from a dataset.

    The best fitting target measurement is the ideal projective curve
    p1(theta) = cos^2((theta - theta0)/2) at the orientation theta0
    identified by the least-squares fit of :func:`_fit_target`; the
    estimate is the largest outcome-distribution distance over the
    prepared states.  With ``fit_amplitude`` set, the comparison curve
    keeps the fitted amplitude instead of the ideal unit amplitude (a
    diagnostic mode).  A parabolic fit around the extremal state bounds
    the finite-sampling systematic.

    Returns (delta_hat, diagnostics dict).
    """
    branches = reconstruct_branch_states(d)
    thetas = np.asarray(d.config.thetas)
    p1_hat = np.array([branches[(t, 1)].probability for t in thetas])
    theta0, amp = _fit_target(thetas, p1_hat)
    ref_amp = amp if d.config.fit_amplitude else 1.0
    devs = np.abs(p1_hat - _target_model(thetas, theta0, ref_amp))
    i_max = int(np.argmax(devs))
    diag = {
        "theta0_deg": theta0,
        "amplitude": amp,
        "argmax_theta_deg": float(thetas[i_max]),
        "parabola": _parabola_near_max(thetas, devs),
    }
    return float(devs[i_max]), diag


def estimate_Delta(d: SimulatedDataset):
    """Disturbance estimate from a dataset.

    The channel output at each prepared state is the intensity-weighted
    sum of the reconstructed branch states; the estimate is the largest
    trace distance to the corresponding input state.  A parabolic fit
    around the maximum reports the vertex-vs-sample gap.

    Returns (Delta_hat, diagnostics dict).
    """
    branches = reconstruct_branch_states(d)
    thetas = np.asarray(d.config.thetas)
    dists = []
    for t in thetas:
        diff = _channel_output(branches, t) - linear_pol_state(t)
        a = diff[0, 0].real
        c = diff[1, 1].real
        r = np.hypot(0.5 * (a - c), abs(diff[0, 1]))
        mid = 0.5 * (a + c)
        dists.append(0.5 * (abs(mid + r) + abs(mid - r)))
    dists = np.asarray(dists)
    i_max = int(np.argmax(dists))
    diag = {
        "argmax_theta_deg": float(thetas[i_max]),
        "parabola": _parabola_near_max(thetas, dists),
    }
    return float(dists[i_max]), diag


def estimate_tradeoff(d: SimulatedDataset) -> EstimatedTradeoff:
    """Full pipeline: both estimates plus fit diagnostics."""
    delta_hat, ddiag = estimate_delta(d)
    Delta_hat, Ddiag = estimate_Delta(d)
    return EstimatedTradeoff(delta_hat, Delta_hat,
                             {"delta": ddiag, "Delta": Ddiag})


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def _config_to_dict(cfg: ExperimentConfig):
    return {
        "alpha": cfg.setting.alpha,
        "phi": cfg.setting.phi,
        "convention": cfg.setting.convention,
        "thetas": list(cfg.thetas),
        "shots_per_basis": "exact" if cfg.shots_per_basis is None
                           else cfg.shots_per_basis,
        "intensity_noise": cfg.intensity_noise,
        "seed": cfg.seed,
        "fit_amplitude": cfg.fit_amplitude,
    }


def _record_to_dict(r: Record):
    return {
        "theta_deg": r.theta_deg,
        "port": r.port,
        "basis": r.basis,
        "n_plus": r.n_plus,
        "n_minus": r.n_minus,
        "intensity": r.intensity,
    }


def dataset_to_json(d: SimulatedDataset) -> str:
    """Serialize a dataset with stable key order; counts stay integers in
    shot mode."""
    payload = {
        "config": _config_to_dict(d.config),
        "records": [_record_to_dict(r) for r in d.records],
    }
    return json.dumps(payload, indent=2) + "\n"


def config_from_dict(obj, path="config") -> ExperimentConfig:
    """Build an ExperimentConfig from a JSON-style dict with field-path
    error messages."""
    if not isinstance(obj, dict):
        raise ValueError(f"{path}: expected a JSON object")

    def number(name, default=None, lo=None, hi=None, required=False):
        if name not in obj:
            if required:
                raise ValueError(f"{path}.{name}: required field missing")
            return default
        v = obj[name]
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise ValueError(f"{path}.{name}: expected a number, got {v!r}")
        v = float(v)
        if lo is not None and not (lo <= v <= (hi if hi is not None else np.inf)):
            raise ValueError(f"{path}.{name}: value {v} out of range")
        return v

    alpha = number("alpha", required=True, lo=0.0, hi=0.5 * np.pi)
    phi = number("phi", required=True)
    setting = InterferometerSetting(alpha, phi)

    thetas = obj.get("thetas")
    if thetas is not None:
        if not isinstance(thetas, list) or not all(
                isinstance(t, (int, float)) and not isinstance(t, bool)
                for t in thetas):
            raise ValueError(f"{path}.thetas: expected a list of numbers")

    shots = obj.get("shots_per_basis", 10**6)
    if shots == "exact" or shots is None:
        shots = None
    elif isinstance(shots, int) and not isinstance(shots, bool) and shots >= 1:
        pass
    else:
        raise ValueError(
            f"{path}.shots_per_basis: expected a positive integer or 'exact', "
            f"got {shots!r}")

    noise = number("intensity_noise", default=0.0, lo=0.0)
    seed = obj.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ValueError(f"{path}.seed: expected an integer, got {seed!r}")
    fit_amplitude = obj.get("fit_amplitude", False)
    if not isinstance(fit_amplitude, bool):
        raise ValueError(f"{path}.fit_amplitude: expected a boolean")

    return ExperimentConfig(setting=setting, thetas=thetas,
                            shots_per_basis=shots, intensity_noise=noise,
                            seed=seed, fit_amplitude=fit_amplitude)


def dataset_from_json(text: str) -> SimulatedDataset:
    payload = json.loads(text)
    cfg = config_from_dict(payload.get("config"), "config")
    records = []
    for i, r in enumerate(payload.get("records", [])):
        try:
            records.append(Record(float(r["theta_deg"]), int(r["port"]),
                                  str(r["basis"]), r["n_plus"], r["n_minus"],
                                  r["intensity"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"records[{i}]: malformed record") from exc
    return SimulatedDataset(cfg, tuple(records))


def with_seed(cfg: ExperimentConfig, seed: int) -> ExperimentConfig:
    """Copy of a config with the seed replaced (reproducibility audits)."""
    return replace(cfg, seed=int(seed))
