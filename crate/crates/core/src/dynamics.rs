//! Exact single-excitation dynamics by spectral decomposition (ħ = 1):
//! `|Ψ(t)> = sum_n e^{-i E_n t} <φ_n|Ψ(0)> |φ_n>`.
//!
//! Functions taking a [`Spectrum`] work in raw time. The experiment-level
//! helpers ([`memory_report`], [`pst_run`], [`pst_scan`]) take and report
//! times in units of `1/Δ`, i.e. `t * Δ`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::chain::{build_hamiltonian, mirror_reflect, ChainSpec, Family};
use crate::disorder::{draw_onsite, DisorderConfig};
use crate::error::{Error, Result};
use crate::spectral::{band_label, eigendecompose, state_metadata, BandLabel, Parity, Spectrum};

const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum InjectionKind {
    /// Excitation placed on one site.
    Site(i64),
    /// Excitation placed in eigenstate `n`.
    Eigenstate(usize),
    /// Arbitrary normalized superposition.
    Custom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialState {
    kind: InjectionKind,
    amplitudes: Vec<Complex64>,
}

impl InitialState {
    pub fn site(spec: &ChainSpec, site: i64) -> Result<Self> {
        let index = spec
            .index_of(site)
            .ok_or_else(|| Error::InvalidArgument(format!("site {site} outside chain of {} sites", spec.n_sites)))?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); spec.n_sites];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(InitialState { kind: InjectionKind::Site(site), amplitudes })
    }

    pub fn eigenstate(s: &Spectrum, n: usize) -> Result<Self> {
        if n >= s.dim() {
            return Err(Error::InvalidArgument(format!("eigenstate {n} out of range for {} states", s.dim())));
        }
        let amplitudes = s.state(n).iter().map(|&c| Complex64::new(c, 0.0)).collect();
        Ok(InitialState { kind: InjectionKind::Eigenstate(n), amplitudes })
    }

    /// The in-gap eigenstate carrying the most weight on `site`.
    pub fn localized_at(s: &Spectrum, spec: &ChainSpec, site: i64) -> Result<Self> {
        let n = localized_state_index(s, spec, site)?;
        Self::eigenstate(s, n)
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !((norm - 1.0).abs() < NORM_TOL) {
            return Err(Error::InvalidArgument(format!("initial state must be normalized, norm is {norm}")));
        }
        Ok(InitialState { kind: InjectionKind::Custom, amplitudes })
    }

    pub fn kind(&self) -> InjectionKind {
        self.kind
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }
}

/// Index of the in-gap eigenstate with the largest occupancy on `site`.
pub fn localized_state_index(s: &Spectrum, spec: &ChainSpec, site: i64) -> Result<usize> {
    let index = spec
        .index_of(site)
        .ok_or_else(|| Error::InvalidArgument(format!("site {site} outside chain of {} sites", spec.n_sites)))?;
    (0..s.dim())
        .filter(|&n| band_label(s.energies()[n], spec) == BandLabel::InGap)
        .max_by(|&a, &b| s.occupancy(a, index).total_cmp(&s.occupancy(b, index)))
        .ok_or_else(|| Error::Structural("no in-gap state found".into()))
}

/// Precomputed expansion of an initial state in the eigenbasis.
#[derive(Debug, Clone)]
pub struct Propagator<'a> {
    spectrum: &'a Spectrum,
    coeffs: Vec<Complex64>,
    self_weights: Vec<f64>,
    mirror_weights: Vec<Complex64>,
}

impl<'a> Propagator<'a> {
    pub fn new(spectrum: &'a Spectrum, init: &InitialState) -> Result<Self> {
        let amps = init.amplitudes();
        if amps.len() != spectrum.dim() {
            return Err(Error::LengthMismatch { expected: spectrum.dim(), actual: amps.len() });
        }
        let mirror = mirror_reflect(amps);
        let project = |v: &[Complex64], phi: &[f64]| -> Complex64 { phi.iter().zip(v).map(|(p, a)| a * p).sum() };
        let coeffs: Vec<Complex64> = spectrum.states().iter().map(|phi| project(amps, phi)).collect();
        let mirror_coeffs: Vec<Complex64> = spectrum.states().iter().map(|phi| project(&mirror, phi)).collect();
        let self_weights = coeffs.iter().map(|c| c.norm_sqr()).collect();
        let mirror_weights = coeffs.iter().zip(&mirror_coeffs).map(|(a, b)| b.conj() * a).collect();
        Ok(Propagator { spectrum, coeffs, self_weights, mirror_weights })
    }

    fn phases(&self, t: f64) -> impl Iterator<Item = Complex64> + '_ {
        self.spectrum.energies().iter().map(move |&e| Complex64::from_polar(1.0, -e * t))
    }

    /// `<Ψ(0)|Ψ(t)>`.
    pub fn overlap(&self, t: f64) -> Complex64 {
        self.phases(t).zip(&self.self_weights).map(|(p, w)| p * w).sum()
    }

    /// `<MΨ(0)|Ψ(t)>` with `M` the mirror reflection.
    pub fn mirror_overlap(&self, t: f64) -> Complex64 {
        self.phases(t).zip(&self.mirror_weights).map(|(p, w)| p * w).sum()
    }

    pub fn fidelity(&self, t: f64) -> f64 {
        self.overlap(t).norm_sqr()
    }

    pub fn mirror_fidelity(&self, t: f64) -> f64 {
        self.mirror_overlap(t).norm_sqr()
    }

    /// Site amplitudes of `Ψ(t)`.
    pub fn state(&self, t: f64) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.spectrum.dim()];
        for ((p, c), phi) in self.phases(t).zip(&self.coeffs).zip(self.spectrum.states()) {
            let w = p * c;
            for (o, &x) in out.iter_mut().zip(phi) {
                *o += w * x;
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub overlap: Vec<(f64, f64)>,
    pub fidelity: Vec<f64>,
    pub mirror_fidelity: Vec<f64>,
    /// `arg <Ψ(0)|Ψ(t)>`, unwrapped along the sampled grid.
    pub phase: Vec<f64>,
}

impl Trajectory {
    pub fn mean_fidelity(&self) -> f64 {
        mean(&self.fidelity)
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Continuous phase from a sequence of wrapped angles.
pub fn unwrap_phase(wrapped: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    let mut prev_raw = 0.0;
    for (k, a) in wrapped.into_iter().enumerate() {
        if k == 0 {
            out.push(a);
        } else {
            let step = (a - prev_raw + PI).rem_euclid(2.0 * PI) - PI;
            let last = *out.last().unwrap();
            out.push(last + step);
        }
        prev_raw = a;
    }
    out
}

fn validate_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::InvalidArgument("times must be finite and non-negative".into()));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("times must be sorted".into()));
    }
    Ok(())
}

/// Evolves `init` and samples overlap, fidelity, mirror fidelity and phase
/// at each time. Exact given the spectrum; no time stepping.
pub fn evolve(s: &Spectrum, init: &InitialState, times: &[f64]) -> Result<Trajectory> {
    validate_times(times)?;
    let prop = Propagator::new(s, init)?;
    let overlap: Vec<Complex64> = times.iter().map(|&t| prop.overlap(t)).collect();
    let mirror_fidelity = times.iter().map(|&t| prop.mirror_fidelity(t)).collect();
    Ok(Trajectory {
        times: times.to_vec(),
        fidelity: overlap.iter().map(|z| z.norm_sqr()).collect(),
        phase: unwrap_phase(overlap.iter().map(|z| z.arg())),
        overlap: overlap.iter().map(|z| (z.re, z.im)).collect(),
        mirror_fidelity,
    })
}

/// `count` evenly spaced points on `[0, t_end]`.
pub fn uniform_times(t_end: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![0.0; count];
    }
    (0..count).map(|k| t_end * k as f64 / (count - 1) as f64).collect()
}

/// How the qubit is stored in the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Encoding {
    /// Excitation injected on a physical site.
    Site(i64),
    /// Excitation injected into the in-gap eigenstate localized on the
    /// given site; under disorder the perturbed eigenstate is used.
    Eigenstate(i64),
}

impl Encoding {
    /// Site 0 for the weak-centre chain, the left end for the strong-centre
    /// chain.
    pub fn default_anchor(spec: &ChainSpec) -> i64 {
        match spec.family {
            Family::WeakCenter => 0,
            Family::StrongCenter => -spec.half_len(),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Encoding::Site(_) => "site",
            Encoding::Eigenstate(_) => "eigenstate",
        }
    }

    fn initial_state(&self, s: &Spectrum, spec: &ChainSpec) -> Result<InitialState> {
        match *self {
            Encoding::Site(site) => InitialState::site(spec, site),
            Encoding::Eigenstate(site) => InitialState::localized_at(s, spec, site),
        }
    }
}

/// Quantum-memory summary of one encoding, optionally averaged over a
/// disorder ensemble.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MemoryReport {
    pub encoding: Encoding,
    pub e_scale: f64,
    pub realizations: usize,
    /// Sample times in `1/Δ` units.
    pub times: Vec<f64>,
    pub clean_fidelity: Vec<f64>,
    pub clean_phase: Vec<f64>,
    /// Ensemble-mean fidelity (the clean one without disorder).
    pub fidelity: Vec<f64>,
    /// Ensemble-mean unwrapped phase.
    pub phase: Vec<f64>,
    pub mean_fidelity: f64,
    pub min_fidelity: f64,
    pub max_fidelity: f64,
    /// Dominant angular frequency of the clean fidelity oscillation in raw
    /// time units; zero when the fidelity does not oscillate.
    pub dominant_frequency: f64,
    /// Least-squares slope of `phase` against raw time.
    pub phase_slope: f64,
    /// `max_t |phase - clean_phase|`.
    pub max_phase_deviation: f64,
}

/// Smallest sample count keeping `dt * max|E| < pi/4` for phase unwrapping.
pub fn min_samples_for_unwrap(horizon_raw: f64, max_energy: f64) -> usize {
    ((horizon_raw * max_energy / (PI / 4.0)).floor() as usize + 2).max(2)
}

struct Series {
    fidelity: Vec<f64>,
    phase: Vec<f64>,
}

fn run_series(spec: &ChainSpec, onsite: Option<&[f64]>, encoding: &Encoding, times_raw: &[f64]) -> Result<Series> {
    let s = eigendecompose(&build_hamiltonian(spec, onsite)?)?;
    let init = encoding.initial_state(&s, spec)?;
    let traj = evolve(&s, &init, times_raw)?;
    Ok(Series { fidelity: traj.fidelity, phase: traj.phase })
}

/// Fidelity and phase of a stored excitation over `[0, horizon]` (horizon
/// in `1/Δ` units).
pub fn memory_report(
    spec: &ChainSpec,
    encoding: Encoding,
    horizon: f64,
    samples: usize,
    disorder: Option<&DisorderConfig>,
) -> Result<MemoryReport> {
    spec.validate()?;
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidArgument(format!("horizon must be positive, got {horizon}")));
    }
    let horizon_raw = horizon / spec.strong;
    // bound on |E| for the unwrap criterion: bandwidth plus disorder
    let e_bound = spec.strong * 2f64.sqrt() + spec.weak + disorder.map_or(0.0, |d| d.e_scale * spec.strong / 2.0);
    let samples = samples.max(min_samples_for_unwrap(horizon_raw, e_bound));
    let times_raw = uniform_times(horizon_raw, samples);

    let clean = run_series(spec, None, &encoding, &times_raw)?;
    let (fidelity, phase, e_scale, realizations) = match disorder {
        Some(cfg) if cfg.e_scale > 0.0 => {
            cfg.validate()?;
            let runs: Vec<Series> = (0..cfg.realizations)
                .into_par_iter()
                .map(|r| {
                    let onsite = draw_onsite(spec, cfg, r)?;
                    run_series(spec, Some(&onsite), &encoding, &times_raw)
                        .map_err(|e| Error::Realization { realization: r, source: Box::new(e) })
                })
                .collect::<Result<_>>()?;
            let count = runs.len() as f64;
            let mut f = vec![0.0; samples];
            let mut p = vec![0.0; samples];
            for run in &runs {
                for k in 0..samples {
                    f[k] += run.fidelity[k];
                    p[k] += run.phase[k];
                }
            }
            f.iter_mut().for_each(|x| *x /= count);
            p.iter_mut().for_each(|x| *x /= count);
            (f, p, cfg.e_scale, cfg.realizations)
        }
        _ => (clean.fidelity.clone(), clean.phase.clone(), 0.0, 0),
    };

    let dt = times_raw[1] - times_raw[0];
    let max_phase_deviation = phase.iter().zip(&clean.phase).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(MemoryReport {
        encoding,
        e_scale,
        realizations,
        times: times_raw.iter().map(|t| t * spec.strong).collect(),
        mean_fidelity: mean(&fidelity),
        min_fidelity: fidelity.iter().copied().fold(f64::INFINITY, f64::min),
        max_fidelity: fidelity.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        dominant_frequency: dominant_frequency(&clean.fidelity, dt),
        phase_slope: linear_slope(&times_raw, &phase),
        max_phase_deviation,
        clean_fidelity: clean.fidelity,
        clean_phase: clean.phase,
        fidelity,
        phase,
    })
}

/// Angular frequency of the largest non-DC Fourier component of a
/// uniformly sampled series.
pub fn dominant_frequency(series: &[f64], dt: f64) -> f64 {
    let n = series.len();
    if n < 4 {
        return 0.0;
    }
    let m = mean(series);
    let mut buf: Vec<Complex64> = series.iter().map(|&x| Complex64::new(x - m, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let (best, power) = (1..n / 2).map(|j| (j, buf[j].norm_sqr())).fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
    if power <= f64::EPSILON * n as f64 {
        return 0.0;
    }
    2.0 * PI * best as f64 / (n as f64 * dt)
}

fn linear_slope(x: &[f64], y: &[f64]) -> f64 {
    let mx = mean(x);
    let my = mean(y);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Energy of the in-gap state localized on `site`, clean and under one
/// disorder realization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyShift {
    pub clean: f64,
    pub perturbed: f64,
    pub shift: f64,
    pub stays_in_gap: bool,
}

pub fn localized_energy_shift(
    spec: &ChainSpec,
    cfg: &DisorderConfig,
    realization: usize,
    site: i64,
) -> Result<EnergyShift> {
    let clean = eigendecompose(&build_hamiltonian(spec, None)?)?;
    let onsite = draw_onsite(spec, cfg, realization)?;
    let noisy = eigendecompose(&build_hamiltonian(spec, Some(&onsite))?)?;
    let e0 = clean.energies()[localized_state_index(&clean, spec, site)?];
    let e1 = noisy.energies()[localized_state_index(&noisy, spec, site)?];
    Ok(EnergyShift { clean: e0, perturbed: e1, shift: e1 - e0, stays_in_gap: band_label(e1, spec) == BandLabel::InGap })
}

pub const DEFAULT_PST_SAMPLES: usize = 20_000;
pub const TRANSFER_THRESHOLD: f64 = 0.5;
/// Scan horizon as a multiple of the two-level mirroring estimate.
pub const AUTO_HORIZON_FACTOR: f64 = 2.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PstOptions {
    /// Scan horizon in `1/Δ` units.
    pub t_max: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Transfer {
    /// Mirroring time in `1/Δ` units.
    pub t_mirror: f64,
    pub fidelity_at_mirror: f64,
    /// Fidelity against the initial state at `2 t_mirror`.
    pub fidelity_revival: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PstOutcome {
    Transferred(Transfer),
    /// No mirror-fidelity peak above the threshold within the horizon.
    NoTransfer {
        best_fidelity: f64,
        t_best: f64,
    },
}

fn check_pst_chain(spec: &ChainSpec, inject_site: i64) -> Result<()> {
    spec.validate()?;
    if spec.family != Family::StrongCenter || !spec.has_end_states() {
        return Err(Error::InvalidArgument(
            "state transfer needs a strong-centre chain with end states (N = 1 mod 4)".into(),
        ));
    }
    let m = spec.half_len();
    if inject_site.abs() != m {
        return Err(Error::InvalidArgument(format!("injection site must be +-{m}, got {inject_site}")));
    }
    Ok(())
}

/// Mirror transfer of an end-site excitation: coarse scan of the mirror
/// fidelity over `(0, t_max]`, then golden-section refinement around the
/// best grid point.
pub fn pst_run(spec: &ChainSpec, inject_site: i64, opts: &PstOptions) -> Result<PstOutcome> {
    check_pst_chain(spec, inject_site)?;
    if !(opts.t_max > 0.0 && opts.t_max.is_finite()) || opts.samples < 3 {
        return Err(Error::InvalidArgument("need a positive horizon and at least 3 samples".into()));
    }
    let s = eigendecompose(&build_hamiltonian(spec, None)?)?;
    let init = InitialState::site(spec, inject_site)?;
    let prop = Propagator::new(&s, &init)?;
    let t_max = opts.t_max / spec.strong;
    let step = t_max / opts.samples as f64;

    let (best_k, best_f) = (1..=opts.samples)
        .map(|k| (k, prop.mirror_fidelity(k as f64 * step)))
        .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    let lo = (best_k as f64 - 1.0) * step;
    let hi = ((best_k + 1) as f64 * step).min(t_max);
    let t_peak = golden_section_max(|t| prop.mirror_fidelity(t), lo, hi, 1e-12 * t_max);
    let (t_peak, f_peak) = {
        let f = prop.mirror_fidelity(t_peak);
        if f >= best_f {
            (t_peak, f)
        } else {
            (best_k as f64 * step, best_f)
        }
    };
    if f_peak < TRANSFER_THRESHOLD {
        return Ok(PstOutcome::NoTransfer { best_fidelity: f_peak, t_best: t_peak * spec.strong });
    }
    Ok(PstOutcome::Transferred(Transfer {
        t_mirror: t_peak * spec.strong,
        fidelity_at_mirror: f_peak,
        fidelity_revival: prop.fidelity(2.0 * t_peak),
    }))
}

fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Mirroring time `pi / |E_even - E_odd|` (in `1/Δ` units) of the
/// symmetric/antisymmetric pair of end states, ignoring everything else.
pub fn two_level_mirror_time(s: &Spectrum, spec: &ChainSpec) -> Result<f64> {
    check_pst_chain(spec, -spec.half_len())?;
    let meta = state_metadata(s, spec);
    let end = 0;
    let pick = |parity: Parity| {
        meta.iter()
            .filter(|m| m.band_label == BandLabel::InGap && m.parity == parity)
            .max_by(|a, b| s.occupancy(a.n, end).total_cmp(&s.occupancy(b.n, end)))
            .map(|m| m.energy)
            .ok_or_else(|| Error::Structural(format!("no {} in-gap end state", parity.as_str())))
    };
    let splitting = (pick(Parity::Even)? - pick(Parity::Odd)?).abs();
    if splitting == 0.0 {
        return Err(Error::NoTransfer("end states are exactly degenerate".into()));
    }
    Ok(PI / splitting * spec.strong)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PstRow {
    pub ratio: f64,
    pub t_mirror: f64,
    pub fidelity_at_mirror: f64,
    pub fidelity_revival: f64,
}

/// Runs [`pst_run`] for each coupling ratio, injecting at the left end.
///
/// `t_max = None` scans each chain up to [`AUTO_HORIZON_FACTOR`] times its
/// two-level estimate.
pub fn pst_scan(template: &ChainSpec, ratios: &[f64], t_max: Option<f64>, samples: usize) -> Result<Vec<PstRow>> {
    ratios
        .par_iter()
        .map(|&ratio| {
            if !(ratio >= 2.0) {
                return Err(Error::InvalidArgument(format!("coupling ratio must be >= 2, got {ratio}")));
            }
            let spec = ChainSpec::with_ratio(template.family, template.n_sites, template.strong, ratio)?;
            let horizon = match t_max {
                Some(t) => t,
                None => {
                    let s = eigendecompose(&build_hamiltonian(&spec, None)?)?;
                    AUTO_HORIZON_FACTOR * two_level_mirror_time(&s, &spec)?
                }
            };
            match pst_run(&spec, -spec.half_len(), &PstOptions { t_max: horizon, samples })? {
                PstOutcome::Transferred(t) => Ok(PstRow {
                    ratio,
                    t_mirror: t.t_mirror,
                    fidelity_at_mirror: t.fidelity_at_mirror,
                    fidelity_revival: t.fidelity_revival,
                }),
                PstOutcome::NoTransfer { best_fidelity, t_best } => Err(Error::NoTransfer(format!(
                    "ratio {ratio}: best mirror fidelity {best_fidelity:.4} at t = {t_best:.4e} / Δ"
                ))),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spectrum(spec: &ChainSpec) -> Spectrum {
        eigendecompose(&build_hamiltonian(spec, None).unwrap()).unwrap()
    }

    #[test]
    fn eigenstate_injection_is_stationary() {
        let spec = ChainSpec::new(Family::WeakCenter, 21, 8.0, 0.2).unwrap();
        let s = spectrum(&spec);
        for n in [0, 5, 10, 20] {
            let init = InitialState::eigenstate(&s, n).unwrap();
            let times = uniform_times(50.0, 101);
            let tr = evolve(&s, &init, &times).unwrap();
            let e = s.energies()[n];
            for (k, &t) in times.iter().enumerate() {
                assert!((tr.fidelity[k] - 1.0).abs() < 1e-10);
                if e.abs() * (times[1] - times[0]) < PI / 4.0 {
                    assert!((tr.phase[k] + e * t).abs() < 1e-8, "n={n} t={t}");
                }
            }
        }
    }

    #[test]
    fn starts_at_unit_fidelity() {
        let spec = ChainSpec::new(Family::StrongCenter, 21, 8.0, 1.6).unwrap();
        let s = spectrum(&spec);
        let tr = evolve(&s, &InitialState::site(&spec, -10).unwrap(), &[0.0]).unwrap();
        assert!((tr.fidelity[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_unsorted_or_negative_times() {
        let spec = ChainSpec::new(Family::WeakCenter, 5, 8.0, 0.2).unwrap();
        let s = spectrum(&spec);
        let init = InitialState::site(&spec, 0).unwrap();
        assert!(evolve(&s, &init, &[1.0, 0.5]).is_err());
        assert!(evolve(&s, &init, &[-1.0]).is_err());
        assert!(InitialState::site(&spec, 3).is_err());
    }

    #[test]
    fn unwrap_follows_linear_phase() {
        let raw: Vec<f64> = (0..100).map(|k| (-(k as f64) * 0.5 + PI).rem_euclid(2.0 * PI) - PI).collect();
        let un = unwrap_phase(raw);
        for (k, p) in un.iter().enumerate() {
            assert!((p + k as f64 * 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn dominant_frequency_of_cosine() {
        let dt = 0.01;
        let w = 2.0 * PI * 25.0 / (1000.0 * dt);
        let series: Vec<f64> = (0..1000).map(|k| (w * k as f64 * dt).cos()).collect();
        assert!((dominant_frequency(&series, dt) - w).abs() < 1e-9);
        assert_eq!(dominant_frequency(&[1.0; 64], dt), 0.0);
    }

    #[test]
    fn pst_rejects_wrong_chain() {
        let a = ChainSpec::new(Family::WeakCenter, 21, 8.0, 1.6).unwrap();
        assert!(pst_run(&a, -10, &PstOptions { t_max: 1e4, samples: 100 }).is_err());
        let b = ChainSpec::new(Family::StrongCenter, 21, 8.0, 1.6).unwrap();
        assert!(pst_run(&b, 0, &PstOptions { t_max: 1e4, samples: 100 }).is_err());
        assert!(pst_scan(&b, &[1.5], None, 100).is_err());
    }

    #[test]
    fn short_horizon_reports_no_transfer() {
        let b = ChainSpec::new(Family::StrongCenter, 21, 8.0, 1.6).unwrap();
        let out = pst_run(&b, -10, &PstOptions { t_max: 100.0, samples: 1000 }).unwrap();
        assert!(matches!(out, PstOutcome::NoTransfer { .. }));
    }

    #[test]
    fn eigenstate_encoding_memory_is_perfect() {
        let spec = ChainSpec::new(Family::WeakCenter, 21, 8.0, 0.2).unwrap();
        let r = memory_report(&spec, Encoding::Eigenstate(0), 100.0, 501, None).unwrap();
        assert!(r.fidelity.iter().all(|f| (f - 1.0).abs() < 1e-10));
        assert!(r.phase_slope.abs() < 1e-10);
        assert_eq!(r.max_phase_deviation, 0.0);
    }

    #[test]
    fn localized_shift_stays_in_gap() {
        let spec = ChainSpec::new(Family::WeakCenter, 21, 8.0, 0.2).unwrap();
        let cfg = DisorderConfig::new(0.1, 1, 42).unwrap();
        let shift = localized_energy_shift(&spec, &cfg, 0, 0).unwrap();
        assert!(shift.clean.abs() < 1e-12);
        assert!(shift.shift != 0.0 && shift.stays_in_gap);
    }
}
