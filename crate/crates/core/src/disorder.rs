//! Diagonal disorder ensembles: `eps_i = E * Δ * d_i` with `d_i` uniform on
//! `[-0.5, 0.5)`.
//!
//! Every draw is keyed by `(seed, realization, site)`: realization `r` reads
//! ChaCha20 stream `r` of the seed, and site index `i` takes the `i`-th
//! 64-bit word of that stream. Realizations therefore evaluate in any order
//! or in parallel with identical results.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{build_hamiltonian, ChainSpec};
use crate::error::{Error, Result};
use crate::spectral::{eigendecompose, Spectrum};

pub const DEFAULT_REALIZATIONS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisorderConfig {
    /// Dimensionless disorder scale `E`, in units of the strong coupling.
    pub e_scale: f64,
    pub realizations: usize,
    pub seed: u64,
}

impl DisorderConfig {
    pub fn new(e_scale: f64, realizations: usize, seed: u64) -> Result<Self> {
        let cfg = DisorderConfig { e_scale, realizations, seed };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.e_scale >= 0.0 && self.e_scale.is_finite()) {
            return Err(Error::InvalidArgument(format!("disorder scale must be >= 0, got {}", self.e_scale)));
        }
        if self.realizations == 0 {
            return Err(Error::InvalidArgument("need at least one realization".into()));
        }
        Ok(())
    }
}

fn unit_interval(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Onsite energies of one realization.
pub fn draw_onsite(spec: &ChainSpec, cfg: &DisorderConfig, realization: usize) -> Result<Vec<f64>> {
    cfg.validate()?;
    if realization >= cfg.realizations {
        return Err(Error::InvalidArgument(format!(
            "realization {realization} out of range for {} realizations",
            cfg.realizations
        )));
    }
    if cfg.e_scale == 0.0 {
        return Ok(vec![0.0; spec.n_sites]);
    }
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    rng.set_stream(realization as u64);
    let amplitude = cfg.e_scale * spec.strong;
    Ok((0..spec.n_sites).map(|_| amplitude * (unit_interval(rng.next_u64()) - 0.5)).collect())
}

/// `max_n |<i|phi_n>|^2` for each site.
pub fn max_occupancy(s: &Spectrum) -> Vec<f64> {
    let mut out = vec![0.0f64; s.dim()];
    for v in s.states() {
        for (o, c) in out.iter_mut().zip(v) {
            *o = o.max(c * c);
        }
    }
    out
}

/// Ensemble averages over all realizations of one disorder scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisorderResult {
    pub e_scale: f64,
    pub realizations: usize,
    /// Averaged maximum occupancy per site, array-indexed.
    pub rho_bar: Vec<f64>,
    /// Mean of the n-th smallest energy.
    pub avg_energies: Vec<f64>,
    /// Population standard deviation of the n-th smallest energy.
    pub std_energies: Vec<f64>,
}

struct Sample {
    occupancy: Vec<f64>,
    energies: Vec<f64>,
}

fn realize(spec: &ChainSpec, cfg: &DisorderConfig, r: usize) -> Result<Sample> {
    let onsite = draw_onsite(spec, cfg, r)?;
    let h = build_hamiltonian(spec, Some(&onsite))?;
    let s = eigendecompose(&h).map_err(|e| Error::Realization { realization: r, source: Box::new(e) })?;
    let occupancy = max_occupancy(&s);
    debug_assert!(s.states().iter().all(|v| (v.iter().map(|c| c * c).sum::<f64>() - 1.0).abs() < 1e-10));
    Ok(Sample { occupancy, energies: s.energies().to_vec() })
}

/// Averages `max_occupancy` and the sorted spectrum over the ensemble.
///
/// Realizations run in parallel; the reduction walks them in index order so
/// the result is bit-identical for any thread count. `E = 0` short-circuits
/// to the clean chain.
pub fn ensemble_average(spec: &ChainSpec, cfg: &DisorderConfig) -> Result<DisorderResult> {
    cfg.validate()?;
    spec.validate()?;
    let n = spec.n_sites;
    if cfg.e_scale == 0.0 {
        let s = eigendecompose(&build_hamiltonian(spec, None)?)?;
        return Ok(DisorderResult {
            e_scale: 0.0,
            realizations: cfg.realizations,
            rho_bar: max_occupancy(&s),
            avg_energies: s.energies().to_vec(),
            std_energies: vec![0.0; n],
        });
    }

    let samples: Vec<Sample> =
        (0..cfg.realizations).into_par_iter().map(|r| realize(spec, cfg, r)).collect::<Result<_>>()?;

    let count = samples.len() as f64;
    let mut rho_bar = vec![0.0; n];
    let mut avg = vec![0.0; n];
    for s in &samples {
        for i in 0..n {
            rho_bar[i] += s.occupancy[i];
            avg[i] += s.energies[i];
        }
    }
    rho_bar.iter_mut().for_each(|x| *x /= count);
    avg.iter_mut().for_each(|x| *x /= count);
    let mut var = vec![0.0; n];
    for s in &samples {
        for i in 0..n {
            var[i] += (s.energies[i] - avg[i]).powi(2);
        }
    }
    let std_energies = var.into_iter().map(|v| (v / count).sqrt()).collect();
    Ok(DisorderResult {
        e_scale: cfg.e_scale,
        realizations: cfg.realizations,
        rho_bar,
        avg_energies: avg,
        std_energies,
    })
}

impl DisorderResult {
    /// Mean ensemble spread of the lowest and highest band levels, skipping
    /// `outer` localized states at each end of the spectrum.
    pub fn band_edge_spread(&self, outer: usize) -> f64 {
        let lo = outer / 2;
        let hi = self.std_energies.len() - 1 - outer / 2;
        0.5 * (self.std_energies[lo] + self.std_energies[hi])
    }
}
