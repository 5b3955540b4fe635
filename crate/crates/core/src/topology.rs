//! Bulk classification of the two dimer configurations and the
//! bulk-boundary census of localized states.
//!
//! A two-site cell with intra-cell coupling `v` and inter-cell coupling `w`
//! has the Bloch Hamiltonian `[[0, q], [q*, 0]]` with `q(k) = v + w e^{-ik}`.
//! The lower band state in the cell-periodic gauge is
//! `(e^{i arg q}, -1) / sqrt(2)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::chain::{ChainSpec, Family};
use crate::error::{Error, Result};

pub const DEFAULT_K_POINTS: usize = 1024;
pub const MIN_K_POINTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DimerConfig {
    /// Strong bond inside the cell.
    A,
    /// Weak bond inside the cell.
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnitCell {
    pub intra: f64,
    pub inter: f64,
    pub label: DimerConfig,
}

impl UnitCell {
    pub fn a(strong: f64, weak: f64) -> Self {
        UnitCell { intra: strong, inter: weak, label: DimerConfig::A }
    }

    pub fn b(strong: f64, weak: f64) -> Self {
        UnitCell { intra: weak, inter: strong, label: DimerConfig::B }
    }

    /// Exchange the two couplings, which maps A onto B and back.
    pub fn swapped(&self) -> Self {
        let label = match self.label {
            DimerConfig::A => DimerConfig::B,
            DimerConfig::B => DimerConfig::A,
        };
        UnitCell { intra: self.inter, inter: self.intra, label }
    }

    pub fn offdiag(&self, k: f64) -> Complex64 {
        Complex64::new(self.intra, 0.0) + self.inter * Complex64::from_polar(1.0, -k)
    }

    fn check_gapped(&self) -> Result<()> {
        if self.intra.abs() == self.inter.abs() {
            return Err(Error::Gapless(self.intra.abs()));
        }
        Ok(())
    }
}

/// Bloch data of one quasi-momentum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochSample {
    pub k: f64,
    pub offdiag: (f64, f64),
    /// `(lower, upper) = (-|q|, +|q|)`.
    pub energies: (f64, f64),
    /// `(<sx>, <sy>, <sz>)` of the lower band state.
    pub pseudospin: (f64, f64, f64),
}

fn lower_band_state(q: Complex64) -> [Complex64; 2] {
    let s = 0.5f64.sqrt();
    [Complex64::from_polar(s, q.arg()), Complex64::new(-s, 0.0)]
}

pub fn bloch_sample(cell: &UnitCell, k: f64) -> BlochSample {
    let q = cell.offdiag(k);
    let [u1, u2] = lower_band_state(q);
    let cross = u1.conj() * u2;
    BlochSample {
        k,
        offdiag: (q.re, q.im),
        energies: (-q.norm(), q.norm()),
        pseudospin: (2.0 * cross.re, 2.0 * cross.im, u1.norm_sqr() - u2.norm_sqr()),
    }
}

fn k_grid(k_points: usize) -> impl Iterator<Item = f64> {
    (0..k_points).map(move |j| -PI + 2.0 * PI * j as f64 / k_points as f64)
}

fn check_k_points(k_points: usize) -> Result<()> {
    if k_points < MIN_K_POINTS {
        return Err(Error::InvalidArgument(format!("need at least {MIN_K_POINTS} k-points, got {k_points}")));
    }
    Ok(())
}

/// Pseudospin path of the lower band over one Brillouin zone, `k` in
/// `[-pi, pi)`.
pub fn pseudospin_path(cell: &UnitCell, k_points: usize) -> Result<Vec<BlochSample>> {
    check_k_points(k_points)?;
    Ok(k_grid(k_points).map(|k| bloch_sample(cell, k)).collect())
}

/// Number of times `q(k)` winds around the origin as `k` crosses the zone,
/// counted positive along the `e^{-ik}` orientation: A gives 0, B gives 1.
pub fn winding_number(cell: &UnitCell, k_points: usize) -> Result<i32> {
    check_k_points(k_points)?;
    cell.check_gapped()?;
    let qs: Vec<Complex64> = k_grid(k_points).map(|k| cell.offdiag(k)).collect();
    let mut total = 0.0;
    for (j, q) in qs.iter().enumerate() {
        let next = qs[(j + 1) % k_points];
        // principal value of the step keeps branch tracking unambiguous
        total += (next / q).arg();
    }
    Ok((-total / (2.0 * PI)).round() as i32)
}

/// Discretized Zak phase of the lower band from the Wilson loop
/// `-Im ln prod_j <u_j|u_{j+1}>`, reduced to `[0, 2 pi)`.
///
/// Absolute values depend on the gauge; differences between cells do not.
pub fn zak_phase(cell: &UnitCell, k_points: usize) -> Result<f64> {
    check_k_points(k_points)?;
    cell.check_gapped()?;
    let states: Vec<[Complex64; 2]> = k_grid(k_points).map(|k| lower_band_state(cell.offdiag(k))).collect();
    let mut loop_product = Complex64::new(1.0, 0.0);
    for (j, u) in states.iter().enumerate() {
        let v = &states[(j + 1) % k_points];
        let overlap = u[0].conj() * v[0] + u[1].conj() * v[1];
        loop_product *= overlap / overlap.norm();
    }
    Ok((-loop_product.arg()).rem_euclid(2.0 * PI))
}

/// Zak-phase difference `zak(b) - zak(a)` reduced to `(-pi, pi]`.
pub fn zak_difference(a: &UnitCell, b: &UnitCell, k_points: usize) -> Result<f64> {
    let d = zak_phase(b, k_points)? - zak_phase(a, k_points)?;
    let r = d.rem_euclid(2.0 * PI);
    Ok(if r > PI { r - 2.0 * PI } else { r })
}

/// Predicted localized states of a clean chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Census {
    /// States pinned near zero energy inside the gap.
    pub zero_modes: usize,
    /// Trimer-split states beyond the bands at about `+-sqrt(2) Δ`.
    pub outer_states: usize,
    /// Sites the zero modes concentrate on.
    pub zero_mode_sites: Vec<i64>,
    /// Sites the outer states concentrate on.
    pub outer_sites: Vec<i64>,
}

/// Interface, trimer-defect and end-state count implied by the coupling
/// pattern.
///
/// The weak-centre chain has one interface between an A and a B region at
/// site 0. The strong-centre chain has a trimer on sites -1..=1, giving one
/// zero mode and two states split to `+-sqrt(2) Δ`. Terminal sites hanging
/// off a weak bond add one end state each; that happens for case (a) when
/// `m` is odd and for case (b) when `m` is even.
pub fn interface_census(spec: &ChainSpec) -> Census {
    let m = spec.half_len();
    let (mut zero_modes, mut zero_mode_sites, outer_states, outer_sites) = match spec.family {
        Family::WeakCenter => (1, vec![0], 0, vec![]),
        Family::StrongCenter => (1, vec![-1, 1], 2, vec![0]),
    };
    if spec.has_end_states() {
        zero_modes += 2;
        zero_mode_sites.insert(0, -m);
        zero_mode_sites.push(m);
    }
    Census { zero_modes, outer_states, zero_mode_sites, outer_sites }
}
