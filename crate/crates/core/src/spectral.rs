//! Full diagonalization of the chain Hamiltonian and classification of the
//! resulting eigenstates.

use serde::Serialize;

use crate::chain::{ChainSpec, Hamiltonian};
use crate::eigen::{jacobi_eigen, tridiagonal_eigen};
use crate::error::{Error, Result};
use crate::topology::interface_census;

/// Relative bound on `|H phi - E phi|` accepted from the solver.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Bound on `|<phi_a|phi_b> - delta_ab|`.
pub const ORTHONORMALITY_TOL: f64 = 1e-10;
/// Mirror-parity eigenvalues must be within this of +-1.
pub const PARITY_TOL: f64 = 1e-8;
/// Relative (to the weak coupling) splitting below which levels are
/// treated as one degenerate cluster when assigning parity.
pub const DEGENERACY_REL_TOL: f64 = 1e-6;

/// Sorted eigenpairs of a Hamiltonian.
#[derive(Debug, Clone)]
pub struct Spectrum {
    energies: Vec<f64>,
    states: Vec<Vec<f64>>,
    residual_tol: f64,
}

impl Spectrum {
    /// Ascending energies.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// `states()[n]` is the eigenvector paired with `energies()[n]`,
    /// indexed by array position (site `i` at index `i + m`).
    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }

    pub fn state(&self, n: usize) -> &[f64] {
        &self.states[n]
    }

    pub fn residual_tol(&self) -> f64 {
        self.residual_tol
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// `|<i|phi_n>|^2` at array index `index`.
    pub fn occupancy(&self, n: usize, index: usize) -> f64 {
        let c = self.states[n][index];
        c * c
    }
}

/// Diagonalizes `h`, verifying every eigenpair before returning.
///
/// Eigenvectors are normalized with their largest-magnitude entry positive
/// (the first such entry when several tie to within rounding).
pub fn eigendecompose(h: &Hamiltonian) -> Result<Spectrum> {
    let raw = tridiagonal_eigen(h.diag(), h.offdiag())?;
    let mut order: Vec<usize> = (0..raw.values.len()).collect();
    order.sort_by(|&a, &b| raw.values[a].total_cmp(&raw.values[b]));

    let energies: Vec<f64> = order.iter().map(|&k| raw.values[k]).collect();
    let mut states: Vec<Vec<f64>> = order.iter().map(|&k| raw.vectors[k].clone()).collect();
    for v in states.iter_mut() {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        fix_sign(v);
    }

    let spectrum = Spectrum { energies, states, residual_tol: RESIDUAL_TOL };
    verify(h, &spectrum)?;
    Ok(spectrum)
}

fn fix_sign(v: &mut [f64]) {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(&pivot) = v.iter().find(|x| x.abs() >= max * (1.0 - 1e-9)) {
        if pivot < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

fn verify(h: &Hamiltonian, s: &Spectrum) -> Result<()> {
    let bound = s.residual_tol * h.max_abs().max(1.0);
    for (n, (e, v)) in s.energies.iter().zip(&s.states).enumerate() {
        let hv = h.apply(v);
        let res = hv.iter().zip(v).map(|(a, b)| (a - e * b).powi(2)).sum::<f64>().sqrt();
        if !(res <= bound) {
            return Err(Error::Unverified(format!("state {n}: residual {res:e} exceeds {bound:e}")));
        }
    }
    for a in 0..s.dim() {
        for b in a..s.dim() {
            let dot: f64 = s.states[a].iter().zip(&s.states[b]).map(|(x, y)| x * y).sum();
            let want = if a == b { 1.0 } else { 0.0 };
            if !((dot - want).abs() < ORTHONORMALITY_TOL) {
                return Err(Error::Unverified(format!("<{a}|{b}> = {dot:e}, orthonormality violated")));
            }
        }
    }
    Ok(())
}

/// Mirror parity of an eigenstate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Parity {
    Even,
    Odd,
    Undefined,
}

impl Parity {
    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
            Parity::Undefined => "undefined",
        }
    }

    fn from_eigenvalue(p: f64) -> Parity {
        if (p - 1.0).abs() < PARITY_TOL {
            Parity::Even
        } else if (p + 1.0).abs() < PARITY_TOL {
            Parity::Odd
        } else {
            Parity::Undefined
        }
    }
}

/// Energy window an eigenstate falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BandLabel {
    LowerBand,
    UpperBand,
    InGap,
    OuterLocalized,
    /// Between windows; only happens for strong disorder or small ratios.
    Unassigned,
}

impl BandLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            BandLabel::LowerBand => "lower_band",
            BandLabel::UpperBand => "upper_band",
            BandLabel::InGap => "in_gap",
            BandLabel::OuterLocalized => "outer_localized",
            BandLabel::Unassigned => "unassigned",
        }
    }
}

/// Windows: bands at `+-[Δ-2δ, Δ+2δ]`, gap `|E| < Δ/2`, outer `|E| > Δ+2δ`.
pub fn band_label(energy: f64, spec: &ChainSpec) -> BandLabel {
    let (big, small) = (spec.strong, spec.weak);
    let abs = energy.abs();
    if abs < big / 2.0 {
        BandLabel::InGap
    } else if abs > big + 2.0 * small {
        BandLabel::OuterLocalized
    } else if abs >= big - 2.0 * small {
        if energy < 0.0 {
            BandLabel::LowerBand
        } else {
            BandLabel::UpperBand
        }
    } else {
        BandLabel::Unassigned
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateMetadata {
    pub n: usize,
    pub energy: f64,
    pub parity: Parity,
    /// Inverse participation ratio `sum_i |c_i|^4`.
    pub ipr: f64,
    pub peak_site: i64,
    pub peak_amp: f64,
    pub band_label: BandLabel,
}

pub fn inverse_participation_ratio(v: &[f64]) -> f64 {
    v.iter().map(|c| c.powi(4)).sum()
}

pub fn state_metadata(s: &Spectrum, spec: &ChainSpec) -> Vec<StateMetadata> {
    let parities = parities(s, spec.weak * DEGENERACY_REL_TOL);
    s.states
        .iter()
        .zip(&s.energies)
        .zip(parities)
        .enumerate()
        .map(|(n, ((v, &energy), parity))| {
            let (peak_idx, peak_amp) =
                v.iter()
                    .map(|c| c.abs())
                    .enumerate()
                    .fold((0, -1.0), |best, (i, a)| if a > best.1 { (i, a) } else { best });
            StateMetadata {
                n,
                energy,
                parity,
                ipr: inverse_participation_ratio(v),
                peak_site: spec.site_of(peak_idx),
                peak_amp,
                band_label: band_label(energy, spec),
            }
        })
        .collect()
}

/// Parity per state. Near-degenerate clusters are rotated into mirror
/// eigenstates first; the rotated combinations are handed back to the
/// cluster members in order of their energy expectation.
fn parities(s: &Spectrum, split_tol: f64) -> Vec<Parity> {
    let mut out = Vec::with_capacity(s.dim());
    let mut start = 0;
    while start < s.dim() {
        let mut end = start + 1;
        while end < s.dim() && s.energies[end] - s.energies[end - 1] < split_tol {
            end += 1;
        }
        let members = start..end;
        let gram: Vec<Vec<f64>> = members
            .clone()
            .map(|a| members.clone().map(|b| mirror_overlap(&s.states[a], &s.states[b])).collect())
            .collect();
        if gram.len() == 1 {
            out.push(Parity::from_eigenvalue(gram[0][0]));
        } else {
            let (vals, vecs) = jacobi_eigen(&gram);
            let mut combos: Vec<(f64, Parity)> = vals
                .iter()
                .zip(&vecs)
                .map(|(&p, w)| {
                    let rq: f64 = w.iter().zip(&s.energies[members.clone()]).map(|(c, e)| c * c * e).sum();
                    (rq, Parity::from_eigenvalue(p))
                })
                .collect();
            combos.sort_by(|a, b| a.0.total_cmp(&b.0));
            out.extend(combos.into_iter().map(|(_, p)| p));
        }
        start = end;
    }
    out
}

/// `<a| M |b>` with `M` the reflection about the middle site.
fn mirror_overlap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter().rev()).map(|(x, y)| x * y).sum()
}

/// States outside the two bands, checked against the predicted census.
pub fn locate_gap_states(s: &Spectrum, spec: &ChainSpec) -> Result<Vec<(usize, BandLabel)>> {
    if s.dim() != spec.n_sites {
        return Err(Error::LengthMismatch { expected: spec.n_sites, actual: s.dim() });
    }
    let found: Vec<(usize, BandLabel)> = s
        .energies
        .iter()
        .enumerate()
        .map(|(n, &e)| (n, band_label(e, spec)))
        .filter(|(_, l)| matches!(l, BandLabel::InGap | BandLabel::OuterLocalized))
        .collect();
    let census = interface_census(spec);
    let in_gap = found.iter().filter(|(_, l)| *l == BandLabel::InGap).count();
    let outer = found.len() - in_gap;
    if in_gap != census.zero_modes || outer != census.outer_states {
        return Err(Error::Structural(format!(
            "family {} with N={}: found {in_gap} in-gap and {outer} outer states, expected {} and {}",
            spec.family, spec.n_sites, census.zero_modes, census.outer_states
        )));
    }
    Ok(found)
}

/// Dense symmetric projector onto a set of eigenstates.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    dim: usize,
    data: Vec<f64>,
    rank: usize,
}

impl Projector {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of eigenstates spanning the projected subspace.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    /// Largest entry of `|P^2 - P|`.
    pub fn idempotency_error(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let pp: f64 = (0..n).map(|k| self.get(i, k) * self.get(k, j)).sum();
                worst = worst.max((pp - self.get(i, j)).abs());
            }
        }
        worst
    }
}

/// `P = sum_{|E_n| < e_window} |phi_n><phi_n|`. An empty window gives the
/// zero matrix.
pub fn zero_subspace_projector(s: &Spectrum, e_window: f64) -> Result<Projector> {
    if !(e_window > 0.0 && e_window.is_finite()) {
        return Err(Error::InvalidArgument(format!("energy window must be positive, got {e_window}")));
    }
    let n = s.dim();
    let mut data = vec![0.0; n * n];
    let mut rank = 0;
    for (e, v) in s.energies.iter().zip(&s.states) {
        if e.abs() >= e_window {
            continue;
        }
        rank += 1;
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] += v[i] * v[j];
            }
        }
    }
    Ok(Projector { dim: n, data, rank })
}

/// Energies of the two dimer bands, ascending within each band.
#[derive(Debug, Clone, PartialEq)]
pub struct BandProfile {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BandProfile {
    /// `(min, max)` of the lower band, if any.
    pub fn lower_edges(&self) -> Option<(f64, f64)> {
        Some((*self.lower.first()?, *self.lower.last()?))
    }

    pub fn upper_edges(&self) -> Option<(f64, f64)> {
        Some((*self.upper.first()?, *self.upper.last()?))
    }

    /// Largest splitting inside consecutive level pairs `(0,1), (2,3), ...`
    /// of either band; `None` when a band has an odd number of levels.
    pub fn max_pair_splitting(&self) -> Option<f64> {
        let mut worst: f64 = 0.0;
        for band in [&self.lower, &self.upper] {
            if band.len() % 2 != 0 {
                return None;
            }
            for pair in band.chunks(2) {
                worst = worst.max(pair[1] - pair[0]);
            }
        }
        Some(worst)
    }
}

pub fn band_profile(s: &Spectrum, spec: &ChainSpec) -> BandProfile {
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for &e in &s.energies {
        match band_label(e, spec) {
            BandLabel::LowerBand => lower.push(e),
            BandLabel::UpperBand => upper.push(e),
            _ => {}
        }
    }
    BandProfile { lower, upper }
}
