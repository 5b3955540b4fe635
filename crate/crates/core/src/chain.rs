//! Coupling patterns and Hamiltonians of the two mirror-symmetric chain
//! families.
//!
//! Sites carry the symmetric labels `-m..=m` with `m = (N - 1) / 2`. Arrays
//! are 0-based, so site `i` lives at index `i + m`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which coupling sits next to the central site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// Case (a): `J(-1,0) = J(0,1) = weak`. One interface state at site 0.
    #[serde(rename = "a")]
    WeakCenter,
    /// Case (b): `J(-1,0) = J(0,1) = strong`. A trimer defect in the
    /// middle plus end states.
    #[serde(rename = "b")]
    StrongCenter,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::WeakCenter => "a",
            Family::StrongCenter => "b",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" | "A" => Ok(Family::WeakCenter),
            "b" | "B" => Ok(Family::StrongCenter),
            other => Err(Error::InvalidChain(format!("unknown family {other:?}, expected a or b"))),
        }
    }
}

/// Full description of a clean chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChainSpec")]
pub struct ChainSpec {
    pub family: Family,
    pub n_sites: usize,
    /// Strong coupling Δ.
    pub strong: f64,
    /// Weak coupling δ.
    pub weak: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChainSpec {
    family: Family,
    n_sites: usize,
    strong: f64,
    weak: f64,
}

impl TryFrom<RawChainSpec> for ChainSpec {
    type Error = Error;

    fn try_from(raw: RawChainSpec) -> Result<Self> {
        ChainSpec::new(raw.family, raw.n_sites, raw.strong, raw.weak)
    }
}

impl ChainSpec {
    pub const DEFAULT_STRONG: f64 = 8.0;
    pub const DEFAULT_WEAK: f64 = 0.2;

    pub fn new(family: Family, n_sites: usize, strong: f64, weak: f64) -> Result<Self> {
        let spec = ChainSpec { family, n_sites, strong, weak };
        spec.validate()?;
        Ok(spec)
    }

    /// Chain with δ = Δ / ratio.
    pub fn with_ratio(family: Family, n_sites: usize, strong: f64, ratio: f64) -> Result<Self> {
        if !(ratio.is_finite() && ratio > 0.0) {
            return Err(Error::InvalidChain(format!("coupling ratio must be positive, got {ratio}")));
        }
        Self::new(family, n_sites, strong, strong / ratio)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 5 {
            return Err(Error::InvalidChain(format!("n_sites must be >= 5, got {}", self.n_sites)));
        }
        if self.n_sites.is_multiple_of(2) {
            return Err(Error::InvalidChain(format!("n_sites must be odd, got {}", self.n_sites)));
        }
        if !(self.strong.is_finite() && self.strong > 0.0) {
            return Err(Error::InvalidChain(format!("strong coupling must be positive, got {}", self.strong)));
        }
        if !(self.weak.is_finite() && self.weak > 0.0) {
            return Err(Error::InvalidChain(format!("weak coupling must be positive, got {}", self.weak)));
        }
        if self.weak >= self.strong {
            return Err(Error::InvalidChain(format!(
                "weak coupling {} must be smaller than strong coupling {}",
                self.weak, self.strong
            )));
        }
        Ok(())
    }

    /// `m = (N - 1) / 2`, the largest site label.
    pub fn half_len(&self) -> i64 {
        (self.n_sites as i64 - 1) / 2
    }

    pub fn ratio(&self) -> f64 {
        self.strong / self.weak
    }

    pub fn index_of(&self, site: i64) -> Option<usize> {
        let m = self.half_len();
        (-m..=m).contains(&site).then(|| (site + m) as usize)
    }

    pub fn site_of(&self, index: usize) -> i64 {
        index as i64 - self.half_len()
    }

    /// Coupling `J(i, i+1)` for `-m <= i < m`.
    pub fn coupling(&self, i: i64) -> f64 {
        let even = i.rem_euclid(2) == 0;
        // right half: the bond leaving an even site carries the centre
        // coupling; the left half is the mirror image
        let centre_like = if i >= 0 { even } else { !even };
        match (self.family, centre_like) {
            (Family::WeakCenter, true) | (Family::StrongCenter, false) => self.weak,
            (Family::WeakCenter, false) | (Family::StrongCenter, true) => self.strong,
        }
    }

    /// True when the outermost bonds are weak, which leaves an end state
    /// bound to each terminal site.
    pub fn has_end_states(&self) -> bool {
        self.coupling(self.half_len() - 1) == self.weak
    }
}

impl Default for ChainSpec {
    fn default() -> Self {
        ChainSpec { family: Family::WeakCenter, n_sites: 101, strong: Self::DEFAULT_STRONG, weak: Self::DEFAULT_WEAK }
    }
}

/// Nearest-neighbour couplings; entry `k` holds `J(k - m, k - m + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Couplings(Vec<f64>);

impl Couplings {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

pub fn build_couplings(spec: &ChainSpec) -> Result<Couplings> {
    spec.validate()?;
    let m = spec.half_len();
    Ok(Couplings((-m..m).map(|i| spec.coupling(i)).collect()))
}

/// Real symmetric tridiagonal single-excitation Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl Hamiltonian {
    /// Arbitrary tridiagonal matrix, e.g. an isolated dimer or trimer.
    pub fn from_parts(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidArgument("empty Hamiltonian".into()));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::LengthMismatch { expected: diag.len() - 1, actual: offdiag.len() });
        }
        if diag.iter().chain(&offdiag).any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite matrix element".into()));
        }
        Ok(Hamiltonian { diag, offdiag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// Largest absolute matrix element.
    pub fn max_abs(&self) -> f64 {
        self.diag.iter().chain(&self.offdiag).fold(0.0, |acc: f64, x| acc.max(x.abs()))
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(v.len(), n, "vector length must match Hamiltonian dimension");
        let mut out: Vec<f64> = self.diag.iter().zip(v).map(|(d, x)| d * x).collect();
        for (k, &j) in self.offdiag.iter().enumerate() {
            out[k] += j * v[k + 1];
            out[k + 1] += j * v[k];
        }
        out
    }

    /// Whether reflection about the middle site leaves the matrix unchanged.
    pub fn is_mirror_symmetric(&self, tol: f64) -> bool {
        let d = &self.diag;
        let o = &self.offdiag;
        d.iter().zip(d.iter().rev()).all(|(a, b)| (a - b).abs() <= tol)
            && o.iter().zip(o.iter().rev()).all(|(a, b)| (a - b).abs() <= tol)
    }
}

pub fn build_hamiltonian(spec: &ChainSpec, onsite: Option<&[f64]>) -> Result<Hamiltonian> {
    let offdiag = build_couplings(spec)?.into_vec();
    let diag = match onsite {
        Some(e) if e.len() != spec.n_sites => {
            return Err(Error::LengthMismatch { expected: spec.n_sites, actual: e.len() })
        }
        Some(e) => e.to_vec(),
        None => vec![0.0; spec.n_sites],
    };
    Hamiltonian::from_parts(diag, offdiag)
}

/// Reflection `i -> -i` about the central site.
pub fn mirror_reflect<T: Clone>(state: &[T]) -> Vec<T> {
    state.iter().rev().cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(family: Family, n: usize) -> ChainSpec {
        ChainSpec::new(family, n, 8.0, 0.2).unwrap()
    }

    #[test]
    fn five_site_patterns() {
        let a = build_couplings(&spec(Family::WeakCenter, 5)).unwrap();
        assert_eq!(a.as_slice(), &[8.0, 0.2, 0.2, 8.0]);
        let b = build_couplings(&spec(Family::StrongCenter, 5)).unwrap();
        assert_eq!(b.as_slice(), &[0.2, 8.0, 8.0, 0.2]);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(ChainSpec::new(Family::WeakCenter, 7, 1.0, 1.0).is_err());
        assert!(ChainSpec::new(Family::WeakCenter, 6, 8.0, 0.2).is_err());
        assert!(ChainSpec::new(Family::WeakCenter, 3, 8.0, 0.2).is_err());
        assert!(ChainSpec::new(Family::StrongCenter, 9, 8.0, -0.2).is_err());
        assert!(ChainSpec::new(Family::StrongCenter, 9, 0.0, -0.2).is_err());
        assert!(ChainSpec::new(Family::StrongCenter, 9, f64::NAN, 0.2).is_err());
    }

    #[test]
    fn centre_bonds_follow_family() {
        for n in [5, 7, 9, 21, 101] {
            let a = spec(Family::WeakCenter, n);
            assert_eq!(a.coupling(-1), 0.2);
            assert_eq!(a.coupling(0), 0.2);
            let b = spec(Family::StrongCenter, n);
            assert_eq!(b.coupling(-1), 8.0);
            assert_eq!(b.coupling(0), 8.0);
        }
    }

    #[test]
    fn couplings_mirror_and_alternate() {
        for family in [Family::WeakCenter, Family::StrongCenter] {
            for n in [5, 7, 21, 101] {
                let s = spec(family, n);
                let j = build_couplings(&s).unwrap();
                assert_eq!(j.len(), n - 1);
                let v = j.as_slice();
                assert!(v.iter().zip(v.iter().rev()).all(|(x, y)| x == y));
                let half = (n - 1) / 2;
                for w in v[..half].windows(2).chain(v[half..].windows(2)) {
                    assert_ne!(w[0], w[1]);
                }
            }
        }
    }

    #[test]
    fn end_states_depend_on_half_length_parity() {
        assert!(!spec(Family::WeakCenter, 101).has_end_states());
        assert!(spec(Family::WeakCenter, 7).has_end_states());
        assert!(spec(Family::StrongCenter, 21).has_end_states());
        assert!(!spec(Family::StrongCenter, 7).has_end_states());
    }

    #[test]
    fn hamiltonian_construction() {
        let s = spec(Family::WeakCenter, 101);
        let h = build_hamiltonian(&s, None).unwrap();
        assert_eq!(h.dim(), 101);
        assert!(h.diag().iter().all(|&d| d == 0.0));
        let zeros = vec![0.0; 5];
        let s5 = spec(Family::WeakCenter, 5);
        assert_eq!(build_hamiltonian(&s5, Some(&zeros)).unwrap(), build_hamiltonian(&s5, None).unwrap());
        assert!(matches!(
            build_hamiltonian(&s5, Some(&[0.0; 4])),
            Err(Error::LengthMismatch { expected: 5, actual: 4 })
        ));
    }

    #[test]
    fn mirror_moves_site_to_opposite() {
        assert_eq!(mirror_reflect(&[1, 0, 0, 0, 0]), vec![0, 0, 0, 0, 1]);
        let s = 0.5f64.sqrt();
        let trimer = [0.0, -s, 0.0, s, 0.0];
        let r = mirror_reflect(&trimer);
        assert!(r.iter().zip(&trimer).all(|(a, b)| *a == -*b));
    }

    #[test]
    fn site_index_mapping_is_bijective() {
        let s = spec(Family::StrongCenter, 21);
        for idx in 0..21 {
            assert_eq!(s.index_of(s.site_of(idx)), Some(idx));
        }
        assert_eq!(s.index_of(11), None);
        assert_eq!(s.index_of(-11), None);
    }

    #[test]
    fn json_shape() {
        let s: ChainSpec = serde_json::from_str(r#"{"family":"a","n_sites":101,"strong":8.0,"weak":0.2}"#).unwrap();
        assert_eq!(s, ChainSpec::default());
        assert_eq!(serde_json::to_string(&s).unwrap(), r#"{"family":"a","n_sites":101,"strong":8.0,"weak":0.2}"#);
        assert!(serde_json::from_str::<ChainSpec>(r#"{"family":"b","n_sites":4,"strong":8.0,"weak":0.2}"#).is_err());
    }
}
