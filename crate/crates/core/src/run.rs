//! Executes a [`RunConfig`]: computes the requested experiment, writes its
//! tables and a manifest into the output directory.
//!
//! Eigenstate indices `n` in the tables are 1-based and times are in `1/Δ`
//! units.

use std::fs;

use crate::chain::{build_hamiltonian, ChainSpec};
use crate::config::{Command, InjectTarget, RunConfig};
use crate::disorder::{draw_onsite, ensemble_average, DisorderConfig};
use crate::dynamics::{
    evolve, localized_energy_shift, memory_report, pst_scan, uniform_times, Encoding, InitialState, Propagator,
    DEFAULT_PST_SAMPLES,
};
use crate::error::{Error, Result};
use crate::output::{write_bytes, write_table, ArtifactRecord, Manifest, Table, MANIFEST_FILE};
use crate::spectral::{band_label, eigendecompose, state_metadata, BandLabel, Spectrum};
use crate::topology::{interface_census, pseudospin_path, winding_number, zak_phase, UnitCell, DEFAULT_K_POINTS};

pub const DEFAULT_HORIZON: f64 = 1000.0;
pub const DEFAULT_SAMPLES: usize = 4001;

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub manifest: Manifest,
}

pub fn run(cfg: &RunConfig) -> Result<RunSummary> {
    let tables = tables_for(cfg)?;
    fs::create_dir_all(&cfg.out).map_err(|e| Error::Io { path: cfg.out.display().to_string(), source: e })?;
    let artifacts =
        tables.iter().map(|t| write_table(&cfg.out, t, cfg.format)).collect::<Result<Vec<ArtifactRecord>>>()?;
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").to_owned(),
        version: env!("CARGO_PKG_VERSION").to_owned(),
        seed: cfg.seed,
        config: cfg.to_partial(),
        artifacts,
    };
    write_bytes(&cfg.out, MANIFEST_FILE, manifest.to_json().as_bytes())?;
    Ok(RunSummary { manifest })
}

/// Computes the tables of a run without touching the filesystem.
pub fn tables_for(cfg: &RunConfig) -> Result<Vec<Table>> {
    match cfg.command {
        Command::Spectrum => {
            let s = clean_spectrum(&cfg.chain)?;
            Ok(vec![spectrum_table(&s, &cfg.chain)])
        }
        Command::Eigenstates => eigenstate_tables(&cfg.chain),
        Command::Disorder => disorder_tables(cfg),
        Command::Evolve => evolve_tables(cfg),
        Command::Memory => memory_tables(cfg),
        Command::Pst => pst_tables(cfg),
        Command::Classify => classify_tables(cfg),
    }
}

fn clean_spectrum(spec: &ChainSpec) -> Result<Spectrum> {
    eigendecompose(&build_hamiltonian(spec, None)?)
}

fn spectrum_table(s: &Spectrum, spec: &ChainSpec) -> Table {
    let mut t = Table::new("spectrum", &["n", "energy", "parity", "ipr", "peak_site", "peak_amp", "band_label"]);
    for m in state_metadata(s, spec) {
        t.push(vec![
            (m.n + 1).into(),
            m.energy.into(),
            m.parity.as_str().into(),
            m.ipr.into(),
            m.peak_site.into(),
            m.peak_amp.into(),
            m.band_label.as_str().into(),
        ]);
    }
    t
}

/// Localized states plus the extremal and mid-band states of each band.
fn selected_states(s: &Spectrum, spec: &ChainSpec) -> Vec<usize> {
    let e = s.energies();
    let nearest = |target: f64| (0..e.len()).min_by(|&a, &b| (e[a] - target).abs().total_cmp(&(e[b] - target).abs()));
    let mut picks: Vec<usize> = (0..e.len())
        .filter(|&n| matches!(band_label(e[n], spec), BandLabel::InGap | BandLabel::OuterLocalized))
        .collect();
    picks.extend([0, e.len() - 1]);
    picks.extend(nearest(-spec.strong));
    picks.extend(nearest(spec.strong));
    picks.sort_unstable();
    picks.dedup();
    picks
}

fn eigenstate_tables(spec: &ChainSpec) -> Result<Vec<Table>> {
    let s = clean_spectrum(spec)?;
    let mut tables = vec![spectrum_table(&s, spec)];
    for n in selected_states(&s, spec) {
        let mut t = Table::new(format!("eigenstate_{}", n + 1), &["site", "amplitude"]);
        for (idx, &c) in s.state(n).iter().enumerate() {
            t.push(vec![spec.site_of(idx).into(), c.into()]);
        }
        tables.push(t);
    }
    Ok(tables)
}

fn disorder_tables(cfg: &RunConfig) -> Result<Vec<Table>> {
    let spec = &cfg.chain;
    let mut occ = Table::new("disorder", &["site", "e_scale", "rho_bar"]);
    let mut spec_t = Table::new("avg_spectrum", &["n", "e_scale", "mean_energy", "std_energy"]);
    for &e in &cfg.disorder {
        let dc = DisorderConfig::new(e, cfg.realizations, cfg.seed)?;
        let r = ensemble_average(spec, &dc)?;
        for (idx, rho) in r.rho_bar.iter().enumerate() {
            occ.push(vec![spec.site_of(idx).into(), e.into(), (*rho).into()]);
        }
        for (n, (m, sd)) in r.avg_energies.iter().zip(&r.std_energies).enumerate() {
            spec_t.push(vec![(n + 1).into(), e.into(), (*m).into(), (*sd).into()]);
        }
    }
    Ok(vec![occ, spec_t])
}

fn anchor(cfg: &RunConfig) -> i64 {
    match cfg.inject {
        Some(InjectTarget::Site(s)) => s,
        _ => Encoding::default_anchor(&cfg.chain),
    }
}

fn evolve_tables(cfg: &RunConfig) -> Result<Vec<Table>> {
    let spec = &cfg.chain;
    let onsite = match cfg.disorder.first() {
        Some(&e) if e > 0.0 => Some(draw_onsite(spec, &DisorderConfig::new(e, cfg.realizations, cfg.seed)?, 0)?),
        _ => None,
    };
    let s = eigendecompose(&build_hamiltonian(spec, onsite.as_deref())?)?;
    let init = match cfg.inject {
        Some(InjectTarget::GapState) => InitialState::localized_at(&s, spec, Encoding::default_anchor(spec))?,
        _ => InitialState::site(spec, anchor(cfg))?,
    };
    let horizon = cfg.tmax.unwrap_or(DEFAULT_HORIZON);
    let times = uniform_times(horizon / spec.strong, cfg.samples.unwrap_or(DEFAULT_SAMPLES));
    let tr = evolve(&s, &init, &times)?;
    let mut t = Table::new("trajectory", &["t", "re_overlap", "im_overlap", "fidelity", "mirror_fidelity", "phase"]);
    for k in 0..times.len() {
        t.push(vec![
            (tr.times[k] * spec.strong).into(),
            tr.overlap[k].0.into(),
            tr.overlap[k].1.into(),
            tr.fidelity[k].into(),
            tr.mirror_fidelity[k].into(),
            tr.phase[k].into(),
        ]);
    }
    Ok(vec![t])
}

fn memory_tables(cfg: &RunConfig) -> Result<Vec<Table>> {
    let spec = &cfg.chain;
    let site = anchor(cfg);
    let horizon = cfg.tmax.unwrap_or(DEFAULT_HORIZON);
    let samples = cfg.samples.unwrap_or(DEFAULT_SAMPLES);
    let mut summary = Table::new(
        "memory",
        &[
            "encoding",
            "e_scale",
            "realizations",
            "mean_fidelity",
            "min_fidelity",
            "max_fidelity",
            "dominant_frequency",
            "phase_slope",
            "max_phase_deviation",
        ],
    );
    let mut traj = Table::new(
        "memory_trajectory",
        &["encoding", "e_scale", "t", "clean_fidelity", "clean_phase", "fidelity", "phase"],
    );
    let mut scales = vec![0.0];
    scales.extend(cfg.disorder.iter().copied().filter(|&e| e > 0.0));
    for encoding in [Encoding::Site(site), Encoding::Eigenstate(site)] {
        for &e in &scales {
            let dc = DisorderConfig::new(e, cfg.realizations, cfg.seed)?;
            let r = memory_report(spec, encoding, horizon, samples, (e > 0.0).then_some(&dc))?;
            summary.push(vec![
                encoding.as_str().into(),
                e.into(),
                r.realizations.into(),
                r.mean_fidelity.into(),
                r.min_fidelity.into(),
                r.max_fidelity.into(),
                r.dominant_frequency.into(),
                r.phase_slope.into(),
                r.max_phase_deviation.into(),
            ]);
            for k in 0..r.times.len() {
                traj.push(vec![
                    encoding.as_str().into(),
                    e.into(),
                    r.times[k].into(),
                    r.clean_fidelity[k].into(),
                    r.clean_phase[k].into(),
                    r.fidelity[k].into(),
                    r.phase[k].into(),
                ]);
            }
        }
    }
    let mut shift = Table::new("energy_shift", &["n", "e_scale", "clean_energy", "perturbed_energy"]);
    let mut localized =
        Table::new("localized_shift", &["e_scale", "clean_energy", "perturbed_energy", "shift", "in_gap"]);
    for &e in scales.iter().filter(|&&e| e > 0.0) {
        let dc = DisorderConfig::new(e, cfg.realizations, cfg.seed)?;
        let clean = clean_spectrum(spec)?;
        let noisy = eigendecompose(&build_hamiltonian(spec, Some(&draw_onsite(spec, &dc, 0)?))?)?;
        for (n, (a, b)) in clean.energies().iter().zip(noisy.energies()).enumerate() {
            shift.push(vec![(n + 1).into(), e.into(), (*a).into(), (*b).into()]);
        }
        let ls = localized_energy_shift(spec, &dc, 0, site)?;
        localized.push(vec![e.into(), ls.clean.into(), ls.perturbed.into(), ls.shift.into(), ls.stays_in_gap.into()]);
    }
    Ok(vec![summary, traj, shift, localized])
}

fn pst_tables(cfg: &RunConfig) -> Result<Vec<Table>> {
    let samples = cfg.samples.unwrap_or(DEFAULT_PST_SAMPLES);
    let rows = pst_scan(&cfg.chain, &cfg.ratios, cfg.tmax, samples)?;
    let mut scan = Table::new("pst_scan", &["ratio", "t_mirror", "fidelity_at_mirror", "fidelity_revival"]);
    for r in &rows {
        scan.push(vec![r.ratio.into(), r.t_mirror.into(), r.fidelity_at_mirror.into(), r.fidelity_revival.into()]);
    }
    // full trace for the first ratio, up to 2.5 mirroring times
    let first = &rows[0];
    let spec = ChainSpec::with_ratio(cfg.chain.family, cfg.chain.n_sites, cfg.chain.strong, first.ratio)?;
    let s = clean_spectrum(&spec)?;
    let init = InitialState::site(&spec, -spec.half_len())?;
    let prop = Propagator::new(&s, &init)?;
    let mut trace = Table::new("pst_trajectory", &["t", "fidelity", "mirror_fidelity"]);
    for t in uniform_times(2.5 * first.t_mirror, 2001) {
        let raw = t / spec.strong;
        trace.push(vec![t.into(), prop.fidelity(raw).into(), prop.mirror_fidelity(raw).into()]);
    }
    Ok(vec![scan, trace])
}

fn classify_tables(cfg: &RunConfig) -> Result<Vec<Table>> {
    let spec = &cfg.chain;
    let k_points = cfg.samples.unwrap_or(DEFAULT_K_POINTS);
    let mut classes = Table::new("classify", &["config", "intra", "inter", "winding", "zak_phase"]);
    let mut tables = Vec::new();
    for (name, cell) in [("A", UnitCell::a(spec.strong, spec.weak)), ("B", UnitCell::b(spec.strong, spec.weak))] {
        classes.push(vec![
            name.into(),
            cell.intra.into(),
            cell.inter.into(),
            (winding_number(&cell, k_points)? as i64).into(),
            zak_phase(&cell, k_points)?.into(),
        ]);
        let mut path = Table::new(format!("pseudospin_path_{name}"), &["k", "sx", "sy"]);
        for b in pseudospin_path(&cell, k_points)? {
            path.push(vec![b.k.into(), b.pseudospin.0.into(), b.pseudospin.1.into()]);
        }
        tables.push(path);
    }

    let census = interface_census(spec);
    let s = clean_spectrum(spec)?;
    let labels: Vec<BandLabel> = s.energies().iter().map(|&e| band_label(e, spec)).collect();
    let count = |l: BandLabel| labels.iter().filter(|&&x| x == l).count();
    let sites: Vec<String> = census.zero_mode_sites.iter().map(i64::to_string).collect();
    let mut c = Table::new(
        "census",
        &[
            "family",
            "n_sites",
            "predicted_zero_modes",
            "predicted_outer",
            "found_in_gap",
            "found_outer",
            "zero_mode_sites",
        ],
    );
    c.push(vec![
        spec.family.as_str().into(),
        spec.n_sites.into(),
        census.zero_modes.into(),
        census.outer_states.into(),
        count(BandLabel::InGap).into(),
        count(BandLabel::OuterLocalized).into(),
        sites.join(" ").as_str().into(),
    ]);
    tables.insert(0, classes);
    tables.push(c);
    Ok(tables)
}
