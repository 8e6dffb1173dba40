//! Subcommand bodies. Each returns a human-readable report and a CSV table.

use std::fmt::Write as _;

use anyhow::{bail, Result};
use mzi_dm::scan::DOMINANCE_DEPTH;
use mzi_dm::signal::{catalog_pairs, next_order_ratio};
use mzi_dm::verify::{run_verification, ScenarioRanges, Tolerances, VerifyReport};
use mzi_dm::{
    phase_breakdown, regime_amplitude, run_scan_with, signal_amplitude_analytic, signal_amplitude_numeric_with,
    PairKey, PhaseLabel, PhiSMode, Regime, ScanAxis, ScanPoint,
};

use crate::config::{PhiRho, ScenarioConfig};
use crate::output::{num, opt, Table};

pub struct Output {
    pub report: String,
    pub table: Table,
}

pub fn phases(cfg: &ScenarioConfig) -> Result<Output> {
    let PhiRho::Fixed(phi) = cfg.phi_rho else {
        bail!("dilaton.phi_rho: phases need a fixed dilaton phase, got 'averaged'");
    };
    let sc = &cfg.scenario;
    let dil = sc.dilaton.with_phi_rho(phi);
    let lower = phase_breakdown(&sc.grad.geom, &sc.species, &dil, &sc.pert)?;
    let upper = phase_breakdown(&sc.grad.upper(&sc.species), &sc.species, &dil, &sc.pert)?;
    let mut table = Table::new(["label", "phi_lower_rad", "phi_upper_rad", "delta_phi_rad"]);
    let mut report = format!(
        "phases: {} interferometers, phi_rho = {phi} rad\nstandard phase {:.16e} rad (both)\n\n{:<6} {:>24} {:>24} {:>24}\n",
        sc.grad.geom.diffraction, lower.standard + 0.0, "label", "phi_lower_rad", "phi_upper_rad", "delta_phi_rad"
    );
    for l in PhaseLabel::ALL {
        let (a, b) = (lower.get(l) + 0.0, upper.get(l) + 0.0);
        table.push(vec![l.to_string(), num(a), num(b), num(b - a)]);
        let _ = writeln!(report, "{:<6} {a:>24.16e} {b:>24.16e} {:>24.16e}", l.to_string(), b - a);
    }
    let (a, b) = (lower.dilaton_total() + 0.0, upper.dilaton_total() + 0.0);
    let _ = writeln!(report, "{:<6} {a:>24.16e} {b:>24.16e} {:>24.16e}", "sum", b - a);
    Ok(Output { report, table })
}

fn require_averaged(cfg: &ScenarioConfig) -> Result<()> {
    if let PhiRho::Fixed(_) = cfg.phi_rho {
        bail!("dilaton.phi_rho: signal amplitudes average over the dilaton phase; set phi_rho = averaged");
    }
    Ok(())
}

fn mode_name(mode: PhiSMode) -> &'static str {
    match mode {
        PhiSMode::Coherent => "coherent",
        PhiSMode::IndependentPhiS => "independent",
    }
}

pub fn signal(cfg: &ScenarioConfig, mode: PhiSMode) -> Result<Output> {
    require_averaged(cfg)?;
    let sc = &cfg.scenario;
    let mut grid = cfg.numerics.grid;
    if mode == PhiSMode::Coherent {
        grid.phi_s_nodes = 1;
    }
    let numeric = signal_amplitude_numeric_with(&sc.grad, &sc.species, &sc.dilaton, &sc.pert, mode, &grid)?;
    let catalog = signal_amplitude_analytic(&sc.grad, &sc.species, &sc.dilaton, &sc.pert)?;
    let cataloged = catalog_pairs();
    let mut table = Table::new(["pair", "numeric_rad2", "catalog_rad2", "contribution_rad2"]);
    let mut outside = 0.0;
    for (key, v) in &numeric.correlations {
        let in_catalog = cataloged.contains(key);
        if *v == 0.0 && !in_catalog {
            continue;
        }
        if !in_catalog {
            outside += numeric.contribution(*key);
        }
        let cat = in_catalog.then(|| catalog.get(*key));
        table.push(vec![key.to_string(), num(*v), opt(cat), num(numeric.contribution(*key))]);
    }
    let mut report = format!(
        "signal: {} interferometers, phi_s {}, {} x {} nodes\nPhi_S^2 numeric  {:.16e} rad^2\nPhi_S^2 catalog  {:.16e} rad^2\nnon-cataloged pairs {:.6e} rad^2\n",
        sc.grad.geom.diffraction,
        mode_name(mode),
        grid.phi_rho_nodes,
        grid.phi_s_nodes,
        numeric.total,
        catalog.total,
        outside
    );
    for r in Regime::ALL {
        if let Ok(v) = regime_amplitude(r, &sc.grad, &sc.species, &sc.dilaton, &sc.pert) {
            let _ = writeln!(report, "regime {:<13} {v:.16e} rad^2", r.name());
        }
    }
    let mm = PairKey::new(PhaseLabel::M, PhaseLabel::M);
    if numeric.get(mm) != 0.0 {
        let _ = writeln!(report, "next-order ratio numeric {:.6e}", numeric.next_order_ratio());
        if let Ok(v) = next_order_ratio(&sc.grad, &sc.species, &sc.dilaton) {
            let _ = writeln!(report, "next-order ratio formula {v:.6e}");
        }
    }
    report.push_str("\ndominant pairs\n");
    for (k, c) in numeric.dominance().into_iter().take(10) {
        let _ = writeln!(report, "{:<9} {c:>24.16e}", k.to_string());
    }
    Ok(Output { report, table })
}

fn dominance_field(p: &ScanPoint) -> String {
    p.dominance.iter().map(|(k, c)| format!("{k}={c:.3e}")).collect::<Vec<_>>().join(";")
}

pub fn scan(cfg: &ScenarioConfig, axes: &[ScanAxis], mode: PhiSMode) -> Result<Output> {
    require_averaged(cfg)?;
    let mut grid = cfg.numerics.grid;
    if mode == PhiSMode::Coherent {
        grid.phi_s_nodes = 1;
    }
    let rows = run_scan_with(&cfg.scenario, cfg.numerics.braces, mode, &grid, axes)?;
    let mut header: Vec<String> = axes.iter().map(|a| a.path.name().to_string()).collect();
    header.extend(["phi_s2_numeric_rad2", "phi_s2_catalog_rad2"].map(String::from));
    header.extend(Regime::ALL.iter().map(|r| format!("regime_{}_rad2", r.name())));
    header.extend(["dominance", "coupling_ratio"].map(String::from));
    let mut table = Table::new(header);
    for p in &rows {
        let mut row: Vec<String> = p.values.iter().map(|v| num(*v)).collect();
        row.push(num(p.numeric));
        row.push(num(p.catalog));
        row.extend(p.regimes.iter().map(|r| opt(*r)));
        row.push(dominance_field(p));
        row.push(opt(p.coupling_ratio));
        table.push(row);
    }
    let axes_desc: Vec<_> = axes
        .iter()
        .map(|a| format!("{} [{}] {:e}..{:e} ({} points)", a.path, a.path.unit(), a.start, a.end, a.points))
        .collect();
    let peak = rows.iter().map(|p| p.numeric).fold(0.0, f64::max);
    let report = format!(
        "scan: {} points over {}\nlargest Phi_S^2 {peak:.6e} rad^2, dominance lists the top {DOMINANCE_DEPTH} pairs\n",
        rows.len(),
        axes_desc.join(" x ")
    );
    Ok(Output { report, table })
}

pub struct VerifyOutput {
    pub output: Output,
    pub report: VerifyReport,
}

pub fn verify(trials: usize, seed: u64, tol: Tolerances) -> Result<VerifyOutput> {
    let report = run_verification(trials, seed, tol, &ScenarioRanges::default())?;
    let mut table = Table::new(["check", "diffraction", "item", "worst_rel", "trial", "expected", "actual", "status"]);
    let status = |ok: bool| if ok { "pass" } else { "FAIL" }.to_string();
    for ((d, l), w) in &report.labels {
        table.push(vec![
            "catalog_vs_oracle".into(),
            d.to_string(),
            l.to_string(),
            num(w.residual),
            w.trial.to_string(),
            num(w.expected),
            num(w.actual),
            status(w.passed),
        ]);
    }
    for (k, w) in &report.pairs {
        table.push(vec![
            "analytic_vs_numeric".into(),
            "all".into(),
            k.to_string(),
            num(w.residual),
            w.trial.to_string(),
            num(w.expected),
            num(w.actual),
            status(w.passed),
        ]);
    }
    Ok(VerifyOutput { output: Output { report: report.render(), table }, report })
}
