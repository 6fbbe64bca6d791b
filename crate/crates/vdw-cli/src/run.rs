//! Distance scans and point-rate evaluations.  Scan points are independent
//! pure computations, mapped over a worker pool; rows come back in r order
//! no matter which worker finished first.

use std::path::Path;

use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use rayon::prelude::*;

use vdw_core::atom::TwoLevelAtom;
use vdw_core::green::{AtomPairGreen, Medium};
use vdw_core::quadrature::Tolerance;
use vdw_core::rates::{
    fret_rate_with, gamma_spontaneous, gamma_thermal_absorption, sigma_ge_feynman_with,
    sigma_ge_keldysh_with, sigma_gg_with, Lineshape, SelfEnergy,
};

use crate::config::{Quantity, RunConfig, Spacing, StateConfig};
use crate::table::Table;
use crate::units;

pub struct ScanContext {
    pub atom_a: TwoLevelAtom,
    pub atom_b: TwoLevelAtom,
    pub medium: Medium,
    pub tol: Tolerance,
    pub isotropic: bool,
}

impl ScanContext {
    pub fn from_config(config: &RunConfig, base_dir: &Path) -> Result<Self> {
        let (atom_a, atom_b) = config.atoms_au()?;
        let medium = config.medium_au(base_dir)?;
        Ok(ScanContext {
            atom_a,
            atom_b,
            medium,
            tol: config.tolerance(),
            isotropic: config.isotropic,
        })
    }

    fn pair_green(&self, a: &TwoLevelAtom, b: &TwoLevelAtom) -> Result<AtomPairGreen<'_>> {
        Ok(if self.isotropic {
            AtomPairGreen::isotropic(a, b, &self.medium)?
        } else {
            AtomPairGreen::between(a, b, &self.medium)?
        })
    }

    fn lineshape(atom: &TwoLevelAtom) -> Result<Lineshape> {
        Ok(match atom.linewidth {
            Some(g) if g > 0.0 => Lineshape::lorentzian(atom.omega, g)?,
            _ => Lineshape::delta(atom.omega)?,
        })
    }
}

fn radii(r_min: f64, r_max: f64, points: usize, spacing: Spacing) -> Vec<f64> {
    (0..points)
        .map(|i| {
            let t = i as f64 / (points - 1) as f64;
            match spacing {
                Spacing::Log => r_min * (r_max / r_min).powf(t),
                Spacing::Linear => r_min + (r_max - r_min) * t,
            }
        })
        .collect()
}

fn state_check(quantity: Quantity, config: &RunConfig) -> Result<()> {
    let (sa, sb) = (config.atoms.a.state, config.atoms.b.state);
    match quantity {
        Quantity::Gg if sa != StateConfig::Ground || sb != StateConfig::Ground => {
            bail!("quantity `gg` needs both atoms in the ground state")
        }
        Quantity::GeKeldysh | Quantity::GeFeynman | Quantity::Fret
            if sa != StateConfig::Excited || sb != StateConfig::Ground =>
        {
            bail!("quantity `{}` needs atoms.a excited and atoms.b ground", quantity.name())
        }
        _ => Ok(()),
    }
}

fn self_energy_cells(se: &SelfEnergy) -> Vec<f64> {
    let to_si = |v: Complex64| (units::rate_au_to_si(v.re), units::rate_au_to_si(v.im));
    let (nr_re, nr_im) = to_si(se.nonresonant);
    let (res_re, res_im) = to_si(se.resonant);
    let (osc_re, osc_im) = to_si(se.oscillating);
    vec![
        units::rate_au_to_si(se.shift()),
        units::rate_au_to_si(se.width()),
        nr_re,
        nr_im,
        res_re,
        res_im,
        osc_re,
        osc_im,
    ]
}

/// One row per separation: r, the dimensionless kr at the reference
/// frequency, the requested quantity's breakdown, and (for the excited-atom
/// self-energies) the other ordering for side-by-side comparison.  Per-point
/// failures land in the error column; the scan keeps going.
pub fn run_scan(config: &RunConfig, base_dir: &Path, quantity: Quantity, workers: usize) -> Result<Table> {
    let scan = config.scan.as_ref().context("config has no [scan] section")?;
    state_check(quantity, config)?;
    let ctx = ScanContext::from_config(config, base_dir)?;

    let direction = {
        let d = ctx.atom_b.position - ctx.atom_a.position;
        let n = d.norm();
        if n == 0.0 {
            bail!("atoms.a and atoms.b positions coincide; the scan direction is undefined");
        }
        d / n
    };

    // Reference frequency for kr: the donor transition for the excited-atom
    // quantities, the partner transition for the ground pair.
    let omega_ref = match quantity {
        Quantity::Gg => ctx.atom_b.omega,
        _ => ctx.atom_a.omega,
    };
    let index = ctx
        .medium
        .refractive_index(Complex64::new(omega_ref, 0.0))
        .map(|n| n.re)
        .unwrap_or(f64::NAN);

    let mut columns: Vec<&str> = vec!["r_m", "kr"];
    match quantity {
        Quantity::Gg => columns.extend([
            "shift",
            "width",
            "nonresonant_re",
            "nonresonant_im",
            "resonant_re",
            "resonant_im",
            "oscillating_re",
            "oscillating_im",
        ]),
        Quantity::GeKeldysh | Quantity::GeFeynman => columns.extend([
            "shift",
            "width",
            "nonresonant_re",
            "nonresonant_im",
            "resonant_re",
            "resonant_im",
            "oscillating_re",
            "oscillating_im",
            "alt_shift",
            "alt_width",
        ]),
        Quantity::Fret => columns.extend(["rate", "spectral_density"]),
        _ => bail!("quantity `{}` is not a distance scan; use its subcommand", quantity.name()),
    }
    let n_cells = columns.len();

    let rs = radii(scan.r_min, scan.r_max, scan.points, scan.spacing);
    let eval_point = |r_m: &f64| -> (Vec<f64>, String) {
        let r_au = units::length_si_to_au(*r_m);
        let mut b = ctx.atom_b.clone();
        b.position = ctx.atom_a.position + direction * r_au;
        let kr = index * omega_ref * r_au / ctx.medium.c();

        let result: Result<Vec<f64>> = (|| {
            let green = ctx.pair_green(&ctx.atom_a, &b)?;
            let mut cells = vec![*r_m, kr];
            match quantity {
                Quantity::Gg => {
                    let se = sigma_gg_with(&green, ctx.atom_a.omega, b.omega, ctx.tol)?;
                    cells.extend(self_energy_cells(&se));
                }
                Quantity::GeKeldysh | Quantity::GeFeynman => {
                    let args =
                        (ctx.atom_a.omega, b.omega, ctx.atom_a.gamma(), b.gamma(), ctx.tol);
                    let (main, alt) = if quantity == Quantity::GeKeldysh {
                        (
                            sigma_ge_keldysh_with(&green, args.0, args.1, args.2, args.3, args.4)?,
                            sigma_ge_feynman_with(&green, args.0, args.1, args.2, args.3, args.4)?,
                        )
                    } else {
                        (
                            sigma_ge_feynman_with(&green, args.0, args.1, args.2, args.3, args.4)?,
                            sigma_ge_keldysh_with(&green, args.0, args.1, args.2, args.3, args.4)?,
                        )
                    };
                    cells.extend(self_energy_cells(&main));
                    cells.push(units::rate_au_to_si(alt.shift()));
                    cells.push(units::rate_au_to_si(alt.width()));
                }
                Quantity::Fret => {
                    let la = ScanContext::lineshape(&ctx.atom_a)?;
                    let lb = ScanContext::lineshape(&b)?;
                    let rate = fret_rate_with(&green, &la, &lb, ctx.tol)?;
                    cells.push(units::rate_au_to_si(rate.rate));
                    cells.push(if rate.spectral_density { 1.0 } else { 0.0 });
                }
                _ => unreachable!(),
            }
            Ok(cells)
        })();

        match result {
            Ok(cells) => (cells, String::new()),
            Err(e) => {
                let mut cells = vec![*r_m, kr];
                cells.resize(n_cells, f64::NAN);
                (cells, format!("{e:#}"))
            }
        }
    };

    let rows: Vec<(Vec<f64>, String)> = if workers <= 1 {
        rs.iter().map(eval_point).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .context("cannot build worker pool")?;
        pool.install(|| rs.par_iter().map(eval_point).collect())
    };

    let mut table = Table::new(&columns);
    for (cells, error) in rows {
        table.push(cells, error);
    }
    Ok(table)
}

/// Point rates at the configured geometry: spontaneous emission for the
/// excited atom, thermal absorption for ground atoms, and the transfer rate
/// when the pair is donor/acceptor.  Values in 1/s.
pub fn run_rates(config: &RunConfig, base_dir: &Path) -> Result<(Table, Vec<String>)> {
    let ctx = ScanContext::from_config(config, base_dir)?;
    let t_au = config.temperature_au();

    let mut columns: Vec<&str> = Vec::new();
    let mut cells: Vec<f64> = Vec::new();
    let mut notes: Vec<String> = Vec::new();

    for (label_g0, label_abs, atom) in
        [("gamma0_a", "gamma_abs_a", &ctx.atom_a), ("gamma0_b", "gamma_abs_b", &ctx.atom_b)]
    {
        if atom.is_excited() {
            let g0 = gamma_spontaneous(atom, &ctx.medium)?;
            columns.push(label_g0);
            cells.push(units::rate_au_to_si(g0));
            notes.push(format!("{label_g0} = {:e} 1/s (spontaneous emission)", units::rate_au_to_si(g0)));
        } else {
            let gabs = gamma_thermal_absorption(atom, &ctx.medium, t_au)?;
            columns.push(label_abs);
            cells.push(units::rate_au_to_si(gabs));
            notes.push(format!(
                "{label_abs} = {:e} 1/s (thermal absorption at {} K)",
                units::rate_au_to_si(gabs),
                config.temperature
            ));
        }
    }

    if ctx.atom_a.is_excited() && !ctx.atom_b.is_excited() {
        let green = ctx.pair_green(&ctx.atom_a, &ctx.atom_b)?;
        let la = ScanContext::lineshape(&ctx.atom_a)?;
        let lb = ScanContext::lineshape(&ctx.atom_b)?;
        let fret = fret_rate_with(&green, &la, &lb, ctx.tol)?;
        columns.push("fret");
        cells.push(units::rate_au_to_si(fret.rate));
        columns.push("fret_spectral_density");
        cells.push(if fret.spectral_density { 1.0 } else { 0.0 });
        notes.push(format!(
            "fret = {:e} 1/s{}",
            units::rate_au_to_si(fret.rate),
            if fret.spectral_density { " (coefficient of the matched sharp lines)" } else { "" }
        ));
    }

    let mut table = Table::new(&columns);
    table.push(cells, String::new());
    Ok((table, notes))
}
