//! Run configuration: a TOML file with nested sections, SI units at the
//! boundary.  `validate` reports offending fields by path; unit conversion
//! happens once, here.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use vdw_core::atom::{AtomState, TwoLevelAtom};
use vdw_core::green::{Medium, PermittivityTable};
use vdw_core::quadrature::Tolerance;

use crate::units;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub atoms: AtomsConfig,
    pub medium: MediumConfig,
    /// Kelvin.
    #[serde(default)]
    pub temperature: f64,
    #[serde(default)]
    pub scan: Option<ScanConfig>,
    #[serde(default)]
    pub tolerances: TolerancesConfig,
    /// Output table path (may be overridden on the command line).
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Orientation-average the dipole contraction (1/3 trace).
    #[serde(default)]
    pub isotropic: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomsConfig {
    pub a: AtomConfig,
    pub b: AtomConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomConfig {
    /// Meters.
    pub position: [f64; 3],
    /// Transition frequency, rad/s.
    pub omega: f64,
    /// Transition dipole, atomic units (e·a₀).
    pub dipole: [f64; 3],
    pub state: StateConfig,
    /// Optional FWHM linewidth, rad/s.
    #[serde(default)]
    pub linewidth: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateConfig {
    Ground,
    Excited,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumConfig {
    pub model: MediumModelConfig,
    #[serde(default)]
    pub epsilon: Option<f64>,
    /// Path to a tabulated-permittivity file (ω in rad/s).
    #[serde(default)]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MediumModelConfig {
    Vacuum,
    Constant,
    Tabulated,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub quantity: Quantity,
    /// Meters.
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
    #[serde(default = "default_spacing")]
    pub spacing: Spacing,
}

fn default_spacing() -> Spacing {
    Spacing::Log
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Gg,
    GeKeldysh,
    GeFeynman,
    Fret,
    Rates,
    Identities,
    Oracle,
}

impl Quantity {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "gg" => Quantity::Gg,
            "ge_keldysh" => Quantity::GeKeldysh,
            "ge_feynman" => Quantity::GeFeynman,
            "fret" => Quantity::Fret,
            "rates" => Quantity::Rates,
            "identities" => Quantity::Identities,
            "oracle" => Quantity::Oracle,
            other => bail!(
                "unknown quantity `{other}` (expected gg, ge_keldysh, ge_feynman, fret, rates, identities or oracle)"
            ),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Quantity::Gg => "gg",
            Quantity::GeKeldysh => "ge_keldysh",
            Quantity::GeFeynman => "ge_feynman",
            Quantity::Fret => "fret",
            Quantity::Rates => "rates",
            Quantity::Identities => "identities",
            Quantity::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Log,
    Linear,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesConfig {
    pub rel: f64,
    pub abs: f64,
}

impl Default for TolerancesConfig {
    fn default() -> Self {
        TolerancesConfig { rel: 1e-9, abs: 1e-14 }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        let config: RunConfig = toml::from_str(&text)
            .with_context(|| format!("cannot parse config file {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, atom) in [("atoms.a", &self.atoms.a), ("atoms.b", &self.atoms.b)] {
            if !(atom.omega > 0.0) || !atom.omega.is_finite() {
                bail!("{name}.omega: must be a positive frequency in rad/s, got {}", atom.omega);
            }
            if let Some(lw) = atom.linewidth {
                if !(lw >= 0.0) || !lw.is_finite() {
                    bail!("{name}.linewidth: must be ≥ 0, got {lw}");
                }
            }
            if atom.position.iter().any(|x| !x.is_finite())
                || atom.dipole.iter().any(|x| !x.is_finite())
            {
                bail!("{name}: position and dipole entries must be finite");
            }
        }
        if !(self.temperature >= 0.0) || !self.temperature.is_finite() {
            bail!("temperature: must be ≥ 0 K, got {}", self.temperature);
        }
        match self.medium.model {
            MediumModelConfig::Constant => {
                let eps = self
                    .medium
                    .epsilon
                    .context("medium.epsilon: required for the constant model")?;
                if !(eps >= 1.0) || !eps.is_finite() {
                    bail!("medium.epsilon: must be ≥ 1, got {eps}");
                }
            }
            MediumModelConfig::Tabulated => {
                if self.medium.table.is_none() {
                    bail!("medium.table: required for the tabulated model");
                }
            }
            MediumModelConfig::Vacuum => {}
        }
        if let Some(scan) = &self.scan {
            if !(scan.r_min > 0.0) || !scan.r_min.is_finite() {
                bail!("scan.r_min: must be a positive length in meters, got {}", scan.r_min);
            }
            if !(scan.r_max > scan.r_min) {
                bail!("scan.r_max: must exceed scan.r_min ({} ≤ {})", scan.r_max, scan.r_min);
            }
            if scan.points < 2 {
                bail!("scan.points: need at least 2, got {}", scan.points);
            }
        }
        if !(self.tolerances.rel > 0.0) || !(self.tolerances.abs >= 0.0) {
            bail!(
                "tolerances: rel must be > 0 and abs ≥ 0, got rel = {}, abs = {}",
                self.tolerances.rel,
                self.tolerances.abs
            );
        }
        Ok(())
    }

    /// Atoms converted to atomic units.
    pub fn atoms_au(&self) -> Result<(TwoLevelAtom, TwoLevelAtom)> {
        Ok((self.atoms.a.to_au("atoms.a")?, self.atoms.b.to_au("atoms.b")?))
    }

    /// Medium in atomic units (c = 1/α), resolving table paths relative to
    /// `base_dir`.
    pub fn medium_au(&self, base_dir: &Path) -> Result<Medium> {
        let medium = match self.medium.model {
            MediumModelConfig::Vacuum => Medium::vacuum(),
            MediumModelConfig::Constant => {
                Medium::constant(self.medium.epsilon.expect("validated")).map_err(anyhow::Error::from)?
            }
            MediumModelConfig::Tabulated => {
                let rel = self.medium.table.as_ref().expect("validated");
                let path = if rel.is_absolute() { rel.clone() } else { base_dir.join(rel) };
                let text = std::fs::read_to_string(&path)
                    .with_context(|| format!("cannot read medium table {}", path.display()))?;
                let table = PermittivityTable::parse(&text)
                    .with_context(|| format!("medium table {}", path.display()))?
                    .scale_frequencies(units::ATOMIC_TIME_S);
                Medium::tabulated(table)
            }
        };
        Ok(medium.with_speed_of_light(units::C_AU))
    }

    pub fn temperature_au(&self) -> f64 {
        units::temperature_k_to_au(self.temperature)
    }

    pub fn tolerance(&self) -> Tolerance {
        Tolerance { rel: self.tolerances.rel, abs: self.tolerances.abs, ..Tolerance::default() }
    }

    /// Resolved config as `#`-prefixed header lines for output provenance.
    pub fn provenance(&self) -> Vec<String> {
        let toml = toml::to_string_pretty(self).unwrap_or_default();
        toml.lines().map(|l| l.to_string()).collect()
    }
}

impl AtomConfig {
    fn to_au(&self, field: &str) -> Result<TwoLevelAtom> {
        let position = Vector3::from(self.position).map(units::length_si_to_au);
        let dipole = Vector3::from(self.dipole);
        let state = match self.state {
            StateConfig::Ground => AtomState::Ground,
            StateConfig::Excited => AtomState::Excited,
        };
        let mut atom = TwoLevelAtom::new(position, units::omega_si_to_au(self.omega), dipole, state)
            .with_context(|| format!("{field}: invalid atom"))?;
        if let Some(lw) = self.linewidth {
            atom = atom
                .with_linewidth(units::omega_si_to_au(lw))
                .with_context(|| format!("{field}.linewidth"))?;
        }
        Ok(atom)
    }
}
