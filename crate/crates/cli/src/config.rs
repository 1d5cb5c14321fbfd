use casimir_core::dielectric::{make_ohmic_bath_on, BathGrid, BathMode, DielectricModel, DiscreteBath, DrudeLorentz};
use casimir_core::planar::{PlanarCavity, Polarization, Thickness};
use casimir_core::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MaterialConfig {
    Perfect,
    Vacuum,
    DrudeLorentz {
        omega_p: f64,
        #[serde(default)]
        omega_0: f64,
        #[serde(default)]
        gamma: f64,
    },
    /// Explicit bath as `[[omega_j, mass_ratio], ...]`.
    DiscreteBath {
        omega_p: f64,
        #[serde(default)]
        omega_0: f64,
        couplings: Vec<[f64; 2]>,
    },
    OhmicBath {
        omega_p: f64,
        #[serde(default)]
        omega_0: f64,
        gamma: f64,
        cutoff: f64,
        n: usize,
        #[serde(default)]
        grid: BathGrid,
    },
}

impl Default for MaterialConfig {
    fn default() -> Self {
        MaterialConfig::Perfect
    }
}

impl MaterialConfig {
    pub fn model(&self) -> Result<DielectricModel> {
        Ok(match *self {
            MaterialConfig::Perfect => DielectricModel::PerfectMirror,
            MaterialConfig::Vacuum => DielectricModel::Vacuum,
            MaterialConfig::DrudeLorentz { omega_p, omega_0, gamma } => {
                DielectricModel::DrudeLorentz(DrudeLorentz::new(omega_p, omega_0, gamma)?)
            }
            MaterialConfig::DiscreteBath {
                omega_p,
                omega_0,
                ref couplings,
            } => DielectricModel::DiscreteBath(DiscreteBath::new(
                omega_p,
                omega_0,
                couplings
                    .iter()
                    .map(|&[omega_j, mass_ratio]| BathMode { omega_j, mass_ratio })
                    .collect(),
            )?),
            MaterialConfig::OhmicBath {
                omega_p,
                omega_0,
                gamma,
                cutoff,
                n,
                grid,
            } => DielectricModel::DiscreteBath(make_ohmic_bath_on(omega_p, omega_0, gamma, cutoff, n, grid)?),
        })
    }

    pub fn label(&self) -> &'static str {
        match self {
            MaterialConfig::Perfect => "perfect",
            MaterialConfig::Vacuum => "vacuum",
            MaterialConfig::DrudeLorentz { .. } => "drude_lorentz",
            MaterialConfig::DiscreteBath { .. } => "discrete_bath",
            MaterialConfig::OhmicBath { .. } => "ohmic_bath",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    pub gaps: Vec<f64>,
    /// Absent for bulk mirrors.
    pub slab_thickness: Option<f64>,
    /// Temperature as the wavenumber `2πk_BT/(ħc)`.
    pub temperature: f64,
    pub area: f64,
    pub reference_gap: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig {
            gaps: vec![1.0],
            slab_thickness: None,
            temperature: 0.0,
            area: 1.0,
            reference_gap: 20.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LifshitzRoute {
    #[default]
    ZeroT,
    Matsubara,
    RealFrequency,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LifshitzConfig {
    pub route: LifshitzRoute,
    pub omega_max: f64,
    pub pressure: bool,
}

impl Default for LifshitzConfig {
    fn default() -> Self {
        LifshitzConfig {
            route: LifshitzRoute::ZeroT,
            omega_max: 400.0,
            pressure: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModesConfig {
    pub polarizations: Vec<Polarization>,
    pub k: Vec<f64>,
    /// `Λ = cutoff_factor·(k + 1/L)`.
    pub cutoff_factor: f64,
    pub accumulation_periods: usize,
    /// Replace the per-channel rows by one k-integrated energy per gap.
    pub integrate_k: bool,
}

impl Default for ModesConfig {
    fn default() -> Self {
        ModesConfig {
            polarizations: vec![Polarization::TE, Polarization::TM],
            k: vec![0.5],
            cutoff_factor: 15.0,
            accumulation_periods: 200,
            integrate_k: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ComplexModesConfig {
    pub polarizations: Vec<Polarization>,
    pub k: Vec<f64>,
    pub quasistatic: bool,
    pub re_max: f64,
    pub im_min: f64,
    /// Positive values reach above the real axis, allowed for quasistatic searches only.
    pub im_max: f64,
    /// `Λ` of the counterterm; defaults to `ω_p`.
    pub cutoff: Option<f64>,
}

impl Default for ComplexModesConfig {
    fn default() -> Self {
        ComplexModesConfig {
            polarizations: vec![Polarization::TM],
            k: vec![0.1, 0.5, 2.0],
            quasistatic: false,
            re_max: 5.0,
            im_min: -5.0,
            im_max: 0.0,
            cutoff: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolderQuantity {
    EnergyExact,
    EnergyPerturbative,
    ForceExact,
    ForcePerturbative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolderConfig {
    pub m0: f64,
    pub k0: f64,
    pub q: f64,
    pub a: f64,
    pub distances: Vec<f64>,
    pub quantities: Vec<PolderQuantity>,
}

impl Default for PolderConfig {
    fn default() -> Self {
        PolderConfig {
            m0: 1.0,
            k0: 1.0,
            q: 0.01,
            a: 0.05,
            distances: vec![10.0, 100.0, 1000.0],
            quantities: vec![PolderQuantity::EnergyExact, PolderQuantity::EnergyPerturbative],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IdentityConfig {
    pub sweep: usize,
}

impl Default for IdentityConfig {
    fn default() -> Self {
        IdentityConfig { sweep: 50 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Wavenumber, in 1/m, that makes every physical input dimensionless. Reported only.
    pub reference_wavenumber: f64,
    pub geometry: GeometryConfig,
    pub material: MaterialConfig,
    pub lifshitz: LifshitzConfig,
    pub modes: ModesConfig,
    pub complex_modes: ComplexModesConfig,
    pub polder: PolderConfig,
    pub identity: IdentityConfig,
    pub output: OutputConfig,
    pub tol: Option<f64>,
    pub seed: u64,
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            reference_wavenumber: 1.0,
            geometry: GeometryConfig::default(),
            material: MaterialConfig::default(),
            lifshitz: LifshitzConfig::default(),
            modes: ModesConfig::default(),
            complex_modes: ComplexModesConfig::default(),
            polder: PolderConfig::default(),
            identity: IdentityConfig::default(),
            output: OutputConfig::default(),
            tol: None,
            seed: 7,
            threads: 1,
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> std::result::Result<RunConfig, String> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        cfg.check().map_err(|e| e.to_string())?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> std::result::Result<RunConfig, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        RunConfig::parse(&text)
    }

    pub fn check(&self) -> Result<()> {
        if let Some(t) = self.tol {
            if !(t > 0.0) {
                return Err(Error::InvalidInput(format!("tolerance must be > 0, got {t}")));
            }
        }
        if !(self.reference_wavenumber > 0.0) {
            return Err(Error::InvalidInput("reference_wavenumber must be > 0".into()));
        }
        if self.geometry.gaps.is_empty() {
            return Err(Error::InvalidInput("geometry.gaps must not be empty".into()));
        }
        Ok(())
    }

    pub fn thickness(&self) -> Thickness {
        match self.geometry.slab_thickness {
            Some(d) => Thickness::Finite(d),
            None => Thickness::Bulk,
        }
    }

    pub fn cavity(&self, gap: f64) -> Result<PlanarCavity> {
        PlanarCavity::new(gap, self.thickness(), self.material.model()?, self.geometry.temperature)
    }
}
