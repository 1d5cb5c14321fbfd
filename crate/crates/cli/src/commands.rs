use casimir_core::dielectric::DielectricModel;
use casimir_core::lifshitz::{
    channel_energy_zero_t, energy_zero_t_with, free_energy_matsubara_with, free_energy_real_frequency, pressure,
    EnergyResult, DEFAULT_TOL,
};
use casimir_core::modes::{
    find_resonances, generalized_mode_sum_with, identity_check, mode_route_energy, quasistatic_channel_energy,
    reference_resonances, sum_over_modes_energy, KIntegrationOptions, ModeSumOptions,
};
use casimir_core::numerics::Rectangle;
use casimir_core::planar::{Polarization, TransverseChannel};
use casimir_core::polder::{cp_energy_exact, cp_energy_perturbative, cp_force, CpMode, GaussianDipole, HalfSpaceGeometry};
use casimir_core::{Error, Result};
use std::f64::consts::PI;

use crate::config::{LifshitzRoute, PolderQuantity, RunConfig};
use crate::sweep::identity_sweep;
use crate::table::{Cell, Table};

pub fn lifshitz(cfg: &RunConfig) -> Result<Table> {
    let mut t = Table::new(
        "lifshitz",
        &[
            "route",
            "material",
            "gap",
            "slab_thickness",
            "temperature",
            "value",
            "abs_error",
            "evaluations",
            "matsubara_terms",
            "omega_max",
            "accuracy_degraded",
            "pressure",
        ],
    );
    let area = cfg.geometry.area;
    for &gap in &cfg.geometry.gaps {
        let cavity = cfg.cavity(gap)?;
        let r: EnergyResult = match cfg.lifshitz.route {
            LifshitzRoute::ZeroT => energy_zero_t_with(&cavity, cfg.tol.unwrap_or(DEFAULT_TOL))?,
            LifshitzRoute::Matsubara => free_energy_matsubara_with(&cavity, cfg.tol.unwrap_or(DEFAULT_TOL))?,
            LifshitzRoute::RealFrequency => {
                free_energy_real_frequency(&cavity, cfg.lifshitz.omega_max, cfg.tol.unwrap_or(1e-4))?
            }
        };
        let p = if cfg.lifshitz.pressure { Some(pressure(&cavity)?) } else { None };
        t.push(vec![
            r.route.label().into(),
            cfg.material.label().into(),
            gap.into(),
            Cell::opt(cfg.geometry.slab_thickness),
            cfg.geometry.temperature.into(),
            (r.value * area).into(),
            (r.abs_error * area).into(),
            r.metadata.evaluations.into(),
            r.metadata.matsubara_terms.map(Cell::from).unwrap_or(Cell::Empty),
            Cell::opt(r.metadata.omega_max),
            r.metadata.accuracy_degraded.into(),
            Cell::opt(p),
        ]);
    }
    Ok(t)
}

pub fn modes(cfg: &RunConfig) -> Result<Table> {
    let mut t = Table::new(
        "modes",
        &[
            "route",
            "polarization",
            "k",
            "gap",
            "reference_gap",
            "value",
            "abs_error",
            "oracle",
            "modes_at_gap",
            "modes_at_reference",
            "cutoff",
        ],
    );
    let l_ref = cfg.geometry.reference_gap;
    let area = cfg.geometry.area;
    let m = &cfg.modes;
    for &gap in &cfg.geometry.gaps {
        let cavity = cfg.cavity(gap)?;
        if m.integrate_k {
            let opts = KIntegrationOptions {
                cutoff_factor: m.cutoff_factor,
                threads: cfg.threads,
                ..KIntegrationOptions::default()
            };
            let r = mode_route_energy(&cavity, l_ref, &opts)?;
            let tol = cfg.tol.unwrap_or(DEFAULT_TOL);
            let oracle = energy_zero_t_with(&cavity, tol)?.value - energy_zero_t_with(&cavity.with_gap(l_ref), tol)?.value;
            t.push(vec![
                "mode_sum".into(),
                "TE+TM".into(),
                Cell::Empty,
                gap.into(),
                l_ref.into(),
                (r.value * area).into(),
                ((r.value - oracle).abs() * area).into(),
                (oracle * area).into(),
                r.modes.into(),
                Cell::Empty,
                Cell::Empty,
            ]);
            continue;
        }
        for &p in &m.polarizations {
            for &k in &m.k {
                let channel = TransverseChannel::new(p, k)?;
                let opts = ModeSumOptions {
                    accumulation_periods: m.accumulation_periods,
                    ..ModeSumOptions::with_cutoff_factor(gap, k, m.cutoff_factor)
                };
                let r = sum_over_modes_energy(&cavity, channel, l_ref, &opts)?;
                let tol = cfg.tol.unwrap_or(1e-12);
                let oracle = channel_energy_zero_t(&cavity, channel, tol)?
                    - channel_energy_zero_t(&cavity.with_gap(l_ref), channel, tol)?;
                t.push(vec![
                    "mode_sum".into(),
                    p.label().into(),
                    k.into(),
                    gap.into(),
                    l_ref.into(),
                    r.value.into(),
                    (r.value - oracle).abs().into(),
                    oracle.into(),
                    r.modes_at_gap.into(),
                    r.modes_at_reference.into(),
                    opts.cutoff.into(),
                ]);
            }
        }
    }
    Ok(t)
}

pub fn complex_modes(cfg: &RunConfig) -> Result<Table> {
    let mut t = Table::new(
        "complex-modes",
        &[
            "route",
            "polarization",
            "k",
            "gap",
            "kind",
            "index",
            "re",
            "im",
            "closed_form",
            "value",
            "abs_error",
            "oracle",
        ],
    );
    let c = &cfg.complex_modes;
    let region = Rectangle::new(0.0, c.re_max, c.im_min, c.im_max)?;
    let tol = cfg.tol.unwrap_or(1e-6);
    for &gap in &cfg.geometry.gaps {
        let cavity = cfg.cavity(gap)?;
        let drude = match &cavity.mirror {
            DielectricModel::DrudeLorentz(m) => *m,
            _ => return Err(Error::InvalidInput("complex-modes needs a drude_lorentz material".into())),
        };
        let lambda = c.cutoff.unwrap_or(drude.omega_p);
        let lossless_plasma = c.quasistatic && drude.gamma == 0.0 && drude.omega_0 == 0.0;
        for &p in &c.polarizations {
            for &k in &c.k {
                let channel = TransverseChannel::new(p, k)?;
                let set = find_resonances(&cavity, channel, &region, c.quasistatic)?;
                let base = |kind: &str, index: usize| -> Vec<Cell> {
                    vec!["complex_mode_sum".into(), p.label().into(), k.into(), gap.into(), kind.into(), index.into()]
                };
                for (i, z) in set.complex_pairs.iter().enumerate() {
                    let closed = if lossless_plasma && p == Polarization::TM && set.complex_pairs.len() == 2 {
                        let sign = if i == 0 { -1.0 } else { 1.0 };
                        let wp2 = drude.omega_p * drude.omega_p;
                        Some((0.5 * wp2 * (1.0 + sign * (-k * gap).exp())).sqrt())
                    } else {
                        None
                    };
                    let mut row = base("pair", i);
                    row.extend([z.re.into(), z.im.into(), Cell::opt(closed), Cell::Empty, Cell::Empty, Cell::Empty]);
                    t.push(row);
                }
                for (i, xi) in set.imaginary_modes.iter().enumerate() {
                    let mut row = base("imaginary", i);
                    row.extend([0.0.into(), (-xi).into(), Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty]);
                    t.push(row);
                }
                let reference = reference_resonances(&cavity, channel, &region, c.quasistatic)?;
                let sums = generalized_mode_sum_with(&set, &reference, lambda, tol)
                    .and_then(|a| generalized_mode_sum_with(&set, &reference, 10.0 * lambda, tol).map(|b| (a, b)));
                let (a, b) = match sums {
                    Ok(v) => v,
                    Err(e @ Error::SumRuleViolation { .. }) => {
                        eprintln!("{} k={k} gap={gap}: {e}; energy row omitted", p.label());
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let oracle = if c.quasistatic && p == Polarization::TM {
                    Some(quasistatic_channel_energy(&drude, k, gap)?)
                } else {
                    None
                };
                let mut row = base("energy", 0);
                row.extend([
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    a.value.into(),
                    ((a.value - b.value).abs() + a.sum_rule_residual.abs()).into(),
                    Cell::opt(oracle),
                ]);
                t.push(row);
            }
        }
    }
    Ok(t)
}

pub fn casimir_polder(cfg: &RunConfig) -> Result<Table> {
    let mut t = Table::new(
        "casimir-polder",
        &["route", "mirror", "distance", "a", "static_polarizability", "value", "abs_error", "far_zone"],
    );
    let p = &cfg.polder;
    let dipole = GaussianDipole::new(p.m0, p.k0, p.q, p.a)?;
    let mirror = cfg.material.model()?;
    let a0 = dipole.static_polarizability();
    for &z in &p.distances {
        let geometry = HalfSpaceGeometry::new(mirror.clone(), z)?;
        for &q in &p.quantities {
            let (route, r, far) = match q {
                PolderQuantity::EnergyExact => ("cp_energy_exact", cp_energy_exact(&dipole, &geometry)?, -3.0 * a0 / (8.0 * PI * z.powi(4))),
                PolderQuantity::EnergyPerturbative => (
                    "cp_energy_perturbative",
                    cp_energy_perturbative(&dipole, &geometry)?,
                    -3.0 * a0 / (8.0 * PI * z.powi(4)),
                ),
                PolderQuantity::ForceExact => (
                    "cp_force_exact",
                    cp_force(&dipole, &geometry, CpMode::Exact)?,
                    -3.0 * a0 / (2.0 * PI * z.powi(5)),
                ),
                PolderQuantity::ForcePerturbative => (
                    "cp_force_perturbative",
                    cp_force(&dipole, &geometry, CpMode::Perturbative)?,
                    -3.0 * a0 / (2.0 * PI * z.powi(5)),
                ),
            };
            let far = if matches!(mirror, DielectricModel::PerfectMirror) { Some(far) } else { None };
            t.push(vec![
                route.into(),
                cfg.material.label().into(),
                z.into(),
                p.a.into(),
                a0.into(),
                r.value.into(),
                r.abs_error.into(),
                Cell::opt(far),
            ]);
        }
    }
    Ok(t)
}

pub fn identity(cfg: &RunConfig) -> Result<Table> {
    let mut t = Table::new(
        "identity-check",
        &[
            "route",
            "index",
            "family",
            "scale",
            "omega_re",
            "omega_im",
            "principal_value",
            "lhs",
            "rhs",
            "gap",
            "tolerance",
            "passed",
        ],
    );
    for (i, case) in identity_sweep(cfg.identity.sweep, cfg.seed, cfg.tol).iter().enumerate() {
        let r = identity_check(case)?;
        let family = match case.f_spec {
            casimir_core::modes::TestFunction::ExponentialCutoff { .. } => "exponential_cutoff",
            casimir_core::modes::TestFunction::Rational { .. } => "rational",
        };
        t.push(vec![
            "identity".into(),
            i.into(),
            family.into(),
            case.f_spec.scale().into(),
            case.omega_0.re.into(),
            case.omega_0.im.into(),
            r.principal_value.into(),
            r.lhs.into(),
            r.rhs.into(),
            r.gap.into(),
            case.tolerance.into(),
            (r.gap < case.tolerance).into(),
        ]);
    }
    Ok(t)
}
