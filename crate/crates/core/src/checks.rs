//! Built-in verification suite run by `casimir check`.
//!
//! Each check exercises one identity of the theory on the configured system,
//! on canned reference systems, or both. Any numerical error inside a check
//! counts as a failure of that check.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::config::RunConfig;
use crate::error::Result;
use crate::fresnel::{stack_coefficients, Layer, PlateModel};
use crate::kernel::{effective_denominator, n_denominator, two_stack_denominator, DenominatorPath, SystemConfig};
use crate::materials::{MaterialModel, Polarization, SpectralPoint, HBAR, SPEED_OF_LIGHT};
use crate::quadrature::{casimir_energy_parts, casimir_forces_with, CasimirResult, Prefactors, QuadratureSpec};

/// Finite-difference checks need a quadrature at least this tight.
pub const FD_MAX_REL_TOL: f64 = 1e-7;
pub const FD_TOL: f64 = 1e-5;
pub const FD_STEP: f64 = 1e-3;
pub const SUM_RULE_TOL: f64 = 1e-10;
pub const MIRROR_ENERGY_TOL: f64 = 1e-10;
pub const MIRROR_FORCE_TOL: f64 = 1e-9;
pub const REDUCTION_TOL: f64 = 1e-9;
pub const IDEAL_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CheckReport {
    pub outcomes: Vec<CheckOutcome>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.status != CheckStatus::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.outcomes.iter().filter(|o| o.status == CheckStatus::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&CheckOutcome> {
        self.outcomes.iter().find(|o| o.name == name)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for o in &self.outcomes {
            let tag = match o.status {
                CheckStatus::Pass => "PASS",
                CheckStatus::Fail => "FAIL",
                CheckStatus::Skip => "SKIP",
            };
            let _ = writeln!(s, "{tag} {:<20} {}", o.name, o.detail);
        }
        s
    }
}

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn verdict(name: &'static str, worst: f64, tol: f64, what: &str) -> CheckOutcome {
    CheckOutcome {
        name,
        status: if worst <= tol {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        detail: format!("{what} = {worst:.3e} (tol {tol:.0e})"),
    }
}

fn outcome(name: &'static str, run: impl FnOnce() -> Result<CheckOutcome>) -> CheckOutcome {
    run().unwrap_or_else(|e| CheckOutcome {
        name,
        status: CheckStatus::Fail,
        detail: e.to_string(),
    })
}

fn sample_points(sys: &SystemConfig) -> Vec<SpectralPoint> {
    let length = sys.total_gap();
    let xi_scale = SPEED_OF_LIGHT / length;
    let mut pts = Vec::new();
    for u in [0.1, 1.0, 5.0] {
        for v in [0.1, 1.0, 5.0] {
            for q in Polarization::BOTH {
                pts.push(SpectralPoint::new(u * xi_scale, v / length, q));
            }
        }
    }
    pts
}

/// Every pair of touching media, medium layers and plate coatings alike.
fn interfaces(sys: &SystemConfig) -> Vec<(MaterialModel, MaterialModel)> {
    let medium = sys.medium();
    let mut pairs: Vec<(MaterialModel, MaterialModel)> = medium
        .windows(2)
        .map(|w| (w[0].material.clone(), w[1].material.clone()))
        .collect();
    for (plate, adjacent) in [
        (sys.plate_left(), &medium[0].material),
        (sys.plate_right(), &medium[medium.len() - 1].material),
    ] {
        if let PlateModel::CoatedHalfSpace { coatings, substrate } = plate {
            let chain: Vec<&MaterialModel> = std::iter::once(adjacent)
                .chain(coatings.iter().map(|l| &l.material))
                .chain(std::iter::once(substrate))
                .collect();
            pairs.extend(chain.windows(2).map(|w| (w[0].clone(), w[1].clone())));
        }
    }
    pairs.retain(|(a, b)| a != b);
    pairs
}

fn check_a_identity(sys: &SystemConfig) -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    for (m1, m2) in interfaces(sys) {
        for pt in sample_points(sys) {
            let a = stack_coefficients(&[], &m1, &m2, &pt)?.a();
            worst = worst.max((a - 1.0).abs());
        }
    }
    Ok(verdict("a_identity", worst, 1e-14, "max |a - 1| over interfaces"))
}

fn check_a_symmetry(sys: &SystemConfig) -> Result<CheckOutcome> {
    let medium = sys.medium();
    let n = medium.len();
    let (first, last) = (&medium[0].material, &medium[n - 1].material);
    let inner: &[Layer] = if n > 2 { &medium[1..n - 1] } else { &[] };
    let reversed: Vec<Layer> = inner.iter().rev().cloned().collect();
    let mut worst: f64 = 0.0;
    for pt in sample_points(sys) {
        let fwd = stack_coefficients(inner, first, last, &pt)?;
        let bwd = stack_coefficients(&reversed, last, first, &pt)?;
        worst = worst.max(rel(fwd.a(), bwd.a()));
    }
    Ok(verdict("a_symmetry", worst, 1e-12, "max rel |a_1n - a_n1|"))
}

fn check_factorization(sys: &SystemConfig) -> Result<CheckOutcome> {
    let n = sys.layer_count();
    if n < 3 {
        return Ok(CheckOutcome {
            name: "factorization",
            status: CheckStatus::Skip,
            detail: format!("needs an intermediate layer, system has n = {n}"),
        });
    }
    let mut worst: f64 = 0.0;
    for pt in sample_points(sys) {
        let nn = n_denominator(sys, &pt)?;
        for l in 2..n {
            let eff = effective_denominator(sys, l, &pt)?;
            let d = two_stack_denominator(sys, l, &pt)?;
            worst = worst.max(rel(nn * d, eff));
        }
    }
    Ok(verdict("factorization", worst, 1e-12, "max rel |N_n D_l - N^(l)_n|"))
}

fn energy(sys: &SystemConfig, spec: &QuadratureSpec, prefactors: &Prefactors) -> Result<f64> {
    let parts = casimir_energy_parts(sys, spec)?;
    Ok((parts.values[0] + parts.values[1]) * prefactors.energy)
}

fn central_difference(
    sys: &SystemConfig,
    index: usize,
    spec: &QuadratureSpec,
    prefactors: &Prefactors,
) -> Result<f64> {
    let d = sys.layer(index)?.thickness;
    let h = FD_STEP * d;
    let plus = energy(&sys.with_thickness(index, d + h)?, spec, prefactors)?;
    let minus = energy(&sys.with_thickness(index, d - h)?, spec, prefactors)?;
    Ok((plus - minus) / (2.0 * h))
}

fn check_force_energy(
    sys: &SystemConfig,
    result: &CasimirResult,
    spec: &QuadratureSpec,
    prefactors: &Prefactors,
) -> Result<CheckOutcome> {
    if spec.rel_tol > FD_MAX_REL_TOL {
        return Ok(CheckOutcome {
            name: "force_energy_fd",
            status: CheckStatus::Skip,
            detail: format!(
                "rel_tol {:.0e} too loose for a {FD_TOL:.0e} finite-difference check (needs <= {FD_MAX_REL_TOL:.0e})",
                spec.rel_tol
            ),
        });
    }
    let n = sys.layer_count();
    let de_d1 = central_difference(sys, 1, spec, prefactors)?;
    let de_dn = if n == 1 {
        de_d1
    } else {
        central_difference(sys, n, spec, prefactors)?
    };
    let worst = rel(result.force_left, de_d1).max(rel(result.force_right, -de_dn));
    Ok(verdict("force_energy_fd", worst, FD_TOL, "max rel |F - dE/dd|"))
}

fn check_sum_rule(result: &CasimirResult) -> CheckOutcome {
    let scale = result.force_left.abs().max(result.force_right.abs());
    let residual = (result.force_left + result.force_right + result.force_stack).abs();
    let worst = if scale > 0.0 { residual / scale } else { residual };
    verdict("sum_rule", worst, SUM_RULE_TOL, "|F_S + F_L + F_R| / max|F|")
}

fn check_mirror(
    sys: &SystemConfig,
    result: &CasimirResult,
    spec: &QuadratureSpec,
    prefactors: &Prefactors,
) -> Result<CheckOutcome> {
    let m = casimir_forces_with(&sys.mirrored(), spec, prefactors, DenominatorPath::General)?;
    let de = rel(m.energy, result.energy);
    let df = rel(m.force_left, -result.force_right).max(rel(m.force_right, -result.force_left));
    let pass = de <= MIRROR_ENERGY_TOL && df <= MIRROR_FORCE_TOL;
    Ok(CheckOutcome {
        name: "mirror_identity",
        status: if pass { CheckStatus::Pass } else { CheckStatus::Fail },
        detail: format!(
            "energy rel {de:.3e} (tol {MIRROR_ENERGY_TOL:.0e}), forces rel {df:.3e} (tol {MIRROR_FORCE_TOL:.0e})"
        ),
    })
}

fn result_distance(a: &CasimirResult, b: &CasimirResult) -> f64 {
    rel(a.energy, b.energy)
        .max(rel(a.force_left, b.force_left))
        .max(rel(a.force_right, b.force_right))
}

/// Four vacuum layers against one, between identical dielectric half-spaces.
pub fn reduction_pair(total_gap: f64) -> Result<(SystemConfig, SystemConfig)> {
    let plate = PlateModel::half_space(MaterialModel::dielectric(2.25)?);
    let split = [0.1, 0.3, 0.4, 0.2].map(|f| Layer::vacuum(f * total_gap)).to_vec();
    Ok((
        SystemConfig::new(plate.clone(), split, plate.clone())?,
        SystemConfig::new(plate.clone(), vec![Layer::vacuum(total_gap)], plate)?,
    ))
}

fn check_reduction(
    sys: &SystemConfig,
    result: &CasimirResult,
    spec: &QuadratureSpec,
    prefactors: &Prefactors,
) -> Result<CheckOutcome> {
    let (four, one) = reduction_pair(1e-6)?;
    let a = casimir_forces_with(&four, spec, prefactors, DenominatorPath::General)?;
    let b = casimir_forces_with(&one, spec, prefactors, DenominatorPath::General)?;
    let canned = result_distance(&a, &b);

    let mut medium = sys.medium().to_vec();
    let first = medium[0].clone();
    medium[0].thickness /= 2.0;
    medium.insert(0, Layer::new(first.material, first.thickness / 2.0));
    let split = SystemConfig::new(sys.plate_left().clone(), medium, sys.plate_right().clone())?;
    let c = casimir_forces_with(&split, spec, prefactors, DenominatorPath::General)?;
    let own = result_distance(&c, result);

    let worst = canned.max(own);
    Ok(CheckOutcome {
        name: "lifshitz_reduction",
        status: if worst <= REDUCTION_TOL { CheckStatus::Pass } else { CheckStatus::Fail },
        detail: format!(
            "4-vs-1 vacuum layers rel {canned:.3e}, split first layer rel {own:.3e} (tol {REDUCTION_TOL:.0e})"
        ),
    })
}

/// Analytic energy and plate force for ideal mirrors across vacuum.
pub fn ideal_casimir(d: f64) -> (f64, f64) {
    let c = PI * PI * HBAR * SPEED_OF_LIGHT;
    (-c / (720.0 * d.powi(3)), c / (240.0 * d.powi(4)))
}

fn check_ideal(spec: &QuadratureSpec, prefactors: &Prefactors) -> Result<CheckOutcome> {
    let d = 1e-6;
    let sys = SystemConfig::new(PlateModel::PERFECT_CONDUCTOR, vec![Layer::vacuum(d)], PlateModel::PERFECT_CONDUCTOR)?;
    let r = casimir_forces_with(&sys, spec, prefactors, DenominatorPath::General)?;
    let (e, f) = ideal_casimir(d);
    let worst = rel(r.energy, e).max(rel(r.force_left, f)).max(rel(r.force_right, -f));
    Ok(verdict("ideal_casimir", worst, IDEAL_TOL, "rel deviation from -pi^2 hbar c/720d^3, pi^2 hbar c/240d^4"))
}

/// Runs the full suite on `cfg.system` plus the canned reference systems.
pub fn run_check(cfg: &RunConfig, prefactors: &Prefactors) -> CheckReport {
    let sys = &cfg.system;
    let spec = &cfg.quadrature;
    let mut outcomes = vec![
        outcome("a_identity", || check_a_identity(sys)),
        outcome("a_symmetry", || check_a_symmetry(sys)),
        outcome("factorization", || check_factorization(sys)),
    ];
    match casimir_forces_with(sys, spec, prefactors, DenominatorPath::General) {
        Ok(result) => {
            outcomes.push(outcome("force_energy_fd", || check_force_energy(sys, &result, spec, prefactors)));
            outcomes.push(check_sum_rule(&result));
            outcomes.push(outcome("mirror_identity", || check_mirror(sys, &result, spec, prefactors)));
            outcomes.push(outcome("lifshitz_reduction", || check_reduction(sys, &result, spec, prefactors)));
        }
        Err(e) => {
            for name in ["force_energy_fd", "sum_rule", "mirror_identity", "lifshitz_reduction"] {
                outcomes.push(CheckOutcome {
                    name,
                    status: CheckStatus::Fail,
                    detail: e.to_string(),
                });
            }
        }
    }
    outcomes.push(outcome("ideal_casimir", || check_ideal(spec, prefactors)));
    CheckReport { outcomes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    const ASYMMETRIC: &str = r#"
[plate.left]
type = "half_space"
substrate = { type = "constant", eps_inf = 9.0 }

[plate.right]
type = "phase"
rp = 1.0
rs = -1.0

[[layer]]
thickness = 300e-9
material = { type = "vacuum" }

[[layer]]
thickness = 150e-9
material = { type = "constant", eps_inf = 2.25 }

[[layer]]
thickness = 500e-9
material = { type = "constant", eps_inf = 3.0, mu_inf = 1.5 }

[quadrature]
rel_tol = 1e-9
"#;

    #[test]
    fn asymmetric_system_passes_everything() {
        let cfg = parse_config(ASYMMETRIC).unwrap();
        let report = run_check(&cfg, &Prefactors::STANDARD);
        assert!(report.passed(), "{}", report.render());
        assert!(report.outcomes.iter().all(|o| o.status == CheckStatus::Pass), "{}", report.render());
    }

    #[test]
    fn loose_tolerance_skips_finite_differences() {
        let cfg = parse_config(&ASYMMETRIC.replace("rel_tol = 1e-9", "rel_tol = 1e-2")).unwrap();
        let report = run_check(&cfg, &Prefactors::STANDARD);
        assert_eq!(report.get("force_energy_fd").unwrap().status, CheckStatus::Skip);
        assert!(report.passed(), "{}", report.render());
    }

    #[test]
    fn wrong_prefactor_fails_ideal_check() {
        let cfg = parse_config(ASYMMETRIC).unwrap();
        let tampered = Prefactors {
            energy: Prefactors::STANDARD.energy,
            force: Prefactors::STANDARD.energy,
        };
        let report = run_check(&cfg, &tampered);
        assert!(!report.passed());
        assert_eq!(report.get("ideal_casimir").unwrap().status, CheckStatus::Fail);
    }

    #[test]
    fn two_layer_system_skips_factorization() {
        let text = ASYMMETRIC.replace("[[layer]]\nthickness = 150e-9\nmaterial = { type = \"constant\", eps_inf = 2.25 }\n\n", "");
        let cfg = parse_config(&text).unwrap();
        assert_eq!(cfg.system.layer_count(), 2);
        let report = run_check(&cfg, &Prefactors::STANDARD);
        assert_eq!(report.get("factorization").unwrap().status, CheckStatus::Skip);
        assert!(report.passed(), "{}", report.render());
    }
}
