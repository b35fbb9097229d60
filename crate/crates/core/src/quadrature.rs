//! Spectral double integrals `int_0^inf dxi int_0^inf dk k f(xi, k)`.
//!
//! The integration variables are mapped to `u = xi / xi_scale` and
//! `v = 2 kappa L`, with `L` the plate separation and `kappa` the
//! perpendicular wave vector of a lead medium. Since `k dk = kappa dkappa`,
//! the inner measure becomes `v dv / (4 L^2)`, and `v` is shifted by its lower
//! limit `v_0(xi) = 2 L n(xi) xi / c` so both variables run over `(0, inf)`.
//! For a system the lead index is the smaller of the two outer layers' indexes,
//! which makes a system and its mirror image share every node.
//!
//! Each half-line uses the exp-sinh substitution `x = exp(pi/2 sinh t)` and a
//! trapezoidal rule in `t`; halving
//! the step reuses every previous node, and the difference between two
//! successive levels is the error estimate. No node sits on `xi = 0`.
//!
//! Rows of the tensor grid may be evaluated in parallel, but every sum is
//! reduced serially in node order with compensated addition, so the result is
//! bit-identical for any thread count.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::{sample, DenominatorPath, PointView, SystemConfig};
use crate::materials::{MaterialModel, Polarization, HBAR, SPEED_OF_LIGHT};

/// Half-width of the `t` interval; nodes span `x` in about `[5e-12, 2e11]`.
const T_SPAN: f64 = 3.5;

/// Coarsest level at which convergence may be declared.
const MIN_LEVEL: usize = 3;

/// Accuracy and refinement controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Target relative error of every result group.
    pub rel_tol: f64,
    /// Absolute floor as a fraction of `int |f|`, for results that cancel to zero.
    pub abs_floor: f64,
    /// Refinement levels tried before giving up.
    pub max_levels: usize,
    /// Frequency scale of the `u` variable, rad/s; defaults to `c / L`.
    pub xi_scale: Option<f64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_floor: 1e-20,
            max_levels: 12,
            xi_scale: None,
        }
    }
}

impl QuadratureSpec {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-2) {
            return Err(Error::invalid(
                "quadrature.rel_tol",
                format!("must lie in (0, 1e-2], got {}", self.rel_tol),
            ));
        }
        if !(self.abs_floor >= 0.0 && self.abs_floor.is_finite()) {
            return Err(Error::invalid("quadrature.abs_floor", "must be finite and >= 0"));
        }
        if self.max_levels < 4 {
            return Err(Error::invalid(
                "quadrature.max_levels",
                format!("must be >= 4, got {}", self.max_levels),
            ));
        }
        if let Some(s) = self.xi_scale {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::invalid("quadrature.xi_scale", "must be positive"));
            }
        }
        Ok(())
    }
}

/// Change of variables from `(u, w)` to `(xi, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMap {
    xi_scale: f64,
    length: f64,
    leads: Vec<MaterialModel>,
}

impl SpectralMap {
    /// `lead` sets `kappa`, `length` the scale of `v = 2 kappa L`.
    pub fn new(xi_scale: f64, length: f64, lead: MaterialModel) -> Result<Self> {
        Self::with_leads(xi_scale, length, vec![lead])
    }

    /// Uses the smallest refractive index among `leads` at each frequency.
    pub fn with_leads(xi_scale: f64, length: f64, leads: Vec<MaterialModel>) -> Result<Self> {
        if leads.is_empty() {
            return Err(Error::invalid("quadrature", "the map needs a lead medium"));
        }
        if !(xi_scale > 0.0 && xi_scale.is_finite()) || !(length > 0.0 && length.is_finite()) {
            return Err(Error::invalid(
                "quadrature",
                format!("map scales must be positive, got xi_scale = {xi_scale}, length = {length}"),
            ));
        }
        Ok(Self {
            xi_scale,
            length,
            leads,
        })
    }

    pub fn for_system(sys: &SystemConfig, spec: &QuadratureSpec) -> Result<Self> {
        let length = sys.total_gap();
        let xi_scale = spec.xi_scale.unwrap_or(SPEED_OF_LIGHT / length);
        let medium = sys.medium();
        let mut leads = vec![medium[0].material.clone()];
        if medium.len() > 1 {
            leads.push(medium[medium.len() - 1].material.clone());
        }
        Self::with_leads(xi_scale, length, leads)
    }

    fn lead_index(&self, xi: f64) -> Result<f64> {
        let mut best = f64::INFINITY;
        for m in &self.leads {
            best = best.min(m.index_at(xi)?);
        }
        Ok(best)
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone, Copy)]
struct Node {
    x: f64,
    /// `dx/dt`
    weight: f64,
    fresh: bool,
}

fn level_nodes(level: usize) -> Vec<Node> {
    let h = 0.5f64.powi(level as i32);
    let jmax = (T_SPAN / h).floor() as i64;
    (-jmax..=jmax)
        .map(|j| {
            let t = j as f64 * h;
            let x = (FRAC_PI_2 * t.sinh()).exp();
            Node {
                x,
                weight: FRAC_PI_2 * t.cosh() * x,
                fresh: level == 0 || j % 2 != 0,
            }
        })
        .collect()
}

/// Value of a vector integral with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<const M: usize> {
    pub values: [f64; M],
    /// Largest relative change between the last two levels over the result groups.
    pub est_error: f64,
    pub evaluations: usize,
    pub levels: usize,
}

struct RowSum<const M: usize> {
    sums: [Neumaier; M],
    abs: [f64; M],
    count: usize,
}

/// Integrates `f(xi, k)` against `dxi dk k` over the quarter plane.
///
/// Components sharing a `groups` id are converged against their common
/// scale, so a component that cancels to zero does not stall refinement.
pub fn integrate_spectrum<const M: usize, F>(
    f: F,
    map: &SpectralMap,
    groups: &[usize; M],
    spec: &QuadratureSpec,
) -> Result<Integral<M>>
where
    F: Fn(f64, f64) -> Result<[f64; M]> + Sync,
{
    spec.validate()?;
    let inv_4l2 = 1.0 / (4.0 * map.length * map.length);
    let mut total = [Neumaier::default(); M];
    let mut abs_total = [0.0; M];
    let mut evaluations = 0usize;
    let mut previous: Option<[f64; M]> = None;
    let mut est_error = f64::INFINITY;

    for level in 0..spec.max_levels {
        let nodes = level_nodes(level);
        let rows: Vec<Result<RowSum<M>>> = nodes
            .par_iter()
            .map(|outer| {
                let xi = outer.x * map.xi_scale;
                let index = map.lead_index(xi)?;
                let v0 = 2.0 * map.length * index * xi / SPEED_OF_LIGHT;
                let mut row = RowSum {
                    sums: [Neumaier::default(); M],
                    abs: [0.0; M],
                    count: 0,
                };
                for inner in nodes.iter().filter(|n| outer.fresh || n.fresh) {
                    let w = inner.x;
                    let v = v0 + w;
                    let k = (w * (w + 2.0 * v0)).sqrt() / (2.0 * map.length);
                    let values = f(xi, k)?;
                    let jac = outer.weight * inner.weight * v;
                    for c in 0..M {
                        let term = values[c] * jac;
                        if !term.is_finite() {
                            return Err(Error::Degenerate(format!(
                                "non-finite integrand at xi = {xi:e}, k = {k:e}"
                            )));
                        }
                        row.sums[c].add(term);
                        row.abs[c] += term.abs();
                    }
                    row.count += 1;
                }
                Ok(row)
            })
            .collect();

        for row in rows {
            let row = row?;
            for c in 0..M {
                total[c].add(row.sums[c].value());
                abs_total[c] += row.abs[c];
            }
            evaluations += row.count;
        }

        let h = 0.5f64.powi(level as i32);
        let scale = map.xi_scale * inv_4l2 * h * h;
        let values: [f64; M] = std::array::from_fn(|c| total[c].value() * scale);
        let l1: [f64; M] = std::array::from_fn(|c| abs_total[c] * scale);

        if let Some(prev) = previous {
            let (converged, err) = convergence(&values, &prev, &l1, groups, spec);
            est_error = err;
            if converged && level >= MIN_LEVEL {
                return Ok(Integral {
                    values,
                    est_error,
                    evaluations,
                    levels: level + 1,
                });
            }
        }
        previous = Some(values);
    }
    Err(Error::NonConvergence {
        levels: spec.max_levels,
        est_error,
    })
}

fn convergence<const M: usize>(
    values: &[f64; M],
    prev: &[f64; M],
    l1: &[f64; M],
    groups: &[usize; M],
    spec: &QuadratureSpec,
) -> (bool, f64) {
    let mut converged = true;
    let mut worst: f64 = 0.0;
    let mut ids: Vec<usize> = groups.to_vec();
    ids.sort_unstable();
    ids.dedup();
    for g in ids {
        let members = (0..M).filter(|&c| groups[c] == g);
        let (mut scale, mut diff, mut mass) = (0.0f64, 0.0f64, 0.0f64);
        for c in members {
            scale = scale.max(values[c].abs());
            diff = diff.max((values[c] - prev[c]).abs());
            mass = mass.max(l1[c]);
        }
        let threshold = (spec.rel_tol * scale).max(spec.abs_floor * mass);
        if diff > threshold {
            converged = false;
        }
        let rel = if scale > 0.0 {
            diff / scale
        } else if diff > 0.0 {
            diff / mass
        } else {
            0.0
        };
        worst = worst.max(rel);
    }
    (converged, worst)
}

/// Scalar convenience wrapper returning `(value, est_error)`.
pub fn integrate_scalar<F>(f: F, map: &SpectralMap, spec: &QuadratureSpec) -> Result<(f64, f64)>
where
    F: Fn(f64, f64) -> Result<f64> + Sync,
{
    let out = integrate_spectrum(|xi, k| Ok([f(xi, k)?]), map, &[0], spec)?;
    Ok((out.values[0], out.est_error))
}

/// Prefactors applied to the raw spectral integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prefactors {
    /// `hbar / (2 pi)^2`, J s.
    pub energy: f64,
    /// `hbar / (2 pi^2)`, J s.
    pub force: f64,
}

impl Prefactors {
    pub const STANDARD: Prefactors = Prefactors {
        energy: HBAR / (4.0 * PI * PI),
        force: HBAR / (2.0 * PI * PI),
    };
}

impl Default for Prefactors {
    fn default() -> Self {
        Self::STANDARD
    }
}

/// Energy and force contributions of one polarization.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PolarizationParts {
    /// J/m^2
    pub energy: f64,
    /// N/m^2
    pub force_left: f64,
    pub force_right: f64,
    pub force_stack: f64,
}

/// Energy per area and forces per area on both plates and on the central stack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CasimirResult {
    /// J/m^2
    pub energy: f64,
    /// N/m^2, positive along the left-to-right axis.
    pub force_left: f64,
    pub force_right: f64,
    pub force_stack: f64,
    pub p: PolarizationParts,
    pub s: PolarizationParts,
    /// Relative, from the last refinement step.
    pub est_error: f64,
    pub evaluations: usize,
}

impl CasimirResult {
    pub fn polarization(&self, q: Polarization) -> &PolarizationParts {
        match q {
            Polarization::P => &self.p,
            Polarization::S => &self.s,
        }
    }
}

fn ready(sys: &SystemConfig, spec: &QuadratureSpec) -> Result<SpectralMap> {
    spec.validate()?;
    sys.require_open_gaps()?;
    SpectralMap::for_system(sys, spec)
}

/// Energy per unit area, J/m^2.
pub fn casimir_energy(sys: &SystemConfig, spec: &QuadratureSpec) -> Result<f64> {
    Ok(casimir_energy_parts(sys, spec)?.values.iter().sum::<f64>() * Prefactors::STANDARD.energy)
}

/// Raw `[p, s]` energy integrals, before the prefactor.
pub fn casimir_energy_parts(sys: &SystemConfig, spec: &QuadratureSpec) -> Result<Integral<2>> {
    let map = ready(sys, spec)?;
    integrate_spectrum(
        |xi, k| {
            let [p, s] = sample(sys, xi, k, DenominatorPath::General)?;
            Ok([p.log_denominator, s.log_denominator])
        },
        &map,
        &[0, 0],
        spec,
    )
}

/// Energy and all three forces.
pub fn casimir_forces(sys: &SystemConfig, spec: &QuadratureSpec) -> Result<CasimirResult> {
    casimir_forces_with(sys, spec, &Prefactors::STANDARD, DenominatorPath::General)
}

pub fn casimir_forces_with(
    sys: &SystemConfig,
    spec: &QuadratureSpec,
    prefactors: &Prefactors,
    path: DenominatorPath,
) -> Result<CasimirResult> {
    let map = ready(sys, spec)?;
    let out = integrate_spectrum(
        |xi, k| {
            let [p, s] = sample(sys, xi, k, path)?;
            Ok([
                p.log_denominator,
                s.log_denominator,
                p.force_left,
                s.force_left,
                p.force_right,
                s.force_right,
                p.force_stack,
                s.force_stack,
            ])
        },
        &map,
        &[0, 0, 1, 1, 1, 1, 1, 1],
        spec,
    )?;
    let v = out.values;
    let part = |i: usize| PolarizationParts {
        energy: v[i] * prefactors.energy,
        force_left: v[2 + i] * prefactors.force,
        force_right: v[4 + i] * prefactors.force,
        force_stack: v[6 + i] * prefactors.force,
    };
    let (p, s) = (part(0), part(1));
    Ok(CasimirResult {
        energy: p.energy + s.energy,
        force_left: p.force_left + s.force_left,
        force_right: p.force_right + s.force_right,
        force_stack: p.force_stack + s.force_stack,
        p,
        s,
        est_error: out.est_error,
        evaluations: out.evaluations,
    })
}

fn intermediate_energy(
    sys: &SystemConfig,
    l: usize,
    spec: &QuadratureSpec,
    pick: fn((f64, f64)) -> f64,
) -> Result<f64> {
    let n = sys.layer_count();
    if l <= 1 || l >= n {
        return Err(Error::invalid(
            "intermediate layer",
            format!("index {l} must satisfy 1 < l < {n}"),
        ));
    }
    let map = ready(sys, spec)?;
    let out = integrate_spectrum(
        |xi, k| {
            let view = PointView::new(sys, xi, k)?;
            let mut logs = [0.0; 2];
            for (slot, q) in logs.iter_mut().zip(Polarization::BOTH) {
                let x = pick(view.effective_and_two_stack(l - 1, q)?);
                if !(x > 0.0) {
                    return Err(Error::Degenerate(format!(
                        "effective denominator {x:e} is not positive"
                    )));
                }
                *slot = x.ln();
            }
            Ok(logs)
        },
        &map,
        &[0, 0],
        spec,
    )?;
    Ok((out.values[0] + out.values[1]) * Prefactors::STANDARD.energy)
}

/// Effective energy `E_l`: the part of the energy that depends on the gap layers.
pub fn effective_energy(sys: &SystemConfig, l: usize, spec: &QuadratureSpec) -> Result<f64> {
    intermediate_energy(sys, l, spec, |(effective, _)| effective)
}

/// Interaction energy of the two sub-stacks across layer `l`, from `ln D_l`.
pub fn stack_interaction_energy(sys: &SystemConfig, l: usize, spec: &QuadratureSpec) -> Result<f64> {
    intermediate_energy(sys, l, spec, |(_, two_stack)| two_stack)
}
