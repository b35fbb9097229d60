//! Spectral integrands of the two-plate system at a single `(xi, k, q)` point.
//!
//! The medium between the plates is an ordered list of `n` layers. Layer 1
//! touches the left plate, layer `n` the right plate; the "stack" is everything
//! strictly between them, bounded by media 1 and `n`. The z axis points from
//! the left plate to the right plate, and a positive force points along +z,
//! so mutual attraction gives `F_L > 0` and `F_R < 0`.
//!
//! All integrands are returned without the `hbar / 2 pi^2` (forces) or
//! `hbar / (2 pi)^2` (energy) prefactors and without the `dxi dk k` measure.

use crate::error::{Error, Result};
use crate::fresnel::{
    fold_stack, interface_between, plate_reflection_from, Layer, PlateModel, StackCoefficients,
};
use crate::materials::{MediumResponse, Polarization, SpectralPoint};

/// `N_n` at or below this value is rejected as unphysical.
pub const N_FLOOR: f64 = 1e-15;

/// Two plates separated by an `n`-layer medium.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    plate_left: PlateModel,
    medium: Vec<Layer>,
    plate_right: PlateModel,
}

impl SystemConfig {
    pub fn new(plate_left: PlateModel, medium: Vec<Layer>, plate_right: PlateModel) -> Result<Self> {
        if medium.is_empty() {
            return Err(Error::invalid("layer", "the medium needs at least one layer"));
        }
        plate_left.validate("plate.left")?;
        plate_right.validate("plate.right")?;
        for (i, layer) in medium.iter().enumerate() {
            layer.validate(&format!("layer[{}]", i + 1))?;
        }
        Ok(Self {
            plate_left,
            medium,
            plate_right,
        })
    }

    pub fn plate_left(&self) -> &PlateModel {
        &self.plate_left
    }

    pub fn plate_right(&self) -> &PlateModel {
        &self.plate_right
    }

    pub fn medium(&self) -> &[Layer] {
        &self.medium
    }

    /// Number of medium layers `n`.
    pub fn layer_count(&self) -> usize {
        self.medium.len()
    }

    /// Plate separation, the sum of all medium thicknesses.
    pub fn total_gap(&self) -> f64 {
        self.medium.iter().map(|l| l.thickness).sum()
    }

    /// Layer `index` (1-based).
    pub fn layer(&self, index: usize) -> Result<&Layer> {
        if index == 0 || index > self.medium.len() {
            return Err(Error::invalid(
                "layer",
                format!("index {index} outside 1..={}", self.medium.len()),
            ));
        }
        Ok(&self.medium[index - 1])
    }

    /// The same system seen from the other side.
    pub fn mirrored(&self) -> Self {
        Self {
            plate_left: self.plate_right.clone(),
            medium: self.medium.iter().rev().cloned().collect(),
            plate_right: self.plate_left.clone(),
        }
    }

    /// Copy with layer `index` (1-based) set to `thickness`.
    pub fn with_thickness(&self, index: usize, thickness: f64) -> Result<Self> {
        self.layer(index)?;
        let mut out = self.clone();
        out.medium[index - 1].thickness = thickness;
        out.medium[index - 1].validate(&format!("layer[{index}]"))?;
        Ok(out)
    }

    pub fn with_plates(&self, plate_left: PlateModel, plate_right: PlateModel) -> Result<Self> {
        Self::new(plate_left, self.medium.clone(), plate_right)
    }

    /// Plates must not touch the central stack.
    pub fn require_open_gaps(&self) -> Result<()> {
        let n = self.medium.len();
        for index in [1, n] {
            if !(self.medium[index - 1].thickness > 0.0) {
                return Err(Error::invalid(
                    format!("layer[{index}].thickness"),
                    "the layers touching the plates must have positive thickness",
                ));
            }
        }
        Ok(())
    }

    fn check_intermediate(&self, l: usize) -> Result<()> {
        let n = self.medium.len();
        if l <= 1 || l >= n {
            return Err(Error::invalid(
                "intermediate layer",
                format!("index {l} must satisfy 1 < l < {n}"),
            ));
        }
        Ok(())
    }
}

fn flush(e: f64) -> f64 {
    if e < 1e-300 {
        0.0
    } else {
        e
    }
}

/// Per-point view of a system: medium responses at one `(xi, k)`.
pub(crate) struct PointView<'a> {
    sys: &'a SystemConfig,
    xi: f64,
    k: f64,
    responses: Vec<MediumResponse>,
}

/// Plate-dressing quantities shared by every integrand.
#[derive(Debug, Clone, Copy)]
pub(crate) struct GapTerms {
    pub kappa_left: f64,
    pub kappa_right: f64,
    /// `exp(-2 kappa_1 d_1)`
    pub decay_left: f64,
    /// `exp(-2 kappa_n d_n)`
    pub decay_right: f64,
    pub refl_left: f64,
    pub refl_right: f64,
    pub stack: StackCoefficients,
}

impl GapTerms {
    fn n_denominator(&self) -> f64 {
        let l = self.refl_left * self.decay_left;
        let r = self.refl_right * self.decay_right;
        1.0 - (self.stack.r_fwd() * l + self.stack.r_bwd() * r) - self.stack.a() * l * r
    }

    fn checked_n(&self) -> Result<f64> {
        let n = self.n_denominator();
        if !(n > N_FLOOR) {
            return Err(Error::Degenerate(format!(
                "generalized denominator N_n = {n:e} is not positive"
            )));
        }
        Ok(n)
    }

    fn force_left(&self, n: f64) -> f64 {
        let l = self.refl_left * self.decay_left;
        let r = self.refl_right * self.decay_right;
        self.kappa_left * (self.stack.r_fwd() + self.stack.a() * r) * l / n
    }

    fn force_right(&self, n: f64) -> f64 {
        let l = self.refl_left * self.decay_left;
        let r = self.refl_right * self.decay_right;
        -self.kappa_right * (self.stack.r_bwd() + self.stack.a() * l) * r / n
    }

    fn force_stack(&self, n: f64) -> f64 {
        let l = self.refl_left * self.decay_left;
        let r = self.refl_right * self.decay_right;
        (self.kappa_right * self.stack.r_bwd() * r - self.kappa_left * self.stack.r_fwd() * l) / n
            + (self.kappa_right - self.kappa_left) * self.stack.a() / n * l * r
    }
}

impl<'a> PointView<'a> {
    pub(crate) fn new(sys: &'a SystemConfig, xi: f64, k: f64) -> Result<Self> {
        let responses = sys
            .medium
            .iter()
            .map(|l| l.material.response(xi, k))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            sys,
            xi,
            k,
            responses,
        })
    }

    fn n(&self) -> usize {
        self.responses.len()
    }

    /// Stack strictly between medium indices `from` and `to` (0-based), seen from `from`.
    fn stack_between(&self, from: usize, to: usize, q: Polarization) -> Result<StackCoefficients> {
        let inner: Vec<(MediumResponse, f64)> = if from < to {
            (from + 1..to).map(|i| (self.responses[i], self.sys.medium[i].thickness)).collect()
        } else {
            (to + 1..from).rev().map(|i| (self.responses[i], self.sys.medium[i].thickness)).collect()
        };
        fold_stack(&self.responses[from], inner, &self.responses[to], q)
    }

    fn decay(&self, index: usize) -> f64 {
        flush((-2.0 * self.responses[index].kappa * self.sys.medium[index].thickness).exp())
    }

    fn refl_left(&self, q: Polarization) -> Result<f64> {
        plate_reflection_from(&self.sys.plate_left, &self.responses[0], self.xi, self.k, q)
    }

    fn refl_right(&self, q: Polarization) -> Result<f64> {
        let last = self.n() - 1;
        plate_reflection_from(&self.sys.plate_right, &self.responses[last], self.xi, self.k, q)
    }

    pub(crate) fn gap_terms(&self, q: Polarization) -> Result<GapTerms> {
        let n = self.n();
        let refl_left = self.refl_left(q)?;
        let refl_right = self.refl_right(q)?;
        if n == 1 {
            // single layer: empty stack, the whole gap is carried by the left decay
            let kappa = self.responses[0].kappa;
            return Ok(GapTerms {
                kappa_left: kappa,
                kappa_right: kappa,
                decay_left: self.decay(0),
                decay_right: 1.0,
                refl_left,
                refl_right,
                stack: StackCoefficients::IDENTITY,
            });
        }
        Ok(GapTerms {
            kappa_left: self.responses[0].kappa,
            kappa_right: self.responses[n - 1].kappa,
            decay_left: self.decay(0),
            decay_right: self.decay(n - 1),
            refl_left,
            refl_right,
            stack: self.stack_between(0, n - 1, q)?,
        })
    }

    /// `r_{j-}` and `r_{j+}` for layer `j` (0-based), each side dressed with its plate.
    fn bounding_reflections(&self, j: usize, q: Polarization) -> Result<(f64, f64)> {
        let n = self.n();
        let r_minus = if j == 0 {
            self.refl_left(q)?
        } else {
            let s = self.stack_between(j, 0, q)?;
            let rl = self.refl_left(q)? * self.decay(0);
            (s.r_fwd() + s.a() * rl) / (1.0 - s.r_bwd() * rl)
        };
        let r_plus = if j == n - 1 {
            self.refl_right(q)?
        } else {
            let s = self.stack_between(j, n - 1, q)?;
            let rr = self.refl_right(q)? * self.decay(n - 1);
            (s.r_fwd() + s.a() * rr) / (1.0 - s.r_bwd() * rr)
        };
        Ok((r_minus, r_plus))
    }

    pub(crate) fn stress_zz(&self, j: usize, q: Polarization) -> Result<f64> {
        let (r_minus, r_plus) = self.bounding_reflections(j, q)?;
        let x = r_minus * r_plus * self.decay(j);
        let den = 1.0 - x;
        if !(den > N_FLOOR) {
            return Err(Error::Degenerate(format!(
                "layer {} round-trip denominator {den:e} is not positive",
                j + 1
            )));
        }
        Ok(self.responses[j].kappa * x / den)
    }

    /// `(N^(l)_n, D_l)` for intermediate layer `l` (0-based).
    pub(crate) fn effective_and_two_stack(&self, l: usize, q: Polarization) -> Result<(f64, f64)> {
        let n = self.n();
        let left = self.stack_between(0, l, q)?;
        let right = self.stack_between(l, n - 1, q)?;
        let e = self.decay(l);
        let rl = self.refl_left(q)? * self.decay(0);
        let rr = self.refl_right(q)? * self.decay(n - 1);
        let effective = (1.0 - left.r_fwd() * rl) * (1.0 - right.r_bwd() * rr)
            - e * (left.a() * rl + left.r_bwd()) * (right.a() * rr + right.r_fwd());
        let two_stack = 1.0 - left.r_bwd() * right.r_fwd() * e;
        Ok((effective, two_stack))
    }

    /// Gap terms rebuilt from the two-medium closed form (n = 2 only).
    pub(crate) fn two_medium_terms(&self, q: Polarization) -> Result<GapTerms> {
        if self.n() != 2 {
            return Err(Error::invalid(
                "layer",
                format!("the two-medium closed form needs n = 2, got {}", self.n()),
            ));
        }
        let r12 = interface_between(&self.responses[0], &self.responses[1], q)?.r;
        Ok(GapTerms {
            kappa_left: self.responses[0].kappa,
            kappa_right: self.responses[1].kappa,
            decay_left: self.decay(0),
            decay_right: self.decay(1),
            refl_left: self.refl_left(q)?,
            refl_right: self.refl_right(q)?,
            stack: StackCoefficients::unit_interface(r12),
        })
    }
}

/// Integrands of one polarization at one `(xi, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PolarizationSample {
    pub log_denominator: f64,
    pub force_left: f64,
    pub force_right: f64,
    pub force_stack: f64,
}

impl PolarizationSample {
    fn from_terms(g: &GapTerms) -> Result<Self> {
        let n = g.checked_n()?;
        Ok(Self {
            log_denominator: n.ln(),
            force_left: g.force_left(n),
            force_right: g.force_right(n),
            force_stack: g.force_stack(n),
        })
    }
}

/// Which algebraic route builds `N_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DenominatorPath {
    /// Stack coefficients from the general recursion.
    #[default]
    General,
    /// Single-interface closed form, valid for two-layer media only.
    TwoMedium,
}

/// All integrands for both polarizations, `[p, s]`.
pub fn sample(sys: &SystemConfig, xi: f64, k: f64, path: DenominatorPath) -> Result<[PolarizationSample; 2]> {
    let view = PointView::new(sys, xi, k)?;
    let mut out = [PolarizationSample::default(); 2];
    for (slot, q) in out.iter_mut().zip(Polarization::BOTH) {
        let terms = match path {
            DenominatorPath::General => view.gap_terms(q)?,
            DenominatorPath::TwoMedium => view.two_medium_terms(q)?,
        };
        *slot = PolarizationSample::from_terms(&terms)?;
    }
    Ok(out)
}

fn gap_terms(sys: &SystemConfig, pt: &SpectralPoint) -> Result<GapTerms> {
    sys.require_open_gaps()?;
    PointView::new(sys, pt.xi, pt.k)?.gap_terms(pt.q)
}

/// Generalized multiple-scattering denominator `N_n`.
pub fn n_denominator(sys: &SystemConfig, pt: &SpectralPoint) -> Result<f64> {
    gap_terms(sys, pt)?.checked_n()
}

/// `N_2 = 1 - r12 (R_L e1 - R_R e2) - R_L R_R e1 e2` for a two-layer medium.
pub fn two_medium_denominator(sys: &SystemConfig, pt: &SpectralPoint) -> Result<f64> {
    sys.require_open_gaps()?;
    PointView::new(sys, pt.xi, pt.k)?.two_medium_terms(pt.q)?.checked_n()
}

/// Left-plate force integrand.
pub fn force_left_integrand(sys: &SystemConfig, pt: &SpectralPoint) -> Result<f64> {
    let g = gap_terms(sys, pt)?;
    Ok(g.force_left(g.checked_n()?))
}

/// Right-plate force integrand.
pub fn force_right_integrand(sys: &SystemConfig, pt: &SpectralPoint) -> Result<f64> {
    let g = gap_terms(sys, pt)?;
    Ok(g.force_right(g.checked_n()?))
}

/// Integrand of the force on the central stack.
pub fn force_stack_integrand(sys: &SystemConfig, pt: &SpectralPoint) -> Result<f64> {
    let g = gap_terms(sys, pt)?;
    Ok(g.force_stack(g.checked_n()?))
}

/// Stress `T_zz` integrand inside layer `j` (1-based).
pub fn stress_zz_integrand(sys: &SystemConfig, j: usize, pt: &SpectralPoint) -> Result<f64> {
    sys.require_open_gaps()?;
    if !(sys.layer(j)?.thickness > 0.0) {
        return Err(Error::invalid(
            format!("layer[{j}].thickness"),
            "stress needs a layer of positive thickness",
        ));
    }
    PointView::new(sys, pt.xi, pt.k)?.stress_zz(j - 1, pt.q)
}

/// `sum_q ln N_n` at `(xi, k)`.
pub fn energy_integrand(sys: &SystemConfig, xi: f64, k: f64) -> Result<f64> {
    sys.require_open_gaps()?;
    let [p, s] = sample(sys, xi, k, DenominatorPath::General)?;
    Ok(p.log_denominator + s.log_denominator)
}

/// Effective denominator `N^(l)_n` relative to intermediate layer `l` (1-based).
pub fn effective_denominator(sys: &SystemConfig, l: usize, pt: &SpectralPoint) -> Result<f64> {
    sys.check_intermediate(l)?;
    sys.require_open_gaps()?;
    let (effective, _) = PointView::new(sys, pt.xi, pt.k)?.effective_and_two_stack(l - 1, pt.q)?;
    Ok(effective)
}

/// Two-stack denominator `D_l = 1 - r_{l/1} r_{l/n} exp(-2 kappa_l d_l)`.
pub fn two_stack_denominator(sys: &SystemConfig, l: usize, pt: &SpectralPoint) -> Result<f64> {
    sys.check_intermediate(l)?;
    let (_, two_stack) = PointView::new(sys, pt.xi, pt.k)?.effective_and_two_stack(l - 1, pt.q)?;
    Ok(two_stack)
}
