//! Fresnel coefficients of interfaces and layer stacks at imaginary frequency.
//!
//! A stack is described by its two reflection amplitudes (`r_fwd` seen from the
//! left bounding medium, `r_bwd` seen from the right one), its two transmission
//! amplitudes, and the invariant `a = t_fwd t_bwd - r_fwd r_bwd`. Stacks are
//! concatenated across a homogeneous spacer with the lower-stack composition law
//!
//! ```text
//! D     = 1 - r_bwd(L) r_fwd(R) e
//! r_fwd = (r_fwd(L) + a(L) r_fwd(R) e) / D
//! r_bwd = (r_bwd(R) + a(R) r_bwd(L) e) / D
//! a     = (a(L) a(R) e - r_fwd(L) r_bwd(R)) / D
//! t_fwd = t_fwd(L) t_fwd(R) sqrt(e) / D
//! ```
//!
//! with `e = exp(-2 kappa d)` of the spacer. Reference planes sit on the outer
//! interfaces of each stack.

use crate::error::{Error, Result};
use crate::materials::{MaterialModel, MediumResponse, Polarization, SpectralPoint};

/// Smallest admissible `|D|` in a composition.
pub const DENOMINATOR_FLOOR: f64 = 1e-30;

/// Propagation factors below this are flushed to zero (opaque spacer).
const UNDERFLOW: f64 = 1e-300;

/// A homogeneous layer of finite thickness (m).
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub material: MaterialModel,
    pub thickness: f64,
}

impl Layer {
    pub fn new(material: MaterialModel, thickness: f64) -> Self {
        Self {
            material,
            thickness,
        }
    }

    pub fn vacuum(thickness: f64) -> Self {
        Self::new(MaterialModel::Vacuum, thickness)
    }

    pub fn validate(&self, field: &str) -> Result<()> {
        if !self.thickness.is_finite() || self.thickness < 0.0 {
            return Err(Error::invalid(
                format!("{field}.thickness"),
                format!("must be finite and >= 0, got {}", self.thickness),
            ));
        }
        self.material.validate(&format!("{field}.material"))
    }
}

/// Reflection and transmission amplitude of one interface, incidence from the first medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interface {
    pub r: f64,
    pub t: f64,
}

/// Coefficients of a layer stack for one polarization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StackCoefficients {
    r_fwd: f64,
    r_bwd: f64,
    t_fwd: f64,
    t_bwd: f64,
    a: f64,
}

impl StackCoefficients {
    /// The empty stack between identical media.
    pub const IDENTITY: StackCoefficients = StackCoefficients {
        r_fwd: 0.0,
        r_bwd: 0.0,
        t_fwd: 1.0,
        t_bwd: 1.0,
        a: 1.0,
    };

    /// A single interface from its forward and backward amplitudes.
    pub fn from_interface(forward: Interface, backward: Interface) -> Self {
        Self {
            r_fwd: forward.r,
            r_bwd: backward.r,
            t_fwd: forward.t,
            t_bwd: backward.t,
            a: forward.t * backward.t - forward.r * backward.r,
        }
    }

    /// Interface with `r_bwd = -r_fwd` and `a = 1` imposed exactly; transmissions are not tracked.
    pub(crate) fn unit_interface(r: f64) -> Self {
        Self {
            r_fwd: r,
            r_bwd: -r,
            t_fwd: f64::NAN,
            t_bwd: f64::NAN,
            a: 1.0,
        }
    }

    /// Reflection seen from the left bounding medium.
    pub fn r_fwd(&self) -> f64 {
        self.r_fwd
    }

    /// Reflection seen from the right bounding medium.
    pub fn r_bwd(&self) -> f64 {
        self.r_bwd
    }

    pub fn t_fwd(&self) -> f64 {
        self.t_fwd
    }

    pub fn t_bwd(&self) -> f64 {
        self.t_bwd
    }

    /// `t_fwd t_bwd - r_fwd r_bwd`, identical for both traversal directions.
    pub fn a(&self) -> f64 {
        self.a
    }

    /// The same stack traversed right to left.
    pub fn reversed(&self) -> Self {
        Self {
            r_fwd: self.r_bwd,
            r_bwd: self.r_fwd,
            t_fwd: self.t_bwd,
            t_bwd: self.t_fwd,
            a: self.a,
        }
    }
}

/// Mirror model: either a coated half-space or an idealized constant reflector.
#[derive(Debug, Clone, PartialEq)]
pub enum PlateModel {
    /// Coatings are listed from the gap outward; the first one touches the medium.
    CoatedHalfSpace {
        coatings: Vec<Layer>,
        substrate: MaterialModel,
    },
    /// Frequency- and wavenumber-independent reflection amplitudes.
    PhaseReflector { rp: f64, rs: f64 },
}

impl PlateModel {
    /// `R^q = delta_qp - delta_qs`, the infinite-permittivity limit.
    pub const PERFECT_CONDUCTOR: PlateModel = PlateModel::PhaseReflector { rp: 1.0, rs: -1.0 };

    pub const TRANSPARENT: PlateModel = PlateModel::PhaseReflector { rp: 0.0, rs: 0.0 };

    pub fn half_space(substrate: MaterialModel) -> Self {
        PlateModel::CoatedHalfSpace {
            coatings: Vec::new(),
            substrate,
        }
    }

    pub fn validate(&self, field: &str) -> Result<()> {
        match self {
            PlateModel::PhaseReflector { rp, rs } => {
                for (name, v) in [("rp", rp), ("rs", rs)] {
                    if !v.is_finite() || v.abs() > 1.0 {
                        return Err(Error::invalid(
                            format!("{field}.{name}"),
                            format!("must lie in [-1, 1], got {v}"),
                        ));
                    }
                }
                Ok(())
            }
            PlateModel::CoatedHalfSpace {
                coatings,
                substrate,
            } => {
                for (i, layer) in coatings.iter().enumerate() {
                    layer.validate(&format!("{field}.coatings[{i}]"))?;
                }
                substrate.validate(&format!("{field}.substrate"))
            }
        }
    }
}

pub(crate) fn interface_between(
    m1: &MediumResponse,
    m2: &MediumResponse,
    q: Polarization,
) -> Result<Interface> {
    if m1.matches(m2) {
        return Ok(Interface { r: 0.0, t: 1.0 });
    }
    let gamma_s = m1.mu / m2.mu;
    let gamma = match q {
        Polarization::P => m1.eps / m2.eps,
        Polarization::S => gamma_s,
    };
    let den = m1.kappa + gamma * m2.kappa;
    if !(den > 0.0) {
        return Err(Error::Degenerate(format!(
            "interface denominator kappa1 + gamma kappa2 = {den}"
        )));
    }
    let r = (m1.kappa - gamma * m2.kappa) / den;
    let t = match q {
        Polarization::P => (gamma / gamma_s).sqrt() * (1.0 + r),
        Polarization::S => 1.0 + r,
    };
    Ok(Interface { r, t })
}

pub(crate) fn interface_stack(
    m1: &MediumResponse,
    m2: &MediumResponse,
    q: Polarization,
) -> Result<StackCoefficients> {
    if m1.matches(m2) {
        return Ok(StackCoefficients::IDENTITY);
    }
    let forward = interface_between(m1, m2, q)?;
    let r = -forward.r;
    let backward = match q {
        Polarization::P => Interface {
            r,
            t: ((m2.eps * m1.mu) / (m1.eps * m2.mu)).sqrt() * (1.0 + r),
        },
        Polarization::S => Interface { r, t: 1.0 + r },
    };
    Ok(StackCoefficients::from_interface(forward, backward))
}

/// Single-interface coefficients `(r_12, t_12)` for incidence from `m1`.
pub fn single_interface(
    m1: &MaterialModel,
    m2: &MaterialModel,
    pt: &SpectralPoint,
) -> Result<Interface> {
    let a = m1.response(pt.xi, pt.k)?;
    let b = m2.response(pt.xi, pt.k)?;
    interface_between(&a, &b, pt.q)
}

fn decay(kappa: f64, thickness: f64) -> f64 {
    let e = (-kappa * thickness).exp();
    if e < UNDERFLOW {
        0.0
    } else {
        e
    }
}

/// Concatenates `left` and `right` across a spacer of wave vector `kappa` and
/// thickness `thickness`.
pub fn compose(
    left: &StackCoefficients,
    kappa: f64,
    thickness: f64,
    right: &StackCoefficients,
) -> Result<StackCoefficients> {
    if !(thickness >= 0.0) || !(kappa >= 0.0) {
        return Err(Error::Domain(format!(
            "spacer needs kappa >= 0 and thickness >= 0, got {kappa}, {thickness}"
        )));
    }
    let half = decay(kappa, thickness);
    let e = decay(kappa, 2.0 * thickness);
    let d = 1.0 - left.r_bwd * right.r_fwd * e;
    if !(d.abs() > DENOMINATOR_FLOOR) {
        return Err(Error::Degenerate(format!(
            "multiple-reflection denominator {d:e} at the composition floor"
        )));
    }
    Ok(StackCoefficients {
        r_fwd: (left.r_fwd + left.a * right.r_fwd * e) / d,
        r_bwd: (right.r_bwd + right.a * left.r_bwd * e) / d,
        t_fwd: left.t_fwd * right.t_fwd * half / d,
        t_bwd: right.t_bwd * left.t_bwd * half / d,
        a: (left.a * right.a * e - left.r_fwd * right.r_bwd) / d,
    })
}

/// Left fold over `(response, thickness)` layers between two bounding media.
pub(crate) fn fold_stack<I>(
    bound_left: &MediumResponse,
    layers: I,
    bound_right: &MediumResponse,
    q: Polarization,
) -> Result<StackCoefficients>
where
    I: IntoIterator<Item = (MediumResponse, f64)>,
{
    let mut layers = layers.into_iter();
    let Some((mut prev, mut prev_d)) = layers.next() else {
        return interface_stack(bound_left, bound_right, q);
    };
    let mut acc = interface_stack(bound_left, &prev, q)?;
    for (next, next_d) in layers {
        let step = interface_stack(&prev, &next, q)?;
        acc = compose(&acc, prev.kappa, prev_d, &step)?;
        prev = next;
        prev_d = next_d;
    }
    let last = interface_stack(&prev, bound_right, q)?;
    compose(&acc, prev.kappa, prev_d, &last)
}

pub(crate) fn layer_responses(layers: &[Layer], xi: f64, k: f64) -> Result<Vec<(MediumResponse, f64)>> {
    layers
        .iter()
        .map(|l| Ok((l.material.response(xi, k)?, l.thickness)))
        .collect()
}

/// Coefficients of `layers` between `bounding_left` and `bounding_right`.
pub fn stack_coefficients(
    layers: &[Layer],
    bounding_left: &MaterialModel,
    bounding_right: &MaterialModel,
    pt: &SpectralPoint,
) -> Result<StackCoefficients> {
    let left = bounding_left.response(pt.xi, pt.k)?;
    let right = bounding_right.response(pt.xi, pt.k)?;
    let inner = layer_responses(layers, pt.xi, pt.k)?;
    fold_stack(&left, inner, &right, pt.q)
}

pub(crate) fn plate_reflection_from(
    plate: &PlateModel,
    adjacent: &MediumResponse,
    xi: f64,
    k: f64,
    q: Polarization,
) -> Result<f64> {
    match plate {
        PlateModel::PhaseReflector { rp, rs } => Ok(match q {
            Polarization::P => *rp,
            Polarization::S => *rs,
        }),
        PlateModel::CoatedHalfSpace {
            coatings,
            substrate,
        } => {
            let substrate = substrate.response(xi, k)?;
            let inner = layer_responses(coatings, xi, k)?;
            Ok(fold_stack(adjacent, inner, &substrate, q)?.r_fwd)
        }
    }
}

/// Reflection amplitude of a plate seen from the medium touching it.
pub fn plate_reflection(plate: &PlateModel, adjacent: &MaterialModel, pt: &SpectralPoint) -> Result<f64> {
    let adjacent = adjacent.response(pt.xi, pt.k)?;
    plate_reflection_from(plate, &adjacent, pt.xi, pt.k, pt.q)
}
