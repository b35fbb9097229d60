//! Electromagnetic response of homogeneous media on the imaginary frequency axis.
//!
//! Every admitted model has a real permittivity and permeability `>= 1` at
//! `omega = i xi`, so the perpendicular wave vector
//! `kappa = sqrt(eps mu xi^2 / c^2 + k^2)` is real and non-negative. All
//! quantities are SI: frequencies in rad/s, wavenumbers in 1/m.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Field polarization: `P` is TM, `S` is TE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarization {
    P,
    S,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::P, Polarization::S];

    pub fn label(self) -> &'static str {
        match self {
            Polarization::P => "p",
            Polarization::S => "s",
        }
    }
}

/// A point of the spectral domain: imaginary frequency, transverse wavenumber, polarization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub xi: f64,
    pub k: f64,
    pub q: Polarization,
}

impl SpectralPoint {
    pub fn new(xi: f64, k: f64, q: Polarization) -> Self {
        Self { xi, k, q }
    }
}

/// One Lorentz oscillator term, `w_p^2 / (w_0^2 + xi^2 + gamma xi)` at `omega = i xi`.
///
/// A zero resonance gives a Drude term, which diverges as `xi -> 0+`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Oscillator {
    /// Oscillator strength `w_p^2`, (rad/s)^2.
    pub plasma_weight: f64,
    /// Resonance `w_0`, rad/s.
    pub resonance: f64,
    /// Damping `gamma`, rad/s.
    pub damping: f64,
}

impl Oscillator {
    pub fn new(plasma_weight: f64, resonance: f64, damping: f64) -> Self {
        Self {
            plasma_weight,
            resonance,
            damping,
        }
    }

    pub fn drude(plasma_weight: f64, damping: f64) -> Self {
        Self::new(plasma_weight, 0.0, damping)
    }

    fn is_drude(&self) -> bool {
        self.resonance == 0.0
    }

    fn at(&self, xi: f64) -> f64 {
        self.plasma_weight / (self.resonance * self.resonance + xi * xi + self.damping * xi)
    }

    fn validate(&self, field: &str) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        if !ok(self.plasma_weight) || !ok(self.resonance) || !ok(self.damping) {
            return Err(Error::invalid(
                field,
                "oscillator parameters must be finite and non-negative",
            ));
        }
        Ok(())
    }
}

/// Imaginary-frequency response model of one homogeneous medium.
#[derive(Debug, Clone, PartialEq)]
pub enum MaterialModel {
    Vacuum,
    /// Dispersionless medium.
    Constant { eps_inf: f64, mu_inf: f64 },
    /// `eps(i xi) = 1 + sum(eps_terms)`, `mu(i xi) = 1 + sum(mu_terms)`.
    OscillatorSum {
        eps_terms: Vec<Oscillator>,
        mu_terms: Vec<Oscillator>,
    },
}

impl MaterialModel {
    pub fn constant(eps_inf: f64, mu_inf: f64) -> Result<Self> {
        let m = MaterialModel::Constant { eps_inf, mu_inf };
        m.validate("material")?;
        Ok(m)
    }

    pub fn dielectric(eps_inf: f64) -> Result<Self> {
        Self::constant(eps_inf, 1.0)
    }

    pub fn oscillators(eps_terms: Vec<Oscillator>, mu_terms: Vec<Oscillator>) -> Result<Self> {
        let m = MaterialModel::OscillatorSum {
            eps_terms,
            mu_terms,
        };
        m.validate("material")?;
        Ok(m)
    }

    /// Checks that the model is a passive medium with real response `>= 1`.
    pub fn validate(&self, field: &str) -> Result<()> {
        match self {
            MaterialModel::Vacuum => Ok(()),
            MaterialModel::Constant { eps_inf, mu_inf } => {
                for (name, v) in [("eps_inf", eps_inf), ("mu_inf", mu_inf)] {
                    if !v.is_finite() || *v < 1.0 {
                        return Err(Error::invalid(
                            format!("{field}.{name}"),
                            format!("must be finite and >= 1, got {v}"),
                        ));
                    }
                }
                Ok(())
            }
            MaterialModel::OscillatorSum {
                eps_terms,
                mu_terms,
            } => {
                for (i, t) in eps_terms.iter().enumerate() {
                    t.validate(&format!("{field}.terms[{i}]"))?;
                }
                for (i, t) in mu_terms.iter().enumerate() {
                    t.validate(&format!("{field}.mu_terms[{i}]"))?;
                }
                Ok(())
            }
        }
    }

    /// True when some term diverges at `xi = 0`.
    pub fn has_drude_term(&self) -> bool {
        match self {
            MaterialModel::OscillatorSum {
                eps_terms,
                mu_terms,
            } => eps_terms.iter().chain(mu_terms).any(Oscillator::is_drude),
            _ => false,
        }
    }

    fn check_frequency(&self, xi: f64) -> Result<()> {
        if !xi.is_finite() || xi < 0.0 {
            return Err(Error::Domain(format!(
                "imaginary frequency must be finite and >= 0, got {xi}"
            )));
        }
        if xi == 0.0 && self.has_drude_term() {
            return Err(Error::Domain(
                "Drude term evaluated at xi = 0".to_string(),
            ));
        }
        Ok(())
    }

    /// Permittivity `eps(i xi)`.
    pub fn eps_at(&self, xi: f64) -> Result<f64> {
        self.check_frequency(xi)?;
        Ok(match self {
            MaterialModel::Vacuum => 1.0,
            MaterialModel::Constant { eps_inf, .. } => *eps_inf,
            MaterialModel::OscillatorSum { eps_terms, .. } => {
                1.0 + eps_terms.iter().map(|t| t.at(xi)).sum::<f64>()
            }
        })
    }

    /// Permeability `mu(i xi)`.
    pub fn mu_at(&self, xi: f64) -> Result<f64> {
        self.check_frequency(xi)?;
        Ok(match self {
            MaterialModel::Vacuum => 1.0,
            MaterialModel::Constant { mu_inf, .. } => *mu_inf,
            MaterialModel::OscillatorSum { mu_terms, .. } => {
                1.0 + mu_terms.iter().map(|t| t.at(xi)).sum::<f64>()
            }
        })
    }

    /// Refractive index `sqrt(eps mu)` at `omega = i xi`.
    pub fn index_at(&self, xi: f64) -> Result<f64> {
        Ok((self.eps_at(xi)? * self.mu_at(xi)?).sqrt())
    }

    /// Perpendicular wave vector `kappa = sqrt(eps mu xi^2 / c^2 + k^2)`.
    pub fn kappa(&self, xi: f64, k: f64) -> Result<f64> {
        Ok(self.response(xi, k)?.kappa)
    }

    pub fn response(&self, xi: f64, k: f64) -> Result<MediumResponse> {
        if !k.is_finite() || k < 0.0 {
            return Err(Error::Domain(format!(
                "transverse wavenumber must be finite and >= 0, got {k}"
            )));
        }
        let eps = self.eps_at(xi)?;
        let mu = self.mu_at(xi)?;
        let x = xi / SPEED_OF_LIGHT;
        let kappa = (eps * mu * x * x + k * k).sqrt();
        Ok(MediumResponse { eps, mu, kappa })
    }
}

/// Response of one medium at a fixed `(xi, k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumResponse {
    pub eps: f64,
    pub mu: f64,
    pub kappa: f64,
}

impl MediumResponse {
    /// Same constitutive parameters, hence no interface between the two media.
    pub fn matches(&self, other: &MediumResponse) -> bool {
        self.eps == other.eps && self.mu == other.mu
    }
}
