//! Reference stack coefficients from a product of 2x2 field matrices.
//!
//! In layer `j` the tangential field is `a e^{-kappa z} + b e^{kappa z}`; the
//! pair `(field, field' / w)` is continuous, with `w = mu` for s and `w = eps`
//! for p (the p field is H). Transmissions are rescaled from H to the
//! normalisation used by the library.

use casimir_core::{Layer, MaterialModel, Polarization, SpectralPoint};

use super::medium;

type M2 = [[f64; 2]; 2];

fn mul(a: &M2, b: &M2) -> M2 {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

fn dynamical(y: f64) -> M2 {
    [[1.0, 1.0], [-y, y]]
}

fn dynamical_inv(y: f64) -> M2 {
    [[0.5, -0.5 / y], [0.5, 0.5 / y]]
}

#[derive(Debug, Clone, Copy)]
pub struct Reference {
    pub r_fwd: f64,
    pub r_bwd: f64,
    pub t_fwd: f64,
    pub t_bwd: f64,
    pub a: f64,
}

pub fn stack(layers: &[Layer], left: &MaterialModel, right: &MaterialModel, pt: &SpectralPoint) -> Reference {
    let admittance = |m: &MaterialModel| {
        let (eps, mu, kappa) = medium(m, pt);
        let w = match pt.q {
            Polarization::P => eps,
            Polarization::S => mu,
        };
        (kappa / w, eps, mu)
    };
    let (y1, eps1, mu1) = admittance(left);
    let (yn, epsn, mun) = admittance(right);

    let mut m = dynamical_inv(y1);
    for layer in layers {
        let (y, _, _) = admittance(&layer.material);
        let kd = medium(&layer.material, pt).2 * layer.thickness;
        let p = [[kd.exp(), 0.0], [0.0, (-kd).exp()]];
        m = mul(&m, &dynamical(y));
        m = mul(&m, &p);
        m = mul(&m, &dynamical_inv(y));
    }
    m = mul(&m, &dynamical(yn));

    // det M = det D_n / det D_1, exact, avoiding cancellation in M11 M22 - M12 M21.
    let det = yn / y1;
    let scale = match pt.q {
        Polarization::P => (eps1 * mun / (epsn * mu1)).sqrt(),
        Polarization::S => 1.0,
    };
    Reference {
        r_fwd: m[1][0] / m[0][0],
        r_bwd: -m[0][1] / m[0][0],
        t_fwd: scale / m[0][0],
        t_bwd: det / m[0][0] / scale,
        a: m[1][1] / m[0][0],
    }
}
