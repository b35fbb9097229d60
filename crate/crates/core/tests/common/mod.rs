#![allow(dead_code)]

pub mod transfer_matrix;

use std::path::PathBuf;

use casimir_core::config::{load_config, RunConfig};
use casimir_core::materials::SPEED_OF_LIGHT;
use casimir_core::{Layer, MaterialModel, Oscillator, Polarization, SpectralPoint};
use rand::Rng;

pub fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Relative difference of O(1) amplitudes; values below `1e-6` compare absolutely.
pub fn rel_amplitude(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-6)
}

pub fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

/// Every `*.toml` under `configs/`, sorted by name.
pub fn shipped_configs() -> Vec<(String, RunConfig)> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(configs_dir())
        .expect("configs directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            let cfg = load_config(&p).unwrap_or_else(|e| panic!("{name}: {e}"));
            (name, cfg)
        })
        .collect()
}

pub fn random_material(rng: &mut impl Rng) -> MaterialModel {
    match rng.gen_range(0..4) {
        0 => MaterialModel::Vacuum,
        1 => MaterialModel::constant(rng.gen_range(1.0..10.0), rng.gen_range(1.0..3.0)).unwrap(),
        2 => {
            let terms = (0..rng.gen_range(1..=2))
                .map(|_| {
                    Oscillator::new(
                        10f64.powf(rng.gen_range(30.0..32.5)),
                        10f64.powf(rng.gen_range(14.0..16.5)),
                        rng.gen_range(0.0..1e14),
                    )
                })
                .collect();
            MaterialModel::oscillators(terms, vec![]).unwrap()
        }
        _ => {
            let eps = vec![Oscillator::new(1e32, 2e16, 0.0)];
            let mu = vec![Oscillator::new(10f64.powf(rng.gen_range(30.0..32.0)), 5e15, 1e13)];
            MaterialModel::oscillators(eps, mu).unwrap()
        }
    }
}

pub fn random_layers(rng: &mut impl Rng, count: usize, min: f64, max: f64) -> Vec<Layer> {
    (0..count)
        .map(|_| Layer::new(random_material(rng), rng.gen_range(min..max)))
        .collect()
}

/// A point with `xi` and `k` spread over two decades around the scale of `length`.
pub fn random_point(rng: &mut impl Rng, length: f64) -> SpectralPoint {
    let xi = 10f64.powf(rng.gen_range(-1.5..0.7)) * SPEED_OF_LIGHT / length;
    let k = 10f64.powf(rng.gen_range(-1.5..0.7)) / length;
    let q = if rng.gen_bool(0.5) {
        Polarization::P
    } else {
        Polarization::S
    };
    SpectralPoint::new(xi, k, q)
}

/// `(eps, mu, kappa)` straight from the constitutive definitions.
pub fn medium(m: &MaterialModel, pt: &SpectralPoint) -> (f64, f64, f64) {
    let eps = m.eps_at(pt.xi).unwrap();
    let mu = m.mu_at(pt.xi).unwrap();
    let kappa = (eps * mu * pt.xi * pt.xi / (SPEED_OF_LIGHT * SPEED_OF_LIGHT) + pt.k * pt.k).sqrt();
    (eps, mu, kappa)
}

/// Single-interface reflection for incidence from `m1`.
pub fn fresnel_r(m1: &MaterialModel, m2: &MaterialModel, pt: &SpectralPoint) -> f64 {
    let (e1, u1, k1) = medium(m1, pt);
    let (e2, u2, k2) = medium(m2, pt);
    let g = match pt.q {
        Polarization::P => e1 / e2,
        Polarization::S => u1 / u2,
    };
    (k1 - g * k2) / (k1 + g * k2)
}
