//! de Broglie-Bohm toys for spin precession and two-particle guidance.
//!
//! Units have `hbar / m = 1`. The guidance velocity of particle `j` is
//! `Im(d_j psi / psi)`, which gives `v = k` for a plane wave `exp(i k x)`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

const UNIT_TOL: f64 = 1e-9;
/// Largest rotation angle per internal RK4 substep.
pub const MAX_ROTATION_STEP: f64 = 0.01;
/// Densities below this are treated as nodes.
pub const NODE_DENSITY: f64 = 1e-300;

fn cross<T: Real>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn axpy<T: Real>(y: [T; 3], k: T, x: [T; 3]) -> [T; 3] {
    [y[0] + k * x[0], y[1] + k * x[1], y[2] + k * x[2]]
}

fn norm3<T: Real>(a: [T; 3]) -> T {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinTrajectory<T> {
    pub times: Vec<T>,
    pub lambdas: Vec<[T; 3]>,
    pub field: [T; 3],
}

impl<T: Real> SpinTrajectory<T> {
    pub fn last(&self) -> [T; 3] {
        *self.lambdas.last().expect("trajectory holds the initial point")
    }
}

fn rk4_step<T: Real>(b: [T; 3], lam: [T; 3], h: T) -> [T; 3] {
    let half = T::lit(0.5) * h;
    let k1 = cross(b, lam);
    let k2 = cross(b, axpy(lam, half, k1));
    let k3 = cross(b, axpy(lam, half, k2));
    let k4 = cross(b, axpy(lam, h, k3));
    let sixth = h / T::lit(6.0);
    let mut out = lam;
    for i in 0..3 {
        out[i] = lam[i] + sixth * (k1[i] + T::lit(2.0) * (k2[i] + k3[i]) + k4[i]);
    }
    out
}

/// Integrates `d lambda / dt = B x lambda` with classical RK4. Each output
/// step of length `dt` is split so that no substep rotates by more than
/// [`MAX_ROTATION_STEP`]; `steps + 1` points are stored.
pub fn precess_spin<T: Real>(lambda0: [T; 3], field: [T; 3], dt: T, steps: usize) -> Result<SpinTrajectory<T>> {
    let len = norm3(lambda0);
    let tol = T::lit(UNIT_TOL).max(T::epsilon() * T::lit(16.0));
    if !len.is_finite() || (len - T::one()).abs() > tol {
        return Err(Error::NotUnit(len.to_f64().unwrap_or(f64::NAN)));
    }
    if !(dt > T::zero() && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    if field.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("field must be finite".into()));
    }
    let angle = (norm3(field) * dt).to_f64().unwrap_or(0.0);
    let sub = ((angle / MAX_ROTATION_STEP).ceil() as usize).max(1);
    let h = dt / T::lit(sub as f64);
    let mut times = Vec::with_capacity(steps + 1);
    let mut lambdas = Vec::with_capacity(steps + 1);
    let mut lam = lambda0;
    times.push(T::zero());
    lambdas.push(lam);
    for step in 1..=steps {
        for _ in 0..sub {
            lam = rk4_step(field, lam, h);
        }
        times.push(dt * T::lit(step as f64));
        lambdas.push(lam);
    }
    Ok(SpinTrajectory { times, lambdas, field })
}

/// `(2 pi sigma^2)^(-1/4) exp(-(x - x0)^2 / (4 sigma^2) + i k x)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianPacket<T> {
    pub center: T,
    pub width: T,
    pub wavenumber: T,
}

impl<T: Real> GaussianPacket<T> {
    pub fn new(center: T, width: T, wavenumber: T) -> Result<Self> {
        let p = Self {
            center,
            width,
            wavenumber,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.width > T::zero() && self.width.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "packet width must be positive, got {}",
                self.width
            )))
        }
    }

    pub fn value(&self, x: T) -> Complex<T> {
        let s2 = self.width * self.width;
        let norm = (T::TAU() * s2).powf(T::lit(-0.25));
        let d = x - self.center;
        let env = norm * (-(d * d) / (T::lit(4.0) * s2)).exp();
        Complex::from_polar(env, self.wavenumber * x)
    }

    pub fn derivative(&self, x: T) -> Complex<T> {
        let s2 = self.width * self.width;
        let log_d = Complex::new(-(x - self.center) / (T::lit(2.0) * s2), self.wavenumber);
        self.value(x) * log_d
    }

    /// Guidance velocity of this packet on its own.
    pub fn velocity(&self, _x: T) -> T {
        self.wavenumber
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Particle {
    One,
    Two,
}

/// `sum_k c_k f_k(x1) g_k(x2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoParticleWave<T> {
    terms: Vec<(Complex<T>, GaussianPacket<T>, GaussianPacket<T>)>,
}

impl<T: Real> TwoParticleWave<T> {
    pub fn new(terms: Vec<(Complex<T>, GaussianPacket<T>, GaussianPacket<T>)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidArgument("wave needs at least one term".into()));
        }
        for (_, p, q) in &terms {
            p.validate()?;
            q.validate()?;
        }
        Ok(Self { terms })
    }

    pub fn product(p1: GaussianPacket<T>, p2: GaussianPacket<T>) -> Result<Self> {
        Self::new(vec![(Complex::new(T::one(), T::zero()), p1, p2)])
    }

    pub fn terms(&self) -> &[(Complex<T>, GaussianPacket<T>, GaussianPacket<T>)] {
        &self.terms
    }

    pub fn value(&self, x1: T, x2: T) -> Complex<T> {
        self.terms
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, (c, p, q)| {
                acc + *c * p.value(x1) * q.value(x2)
            })
    }

    pub fn derivative(&self, x1: T, x2: T, particle: Particle) -> Complex<T> {
        self.terms
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, (c, p, q)| {
                acc + *c
                    * match particle {
                        Particle::One => p.derivative(x1) * q.value(x2),
                        Particle::Two => p.value(x1) * q.derivative(x2),
                    }
            })
    }
}

/// `Im(conj(psi) d psi) / |psi|^2` for the chosen particle.
pub fn guidance_velocity<T: Real>(w: &TwoParticleWave<T>, x1: T, x2: T, particle: Particle) -> Result<T> {
    let psi = w.value(x1, x2);
    let rho = psi.norm_sqr();
    let floor = T::lit(NODE_DENSITY).max(T::min_positive_value());
    if rho.is_nan() || rho < floor {
        return Err(Error::Node {
            x1: x1.to_f64().unwrap_or(f64::NAN),
            x2: x2.to_f64().unwrap_or(f64::NAN),
            density: rho.to_f64().unwrap_or(f64::NAN),
        });
    }
    let d = w.derivative(x1, x2, particle);
    Ok((psi.conj() * d).im / rho)
}

/// Max-norm difference between the expanded two-photon beam-splitter
/// product and its four-term form, in the basis
/// `|1x 1y>, |1x 2y>, |2x 1y>, |2x 2y>`.
pub fn oumandel_residual<T: Real>(tx: T, ty: T, rx: T, ry: T) -> Result<T> {
    let tol = T::lit(1e-12);
    for (name, v) in [("Tx", tx), ("Ty", ty), ("Rx", rx), ("Ry", ry)] {
        if !(v >= T::zero() && v <= T::one()) {
            return Err(Error::BeamSplitter(format!("{name} = {v} outside [0, 1]")));
        }
    }
    if (tx + rx - T::one()).abs() > tol || (ty + ry - T::one()).abs() > tol {
        return Err(Error::BeamSplitter(format!(
            "T + R must be 1 (x: {}, y: {})",
            tx + rx,
            ty + ry
        )));
    }
    let c = |re: T, im: T| Complex::new(re, im);
    let zero = T::zero();
    // photon x: sqrt(Tx)|1x> + i sqrt(Rx)|2x>; photon y: -i sqrt(Ry)|1y> + sqrt(Ty)|2y>
    let x = [c(tx.sqrt(), zero), c(zero, rx.sqrt())];
    let y = [c(zero, -ry.sqrt()), c(ty.sqrt(), zero)];
    let expanded = [x[0] * y[0], x[0] * y[1], x[1] * y[0], x[1] * y[1]];
    let four_term = [
        c(zero, -(ry * tx).sqrt()),
        c((tx * ty).sqrt(), zero),
        c((rx * ry).sqrt(), zero),
        c(zero, (rx * ty).sqrt()),
    ];
    Ok(expanded
        .iter()
        .zip(four_term)
        .map(|(a, b)| (*a - b).norm())
        .fold(T::zero(), T::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_rotation() {
        let omega = 2.0f64;
        let dt = 0.005;
        let tr = precess_spin([1.0, 0.0, 0.0], [0.0, 0.0, omega], dt, 1000).unwrap();
        assert_eq!(tr.lambdas.len(), 1001);
        for (t, l) in tr.times.iter().zip(&tr.lambdas) {
            let want = [(omega * t).cos(), (omega * t).sin(), 0.0];
            for i in 0..3 {
                assert!((l[i] - want[i]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn parallel_lambda_is_constant() {
        let tr = precess_spin([0.0, 0.0, 1.0], [0.0, 0.0, 3.0], 0.1, 50).unwrap();
        assert!(tr.lambdas.iter().all(|l| *l == [0.0, 0.0, 1.0]));
        let still = precess_spin([0.6, 0.8, 0.0], [0.0; 3], 0.1, 10).unwrap();
        assert!(still.lambdas.iter().all(|l| *l == [0.6, 0.8, 0.0]));
    }

    #[test]
    fn precession_validation() {
        assert!(matches!(
            precess_spin([1.0, 1.0, 0.0], [0.0, 0.0, 1.0], 0.1, 1),
            Err(Error::NotUnit(_))
        ));
        assert!(precess_spin([1.0, 0.0, 0.0], [0.0, 0.0, 1.0], 0.0, 1).is_err());
    }

    #[test]
    fn large_steps_are_subdivided() {
        // one output step of a full quarter turn
        let tr = precess_spin([1.0, 0.0, 0.0], [0.0, 0.0, 1.0], std::f64::consts::FRAC_PI_2, 1).unwrap();
        let l = tr.last();
        assert!(l[0].abs() < 1e-9 && (l[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn plane_wave_velocity_is_wavenumber() {
        let p = GaussianPacket::new(0.0f64, 1e6, 1.7).unwrap();
        let q = GaussianPacket::new(0.0, 1e6, -0.4).unwrap();
        let w = TwoParticleWave::product(p, q).unwrap();
        assert!((guidance_velocity(&w, 0.3, -2.0, Particle::One).unwrap() - 1.7).abs() < 1e-12);
        assert!((guidance_velocity(&w, 0.3, -2.0, Particle::Two).unwrap() + 0.4).abs() < 1e-12);
    }

    #[test]
    fn real_wave_has_zero_velocity() {
        let p = GaussianPacket::new(-1.0, 0.5, 0.0).unwrap();
        let q = GaussianPacket::new(1.0, 0.7, 0.0).unwrap();
        let w = TwoParticleWave::new(vec![(Complex::new(1.0, 0.0), p, q), (Complex::new(-0.5, 0.0), q, p)]).unwrap();
        assert_eq!(guidance_velocity(&w, 0.2, 0.1, Particle::One).unwrap(), 0.0);
    }

    #[test]
    fn nodes_and_bad_widths_rejected() {
        let p = GaussianPacket::new(0.0, 1.0, 1.0).unwrap();
        let w = TwoParticleWave::new(vec![(Complex::new(1.0, 0.0), p, p), (Complex::new(-1.0, 0.0), p, p)]).unwrap();
        assert!(matches!(
            guidance_velocity(&w, 0.0, 0.0, Particle::One),
            Err(Error::Node { .. })
        ));
        assert!(GaussianPacket::new(0.0, 0.0, 1.0).is_err());
        assert!(TwoParticleWave::<f64>::new(vec![]).is_err());
    }

    #[test]
    fn beam_splitter_cases() {
        assert!(oumandel_residual(0.5, 0.5, 0.5, 0.5).unwrap() < 1e-12);
        assert!(oumandel_residual(1.0, 1.0, 0.0, 0.0).unwrap() < 1e-12);
        assert!(oumandel_residual(0.5, 0.5, 0.4, 0.5).is_err());
        assert!(oumandel_residual(1.5, 0.5, -0.5, 0.5).is_err());
    }

    #[test]
    fn single_precision_precession() {
        let tr = precess_spin([1.0f32, 0.0, 0.0], [0.0, 0.0, 1.0], 0.01, 100).unwrap();
        let l = tr.last();
        assert!((l[0] - 1.0f32.cos()).abs() < 1e-4);
    }
}
