use std::f64::consts::{PI, TAU};
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QcError, Result};
use crate::field::{dft2, FrequencyMultiplier, GridSpec};

/// Tolerance for the zero-mean and evenness checks on angular tables.
pub const TABLE_TOLERANCE: f64 = 1e-8;

/// Homogeneous kernel `K(z) = ω(arg z)/|z|²` sampled at `θ_k = 2πk/m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngularTable {
    omega: Vec<Complex64>,
}

impl AngularTable {
    /// Validates zero circular mean and `ω(θ+π) = ω(θ)`.
    pub fn new(omega: Vec<Complex64>) -> Result<Self> {
        let m = omega.len();
        if m < 8 || !m.is_multiple_of(2) {
            return Err(QcError::InvalidArgument(format!(
                "angular table needs an even number >= 8 of samples, got {m}"
            )));
        }
        if omega.iter().any(|w| !w.re.is_finite() || !w.im.is_finite()) {
            return Err(QcError::InvalidArgument("non-finite kernel table entry".into()));
        }
        let mean = omega.iter().sum::<Complex64>() / m as f64;
        if mean.norm() > TABLE_TOLERANCE {
            return Err(QcError::InvalidArgument(format!(
                "kernel table has circular mean {:.3e}, must vanish",
                mean.norm()
            )));
        }
        let odd = (0..m / 2)
            .map(|k| (omega[k] - omega[k + m / 2]).norm())
            .fold(0.0, f64::max);
        if odd > TABLE_TOLERANCE {
            return Err(QcError::InvalidArgument(format!(
                "kernel table is not even: |ω(θ+π)−ω(θ)| up to {odd:.3e}"
            )));
        }
        Ok(Self { omega })
    }

    /// Samples `ω` on `m` equally spaced angles.
    pub fn from_fn<F: Fn(f64) -> Complex64>(m: usize, omega: F) -> Result<Self> {
        Self::new((0..m).map(|k| omega(TAU * k as f64 / m as f64)).collect())
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.omega
    }

    /// Periodic linear interpolation of `ω`.
    pub fn omega(&self, theta: f64) -> Complex64 {
        let m = self.omega.len();
        let s = theta.rem_euclid(TAU) / TAU * m as f64;
        let k = (s.floor() as usize) % m;
        let t = s - s.floor();
        self.omega[k] * (1.0 - t) + self.omega[(k + 1) % m] * t
    }

    /// Reads `θ,re[,im]` rows; θ must be the uniform grid `2πk/m`.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let nums: Option<Vec<f64>> = line.split(',').map(|s| s.trim().parse().ok()).collect();
            match nums {
                Some(v) if v.len() == 2 || v.len() == 3 => {
                    rows.push((v[0], Complex64::new(v[1], v.get(2).copied().unwrap_or(0.0))))
                }
                None if lineno == 0 => continue,
                _ => {
                    return Err(QcError::Config(format!(
                        "{}:{}: expected `theta,re[,im]`",
                        path.display(),
                        lineno + 1
                    )))
                }
            }
        }
        let m = rows.len();
        for (k, (theta, _)) in rows.iter().enumerate() {
            if (theta - TAU * k as f64 / m as f64).abs() > 1e-9 {
                return Err(QcError::Config(format!(
                    "{}: angles are not the uniform grid 2πk/{m} (row {k})",
                    path.display()
                )));
            }
        }
        Self::new(rows.into_iter().map(|(_, w)| w).collect())
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let m = self.omega.len();
        let mut out = String::from("theta,re,im\n");
        for (k, w) in self.omega.iter().enumerate() {
            out.push_str(&format!("{:?},{:?},{:?}\n", TAU * k as f64 / m as f64, w.re, w.im));
        }
        fs::write(path, out)?;
        Ok(())
    }
}

/// Convolution kernel of a Calderón–Zygmund operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelDescriptor {
    /// `bₙ(z) = ((−1)ⁿ n/π)·z̄^{n−1}/z^{n+1}`, the kernel of `Bⁿ`.
    Power(u32),
    Table(AngularTable),
}

impl KernelDescriptor {
    pub fn power(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(QcError::InvalidArgument("kernel degree must be >= 1".into()));
        }
        Ok(KernelDescriptor::Power(n))
    }

    /// `K(z)`; zero at the origin.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        if z == Complex64::new(0.0, 0.0) {
            return z;
        }
        match self {
            KernelDescriptor::Power(n) => {
                let n = *n;
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                let c = sign * n as f64 / PI;
                z.conj().powu(n - 1) / z.powu(n + 1) * c
            }
            KernelDescriptor::Table(t) => t.omega(z.arg()) / z.norm_sqr(),
        }
    }

    /// Fourier multiplier of the operator on `grid`: exact `(ξ̄/ξ)ⁿ` for
    /// powers, the DFT of the sampled kernel for tables.
    pub fn multiplier(&self, grid: &GridSpec) -> FrequencyMultiplier {
        match self {
            KernelDescriptor::Power(n) => FrequencyMultiplier::beurling_power(*n),
            KernelDescriptor::Table(_) => {
                let n = grid.n();
                let h = grid.spacing();
                let mut data: Vec<Complex64> = (0..n * n)
                    .map(|i| {
                        let dy = grid.frequency_of_bin(i / n) as f64 * h;
                        let dx = grid.frequency_of_bin(i % n) as f64 * h;
                        self.eval(Complex64::new(dx, dy)) * (h * h)
                    })
                    .collect();
                dft2(&mut data, n);
                FrequencyMultiplier::from_table(n, data)
            }
        }
    }
}

/// `‖K|x|²‖∞ + ‖∇K|x|³‖∞`, evaluated on the unit circle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CZConstant {
    pub value: f64,
    pub kernel_part: f64,
    pub gradient_part: f64,
}

/// Circle samples used by [`cz_constant`].
pub const CZ_CIRCLE_SAMPLES: usize = 4096;

/// Step of the central differences for tabulated kernels.
pub const CZ_DIFF_STEP: f64 = 1e-5;

pub fn cz_constant(k: &KernelDescriptor) -> CZConstant {
    let mut kernel_part: f64 = 0.0;
    let mut gradient_part: f64 = 0.0;
    for j in 0..CZ_CIRCLE_SAMPLES {
        let z = Complex64::from_polar(1.0, TAU * j as f64 / CZ_CIRCLE_SAMPLES as f64);
        kernel_part = kernel_part.max(k.eval(z).norm());
        let (kx, ky) = match k {
            KernelDescriptor::Power(n) => {
                let n = *n;
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                let c = sign * n as f64 / PI;
                let d = -(n as f64 + 1.0) * c * z.conj().powu(n - 1) / z.powu(n + 2);
                let dbar = if n >= 2 {
                    (n as f64 - 1.0) * c * z.conj().powu(n - 2) / z.powu(n + 1)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                (d + dbar, Complex64::i() * (d - dbar))
            }
            KernelDescriptor::Table(_) => {
                let hx = Complex64::new(CZ_DIFF_STEP, 0.0);
                let hy = Complex64::new(0.0, CZ_DIFF_STEP);
                (
                    (k.eval(z + hx) - k.eval(z - hx)) / (2.0 * CZ_DIFF_STEP),
                    (k.eval(z + hy) - k.eval(z - hy)) / (2.0 * CZ_DIFF_STEP),
                )
            }
        };
        gradient_part = gradient_part.max((kx.norm_sqr() + ky.norm_sqr()).sqrt());
    }
    CZConstant {
        value: kernel_part + gradient_part,
        kernel_part,
        gradient_part,
    }
}

/// Closed form of `‖bₙ‖_CZ`: `n/π + (2n/π)·√(n²+1)`.
pub fn power_cz_constant_exact(n: u32) -> f64 {
    let n = n as f64;
    n / PI + 2.0 * n / PI * (n * n + 1.0).sqrt()
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let m = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn b1_is_minus_one_over_pi_z_squared() {
        let k = KernelDescriptor::power(1).unwrap();
        let z = Complex64::new(0.3, -1.1);
        let want = -1.0 / (PI * z * z);
        assert!((k.eval(z) - want).norm() < 1e-14);
        assert!(KernelDescriptor::power(0).is_err());
    }

    #[test]
    fn power_kernels_are_even() {
        for n in 1..=6 {
            let k = KernelDescriptor::Power(n);
            let z = Complex64::new(0.7, 0.2);
            assert_eq!(k.eval(z), k.eval(-z));
        }
    }

    #[test]
    fn cz_constant_matches_closed_form() {
        for n in 1..=12 {
            let got = cz_constant(&KernelDescriptor::Power(n)).value;
            let want = power_cz_constant_exact(n);
            assert!((got - want).abs() / want < 1e-12, "n={n}: {got} vs {want}");
        }
        let b1 = cz_constant(&KernelDescriptor::Power(1));
        assert!((b1.kernel_part - 1.0 / PI).abs() < 1e-12);
    }

    #[test]
    fn tabulated_b2_matches_power_kernel() {
        // b₂(z) = (2/π)·e^{−4iθ}/|z|²
        let table = AngularTable::from_fn(2048, |t| Complex64::from_polar(2.0 / PI, -4.0 * t)).unwrap();
        let k = KernelDescriptor::Table(table);
        let z = Complex64::from_polar(1.7, 0.9);
        assert!((k.eval(z) - KernelDescriptor::Power(2).eval(z)).norm() < 1e-4);
        let a = cz_constant(&k).value;
        let b = power_cz_constant_exact(2);
        assert!((a - b).abs() / b < 1e-3, "{a} vs {b}");
    }

    #[test]
    fn zero_table_has_zero_constant() {
        let k = KernelDescriptor::Table(AngularTable::new(vec![Complex64::new(0.0, 0.0); 64]).unwrap());
        assert_eq!(cz_constant(&k).value, 0.0);
    }

    #[test]
    fn table_validation() {
        let odd = AngularTable::from_fn(64, |t| Complex64::new(t.cos(), 0.0));
        assert!(odd.is_err());
        let biased = AngularTable::from_fn(64, |t| Complex64::new(1.0 + (2.0 * t).cos(), 0.0));
        assert!(biased.is_err());
        assert!(AngularTable::from_fn(64, |t| Complex64::new((2.0 * t).cos(), 0.0)).is_ok());
    }

    #[test]
    fn table_csv_round_trip() {
        let t = AngularTable::from_fn(64, |t| Complex64::new((2.0 * t).cos(), (4.0 * t).sin())).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("k.csv");
        t.write_csv(&p).unwrap();
        assert_eq!(AngularTable::read_csv(&p).unwrap(), t);
    }

    #[test]
    fn sampled_multiplier_approximates_beurling() {
        let grid = GridSpec::new(Complex64::new(0.0, 0.0), 4.0, 128).unwrap();
        let table = AngularTable::from_fn(4096, |t| Complex64::from_polar(-1.0 / PI, -2.0 * t)).unwrap();
        let sampled = KernelDescriptor::Table(table).multiplier(&grid);
        let exact = FrequencyMultiplier::beurling_power(1);
        let f = crate::field::Field::sample(grid, |z| Complex64::new((-4.0 * z.norm_sqr()).exp(), 0.0)).unwrap();
        let a = crate::field::apply_multiplier(&f, &sampled);
        let b = crate::field::apply_multiplier(&f, &exact);
        assert!(a.relative_l2_error(&b).unwrap() < 0.1);
    }
}
