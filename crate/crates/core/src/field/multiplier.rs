use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use super::fft::{dft2, idft2};
use super::{Field, GridSpec};

/// Integer frequency pair on the grid lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Frequency {
    pub k1: i64,
    pub k2: i64,
}

impl Frequency {
    pub fn is_zero(&self) -> bool {
        self.k1 == 0 && self.k2 == 0
    }

    /// `ξ = k1 + i·k2`.
    pub fn complex(&self) -> Complex64 {
        Complex64::new(self.k1 as f64, self.k2 as f64)
    }
}

type Rule = dyn Fn(Frequency) -> Complex64 + Send + Sync;

/// A Fourier multiplier: a rule on nonzero frequencies plus an explicit
/// value at `ξ = 0`.
#[derive(Clone)]
pub struct FrequencyMultiplier {
    rule: Arc<Rule>,
    zero_frequency: Complex64,
}

impl fmt::Debug for FrequencyMultiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FrequencyMultiplier")
            .field("zero_frequency", &self.zero_frequency)
            .finish_non_exhaustive()
    }
}

impl FrequencyMultiplier {
    pub fn new<F>(rule: F, zero_frequency: Complex64) -> Self
    where
        F: Fn(Frequency) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            rule: Arc::new(rule),
            zero_frequency,
        }
    }

    pub fn identity() -> Self {
        Self::new(|_| Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0))
    }

    pub fn zero() -> Self {
        Self::new(|_| Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    }

    /// `(ξ̄/ξ)ⁿ` with zero frequency mapped to 0: the multiplier of `Bⁿ`.
    pub fn beurling_power(n: u32) -> Self {
        Self::new(
            move |f| {
                let xi = f.complex();
                (xi.conj() / xi).powu(n)
            },
            Complex64::new(0.0, 0.0),
        )
    }

    /// Multiplier of the Cauchy transform on a box of side `L`:
    /// `L / (π i ξ)`, zero frequency 0.
    pub fn cauchy(side: f64) -> Self {
        Self::new(
            move |f| {
                let xi = f.complex();
                Complex64::new(side / std::f64::consts::PI, 0.0) / (Complex64::i() * xi)
            },
            Complex64::new(0.0, 0.0),
        )
    }

    /// Multiplier given as a dense table in FFT bin order.
    pub fn from_table(n: usize, table: Vec<Complex64>) -> Self {
        assert_eq!(table.len(), n * n, "multiplier table must be n×n");
        let zero = table[0];
        let ni = n as i64;
        Self::new(
            move |f| {
                let b1 = f.k1.rem_euclid(ni) as usize;
                let b2 = f.k2.rem_euclid(ni) as usize;
                table[b2 * n + b1]
            },
            zero,
        )
    }

    pub fn zero_frequency(&self) -> Complex64 {
        self.zero_frequency
    }

    pub fn eval(&self, f: Frequency) -> Complex64 {
        if f.is_zero() {
            self.zero_frequency
        } else {
            (self.rule)(f)
        }
    }

    /// Multiplier values in FFT bin order for `grid`.
    pub fn table(&self, grid: &GridSpec) -> Vec<Complex64> {
        let n = grid.n();
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        out.par_chunks_mut(n).enumerate().for_each(|(b2, row)| {
            let k2 = grid.frequency_of_bin(b2);
            for (b1, v) in row.iter_mut().enumerate() {
                *v = self.eval(Frequency {
                    k1: grid.frequency_of_bin(b1),
                    k2,
                });
            }
        });
        out
    }
}

/// `IDFT(m · DFT(field))`.
pub fn apply_multiplier(field: &Field, m: &FrequencyMultiplier) -> Field {
    let grid = *field.grid();
    let table = m.table(&grid);
    apply_table(field, &table)
}

pub(crate) fn apply_table(field: &Field, table: &[Complex64]) -> Field {
    let grid = *field.grid();
    let n = grid.n();
    let mut data = field.values().to_vec();
    dft2(&mut data, n);
    data.par_iter_mut().zip(table.par_iter()).for_each(|(v, m)| *v *= m);
    idft2(&mut data, n);
    Field::from_parts(grid, data)
}
