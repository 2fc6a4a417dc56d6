//! Scalar types usable as sector amplitudes.
//!
//! Sectors at momentum `0` and `L/2` admit real bases; every other momentum
//! block needs complex amplitudes. Builders and solvers are generic over
//! [`Amplitude`] so the real blocks keep the cheaper real arithmetic.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use faer::traits::ComplexField;
use num_complex::Complex64;

pub trait Amplitude:
    ComplexField<Real = f64>
    + Copy
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Mul<f64, Output = Self>
    + Neg<Output = Self>
    + AddAssign
{
    const REAL: bool;

    /// Converts a complex number, dropping the imaginary part for real types.
    fn from_complex(z: Complex64) -> Self;
    fn to_complex(self) -> Complex64;
    fn conjugate(self) -> Self;
    fn norm_sqr(self) -> f64;

    fn from_real(x: f64) -> Self {
        Self::from_complex(Complex64::new(x, 0.0))
    }

    fn zero() -> Self {
        Self::from_real(0.0)
    }
}

impl Amplitude for f64 {
    const REAL: bool = true;

    fn from_complex(z: Complex64) -> Self {
        z.re
    }

    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }

    fn conjugate(self) -> Self {
        self
    }

    fn norm_sqr(self) -> f64 {
        self * self
    }
}

impl Amplitude for Complex64 {
    const REAL: bool = false;

    fn from_complex(z: Complex64) -> Self {
        z
    }

    fn to_complex(self) -> Complex64 {
        self
    }

    fn conjugate(self) -> Self {
        self.conj()
    }

    fn norm_sqr(self) -> f64 {
        Complex64::norm_sqr(&self)
    }
}

/// `<a|b>` with the first argument conjugated.
pub fn inner<T: Amplitude>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x.conjugate() * y)
}

pub fn norm<T: Amplitude>(v: &[T]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Rescales `v` to unit norm and returns the original norm.
pub fn normalize<T: Amplitude>(v: &mut [T]) -> f64 {
    let n = norm(v);
    if n > 0.0 {
        let inv = 1.0 / n;
        for x in v.iter_mut() {
            *x = *x * inv;
        }
    }
    n
}

/// Removes the global phase of a complex vector by making its
/// largest-magnitude coefficient real and positive. Returns the real vector
/// and the largest imaginary part left behind.
pub fn strip_phase(v: &[Complex64]) -> (Vec<f64>, f64) {
    let pivot = v
        .iter()
        .copied()
        .max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()))
        .unwrap_or(Complex64::new(1.0, 0.0));
    let phase = if pivot.norm() > 0.0 {
        pivot.conj() / pivot.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let mut residual: f64 = 0.0;
    let out = v
        .iter()
        .map(|&z| {
            let w = z * phase;
            residual = residual.max(w.im.abs());
            w.re
        })
        .collect();
    (out, residual)
}
