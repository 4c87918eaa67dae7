use alloc::vec::Vec;

use crate::error::{invalid, Result};

/// A discretization scale `0 < delta <= 1/2`.
///
/// Exact powers of two remember their exponent so that `sqrt` and
/// rescalings stay exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scale {
    delta: f64,
    exponent: Option<u32>,
}

fn dyadic_exponent_of(delta: f64) -> Option<u32> {
    let (mantissa, exp) = libm::frexp(delta);
    // frexp returns mantissa in [1/2, 1); a power of two has mantissa exactly 1/2.
    if mantissa == 0.5 && exp <= 0 {
        Some((1 - exp) as u32)
    } else {
        None
    }
}

impl Scale {
    pub fn new(delta: f64) -> Result<Self> {
        if !delta.is_finite() || delta <= 0.0 || delta > 0.5 {
            return Err(invalid("delta", alloc::format!("{delta} is not in (0, 1/2]")));
        }
        Ok(Scale {
            delta,
            exponent: dyadic_exponent_of(delta),
        })
    }

    /// The scale `2^-j`, `j >= 1`.
    pub fn dyadic(j: u32) -> Result<Self> {
        if j == 0 || j > 1000 {
            return Err(invalid("j", alloc::format!("dyadic exponent {j} not in 1..=1000")));
        }
        Ok(Scale {
            delta: libm::ldexp(1.0, -(j as i32)),
            exponent: Some(j),
        })
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.delta
    }

    /// `Some(j)` when `delta == 2^-j` exactly.
    pub fn dyadic_exponent(&self) -> Option<u32> {
        self.exponent
    }

    /// Natural logarithm of `1/delta`.
    pub fn log_inv(&self) -> f64 {
        -libm::log(self.delta)
    }

    /// `sqrt(delta)`; exact when `delta = 2^-2j`.
    pub fn sqrt(&self) -> Result<Scale> {
        match self.exponent {
            Some(j) if j % 2 == 0 => Scale::dyadic(j / 2),
            _ => Scale::new(libm::sqrt(self.delta)),
        }
    }

    pub fn scaled(&self, factor: f64) -> Result<Scale> {
        Scale::new(self.delta * factor)
    }

    /// Index of the half-open cell `[k delta, (k+1) delta)` holding `x`.
    ///
    /// Returns the largest `k` with `(k as f64) * delta <= x`, evaluated in
    /// floating point, so exact multiples land on their own index.
    #[inline]
    pub fn cell(&self, x: f64) -> i64 {
        cell_index(x, self.delta)
    }

    /// The dyadic radii `delta, 2 delta, 4 delta, ...` not exceeding 1.
    pub fn dyadic_radii(&self) -> Vec<f64> {
        let mut radii = Vec::new();
        let mut r = self.delta;
        while r <= 1.0 + 1e-12 {
            radii.push(r);
            r *= 2.0;
        }
        radii
    }
}

/// Largest `k` with `k * step <= x` in floating point.
#[inline]
pub fn cell_index(x: f64, step: f64) -> i64 {
    let mut k = libm::floor(x / step) as i64;
    if ((k + 1) as f64) * step <= x {
        k += 1;
    } else if (k as f64) * step > x {
        k -= 1;
    }
    k
}
