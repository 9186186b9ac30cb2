//! Uniform-grid quadrature: composite Simpson and its running (cumulative)
//! form.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `n` equally spaced nodes on `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid<T> {
    pub start: T,
    pub end: T,
    pub nodes: usize,
}

impl<T: Real> UniformGrid<T> {
    /// Requires an odd node count of at least three.
    pub fn simpson(start: T, end: T, nodes: usize) -> Result<Self> {
        if nodes < 3 || nodes % 2 == 0 {
            return Err(Error::InvalidArgument(format!(
                "Simpson grid needs an odd number of nodes >= 3, got {nodes}"
            )));
        }
        if !(end >= start) {
            return Err(Error::InvalidArgument(format!(
                "grid end {end} precedes start {start}"
            )));
        }
        Ok(Self { start, end, nodes })
    }

    pub fn step(&self) -> T {
        (self.end - self.start) / T::from_usize(self.nodes - 1).expect("node count")
    }

    pub fn node(&self, i: usize) -> T {
        if i + 1 == self.nodes {
            self.end
        } else {
            self.start + self.step() * T::from_usize(i).expect("index")
        }
    }

    pub fn points(&self) -> Vec<T> {
        (0..self.nodes).map(|i| self.node(i)).collect()
    }
}

/// Composite Simpson over an odd number of equally spaced samples.
pub fn simpson<T: Real>(values: &[T], h: T) -> T {
    let n = values.len();
    debug_assert!(n >= 3 && n % 2 == 1);
    let mut acc = values[0] + values[n - 1];
    for (i, &v) in values.iter().enumerate().take(n - 1).skip(1) {
        acc += if i % 2 == 1 { T::lit(4.0) } else { T::lit(2.0) } * v;
    }
    acc * h / T::lit(3.0)
}

/// Running integral `out[i] = ∫_{x₀}^{xᵢ} f`.
///
/// Even nodes carry the composite Simpson sum; each odd node adds the
/// single-interval integral of the parabola through its three neighbours,
/// so every entry is fourth-order accurate and the last entry of an
/// odd-length input equals [`simpson`].
pub fn cumulative_simpson<T: Real>(values: &[T], h: T) -> Vec<T> {
    let n = values.len();
    let mut out = vec![T::zero(); n];
    if n < 2 {
        return out;
    }
    if n == 2 {
        out[1] = T::lit(0.5) * h * (values[0] + values[1]);
        return out;
    }
    let third = h / T::lit(3.0);
    let twelfth = h / T::lit(12.0);
    for i in 1..n {
        out[i] = if i % 2 == 0 {
            out[i - 2] + third * (values[i - 2] + T::lit(4.0) * values[i - 1] + values[i])
        } else if i + 1 < n {
            out[i - 1]
                + twelfth * (T::lit(5.0) * values[i - 1] + T::lit(8.0) * values[i] - values[i + 1])
        } else {
            out[i - 1]
                + twelfth * (-values[i - 2] + T::lit(8.0) * values[i - 1] + T::lit(5.0) * values[i])
        };
    }
    out
}
