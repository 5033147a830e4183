//! Uniform B-spline basis for the learnable VQKAN activations.

use crate::error::{Error, Result};
use crate::qml::encoding::fermi_dirac;

/// Uniform B-spline basis on `[lo, hi]` with `n_cells` grid cells.
///
/// The knot vector is extended by `degree` knots on each side, giving
/// `n_cells + degree` basis functions that sum to one on `[lo, hi]`.
/// Evaluation clamps its argument into `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BSplineBasis {
    lo: f64,
    hi: f64,
    n_cells: usize,
    degree: usize,
    knots: Vec<f64>,
}

impl BSplineBasis {
    pub fn new(lo: f64, hi: f64, n_cells: usize, degree: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidArgument(format!(
                "spline domain [{lo}, {hi}] is empty"
            )));
        }
        if n_cells == 0 {
            return Err(Error::OutOfRange {
                what: "spline grid cells",
                value: 0.0,
            });
        }
        let h = (hi - lo) / n_cells as f64;
        let knots = (0..=n_cells + 2 * degree)
            .map(|i| lo + (i as f64 - degree as f64) * h)
            .collect();
        Ok(Self {
            lo,
            hi,
            n_cells,
            degree,
            knots,
        })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn n_basis(&self) -> usize {
        self.n_cells + self.degree
    }

    /// Support `[t_l, t_{l+degree+1})` of basis function `l`.
    pub fn support(&self, l: usize) -> (f64, f64) {
        (self.knots[l], self.knots[l + self.degree + 1])
    }

    /// Knot span containing `x` (already clamped), as an index into `knots`.
    fn span(&self, x: f64) -> usize {
        let h = (self.hi - self.lo) / self.n_cells as f64;
        let cell = ((x - self.lo) / h).floor() as isize;
        let cell = cell.clamp(0, self.n_cells as isize - 1) as usize;
        let mut s = self.degree + cell;
        // Guard against rounding in the cell computation.
        while s > self.degree && x < self.knots[s] {
            s -= 1;
        }
        while s + 1 < self.degree + self.n_cells && x >= self.knots[s + 1] {
            s += 1;
        }
        s
    }

    /// All basis values at `x`; at most `degree + 1` entries are nonzero.
    pub fn evaluate(&self, x: f64) -> Vec<f64> {
        let x = x.clamp(self.lo, self.hi);
        let p = self.degree;
        let s = self.span(x);
        let t = &self.knots;

        // Triangular Cox-de Boor scheme for the p + 1 functions alive on span s.
        let mut n = vec![0.0; p + 1];
        let mut left = vec![0.0; p + 1];
        let mut right = vec![0.0; p + 1];
        n[0] = 1.0;
        for j in 1..=p {
            left[j] = x - t[s + 1 - j];
            right[j] = t[s + j] - x;
            let mut saved = 0.0;
            for r in 0..j {
                let temp = n[r] / (right[r + 1] + left[j - r]);
                n[r] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            n[j] = saved;
        }

        let mut out = vec![0.0; self.n_basis()];
        out[s - p..=s].copy_from_slice(&n);
        out
    }

    /// `sum_l c_l B_l(x)`.
    pub fn combine(&self, coefficients: &[f64], x: f64) -> f64 {
        debug_assert_eq!(coefficients.len(), self.n_basis());
        self.evaluate(x)
            .iter()
            .zip(coefficients)
            .map(|(b, c)| b * c)
            .sum()
    }
}

/// Rotation angle for one VQKAN gate:
/// `sum_i acos(clamp(E_f(x_i) + sum_l c_l B_l(x_i), -1, 1))`.
///
/// Returns the angle and how many of the `acos` arguments had to be clamped.
pub fn vqkan_angle(
    inputs: &[f64],
    coefficients: &[f64],
    basis: &BSplineBasis,
) -> Result<(f64, usize)> {
    if coefficients.len() != basis.n_basis() {
        return Err(Error::LengthMismatch {
            what: "spline coefficients",
            expected: basis.n_basis(),
            actual: coefficients.len(),
        });
    }
    let mut clamps = 0;
    let mut angle = 0.0;
    for &x in inputs {
        if !x.is_finite() {
            return Err(Error::NonFinite("VQKAN input"));
        }
        let arg = fermi_dirac(x) + basis.combine(coefficients, x);
        if !arg.is_finite() {
            return Err(Error::NonFinite("VQKAN activation"));
        }
        if !(-1.0..=1.0).contains(&arg) {
            clamps += 1;
        }
        angle += arg.clamp(-1.0, 1.0).acos();
    }
    Ok((angle, clamps))
}
