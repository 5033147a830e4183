use nalgebra::{DMatrix, DVector, SVD};

use crate::error::{Error, Result};

pub const DEFAULT_RCOND: f64 = 1e-10;

/// Least-squares filter `W = V^+ y` through the SVD pseudoinverse.
///
/// Singular values below `rcond * sigma_max` are treated as zero, so for
/// rank-deficient `V` the result is the minimum-norm minimizer.
pub fn fit_filter(v: &DMatrix<f64>, y: &[f64], rcond: f64) -> Result<Vec<f64>> {
    if v.nrows() != y.len() {
        return Err(Error::LengthMismatch {
            what: "teacher sequence",
            expected: v.nrows(),
            actual: y.len(),
        });
    }
    if !(rcond.is_finite() && rcond > 0.0) {
        return Err(Error::OutOfRange {
            what: "rcond",
            value: rcond,
        });
    }
    if v.iter().chain(y).any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("reservoir matrix or teacher"));
    }
    if v.is_empty() {
        return Err(Error::Empty("reservoir matrix"));
    }

    let svd = SVD::new(v.clone(), true, true);
    let sigma_max = svd.singular_values.max();
    if sigma_max == 0.0 {
        return Err(Error::DegenerateRank);
    }
    let cutoff = rcond * sigma_max;
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let y = DVector::from_column_slice(y);

    let mut w = DVector::<f64>::zeros(v.ncols());
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff {
            let coeff = u.column(i).dot(&y) / s;
            w += v_t.row(i).transpose() * coeff;
        }
    }
    Ok(w.iter().copied().collect())
}

/// `V W`.
pub fn predict(v: &DMatrix<f64>, w: &[f64]) -> Result<Vec<f64>> {
    if v.ncols() != w.len() {
        return Err(Error::LengthMismatch {
            what: "filter",
            expected: v.ncols(),
            actual: w.len(),
        });
    }
    let out = v * DVector::from_column_slice(w);
    Ok(out.iter().copied().collect())
}

/// Sum of squared differences.
pub fn qrc_loss(y_tilde: &[f64], y: &[f64]) -> Result<f64> {
    if y_tilde.len() != y.len() {
        return Err(Error::LengthMismatch {
            what: "prediction",
            expected: y.len(),
            actual: y_tilde.len(),
        });
    }
    Ok(y_tilde.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    fn residual(v: &DMatrix<f64>, w: &[f64], y: &[f64]) -> f64 {
        qrc_loss(&predict(v, w).unwrap(), y).unwrap().sqrt()
    }

    #[test]
    fn identity_filter() {
        let v = DMatrix::<f64>::identity(3, 3);
        let y = [0.3, -1.2, 2.5];
        let w = fit_filter(&v, &y, DEFAULT_RCOND).unwrap();
        for (a, b) in w.iter().zip(&y) {
            assert!((a - b).abs() < 1e-14);
        }
        assert_eq!(predict(&v, &w).unwrap(), w);
    }

    #[test]
    fn normal_equation_oracle() {
        let mut rng = RngStream::from_seed(5);
        let v = DMatrix::from_fn(30, 4, |_, _| rng.uniform(0.0, 1.0));
        let y: Vec<f64> = (0..30).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let w = fit_filter(&v, &y, DEFAULT_RCOND).unwrap();

        let vt = v.transpose();
        let oracle = (&vt * &v).try_inverse().unwrap() * (&vt * DVector::from_column_slice(&y));
        let oracle: Vec<f64> = oracle.iter().copied().collect();
        assert!((residual(&v, &w, &y) - residual(&v, &oracle, &y)).abs() < 1e-8);
        for (a, b) in w.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn duplicated_column_gives_minimum_norm() {
        // V = [[1,1],[2,2],[3,3]]; every minimizer has w0 + w1 = s with
        // s = (1*1 + 2*2 + 3*3)/(1+4+9) * scale, and the minimum-norm one
        // splits s evenly.
        let v = DMatrix::from_row_slice(3, 2, &[1.0, 1.0, 2.0, 2.0, 3.0, 3.0]);
        let y = [1.0, 2.0, 4.0];
        let s = (1.0 * 1.0 + 2.0 * 2.0 + 3.0 * 4.0) / 14.0;
        let w = fit_filter(&v, &y, DEFAULT_RCOND).unwrap();
        assert!((w[0] - s / 2.0).abs() < 1e-12);
        assert!((w[1] - s / 2.0).abs() < 1e-12);
    }

    #[test]
    fn square_fit_interpolates() {
        let v = DMatrix::from_row_slice(3, 3, &[0.9, 0.1, 0.3, 0.2, 0.8, 0.5, 0.4, 0.4, 0.7]);
        let y = [1.0, -2.0, 0.5];
        let w = fit_filter(&v, &y, DEFAULT_RCOND).unwrap();
        let yt = predict(&v, &w).unwrap();
        for (a, b) in yt.iter().zip(&y) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn errors() {
        let zero = DMatrix::<f64>::zeros(4, 2);
        assert_eq!(
            fit_filter(&zero, &[1.0; 4], 1e-10),
            Err(Error::DegenerateRank)
        );
        let v = DMatrix::<f64>::identity(2, 2);
        assert!(fit_filter(&v, &[1.0; 3], 1e-10).is_err());
        assert!(fit_filter(&v, &[1.0; 2], 0.0).is_err());
        assert!(predict(&v, &[1.0; 3]).is_err());
        assert!(qrc_loss(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn loss_examples() {
        assert_eq!(qrc_loss(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        let y = [0.1, 0.7, -0.4, 2.0, 5.0];
        let shifted: Vec<f64> = y.iter().map(|v| v + 1.0).collect();
        assert!((qrc_loss(&shifted, &y).unwrap() - 5.0).abs() < 1e-12);
        assert_eq!(qrc_loss(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 25.0);
        assert_eq!(
            predict(&DMatrix::from_element(3, 2, 0.7), &[0.0, 0.0]).unwrap(),
            vec![0.0; 3]
        );
    }
}
