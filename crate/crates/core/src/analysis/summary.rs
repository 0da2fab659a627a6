use serde::{Deserialize, Serialize};

use super::AnalysisError;

/// Five-number summary plus mean, as drawn by a box-and-whisker plot with
/// whiskers at the data range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxStats {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
    pub n: usize,
}

/// Quartiles by linear interpolation between order statistics
/// (position `p * (n - 1)` on the sorted sample).
pub fn box_stats(values: &[f64]) -> Result<BoxStats, AnalysisError> {
    if values.is_empty() {
        return Err(AnalysisError::TooFew { needed: 1, got: 0 });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(AnalysisError::NonFinite);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let quantile = |p: f64| {
        let pos = p * (sorted.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
    };
    Ok(BoxStats {
        min: sorted[0],
        q1: quantile(0.25),
        median: quantile(0.5),
        q3: quantile(0.75),
        max: sorted[sorted.len() - 1],
        mean: sorted.iter().sum::<f64>() / sorted.len() as f64,
        n: sorted.len(),
    })
}

/// Sample covariance of a 2-D point cloud and its eigen-decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceEigen {
    pub mean: [f64; 2],
    /// `[[xx, xy], [xy, yy]]`
    pub covariance: [[f64; 2]; 2],
    /// Descending.
    pub eigenvalues: [f64; 2],
    /// Unit eigenvectors matching `eigenvalues`, each with `x >= 0`
    /// (`y >= 0` when `x == 0`).
    pub eigenvectors: [[f64; 2]; 2],
}

impl CovarianceEigen {
    /// Direction of the principal eigenvector in degrees, in `(-90, 90]`.
    pub fn principal_axis_deg(&self) -> f64 {
        let [x, y] = self.eigenvectors[0];
        y.atan2(x).to_degrees()
    }
}

pub fn covariance_eigen(points: &[[f64; 2]]) -> Result<CovarianceEigen, AnalysisError> {
    let n = points.len();
    if n < 2 {
        return Err(AnalysisError::TooFew { needed: 2, got: n });
    }
    if points.iter().flatten().any(|v| !v.is_finite()) {
        return Err(AnalysisError::NonFinite);
    }
    let mx = points.iter().map(|p| p[0]).sum::<f64>() / n as f64;
    let my = points.iter().map(|p| p[1]).sum::<f64>() / n as f64;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in points {
        let (dx, dy) = (p[0] - mx, p[1] - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let d = (n - 1) as f64;
    let (a, b, c) = (sxx / d, sxy / d, syy / d);

    let half_trace = (a + c) / 2.0;
    let radius = ((a - c) / 2.0).hypot(b);
    let eigenvalues = [half_trace + radius, half_trace - radius];
    // Rotation angle that diagonalises [[a, b], [b, c]].
    let theta = 0.5 * (2.0 * b).atan2(a - c);
    let v1 = canonical_sign([theta.cos(), theta.sin()]);
    let v2 = canonical_sign([-theta.sin(), theta.cos()]);
    Ok(CovarianceEigen { mean: [mx, my], covariance: [[a, b], [b, c]], eigenvalues, eigenvectors: [v1, v2] })
}

fn canonical_sign(v: [f64; 2]) -> [f64; 2] {
    let flip = v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0);
    if flip {
        [-v[0], -v[1]]
    } else {
        v
    }
}
