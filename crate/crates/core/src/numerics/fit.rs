use crate::error::{Error, Result};

/// Ordinary least-squares line `y = slope · x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub max_abs_residual: f64,
}

pub fn linear_fit(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.len() < 2 {
        return Err(Error::domain("linear_fit needs at least two points"));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let spread = points.iter().map(|p| (p.0 - mx).abs()).fold(0.0, f64::max);
    if sxx == 0.0 || spread <= 1e-300 {
        return Err(Error::domain("degenerate fit: all x values identical"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_abs_residual =
        points.iter().map(|p| (p.1 - slope * p.0 - intercept).abs()).fold(0.0, f64::max);
    Ok(FitResult { slope, intercept, max_abs_residual })
}
