//! Bjøntegaard-Delta rate and quality.
//!
//! Each curve is fitted with a least-squares cubic (`log10 rate` as a function
//! of quality for BD-rate, quality as a function of `log10 rate` for
//! BD-quality). The fitted difference is integrated exactly over the closed
//! overlap of the two abscissa ranges and averaged. The fit is carried out on
//! an abscissa centred on its mean and scaled to `[-1, 1]` to keep the normal
//! equations well conditioned.

use serde::{Deserialize, Serialize};

use super::MetricsError;

pub const MIN_CURVE_POINTS: usize = 4;

/// Relative pivot size below which the normal equations count as singular.
const SINGULAR_PIVOT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QualityMetric {
    Psnr,
    Vmaf,
}

impl std::str::FromStr for QualityMetric {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "psnr" => Ok(Self::Psnr),
            "vmaf" => Ok(Self::Vmaf),
            other => Err(format!("unknown quality metric `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RdPoint {
    pub bitrate_mbps: f64,
    pub quality: f64,
}

/// Rate-distortion points with strictly increasing bitrates.
#[derive(Debug, Clone, PartialEq)]
pub struct RdCurve {
    points: Vec<RdPoint>,
    metric: QualityMetric,
}

impl RdCurve {
    pub fn new(points: Vec<RdPoint>, metric: QualityMetric) -> Result<Self, MetricsError> {
        if points.len() < MIN_CURVE_POINTS {
            return Err(MetricsError::InsufficientPoints { got: points.len() });
        }
        if let Some(p) = points.iter().find(|p| {
            !(p.bitrate_mbps.is_finite() && p.bitrate_mbps > 0.0 && p.quality.is_finite())
        }) {
            return Err(MetricsError::InvalidCurve(format!("bad point {p:?}")));
        }
        if points
            .windows(2)
            .any(|w| !(w[0].bitrate_mbps < w[1].bitrate_mbps))
        {
            return Err(MetricsError::InvalidCurve(
                "bitrates must be strictly increasing".into(),
            ));
        }
        Ok(Self { points, metric })
    }

    pub fn from_pairs(pairs: &[(f64, f64)], metric: QualityMetric) -> Result<Self, MetricsError> {
        Self::new(
            pairs
                .iter()
                .map(|&(bitrate_mbps, quality)| RdPoint {
                    bitrate_mbps,
                    quality,
                })
                .collect(),
            metric,
        )
    }

    pub fn points(&self) -> &[RdPoint] {
        &self.points
    }

    pub fn metric(&self) -> QualityMetric {
        self.metric
    }

    fn log_rates(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.bitrate_mbps.log10()).collect()
    }

    fn qualities(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.quality).collect()
    }
}

/// Cubic in the normalised variable `u = (x - center) / scale`.
#[derive(Debug, Clone, Copy)]
pub struct CubicFit {
    center: f64,
    scale: f64,
    coef: [f64; 4],
}

impl CubicFit {
    pub fn fit(xs: &[f64], ys: &[f64]) -> Result<Self, MetricsError> {
        debug_assert_eq!(xs.len(), ys.len());
        if xs.len() < MIN_CURVE_POINTS {
            return Err(MetricsError::InsufficientPoints { got: xs.len() });
        }
        let center = xs.iter().sum::<f64>() / xs.len() as f64;
        let scale = xs.iter().map(|x| (x - center).abs()).fold(0.0, f64::max);
        if scale == 0.0 {
            return Err(MetricsError::DegenerateFit);
        }

        let mut a = [[0.0f64; 5]; 4];
        for (x, y) in xs.iter().zip(ys) {
            let u = (x - center) / scale;
            let pw = [1.0, u, u * u, u * u * u];
            for i in 0..4 {
                for j in 0..4 {
                    a[i][j] += pw[i] * pw[j];
                }
                a[i][4] += pw[i] * y;
            }
        }
        let coef = solve4(a)?;
        Ok(Self {
            center,
            scale,
            coef,
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let u = (x - self.center) / self.scale;
        let c = &self.coef;
        ((c[3] * u + c[2]) * u + c[1]) * u + c[0]
    }

    fn antiderivative_u(&self, u: f64) -> f64 {
        let c = &self.coef;
        (((c[3] / 4.0 * u + c[2] / 3.0) * u + c[1] / 2.0) * u + c[0]) * u
    }

    /// Exact integral over `[lo, hi]` in the original variable.
    pub fn integrate(&self, lo: f64, hi: f64) -> f64 {
        let ul = (lo - self.center) / self.scale;
        let uh = (hi - self.center) / self.scale;
        self.scale * (self.antiderivative_u(uh) - self.antiderivative_u(ul))
    }
}

/// Gaussian elimination with partial pivoting on an augmented 4x5 system.
fn solve4(mut a: [[f64; 5]; 4]) -> Result<[f64; 4], MetricsError> {
    let norm = a
        .iter()
        .flat_map(|row| row[..4].iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("nonempty range");
        if a[pivot][col].abs() <= SINGULAR_PIVOT * norm {
            return Err(MetricsError::DegenerateFit);
        }
        a.swap(col, pivot);
        for row in col + 1..4 {
            let f = a[row][col] / a[col][col];
            for k in col..5 {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    let mut x = [0.0; 4];
    for row in (0..4).rev() {
        let s: f64 = (row + 1..4).map(|k| a[row][k] * x[k]).sum();
        x[row] = (a[row][4] - s) / a[row][row];
    }
    Ok(x)
}

fn range(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
}

/// Mean of `test - reference` over the closed overlap of both abscissa ranges.
/// A single-point overlap reports the pointwise difference.
fn mean_difference(
    ref_x: &[f64],
    ref_y: &[f64],
    test_x: &[f64],
    test_y: &[f64],
) -> Result<f64, MetricsError> {
    let (rl, rh) = range(ref_x);
    let (tl, th) = range(test_x);
    let lo = rl.max(tl);
    let hi = rh.min(th);
    if lo > hi {
        return Err(MetricsError::NoOverlap);
    }
    let fr = CubicFit::fit(ref_x, ref_y)?;
    let ft = CubicFit::fit(test_x, test_y)?;
    if lo == hi {
        return Ok(ft.eval(lo) - fr.eval(lo));
    }
    Ok((ft.integrate(lo, hi) - fr.integrate(lo, hi)) / (hi - lo))
}

fn same_metric(a: &RdCurve, b: &RdCurve) -> Result<(), MetricsError> {
    if a.metric != b.metric {
        return Err(MetricsError::MetricMismatch);
    }
    Ok(())
}

/// Average bitrate difference of `test` against `reference` at equal
/// quality, in percent. Negative values mean `test` needs less bitrate.
pub fn bd_rate(reference: &RdCurve, test: &RdCurve) -> Result<f64, MetricsError> {
    same_metric(reference, test)?;
    let d = mean_difference(
        &reference.qualities(),
        &reference.log_rates(),
        &test.qualities(),
        &test.log_rates(),
    )?;
    Ok((10f64.powf(d) - 1.0) * 100.0)
}

/// Average quality difference of `test` against `reference` at equal
/// bitrate. Positive values mean `test` has higher quality.
pub fn bd_quality(reference: &RdCurve, test: &RdCurve) -> Result<f64, MetricsError> {
    same_metric(reference, test)?;
    mean_difference(
        &reference.log_rates(),
        &reference.qualities(),
        &test.log_rates(),
        &test.qualities(),
    )
}
