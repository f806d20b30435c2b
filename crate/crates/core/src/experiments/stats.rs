/// Sum by a fixed binary tree over the slice indices, so the result depends
/// only on the values and their order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

fn mean(xs: &[f64]) -> f64 {
    pairwise_sum(xs) / xs.len() as f64
}

/// Linear-interpolation quantile of unsorted data, `q ∈ [0, 1]`.
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

/// Mean of one metric with its standard error and, when a closed form
/// exists, the prediction and relative error against it.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryStats {
    pub metric: String,
    pub sigma: Option<f64>,
    pub mean: f64,
    /// Sample standard deviation over `√n`.
    pub std_error: f64,
    pub n: usize,
    pub prediction: Option<f64>,
    /// `|mean − prediction| / |prediction|`.
    pub rel_err: Option<f64>,
}

impl SummaryStats {
    pub fn from_samples(metric: &str, sigma: Option<f64>, xs: &[f64]) -> Self {
        let n = xs.len();
        let (m, se) = match n {
            0 => (f64::NAN, f64::NAN),
            1 => (xs[0], f64::NAN),
            _ => {
                let m = mean(xs);
                let dev: Vec<f64> = xs.iter().map(|x| (x - m) * (x - m)).collect();
                let var = pairwise_sum(&dev) / (n - 1) as f64;
                (m, (var / n as f64).sqrt())
            }
        };
        Self { metric: metric.into(), sigma, mean: m, std_error: se, n, prediction: None, rel_err: None }
    }

    /// `mean(a)/mean(b)` over paired samples, with a delta-method standard
    /// error that accounts for the pairing.
    pub fn ratio(metric: &str, sigma: Option<f64>, a: &[f64], b: &[f64]) -> Self {
        assert_eq!(a.len(), b.len(), "ratio needs paired samples");
        let n = a.len();
        let (ma, mb) = (mean(a), mean(b));
        let r = ma / mb;
        let se = if n > 1 {
            let resid: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - r * y).collect();
            let mr = mean(&resid);
            let dev: Vec<f64> = resid.iter().map(|d| (d - mr) * (d - mr)).collect();
            let var = pairwise_sum(&dev) / (n - 1) as f64;
            (var / n as f64).sqrt() / mb.abs()
        } else {
            f64::NAN
        };
        Self { metric: metric.into(), sigma, mean: r, std_error: se, n, prediction: None, rel_err: None }
    }

    /// Root of the mean of squared samples, standard error by the delta
    /// method (`se(mean)/(2·rms)`).
    pub fn rms(metric: &str, sigma: Option<f64>, squares: &[f64]) -> Self {
        let ms = Self::from_samples(metric, sigma, squares);
        let rms = ms.mean.sqrt();
        Self { mean: rms, std_error: ms.std_error / (2.0 * rms), ..ms }
    }

    /// Fraction of `true` flags with its binomial standard error.
    pub fn proportion(metric: &str, sigma: Option<f64>, hits: usize, n: usize) -> Self {
        let p = hits as f64 / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        Self { metric: metric.into(), sigma, mean: p, std_error: se, n, prediction: None, rel_err: None }
    }

    pub fn with_prediction(mut self, prediction: f64) -> Self {
        self.prediction = Some(prediction);
        self.rel_err = Some((self.mean - prediction).abs() / prediction.abs());
        self
    }

    pub fn single(metric: &str, sigma: Option<f64>, value: f64) -> Self {
        Self { metric: metric.into(), sigma, mean: value, std_error: 0.0, n: 1, prediction: None, rel_err: None }
    }
}
