//! Seam-level scoring math shared by the reference per-pair metrics and the
//! vectorized tensor builder.
//!
//! All metrics are defined on a canonical horizontal abutment: block A on
//! the left (its relevant side rotated to face right), block B on the right,
//! optionally flipped upside down, negated, and channel-shuffled. The two
//! boundary columns of each side are everything a metric needs.

/// Covariance regularizer on the 0-255 sample scale.
pub const VAR_EPSILON: f64 = 1e-6;

/// The two boundary columns of one side of a canonical abutment, top to
/// bottom: `edge` touches the seam, `inner` is one pixel further in.
#[derive(Debug, Clone)]
pub struct SeamSide {
    pub edge: Vec<f64>,
    pub inner: Vec<f64>,
}

impl SeamSide {
    pub fn len(&self) -> usize {
        self.edge.len()
    }
}

/// Sum of squared differences across the seam.
pub fn ssd(a: &SeamSide, b: &SeamSide) -> f64 {
    a.edge.iter().zip(&b.edge).map(|(&x, &y)| (x - y) * (x - y)).sum()
}

fn mean_and_var(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var)
}

/// One direction of the gradient metric: how surprising the cross-seam step
/// into `target` looks under `source`'s own boundary-gradient distribution.
fn gradient_term(source: &SeamSide, target: &SeamSide) -> f64 {
    let grads: Vec<f64> =
        source.edge.iter().zip(&source.inner).map(|(&e, &i)| e - i).collect();
    let (mu, var) = mean_and_var(&grads);
    let w = 1.0 / (var + VAR_EPSILON);
    source
        .edge
        .iter()
        .zip(&target.edge)
        .map(|(&se, &te)| {
            let d = te - se - mu;
            d * d * w
        })
        .sum::<f64>()
}

/// Symmetrized Mahalanobis gradient compatibility.
pub fn mgc(a: &SeamSide, b: &SeamSide) -> f64 {
    gradient_term(a, b) + gradient_term(b, a)
}

/// Differences along the seam direction of one column.
fn along(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| w[1] - w[0]).collect()
}

/// One direction of the boundary-parallel term: the change of `target`'s
/// edge along the seam, judged against the distribution of how `source`'s
/// own along-seam change evolves from its inner to its edge column.
fn parallel_term(source: &SeamSide, target: &SeamSide) -> f64 {
    let qe_s = along(&source.edge);
    let qi_s = along(&source.inner);
    let h: Vec<f64> = qe_s.iter().zip(&qi_s).map(|(&e, &i)| e - i).collect();
    let (mu, var) = mean_and_var(&h);
    let w = 1.0 / (var + VAR_EPSILON);
    let qe_t = along(&target.edge);
    qe_t.iter()
        .zip(&qe_s)
        .map(|(&t, &s)| {
            let d = t - s - mu;
            d * d * w
        })
        .sum::<f64>()
}

/// The gradient metric extended with the boundary-parallel change term.
pub fn emgc(a: &SeamSide, b: &SeamSide) -> f64 {
    mgc(a, b) + parallel_term(a, b) + parallel_term(b, a)
}
