//! Numerical kernels shared by the discovery algorithms: least squares,
//! residualization on the past, the partial-correlation conditional
//! independence test, a pairwise independence measure for the noise-based
//! ordering and a first-principal-component reduction.
//!
//! Everything here is a pure function over immutable inputs; running many
//! tests in parallel over one shared [`Dataset`] is safe.

use crate::graph::{LaggedNode, VarId};
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use std::collections::BTreeSet;

/// A complete multivariate series, column per variable. No missing values.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    names: Vec<String>,
    cols: Vec<Vec<f64>>,
    rows: usize,
}

impl Dataset {
    pub fn new<S: Into<String>>(names: Vec<S>, cols: Vec<Vec<f64>>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.len() != cols.len() {
            return Err(Error::InvalidParameter(
                "name count does not match column count".into(),
            ));
        }
        if names.is_empty() {
            return Err(Error::EmptyInput("dataset without variables"));
        }
        let mut seen = BTreeSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(Error::DuplicateVariable(n.clone()));
            }
        }
        let rows = cols[0].len();
        if cols.iter().any(|c| c.len() != rows) {
            return Err(Error::InvalidParameter("ragged columns".into()));
        }
        Ok(Self { names, cols, rows })
    }

    pub fn var_count(&self) -> usize {
        self.names.len()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.names[v.0]
    }

    pub fn var_id(&self, name: &str) -> Result<VarId> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(VarId)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn col(&self, v: VarId) -> &[f64] {
        &self.cols[v.0]
    }

    /// Column of `node.var` shifted back by `node.lag`, aligned to rows
    /// `gamma..rows`. Requires `node.lag <= gamma`.
    pub fn lagged_col(&self, node: LaggedNode, gamma: usize) -> Result<Vec<f64>> {
        if node.lag > gamma {
            return Err(Error::LagOutOfRange {
                lag: node.lag,
                gamma,
            });
        }
        if self.rows <= gamma {
            return Err(Error::InsufficientSamples {
                have: self.rows,
                need: gamma,
            });
        }
        let c = self.col(node.var);
        Ok(c[gamma - node.lag..self.rows - node.lag].to_vec())
    }

    /// Per-column standardization to zero mean, unit variance. Fails on a
    /// constant column, naming the offending variable.
    pub fn standardized(&self) -> Result<Self> {
        let mut cols = Vec::with_capacity(self.cols.len());
        for (name, c) in self.names.iter().zip(&self.cols) {
            let m = mean(c);
            let sd = variance(c, m).sqrt();
            if !sd.is_finite() || sd <= 1e-12 {
                return Err(Error::DegenerateSeries(name.clone()));
            }
            cols.push(c.iter().map(|&x| (x - m) / sd).collect());
        }
        Ok(Self {
            names: self.names.clone(),
            cols,
            rows: self.rows,
        })
    }

    /// Parses the CSV wire format: a header with variable names, one row
    /// per timestamp, no index column.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::EmptyInput("empty csv"))?;
        let names: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
        if names.iter().any(|n| n.is_empty()) {
            return Err(Error::Csv {
                line: 1,
                col: 1,
                msg: "empty variable name in header".into(),
            });
        }
        let mut cols: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
        for (i, row) in lines {
            if row.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = row.split(',').collect();
            if fields.len() != names.len() {
                return Err(Error::Csv {
                    line: i + 1,
                    col: fields.len(),
                    msg: format!("expected {} fields, found {}", names.len(), fields.len()),
                });
            }
            for (c, field) in fields.iter().enumerate() {
                let value: f64 = field.trim().parse().map_err(|_| Error::Csv {
                    line: i + 1,
                    col: c + 1,
                    msg: format!("not a number: `{}`", field.trim()),
                })?;
                cols[c].push(value);
            }
        }
        Self::new(names, cols)
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.names.join(",");
        out.push('\n');
        for r in 0..self.rows {
            for (c, col) in self.cols.iter().enumerate() {
                if c > 0 {
                    out.push(',');
                }
                out.push_str(&format!("{}", col[r]));
            }
            out.push('\n');
        }
        out
    }

    pub fn read_csv(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_csv(&text)
    }

    pub fn write_csv(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

/// Conditional-independence test outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestResult {
    /// Fisher z statistic (or the oracle's 0/1 surrogate).
    pub statistic: f64,
    /// Two-sided p-value; NaN when the caller skipped the tail.
    pub p_value: f64,
}

/// Least-squares fit: coefficients plus the residual vector.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionFit {
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
}

pub(crate) fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub(crate) fn variance(v: &[f64], m: f64) -> f64 {
    v.iter().map(|&x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (mean(a), mean(b));
    let mut num = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        num += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    let den = (va * vb).sqrt();
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Minimum-norm least squares of `y` on the columns of `x` (pseudo-inverse
/// semantics when the design is rank deficient).
pub fn ols_fit(y: &[f64], x: &[&[f64]]) -> Result<RegressionFit> {
    let n = y.len();
    if n == 0 {
        return Err(Error::EmptyInput("ols target"));
    }
    if x.iter().any(|c| c.len() != n) {
        return Err(Error::InvalidParameter(
            "design column length does not match target".into(),
        ));
    }
    let k = x.len();
    if k == 0 {
        return Ok(RegressionFit {
            coefficients: Vec::new(),
            residuals: y.to_vec(),
        });
    }

    let design = DMatrix::from_fn(n, k, |r, c| x[c][r]);
    let target = DVector::from_column_slice(y);
    let xtx = design.tr_mul(&design);
    let xty = design.tr_mul(&target);

    // Full-rank fast path through the normal equations; singular designs
    // fall back to an SVD pseudo-inverse for the minimum-norm solution.
    let coeffs = match nalgebra::Cholesky::new(xtx) {
        Some(chol) => chol.solve(&xty),
        None => design
            .clone()
            .svd(true, true)
            .solve(&target, 1e-10)
            .map_err(|e| Error::InvalidParameter(e.to_string()))?,
    };
    let residuals = (&target - design * &coeffs).iter().copied().collect();
    Ok(RegressionFit {
        coefficients: coeffs.iter().copied().collect(),
        residuals,
    })
}

/// Residual of the present slice of `target` after regressing it (with an
/// intercept) on strictly lagged regressors, over rows `gamma..T`.
pub fn residualize_on_past(
    data: &Dataset,
    target: VarId,
    past: &BTreeSet<LaggedNode>,
    gamma: usize,
) -> Result<Vec<f64>> {
    if past.iter().any(|p| p.lag == 0) {
        return Err(Error::PresentInPast);
    }
    let y = data.lagged_col(LaggedNode::new(target, 0), gamma)?;
    let mut cols: Vec<Vec<f64>> = vec![vec![1.0; y.len()]];
    for &p in past {
        cols.push(data.lagged_col(p, gamma)?);
    }
    let refs: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
    Ok(ols_fit(&y, &refs)?.residuals)
}

/// Partial correlation of `x` and `y` given the columns `z`, with the
/// Fisher z statistic and (optionally) its two-sided normal p-value.
pub fn ci_test_partial_corr(
    x: &[f64],
    y: &[f64],
    z: &[&[f64]],
    compute_p: bool,
) -> Result<TestResult> {
    let n = x.len();
    if y.len() != n || z.iter().any(|c| c.len() != n) {
        return Err(Error::InvalidParameter("column lengths differ".into()));
    }
    if n <= z.len() + 3 {
        return Err(Error::InsufficientSamples {
            have: n,
            need: z.len() + 3,
        });
    }

    // Residual correlation given [1, Z]; the intercept keeps the test
    // exact on uncentered inputs.
    let ones = vec![1.0; n];
    let mut design: Vec<&[f64]> = Vec::with_capacity(z.len() + 1);
    design.push(&ones);
    design.extend_from_slice(z);
    let rx = ols_fit(x, &design)?.residuals;
    let ry = ols_fit(y, &design)?.residuals;

    let rho = pearson(&rx, &ry).clamp(-(1.0 - 1e-12), 1.0 - 1e-12);
    let statistic = 0.5 * ((1.0 + rho) / (1.0 - rho)).ln() * ((n - z.len() - 3) as f64).sqrt();
    let p_value = if compute_p {
        libm::erfc(statistic.abs() / std::f64::consts::SQRT_2)
    } else {
        f64::NAN
    };
    Ok(TestResult { statistic, p_value })
}

/// Numerically safe log cosh.
fn log_cosh(u: f64) -> f64 {
    u.abs() + (-2.0 * u.abs()).exp().ln_1p() - std::f64::consts::LN_2
}

fn gauss_weighted(u: f64) -> f64 {
    u * (-0.5 * u * u).exp()
}

fn standardize_vec(v: &[f64]) -> Result<Vec<f64>> {
    let m = mean(v);
    let sd = variance(v, m).sqrt();
    if !sd.is_finite() || sd <= 1e-12 {
        return Err(Error::DegenerateSeries("independence input".into()));
    }
    Ok(v.iter().map(|&x| (x - m) / sd).collect())
}

/// Scalar pairwise dependence of two series: zero (in the estimator's
/// limit) when they are independent, growing with dependence.
///
/// The estimator standardizes both inputs and sums the squared Pearson
/// correlations between the identity and the two maximum-entropy contrast
/// transforms (log cosh and the Gaussian-weighted odd moment) of each
/// side. This is kernel-free, O(n), symmetric in its arguments and
/// invariant to affine rescaling.
pub fn independence_measure(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidParameter("column lengths differ".into()));
    }
    if a.len() < 20 {
        return Err(Error::InsufficientSamples {
            have: a.len(),
            need: 19,
        });
    }
    let sa = standardize_vec(a)?;
    let sb = standardize_vec(b)?;

    let g1a: Vec<f64> = sa.iter().map(|&u| log_cosh(u)).collect();
    let g2a: Vec<f64> = sa.iter().map(|&u| gauss_weighted(u)).collect();
    let g1b: Vec<f64> = sb.iter().map(|&u| log_cosh(u)).collect();
    let g2b: Vec<f64> = sb.iter().map(|&u| gauss_weighted(u)).collect();

    let mut total = pearson(&sa, &sb).powi(2);
    for fa in [&g1a, &g2a] {
        for fb in [&g1b, &g2b] {
            total += pearson(fa, fb).powi(2);
        }
    }
    total += pearson(&g1a, &sb).powi(2) + pearson(&sa, &g1b).powi(2);
    total += pearson(&g2a, &sb).powi(2) + pearson(&sa, &g2b).powi(2);
    Ok(total)
}

/// Projection of a T×k block onto its first principal axis, after
/// standardizing the columns (zero-variance columns are dropped). The
/// output has unit variance and its sign is fixed so the loading of the
/// first surviving column is nonnegative.
pub fn pca_first_component(block: &[&[f64]]) -> Result<Vec<f64>> {
    if block.is_empty() {
        return Err(Error::EmptyInput("pca block"));
    }
    let rows = block[0].len();
    if block.iter().any(|c| c.len() != rows) {
        return Err(Error::InvalidParameter("column lengths differ".into()));
    }
    let std_cols: Vec<Vec<f64>> = block
        .iter()
        .filter_map(|c| standardize_vec(c).ok())
        .collect();
    if std_cols.is_empty() {
        return Err(Error::DegenerateSeries("pca block".into()));
    }
    let k = std_cols.len();
    if rows <= k {
        return Err(Error::InsufficientSamples {
            have: rows,
            need: k,
        });
    }

    let corr = DMatrix::from_fn(k, k, |i, j| {
        std_cols[i]
            .iter()
            .zip(&std_cols[j])
            .map(|(&x, &y)| x * y)
            .sum::<f64>()
            / rows as f64
    });
    let eig = nalgebra::SymmetricEigen::new(corr);
    let (top, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty spectrum");
    let lambda = eig.eigenvalues[top].max(1e-12);
    let mut axis: Vec<f64> = eig.eigenvectors.column(top).iter().copied().collect();
    if axis[0] < 0.0 {
        for a in &mut axis {
            *a = -*a;
        }
    }

    let scale = lambda.sqrt();
    let out = (0..rows)
        .map(|r| {
            std_cols
                .iter()
                .zip(&axis)
                .map(|(c, &w)| c[r] * w)
                .sum::<f64>()
                / scale
        })
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn noise(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    /// Hand-rolled Gauss-Jordan solve of the normal equations, independent
    /// of the nalgebra path used by the implementation.
    #[allow(clippy::needless_range_loop)]
    fn normal_equations_oracle(y: &[f64], x: &[&[f64]]) -> Vec<f64> {
        let k = x.len();
        let mut a = vec![vec![0.0; k + 1]; k];
        for i in 0..k {
            for j in 0..k {
                a[i][j] = x[i].iter().zip(x[j]).map(|(&p, &q)| p * q).sum();
            }
            a[i][k] = x[i].iter().zip(y).map(|(&p, &q)| p * q).sum();
        }
        for col in 0..k {
            let pivot = (col..k)
                .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
                .unwrap();
            a.swap(col, pivot);
            let p = a[col][col];
            for j in col..=k {
                a[col][j] /= p;
            }
            for r in 0..k {
                if r != col {
                    let f = a[r][col];
                    for j in col..=k {
                        a[r][j] -= f * a[col][j];
                    }
                }
            }
        }
        (0..k).map(|i| a[i][k]).collect()
    }

    #[test]
    fn exact_linear_system_is_recovered() {
        let x0: Vec<f64> = (0..50).map(|i| i as f64 / 7.0).collect();
        let x1: Vec<f64> = (0..50).map(|i| ((i * i) % 11) as f64).collect();
        let y: Vec<f64> = x0.iter().zip(&x1).map(|(&a, &b)| 2.0 * a - b).collect();
        let fit = ols_fit(&y, &[&x0, &x1]).unwrap();
        assert!((fit.coefficients[0] - 2.0).abs() < 1e-10);
        assert!((fit.coefficients[1] + 1.0).abs() < 1e-10);
        assert!(fit.residuals.iter().all(|r| r.abs() < 1e-9));
    }

    #[test]
    fn zero_design_gives_zero_coefficients_and_full_residual() {
        let y = vec![1.0, 2.0, 3.0];
        let z = vec![0.0; 3];
        let fit = ols_fit(&y, &[&z, &z]).unwrap();
        assert!(fit.coefficients.iter().all(|&c| c.abs() < 1e-12));
        assert_eq!(fit.residuals, y);
        assert!(matches!(ols_fit(&[], &[]), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn matches_normal_equations_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 200;
        let cols: Vec<Vec<f64>> = (0..3).map(|_| noise(&mut rng, n)).collect();
        let y = noise(&mut rng, n);
        let refs: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
        let fit = ols_fit(&y, &refs).unwrap();
        let oracle = normal_equations_oracle(&y, &refs);
        for (a, b) in fit.coefficients.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn residuals_are_orthogonal_to_the_design() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 300;
        let cols: Vec<Vec<f64>> = (0..4).map(|_| noise(&mut rng, n)).collect();
        let y = noise(&mut rng, n);
        let refs: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
        let fit = ols_fit(&y, &refs).unwrap();
        let ynorm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        for c in &refs {
            let dot: f64 = c.iter().zip(&fit.residuals).map(|(&a, &b)| a * b).sum();
            assert!(dot.abs() < 1e-6 * ynorm);
        }
    }

    #[test]
    fn residualize_with_empty_past_centers_the_target() {
        let data = Dataset::new(vec!["A"], vec![vec![1.0, 2.0, 3.0, 4.0]]).unwrap();
        let r = residualize_on_past(&data, VarId(0), &BTreeSet::new(), 1).unwrap();
        let m = mean(&r);
        assert!(m.abs() < 1e-12);
        assert_eq!(r.len(), 3);
    }

    #[test]
    fn residualize_rejects_present_slice_regressors() {
        let data = Dataset::new(vec!["A"], vec![vec![1.0, 2.0, 3.0]]).unwrap();
        let past: BTreeSet<_> = [LaggedNode::new(VarId(0), 0)].into_iter().collect();
        assert!(matches!(
            residualize_on_past(&data, VarId(0), &past, 1),
            Err(Error::PresentInPast)
        ));
    }

    #[test]
    fn ar_residual_variance_tracks_the_injected_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let t = 1000;
        let mut y = vec![0.0; t];
        let mut eps = vec![0.0; t];
        for i in 1..t {
            eps[i] = rng.gen_range(-1.0..1.0);
            y[i] = 0.9 * y[i - 1] + eps[i];
        }
        let data = Dataset::new(vec!["Y"], vec![y]).unwrap();
        let past: BTreeSet<_> = [LaggedNode::new(VarId(0), 1)].into_iter().collect();
        let r = residualize_on_past(&data, VarId(0), &past, 1).unwrap();
        let var_r = variance(&r, mean(&r));
        let var_e = variance(&eps[1..], mean(&eps[1..]));
        assert!(
            (var_r - var_e).abs() / var_e < 0.15,
            "residual variance {var_r} vs injected {var_e}"
        );
    }

    #[test]
    fn two_parent_residuals_are_uncorrelated_with_the_regressors() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let t = 1000;
        let (mut a, mut b, mut y) = (vec![0.0; t], vec![0.0; t], vec![0.0; t]);
        for i in 1..t {
            a[i] = 0.5 * a[i - 1] + rng.gen_range(-1.0..1.0);
            b[i] = 0.4 * b[i - 1] + rng.gen_range(-1.0..1.0);
            y[i] = 0.6 * a[i - 1] - 0.7 * b[i - 1] + rng.gen_range(-1.0..1.0);
        }
        let data = Dataset::new(vec!["A", "B", "Y"], vec![a, b, y]).unwrap();
        let past: BTreeSet<_> = [LaggedNode::new(VarId(0), 1), LaggedNode::new(VarId(1), 1)]
            .into_iter()
            .collect();
        let r = residualize_on_past(&data, VarId(2), &past, 1).unwrap();
        for p in &past {
            let col = data.lagged_col(*p, 1).unwrap();
            assert!(pearson(&r, &col).abs() < 0.05);
        }
    }

    #[test]
    fn identical_columns_give_clamped_correlation_and_tiny_p() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = noise(&mut rng, 100);
        let r = ci_test_partial_corr(&x, &x, &[], true).unwrap();
        assert!(r.statistic > 10.0);
        assert!(r.p_value < 1e-12);
    }

    #[test]
    fn test_is_symmetric_in_x_and_y() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = noise(&mut rng, 200);
        let y = noise(&mut rng, 200);
        let z = noise(&mut rng, 200);
        let a = ci_test_partial_corr(&x, &y, &[&z], true).unwrap();
        let b = ci_test_partial_corr(&y, &x, &[&z], true).unwrap();
        assert_eq!(a.statistic, b.statistic);
        assert_eq!(a.p_value, b.p_value);
    }

    #[test]
    fn p_value_shrinks_as_dependence_grows() {
        // Fisher z p is monotone decreasing in |rho| at fixed n and |Z|.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 400;
        let base = noise(&mut rng, n);
        let mut last_p = 1.1;
        for strength in [0.05, 0.2, 0.5, 0.9] {
            let y: Vec<f64> = base
                .iter()
                .map(|&v| strength * v + (1.0 - strength) * rng.gen_range(-1.0..1.0))
                .collect();
            let r = ci_test_partial_corr(&base, &y, &[], true).unwrap();
            assert!(r.p_value < last_p);
            last_p = r.p_value;
        }
    }

    #[test]
    fn chain_dependence_vanishes_given_the_middle_variable() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 1000;
        let x = noise(&mut rng, n);
        let z: Vec<f64> = x
            .iter()
            .map(|&v| 0.9 * v + 0.3 * rng.gen_range(-1.0..1.0))
            .collect();
        let y: Vec<f64> = z
            .iter()
            .map(|&v| 0.9 * v + 0.3 * rng.gen_range(-1.0..1.0))
            .collect();
        assert!(ci_test_partial_corr(&x, &y, &[], true).unwrap().p_value < 0.05);
        assert!(ci_test_partial_corr(&x, &y, &[&z], true).unwrap().p_value > 0.05);
    }

    #[test]
    fn insufficient_samples_are_rejected() {
        let x = vec![1.0, 2.0, 3.0, 4.0];
        let z = vec![0.5, 0.1, 0.9, 0.2];
        assert!(matches!(
            ci_test_partial_corr(&x, &x, &[&z], true),
            Err(Error::InsufficientSamples { .. })
        ));
    }

    #[test]
    fn monte_carlo_size_is_near_alpha() {
        // Reduced-count version of the acceptance check.
        let mut rejections = 0;
        for seed in 0..60 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            let x: Vec<f64> = (0..1000).map(|_| rng.gen_range(-1.0f64..1.0)).collect();
            let y: Vec<f64> = (0..1000).map(|_| rng.gen_range(-1.0f64..1.0)).collect();
            if ci_test_partial_corr(&x, &y, &[], true).unwrap().p_value < 0.05 {
                rejections += 1;
            }
        }
        let rate = rejections as f64 / 60.0;
        assert!((0.0..=0.12).contains(&rate), "rejection rate {rate}");
    }

    #[test]
    fn independent_series_measure_is_small_and_dependent_large() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = noise(&mut rng, 1000);
        let b = noise(&mut rng, 1000);
        let small = independence_measure(&a, &b).unwrap();
        assert!(small < 0.02, "independent measure {small}");
        let large = independence_measure(&a, &a).unwrap();
        assert!(large >= 10.0 * small.max(1e-9));
        assert!(large > 1.0);
    }

    #[test]
    fn measure_is_symmetric_and_scale_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = noise(&mut rng, 500);
        let b: Vec<f64> = a
            .iter()
            .map(|&v| v * v + 0.2 * rng.gen_range(-1.0..1.0))
            .collect();
        let ab = independence_measure(&a, &b).unwrap();
        let ba = independence_measure(&b, &a).unwrap();
        assert!((ab - ba).abs() < 1e-12);
        let scaled: Vec<f64> = b.iter().map(|&v| -3.5 * v + 11.0).collect();
        let ab2 = independence_measure(&a, &scaled).unwrap();
        assert!((ab - ab2).abs() < 1e-9);
    }

    #[test]
    fn constant_input_is_degenerate() {
        let a = vec![1.0; 100];
        let b = vec![0.5; 100];
        assert!(matches!(
            independence_measure(&a, &b),
            Err(Error::DegenerateSeries(_))
        ));
    }

    #[test]
    fn single_column_pca_is_the_standardized_column() {
        let col: Vec<f64> = (0..40).map(|i| 3.0 * i as f64 - 7.0).collect();
        let out = pca_first_component(&[&col]).unwrap();
        let std = standardize_vec(&col).unwrap();
        for (a, b) in out.iter().zip(&std) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn identical_columns_project_onto_their_common_direction() {
        let col: Vec<f64> = (0..40).map(|i| (i as f64).sin()).collect();
        let out = pca_first_component(&[&col, &col]).unwrap();
        assert!(pearson(&out, &col) > 1.0 - 1e-10);
        let var = variance(&out, mean(&out));
        assert!((var - 1.0).abs() < 1e-8);
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn random_block_matches_jacobi_eigen_oracle() {
        // Small hand-rolled Jacobi sweep as an independent eigensolver.
        fn jacobi_top_eigen(mut a: Vec<Vec<f64>>) -> (f64, Vec<f64>) {
            let k = a.len();
            let mut v = vec![vec![0.0; k]; k];
            for (i, row) in v.iter_mut().enumerate() {
                row[i] = 1.0;
            }
            for _ in 0..100 {
                let (mut p, mut q, mut biggest) = (0, 1, 0.0);
                for i in 0..k {
                    for j in i + 1..k {
                        if a[i][j].abs() > biggest {
                            biggest = a[i][j].abs();
                            p = i;
                            q = j;
                        }
                    }
                }
                if biggest < 1e-14 {
                    break;
                }
                let theta = 0.5 * (2.0 * a[p][q]).atan2(a[p][p] - a[q][q]);
                let (c, s) = (theta.cos(), theta.sin());
                for i in 0..k {
                    let (aip, aiq) = (a[i][p], a[i][q]);
                    a[i][p] = c * aip + s * aiq;
                    a[i][q] = -s * aip + c * aiq;
                }
                for j in 0..k {
                    let (apj, aqj) = (a[p][j], a[q][j]);
                    a[p][j] = c * apj + s * aqj;
                    a[q][j] = -s * apj + c * aqj;
                }
                for row in v.iter_mut() {
                    let (vip, viq) = (row[p], row[q]);
                    row[p] = c * vip + s * viq;
                    row[q] = -s * vip + c * viq;
                }
            }
            let top = (0..k).max_by(|&i, &j| a[i][i].total_cmp(&a[j][j])).unwrap();
            (a[top][top], (0..k).map(|i| v[i][top]).collect())
        }

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let rows = 500;
        let base = noise(&mut rng, rows);
        let cols: Vec<Vec<f64>> = (0..4)
            .map(|i| {
                base.iter()
                    .map(|&v| v * (0.5 + 0.2 * i as f64) + 0.7 * rng.gen_range(-1.0..1.0))
                    .collect()
            })
            .collect();
        let refs: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
        let out = pca_first_component(&refs).unwrap();

        let std_cols: Vec<Vec<f64>> = cols.iter().map(|c| standardize_vec(c).unwrap()).collect();
        let k = std_cols.len();
        let mut corr = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in 0..k {
                corr[i][j] = std_cols[i]
                    .iter()
                    .zip(&std_cols[j])
                    .map(|(&x, &y)| x * y)
                    .sum::<f64>()
                    / rows as f64;
            }
        }
        let (lambda, mut axis) = jacobi_top_eigen(corr);
        if axis[0] < 0.0 {
            for a in &mut axis {
                *a = -*a;
            }
        }
        let oracle: Vec<f64> = (0..rows)
            .map(|r| {
                std_cols
                    .iter()
                    .zip(&axis)
                    .map(|(c, &w)| c[r] * w)
                    .sum::<f64>()
                    / lambda.sqrt()
            })
            .collect();
        let agreement = pearson(&out, &oracle);
        assert!(agreement > 1.0 - 1e-8, "agreement {agreement}");
        let var = variance(&out, mean(&out));
        assert!((var - 1.0).abs() < 1e-8);
    }

    #[test]
    fn all_constant_block_errors() {
        let c = vec![2.0; 30];
        assert!(matches!(
            pca_first_component(&[&c, &c]),
            Err(Error::DegenerateSeries(_))
        ));
    }

    #[test]
    fn csv_round_trip_and_error_locations() {
        let data = Dataset::new(
            vec!["a", "b"],
            vec![vec![1.5, -2.0, 0.25], vec![0.0, 7.0, -1.125]],
        )
        .unwrap();
        let text = data.to_csv();
        let back = Dataset::from_csv(&text).unwrap();
        assert_eq!(back, data);

        let bad = "a,b\n1.0,2.0\n3.0,oops\n";
        match Dataset::from_csv(bad) {
            Err(Error::Csv { line, col, .. }) => {
                assert_eq!((line, col), (3, 2));
            }
            other => panic!("expected csv error, got {other:?}"),
        }
        let ragged = "a,b\n1.0\n";
        assert!(matches!(
            Dataset::from_csv(ragged),
            Err(Error::Csv { line: 2, .. })
        ));
    }

    #[test]
    fn standardization_flags_constant_columns_by_name() {
        let data =
            Dataset::new(vec!["ok", "flat"], vec![vec![1.0, 2.0, 3.0], vec![4.0; 3]]).unwrap();
        match data.standardized() {
            Err(Error::DegenerateSeries(name)) => assert_eq!(name, "flat"),
            other => panic!("expected degenerate error, got {other:?}"),
        }
    }
}
