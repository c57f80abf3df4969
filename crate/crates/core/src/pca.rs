//! Principal component compression of flattened jet images and the min-max
//! normalization that maps the components onto encoding angles.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

pub const DEFAULT_COMPONENTS: usize = 4;
pub const MIN_SAMPLES: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// Row-major, one principal direction per row.
    pub components: Vec<Vec<f64>>,
    /// Sample variance along each component (n − 1 denominator), descending.
    pub explained_variance: Vec<f64>,
    /// Per-feature bounds over the training split, used by [`normalize_features`].
    pub feature_min: Vec<f64>,
    pub feature_max: Vec<f64>,
    /// Input scaling applied before fitting; only centering is supported.
    pub preprocessing: String,
    pub n_train: usize,
}

impl PcaModel {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    pub fn transform(&self, row: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), row.len())?;
        Ok(self
            .components
            .iter()
            .map(|c| c.iter().zip(row).zip(&self.mean).map(|((w, x), m)| w * (x - m)).sum())
            .collect())
    }

    pub fn inverse_transform(&self, coords: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n_components(), coords.len())?;
        let mut out = self.mean.clone();
        for (c, &a) in self.components.iter().zip(coords) {
            for (o, w) in out.iter_mut().zip(c) {
                *o += a * w;
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: PcaModel = serde_json::from_str(s)?;
        if m.components.iter().any(|c| c.len() != m.mean.len())
            || m.explained_variance.len() != m.components.len()
        {
            return Err(Error::Format("PCA model dimensions disagree".into()));
        }
        Ok(m)
    }
}

/// Fits `n_components` principal directions by a thin SVD of the centered
/// data. Columns that are constant over the training set carry no variance
/// and are excluded from the decomposition; their component weights are 0.
/// Feature bounds are set from the training projections.
pub fn pca_fit(rows: &[Vec<f64>], n_components: usize) -> Result<PcaModel> {
    let n = rows.len();
    let dim = rows.first().map_or(0, |r| r.len());
    if n_components == 0 || n_components > dim {
        return Err(Error::Config(format!(
            "cannot extract {n_components} components from {dim} features"
        )));
    }
    if n < MIN_SAMPLES.max(n_components) {
        return Err(Error::Config(format!(
            "PCA needs at least {} samples, got {n}",
            MIN_SAMPLES.max(n_components)
        )));
    }
    for r in rows {
        check_len(dim, r.len())?;
    }

    let mut mean = vec![0.0; dim];
    for r in rows {
        for (m, v) in mean.iter_mut().zip(r) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }

    let active: Vec<usize> = (0..dim)
        .filter(|&j| rows.iter().any(|r| r[j] != rows[0][j]))
        .collect();
    let centered = DMatrix::from_fn(n, active.len(), |i, c| rows[i][active[c]] - mean[active[c]]);

    let mut components = vec![vec![0.0; dim]; n_components];
    let mut explained_variance = vec![0.0; n_components];
    if !active.is_empty() {
        let svd = centered.svd(false, true);
        let vt = svd.v_t.expect("requested V^T");
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
        for (k, &src) in order.iter().take(n_components).enumerate() {
            let sigma = svd.singular_values[src];
            explained_variance[k] = sigma * sigma / (n as f64 - 1.0);
            for (c, &j) in active.iter().enumerate() {
                components[k][j] = vt[(src, c)];
            }
            canonical_sign(&mut components[k]);
        }
    }

    let mut model = PcaModel {
        mean,
        components,
        explained_variance,
        feature_min: vec![],
        feature_max: vec![],
        preprocessing: "center".into(),
        n_train: n,
    };
    let projected = rows
        .iter()
        .map(|r| model.transform(r))
        .collect::<Result<Vec<_>>>()?;
    model.feature_min = (0..n_components)
        .map(|k| projected.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min))
        .collect();
    model.feature_max = (0..n_components)
        .map(|k| projected.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    Ok(model)
}

/// Flips a direction so that its largest-magnitude entry is positive.
pub fn canonical_sign(v: &mut [f64]) {
    let pivot = v
        .iter()
        .copied()
        .fold(0.0_f64, |best, x| if x.abs() > best.abs() { x } else { best });
    if pivot < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

/// Affine rescale of each feature from `[min, max]` to `[0, range]`.
/// Values outside are clamped; the number of clamped entries is returned.
pub fn normalize_features(values: &[f64], min: &[f64], max: &[f64], range: f64) -> Result<(Vec<f64>, usize)> {
    check_len(values.len(), min.len())?;
    check_len(values.len(), max.len())?;
    let mut clamped = 0;
    let out = values
        .iter()
        .zip(min.iter().zip(max))
        .map(|(&v, (&lo, &hi))| {
            let t = if hi > lo { (v - lo) / (hi - lo) * range } else { 0.0 };
            if t < 0.0 || t > range {
                clamped += 1;
            }
            t.clamp(0.0, range)
        })
        .collect();
    Ok((out, clamped))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn affine_subspace_reconstructs_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let dim = 30;
        let basis: Vec<Vec<f64>> = (0..4)
            .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let offset: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|_| {
                let a: Vec<f64> = (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect();
                (0..dim)
                    .map(|j| offset[j] + (0..4).map(|k| a[k] * basis[k][j]).sum::<f64>())
                    .collect()
            })
            .collect();
        let m = pca_fit(&rows, 4).unwrap();
        for r in &rows {
            let back = m.inverse_transform(&m.transform(r).unwrap()).unwrap();
            for (a, b) in back.iter().zip(r) {
                assert!((a - b).abs() < 1e-9);
            }
        }
        assert!(m.explained_variance.windows(2).all(|w| w[0] >= w[1]));
        let mean_proj = m.transform(&m.mean).unwrap();
        assert!(mean_proj.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn fit_errors() {
        let rows = vec![vec![0.0, 1.0]; 4];
        assert!(matches!(pca_fit(&rows, 1), Err(Error::Config(_))));
        let rows = vec![vec![0.0, 1.0]; 6];
        assert!(matches!(pca_fit(&rows, 3), Err(Error::Config(_))));
    }

    #[test]
    fn normalization_bounds() {
        let (v, c) = normalize_features(&[1.0, 5.0], &[1.0, 1.0], &[3.0, 5.0], std::f64::consts::PI).unwrap();
        assert_eq!(v, vec![0.0, std::f64::consts::PI]);
        assert_eq!(c, 0);
        let (v, c) = normalize_features(&[-1.0, 9.0], &[0.0, 0.0], &[1.0, 1.0], 1.0).unwrap();
        assert_eq!(v, vec![0.0, 1.0]);
        assert_eq!(c, 2);
    }
}
