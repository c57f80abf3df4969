//! Labelled feature sets, the stratified train/test split, and seeded
//! synthetic inputs for tests and demos.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::jetprep::{FourMomentum, Jet, JetLabel};

pub const DEFAULT_TRAIN_FRACTION: f64 = 0.8;

/// Rows of features with {0, 1} class labels (1 = top).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<u8>,
}

impl Dataset {
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<u8>) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::Shape {
                expected: features.len(),
                got: labels.len(),
            });
        }
        if labels.iter().any(|&l| l > 1) {
            return Err(Error::Domain("labels must be 0 or 1".into()));
        }
        Ok(Dataset { features, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            features: idx.iter().map(|&i| self.features[i].clone()).collect(),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Split {
    pub train: Dataset,
    pub test: Dataset,
}

/// Stratified, seeded split of sample indices.
///
/// The training set receives `round(fraction · n)` samples, distributed over
/// the classes by largest remainder so that class proportions match the input.
/// Both index lists are shuffled.
pub fn split_train_test(labels: &[u8], fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if labels.is_empty() {
        return Err(Error::Config("cannot split an empty dataset".into()));
    }
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::Config(format!("train fraction {fraction} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = labels.len();
    let n_train = (fraction * n as f64).round() as usize;

    let mut classes: Vec<Vec<usize>> = vec![Vec::new(), Vec::new()];
    for (i, &l) in labels.iter().enumerate() {
        classes[usize::from(l.min(1))].push(i);
    }
    for c in &mut classes {
        c.shuffle(&mut rng);
    }
    let quotas: Vec<f64> = classes
        .iter()
        .map(|c| c.len() as f64 * n_train as f64 / n as f64)
        .collect();
    let mut take: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let mut remaining = n_train - take.iter().sum::<usize>();
    let mut by_remainder: Vec<usize> = vec![0, 1];
    by_remainder.sort_by(|&a, &b| (quotas[b] - quotas[b].floor()).total_cmp(&(quotas[a] - quotas[a].floor())));
    for c in by_remainder {
        if remaining > 0 && take[c] < classes[c].len() {
            take[c] += 1;
            remaining -= 1;
        }
    }

    let mut train = Vec::with_capacity(n_train);
    let mut test = Vec::with_capacity(n - n_train);
    for (c, idx) in classes.iter().enumerate() {
        train.extend_from_slice(&idx[..take[c]]);
        test.extend_from_slice(&idx[take[c]..]);
    }
    train.shuffle(&mut rng);
    test.shuffle(&mut rng);
    if test.is_empty() {
        log::warn!("train fraction {fraction} leaves an empty test set");
    }
    Ok((train, test))
}

/// Two Gaussian blobs in `[0, π]^4` whose centres are `separation` standard
/// deviations apart along the diagonal. Labels alternate 0, 1, 0, …
pub fn separable_blobs(n: usize, separation: f64, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // centres sit on the diagonal at π/2 ± offset per axis, so their distance
    // is 4·offset; σ is chosen so that centre ± 3σ stays inside [0, π]
    let sigma = std::f64::consts::FRAC_PI_2 / (separation / 4.0 + 3.0);
    let offset = separation * sigma / 4.0;
    let mid = std::f64::consts::FRAC_PI_2;
    let mut features = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let label = (i % 2) as u8;
        let centre = if label == 1 { mid + offset } else { mid - offset };
        let row = (0..4)
            .map(|_| (centre + sigma * standard_normal(&mut rng)).clamp(0.0, std::f64::consts::PI))
            .collect();
        features.push(row);
        labels.push(label);
    }
    Dataset { features, labels }
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Toy jets: top-like jets carry three hard prongs at wide angles, QCD-like
/// jets one hard core with soft radiation. Constituents are massless.
pub fn synthetic_jets(n: usize, seed: u64) -> Vec<Jet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let label = if i % 2 == 0 { JetLabel::Top } else { JetLabel::Qcd };
            let energy = rng.gen_range(500.0..1500.0);
            let axis_eta = rng.gen_range(-1.0..1.0);
            let axis_phi = rng.gen_range(0.0..std::f64::consts::TAU);
            let prongs: Vec<(f64, f64, f64)> = match label {
                JetLabel::Top => {
                    let base = rng.gen_range(0.0..std::f64::consts::TAU);
                    (0..3)
                        .map(|k| {
                            let ang = base + k as f64 * std::f64::consts::TAU / 3.0 + rng.gen_range(-0.4..0.4);
                            let r = rng.gen_range(0.25..0.4);
                            (r * ang.cos(), r * ang.sin(), rng.gen_range(0.25..0.4))
                        })
                        .collect()
                }
                JetLabel::Qcd => vec![(rng.gen_range(-0.02..0.02), rng.gen_range(-0.02..0.02), 0.85)],
            };
            let total_frac: f64 = prongs.iter().map(|p| p.2).sum();
            let mut constituents = Vec::new();
            let spread = if label == JetLabel::Top { 0.05 } else { 0.12 };
            for &(dx, dy, frac) in &prongs {
                let e_prong = energy * frac / total_frac;
                // a hard leading particle carries half of each prong
                constituents.push(massless(e_prong / 2.0, axis_eta + dy, axis_phi + dx));
                let count = rng.gen_range(8..20);
                for _ in 0..count {
                    let share = rng.gen_range(0.2..1.0) * e_prong / count as f64;
                    let ex = dx + spread * standard_normal(&mut rng);
                    let ey = dy + spread * standard_normal(&mut rng);
                    constituents.push(massless(share, axis_eta + ey, axis_phi + ex));
                }
            }
            Jet { constituents, label }
        })
        .collect()
}

fn massless(e: f64, eta: f64, phi: f64) -> FourMomentum {
    let theta = 2.0 * (-eta).exp().atan();
    FourMomentum::new(
        e,
        e * theta.sin() * phi.cos(),
        e * theta.sin() * phi.sin(),
        e * theta.cos(),
    )
}
