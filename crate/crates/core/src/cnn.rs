//! Small classical CNN on the 2×2 PCA image, sized to match the QCNN
//! parameter counts.
//!
//! Layers: `F` 2×2 filters (valid, stride 1) → ReLU → max-pool over the
//! single 1×1 cell → flatten → dense `F→D` with ReLU → dense `D→1` with
//! sigmoid (cross-entropy) or tanh (hinge, MSE). With `F = 4` the totals are
//! 33 for `D = 2` and 51 for `D = 5`.
//!
//! Flat parameter layout:
//!
//! ```text
//! conv_w  F×4   filter-major, kernel row-major
//! conv_b  F
//! dense_w F×D   row-major, entry [f·D + d]
//! dense_b D
//! out_w   D
//! out_b   1
//! ```

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::learn::{LossKind, Model};

const KERNEL: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputActivation {
    Sigmoid,
    Tanh,
}

impl OutputActivation {
    pub fn for_loss(loss: LossKind) -> Self {
        match loss {
            LossKind::CrossEntropy => OutputActivation::Sigmoid,
            _ => OutputActivation::Tanh,
        }
    }

    fn apply(self, z: f64) -> (f64, f64) {
        match self {
            OutputActivation::Sigmoid => {
                let s = 1.0 / (1.0 + (-z).exp());
                (s, s * (1.0 - s))
            }
            OutputActivation::Tanh => {
                let t = z.tanh();
                (t, 1.0 - t * t)
            }
        }
    }
}

/// `4F + F + F·D + D + D + 1`.
pub fn parameter_count(filters: usize, dense: usize) -> usize {
    KERNEL * filters + filters + filters * dense + dense + dense + 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnnArch {
    pub filters: usize,
    pub dense: usize,
}

impl CnnArch {
    /// Matches the 30-parameter SO(4) QCNN.
    pub const SMALL: CnnArch = CnnArch { filters: 4, dense: 2 };
    /// Matches the 48-parameter SU(4) QCNN.
    pub const LARGE: CnnArch = CnnArch { filters: 4, dense: 5 };

    pub fn new(filters: usize, dense: usize) -> Result<Self> {
        if filters == 0 || dense == 0 {
            return Err(Error::Config(format!("CNN widths must be >= 1, got F={filters} D={dense}")));
        }
        Ok(CnnArch { filters, dense })
    }

    pub fn param_count(&self) -> usize {
        parameter_count(self.filters, self.dense)
    }

    fn offsets(&self) -> [usize; 6] {
        let (f, d) = (self.filters, self.dense);
        let conv_b = KERNEL * f;
        let dense_w = conv_b + f;
        let dense_b = dense_w + f * d;
        let out_w = dense_b + d;
        let out_b = out_w + d;
        [0, conv_b, dense_w, dense_b, out_w, out_b]
    }
}

/// Accepts `small`, `large`, a parameter total (`33`, `51`) or `FxD`.
impl std::str::FromStr for CnnArch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "small" | "33" => return Ok(CnnArch::SMALL),
            "large" | "51" => return Ok(CnnArch::LARGE),
            _ => {}
        }
        let bad = || Error::Config(format!("unknown CNN architecture '{s}' (allowed: small, large, 33, 51, FxD)"));
        let (f, d) = t.split_once('x').ok_or_else(bad)?;
        CnnArch::new(f.parse().map_err(|_| bad())?, d.parse().map_err(|_| bad())?)
    }
}

/// Intermediate values of one forward pass.
#[derive(Debug, Clone)]
struct Trace {
    conv_pre: Vec<f64>,
    pooled: Vec<f64>,
    hidden_pre: Vec<f64>,
    hidden: Vec<f64>,
    out: f64,
    out_slope: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CnnModel {
    pub arch: CnnArch,
    pub output: OutputActivation,
    pub loss: LossKind,
}

impl CnnModel {
    pub fn new(arch: CnnArch, loss: LossKind) -> Self {
        CnnModel {
            arch,
            output: OutputActivation::for_loss(loss),
            loss,
        }
    }

    fn trace(&self, params: &[f64], image: &[f64]) -> Result<Trace> {
        check_len(self.arch.param_count(), params.len())?;
        if image.len() != KERNEL {
            return Err(Error::Config(format!("CNN expects a 2x2 image, got {} values", image.len())));
        }
        let (f, d) = (self.arch.filters, self.arch.dense);
        let [cw, cb, dw, db, ow, ob] = self.arch.offsets();

        // a 2×2 kernel over a 2×2 input with valid padding yields one cell
        let conv_pre: Vec<f64> = (0..f)
            .map(|k| {
                params[cw + k * KERNEL..cw + (k + 1) * KERNEL]
                    .iter()
                    .zip(image)
                    .map(|(w, x)| w * x)
                    .sum::<f64>()
                    + params[cb + k]
            })
            .collect();
        // ReLU, then max-pool over the 1×1 map (identity), then flatten
        let pooled: Vec<f64> = conv_pre.iter().map(|&z| relu(z)).collect();
        let hidden_pre: Vec<f64> = (0..d)
            .map(|j| (0..f).map(|k| params[dw + k * d + j] * pooled[k]).sum::<f64>() + params[db + j])
            .collect();
        let hidden: Vec<f64> = hidden_pre.iter().map(|&z| relu(z)).collect();
        let z = hidden.iter().zip(&params[ow..ow + d]).map(|(h, w)| h * w).sum::<f64>() + params[ob];
        let (out, out_slope) = self.output.apply(z);
        Ok(Trace {
            conv_pre,
            pooled,
            hidden_pre,
            hidden,
            out,
            out_slope,
        })
    }

    pub fn forward(&self, params: &[f64], image: &[f64]) -> Result<f64> {
        Ok(self.trace(params, image)?.out)
    }

    /// Reverse-mode gradient of the prediction with respect to every parameter.
    /// The ReLU subgradient at 0 is 0.
    pub fn prediction_gradient(&self, params: &[f64], image: &[f64]) -> Result<(f64, Vec<f64>)> {
        let t = self.trace(params, image)?;
        let (f, d) = (self.arch.filters, self.arch.dense);
        let [cw, cb, dw, db, ow, ob] = self.arch.offsets();
        let mut g = vec![0.0; params.len()];

        let dz = t.out_slope;
        g[ob] = dz;
        let mut d_hidden_pre = vec![0.0; d];
        for j in 0..d {
            g[ow + j] = dz * t.hidden[j];
            d_hidden_pre[j] = if t.hidden_pre[j] > 0.0 { dz * params[ow + j] } else { 0.0 };
        }
        let mut d_conv_pre = vec![0.0; f];
        for k in 0..f {
            let mut d_pooled = 0.0;
            for j in 0..d {
                g[dw + k * d + j] = d_hidden_pre[j] * t.pooled[k];
                d_pooled += d_hidden_pre[j] * params[dw + k * d + j];
            }
            d_conv_pre[k] = if t.conv_pre[k] > 0.0 { d_pooled } else { 0.0 };
        }
        g[db..db + d].copy_from_slice(&d_hidden_pre);
        for k in 0..f {
            g[cb + k] = d_conv_pre[k];
            for (i, x) in image.iter().enumerate() {
                g[cw + k * KERNEL + i] = d_conv_pre[k] * x;
            }
        }
        Ok((t.out, g))
    }

    /// Loss gradient for a single sample, `∂L/∂params`.
    pub fn backward(&self, params: &[f64], image: &[f64], label: u8) -> Result<Vec<f64>> {
        let (pred, g) = self.prediction_gradient(params, image)?;
        let y = self.loss.target(label);
        let dl = crate::learn::loss_gradient(self.loss, &[y], &[pred])?[0];
        Ok(g.into_iter().map(|v| v * dl).collect())
    }
}

fn relu(z: f64) -> f64 {
    if z > 0.0 {
        z
    } else {
        0.0
    }
}

impl Model for CnnModel {
    fn num_params(&self) -> usize {
        self.arch.param_count()
    }

    fn input_width(&self) -> usize {
        KERNEL
    }

    fn loss_kind(&self) -> LossKind {
        self.loss
    }

    /// Weights uniform in `[−0.5, 0.5]`, biases zero.
    fn init_params(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let [_, cb, dw, db, ow, ob] = self.arch.offsets();
        let mut p = vec![0.0; self.num_params()];
        for (i, v) in p.iter_mut().enumerate() {
            let is_bias = (cb..dw).contains(&i) || (db..ow).contains(&i) || i == ob;
            if !is_bias {
                *v = rng.gen_range(-0.5..=0.5);
            }
        }
        p
    }

    fn predict(&self, params: &[f64], x: &[f64]) -> Result<f64> {
        self.forward(params, x)
    }

    fn predict_with_grad(&self, params: &[f64], x: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.prediction_gradient(params, x)
    }

    fn describe(&self) -> String {
        format!("CNN{}", self.arch.param_count())
    }
}

/// Saved CNN weights with an architecture echo.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CnnWeights {
    pub arch: CnnArch,
    pub output: OutputActivation,
    pub conv_w: Vec<f64>,
    pub conv_b: Vec<f64>,
    pub dense_w: Vec<f64>,
    pub dense_b: Vec<f64>,
    pub out_w: Vec<f64>,
    pub out_b: f64,
}

impl CnnWeights {
    pub fn from_params(arch: CnnArch, output: OutputActivation, params: &[f64]) -> Result<Self> {
        check_len(arch.param_count(), params.len())?;
        let [cw, cb, dw, db, ow, ob] = arch.offsets();
        Ok(CnnWeights {
            arch,
            output,
            conv_w: params[cw..cb].to_vec(),
            conv_b: params[cb..dw].to_vec(),
            dense_w: params[dw..db].to_vec(),
            dense_b: params[db..ow].to_vec(),
            out_w: params[ow..ob].to_vec(),
            out_b: params[ob],
        })
    }

    pub fn to_params(&self) -> Result<Vec<f64>> {
        let mut p = Vec::with_capacity(self.arch.param_count());
        p.extend_from_slice(&self.conv_w);
        p.extend_from_slice(&self.conv_b);
        p.extend_from_slice(&self.dense_w);
        p.extend_from_slice(&self.dense_b);
        p.extend_from_slice(&self.out_w);
        p.push(self.out_b);
        check_len(self.arch.param_count(), p.len())?;
        Ok(p)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let w: CnnWeights = serde_json::from_str(s)?;
        w.to_params().map_err(|e| Error::Format(format!("CNN weights: {e}")))?;
        Ok(w)
    }
}
