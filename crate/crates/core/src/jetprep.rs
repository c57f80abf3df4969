//! Jet constituents → boosted, Gram-Schmidt aligned energy-fraction images.
//!
//! Each jet is rescaled to mass `m_B`, boosted along its momentum so that its
//! energy becomes `E_B`, and then projected onto an orthonormal frame built
//! from its hardest constituents. Pixels hold `p⁰ / E_B`.

use std::io::BufRead;

use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{Error, Result};

pub const IMAGE_SIZE: usize = 28;
pub const DEFAULT_MASS: f64 = 1.0;
pub const DEFAULT_ENERGY: f64 = 10.0;
const DEGENERACY_TOL: f64 = 1e-12;
const EDGE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FourMomentum {
    pub e: f64,
    pub px: f64,
    pub py: f64,
    pub pz: f64,
}

impl FourMomentum {
    pub fn new(e: f64, px: f64, py: f64, pz: f64) -> Self {
        FourMomentum { e, px, py, pz }
    }

    pub fn p3(&self) -> [f64; 3] {
        [self.px, self.py, self.pz]
    }

    pub fn p_abs(&self) -> f64 {
        norm(self.p3())
    }

    /// `E² − |p|²`.
    pub fn mass_sqr(&self) -> f64 {
        self.e * self.e - dot(self.p3(), self.p3())
    }

    pub fn mass(&self) -> f64 {
        self.mass_sqr().max(0.0).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.e == 0.0 && self.px == 0.0 && self.py == 0.0 && self.pz == 0.0
    }

    fn scaled(&self, s: f64) -> Self {
        FourMomentum::new(self.e * s, self.px * s, self.py * s, self.pz * s)
    }
}

impl std::ops::Add for FourMomentum {
    type Output = FourMomentum;
    fn add(self, o: FourMomentum) -> FourMomentum {
        FourMomentum::new(self.e + o.e, self.px + o.px, self.py + o.py, self.pz + o.pz)
    }
}

impl std::iter::Sum for FourMomentum {
    fn sum<I: Iterator<Item = FourMomentum>>(iter: I) -> Self {
        iter.fold(FourMomentum::default(), |a, b| a + b)
    }
}

pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(a: f64, x: [f64; 3], y: [f64; 3]) -> [f64; 3] {
    [y[0] + a * x[0], y[1] + a * x[1], y[2] + a * x[2]]
}

fn scale3(a: f64, x: [f64; 3]) -> [f64; 3] {
    [a * x[0], a * x[1], a * x[2]]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JetLabel {
    Qcd = 0,
    Top = 1,
}

impl JetLabel {
    pub fn from_u8(v: u8) -> Option<Self> {
        match v {
            0 => Some(JetLabel::Qcd),
            1 => Some(JetLabel::Top),
            _ => None,
        }
    }

    pub fn as_u8(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub constituents: Vec<FourMomentum>,
    pub label: JetLabel,
}

impl Jet {
    pub fn total(&self) -> FourMomentum {
        self.constituents.iter().copied().sum()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJet {
    label: u8,
    constituents: Vec<[f64; 4]>,
}

/// Jets read from a JSON-lines stream, plus the number of lines skipped for
/// having fewer than three non-padding constituents.
#[derive(Debug, Clone, Default)]
pub struct ParsedJets {
    pub jets: Vec<Jet>,
    pub skipped: usize,
}

/// Reads `{"label": 0|1, "constituents": [[E,px,py,pz], ...]}` per line.
/// Blank lines are ignored and all-zero constituents are dropped as padding.
pub fn parse_jets<R: BufRead>(reader: R) -> Result<ParsedJets> {
    let mut out = ParsedJets::default();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawJet = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: line_no,
            msg: e.to_string(),
        })?;
        let label = JetLabel::from_u8(raw.label).ok_or_else(|| Error::Parse {
            line: line_no,
            msg: format!("label must be 0 or 1, got {}", raw.label),
        })?;
        let constituents: Vec<FourMomentum> = raw
            .constituents
            .iter()
            .map(|c| FourMomentum::new(c[0], c[1], c[2], c[3]))
            .filter(|p| !p.is_zero())
            .collect();
        if constituents.iter().any(|p| !(p.e.is_finite() && p.p3().iter().all(|v| v.is_finite()))) {
            return Err(Error::Parse {
                line: line_no,
                msg: "non-finite momentum component".into(),
            });
        }
        let usable = constituents.iter().filter(|p| p.p_abs() > 0.0).count();
        if usable < 3 {
            out.skipped += 1;
            continue;
        }
        out.jets.push(Jet {
            constituents,
            label,
        });
    }
    if out.skipped > 0 {
        log::warn!("skipped {} jets with fewer than 3 usable constituents", out.skipped);
    }
    Ok(out)
}

/// Rescales the jet so its invariant mass is `mass`, then boosts every
/// constituent along the jet momentum so the summed energy is `energy`.
pub fn rescale_and_boost(jet: &Jet, mass: f64, energy: f64) -> Result<Jet> {
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::Kinematics(format!("target mass {mass} must be positive")));
    }
    if !(energy >= mass && energy.is_finite()) {
        return Err(Error::Kinematics(format!("target energy {energy} below mass {mass}")));
    }
    let total = jet.total();
    let m2 = total.mass_sqr();
    if m2.is_nan() || m2 <= 0.0 || total.e <= 0.0 {
        return Err(Error::Kinematics(format!(
            "jet total is massless or spacelike (m² = {m2})"
        )));
    }
    let s = mass / m2.sqrt();
    let scaled: Vec<FourMomentum> = jet.constituents.iter().map(|p| p.scaled(s)).collect();

    let p = total.p_abs() * s;
    let e = total.e * s;
    let target_rapidity = (energy / mass).acosh();
    let current_rapidity = (p / e).atanh();
    let delta = target_rapidity - current_rapidity;
    if delta == 0.0 {
        return Ok(Jet {
            constituents: scaled,
            label: jet.label,
        });
    }
    if p == 0.0 {
        return Err(Error::Kinematics(
            "jet at rest has no boost direction".into(),
        ));
    }
    let n = scale3(1.0 / total.p_abs(), total.p3());
    let (sh, ch) = (delta.sinh(), delta.cosh());
    let constituents = scaled
        .iter()
        .map(|q| {
            let par = dot(q.p3(), n);
            let e_new = ch * q.e + sh * par;
            let par_new = sh * q.e + ch * par;
            let p3 = axpy(par_new - par, n, q.p3());
            FourMomentum::new(e_new, p3[0], p3[1], p3[2])
        })
        .collect();
    Ok(Jet {
        constituents,
        label: jet.label,
    })
}

/// Orthonormal frame; `e1` is the jet axis, `e2`/`e3` span the image plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GsBasis {
    pub e1: [f64; 3],
    pub e2: [f64; 3],
    pub e3: [f64; 3],
}

/// Gram-Schmidt on `(axis, first, second)` in that order.
pub fn gram_schmidt(axis: [f64; 3], first: [f64; 3], second: [f64; 3]) -> Result<GsBasis> {
    let unit = |v: [f64; 3]| {
        let n = norm(v);
        if n > 0.0 {
            Ok(scale3(1.0 / n, v))
        } else {
            Err(Error::Degenerate("zero-length input vector".into()))
        }
    };
    let (a, b, c) = (unit(axis)?, unit(first)?, unit(second)?);
    let det = a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0]);
    if det.abs() < DEGENERACY_TOL {
        return Err(Error::Degenerate(format!("vectors are linearly dependent (det {det:e})")));
    }
    // modified Gram-Schmidt with one reorthogonalization pass, which keeps the
    // frame orthonormal to rounding even for nearly collinear constituents
    let project_out = |v: [f64; 3], basis: &[[f64; 3]]| {
        let mut v = v;
        for _ in 0..2 {
            for e in basis {
                v = axpy(-dot(v, *e), *e, v);
            }
        }
        v
    };
    let e1 = a;
    let e2 = unit(project_out(b, &[e1]))?;
    let e3 = unit(project_out(c, &[e1, e2]))?;
    Ok(GsBasis { e1, e2, e3 })
}

/// Basis from the three constituents with the largest `|p|`; the jet axis is
/// their summed momentum. Equal magnitudes keep input order.
pub fn gram_schmidt_basis(jet: &Jet) -> Result<GsBasis> {
    let mut idx: Vec<usize> = (0..jet.constituents.len()).collect();
    idx.sort_by(|&a, &b| {
        jet.constituents[b]
            .p_abs()
            .total_cmp(&jet.constituents[a].p_abs())
    });
    if idx.len() < 3 {
        return Err(Error::Degenerate(format!(
            "need 3 constituents, have {}",
            idx.len()
        )));
    }
    let p1 = jet.constituents[idx[0]].p3();
    let p2 = jet.constituents[idx[1]].p3();
    let p3 = jet.constituents[idx[2]].p3();
    let axis = [p1[0] + p2[0] + p3[0], p1[1] + p2[1] + p3[1], p1[2] + p2[2] + p3[2]];
    gram_schmidt(axis, p1, p2)
}

/// Image-plane coordinates `(X, Y)` and the weight numerator `p⁰`.
pub fn project_constituent(p: &FourMomentum, b: &GsBasis) -> Result<(f64, f64, f64)> {
    if p.e.is_nan() || p.e <= 0.0 {
        return Err(Error::Kinematics(format!("constituent energy {} not positive", p.e)));
    }
    Ok((dot(p.p3(), b.e2) / p.e, dot(p.p3(), b.e3) / p.e, p.e))
}

/// Energy-fraction raster, row-major with rows indexed by `Y` and columns by
/// `X`, both spanning `[−1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct JetImage {
    pub height: usize,
    pub width: usize,
    pub pixels: Vec<f64>,
}

impl JetImage {
    pub fn zeros(height: usize, width: usize) -> Self {
        JetImage {
            height,
            width,
            pixels: vec![0.0; height * width],
        }
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.width + col]
    }

    pub fn sum(&self) -> f64 {
        self.pixels.iter().sum()
    }
}

/// Maps a coordinate in `[−1, 1]` to a bin; the upper edge goes to the last bin.
pub fn bin_index(v: f64, bins: usize) -> Option<usize> {
    if !(-1.0 - EDGE_SLACK..=1.0 + EDGE_SLACK).contains(&v) {
        return None;
    }
    let v = v.clamp(-1.0, 1.0);
    let i = ((v + 1.0) / 2.0 * bins as f64).floor() as usize;
    Some(i.min(bins - 1))
}

/// Rendered image plus how many constituents could not be placed.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub image: JetImage,
    pub dropped: usize,
}

/// Histograms constituents over `[−1, 1]²` with weight `p⁰ / E_B`.
pub fn render_image(jet: &Jet, b: &GsBasis, height: usize, width: usize, energy: f64) -> Result<Rendered> {
    if height == 0 || width == 0 {
        return Err(Error::Config(format!("image size {height}x{width}")));
    }
    let mut image = JetImage::zeros(height, width);
    let mut dropped = 0;
    for p in &jet.constituents {
        let Ok((x, y, w)) = project_constituent(p, b) else {
            dropped += 1;
            continue;
        };
        match (bin_index(x, width), bin_index(y, height)) {
            (Some(col), Some(row)) => image.pixels[row * width + col] += w / energy,
            _ => dropped += 1,
        }
    }
    Ok(Rendered { image, dropped })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrepConfig {
    pub mass: f64,
    pub energy: f64,
    pub height: usize,
    pub width: usize,
}

impl Default for PrepConfig {
    fn default() -> Self {
        PrepConfig {
            mass: DEFAULT_MASS,
            energy: DEFAULT_ENERGY,
            height: IMAGE_SIZE,
            width: IMAGE_SIZE,
        }
    }
}

/// Full per-jet transform.
pub fn jet_to_image(jet: &Jet, cfg: &PrepConfig) -> Result<Rendered> {
    let boosted = rescale_and_boost(jet, cfg.mass, cfg.energy)?;
    let basis = gram_schmidt_basis(&boosted)?;
    render_image(&boosted, &basis, cfg.height, cfg.width, cfg.energy)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrepReport {
    pub input: usize,
    pub kept: usize,
    pub kinematics_errors: usize,
    pub degenerate: usize,
    pub dropped_constituents: usize,
}

/// Processes jets in parallel; the output order matches the input order.
pub fn preprocess(jets: &[Jet], cfg: &PrepConfig) -> (Vec<(JetImage, JetLabel)>, PrepReport) {
    let results: Vec<Result<Rendered>> = jets.par_iter().map(|j| jet_to_image(j, cfg)).collect();
    let mut report = PrepReport {
        input: jets.len(),
        ..Default::default()
    };
    let mut images = Vec::with_capacity(jets.len());
    for (jet, r) in jets.iter().zip(results) {
        match r {
            Ok(rendered) => {
                report.dropped_constituents += rendered.dropped;
                images.push((rendered.image, jet.label));
            }
            Err(Error::Degenerate(_)) => report.degenerate += 1,
            Err(_) => report.kinematics_errors += 1,
        }
    }
    report.kept = images.len();
    (images, report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fm(e: f64, px: f64, py: f64, pz: f64) -> FourMomentum {
        FourMomentum::new(e, px, py, pz)
    }

    #[test]
    fn parse_example_line() {
        let input = r#"{"label":1,"constituents":[[100,0,0,100],[50,30,0,40],[25,0,20,15],[0,0,0,0]]}"#;
        let parsed = parse_jets(input.as_bytes()).unwrap();
        assert_eq!(parsed.jets.len(), 1);
        assert_eq!(parsed.jets[0].constituents.len(), 3);
        assert_eq!(parsed.jets[0].label, JetLabel::Top);
    }

    #[test]
    fn parse_errors_name_line() {
        let input = "{\"label\":0,\"constituents\":[[1,0,0,1],[1,1,0,0],[1,0,1,0]]}\n{\"label\":0,\"constit";
        match parse_jets(input.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        let bad_label = r#"{"label":3,"constituents":[]}"#;
        assert!(matches!(parse_jets(bad_label.as_bytes()), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn parse_skips_short_jets() {
        let input = r#"{"label":0,"constituents":[[1,0,0,1],[1,1,0,0],[0,0,0,0]]}"#;
        let parsed = parse_jets(input.as_bytes()).unwrap();
        assert!(parsed.jets.is_empty());
        assert_eq!(parsed.skipped, 1);
    }

    #[test]
    fn boost_closed_form() {
        let jet = Jet {
            constituents: vec![fm(6.0, 0.0, 0.0, 4.0), fm(4.0, 0.0, 0.0, 2.0)],
            label: JetLabel::Qcd,
        };
        assert!((jet.total().mass() - 8.0).abs() < 1e-12);
        let out = rescale_and_boost(&jet, 1.0, 10.0).unwrap();
        let t = out.total();
        assert!((t.e - 10.0).abs() < 1e-9);
        assert!((t.mass() - 1.0).abs() < 1e-9);
        // boost is along z, so transverse components stay zero
        assert!(t.px.abs() < 1e-12 && t.py.abs() < 1e-12);
    }

    #[test]
    fn boost_at_rest_is_identity() {
        let jet = Jet {
            constituents: vec![fm(0.5, 0.3, 0.0, 0.0), fm(0.5, -0.3, 0.0, 0.0)],
            label: JetLabel::Qcd,
        };
        let m = jet.total().mass();
        let out = rescale_and_boost(&jet, m, m).unwrap();
        for (a, b) in out.constituents.iter().zip(&jet.constituents) {
            assert!((a.e - b.e).abs() < 1e-12 && (a.px - b.px).abs() < 1e-12);
        }
        assert!((DEFAULT_ENERGY / DEFAULT_MASS - 10.0).abs() < 1e-15);
    }

    #[test]
    fn boost_rejects_massless_jet() {
        let jet = Jet {
            constituents: vec![fm(1.0, 0.0, 0.0, 1.0), fm(2.0, 0.0, 0.0, 2.0)],
            label: JetLabel::Qcd,
        };
        assert!(matches!(rescale_and_boost(&jet, 1.0, 10.0), Err(Error::Kinematics(_))));
        let ok = Jet {
            constituents: vec![fm(6.0, 0.0, 0.0, 4.0), fm(4.0, 0.0, 0.0, 2.0)],
            label: JetLabel::Qcd,
        };
        assert!(rescale_and_boost(&ok, 1.0, 0.5).is_err());
    }

    #[test]
    fn hand_gram_schmidt() {
        let b = gram_schmidt([0.0, 0.0, 5.0], [1.0, 0.0, 1.0], [0.0, 1.0, 1.0]).unwrap();
        let close = |a: [f64; 3], e: [f64; 3]| (0..3).all(|i| (a[i] - e[i]).abs() < 1e-15);
        assert!(close(b.e1, [0.0, 0.0, 1.0]));
        assert!(close(b.e2, [1.0, 0.0, 0.0]));
        assert!(close(b.e3, [0.0, 1.0, 0.0]));
    }

    #[test]
    fn parallel_first_vector_is_degenerate() {
        let r = gram_schmidt([0.0, 0.0, 5.0], [0.0, 0.0, 2.0], [0.0, 1.0, 1.0]);
        assert!(matches!(r, Err(Error::Degenerate(_))));
    }

    #[test]
    fn projections() {
        let b = GsBasis {
            e1: [0.0, 0.0, 1.0],
            e2: [1.0, 0.0, 0.0],
            e3: [0.0, 1.0, 0.0],
        };
        assert_eq!(project_constituent(&fm(3.0, 0.0, 0.0, 3.0), &b).unwrap(), (0.0, 0.0, 3.0));
        assert_eq!(project_constituent(&fm(2.0, 2.0, 0.0, 0.0), &b).unwrap(), (1.0, 0.0, 2.0));
        assert!(project_constituent(&fm(0.0, 1.0, 0.0, 0.0), &b).is_err());
    }

    #[test]
    fn histogram_edges_and_center() {
        assert_eq!(bin_index(1.0, 28), Some(27));
        assert_eq!(bin_index(-1.0, 28), Some(0));
        assert_eq!(bin_index(0.0, 28), Some(14));
        assert_eq!(bin_index(1.5, 28), None);

        let b = GsBasis {
            e1: [0.0, 0.0, 1.0],
            e2: [1.0, 0.0, 0.0],
            e3: [0.0, 1.0, 0.0],
        };
        let jet = Jet {
            constituents: vec![fm(10.0, 0.0, 0.0, 10.0)],
            label: JetLabel::Top,
        };
        let img = render_image(&jet, &b, 28, 28, 10.0).unwrap().image;
        assert_eq!(img.get(14, 14), 1.0);
        assert_eq!(img.sum(), 1.0);

        let jet = Jet {
            constituents: vec![fm(2.0, 0.0, 0.0, 2.0), fm(3.0, 0.0, 0.0, 3.0)],
            label: JetLabel::Top,
        };
        let img = render_image(&jet, &b, 28, 28, 10.0).unwrap().image;
        assert!((img.get(14, 14) - 0.5).abs() < 1e-15);
        assert!(render_image(&jet, &b, 0, 28, 10.0).is_err());
    }
}
