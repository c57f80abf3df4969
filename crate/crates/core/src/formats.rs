//! On-disk formats: the `JIMG` image container, the feature table and the
//! line-oriented circuit description.

use std::io::{Read, Write};

use crate::circuits::{Angle, CircuitSpec, Op};
use crate::data::{Dataset, Split};
use crate::error::{Error, Result};
use crate::jetprep::{JetImage, JetLabel};
use crate::statevec::Axis;

pub const JIMG_MAGIC: &[u8; 4] = b"JIMG";

/// `"JIMG"`, little-endian `u32` count, height, width, `count·H·W`
/// little-endian `f32` pixels, then one label byte per image.
pub fn write_container<W: Write>(mut w: W, images: &[(JetImage, JetLabel)]) -> Result<()> {
    let (h, wd) = images.first().map_or((0, 0), |(im, _)| (im.height, im.width));
    if images.iter().any(|(im, _)| im.height != h || im.width != wd) {
        return Err(Error::Format("images in one container must share a size".into()));
    }
    let to_u32 = |v: usize| u32::try_from(v).map_err(|_| Error::Format(format!("{v} exceeds u32")));
    w.write_all(JIMG_MAGIC)?;
    w.write_all(&to_u32(images.len())?.to_le_bytes())?;
    w.write_all(&to_u32(h)?.to_le_bytes())?;
    w.write_all(&to_u32(wd)?.to_le_bytes())?;
    for (im, _) in images {
        for &p in &im.pixels {
            w.write_all(&(p as f32).to_le_bytes())?;
        }
    }
    let labels: Vec<u8> = images.iter().map(|(_, l)| l.as_u8()).collect();
    w.write_all(&labels)?;
    Ok(())
}

pub fn read_container<R: Read>(mut r: R) -> Result<Vec<(JetImage, JetLabel)>> {
    let mut buf = Vec::new();
    r.read_to_end(&mut buf)?;
    if buf.len() < 16 || &buf[..4] != JIMG_MAGIC {
        return Err(Error::Format("missing JIMG header".into()));
    }
    let word = |i: usize| u32::from_le_bytes(buf[i..i + 4].try_into().expect("4 bytes")) as usize;
    let (count, h, w) = (word(4), word(8), word(12));
    let npix = count
        .checked_mul(h)
        .and_then(|v| v.checked_mul(w))
        .ok_or_else(|| Error::Format("container dimensions overflow".into()))?;
    let expected = 16 + npix * 4 + count;
    if buf.len() != expected {
        return Err(Error::Format(format!(
            "container is {} bytes, header implies {expected}",
            buf.len()
        )));
    }
    let label_start = 16 + npix * 4;
    (0..count)
        .map(|i| {
            let base = 16 + i * h * w * 4;
            let pixels = (0..h * w)
                .map(|p| {
                    let o = base + p * 4;
                    f64::from(f32::from_le_bytes(buf[o..o + 4].try_into().expect("4 bytes")))
                })
                .collect();
            let label = JetLabel::from_u8(buf[label_start + i])
                .ok_or_else(|| Error::Format(format!("label byte {} of image {i}", buf[label_start + i])))?;
            Ok((
                JetImage {
                    height: h,
                    width: w,
                    pixels,
                },
                label,
            ))
        })
        .collect()
}

/// Header of a four-feature table.
pub const FEATURE_HEADER: &str = "split,label,f0,f1,f2,f3";

/// Feature table with header `split,label,f0,…`: one row per sample,
/// `split` is `train` or `test`. Values use the shortest representation
/// that round-trips.
pub fn write_features(split: &Split) -> String {
    let width = split
        .train
        .features
        .first()
        .or(split.test.features.first())
        .map_or(4, Vec::len);
    let mut s = String::from("split,label");
    for k in 0..width {
        s.push_str(&format!(",f{k}"));
    }
    s.push('\n');
    for (name, set) in [("train", &split.train), ("test", &split.test)] {
        for (row, label) in set.features.iter().zip(&set.labels) {
            s.push_str(name);
            s.push(',');
            s.push_str(&label.to_string());
            for v in row {
                s.push(',');
                s.push_str(&v.to_string());
            }
            s.push('\n');
        }
    }
    s
}

pub fn read_features(text: &str) -> Result<Split> {
    let mut lines = text.lines().enumerate();
    let header = lines.next().map(|(_, l)| l.trim());
    if header.is_none_or(|h| !h.starts_with("split,label")) {
        return Err(Error::Parse {
            line: 1,
            msg: "expected header 'split,label,f0,...'".into(),
        });
    }
    let width = header.map_or(0, |h| h.split(',').count() - 2);
    let mut split = Split::default();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |msg: String| Error::Parse { line: i + 1, msg };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != width + 2 {
            return Err(bad(format!("expected {} fields, got {}", width + 2, fields.len())));
        }
        let label: u8 = match fields[1].trim() {
            "0" => 0,
            "1" => 1,
            other => return Err(bad(format!("label '{other}'"))),
        };
        let row = fields[2..]
            .iter()
            .map(|f| f.trim().parse::<f64>().map_err(|_| bad(format!("number '{f}'"))))
            .collect::<Result<Vec<_>>>()?;
        let set = match fields[0].trim() {
            "train" => &mut split.train,
            "test" => &mut split.test,
            other => return Err(bad(format!("split '{other}'"))),
        };
        set.features.push(row);
        set.labels.push(label);
    }
    Ok(split)
}

/// Concatenates both splits, train first.
pub fn merged(split: &Split) -> Dataset {
    let mut d = split.train.clone();
    d.features.extend(split.test.features.iter().cloned());
    d.labels.extend(&split.test.labels);
    d
}

fn fmt_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// Serializes a circuit, one gate per line:
///
/// ```text
/// qubits=4 params=30 measured=3
/// FROZEN <slot> <value>
/// ROT <axis> <target> <kind> <index|value>     kind ∈ param, data, dataprod, const
/// H|S|SDG - <target> none -
/// CNOT - <target> <control> none -
/// ```
pub fn circuit_to_text(spec: &CircuitSpec) -> String {
    let mut s = format!(
        "qubits={} params={} measured={}\n",
        spec.num_qubits(),
        spec.param_count(),
        spec.measured_qubit()
    );
    for (k, f) in spec.frozen().iter().enumerate() {
        if let Some(v) = f {
            s.push_str(&format!("FROZEN {k} {}\n", fmt_value(*v)));
        }
    }
    for op in spec.ops() {
        let line = match *op {
            Op::Rot { axis, target, angle } => {
                let (kind, val) = match angle {
                    Angle::Param(k) => ("param", k.to_string()),
                    Angle::Data(d) => ("data", d.to_string()),
                    Angle::DataProduct(a, b) => ("dataprod", format!("{a}:{b}")),
                    Angle::Const(v) => ("const", fmt_value(v)),
                };
                format!("ROT {} {target} {kind} {val}", axis.symbol())
            }
            Op::H(t) => format!("H - {t} none -"),
            Op::S(t) => format!("S - {t} none -"),
            Op::Sdg(t) => format!("SDG - {t} none -"),
            Op::Cnot { control, target } => format!("CNOT - {target} {control} none -"),
        };
        s.push_str(&line);
        s.push('\n');
    }
    s
}

pub fn circuit_from_text(text: &str) -> Result<CircuitSpec> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty circuit file".into(),
    })?;
    let mut qubits = None;
    let mut params = None;
    let mut measured = None;
    for tok in header.split_whitespace() {
        let (k, v) = tok.split_once('=').ok_or(Error::Parse {
            line: 1,
            msg: format!("header token '{tok}'"),
        })?;
        let v: usize = v.parse().map_err(|_| Error::Parse {
            line: 1,
            msg: format!("header value '{v}'"),
        })?;
        match k {
            "qubits" => qubits = Some(v),
            "params" => params = Some(v),
            "measured" => measured = Some(v),
            _ => {
                return Err(Error::Parse {
                    line: 1,
                    msg: format!("unknown header key '{k}'"),
                })
            }
        }
    }
    let missing = || Error::Parse {
        line: 1,
        msg: "header needs qubits, params and measured".into(),
    };
    let (qubits, params, measured) = (
        qubits.ok_or_else(missing)?,
        params.ok_or_else(missing)?,
        measured.ok_or_else(missing)?,
    );

    let mut ops = Vec::new();
    let mut frozen = Vec::new();
    for (i, line) in lines {
        let bad = |msg: String| Error::Parse { line: i + 1, msg };
        let t: Vec<&str> = line.split_whitespace().collect();
        let uint = |s: &str| s.parse::<usize>().map_err(|_| bad(format!("integer '{s}'")));
        let float = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("number '{s}'")));
        match t.as_slice() {
            ["FROZEN", k, v] => frozen.push((uint(k)?, float(v)?)),
            ["ROT", axis, target, kind, val] => {
                let axis = Axis::from_symbol(axis).ok_or_else(|| bad(format!("axis '{axis}'")))?;
                let angle = match *kind {
                    "param" => Angle::Param(uint(val)?),
                    "data" => Angle::Data(uint(val)?),
                    "dataprod" => {
                        let (a, b) = val.split_once(':').ok_or_else(|| bad(format!("pair '{val}'")))?;
                        Angle::DataProduct(uint(a)?, uint(b)?)
                    }
                    "const" => Angle::Const(float(val)?),
                    other => return Err(bad(format!("slot kind '{other}'"))),
                };
                ops.push(Op::Rot {
                    axis,
                    target: uint(target)?,
                    angle,
                });
            }
            ["H", "-", t, "none", "-"] => ops.push(Op::H(uint(t)?)),
            ["S", "-", t, "none", "-"] => ops.push(Op::S(uint(t)?)),
            ["SDG", "-", t, "none", "-"] => ops.push(Op::Sdg(uint(t)?)),
            ["CNOT", "-", t, c, "none", "-"] => ops.push(Op::Cnot {
                control: uint(c)?,
                target: uint(t)?,
            }),
            _ => return Err(bad(format!("unrecognized gate line '{line}'"))),
        }
    }
    CircuitSpec::new(qubits, ops, params, measured)?.with_frozen(&frozen)
}
