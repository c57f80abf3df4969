use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use qcnn::circuits::{build_qcnn_with, CircuitSpec, Connectivity, ConvKind, EncodingKind};
use qcnn::cnn::{CnnArch, CnnModel, CnnWeights};
use qcnn::data::{split_train_test, synthetic_jets, Dataset, Split};
use qcnn::dea::{prune, redundancy_scan, sample_points, DEFAULT_POINTS, DEFAULT_TOLERANCE};
use qcnn::formats::{circuit_from_text, circuit_to_text, read_container, read_features, write_container, write_features};
use qcnn::jetprep::{parse_jets, preprocess, JetImage, PrepConfig};
use qcnn::learn::{grid_csv, run_grid, GridCell, LossKind, Model, QcnnModel, RunLog, TrainConfig};
use qcnn::pca::{normalize_features, pca_fit, DEFAULT_COMPONENTS};

use crate::config::{parse_list, ExperimentConfig};
use crate::CliError;

pub struct Context {
    pub cfg: ExperimentConfig,
    pub seed: Option<u64>,
    pub out: PathBuf,
}

impl Context {
    /// `--seed` wins over the config key, which wins over 0.
    fn seed(&self, key: &str) -> Result<u64, CliError> {
        match self.seed {
            Some(s) => Ok(s),
            None => Ok(self.cfg.parsed(key)?.unwrap_or(0)),
        }
    }

    fn write(&self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.out.join(name);
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
        }
        std::fs::write(&path, bytes).map_err(|e| io_error(&path, e))?;
        log::info!("wrote {}", path.display());
        Ok(path)
    }

    fn input(&self, flag: Option<PathBuf>, key: &str, what: &str) -> Result<PathBuf, CliError> {
        flag.or_else(|| self.cfg.path(key))
            .ok_or_else(|| CliError::Usage(format!("no {what} given (pass --input/--features or set {key})")))
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Usage(format!("{}: {e}", path.display()))
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| io_error(path, e))
}

/// Flag value, else config value, else default.
fn pick<T: std::str::FromStr>(flag: Option<T>, cfg: &ExperimentConfig, key: &str, default: T) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    match flag {
        Some(v) => Ok(v),
        None => Ok(cfg.parsed(key)?.unwrap_or(default)),
    }
}

fn pick_list<T: std::str::FromStr>(
    flag: &Option<String>,
    cfg: &ExperimentConfig,
    key: &str,
    default: &str,
) -> Result<Vec<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    let text = flag.as_deref().or(cfg.get(key)).unwrap_or(default);
    parse_list(key.rsplit('.').next().unwrap_or(key), text)
}

#[derive(Serialize)]
struct JetLine {
    label: u8,
    constituents: Vec<[f64; 4]>,
}

pub fn synth_jets(ctx: &Context, count: Option<usize>) -> Result<(), CliError> {
    let count = pick(count, &ctx.cfg, "data.count", 2000)?;
    if count == 0 {
        return Err(CliError::Empty("zero jets requested".into()));
    }
    let jets = synthetic_jets(count, ctx.seed("data.split_seed")?);
    let mut text = String::new();
    for jet in &jets {
        let line = JetLine {
            label: jet.label.as_u8(),
            constituents: jet.constituents.iter().map(|p| [p.e, p.px, p.py, p.pz]).collect(),
        };
        text.push_str(&serde_json::to_string(&line).expect("plain data serializes"));
        text.push('\n');
    }
    let path = ctx.write("jets.jsonl", text.as_bytes())?;
    println!("wrote {count} jets to {}", path.display());
    Ok(())
}

#[derive(Serialize)]
struct PrepSummary {
    parsed: usize,
    skipped_short: usize,
    kept: usize,
    kinematics_errors: usize,
    degenerate: usize,
    dropped_constituents: usize,
}

pub fn prep(ctx: &Context, input: Option<PathBuf>, pgm: Option<usize>) -> Result<(), CliError> {
    let path = ctx.input(input, "data.jets", "jets file")?;
    let file = File::open(&path).map_err(|e| io_error(&path, e))?;
    let parsed = parse_jets(BufReader::new(file))?;
    let (images, report) = preprocess(&parsed.jets, &PrepConfig::default());
    let summary = PrepSummary {
        parsed: parsed.jets.len(),
        skipped_short: parsed.skipped,
        kept: report.kept,
        kinematics_errors: report.kinematics_errors,
        degenerate: report.degenerate,
        dropped_constituents: report.dropped_constituents,
    };
    println!(
        "jets parsed {}, skipped {}, kept {}, kinematics errors {}, degenerate {}, dropped constituents {}",
        summary.parsed,
        summary.skipped_short,
        summary.kept,
        summary.kinematics_errors,
        summary.degenerate,
        summary.dropped_constituents
    );
    if images.is_empty() {
        return Err(CliError::Empty(format!("no images produced from {}", path.display())));
    }
    let mut bytes = Vec::new();
    write_container(&mut bytes, &images)?;
    ctx.write("images.jimg", &bytes)?;
    let report_json = serde_json::to_string_pretty(&summary).expect("plain data serializes");
    ctx.write("prep_report.json", report_json.as_bytes())?;
    for (i, (im, label)) in images.iter().take(pgm.unwrap_or(0)).enumerate() {
        ctx.write(&format!("pgm/img_{i:05}_{}.pgm", label.as_u8()), pgm_bytes(im).as_bytes())?;
    }
    Ok(())
}

/// Plain-text greyscale image scaled to the brightest pixel.
fn pgm_bytes(im: &JetImage) -> String {
    let max = im.pixels.iter().copied().fold(0.0_f64, f64::max);
    let mut s = format!("P2\n{} {}\n255\n", im.width, im.height);
    for row in im.pixels.chunks(im.width) {
        let line: Vec<String> = row
            .iter()
            .map(|&p| {
                let v = if max > 0.0 { (p / max * 255.0).round() } else { 0.0 };
                (v as u8).to_string()
            })
            .collect();
        s.push_str(&line.join(" "));
        s.push('\n');
    }
    s
}

pub fn pca(
    ctx: &Context,
    input: Option<PathBuf>,
    components: Option<usize>,
    train_fraction: Option<f64>,
) -> Result<(), CliError> {
    let path = ctx.input(input, "data.images", "image container")?;
    let file = File::open(&path).map_err(|e| io_error(&path, e))?;
    let images = read_container(BufReader::new(file))?;
    if images.is_empty() {
        return Err(CliError::Empty(format!("{} holds no images", path.display())));
    }
    let components = pick(components, &ctx.cfg, "data.components", DEFAULT_COMPONENTS)?;
    let fraction = pick(train_fraction, &ctx.cfg, "data.train_fraction", 0.8)?;
    let labels: Vec<u8> = images.iter().map(|(_, l)| l.as_u8()).collect();
    let (train_idx, test_idx) = split_train_test(&labels, fraction, ctx.seed("data.split_seed")?)?;

    let train_rows: Vec<Vec<f64>> = train_idx.iter().map(|&i| images[i].0.pixels.clone()).collect();
    let model = pca_fit(&train_rows, components)?;
    let project = |idx: &[usize]| -> Result<(Dataset, usize), CliError> {
        let mut clamped = 0;
        let mut features = Vec::with_capacity(idx.len());
        for &i in idx {
            let raw = model.transform(&images[i].0.pixels)?;
            let (f, c) = normalize_features(&raw, &model.feature_min, &model.feature_max, std::f64::consts::PI)?;
            clamped += c;
            features.push(f);
        }
        let labels = idx.iter().map(|&i| labels[i]).collect();
        Ok((Dataset::new(features, labels)?, clamped))
    };
    let (train, _) = project(&train_idx)?;
    let (test, clamped) = project(&test_idx)?;
    if clamped > 0 {
        log::warn!("{clamped} test feature values fell outside the training range and were clamped");
    }
    ctx.write("pca.json", model.to_json()?.as_bytes())?;
    ctx.write("features.csv", write_features(&Split { train, test }).as_bytes())?;
    println!(
        "PCA fitted on {} training images ({} test), {} components, explained variance {:?}",
        train_idx.len(),
        test_idx.len(),
        components,
        model.explained_variance
    );
    Ok(())
}

/// Final parameters written next to each run log.
#[derive(Serialize, Deserialize)]
struct FinalParams {
    model: String,
    num_params: usize,
    params: Vec<f64>,
}

struct GridSetup {
    data: Split,
    epochs: usize,
    lr: f64,
    runs: usize,
    seed: u64,
    losses: Vec<LossKind>,
    batches: Vec<usize>,
    record_time: bool,
}

fn grid_setup(ctx: &Context, args: &crate::TrainArgs) -> Result<GridSetup, CliError> {
    let path = ctx.input(args.features.clone(), "data.features", "features file")?;
    let data = read_features(&read_text(&path)?)?;
    if data.train.is_empty() || data.test.is_empty() {
        return Err(CliError::Empty(format!("{} has an empty train or test split", path.display())));
    }
    let record_time = args.record_time || ctx.cfg.parsed("train.record_time")?.unwrap_or(false);
    Ok(GridSetup {
        data,
        epochs: pick(args.epochs, &ctx.cfg, "train.epochs", qcnn::learn::DEFAULT_EPOCHS)?,
        lr: pick(args.lr, &ctx.cfg, "train.lr", qcnn::learn::DEFAULT_LEARNING_RATE)?,
        runs: pick(args.runs, &ctx.cfg, "train.runs", qcnn::learn::DEFAULT_RUNS)?,
        seed: ctx.seed("train.seed")?,
        losses: pick_list(&args.loss, &ctx.cfg, "train.loss", "mse")?,
        batches: pick_list(&args.batch, &ctx.cfg, "train.batch", "32")?,
        record_time,
    })
}

impl GridSetup {
    fn config(&self, loss: LossKind, batch: usize) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs,
            batch_size: batch,
            learning_rate: self.lr,
            seed: self.seed,
            loss,
            runs: self.runs,
            record_time: self.record_time,
        }
    }
}

fn tag(cell: &GridCell) -> String {
    format!(
        "{}_{}_{}_b{}",
        cell.circuit, cell.encoding, cell.config.loss, cell.config.batch_size
    )
}

fn run_and_write(ctx: &Context, setup: &GridSetup, cells: &[GridCell], cnn: bool) -> Result<(), CliError> {
    if setup.runs == 0 {
        return Err(CliError::Usage("runs must be at least 1".into()));
    }
    let (rows, logs) = run_grid(&setup.data, cells, setup.runs)?;
    for (cell, cell_logs) in cells.iter().zip(&logs) {
        let tag = tag(cell);
        for (r, log) in cell_logs.iter().enumerate() {
            write_run(ctx, &format!("runs/{tag}_run{r}"), log, cnn.then_some(cell))?;
        }
    }
    let csv = grid_csv(&rows);
    ctx.write("grid.csv", csv.as_bytes())?;
    print!("{csv}");
    Ok(())
}

fn write_run(ctx: &Context, stem: &str, log: &RunLog, cnn_cell: Option<&GridCell>) -> Result<(), CliError> {
    ctx.write(&format!("{stem}.csv"), log.to_csv().as_bytes())?;
    let fp = FinalParams {
        model: log.model.clone(),
        num_params: log.final_params.len(),
        params: log.final_params.clone(),
    };
    ctx.write(
        &format!("{stem}.json"),
        serde_json::to_string_pretty(&fp).expect("plain data serializes").as_bytes(),
    )?;
    if let Some(cell) = cnn_cell {
        let arch: CnnArch = cell.circuit.trim_start_matches("CNN").parse()?;
        let model = CnnModel::new(arch, log.config.loss);
        let w = CnnWeights::from_params(model.arch, model.output, &log.final_params)?;
        ctx.write(&format!("{stem}.weights.json"), w.to_json()?.as_bytes())?;
    }
    Ok(())
}

pub fn train_qcnn(ctx: &Context, args: &crate::TrainArgs) -> Result<(), CliError> {
    let setup = grid_setup(ctx, args)?;
    let circuit_file = args.circuit_file.clone().or_else(|| ctx.cfg.path("model.circuit_file"));
    let name = args.name.clone().or_else(|| ctx.cfg.get("model.name").map(String::from));

    let mut specs: Vec<(String, String, CircuitSpec)> = Vec::new();
    if let Some(path) = circuit_file {
        let spec = circuit_from_text(&read_text(&path)?)?;
        let label = name.unwrap_or_else(|| {
            path.file_stem()
                .map_or("circuit".into(), |s| s.to_string_lossy().into_owned())
        });
        specs.push((label, "file".into(), spec));
    } else {
        let circuits: Vec<ConvKind> = pick_list(&args.circuit, &ctx.cfg, "model.circuit", "SO4")?;
        let encodings: Vec<EncodingKind> = pick_list(&args.encoding, &ctx.cfg, "model.encoding", "HEE1")?;
        let connectivity: Connectivity = pick(
            args.connectivity.as_deref().map(str::parse).transpose()?,
            &ctx.cfg,
            "model.connectivity",
            Connectivity::Line,
        )?;
        for &conv in &circuits {
            for &enc in &encodings {
                let label = match (&name, circuits.len()) {
                    (Some(n), 1) => n.clone(),
                    _ => conv.to_string(),
                };
                specs.push((label, enc.to_string(), build_qcnn_with(conv, enc, connectivity)));
            }
        }
    }

    let mut cells = Vec::new();
    for circuit in unique(specs.iter().map(|s| s.0.clone())) {
        for &loss in &setup.losses {
            for (label, enc, spec) in specs.iter().filter(|s| s.0 == circuit) {
                for &batch in &setup.batches {
                    let (spec, label) = (spec.clone(), label.clone());
                    cells.push(GridCell {
                        circuit: label.clone(),
                        encoding: enc.clone(),
                        config: setup.config(loss, batch),
                        build: Box::new(move |loss| {
                            Box::new(QcnnModel::new(spec.clone(), loss, label.clone())) as Box<dyn Model + Send>
                        }),
                    });
                }
            }
        }
    }
    run_and_write(ctx, &setup, &cells, false)
}

fn unique(items: impl Iterator<Item = String>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for i in items {
        if !out.contains(&i) {
            out.push(i);
        }
    }
    out
}

pub fn train_cnn(ctx: &Context, args: &crate::TrainArgs) -> Result<(), CliError> {
    let setup = grid_setup(ctx, args)?;
    let archs: Vec<CnnArch> = pick_list(&args.arch, &ctx.cfg, "model.arch", "small,large")?;
    let mut cells = Vec::new();
    for &arch in &archs {
        for &loss in &setup.losses {
            for &batch in &setup.batches {
                cells.push(GridCell {
                    circuit: format!("CNN{}", arch.param_count()),
                    encoding: "pca".into(),
                    config: setup.config(loss, batch),
                    build: Box::new(move |loss| Box::new(CnnModel::new(arch, loss)) as Box<dyn Model + Send>),
                });
            }
        }
    }
    run_and_write(ctx, &setup, &cells, true)
}

pub fn dea(
    ctx: &Context,
    circuit: Option<String>,
    encoding: Option<String>,
    connectivity: Option<String>,
    tolerance: Option<f64>,
    points: Option<usize>,
) -> Result<(), CliError> {
    let conv: ConvKind = pick(circuit.as_deref().map(str::parse).transpose()?, &ctx.cfg, "model.circuit", ConvKind::Su4)?;
    let enc: EncodingKind = pick(
        encoding.as_deref().map(str::parse).transpose()?,
        &ctx.cfg,
        "model.encoding",
        EncodingKind::Hee1,
    )?;
    let connectivity: Connectivity = pick(
        connectivity.as_deref().map(str::parse).transpose()?,
        &ctx.cfg,
        "model.connectivity",
        Connectivity::Line,
    )?;
    let tol = pick(tolerance, &ctx.cfg, "dea.tolerance", DEFAULT_TOLERANCE)?;
    let points = pick(points, &ctx.cfg, "dea.points", DEFAULT_POINTS)?;

    let spec = build_qcnn_with(conv, enc, connectivity);
    let samples = sample_points(&spec, points, ctx.seed("dea.seed")?);
    let report = redundancy_scan(&spec, &samples, tol)?;
    // redundant slots are frozen at the first (generic) sample point
    let freeze = samples.first().map(|p| p.theta.clone()).unwrap_or_default();
    let pruned = prune(&spec, &report, &freeze)?;
    ctx.write("dea_report.json", report.to_json()?.as_bytes())?;
    ctx.write("pruned_circuit.txt", circuit_to_text(&pruned).as_bytes())?;
    println!(
        "{conv}+{enc}: {} parameters, {} kept, {} redundant, rank {} of {}{}",
        spec.param_count(),
        report.kept.len(),
        report.redundant.len(),
        report.achieved_rank,
        report.state_space_dim,
        if report.stable { "" } else { " (UNSTABLE across sample points)" }
    );
    Ok(())
}

pub fn compare(ctx: &Context, logs: &[PathBuf]) -> Result<(), CliError> {
    if logs.len() < 2 {
        return Err(CliError::Usage("compare needs at least two run logs".into()));
    }
    let mut names = Vec::new();
    let mut records = Vec::new();
    for path in logs {
        let recs = RunLog::from_csv(&read_text(path)?)?;
        if recs.is_empty() {
            return Err(CliError::Empty(format!("{} has no epochs", path.display())));
        }
        let stem = path.file_stem().map_or("log".into(), |s| s.to_string_lossy().into_owned());
        names.push(if names.contains(&stem) { path.display().to_string() } else { stem });
        records.push(recs);
    }
    let longest = records.iter().map(Vec::len).max().unwrap_or(0);
    if records.iter().any(|r| r.len() != longest) {
        log::warn!("run logs have different epoch counts; missing cells are left blank");
    }

    let mut csv = String::from("epoch");
    for n in &names {
        csv.push_str(&format!(",{n}"));
    }
    csv.push('\n');
    for row in 0..longest {
        csv.push_str(&row.to_string());
        for recs in &records {
            csv.push(',');
            if let Some(r) = recs.get(row) {
                csv.push_str(&r.test_acc.to_string());
            }
        }
        csv.push('\n');
    }
    ctx.write("compare.csv", csv.as_bytes())?;

    let width = names.iter().map(String::len).max().unwrap_or(5).max(5);
    println!("{:width$}  {:>6}  {:>6}  {:>9}", "model", "params", "epochs", "test acc");
    for ((name, recs), path) in names.iter().zip(&records).zip(logs) {
        let params = std::fs::read_to_string(path.with_extension("json"))
            .ok()
            .and_then(|t| serde_json::from_str::<FinalParams>(&t).ok())
            .map_or("-".to_string(), |p| p.num_params.to_string());
        let last = recs.last().expect("non-empty");
        println!(
            "{name:width$}  {params:>6}  {:>6}  {:>8.2}%",
            last.epoch,
            100.0 * last.test_acc
        );
    }
    Ok(())
}
