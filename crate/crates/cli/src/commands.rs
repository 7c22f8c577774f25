//! Subcommand implementations. Each reads its prerequisites from the output
//! directory, writes JSON artifacts plus CSV reports there, and prints a short
//! summary. Outputs depend only on configuration, seed and input artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use photonic_snn::dpe::{
    build_level_table, crosstalk_alpha, design_ring_bank, CrosstalkMap, LevelTable, Readout, RingBank,
};
use photonic_snn::energy::EnergyModel;
use photonic_snn::formats::{self, geometry_hash, Header};
use photonic_snn::mnist::Dataset;
use photonic_snn::optics::{spectral_summary, GstState, DEFAULT_BAND};
use photonic_snn::snn::{
    ablation_report, convert_ann_to_snn, evaluate, run_inference, train_ann, DeviceContext, EvalReport, Evaluation,
    MlpModel, Mode, SnnModel, SnnNetwork, TraceOptions,
};

use crate::config::ExperimentConfig;

pub const BANK: &str = "bank.json";
pub const LEVELS: &str = "levels.json";
pub const CROSSTALK: &str = "crosstalk.json";
pub const MODEL: &str = "model.json";
pub const SNN: &str = "snn.json";

#[derive(Debug)]
pub enum CliError {
    /// Invalid configuration or flag combination (exit 2).
    Config(String),
    /// A required input artifact is absent (exit 3).
    Missing(String),
    /// Any other failure (exit 1).
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Missing(_) => 3,
            CliError::Failed(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Missing(m) => write!(f, "missing prerequisite: {m}"),
            CliError::Failed(m) => write!(f, "{m}"),
        }
    }
}

impl From<photonic_snn::Error> for CliError {
    fn from(e: photonic_snn::Error) -> Self {
        match e {
            photonic_snn::Error::Domain(m) => CliError::Config(m),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failed(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub struct Context {
    pub config: ExperimentConfig,
    pub mode: Mode,
    pub images: Option<usize>,
}

impl Context {
    fn out(&self) -> &Path {
        &self.config.paths.out
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out().join(name)
    }

    fn write(&self, name: &str, text: &str) -> Result<()> {
        fs::create_dir_all(self.out())?;
        fs::write(self.path(name), text)?;
        Ok(())
    }

    fn require(&self, name: &str, producer: &str) -> Result<PathBuf> {
        let path = self.path(name);
        if path.is_file() {
            Ok(path)
        } else {
            Err(CliError::Missing(format!("{} (produced by `psnn {producer}`)", path.display())))
        }
    }

    fn dataset(&self, train: bool) -> Result<Dataset> {
        let dir = &self.config.paths.mnist;
        let split = if train { "train" } else { "t10k" };
        for kind in ["images-idx3", "labels-idx1"] {
            let file = dir.join(format!("{split}-{kind}-ubyte"));
            if !file.is_file() {
                return Err(CliError::Missing(format!("MNIST file {}", file.display())));
            }
        }
        Ok(Dataset::load_split(dir, train)?)
    }

    fn header(&self, kind: &str, bank: Option<&RingBank>, levels: usize, dims: Vec<usize>) -> Header {
        Header {
            geometry_hash: bank.map(geometry_hash).unwrap_or_default(),
            levels,
            dims,
            seed: Some(self.config.seed),
            ..Header::new(kind)
        }
    }

    fn load_bank(&self) -> Result<RingBank> {
        let path = self.require(BANK, "design")?;
        Ok(formats::load::<RingBank>(&path, "ring-bank")?.body)
    }

    fn load_levels(&self, bank: &RingBank) -> Result<LevelTable> {
        let path = self.require(LEVELS, "levels")?;
        let doc = formats::load::<LevelTable>(&path, "level-table")?;
        check_hash(&path, &doc.header, bank)?;
        Ok(doc.body)
    }

    fn load_device(&self) -> Result<DeviceContext> {
        let bank = self.load_bank()?;
        let table = self.load_levels(&bank)?;
        let path = self.require(CROSSTALK, "crosstalk")?;
        let doc = formats::load::<CrosstalkMap>(&path, "crosstalk-map")?;
        check_hash(&path, &doc.header, &bank)?;
        let readout = Readout::normalized(&table, self.config.device.responsivity);
        Ok(DeviceContext { table, alpha: doc.body, readout })
    }

    fn load_snn(&self) -> Result<SnnModel> {
        let path = self.require(SNN, "convert")?;
        Ok(formats::load::<SnnModel>(&path, "snn-model")?.body)
    }

    fn device_for_mode(&self) -> Result<Option<DeviceContext>> {
        match self.mode {
            Mode::Ideal => Ok(None),
            _ => self.load_device().map(Some),
        }
    }

    fn indices(&self, data: &Dataset, default: Option<usize>) -> Vec<usize> {
        let n = self.images.or(default).unwrap_or(data.len()).min(data.len());
        (0..n).collect()
    }
}

fn check_hash(path: &Path, header: &Header, bank: &RingBank) -> Result<()> {
    if header.geometry_hash != geometry_hash(bank) {
        return Err(CliError::Failed(format!(
            "{} was produced for a different ring bank; rerun the commands after `psnn design`",
            path.display()
        )));
    }
    Ok(())
}

pub fn design(ctx: &Context, rings: Option<usize>) -> Result<()> {
    let device = &ctx.config.device;
    let mut spec = device.bank;
    if let Some(r) = rings {
        spec.rings = r;
    }
    let bank = design_ring_bank(&device.ring, &device.stack, &spec)?;
    let header = ctx.header("ring-bank", Some(&bank), 0, vec![bank.len()]);
    formats::save(&ctx.path(BANK), header, &bank)?;
    ctx.write("bank.csv", &formats::bank_csv(&bank))?;

    let mut spectral = String::from("ring,resonance_nm,fsr_nm,fwhm_nm,finesse\n");
    for (i, (ring, &channel)) in bank.rings.iter().zip(&bank.channel_wavelengths).enumerate() {
        let s = spectral_summary(ring, GstState::AMORPHOUS, &device.stack, DEFAULT_BAND)?;
        let r = s
            .resonances
            .iter()
            .min_by(|a, b| (a.wavelength - channel).abs().total_cmp(&(b.wavelength - channel).abs()))
            .expect("channel lies in band");
        let _ = writeln!(spectral, "{i},{},{},{},{}", r.wavelength * 1e9, r.fsr * 1e9, r.fwhm * 1e9, r.finesse);
    }
    ctx.write("spectral.csv", &spectral)?;
    let states = [0.3, 0.5, 0.8, 1.0];
    ctx.write(
        "transmission.csv",
        &formats::transmission_csv(&bank.rings[0], &device.stack, &states, DEFAULT_BAND, 3001)?,
    )?;

    println!("designed {} rings, mode order {}", bank.len(), bank.mode_order);
    println!("FSR {:.3} nm, channel span {:.3} nm, N x spacing {:.3} nm", bank.fsr * 1e9, bank.span() * 1e9, bank.len() as f64 * bank.channel_spacing * 1e9);
    if bank.len() == 1 {
        println!("single channel: no adjacent-channel crosstalk (alpha = 1)");
    }
    Ok(())
}

pub fn levels(ctx: &Context) -> Result<()> {
    let bank = ctx.load_bank()?;
    let stack = &ctx.config.device.stack;
    let table = build_level_table(&bank, stack, &ctx.config.device.levels)?;
    let header = ctx.header("level-table", Some(&bank), table.level_count(), vec![table.ring_count(), table.level_count()]);
    formats::save(&ctx.path(LEVELS), header, &table)?;
    ctx.write("levels.csv", &formats::levels_csv(&table))?;
    let min_r2 = (0..table.ring_count()).map(|r| table.linearity_r2(r)).fold(f64::INFINITY, f64::min);
    println!("{} rings x {} levels, minimum linear-fit R^2 {min_r2:.6}", table.ring_count(), table.level_count());
    Ok(())
}

pub fn crosstalk(ctx: &Context) -> Result<()> {
    let bank = ctx.load_bank()?;
    let table = ctx.load_levels(&bank)?;
    let map = crosstalk_alpha(&bank, &table, &ctx.config.device.stack)?;
    let header = ctx.header("crosstalk-map", Some(&bank), table.level_count(), vec![table.ring_count(), table.level_count()]);
    formats::save(&ctx.path(CROSSTALK), header, &map)?;
    ctx.write("alpha.csv", &formats::alpha_csv(&map))?;
    let (min, ring, level) = map.min();
    println!("alpha minimum {min:.6} at ring {ring}, level {level}");
    Ok(())
}

pub fn train(ctx: &Context) -> Result<()> {
    let train = ctx.dataset(true)?;
    let test = ctx.dataset(false)?;
    let sizes = ctx.config.topology();
    let all: Vec<usize> = (0..train.len()).collect();
    let (model, history) = train_ann(
        &train.matrix(&all),
        &train.labels_of(&all),
        &sizes,
        &ctx.config.train.optimizer,
        ctx.config.seed,
    )?;
    let test_idx: Vec<usize> = (0..test.len()).collect();
    let accuracy = model.accuracy(&test.matrix(&test_idx), &test.labels_of(&test_idx));
    let header = ctx.header("mlp-model", None, 0, sizes.clone());
    formats::save(&ctx.path(MODEL), header, &model)?;
    let mut csv = String::from("epoch,loss\n");
    for h in &history {
        let _ = writeln!(csv, "{},{}", h.epoch + 1, h.loss);
    }
    ctx.write("training.csv", &csv)?;
    let train_acc = history.last().map_or(f64::NAN, |h| h.train_accuracy);
    ctx.write("train_summary.csv", &format!("metric,value\ntrain_accuracy,{train_acc}\ntest_accuracy,{accuracy}\n"))?;
    println!("trained {sizes:?}: train accuracy {:.2}%, test accuracy {:.2}%", 100.0 * train_acc, 100.0 * accuracy);
    Ok(())
}

pub fn convert(ctx: &Context) -> Result<()> {
    let path = ctx.require(MODEL, "train")?;
    let model = formats::load::<MlpModel>(&path, "mlp-model")?.body;
    let train = ctx.dataset(true)?;
    let calib: Vec<usize> = (0..ctx.config.train.calibration_images.min(train.len())).collect();
    let snn = convert_ann_to_snn(&model, train.matrix(&calib).view(), &ctx.config.train.conversion)?;
    let header = ctx.header("snn-model", None, 0, model.sizes.clone());
    formats::save(&ctx.path(SNN), header, &snn)?;
    let mut csv = String::from("layer,scale,threshold\n");
    for (l, (s, t)) in snn.scales.iter().zip(&snn.thresholds).enumerate() {
        let _ = writeln!(csv, "{l},{s},{t}");
    }
    ctx.write("thresholds.csv", &csv)?;
    println!("converted {:?}: thresholds {:?}", model.sizes, snn.thresholds);
    Ok(())
}

fn summary(report: &EvalReport, steps: usize) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "mode: {}", report.mode.name());
    let _ = writeln!(s, "images: {}", report.images);
    let _ = writeln!(s, "time steps: {steps}");
    let _ = writeln!(s, "correct: {}", report.correct);
    let _ = writeln!(s, "accuracy: {:.4}", report.accuracy);
    let _ = writeln!(s, "ties (broken toward the lowest class): {}", report.ties);
    s
}

pub fn infer(ctx: &Context) -> Result<()> {
    let snn = ctx.load_snn()?;
    let device = ctx.device_for_mode()?;
    let test = ctx.dataset(false)?;
    let run = ctx.config.run_config();
    let indices = ctx.indices(&test, ctx.config.run.images);
    let net = SnnNetwork::new(&snn, ctx.mode, device.as_ref(), run.amplitude)?;
    let report = evaluate(&net, &test, &indices, &run, None)?;
    let name = ctx.mode.name();

    let mut csv = String::from("image,label,prediction\n");
    for (&i, &p) in indices.iter().zip(&report.predictions) {
        let _ = writeln!(csv, "{i},{},{p}", test.label(i));
    }
    ctx.write(&format!("predictions_{name}.csv"), &csv)?;
    ctx.write(&format!("accuracy_{name}.csv"), &formats::accuracy_csv(&report.step_accuracy))?;
    ctx.write(&format!("infer_{name}.txt"), &summary(&report, run.time_steps))?;

    if let Some(&first) = indices.first() {
        let output = net.sizes().len() - 2;
        let enc = photonic_snn::snn::encode_image(&test.intensities(first), first, &run)?;
        let trace = TraceOptions { rasters: true, vmem_layer: Some(output) };
        let r = run_inference(&net, &enc, Evaluation::Monolithic, trace)?;
        let width = *net.sizes().last().unwrap();
        ctx.write(&format!("raster_{name}.csv"), &formats::trace_csv(&r.rasters[output], width))?;
        ctx.write(&format!("vmem_{name}.csv"), &formats::trace_csv(&r.vmem, width))?;
    }
    println!("{name}: {}/{} correct ({:.2}%), {} ties", report.correct, report.images, 100.0 * report.accuracy, report.ties);
    Ok(())
}

pub fn energy(ctx: &Context) -> Result<()> {
    if ctx.mode == Mode::Ideal {
        return Err(CliError::Config("energy accounting needs a device mode (quantized or crosstalk)".into()));
    }
    let snn = ctx.load_snn()?;
    let device = ctx.load_device()?;
    let test = ctx.dataset(false)?;
    let run = ctx.config.run_config();
    let indices = ctx.indices(&test, Some(ctx.config.run.energy_images));
    let net = SnnNetwork::new(&snn, ctx.mode, Some(&device), run.amplitude)?;
    let model = EnergyModel::new(&net.mapped, run.amplitude, run.pulse_width)?;
    let report = evaluate(&net, &test, &indices, &run, Some(&model))?;
    let ledger = report.energy.expect("energy model supplied");
    let synapses: Vec<usize> = net.sizes().windows(2).map(|w| w[0] * w[1]).collect();
    ctx.write("energy.csv", &formats::energy_csv(&ledger, &synapses))?;
    let (syn, neu) = ledger.per_image();
    println!(
        "{} images: {:.2} nJ/image ({:.2} synaptic + {:.2} neuron), accuracy {:.2}%",
        report.images,
        (syn + neu) * 1e9,
        syn * 1e9,
        neu * 1e9,
        100.0 * report.accuracy
    );
    Ok(())
}

pub fn ablate(ctx: &Context) -> Result<()> {
    let snn = ctx.load_snn()?;
    let device = ctx.load_device()?;
    let test = ctx.dataset(false)?;
    let run = ctx.config.run_config();
    let indices = ctx.indices(&test, ctx.config.run.images);
    let rows = ablation_report(&snn, &device, &test, &indices, &run)?;
    let mut csv = String::from("mode,images,accuracy,degradation_pp\n");
    for r in &rows {
        let _ = writeln!(csv, "{},{},{},{}", r.mode.name(), r.images, r.accuracy, r.degradation_pp);
        println!("{:<10} {:>6} images  accuracy {:.2}%  degradation {:+.2} pp", r.mode.name(), r.images, 100.0 * r.accuracy, r.degradation_pp);
    }
    ctx.write("ablation.csv", &csv)?;
    Ok(())
}
