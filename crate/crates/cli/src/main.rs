//! `dctprune` command-line front end.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use dctprune::catalog::{self, CHEN_REFERENCE_1D, UNSPECIFIED};
use dctprune::{
    compress_image, energy_compaction, image, lookup, lookup_with_prune, CompressOptions, DcConvention, Dyadic,
    GrayImage, QualityReport, Transform,
};
use rayon::prelude::*;

use output::{Format, Out};

#[derive(Parser)]
#[command(name = "dctprune", version, about = "Exact, approximate and pruned 8-point DCT kernels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List catalog transforms with their operation counts.
    List,
    /// Show a transform's matrix, apply it to a vector, or dump its plan.
    Transform(TransformArgs),
    /// Compress one image and report its quality.
    Compress(CompressArgs),
    /// Energy compaction of a transform over a corpus.
    Energy(EnergyArgs),
    /// Multiplication, addition and shift counts for every transform.
    Complexity(ReportArgs),
    /// Average quality of several transforms over a corpus.
    Compare(CompareArgs),
}

#[derive(Args)]
struct Select {
    /// Catalog name, e.g. `lodct-p4` or `mrdct`.
    #[arg(long, short)]
    transform: String,
    /// Keep the first K outputs.
    #[arg(long, value_name = "K")]
    prune: Option<usize>,
}

impl Select {
    fn resolve(&self) -> Result<Transform> {
        Ok(lookup_with_prune(&self.transform, self.prune)?)
    }
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Omit the generation time from JSON output.
    #[arg(long)]
    no_timestamp: bool,
}

impl ReportArgs {
    fn out(&self) -> Out {
        Out::new(self.format, self.no_timestamp, self.out.clone())
    }
}

#[derive(Args)]
struct TransformArgs {
    #[command(flatten)]
    select: Select,
    /// Comma-separated input vector of 8 values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1)]
    input: Option<Vec<f64>>,
    /// Print the add/shift flow graph.
    #[arg(long)]
    dump_plan: bool,
    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Args)]
struct CodecArgs {
    #[arg(long, short, default_value_t = dctprune::codec::DEFAULT_QUALITY,
          value_parser = clap::value_parser!(u32).range(1..=100))]
    quality: u32,
    /// Force every quantization step to 1.
    #[arg(long)]
    quant_unit: bool,
    /// Merge the scaling diagonal into the quantizer.
    #[arg(long)]
    folded: bool,
}

impl CodecArgs {
    fn options(&self) -> CompressOptions {
        CompressOptions { quality: self.quality, quant_unit: self.quant_unit, folded: self.folded }
    }
}

#[derive(Args)]
struct CompressArgs {
    /// PGM/PPM input image.
    input: PathBuf,
    #[command(flatten)]
    select: Select,
    #[command(flatten)]
    codec: CodecArgs,
    /// Write the reconstructed image here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Omit the generation time from JSON output.
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Args)]
struct EnergyArgs {
    /// Image files or directories.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[command(flatten)]
    select: Select,
    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Args)]
struct CompareArgs {
    /// Image files or directories.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Transforms to compare; defaults to every implemented one.
    #[arg(long, short, value_delimiter = ',')]
    transforms: Vec<String>,
    #[command(flatten)]
    codec: CodecArgs,
    /// Emit one row per image instead of corpus averages.
    #[arg(long)]
    per_image: bool,
    #[command(flatten)]
    report: ReportArgs,
}

fn is_image(p: &Path) -> bool {
    p.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| matches!(e.to_ascii_lowercase().as_str(), "pgm" | "ppm" | "png"))
}

/// Loads every image named directly or found in a directory, sorted by name.
fn load_corpus(inputs: &[PathBuf]) -> Result<Vec<(String, GrayImage)>> {
    let mut paths = vec![];
    for p in inputs {
        if p.is_dir() {
            let entries = std::fs::read_dir(p).with_context(|| format!("reading {}", p.display()))?;
            for e in entries {
                let path = e?.path();
                if path.is_file() && is_image(&path) {
                    paths.push(path);
                }
            }
        } else {
            paths.push(p.clone());
        }
    }
    paths.sort();
    paths.dedup();
    if paths.is_empty() {
        bail!("no images found");
    }
    paths
        .par_iter()
        .map(|p| {
            let img = image::load(p).with_context(|| format!("{}", p.display()))?;
            let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            Ok((name, img))
        })
        .collect()
}

fn cmd_list() -> Result<()> {
    let mut out = String::new();
    for t in catalog::implemented() {
        let (one, two) = (t.op_count_1d(), t.op_count_2d());
        let mut fields = vec![t.name(), format!("K={}", t.prune_k())];
        for (label, v) in [
            ("mults_1d", one.mults),
            ("adds_1d", one.adds),
            ("shifts_1d", one.shifts),
            ("mults_2d", two.mults),
            ("adds_2d", two.adds),
            ("shifts_2d", two.shifts),
        ] {
            if v > 0 {
                fields.push(format!("{label}={v}"));
            }
        }
        match t.declared_1d() {
            Some(d) if d != one => fields.push(format!("fast_reference_1d={d}")),
            _ => {}
        }
        out.push_str(&fields.join("  "));
        out.push('\n');
    }
    for name in UNSPECIFIED {
        out.push_str(&format!("{name}  not implemented\n"));
    }
    print!("{out}");
    Ok(())
}

fn cmd_transform(args: &TransformArgs) -> Result<()> {
    let t = args.select.resolve()?;
    if args.dump_plan {
        let Transform::Approx { plan, .. } = &t else {
            bail!("`{}` is evaluated by direct product and has no flow-graph plan", t.name());
        };
        print!("{}", plan.dump());
        return Ok(());
    }
    let out = args.report.out();
    match &args.input {
        Some(x) => {
            if x.len() != 8 {
                bail!("--input needs 8 values, got {}", x.len());
            }
            let mut unscaled = vec![0.0; t.prune_k()];
            t.forward_1d(x, &mut Vec::new(), &mut unscaled)?;
            let exact = exact_unscaled(&t, x);
            let scaled: Vec<f64> = unscaled.iter().zip(t.scaling()).map(|(v, s)| v * s).collect();
            out.transform_output(&t, x, &unscaled, exact.as_deref(), &scaled)
        }
        None => out.transform_matrix(&t),
    }
}

/// `T·x` in exact dyadic arithmetic, for integer input to an approximation.
fn exact_unscaled(t: &Transform, x: &[f64]) -> Option<Vec<String>> {
    let Transform::Approx { plan, .. } = t else { return None };
    if !x.iter().all(|v| v.fract() == 0.0 && v.abs() < 1e15) {
        return None;
    }
    let xs: Vec<Dyadic> = x.iter().map(|&v| Dyadic::from_int(v as i64)).collect();
    plan.evaluate(&xs).ok().map(|v| v.iter().map(|d| d.to_string()).collect())
}

fn cmd_compress(args: &CompressArgs) -> Result<()> {
    let t = args.select.resolve()?;
    let img = image::load(&args.input).with_context(|| format!("{}", args.input.display()))?;
    let (rec, report) = compress_image(&img, &t, &args.codec.options())?;
    if let Some(path) = &args.out {
        image::save(path, &rec).with_context(|| format!("writing {}", path.display()))?;
    }
    let name = args.input.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    Out::new(args.format, args.no_timestamp, args.report.clone()).quality_rows(&[(Some(name), report)])
}

/// Splits `lodct-p4` into the unpruned transform and `K = 4`.
fn energy_target(select: &Select) -> Result<(Transform, usize)> {
    let t = lookup(&select.transform)?;
    let (base, k) = if t.is_pruned() {
        let k = t.prune_k();
        let stem = t.name().strip_suffix(&format!("-p{k}")).map(str::to_string).unwrap_or(t.name());
        if select.prune.is_some_and(|p| p != k) {
            return Err(dctprune::Error::AlreadyPruned(t.name()).into());
        }
        (lookup(&stem)?, k)
    } else {
        (t, select.prune.unwrap_or(dctprune::N))
    };
    if !(1..=dctprune::N).contains(&k) {
        return Err(dctprune::Error::PruneRange(k).into());
    }
    Ok((base, k))
}

fn cmd_energy(args: &EnergyArgs) -> Result<()> {
    let (t, k) = energy_target(&args.select)?;
    let corpus = load_corpus(&args.inputs)?;
    let images: Vec<GrayImage> = corpus.into_iter().map(|(_, i)| i).collect();
    let rows = DcConvention::ALL
        .iter()
        .map(|&c| Ok((c, energy_compaction(&t, k, &images, c)?)))
        .collect::<Result<Vec<_>>>()?;
    args.report.out().energy(&t, k, images.len(), &rows)
}

fn cmd_complexity(args: &ReportArgs) -> Result<()> {
    let mut rows: Vec<(String, usize, dctprune::OpCount, dctprune::OpCount)> =
        catalog::implemented().iter().map(|t| (t.name(), t.prune_k(), t.op_count_1d(), t.op_count_2d())).collect();
    rows.push((
        "chen-reference".into(),
        dctprune::N,
        CHEN_REFERENCE_1D,
        dctprune::plan::two_d(CHEN_REFERENCE_1D, dctprune::N),
    ));
    args.out().complexity(&rows)
}

fn cmd_compare(args: &CompareArgs) -> Result<()> {
    let names: Vec<String> = if args.transforms.is_empty() {
        catalog::IMPLEMENTED.iter().map(|s| s.to_string()).collect()
    } else {
        args.transforms.clone()
    };
    let transforms = names.iter().map(|n| Ok(lookup(n)?)).collect::<Result<Vec<_>>>()?;
    let corpus = load_corpus(&args.inputs)?;
    let opts = args.codec.options();
    let jobs: Vec<(&Transform, &(String, GrayImage))> =
        transforms.iter().flat_map(|t| corpus.iter().map(move |c| (t, c))).collect();
    let mut reports = jobs
        .par_iter()
        .map(|(t, (name, img))| {
            let r = compress_image(img, t, &opts).map(|(_, r)| r).with_context(|| name.clone())?;
            Ok((name.clone(), r))
        })
        .collect::<Result<Vec<(String, QualityReport)>>>()?;
    reports.sort_by(|a, b| (&a.1.transform, &a.0).cmp(&(&b.1.transform, &b.0)));
    let rows: Vec<(Option<String>, QualityReport)> = if args.per_image {
        reports.into_iter().map(|(n, r)| (Some(n), r)).collect()
    } else {
        let mut rows = vec![];
        for chunk in reports.chunk_by(|a, b| a.1.transform == b.1.transform) {
            let rs: Vec<QualityReport> = chunk.iter().map(|(_, r)| r.clone()).collect();
            rows.push((None, QualityReport::mean(&rs)?));
        }
        rows
    };
    args.report.out().quality_rows(&rows)
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::List => cmd_list(),
        Command::Transform(a) => cmd_transform(a),
        Command::Compress(a) => cmd_compress(a),
        Command::Energy(a) => cmd_energy(a),
        Command::Complexity(a) => cmd_complexity(a),
        Command::Compare(a) => cmd_compare(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("dctprune: error: {msg}");
            ExitCode::FAILURE
        }
    }
}
