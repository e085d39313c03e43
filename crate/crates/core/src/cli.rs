//! Command-line front end. Machine-readable output goes to stdout; human
//! tables go to stderr under `--verbose`.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use kwgmo::data::{self, Dataset, LoadOptions};
use kwgmo::estimation::{fit_mle, FitOptions, FitResult, ModelSpec};
use kwgmo::par::{self, Execution};
use kwgmo::KwGMODistribution;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_NOT_CONVERGED: u8 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "kwgmo",
    version,
    about = "Fit and evaluate KwGMO-G lifetime models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Maximum-likelihood fit; prints a JSON report.
    Fit(FitArgs),
    /// Evaluate a function of a fully specified model at points.
    Eval(EvalArgs),
    /// Draw a seeded sample.
    Sample(SampleArgs),
    /// Write density/histogram and cdf/ecdf CSV files.
    Plotdata(PlotArgs),
    /// Fit several models and rank them by AIC, then BIC.
    Compare(CompareArgs),
}

#[derive(Args, Debug)]
struct DataArgs {
    /// `builtin:<id>` or a path to a text/CSV file.
    #[arg(long)]
    data: String,
    /// Zero-based column for delimited files.
    #[arg(long, default_value_t = 0)]
    column: usize,
}

impl DataArgs {
    fn load(&self) -> Result<Dataset> {
        let opts = LoadOptions {
            column: self.column,
            delimiter: None,
        };
        data::resolve(&self.data, &opts).with_context(|| format!("loading `{}`", self.data))
    }
}

#[derive(Args, Debug)]
struct FitArgs {
    #[arg(long)]
    model: String,
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    starts: usize,
    /// Confidence level of the Wald intervals.
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    /// Explicit starting values (free parameters, comma separated).
    #[arg(long, value_delimiter = ',')]
    init: Option<Vec<f64>>,
    #[arg(long)]
    verbose: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Function {
    Pdf,
    Cdf,
    Sf,
    Hrf,
    Rhrf,
    Chrf,
    Quantile,
}

#[derive(Args, Debug)]
struct ModelArgs {
    #[arg(long)]
    model: String,
    /// Free parameters in layout order (θ, α, a, b, baseline…), comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    params: Vec<f64>,
}

impl ModelArgs {
    fn build(&self) -> Result<KwGMODistribution> {
        let spec = ModelSpec::parse(&self.model)?;
        if self.params.is_empty() {
            bail!(
                "--params is required: {} takes ({})",
                spec.id(),
                spec.param_names().join(", ")
            );
        }
        Ok(spec.distribution(&self.params)?)
    }
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, value_enum)]
    function: Function,
    /// Evaluation points (probabilities for `quantile`).
    #[arg(
        long,
        value_delimiter = ',',
        required = true,
        allow_negative_numbers = true
    )]
    at: Vec<f64>,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct PlotArgs {
    /// Model id; may be omitted when `--report` is given.
    #[arg(long)]
    model: Option<String>,
    #[arg(long, value_delimiter = ',')]
    params: Vec<f64>,
    /// A JSON report written by `fit`.
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    data: DataArgs,
    /// Histogram bins (default: ceil(sqrt(n))).
    #[arg(long)]
    bins: Option<usize>,
    /// Number of density grid points.
    #[arg(long, default_value_t = 200)]
    grid: usize,
    #[arg(long)]
    out_prefix: String,
}

#[derive(Args, Debug)]
struct CompareArgs {
    /// Repeat once per model.
    #[arg(long = "model")]
    models: Vec<String>,
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    starts: usize,
    #[arg(long)]
    verbose: bool,
}

pub fn run<I, T>(args: I) -> Result<u8>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return Ok(code);
        }
    };
    match cli.command {
        Command::Fit(a) => cmd_fit(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Sample(a) => cmd_sample(a),
        Command::Plotdata(a) => cmd_plotdata(a),
        Command::Compare(a) => cmd_compare(a),
    }
}

/// `x` to 12 significant digits, fixed notation where readable.
fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..12).contains(&mag) {
        format!("{:.*}", (11 - mag) as usize, x)
    } else {
        format!("{x:.11e}")
    }
}

fn print_fit_table(fit: &FitResult) {
    eprintln!("model {}  n = {}  k = {}", fit.model, fit.n, fit.k);
    eprintln!(
        "{:>10} {:>14} {:>12} {:>26}",
        "param", "estimate", "se", "ci"
    );
    for ((name, est), (se, ci)) in fit
        .estimates
        .0
        .iter()
        .zip(fit.se.values().zip(fit.ci.values()))
    {
        eprintln!(
            "{name:>10} {est:>14.6} {se:>12.6} ({:>11.5}, {:>11.5})",
            ci[0], ci[1]
        );
    }
    eprintln!(
        "loglik {:.4}  aic {:.4}  bic {:.4}  caic {:.4}  hqic {:.4}  converged {}",
        fit.loglik, fit.aic, fit.bic, fit.caic, fit.hqic, fit.converged
    );
}

fn cmd_fit(a: FitArgs) -> Result<u8> {
    let spec = ModelSpec::parse(&a.model)?;
    let data = a.data.load()?;
    let opts = FitOptions {
        starts: a.starts,
        seed: a.seed,
        level: a.level,
        initial: a.init,
        ..FitOptions::default()
    };
    let fit = fit_mle(&spec, &data.values, &opts)?;
    println!("{}", serde_json::to_string_pretty(&fit)?);
    if a.verbose {
        print_fit_table(&fit);
    }
    Ok(if fit.converged {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    })
}

fn cmd_eval(a: EvalArgs) -> Result<u8> {
    let dist = a.model.build()?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for &t in &a.at {
        let v = match a.function {
            Function::Pdf => dist.pdf(t),
            Function::Cdf => dist.cdf(t),
            Function::Sf => dist.sf(t),
            Function::Hrf => dist.hrf(t),
            Function::Rhrf => dist.rhrf(t),
            Function::Chrf => dist.chrf(t),
            Function::Quantile => dist.quantile(t)?,
        };
        writeln!(out, "{t}\t{}", sig12(v))?;
    }
    Ok(EXIT_OK)
}

fn cmd_sample(a: SampleArgs) -> Result<u8> {
    if a.n == 0 {
        bail!("--n must be at least 1");
    }
    let dist = a.model.build()?;
    let xs = dist.sample(a.n, a.seed)?;
    let mut buf = String::with_capacity(xs.len() * 20);
    for x in xs {
        buf.push_str(&x.to_string());
        buf.push('\n');
    }
    io::stdout().lock().write_all(buf.as_bytes())?;
    Ok(EXIT_OK)
}

fn plot_model(a: &PlotArgs) -> Result<KwGMODistribution> {
    if let Some(path) = &a.report {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let fit: FitResult = serde_json::from_str(&text)
            .with_context(|| format!("parsing report {}", path.display()))?;
        let spec = fit.spec()?;
        return Ok(spec.distribution(&fit.estimate_values())?);
    }
    let Some(model) = &a.model else {
        bail!("either --report or --model with --params is required");
    };
    ModelArgs {
        model: model.clone(),
        params: a.params.clone(),
    }
    .build()
}

fn cmd_plotdata(a: PlotArgs) -> Result<u8> {
    let dist = plot_model(&a)?;
    let data = a.data.load()?;
    let mut xs = data.values.clone();
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    let (lo, hi) = (xs[0], xs[n - 1]);
    let bins = a.bins.unwrap_or((n as f64).sqrt().ceil() as usize);
    if bins == 0 || a.grid < 2 {
        bail!("--bins must be positive and --grid at least 2");
    }

    // histogram over [min, max], normalized so the bars integrate to 1
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in &xs {
        let idx = if width > 0.0 {
            (((x - lo) / width) as usize).min(bins - 1)
        } else {
            0
        };
        counts[idx] += 1;
    }
    let height = |t: f64| -> f64 {
        if width <= 0.0 || t < lo || t > hi {
            return 0.0;
        }
        let idx = (((t - lo) / width) as usize).min(bins - 1);
        counts[idx] as f64 / (n as f64 * width)
    };

    // grid from the support's lower end to past both the data and the bulk
    let start = dist.baseline().support().lower;
    let end = hi.max(dist.quantile(0.9999)?);
    let mut density = String::from("t,density_fitted,hist_density\n");
    for i in 0..a.grid {
        let t = start + (end - start) * i as f64 / (a.grid - 1) as f64;
        density.push_str(&format!("{t},{},{}\n", dist.pdf(t), height(t)));
    }
    let mut cdf = String::from("t,cdf_fitted,ecdf\n");
    for (i, &t) in xs.iter().enumerate() {
        cdf.push_str(&format!(
            "{t},{},{}\n",
            dist.cdf(t),
            (i + 1) as f64 / n as f64
        ));
    }
    let pa = format!("{}_density.csv", a.out_prefix);
    let pb = format!("{}_cdf.csv", a.out_prefix);
    fs::write(&pa, density).with_context(|| format!("writing {pa}"))?;
    fs::write(&pb, cdf).with_context(|| format!("writing {pb}"))?;
    Ok(EXIT_OK)
}

fn cmd_compare(a: CompareArgs) -> Result<u8> {
    if a.models.len() < 2 {
        bail!("compare needs at least two --model arguments");
    }
    let specs = a
        .models
        .iter()
        .map(|m| ModelSpec::parse(m))
        .collect::<kwgmo::Result<Vec<_>>>()?;
    let data = a.data.load()?;
    let opts = FitOptions {
        starts: a.starts,
        seed: a.seed,
        exec: Execution::Sequential,
        ..FitOptions::default()
    };
    let results = par::map_slice(Execution::Parallel, &specs, |s| {
        fit_mle(s, &data.values, &opts)
    });
    let mut ok: Vec<&FitResult> = Vec::new();
    let mut failed = Vec::new();
    for (spec, r) in specs.iter().zip(&results) {
        match r {
            Ok(fit) => ok.push(fit),
            Err(e) => failed.push((spec.id(), e.to_string())),
        }
    }
    ok.sort_by(|x, y| x.aic.total_cmp(&y.aic).then(x.bic.total_cmp(&y.bic)));
    let mut out = String::from("rank\tmodel\tk\tloglik\taic\tbic\tcaic\thqic\tconverged\n");
    for (i, f) in ok.iter().enumerate() {
        out.push_str(&format!(
            "{}\t{}\t{}\t{:.4}\t{:.4}\t{:.4}\t{:.4}\t{:.4}\t{}\n",
            i + 1,
            f.model,
            f.k,
            f.loglik,
            f.aic,
            f.bic,
            f.caic,
            f.hqic,
            f.converged
        ));
    }
    for (model, err) in &failed {
        out.push_str(&format!("-\t{model}\tfailed: {err}\n"));
    }
    print!("{out}");
    if a.verbose {
        for f in &ok {
            print_fit_table(f);
        }
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::sig12;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12((-1.0f64).exp()), "0.367879441171");
        assert_eq!(sig12(std::f64::consts::LN_2), "0.693147180560");
        assert_eq!(sig12(1.0), "1.00000000000");
        assert_eq!(sig12(1.5e-7), "1.50000000000e-7");
    }
}
