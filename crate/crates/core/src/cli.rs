//! The `s2scat` command line. [`run`] returns the process exit code: 0 on
//! success, 2 for usage and file-format errors, 1 for anything else.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{exclusive_scale, Preset, RunConfig, ScalingScale};
use crate::error::{Error, Result};
use crate::harness::{
    diffeo_stability_probe, equivariance_experiment, invariance_vs_scale, power_mixing_experiment, CsvTable,
    DiffeoConfig, DiffeoKind, EquivarianceConfig, InvarianceConfig, PowerMixingConfig,
};
use crate::scattering::io::save_scat;
use crate::scattering::{enumerate_paths, scattering_network, PathPolicy, ScatteringOptions};
use crate::sht::io::{read_shc, read_ssig, save_shc, save_ssig, SHC_MAGIC, SSIG_MAGIC};
use crate::sht::{
    forward_sht, inverse_sht, make_grid, random_bandlimited, HarmonicCoefficients, Scheme, SphericalSignal,
};
use crate::wavelets::{build_filter_bank, ceil_pow, check_admissibility, KernelConfig};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "S2SCAT_OUTPUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "s2scat",
    version,
    about = "Spherical harmonic, wavelet and scattering transforms"
)]
struct Cli {
    /// Flat `key = value` config file; flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Cap on worker threads.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Default)]
struct CommonArgs {
    /// Band-limit L (degrees l < L).
    #[arg(short = 'L', long = "bandlimit", value_name = "L")]
    bandlimit: Option<usize>,
    /// Dilation factor, greater than 1.
    #[arg(long)]
    alpha: Option<f64>,
    /// Coarsest wavelet scale.
    #[arg(long, conflicts_with = "l0")]
    j0: Option<usize>,
    /// Scaling band-limit, as an alternative to --j0.
    #[arg(long)]
    l0: Option<usize>,
    /// Maximum path depth.
    #[arg(short = 'D', long, allow_negative_numbers = true)]
    depth: Option<i64>,
    /// general, descending or adjacent-descending
    #[arg(long)]
    policy: Option<PathPolicy>,
    /// Store each layer at its minimal band-limit.
    #[arg(long, num_args = 0..=1, default_missing_value = "true", value_name = "BOOL")]
    multires: Option<bool>,
    /// Modulus grid oversampling factor.
    #[arg(long)]
    oversample: Option<usize>,
    /// Random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (`sht`, `wavelet`, `scatter`) or directory (`experiment`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Small experiment preset (default).
    #[arg(long, conflicts_with = "full")]
    desk: bool,
    /// Large experiment preset.
    #[arg(long)]
    full: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Forward or inverse transform between `.ssig` and `.shc` files.
    Sht {
        /// Input `.ssig` (forward) or `.shc` (inverse) file.
        input: Option<PathBuf>,
        /// Print the relative error of inverse-then-forward (or
        /// forward-then-inverse) instead of only converting.
        #[arg(long)]
        roundtrip: bool,
        /// Write a random band-limited `.shc` (needs -L, uses --seed).
        #[arg(long, conflicts_with = "input")]
        generate: bool,
        /// Sampling scheme for inverse transforms: mw or gl.
        #[arg(long)]
        scheme: Option<Scheme>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Export a filter bank as CSV.
    Wavelet {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Scattering coefficients of one signal: a `.scat` file plus a CSV
    /// channel summary.
    Scatter {
        /// Input `.shc` or `.ssig` file.
        input: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run a harness experiment and write its CSV table.
    Experiment {
        name: ExperimentName,
        /// Number of random test signals.
        #[arg(long)]
        signals: Option<usize>,
        /// Number of random rotations per signal.
        #[arg(long)]
        rotations: Option<usize>,
        /// Fixed rotation angle for `invariance-sweep`.
        #[arg(long)]
        beta: Option<f64>,
        /// Comma-separated J0 list for `invariance-sweep`.
        #[arg(long, value_delimiter = ',')]
        j0_values: Option<Vec<usize>>,
        /// Comma-separated amplitudes for `diffeo-probe`.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        epsilons: Option<Vec<f64>>,
        /// Deformation family for `diffeo-probe`: smooth or z-rotation.
        #[arg(long)]
        field: Option<DiffeoKind>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExperimentName {
    Equivariance,
    PowerMixing,
    InvarianceSweep,
    DiffeoProbe,
}

impl CommonArgs {
    fn to_config(&self, subcommand: &str) -> Result<RunConfig> {
        Ok(RunConfig {
            subcommand: subcommand.to_string(),
            bandlimit: self.bandlimit,
            alpha: self.alpha,
            scale: exclusive_scale(self.j0, self.l0)?,
            depth: self.depth,
            policy: self.policy,
            multires: self.multires,
            oversample: self.oversample,
            seed: self.seed,
            out: self.out.clone(),
            preset: if self.full {
                Some(Preset::Full)
            } else if self.desk {
                Some(Preset::Desk)
            } else {
                None
            },
            ..Default::default()
        })
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Format(_) | Error::Usage(_) => 2,
        _ => 1,
    }
}

fn execute(cli: Cli) -> Result<()> {
    let file = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let mut flags = match &cli.command {
        Command::Sht {
            common, scheme, input, ..
        } => {
            let mut c = common.to_config("sht")?;
            c.scheme = *scheme;
            c.input = input.clone();
            c
        }
        Command::Wavelet { common } => common.to_config("wavelet")?,
        Command::Scatter { common, input } => {
            let mut c = common.to_config("scatter")?;
            c.input = Some(input.clone());
            c
        }
        Command::Experiment {
            common,
            signals,
            rotations,
            ..
        } => {
            let mut c = common.to_config("experiment")?;
            c.signals = *signals;
            c.rotations = *rotations;
            c
        }
    };
    flags.threads = cli.threads;
    let cfg = file.overridden_by(&flags);
    cfg.validate()?;
    if let Some(n) = cfg.threads {
        // a second initialisation in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match cli.command {
        Command::Sht {
            roundtrip, generate, ..
        } => cmd_sht(&cfg, roundtrip, generate),
        Command::Wavelet { .. } => cmd_wavelet(&cfg),
        Command::Scatter { .. } => cmd_scatter(&cfg),
        Command::Experiment {
            name,
            beta,
            j0_values,
            epsilons,
            field,
            ..
        } => cmd_experiment(
            &cfg,
            name,
            ExperimentExtras {
                beta,
                j0_values,
                epsilons,
                field,
            },
        ),
    }
}

fn output_dir() -> PathBuf {
    std::env::var_os(OUTPUT_DIR_ENV).map_or_else(|| PathBuf::from("."), PathBuf::from)
}

/// `--out` if given, else `<output dir>/<default_name>`.
fn output_file(cfg: &RunConfig, default_name: &str) -> PathBuf {
    cfg.out.clone().unwrap_or_else(|| output_dir().join(default_name))
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map_or("out".into(), |s| s.to_string_lossy().into_owned())
}

enum Loaded {
    Coefficients(HarmonicCoefficients),
    Signal(SphericalSignal),
}

fn load_any(path: &Path) -> Result<Loaded> {
    let bytes = std::fs::read(path)?;
    if bytes.len() < 4 {
        return Err(Error::Format(format!("{}: truncated file", path.display())));
    }
    let ctx = |e: Error| match e {
        Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
        other => other,
    };
    match &bytes[..4] {
        m if m == SHC_MAGIC => Ok(Loaded::Coefficients(read_shc(bytes.as_slice()).map_err(ctx)?)),
        m if m == SSIG_MAGIC => Ok(Loaded::Signal(read_ssig(bytes.as_slice()).map_err(ctx)?)),
        _ => Err(Error::Format(format!("{}: unrecognised magic bytes", path.display()))),
    }
}

fn relative_sample_error(a: &SphericalSignal, b: &SphericalSignal) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for (x, y) in a.samples().iter().zip(b.samples()) {
        num += (x - y).norm_sqr();
        den += x.norm_sqr();
    }
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}

fn cmd_sht(cfg: &RunConfig, roundtrip: bool, generate: bool) -> Result<()> {
    let scheme = cfg.scheme.unwrap_or(Scheme::Mw);
    if generate {
        let bl = cfg
            .bandlimit
            .ok_or_else(|| Error::Usage("--generate needs -L/--bandlimit".into()))?;
        let seed = cfg.seed.unwrap_or(0);
        let f = random_bandlimited(bl, seed, None)?;
        let out = output_file(cfg, &format!("random-L{bl}-seed{seed}.shc"));
        save_shc(&out, &f)?;
        println!("wrote {}", out.display());
        return Ok(());
    }
    let input = cfg
        .input
        .as_ref()
        .ok_or_else(|| Error::Usage("sht needs an input file or --generate".into()))?;
    match load_any(input)? {
        Loaded::Coefficients(f) => {
            let bl = cfg.bandlimit.unwrap_or(f.bandlimit());
            let grid = make_grid(bl, scheme)?;
            let signal = inverse_sht(&f, &grid)?;
            if roundtrip {
                let back = forward_sht(&signal)?.with_bandlimit(f.bandlimit());
                let norm = f.norm();
                let err = if norm == 0.0 {
                    back.norm()
                } else {
                    back.distance(&f) / norm
                };
                println!("roundtrip relative error: {err:e}");
            }
            if !roundtrip || cfg.out.is_some() {
                let out = output_file(cfg, &format!("{}.ssig", stem(input)));
                save_ssig(&out, &signal)?;
                println!("wrote {}", out.display());
            }
        }
        Loaded::Signal(s) => {
            let f = forward_sht(&s)?;
            if roundtrip {
                let back = inverse_sht(&f, s.grid())?;
                println!("roundtrip relative error: {:e}", relative_sample_error(&s, &back));
            }
            if !roundtrip || cfg.out.is_some() {
                let out = output_file(cfg, &format!("{}.shc", stem(input)));
                save_shc(&out, &f)?;
                println!("wrote {}", out.display());
            }
        }
    }
    Ok(())
}

fn echo_config(t: &mut CsvTable, cfg: &RunConfig) {
    for (k, v) in cfg.entries() {
        if k != "out" && k != "threads" {
            t.meta(&format!("config.{k}"), v);
        }
    }
}

fn cmd_wavelet(cfg: &RunConfig) -> Result<()> {
    let bl = cfg
        .bandlimit
        .ok_or_else(|| Error::Usage("wavelet needs -L/--bandlimit".into()))?;
    let bank = build_filter_bank(&cfg.kernel_config(bl)?)?;
    let mut cols = vec!["l".to_string(), "phi".to_string()];
    cols.extend(bank.scales().map(|j| format!("psi_{j}")));
    let col_refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut t = CsvTable::new("wavelet-bank", &col_refs);
    echo_config(&mut t, cfg);
    t.meta("L", bl)
        .meta("alpha", bank.alpha())
        .meta("J0", bank.j0())
        .meta("J", bank.j_max())
        .meta("L0", bank.scaling_bandlimit())
        .meta("admissibility_residual", format!("{:e}", check_admissibility(&bank)));
    for l in 0..bl {
        let mut row = vec![l.to_string(), format!("{:e}", bank.phi()[l])];
        row.extend(bank.scales().map(|j| format!("{:e}", bank.psi(j)[l])));
        t.push_row(row);
    }
    let out = output_file(cfg, &t.file_name());
    write_text(&out, &t.render())?;
    println!(
        "wrote {} (J0 = {}, J = {}, admissibility residual {:e})",
        out.display(),
        bank.j0(),
        bank.j_max(),
        check_admissibility(&bank)
    );
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

fn cmd_scatter(cfg: &RunConfig) -> Result<()> {
    let input = cfg.input.as_ref().expect("scatter input is a required argument");
    let f = match load_any(input)? {
        Loaded::Coefficients(f) => f,
        Loaded::Signal(s) => forward_sht(&s)?,
    };
    if let Some(bl) = cfg.bandlimit {
        if bl != f.bandlimit() {
            return Err(Error::InvalidConfig(format!(
                "-L {bl} differs from the input band-limit {}",
                f.bandlimit()
            )));
        }
    }
    let bank = build_filter_bank(&cfg.kernel_config(f.bandlimit())?)?;
    let depth = cfg.depth.unwrap_or(2);
    let policy = cfg.policy.unwrap_or(PathPolicy::Descending);
    let paths = enumerate_paths(bank.j0(), bank.j_max(), depth, policy)?;
    let opts = ScatteringOptions {
        multires: cfg.multires.unwrap_or(true),
        oversample: cfg.oversample.unwrap_or(1),
    };
    let s = scattering_network(&f, &paths, &bank, opts)?;

    let scat_path = output_file(cfg, &format!("{}.scat", stem(input)));
    if let Some(dir) = scat_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    save_scat(&scat_path, &s)?;

    let mut t = CsvTable::new("scatter-summary", &["path", "depth", "energy"]);
    echo_config(&mut t, cfg);
    t.meta("L", f.bandlimit())
        .meta("alpha", bank.alpha())
        .meta("J0", bank.j0())
        .meta("J", bank.j_max())
        .meta("L0", bank.scaling_bandlimit())
        .meta("D", depth)
        .meta("policy", policy)
        .meta("multires", opts.multires)
        .meta("oversample", opts.oversample)
        .meta("energy", "||S[p] f||^2");
    for (p, c) in &s.entries {
        t.push_row(vec![
            p.to_string(),
            p.depth().to_string(),
            format!("{:e}", c.norm_sqr()),
        ]);
    }
    let csv_path = scat_path.with_extension("csv");
    write_text(&csv_path, &t.render())?;
    println!(
        "wrote {} channels to {} and {}",
        s.entries.len(),
        scat_path.display(),
        csv_path.display()
    );
    Ok(())
}

struct ExperimentExtras {
    beta: Option<f64>,
    j0_values: Option<Vec<usize>>,
    epsilons: Option<Vec<f64>>,
    field: Option<DiffeoKind>,
}

fn options_from(cfg: &RunConfig, base: ScatteringOptions) -> ScatteringOptions {
    ScatteringOptions {
        multires: cfg.multires.unwrap_or(base.multires),
        oversample: cfg.oversample.unwrap_or(base.oversample),
    }
}

fn j0_from(cfg: &RunConfig, bandlimit: usize, alpha: f64, default: usize) -> Result<usize> {
    Ok(match cfg.scale {
        Some(ScalingScale::J0(j)) => j,
        Some(ScalingScale::L0(l0)) => KernelConfig::from_scaling_bandlimit(bandlimit, alpha, l0)?.j0,
        None => default,
    })
}

fn check_ordered(rows: impl Iterator<Item = (String, f64, f64, f64)>, failures: &mut Vec<String>) {
    for (label, min, med, max) in rows {
        if !(min >= 0.0 && min <= med && med <= max) {
            failures.push(format!(
                "{label}: expected 0 <= min <= median <= max, got {min:e} / {med:e} / {max:e}"
            ));
        }
    }
}

fn cmd_experiment(cfg: &RunConfig, name: ExperimentName, extra: ExperimentExtras) -> Result<()> {
    let full = cfg.preset == Some(Preset::Full);
    let seed = cfg.seed;
    let mut failures = Vec::new();
    let mut summary = String::new();
    let table = match name {
        ExperimentName::Equivariance => {
            let base = if full {
                EquivarianceConfig::full()
            } else {
                EquivarianceConfig::desk()
            };
            let bandlimit = cfg.bandlimit.unwrap_or(base.bandlimit);
            let alpha = cfg.alpha.unwrap_or(base.alpha);
            let l0 = match cfg.scale {
                Some(ScalingScale::L0(l)) => l,
                Some(ScalingScale::J0(j)) => ceil_pow(alpha, j).min(bandlimit),
                None => base.l0,
            };
            let c = EquivarianceConfig {
                bandlimit,
                alpha,
                l0,
                depth: cfg.depth.map_or(base.depth, |d| d as usize),
                policy: cfg.policy.unwrap_or(base.policy),
                n_signals: cfg.signals.unwrap_or(base.n_signals),
                n_rotations: cfg.rotations.unwrap_or(base.n_rotations),
                signal_seed: seed.unwrap_or(base.signal_seed),
                rotation_seed: seed.map_or(base.rotation_seed, |s| s + 1_000_000),
                options: options_from(cfg, base.options),
            };
            let r = equivariance_experiment(&c)?;
            check_ordered(
                r.rows
                    .iter()
                    .map(|row| (format!("depth {}", row.depth), row.min, row.median, row.max)),
                &mut failures,
            );
            for row in &r.rows {
                let _ = writeln!(
                    summary,
                    "depth {}: median error {:.4e} (min {:.4e}, max {:.4e}), median energy {:.4e}, excluded {}",
                    row.depth, row.median, row.min, row.max, row.median_energy, row.excluded
                );
            }
            r.to_csv()
        }
        ExperimentName::PowerMixing => {
            let base = if full {
                PowerMixingConfig::full()
            } else {
                PowerMixingConfig::desk()
            };
            let bandlimit = cfg.bandlimit.unwrap_or(base.bandlimit);
            let alpha = cfg.alpha.unwrap_or(base.alpha);
            let c = PowerMixingConfig {
                bandlimit,
                alpha,
                j0: j0_from(cfg, bandlimit, alpha, base.j0)?,
                n_signals: cfg.signals.unwrap_or(base.n_signals),
                seed: seed.unwrap_or(base.seed),
                oversample: cfg.oversample.unwrap_or(base.oversample),
            };
            let r = power_mixing_experiment(&c)?;
            for &j in &r.scales {
                let leak = r.leakage_before(j).unwrap_or(f64::NAN);
                let low = r.low_degree_energy_after(j).unwrap_or(f64::NAN);
                let (cb, ca) = r.centroids(j).unwrap_or((f64::NAN, f64::NAN));
                let _ = writeln!(
                    summary,
                    "j = {j}: leakage before {leak:.3e}, low-degree energy after {low:.3e}, centroid {cb:.2} -> {ca:.2}"
                );
                if leak.is_nan() || leak > 1e-10 {
                    failures.push(format!("j = {j}: power outside the wavelet support {leak:e}"));
                }
                if low.is_nan() || low <= 0.0 {
                    failures.push(format!("j = {j}: no low-degree power after the modulus"));
                }
                if ca.is_nan() || cb.is_nan() || ca >= cb {
                    failures.push(format!("j = {j}: centroid did not decrease ({cb} -> {ca})"));
                }
            }
            r.to_csv()
        }
        ExperimentName::InvarianceSweep => {
            let base = if full {
                InvarianceConfig::full()
            } else {
                InvarianceConfig::desk()
            };
            let j0_values = match (&extra.j0_values, cfg.scale) {
                (Some(v), _) => v.clone(),
                (None, Some(ScalingScale::J0(j))) => vec![j],
                (None, Some(ScalingScale::L0(_))) => {
                    return Err(Error::Usage(
                        "invariance-sweep takes --j0 or --j0-values, not --l0".into(),
                    ))
                }
                (None, None) => base.j0_values.clone(),
            };
            let c = InvarianceConfig {
                bandlimit: cfg.bandlimit.unwrap_or(base.bandlimit),
                alpha: cfg.alpha.unwrap_or(base.alpha),
                j0_values,
                depth: cfg.depth.map_or(base.depth, |d| d as usize),
                policy: cfg.policy.unwrap_or(base.policy),
                n_signals: cfg.signals.unwrap_or(base.n_signals),
                n_rotations: cfg.rotations.unwrap_or(base.n_rotations),
                signal_seed: seed.unwrap_or(base.signal_seed),
                rotation_seed: seed.map_or(base.rotation_seed, |s| s + 1_000_000),
                beta: extra.beta.or(base.beta),
                options: options_from(cfg, base.options),
            };
            let r = invariance_vs_scale(&c)?;
            check_ordered(
                r.rows
                    .iter()
                    .map(|row| (format!("J0 = {}", row.j0), row.min, row.median, row.max)),
                &mut failures,
            );
            for row in &r.rows {
                let _ = writeln!(
                    summary,
                    "J0 = {} (L0 = {}): median error {:.4e}",
                    row.j0, row.l0, row.median
                );
            }
            r.to_csv()
        }
        ExperimentName::DiffeoProbe => {
            let base = if full {
                DiffeoConfig::full()
            } else {
                DiffeoConfig::desk()
            };
            let bandlimit = cfg.bandlimit.unwrap_or(base.bandlimit);
            let alpha = cfg.alpha.unwrap_or(base.alpha);
            let c = DiffeoConfig {
                bandlimit,
                alpha,
                j0: j0_from(cfg, bandlimit, alpha, base.j0)?,
                depth: cfg.depth.map_or(base.depth, |d| d as usize),
                policy: cfg.policy.unwrap_or(base.policy),
                kind: extra.field.unwrap_or(base.kind),
                epsilons: extra.epsilons.clone().unwrap_or(base.epsilons.clone()),
                n_signals: cfg.signals.unwrap_or(base.n_signals),
                seed: seed.unwrap_or(base.seed),
                options: options_from(cfg, base.options),
            };
            let r = diffeo_stability_probe(&c)?;
            check_ordered(
                r.rows
                    .iter()
                    .map(|row| (format!("eps = {}", row.epsilon), row.min, row.median, row.max)),
                &mut failures,
            );
            for row in &r.rows {
                let _ = writeln!(
                    summary,
                    "eps = {}: |zeta|_inf = {:.4e}, median distance {:.4e}",
                    row.epsilon, row.norm_inf, row.median
                );
            }
            r.to_csv()
        }
    };
    let dir = cfg.out.clone().unwrap_or_else(output_dir);
    let path = table.write_into(&dir)?;
    print!("{summary}");
    println!("wrote {}", path.display());
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Error::Validation(failures.join("; ")))
    }
}
