use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use stftpr_core::acceptance::{run_all, DEFAULT_SEED};
use stftpr_core::adversary::{delta_pair, periodic_family, real_even_pair, small_d_witness, CounterexampleBundle, DeltaMode};
use stftpr_core::io;
use stftpr_core::recovery::{
    canonicalize_measurement, decide_retrievability, hole_classifier, measurement_coeffs, recover_auto,
    recover_center_from_measurement, recover_dc_from_measurement, recover_full, recover_generic_short, recover_with_hole,
    HoleKind, RecoveryOutcome, RecoveryStatus, Tolerances,
};
use stftpr_core::sampling::{random_real_signal, random_short_window, rng_for};
use stftpr_core::spectral::{measure, stft};
use stftpr_core::window::{
    analyze_window, construct_power_window, construct_punctured_center_window, construct_punctured_dc_window,
    force_ambiguity_zero, Threshold,
};
use stftpr_core::{CyclicSignal, Error as CoreError, SpectrogramMeasurement};

const EXIT_PER_COMPONENT: u8 = 2;
const EXIT_INCONSISTENT: u8 = 3;
const EXIT_UNDECIDABLE: u8 = 4;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;

/// Phase retrieval from STFT magnitudes on Z_d.
#[derive(Parser, Debug)]
#[command(name = "stftpr", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Seed for randomized commands.
    #[arg(long, global = true, env = "STFTPR_SEED")]
    seed: Option<u64>,
    /// Relative threshold for ambiguity zeros.
    #[arg(long, global = true, default_value_t = 1e-13)]
    tau_rel: f64,
    /// Support threshold relative to the largest |f_j|².
    #[arg(long, global = true, default_value_t = 1e-10)]
    tau_supp: f64,
    /// Largest accepted phase mismatch in radians.
    #[arg(long, global = true, default_value_t = 1e-6)]
    phase_tol: f64,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Squared STFT magnitudes of a signal under a window.
    Measure {
        /// Signal, as CSV (`.csv`) or JSON.
        #[arg(long)]
        signal: PathBuf,
        /// Window signal, as CSV (`.csv`) or JSON.
        #[arg(long)]
        window: PathBuf,
        /// Write the complex STFT instead of its squared magnitudes.
        #[arg(long)]
        complex: bool,
    },
    /// Window classification and construction.
    Window {
        #[command(subcommand)]
        action: WindowAction,
    },
    /// Reconstruct a signal from a measurement.
    Recover {
        /// Squared magnitudes, as CSV (`.csv`) or JSON.
        #[arg(long)]
        measurement: PathBuf,
        /// Window signal, as CSV (`.csv`) or JSON.
        #[arg(long)]
        window: PathBuf,
        /// Recovery route; auto picks the first one the window supports.
        #[arg(long, value_enum, default_value_t = Mode::Auto)]
        mode: Mode,
        /// Anchor index for hole mode (the start of the zero run, or the entry before it).
        #[arg(long)]
        anchor: Option<usize>,
        /// Hole length class for hole mode.
        #[arg(long, value_enum, default_value_t = HoleArg::Short)]
        hole: HoleArg,
    },
    /// Decide whether the measured signal is determined up to a global phase.
    Decide {
        /// Squared magnitudes, as CSV (`.csv`) or JSON.
        #[arg(long)]
        measurement: PathBuf,
        /// Window signal, as CSV (`.csv`) or JSON.
        #[arg(long)]
        window: PathBuf,
    },
    /// Generate a self-checked family of indistinguishable signals.
    Counterexample {
        #[command(subcommand)]
        family: Family,
    },
    /// Run the acceptance suite and print one line per criterion.
    Selftest {
        /// Comma-separated criterion numbers (all when absent).
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<usize>,
    },
}

#[derive(Subcommand, Debug)]
enum WindowAction {
    Analyze {
        /// Window signal, as CSV (`.csv`) or JSON.
        #[arg(long)]
        window: PathBuf,
    },
    Construct {
        #[arg(long, value_enum)]
        kind: WindowKind,
        #[arg(long)]
        d: usize,
        #[arg(long = "L")]
        l: Option<usize>,
        /// Shift of the forced zero (force-zero kind).
        #[arg(long)]
        k: Option<usize>,
        /// Frequency of the forced zero (force-zero kind).
        #[arg(long)]
        freq: Option<usize>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum WindowKind {
    Power,
    PuncturedCenter,
    PuncturedDc,
    RandomShort,
    ForceZero,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Auto,
    Full,
    Generic,
    Hole,
    Center,
    Dcpair,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum HoleArg {
    Full,
    Short,
}

#[derive(Subcommand, Debug)]
enum Family {
    Periodic {
        #[arg(long)]
        d: usize,
        #[arg(long = "L")]
        l: usize,
        #[arg(long)]
        r: usize,
    },
    Delta {
        #[arg(long)]
        k: i64,
        /// Window file; a box window on 0..=L is used when absent.
        #[arg(long)]
        window: Option<PathBuf>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long = "L")]
        l: Option<usize>,
    },
    RealEven {
        #[arg(long)]
        d: usize,
        /// Real window file; a seeded random real window is used when absent.
        #[arg(long)]
        window: Option<PathBuf>,
    },
    SmallD {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
    },
}

/// Unreadable or malformed input data.
#[derive(Debug)]
struct InputError(String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

/// Missing or contradictory arguments detected after parsing.
#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn read_input(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| InputError(format!("cannot read {}: {e}", path.display())).into())
}

fn input<T>(path: &Path, parsed: stftpr_core::Result<T>) -> Result<T> {
    parsed.map_err(|e| InputError(format!("{}: {e}", path.display())).into())
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn load_signal(path: &Path) -> Result<CyclicSignal> {
    let text = read_input(path)?;
    input(path, if is_csv(path) { io::parse_signal_csv(&text) } else { io::parse_signal_json(&text) })
}

fn load_measurement(path: &Path) -> Result<SpectrogramMeasurement> {
    let text = read_input(path)?;
    input(path, if is_csv(path) { io::parse_measurement_csv(&text) } else { io::parse_measurement_json(&text) })
}

fn require_seed(common: &Common, what: &str) -> Result<u64> {
    common.seed.ok_or_else(|| usage(format!("{what} is randomized: pass --seed or set STFTPR_SEED")))
}

impl Common {
    fn tolerances(&self) -> Result<Tolerances> {
        for (name, v) in [("--tau-rel", self.tau_rel), ("--tau-supp", self.tau_supp), ("--phase-tol", self.phase_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(usage(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Tolerances { tau_supp: self.tau_supp, phase_tol: self.phase_tol, ..Tolerances::default() })
    }

    fn threshold(&self) -> Threshold {
        Threshold::row_scale(self.tau_rel)
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn emit_json(&self, v: &Value) -> Result<()> {
        self.emit(&(serde_json::to_string_pretty(v)? + "\n"))
    }
}

fn status_code(status: RecoveryStatus) -> u8 {
    match status {
        RecoveryStatus::UniqueUpToGlobalPhase => 0,
        RecoveryStatus::UniquePerComponent => EXIT_PER_COMPONENT,
        RecoveryStatus::Inconsistent => EXIT_INCONSISTENT,
        RecoveryStatus::Undecidable => EXIT_UNDECIDABLE,
    }
}

fn cmd_measure(common: &Common, signal: &Path, window: &Path, complex: bool) -> Result<u8> {
    let (f, g) = (load_signal(signal)?, load_signal(window)?);
    if f.dim() != g.dim() {
        return Err(InputError(format!("signal has d={} but window has d={}", f.dim(), g.dim())).into());
    }
    if complex {
        let table = stft(&f, &g)?;
        match common.format {
            Format::Csv => common.emit(&io::table_to_csv(&table))?,
            Format::Json => {
                let rows: Vec<Vec<String>> =
                    (0..table.dim()).map(|k| table.row(k).iter().map(|&z| io::format_complex(z)).collect()).collect();
                common.emit_json(&json!({"d": table.dim(), "rows": rows}))?
            }
        }
    } else {
        let x = measure(&f, &g)?;
        let csv_out = common.format == Format::Csv || common.out.as_deref().is_some_and(is_csv);
        if csv_out {
            common.emit(&io::measurement_to_csv(&x))?;
        } else {
            common.emit_json(&io::measurement_to_json(&x))?;
        }
    }
    Ok(0)
}

fn cmd_window(common: &Common, action: &WindowAction) -> Result<u8> {
    let g = match action {
        WindowAction::Analyze { window } => load_signal(window)?,
        WindowAction::Construct { kind, d, l, k, freq } => {
            let need_l = || l.ok_or_else(|| usage("this window kind needs --L"));
            match kind {
                WindowKind::Power => construct_power_window(*d, need_l()?)?,
                WindowKind::PuncturedCenter => construct_punctured_center_window(*d)?,
                WindowKind::PuncturedDc => construct_punctured_dc_window(*d, require_seed(common, "punctured-dc")?)?,
                WindowKind::RandomShort => {
                    let l = need_l()?;
                    if 2 * l >= *d {
                        return Err(usage(format!("need L < d/2, got L={l}, d={d}")));
                    }
                    random_short_window(&mut rng_for(require_seed(common, "random-short")?, 0), *d, l)
                }
                WindowKind::ForceZero => {
                    let l = need_l()?;
                    if 2 * l >= *d {
                        return Err(usage(format!("need L < d/2, got L={l}, d={d}")));
                    }
                    let (k, freq) = (k.ok_or_else(|| usage("force-zero needs --k"))?, freq.ok_or_else(|| usage("force-zero needs --freq"))?);
                    let base = random_short_window(&mut rng_for(require_seed(common, "force-zero")?, 0), *d, l);
                    force_ambiguity_zero(&base, l, k, freq)?
                }
            }
        }
    };
    let report = analyze_window(&g, common.threshold())?;
    if common.format == Format::Csv {
        common.emit(&io::signal_to_csv(&report.window))?;
    } else {
        common.emit_json(&io::window_report_to_json(&report))?;
    }
    Ok(0)
}

fn recover_hole(x: &SpectrogramMeasurement, g: &CyclicSignal, common: &Common, anchor: Option<usize>, hole: HoleArg) -> Result<RecoveryOutcome> {
    let tol = common.tolerances()?;
    let report = analyze_window(g, common.threshold())?;
    let l = match report.short_l {
        Some(l) if report.is_short_block() => l,
        _ => bail!("hole mode needs a window supported on L + 1 consecutive indices"),
    };
    let xc = canonicalize_measurement(x, report.canonical_shift);
    let gc = report.canonical_window();
    let kind = match hole {
        HoleArg::Full => HoleKind::Full,
        HoleArg::Short => HoleKind::Short,
    };
    let anchor = match (anchor, kind) {
        (Some(a), _) => a,
        (None, HoleKind::Short) => *hole_classifier(&measurement_coeffs(&xc, l)?, &tol)
            .first()
            .ok_or_else(|| anyhow!("no anchor satisfies the L-hole condition"))?,
        (None, HoleKind::Full) => return Err(usage("--hole full needs --anchor")),
    };
    let mut out = recover_with_hole(&xc, &gc, l, (anchor + report.canonical_shift) % x.dim(), kind, &tol)?;
    if report.canonical_shift != 0 {
        out.notes.push(format!("window moved by -{} before solving", report.canonical_shift));
    }
    Ok(out)
}

fn cmd_recover(common: &Common, measurement: &Path, window: &Path, mode: Mode, anchor: Option<usize>, hole: HoleArg) -> Result<u8> {
    let x = load_measurement(measurement)?;
    let g = load_signal(window)?;
    if x.dim() != g.dim() {
        return Err(InputError(format!("measurement has d={} but window has d={}", x.dim(), g.dim())).into());
    }
    let tol = common.tolerances()?;
    let out = match mode {
        Mode::Auto => recover_auto(&x, &g, &tol)?,
        Mode::Full => recover_full(&x, &g, &tol)?,
        Mode::Generic => {
            let report = analyze_window(&g, common.threshold())?;
            let l = report.short_l.ok_or_else(|| anyhow!("window is not short"))?;
            recover_generic_short(&x, &g, l, &tol)?
        }
        Mode::Hole => recover_hole(&x, &g, common, anchor, hole)?,
        Mode::Center => recover_center_from_measurement(&x, &g, &tol)?,
        Mode::Dcpair => recover_dc_from_measurement(&x, &g, &tol)?,
    };
    if common.format == Format::Csv {
        match &out.estimate {
            Some(f) => common.emit(&io::signal_to_csv(f))?,
            None => common.emit("")?,
        }
    } else {
        common.emit_json(&io::outcome_to_json(&out, &tol, &Threshold::default()))?;
    }
    Ok(status_code(out.status))
}

fn cmd_decide(common: &Common, measurement: &Path, window: &Path) -> Result<u8> {
    let x = load_measurement(measurement)?;
    let g = load_signal(window)?;
    if x.dim() != g.dim() {
        return Err(InputError(format!("measurement has d={} but window has d={}", x.dim(), g.dim())).into());
    }
    let tol = common.tolerances()?;
    let threshold = common.threshold();
    let report = analyze_window(&g, threshold)?;
    let decision = decide_retrievability(&x, &report, &tol)?;
    common.emit_json(&io::decision_to_json(&decision, &tol, &threshold))?;
    Ok(match decision.verdict {
        stftpr_core::recovery::Verdict::Retrievable => 0,
        stftpr_core::recovery::Verdict::NotRetrievable { .. } => EXIT_PER_COMPONENT,
        stftpr_core::recovery::Verdict::Undecidable { .. } => EXIT_UNDECIDABLE,
    })
}

fn cmd_counterexample(common: &Common, family: &Family) -> Result<u8> {
    let bundle: CounterexampleBundle = match family {
        Family::Periodic { d, l, r } => periodic_family(*d, *l, *r)?,
        Family::Delta { k, window, d, l } => {
            let g = match (window, d) {
                (Some(path), _) => load_signal(path)?,
                (None, Some(d)) => {
                    let l = l.unwrap_or(1);
                    CyclicSignal::from_real(&(0..*d).map(|j| if j <= l { 1.0 } else { 0.0 }).collect::<Vec<_>>())?
                }
                (None, None) => return Err(usage("delta needs --window or --d")),
            };
            delta_pair(*k, DeltaMode::Cyclic(&g))?
        }
        Family::RealEven { d, window } => {
            let g = match window {
                Some(path) => load_signal(path)?,
                None => random_real_signal(&mut rng_for(require_seed(common, "real-even")?, 0), *d),
            };
            real_even_pair(*d, &g)?
        }
        Family::SmallD { d, k, l } => small_d_witness(*d, (*k, *l), require_seed(common, "small-d")?)?,
    };
    common.emit_json(&io::bundle_to_json(&bundle))?;
    eprintln!("self-check {}", if bundle.is_valid() { "PASS" } else { "FAIL" });
    Ok(0)
}

fn cmd_selftest(common: &Common, criteria: &[usize]) -> Result<u8> {
    let ids: BTreeSet<usize> = if criteria.is_empty() { (1..=10).collect() } else { criteria.iter().copied().collect() };
    if let Some(bad) = ids.iter().find(|&&i| !(1..=10).contains(&i)) {
        return Err(usage(format!("no criterion {bad}")));
    }
    let seed = common.seed.unwrap_or(DEFAULT_SEED);
    let reports = run_all(seed, &ids)?;
    let mut text = format!("seed {seed}\n");
    for r in &reports {
        text.push_str(&r.line());
        text.push('\n');
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    text.push_str(&format!("{} of {} criteria passed\n", reports.len() - failed, reports.len()));
    common.emit(&text)?;
    Ok(if failed == 0 { 0 } else { 1 })
}

fn run(cli: &Cli) -> Result<u8> {
    let common = &cli.common;
    common.tolerances()?;
    match &cli.command {
        Command::Measure { signal, window, complex } => cmd_measure(common, signal, window, *complex),
        Command::Window { action } => cmd_window(common, action),
        Command::Recover { measurement, window, mode, anchor, hole } => {
            cmd_recover(common, measurement, window, *mode, *anchor, *hole)
        }
        Command::Decide { measurement, window } => cmd_decide(common, measurement, window),
        Command::Counterexample { family } => cmd_counterexample(common, family),
        Command::Selftest { criteria } => cmd_selftest(common, criteria),
    }
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    if err.is::<UsageError>() {
        EXIT_USAGE
    } else if err.is::<InputError>() {
        EXIT_DATA
    } else {
        match err.downcast_ref::<CoreError>() {
            Some(CoreError::Format(_) | CoreError::NegativeMeasurement { .. }) => EXIT_DATA,
            Some(CoreError::InvalidParameter(_)) => EXIT_USAGE,
            _ => 1,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
