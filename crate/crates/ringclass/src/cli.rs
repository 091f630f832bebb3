//! Argument parsing, configuration merging and dispatch.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write as _;
use std::path::PathBuf;

use clap::parser::ValueSource;
use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};

use crate::commands;
use crate::config::ConfigFile;
use crate::error::{CliError, Result};
use crate::output::{Output, Provenance};

#[derive(Parser, Debug)]
#[command(name = "ringclass", version, about = "Central values of Rankin-Selberg L-functions over ring class characters")]
pub struct Cli {
    /// Worker threads; results do not depend on the count.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// `key = value` file; flags given on the command line take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Ring class group of the order of conductor c and its characters.
    Classgroup(OrderArgs),
    /// Central values for every character (or one) of Pic(O_c).
    Central(CentralArgs),
    /// The average over Pic(O_c) by character sums and by partial summation.
    Average(AverageArgs),
    /// Shifted convolution sums on a (Y, q) grid with decay fits.
    Shifted(ShiftedArgs),
    /// Small-y exponent of a normalized Whittaker function.
    Whittaker(WhittakerArgs),
    /// Quick invariant checks.
    Selftest,
}

#[derive(Args, Debug, Clone)]
pub struct OrderArgs {
    /// Fundamental discriminant D_K < 0.
    #[arg(long, allow_hyphen_values = true)]
    pub disc: i64,
    #[arg(long, default_value_t = 1)]
    pub conductor: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Rule {
    Basechange,
    Supplied,
}

#[derive(Args, Debug, Clone)]
pub struct SetupArgs {
    /// `delta`, `11a`, `curve:a1,a2,a3,a4,a6[@level]`, `curve:a4,a6[@level]`
    /// or `file:<path>`; repeat for tensor products.
    #[arg(long = "form", default_value = "delta")]
    pub forms: Vec<String>,
    #[command(flatten)]
    pub order: OrderArgs,
    /// Prime bound of the eigenvalue tables; defaults to what the sums need.
    #[arg(long)]
    pub pmax: Option<u64>,
    /// c(Π_K); defaults to f(Π)².
    #[arg(long)]
    pub basechange_conductor: Option<f64>,
    #[arg(long, value_enum, default_value_t = Rule::Basechange)]
    pub root_number_rule: Rule,
    /// Parity override; the generic parity of the root number otherwise.
    #[arg(long)]
    pub k: Option<u32>,
    /// Balance parameter X of the functional equation.
    #[arg(long, default_value_t = 1.0)]
    pub x: f64,
    /// Gaussian damping a of the test function.
    #[arg(long, default_value_t = 0.0)]
    pub damping: f64,
    #[arg(long, default_value_t = 30.0)]
    pub trunc_a: f64,
    #[arg(long, default_value_t = 10.0)]
    pub trunc_b: f64,
}

#[derive(Args, Debug, Clone)]
pub struct CentralArgs {
    #[command(flatten)]
    pub setup: SetupArgs,
    /// Index of a single character of Pic(O_c).
    #[arg(long)]
    pub character: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    A,
    B,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DivisorOrderArg {
    Ascending,
    ByOmega,
}

#[derive(Args, Debug, Clone)]
pub struct AverageArgs {
    #[command(flatten)]
    pub setup: SetupArgs,
    #[arg(long, value_enum, default_value_t = RouteArg::Both)]
    pub route: RouteArg,
    #[arg(long, value_enum, default_value_t = DivisorOrderArg::Ascending)]
    pub divisor_order: DivisorOrderArg,
    /// Also evaluate the predicted main term.
    #[arg(long)]
    pub main_term: bool,
    /// Smoothing length of the main-term series.
    #[arg(long, default_value_t = 1e4)]
    pub main_x: f64,
    /// Also compare the b = 0 sum with its contour integral.
    #[arg(long)]
    pub b0_check: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WindowArg {
    Compact,
    Gaussian,
}

#[derive(Args, Debug, Clone)]
pub struct ShiftedArgs {
    #[arg(long = "form", default_value = "delta")]
    pub forms: Vec<String>,
    /// Shifts, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1,2,3,4")]
    pub q: Vec<i64>,
    /// Lengths Y, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1e3,1e4,1e5,1e6")]
    pub y: Vec<f64>,
    #[arg(long, value_enum, default_value_t = WindowArg::Compact)]
    pub window: WindowArg,
    #[arg(long)]
    pub pmax: Option<u64>,
}

#[derive(Args, Debug, Clone)]
pub struct WhittakerArgs {
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub q: i32,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub nu_re: f64,
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    pub nu_im: f64,
    #[arg(long, default_value_t = 1e-5)]
    pub y_lo: f64,
    #[arg(long, default_value_t = 1e-2)]
    pub y_hi: f64,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
}

const SUBCOMMANDS: [&str; 6] = ["classgroup", "central", "average", "shifted", "whittaker", "selftest"];

fn config_path(argv: &[OsString]) -> Option<PathBuf> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

fn explicit_longs(cmd: &clap::Command, m: &ArgMatches) -> Vec<String> {
    let mut out = Vec::new();
    for arg in cmd.get_arguments() {
        let id = arg.get_id().as_str();
        if m.try_contains_id(id).unwrap_or(false) && m.value_source(id) == Some(ValueSource::CommandLine) {
            if let Some(long) = arg.get_long() {
                out.push(long.to_string());
            }
        }
    }
    out
}

/// Appends configuration entries for flags not given on the command line.
fn merge_config(argv: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&argv) else { return Ok(argv) };
    let config = ConfigFile::read(&path)?;
    // Required options may come from the file, so the first pass is lenient.
    let cmd = Cli::command().ignore_errors(true);
    let matches = cmd.clone().try_get_matches_from(&argv).map_err(|e| CliError::Usage(e.to_string()))?;
    let Some((name, sub)) = matches.subcommand() else { return Ok(argv) };
    let sub_cmd = cmd.find_subcommand(name).expect("parsed subcommand exists");
    let mut given = explicit_longs(&cmd, &matches);
    given.extend(explicit_longs(sub_cmd, sub));
    let known: Vec<String> = sub_cmd
        .get_arguments()
        .chain(cmd.get_arguments())
        .filter_map(|a| a.get_long().map(str::to_string))
        .collect();
    let mut out = argv;
    for (key, value) in config.entries {
        if key == "config" {
            continue;
        }
        if !known.contains(&key) {
            return Err(CliError::Usage(format!("{}: unknown key `{key}` for `{name}`", path.display())));
        }
        if given.contains(&key) {
            continue;
        }
        let flag_is_switch = sub_cmd
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()))
            .is_some_and(|a| matches!(a.get_action(), clap::ArgAction::SetTrue));
        if flag_is_switch {
            if value == "true" {
                out.push(format!("--{key}").into());
            }
        } else {
            out.push(format!("--{key}={value}").into());
        }
    }
    Ok(out)
}

/// Every option of the subcommand with its resolved value, and those that
/// kept their default.
fn echo(cmd: &clap::Command, m: &ArgMatches) -> (BTreeMap<String, Vec<String>>, Vec<String>) {
    let mut values = BTreeMap::new();
    let mut defaults = Vec::new();
    for arg in cmd.get_arguments() {
        let id = arg.get_id().as_str();
        if id == "help" || id == "version" || !m.try_contains_id(id).unwrap_or(false) {
            continue;
        }
        let Ok(Some(raw)) = m.try_get_raw(id) else { continue };
        let name = arg.get_long().unwrap_or(id).to_string();
        values.insert(name.clone(), raw.map(|v| v.to_string_lossy().into_owned()).collect());
        if m.value_source(id) == Some(ValueSource::DefaultValue) {
            defaults.push(name);
        }
    }
    (values, defaults)
}

fn write_output(cli: &Cli, out: &Output, provenance: &Provenance) -> Result<()> {
    let text = match cli.format {
        Format::Json => out.to_json(provenance)?,
        Format::Csv => out.to_csv()?,
    };
    match &cli.output {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| CliError::io(path, e))?;
            if cli.format == Format::Csv {
                let side = path.with_extension("provenance.json");
                let prov = serde_json::to_string_pretty(provenance)? + "\n";
                std::fs::write(&side, prov).map_err(|e| CliError::io(&side, e))?;
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| CliError::io("<stdout>", e))?;
        }
    }
    Ok(())
}

fn execute(argv: Vec<OsString>) -> Result<()> {
    let argv = merge_config(argv)?;
    let cmd = Cli::command();
    let matches = cmd.clone().try_get_matches_from(&argv).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => CliError::Usage(String::new()),
        _ => CliError::Usage(e.to_string()),
    })?;
    let cli = Cli::from_arg_matches(&matches).map_err(|e| CliError::Usage(e.to_string()))?;
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let sub_cmd = cmd.find_subcommand(name).expect("parsed subcommand exists");
    let (mut config, mut defaults) = echo(&cmd, &matches);
    let (sub_config, sub_defaults) = echo(sub_cmd, sub);
    config.extend(sub_config);
    defaults.extend(sub_defaults);
    config.remove("threads");
    defaults.sort();
    let out = match &cli.command {
        Command::Classgroup(a) => commands::classgroup(a)?,
        Command::Central(a) => commands::central(a)?,
        Command::Average(a) => commands::average(a)?,
        Command::Shifted(a) => commands::shifted(a)?,
        Command::Whittaker(a) => commands::whittaker(a)?,
        Command::Selftest => commands::selftest()?,
    };
    let provenance = Provenance::new(name, config, defaults, out.tolerances.clone());
    write_output(&cli, &out, &provenance)?;
    if let Some(failed) = out.failures {
        if failed > 0 {
            return Err(CliError::SelfTest(failed));
        }
    }
    Ok(())
}

/// Runs the driver and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let wants_info = argv.iter().skip(1).any(|a| a == "--help" || a == "-h" || a == "--version" || a == "-V");
    if wants_info {
        return match Cli::command().try_get_matches_from(&argv) {
            Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
                let _ = e.print();
                0
            }
            Err(e) => {
                let _ = e.print();
                1
            }
            Ok(_) => 0,
        };
    }
    let has_sub = argv.iter().skip(1).any(|a| SUBCOMMANDS.iter().any(|s| a == s));
    if !has_sub {
        eprintln!("{}", Cli::command().render_usage());
        return 1;
    }
    match execute(argv) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
