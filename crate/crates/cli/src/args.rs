//! Command line, environment and config-file options.
//!
//! Precedence is command line, then `UFG_*` environment variables, then the config
//! file given by `--config`, then built-in defaults.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::parser::ValueSource;
use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};

use ufg_core::{Result, UfgError};

#[derive(Parser, Debug)]
#[command(name = "ufg", version, about = "Union-free generic depth for formal contexts, mixed spatial data and hierarchical codes")]
pub struct Cli {
    #[command(subcommand)]
    pub verb: Verb,
}

#[derive(Subcommand, Debug)]
pub enum Verb {
    /// Depth of every query; writes depths.csv and summary.json.
    Depth(RunArgs),
    /// Depth over a regular grid or raster; writes grid.csv.
    Grid(RunArgs),
    /// ufg median against mode, top-down median and Tukey depth (hierarchical data).
    Compare(RunArgs),
    /// Premise counts per cardinality.
    Premises(RunArgs),
    /// All extents of a finite context.
    Extents(RunArgs),
    /// Generalized Tukey depth of every query; writes tukey.csv.
    Tukey(RunArgs),
}

impl Verb {
    pub fn args(&self) -> &RunArgs {
        match self {
            Verb::Depth(a) | Verb::Grid(a) | Verb::Compare(a) | Verb::Premises(a) | Verb::Extents(a) | Verb::Tukey(a) => a,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Flat `key = value` file with the same keys as the long flags.
    #[arg(long, env = "UFG_CONFIG")]
    pub config: Option<PathBuf>,

    /// Observations (or the cross table for `--kind table`).
    #[arg(long, env = "UFG_INPUT")]
    pub input: Option<PathBuf>,

    /// One of table, mixed, hier, spatial.
    #[arg(long, env = "UFG_KIND")]
    pub kind: Option<String>,

    /// Code catalog for hierarchical data, one code per line.
    #[arg(long, env = "UFG_CATALOG")]
    pub catalog: Option<PathBuf>,

    /// Ground space of hierarchical data: catalog or sample.
    #[arg(long, env = "UFG_GROUND_MODE", value_parser = ["catalog", "sample"])]
    pub ground_mode: Option<String>,

    /// Whether distinct objects may share a code.
    #[arg(long, env = "UFG_DUPLICATES", default_value_t = true, action = clap::ArgAction::Set)]
    pub duplicates: bool,

    /// Comma-separated category list for mixed data; defaults to the observed ones.
    #[arg(long, env = "UFG_CATEGORIES")]
    pub categories: Option<String>,

    /// Observations `id,object[,weight]` of a table's objects; defaults to each object once.
    #[arg(long, env = "UFG_SAMPLE_FILE")]
    pub sample_file: Option<PathBuf>,

    /// Comma-separated C_j, e.g. `1,1/2,1`; missing entries are 1.
    #[arg(long, env = "UFG_WEIGHTS")]
    pub weights: Option<String>,

    #[arg(long, env = "UFG_J_MAX")]
    pub j_max: Option<usize>,

    /// Query file in the input's schema; defaults to the observations.
    #[arg(long, env = "UFG_QUERIES")]
    pub queries: Option<PathBuf>,

    /// Worker threads; 0 uses all cores.
    #[arg(long, env = "UFG_WORKERS", default_value_t = 0)]
    pub workers: usize,

    /// Force a counter (generic, planar, hier-frequency).
    #[arg(long, env = "UFG_COUNTER")]
    pub counter: Option<String>,

    /// Largest number of distinct objects accepted when j_max >= 4.
    #[arg(long, env = "UFG_N_CAP")]
    pub n_cap: Option<usize>,

    /// Output directory.
    #[arg(long, env = "UFG_OUT", default_value = ".")]
    pub out: PathBuf,

    #[arg(long, env = "UFG_XMIN", allow_hyphen_values = true)]
    pub xmin: Option<String>,
    #[arg(long, env = "UFG_XMAX", allow_hyphen_values = true)]
    pub xmax: Option<String>,
    #[arg(long, env = "UFG_YMIN", allow_hyphen_values = true)]
    pub ymin: Option<String>,
    #[arg(long, env = "UFG_YMAX", allow_hyphen_values = true)]
    pub ymax: Option<String>,
    #[arg(long, env = "UFG_NX")]
    pub nx: Option<usize>,
    #[arg(long, env = "UFG_NY")]
    pub ny: Option<usize>,

    /// Cells `x,y,vegetation,elevation`; the cells themselves form the grid.
    #[arg(long, env = "UFG_RASTER")]
    pub raster: Option<PathBuf>,

    /// Constant vegetation for every grid cell.
    #[arg(long, env = "UFG_VEGETATION")]
    pub vegetation: Option<String>,

    /// Constant elevation for every grid cell.
    #[arg(long, env = "UFG_ELEVATION", allow_hyphen_values = true)]
    pub elevation: Option<String>,
}

/// Reads `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str, label: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(UfgError::Ingest {
                path: label.to_string(),
                line: i as u64 + 1,
                message: format!("expected key = value, found {line:?}"),
            });
        };
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

pub enum Parsed {
    Run(Cli),
    /// Help or version text has been requested.
    Exit(clap::Error),
}

/// Parses the command line and fills unset options from the config file.
pub fn parse(argv: Vec<OsString>) -> Result<Parsed> {
    let cmd = || Cli::command().args_override_self(true);
    let first = match cmd().try_get_matches_from(&argv) {
        Ok(m) => m,
        Err(e) => return usage(e),
    };
    let Some((verb, sub)) = first.subcommand() else {
        return Err(UfgError::Config("missing command".into()));
    };
    let mut argv = argv;
    if let Some(path) = sub.get_one::<PathBuf>("config") {
        let label = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| UfgError::Io(format!("{label}: {e}")))?;
        let root = cmd();
        let verb_cmd = root.find_subcommand(verb).expect("parsed subcommand exists");
        for (key, value) in parse_config(&text, &label)? {
            let arg = verb_cmd
                .get_arguments()
                .find(|a| a.get_long() == Some(key.as_str()))
                .filter(|a| a.get_id() != "config")
                .ok_or_else(|| UfgError::Config(format!("{label}: unknown key {key:?}")))?;
            let id = arg.get_id().as_str();
            match sub.value_source(id) {
                Some(ValueSource::CommandLine) | Some(ValueSource::EnvVariable) => {}
                _ => argv.push(format!("--{key}={value}").into()),
            }
        }
    }
    let m = match cmd().try_get_matches_from(&argv) {
        Ok(m) => m,
        Err(e) => return usage(e),
    };
    let cli = Cli::from_arg_matches(&m).map_err(|e| UfgError::Config(e.to_string()))?;
    Ok(Parsed::Run(cli))
}

fn usage(e: clap::Error) -> Result<Parsed> {
    use clap::error::ErrorKind;
    match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
            Ok(Parsed::Exit(e))
        }
        _ => Err(UfgError::Config(e.render().to_string().trim().to_string())),
    }
}
