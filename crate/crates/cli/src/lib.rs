//! Command-line front end: figure reproduction sweeps, link-budget records,
//! closed-form bound dumps and the oracle-equivalence check, emitted as
//! deterministic CSV or JSON.

pub mod args;
pub mod commands;
pub mod output;
pub mod pool;

use std::io::Write;

use args::Options;
use output::CsvTable;

/// CLI failure classes; exit codes are 1 (validation), 2 (tolerance or
/// oracle failure), 3 (I/O).
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Tolerance(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Tolerance(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Tolerance(m) | CliError::Io(m) => m,
        }
    }
}

impl From<qi_core::Error> for CliError {
    fn from(e: qi_core::Error) -> Self {
        use qi_core::Error::*;
        let msg = e.to_string();
        match e {
            CutoffTooSmall(_) | SupportMismatch(_) | CurvatureTooLarge(_) | NonConvergent
            | IllConditioned(_) | SingularSigma | SingularGibbs(_)
            | NegativeRelativeEntropy(_) => CliError::Tolerance(msg),
            Unphysical(_) | AsymmetricCov(_) | Dimension(_) | OutOfRange(_) | Domain(_)
            | NotInHighLossRegime(_) => CliError::Validation(msg),
        }
    }
}

const USAGE: &str = "usage: qi <command> [--key value ...]

commands:
  fig1          exponent-ratio curves over a signal-energy grid
  roc           ROC sweep (--preset fig2a|fig2b|custom)
  appendix-fit  small-kappa exponent fit over a correlation grid
  link          link-budget record (JSON)
  bounds        closed-form bounds and advantage threshold (JSON)
  oracle-check  truncated-Fock verification suite (JSON; exit 2 on breach)

common flags: --out PATH, --format csv|json, --jobs N, --config FILE,
              --plot-script PATH (fig1, roc, appendix-fit)";

/// Parses and runs a full command line (without argv[0]). Returns the exit
/// code on success paths that carry one (oracle breach = 2).
pub fn run(argv: &[String]) -> Result<i32, CliError> {
    let Some(command) = argv.first() else {
        return Err(CliError::Validation(USAGE.to_string()));
    };
    let opts = Options::parse(&argv[1..])?;

    match command.as_str() {
        "fig1" => {
            let table = commands::fig1(&opts)?;
            emit_table(&opts, &table, "exponent ratio", true)?;
            Ok(0)
        }
        "roc" => {
            let table = commands::roc(&opts)?;
            emit_table(&opts, &table, "receiver operating characteristic", true)?;
            Ok(0)
        }
        "appendix-fit" => {
            let table = commands::appendix_fit(&opts)?;
            emit_table(&opts, &table, "exponent fit", false)?;
            Ok(0)
        }
        "link" => {
            let record = commands::link(&opts)?;
            emit_json(&opts, &record)?;
            Ok(0)
        }
        "bounds" => {
            let record = commands::bounds(&opts)?;
            emit_json(&opts, &record)?;
            Ok(0)
        }
        "oracle-check" => {
            let (record, pass) = commands::oracle_check(&opts)?;
            emit_json(&opts, &record)?;
            Ok(if pass { 0 } else { 2 })
        }
        "help" | "--help" | "-h" => {
            println!("{USAGE}");
            Ok(0)
        }
        other => Err(CliError::Validation(format!(
            "unknown command `{other}`\n{USAGE}"
        ))),
    }
}

fn emit_table(
    opts: &Options,
    table: &CsvTable,
    title: &str,
    log_x: bool,
) -> Result<(), CliError> {
    match opts.str_or("format", "csv") {
        "csv" => {}
        other => {
            return Err(CliError::Validation(format!(
                "format `{other}` not supported for tables (csv only)"
            )))
        }
    }
    let out_path = opts.get("out");
    write_to(out_path, |w| table.write(w))?;
    if let Some(script) = opts.get("plot-script").or_else(|| opts.get("plot_script")) {
        let csv_path = out_path.ok_or_else(|| {
            CliError::Validation("--plot-script requires --out (the script references the CSV)".into())
        })?;
        let columns: Vec<(usize, &str)> = table
            .header
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, name)| (i + 1, name.as_str()))
            .collect();
        output::write_plot_script(script, csv_path, title, &columns, log_x)?;
    }
    Ok(())
}

fn emit_json(opts: &Options, record: &output::Json) -> Result<(), CliError> {
    match opts.str_or("format", "json") {
        "json" => {}
        other => {
            return Err(CliError::Validation(format!(
                "format `{other}` not supported for records (json only)"
            )))
        }
    }
    write_to(opts.get("out"), |w| record.write(w))
}

fn write_to(
    path: Option<&str>,
    body: impl FnOnce(&mut dyn Write) -> Result<(), CliError>,
) -> Result<(), CliError> {
    match path {
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            body(&mut lock)
        }
        Some(p) => {
            let mut file = std::fs::File::create(p)
                .map_err(|e| CliError::Io(format!("cannot create {p}: {e}")))?;
            body(&mut file)
        }
    }
}
