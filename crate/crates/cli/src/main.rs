mod args;
mod report;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;

use clap::Parser;

use carlitz_core::cinfty_model::{
    compute_omega, omega_jet_column, verify_carlitz_equation, verify_hhat_membership,
    verify_prolongation_trivialization,
};
use carlitz_core::config::FieldConfig;
use carlitz_core::galois_density::{
    galois_rep, image_table, torsion_level_m, zariski_rank_certificate, DensityProblem, Family,
    ImageTable,
};
use carlitz_core::{Error, FqSpec, TruncSeries, UnitClass};

use args::{Cli, Command, Format, OmegaArgs, RepArgs, TableArgs, ZariskiArgs};

const EXIT_FAILURE: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_MISMATCH: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExceeded { .. }
            | Error::InsufficientPrecision { .. }
            | Error::WindowEmpty => EXIT_BUDGET,
            Error::Parse(_)
            | Error::Config(_)
            | Error::InvalidField(_)
            | Error::InvalidCharacteristic(_)
            | Error::NonUnit => EXIT_USAGE,
            _ => EXIT_FAILURE,
        };
        Failure::new(code, e.to_string())
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::new(EXIT_FAILURE, format!("{}: {e}", path.display()))
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| io_failure(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::new(EXIT_FAILURE, format!("stdout: {e}")))
        }
    }
}

fn json_line<T: serde::Serialize>(value: &T) -> Result<Vec<u8>, Failure> {
    let mut bytes = serde_json::to_vec_pretty(value)
        .map_err(|e| Failure::new(EXIT_FAILURE, format!("json: {e}")))?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn resolve_field(cli: &Cli, q: u32) -> Result<Arc<FqSpec>, Failure> {
    let config = FieldConfig::discover(cli.config.as_deref())?;
    Ok(Arc::new(config.resolve(q)?))
}

fn run_table(cli: &Cli, table: &TableArgs, family: Family) -> Result<(), Failure> {
    let field = resolve_field(cli, table.q)?;
    let problem = DensityProblem {
        field: field.clone(),
        family,
        n_max: table.nmax as usize,
        mode: table.mode.into(),
        budget: table.budget,
        threads: cli.threads,
    };
    let result: ImageTable = image_table(&problem)?;
    let rows = report::table_rows(&result);
    let bytes = match table.format {
        Format::Csv => {
            report::to_csv(&rows).map_err(|e| Failure::new(EXIT_FAILURE, format!("csv: {e}")))?
        }
        Format::Json => json_line(&report::TableDocument {
            problem: report::header(&field, &result, table.seed),
            rows,
        })?,
    };
    emit(table.out.as_deref(), &bytes)?;
    cross_check(&result)
}

fn cross_check(table: &ImageTable) -> Result<(), Failure> {
    match table.first_mismatch() {
        Some(n) => Err(Failure::new(
            EXIT_MISMATCH,
            format!("brute force and formula disagree at N={n}"),
        )),
        None => Ok(()),
    }
}

fn run_omega(cli: &Cli, a: &OmegaArgs) -> Result<(), Failure> {
    let field = resolve_field(cli, a.q)?;
    let omega = compute_omega(field, a.tprec as usize, a.uprec)?;
    let mut checks = vec![(
        "carlitz_equation".to_string(),
        verify_carlitz_equation(&omega)?,
    )];
    checks.push((
        format!("prolongation_trivialization k={}", a.k),
        verify_prolongation_trivialization(&omega, a.k)?,
    ));
    for c in 0..=a.k {
        let column = omega_jet_column(&omega, a.k, c)?;
        checks.push((
            format!("hhat_membership k={} column={c}", a.k),
            verify_hhat_membership(a.k, &column)?,
        ));
    }
    let mut text = String::new();
    for (name, ok) in &checks {
        text.push_str(if *ok { "PASS " } else { "FAIL " });
        text.push_str(name);
        text.push('\n');
    }
    emit(None, text.as_bytes())?;
    if checks.iter().all(|(_, ok)| *ok) {
        Ok(())
    } else {
        Err(Failure::new(EXIT_MISMATCH, "some identities failed"))
    }
}

fn run_rep(cli: &Cli, a: &RepArgs) -> Result<(), Failure> {
    let field = resolve_field(cli, a.q)?;
    let n = a.n as usize;
    let unit = UnitClass::new(TruncSeries::parse(field.clone(), &a.unit, n + a.k)?)?;
    let jet = galois_rep(&unit, a.k, n)?;
    emit(
        None,
        &json_line(&report::RepDocument {
            q: field.order(),
            k: a.k,
            n: a.n,
            unit: unit.series().to_string(),
            rows: jet.rows().iter().map(|r| r.to_string()).collect(),
        })?,
    )
}

fn run_zariski(cli: &Cli, a: &ZariskiArgs) -> Result<(), Failure> {
    let field = resolve_field(cli, a.q)?;
    let r = zariski_rank_certificate(field.clone(), a.k, a.deg, a.tdeg, a.n as usize, a.seed)?;
    let doc = report::zariski_document(&field, (a.k, a.deg, a.tdeg, a.n, a.seed), &r);
    emit(None, &json_line(&doc)?)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Density(a) => run_table(cli, &a.table, Family::Prolongation { k: a.k }),
        Command::Tensor(a) => run_table(cli, &a.table, Family::TensorPower { d: a.d }),
        Command::OmegaVerify(a) => run_omega(cli, a),
        Command::Rep(a) => run_rep(cli, a),
        Command::TorsionLevel(a) => {
            let m = torsion_level_m(a.p, a.n, a.k)?;
            emit(
                None,
                &json_line(&report::TorsionDocument {
                    p: a.p,
                    n: a.n,
                    k: a.k,
                    m,
                })?,
            )
        }
        Command::Zariski(a) => run_zariski(cli, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("carlitz: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
