//! Serialized forms of tables and reports.

use serde::Serialize;

use carlitz_core::galois_density::{Family, ImageTable, RankReport, UnitSampling};
use carlitz_core::FqSpec;

/// One CSV/JSON row. Absent values serialize as empty CSV cells and JSON nulls.
#[derive(Debug, Serialize)]
pub struct TableRow {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "D_brute")]
    pub d_brute: Option<String>,
    #[serde(rename = "D_formula")]
    pub d_formula: Option<String>,
    pub extra_m: Option<u64>,
    pub delta_hat_num: Option<u64>,
    pub delta_hat_den: Option<u64>,
    pub delta_hat_real: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct ProblemHeader {
    pub q: u32,
    pub p: u32,
    pub e: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<u64>,
    pub mode: &'static str,
    pub seed: u64,
}

#[derive(Debug, Serialize)]
pub struct TableDocument {
    pub problem: ProblemHeader,
    pub rows: Vec<TableRow>,
}

pub const REAL_DIGITS: usize = 10;

pub fn table_rows(table: &ImageTable) -> Vec<TableRow> {
    table
        .rows
        .iter()
        .map(|r| TableRow {
            n: r.n,
            d_brute: r.d_brute.map(|d| d.to_string()),
            d_formula: r.d_formula.map(|d| d.to_string()),
            extra_m: r.extra_m,
            delta_hat_num: r.estimate.map(|e| e.exponent),
            delta_hat_den: r.estimate.map(|e| e.denominator),
            delta_hat_real: r.estimate.map(|e| format!("{:.*}", REAL_DIGITS, e.value())),
        })
        .collect()
}

pub fn header(field: &FqSpec, table: &ImageTable, seed: u64) -> ProblemHeader {
    let (k, d) = match table.family {
        Family::Prolongation { k } => (Some(k), None),
        Family::TensorPower { d } => (None, Some(d)),
    };
    ProblemHeader {
        q: field.order(),
        p: field.characteristic(),
        e: field.degree(),
        k,
        d,
        mode: table.mode.as_str(),
        seed,
    }
}

pub fn to_csv(rows: &[TableRow]) -> Result<Vec<u8>, csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    if rows.is_empty() {
        w.write_record([
            "N",
            "D_brute",
            "D_formula",
            "extra_m",
            "delta_hat_num",
            "delta_hat_den",
            "delta_hat_real",
        ])?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

#[derive(Debug, Serialize)]
pub struct RepDocument {
    pub q: u32,
    pub k: usize,
    pub n: u64,
    pub unit: String,
    pub rows: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct TorsionDocument {
    pub p: u64,
    pub n: u64,
    pub k: u64,
    pub m: u64,
}

#[derive(Debug, Serialize)]
pub struct RelationTermDocument {
    pub coeff: String,
    pub t_power: usize,
    pub exponents: Vec<u32>,
}

#[derive(Debug, Serialize)]
pub struct ZariskiDocument {
    pub q: u32,
    pub k: usize,
    pub deg: usize,
    pub tdeg: usize,
    pub n: u64,
    pub seed: u64,
    pub sampling: &'static str,
    pub points: usize,
    pub unknowns: usize,
    pub rank: usize,
    pub full_rank: bool,
    pub relation: Option<Vec<RelationTermDocument>>,
}

pub fn zariski_document(
    field: &FqSpec,
    (k, deg, tdeg, n, seed): (usize, usize, usize, u64, u64),
    report: &RankReport,
) -> ZariskiDocument {
    ZariskiDocument {
        q: field.order(),
        k,
        deg,
        tdeg,
        n,
        seed,
        sampling: match report.sampling {
            UnitSampling::Exhaustive => "exhaustive",
            UnitSampling::Sampled { .. } => "sampled",
            UnitSampling::Given => "given",
        },
        points: report.points,
        unknowns: report.unknowns,
        rank: report.rank,
        full_rank: report.full_rank(),
        relation: report.relation.as_ref().map(|terms| {
            terms
                .iter()
                .map(|t| RelationTermDocument {
                    coeff: field.render(t.coeff),
                    t_power: t.t_power,
                    exponents: t.exponents.clone(),
                })
                .collect()
        }),
    }
}
