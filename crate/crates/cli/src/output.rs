//! Machine-readable output documents. Exact rationals travel as strings;
//! floats appear only in the convergence tables.

use serde::Serialize;

use guekdv_core::report::ResidualReport;

use crate::limit::{DemoRow, LadderRow};

#[derive(Serialize)]
pub struct FailureJson {
    pub key: String,
    pub residual: String,
}

#[derive(Serialize)]
pub struct ReportJson {
    pub name: String,
    pub checked: usize,
    pub failures: usize,
    pub failing: Vec<FailureJson>,
    pub notes: Vec<String>,
}

impl From<&ResidualReport> for ReportJson {
    fn from(r: &ResidualReport) -> Self {
        ReportJson {
            name: r.name.clone(),
            checked: r.checked,
            failures: r.failures.len(),
            failing: r
                .failures
                .iter()
                .map(|f| FailureJson {
                    key: f.key.clone(),
                    residual: f.residual.clone(),
                })
                .collect(),
            notes: r.notes.clone(),
        }
    }
}

#[derive(Serialize)]
pub struct VerifyJson {
    pub suite: String,
    pub total_checked: usize,
    pub total_failures: usize,
    pub reports: Vec<ReportJson>,
}

pub fn verify_doc(suite: &str, reports: &[ResidualReport]) -> VerifyJson {
    VerifyJson {
        suite: suite.to_string(),
        total_checked: reports.iter().map(|r| r.checked).sum(),
        total_failures: reports.iter().map(|r| r.failures.len()).sum(),
        reports: reports.iter().map(ReportJson::from).collect(),
    }
}

/// Deterministic float formatting for tables (17 significant digits keeps
/// the f64 round trip exact).
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Serialize)]
pub struct LadderRowJson {
    pub kappa: u64,
    pub indices: Vec<u32>,
    pub scaled_value: String,
    pub limit: String,
    pub rel_error: String,
}

impl From<&LadderRow> for LadderRowJson {
    fn from(r: &LadderRow) -> Self {
        LadderRowJson {
            kappa: r.kappa,
            indices: r.indices.clone(),
            scaled_value: fmt_f64(r.scaled),
            limit: fmt_f64(r.limit),
            rel_error: fmt_f64(r.rel_error),
        }
    }
}

pub fn ladder_csv(rows: &[LadderRow]) -> String {
    let mut out = String::from("kappa,indices,scaled_value,limit,rel_error\n");
    for r in rows {
        let idx: Vec<String> = r.indices.iter().map(|v| v.to_string()).collect();
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.kappa,
            idx.join(";"),
            fmt_f64(r.scaled),
            fmt_f64(r.limit),
            fmt_f64(r.rel_error)
        ));
    }
    out
}

#[derive(Serialize)]
pub struct DemoRowJson {
    pub kappa: u64,
    pub j: Vec<u32>,
    pub lhs_scaled: String,
    pub rhs_scaled: String,
    pub lhs_target: String,
    pub rhs_target: String,
}

impl From<&DemoRow> for DemoRowJson {
    fn from(r: &DemoRow) -> Self {
        DemoRowJson {
            kappa: r.kappa,
            j: r.j.clone(),
            lhs_scaled: fmt_f64(r.lhs_scaled),
            rhs_scaled: fmt_f64(r.rhs_scaled),
            lhs_target: fmt_f64(r.lhs_target),
            rhs_target: fmt_f64(r.rhs_target),
        }
    }
}

pub fn demo_csv(rows: &[DemoRow]) -> String {
    let mut out = String::from("kappa,j,lhs_scaled,rhs_scaled,lhs_target,rhs_target\n");
    for r in rows {
        let j: Vec<String> = r.j.iter().map(|v| v.to_string()).collect();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.kappa,
            j.join(";"),
            fmt_f64(r.lhs_scaled),
            fmt_f64(r.rhs_scaled),
            fmt_f64(r.lhs_target),
            fmt_f64(r.rhs_target)
        ));
    }
    out
}

/// Plain-text table rendering of a verify document.
pub fn verify_table(doc: &VerifyJson) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "suite {}: {} checked, {} failures\n",
        doc.suite, doc.total_checked, doc.total_failures
    ));
    for r in &doc.reports {
        out.push_str(&format!(
            "  {:<18} checked {:>6}  failures {:>3}\n",
            r.name, r.checked, r.failures
        ));
        for f in r.failing.iter().take(8) {
            out.push_str(&format!("    FAIL {} = {}\n", f.key, f.residual));
        }
        for n in &r.notes {
            out.push_str(&format!("    note: {n}\n"));
        }
    }
    out
}
