//! Human-readable tables and CSV output.

use std::fmt::Write as _;

use crate::materials::Polarization;
use crate::quadrature::CasimirResult;

/// Exact CSV header of compute and sweep output.
pub const CSV_HEADER: [&str; 6] = ["target_m", "E_Jm2", "FL_Nm2", "FR_Nm2", "FS_Nm2", "err_rel"];

/// One CSV row; a failed evaluation keeps its target and carries the message.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub target_m: f64,
    pub outcome: Result<CasimirResult, String>,
}

/// Scientific notation with 9 significant digits.
pub fn sci(x: f64) -> String {
    format!("{x:.8e}")
}

pub fn render_csv(rows: &[SweepRow]) -> String {
    let mut w = csv::WriterBuilder::new()
        .flexible(true)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for row in rows {
        let record: Vec<String> = match &row.outcome {
            Ok(r) => vec![
                sci(row.target_m),
                sci(r.energy),
                sci(r.force_left),
                sci(r.force_right),
                sci(r.force_stack),
                sci(r.est_error),
            ],
            Err(msg) => {
                let mut v = vec![sci(row.target_m)];
                v.extend(std::iter::repeat_n(String::new(), CSV_HEADER.len() - 1));
                v.push(msg.clone());
                v
            }
        };
        w.write_record(&record).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

/// A parsed CSV row: numeric fields, or `None` where the row failed.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRecord {
    pub values: [Option<f64>; 6],
    pub error: Option<String>,
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRecord>, String> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| e.to_string())?;
    if header.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(format!("unexpected header {header:?}"));
    }
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| e.to_string())?;
        let mut values = [None; 6];
        for (slot, field) in values.iter_mut().zip(record.iter()) {
            if !field.is_empty() {
                *slot = Some(field.parse::<f64>().map_err(|e| format!("{field:?}: {e}"))?);
            }
        }
        out.push(CsvRecord {
            values,
            error: record.get(6).map(str::to_string),
        });
    }
    Ok(out)
}

pub fn render_table(result: &CasimirResult, title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{title}");
    let _ = writeln!(s, "  {:<22} {:>17}", "energy E", format!("{} J/m^2", sci(result.energy)));
    let _ = writeln!(s, "  {:<22} {:>17}", "force on left plate", format!("{} N/m^2", sci(result.force_left)));
    let _ = writeln!(s, "  {:<22} {:>17}", "force on right plate", format!("{} N/m^2", sci(result.force_right)));
    let _ = writeln!(s, "  {:<22} {:>17}", "force on stack", format!("{} N/m^2", sci(result.force_stack)));
    let _ = writeln!(s, "  by polarization:");
    let _ = writeln!(
        s,
        "    {:<3} {:>16} {:>16} {:>16} {:>16}",
        "q", "E [J/m^2]", "F_L [N/m^2]", "F_R [N/m^2]", "F_S [N/m^2]"
    );
    for q in Polarization::BOTH {
        let part = result.polarization(q);
        let _ = writeln!(
            s,
            "    {:<3} {:>16} {:>16} {:>16} {:>16}",
            q.label(),
            sci(part.energy),
            sci(part.force_left),
            sci(part.force_right),
            sci(part.force_stack)
        );
    }
    let _ = writeln!(s, "  estimated relative error {}", sci(result.est_error));
    let _ = writeln!(s, "  integrand evaluations {}", result.evaluations);
    s
}

/// Sweep rows as an aligned text table.
pub fn render_sweep_table(rows: &[SweepRow], title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{title}");
    let _ = writeln!(
        s,
        "  {:>16} {:>16} {:>16} {:>16} {:>16} {:>16}",
        "target [m]", "E [J/m^2]", "F_L [N/m^2]", "F_R [N/m^2]", "F_S [N/m^2]", "est. rel. err"
    );
    for row in rows {
        match &row.outcome {
            Ok(r) => {
                let _ = writeln!(
                    s,
                    "  {:>16} {:>16} {:>16} {:>16} {:>16} {:>16}",
                    sci(row.target_m),
                    sci(r.energy),
                    sci(r.force_left),
                    sci(r.force_right),
                    sci(r.force_stack),
                    sci(r.est_error)
                );
            }
            Err(msg) => {
                let _ = writeln!(s, "  {:>16} failed: {msg}", sci(row.target_m));
            }
        }
    }
    s
}
