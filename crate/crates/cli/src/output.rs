//! Tabular results and their CSV and line renderings.

use std::io::Write;
use std::path::Path;

use lowrand::Scalar;

/// Floats with 12 significant digits, trailing zeros dropped.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        let m = mantissa.trim_end_matches('0').trim_end_matches('.');
        return format!("{m}e{exp}");
    }
    let decimals = (11 - exp).max(0) as usize;
    let fixed = format!("{x:.decimals$}");
    let out = if fixed.contains('.') { fixed.trim_end_matches('0').trim_end_matches('.').to_string() } else { fixed };
    if out == "-0" {
        "0".into()
    } else {
        out
    }
}

pub fn fmt_scalar<T: Scalar>(x: &T) -> String {
    if T::EXACT {
        x.format_scalar()
    } else {
        fmt_float(x.to_f64_lossy())
    }
}

/// One experiment's output table. `holds`, when present, names the column
/// carrying the per-row bound check.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub holds: Option<usize>,
    /// Aggregate checks reported in the summary, with pass flags.
    pub checks: Vec<(String, bool)>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        let holds = columns.iter().position(|&c| c == "holds");
        Table {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            holds,
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn check(&mut self, label: impl Into<String>, pass: bool) {
        self.checks.push((label.into(), pass));
    }

    /// Rows whose bound check failed.
    pub fn violations(&self) -> usize {
        self.holds.map_or(0, |h| self.rows.iter().filter(|r| r[h] != "true").count())
    }

    pub fn passed(&self) -> bool {
        self.violations() == 0 && self.checks.iter().all(|(_, p)| *p)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("utf-8 fields")
    }

    /// `column=value` pairs, one row per line.
    pub fn to_lines(&self) -> String {
        let mut s = String::new();
        for r in &self.rows {
            let parts: Vec<String> = self.columns.iter().zip(r).map(|(c, v)| format!("{c}={v}")).collect();
            s.push_str(&parts.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn summary(&self) -> serde_json::Value {
        let checks: Vec<serde_json::Value> =
            self.checks.iter().map(|(l, p)| serde_json::json!({ "check": l, "pass": p })).collect();
        serde_json::json!({
            "experiment": self.name,
            "rows": self.rows.len(),
            "columns": self.columns,
            "bound_violations": self.violations(),
            "checks": checks,
            "pass": self.passed(),
        })
    }

    /// Writes `<name>.csv` and `<name>.summary.json` under `dir`.
    pub fn save(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(format!("{}.csv", self.name)), self.to_csv())?;
        let summary = serde_json::to_string_pretty(&self.summary()).expect("json") + "\n";
        std::fs::write(dir.join(format!("{}.summary.json", self.name)), summary)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_float(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_float(2.0 / 3.0), "0.666666666667");
        assert_eq!(fmt_float(-0.5), "-0.5");
        assert_eq!(fmt_float(12.0), "12");
        assert_eq!(fmt_float(1e-7), "1e-7");
        assert_eq!(fmt_float(123456.7890123456), "123456.789012");
        assert_eq!(fmt_float(-1e-13), "-1e-13");
    }

    #[test]
    fn violations_counted() {
        let mut t = Table::new("x", &["a", "holds"]);
        t.push(vec!["1".into(), "true".into()]);
        t.push(vec!["2".into(), "false".into()]);
        assert_eq!(t.violations(), 1);
        assert!(!t.passed());
        assert_eq!(t.to_csv(), "a,holds\n1,true\n2,false\n");
        assert_eq!(t.to_lines(), "a=1 holds=true\na=2 holds=false\n");
    }
}
