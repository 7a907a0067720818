//! Reports: rows of checks with CSV and markdown renderings.

use std::fmt;

use ontolab::{Backend, Prob};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Descriptive rows that are not compared against the tolerance.
    Info,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Info => "info",
        }
    }

    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub check: String,
    /// The constituent statement that produced `value` and `witness`, if any.
    pub component: String,
    pub value: String,
    pub witness: String,
    pub vacuous_events: Option<usize>,
    pub status: Status,
    pub note: String,
}

impl ReportRow {
    pub fn info(check: impl Into<String>, value: impl Into<String>) -> Self {
        ReportRow {
            check: check.into(),
            component: String::new(),
            value: value.into(),
            witness: String::new(),
            vacuous_events: None,
            status: Status::Info,
            note: String::new(),
        }
    }

    pub fn with_status(mut self, status: Status) -> Self {
        self.status = status;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportDoc {
    pub command: String,
    pub backend: Backend,
    pub seed: Option<u64>,
    pub tolerance: f64,
    pub version: String,
    pub rows: Vec<ReportRow>,
}

pub const CSV_HEADER: [&str; 12] = [
    "command",
    "backend",
    "seed",
    "tolerance",
    "version",
    "check",
    "component",
    "value",
    "witness",
    "vacuous_events",
    "status",
    "note",
];

impl ReportDoc {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.status != Status::Fail)
    }

    pub fn row(&self, check: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.check == check)
    }

    fn seed_text(&self) -> String {
        self.seed.map(|s| s.to_string()).unwrap_or_default()
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        let (seed, tol) = (self.seed_text(), format_float(self.tolerance));
        for r in &self.rows {
            let vacuous = r.vacuous_events.map(|v| v.to_string()).unwrap_or_default();
            w.write_record([
                self.command.as_str(),
                &self.backend.to_string(),
                &seed,
                &tol,
                &self.version,
                &r.check,
                &r.component,
                &r.value,
                &r.witness,
                &vacuous,
                r.status.as_str(),
                &r.note,
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("fields are UTF-8")
    }

    pub fn to_markdown(&self) -> String {
        let cell = |s: &str| s.replace('|', "\\|");
        let mut out = format!("# ontolab {}\n\n", self.command);
        out.push_str(&format!(
            "- backend: {}\n- seed: {}\n- tolerance: {}\n- version: {}\n\n",
            self.backend,
            if self.seed.is_some() { self.seed_text() } else { "-".into() },
            format_float(self.tolerance),
            self.version
        ));
        out.push_str("| check | component | value | witness | vacuous | status | note |\n");
        out.push_str("|---|---|---|---|---|---|---|\n");
        for r in &self.rows {
            out.push_str(&format!(
                "| {} | {} | {} | {} | {} | {} | {} |\n",
                cell(&r.check),
                cell(&r.component),
                cell(&r.value),
                cell(&r.witness),
                r.vacuous_events.map(|v| v.to_string()).unwrap_or_default(),
                r.status,
                cell(&r.note)
            ));
        }
        out
    }
}

/// `%.12g`: 12 significant digits, trailing zeros dropped, exponent form
/// outside `[1e-5, 1e12)`.
pub fn format_float(v: f64) -> String {
    const SIG: i32 = 12;
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.*e}", (SIG - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if exp < -5 || exp >= SIG {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    } else {
        trim(&format!("{:.*}", (SIG - 1 - exp) as usize, v))
    }
}

/// Exact values print as reduced `p/q`, floats via [`format_float`].
pub fn format_value<P: Prob>(v: &P) -> String {
    match P::BACKEND {
        Backend::Exact => v.to_string(),
        Backend::Float => format_float(v.to_f64()),
    }
}
