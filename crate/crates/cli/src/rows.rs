//! One CSV row per evaluated point.

use euqoe_core::algebra::EntangledParity;
use euqoe_core::engine::{evaluate_cycle, CycleReport};
use euqoe_core::protocol::{check_alpha_chain, feasible_alpha_ah};

use crate::config::{ParityChoice, Point};
use crate::error::CliError;

pub const COLUMNS: [&str; 26] = [
    "omega1",
    "omega2",
    "alpha_aH",
    "aH2",
    "alpha_aC",
    "tau_a",
    "dimension",
    "p",
    "parity",
    "i1",
    "i1_reduced",
    "i1_error",
    "trace_v",
    "trace_aH",
    "trace_aC",
    "trace_aH_error",
    "w_total",
    "q2",
    "q4",
    "conservation_residual",
    "eta_0",
    "eta_e",
    "eta_e_closed_form",
    "eta_rel_deviation",
    "valid",
    "error",
];

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

/// A row of [`COLUMNS`], already formatted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultRow {
    pub values: Vec<String>,
}

impl ResultRow {
    pub fn get(&self, column: &str) -> Option<&str> {
        COLUMNS
            .iter()
            .position(|c| *c == column)
            .map(|i| self.values[i].as_str())
    }

    /// True if the point could not be evaluated at all.
    pub fn failed(&self) -> bool {
        self.get("error").is_some_and(|e| !e.is_empty())
    }

    pub fn valid(&self) -> bool {
        self.get("valid") == Some("true")
    }

    fn build(
        point: &Point,
        report: Option<(&CycleReport, EntangledParity)>,
        error: Option<&str>,
    ) -> Self {
        let alpha_ac =
            euqoe_core::protocol::alpha_ac_from(point.alpha_ah, point.omega1, point.omega2);
        let mut v: Vec<String> = [
            point.omega1,
            point.omega2,
            point.alpha_ah,
            point.a_h2,
            alpha_ac,
            point.tau_a,
        ]
        .map(fmt_f64)
        .to_vec();
        v.push(point.dimension.to_string());
        v.push(fmt_f64(point.p));
        match report {
            Some((r, parity)) => {
                let t = &r.traces;
                let closed = r.eta_e_closed_form;
                let valid = r.heat_positive
                    && feasible_alpha_ah(point.alpha_ah, point.omega1, point.omega2)
                    && check_alpha_chain(point.alpha_ah, alpha_ac)
                    && r.eta_e > 0.0
                    && r.eta_e < 1.0;
                v.push(parity.to_string());
                v.extend(
                    [
                        r.i1.value,
                        r.i1.reduced,
                        r.i1.reduced_error,
                        t.v,
                        t.heat,
                        t.cool,
                        t.heat_error,
                        r.w_total,
                        r.q2,
                        r.q4,
                        r.conservation_residual,
                        r.eta_0,
                        r.eta_e,
                        closed,
                        (r.eta_e - closed).abs() / closed.abs(),
                    ]
                    .map(fmt_f64),
                );
                v.push(valid.to_string());
            }
            None => {
                v.push(point.parity.as_str().to_string());
                v.extend(std::iter::repeat(String::new()).take(15));
                v.push("false".into());
            }
        }
        v.push(error.unwrap_or_default().to_string());
        debug_assert_eq!(v.len(), COLUMNS.len());
        Self { values: v }
    }
}

/// Result of evaluating one point.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub row: ResultRow,
    pub error: Option<CliError>,
    pub warnings: Vec<String>,
}

/// Evaluates the cycle at `point`. With `parity = auto` the symmetric state
/// is tried first and the antisymmetric one if the heat intake is not
/// positive.
pub fn evaluate_point(point: &Point) -> Evaluation {
    let run = |parity: EntangledParity| {
        point
            .cycle(parity)
            .and_then(|c| evaluate_cycle(&c))
            .map(|r| (r, parity))
    };
    let first = match point.parity {
        ParityChoice::Fixed(p) => p,
        ParityChoice::Auto => EntangledParity::Symmetric,
    };
    let mut result = run(first);
    if point.parity == ParityChoice::Auto {
        if let Ok((r, _)) = &result {
            // For p = 0 the sign of I₁ decides; a degenerate I₁ fails both ways.
            let retry = !r.heat_positive && (point.p != 0.0 || r.preferred_parity.is_some());
            if retry {
                if let Ok(other) = run(first.flipped()) {
                    if other.0.heat_positive {
                        result = Ok(other);
                    }
                }
            }
        }
    }
    match result {
        Ok((r, parity)) => Evaluation {
            row: ResultRow::build(point, Some((&r, parity)), None),
            error: None,
            warnings: r.warnings.clone(),
        },
        Err(e) => {
            let msg = e.to_string();
            Evaluation {
                row: ResultRow::build(point, None, Some(&msg)),
                error: Some(e.into()),
                warnings: Vec::new(),
            }
        }
    }
}

/// Writes the header and `rows` as CSV with LF line endings.
pub fn to_csv<'a>(rows: impl IntoIterator<Item = &'a ResultRow>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(COLUMNS).expect("writing to memory");
    for r in rows {
        w.write_record(&r.values).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("CSV of UTF-8 fields")
}

/// Parses CSV produced by [`to_csv`]; `None` if the header differs.
pub fn from_csv(text: &str) -> Option<Vec<ResultRow>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header = r.headers().ok()?;
    if header.iter().ne(COLUMNS) {
        return None;
    }
    r.records()
        .map(|rec| {
            let rec = rec.ok()?;
            (rec.len() == COLUMNS.len()).then(|| ResultRow {
                values: rec.iter().map(String::from).collect(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shortest_roundtrip() {
        for x in [0.625, 0.1, 1.0 / 3.0, 1e-300, 2.5e20, -0.0] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
        assert_eq!(fmt_f64(0.625), "0.625");
    }

    #[test]
    fn csv_roundtrip() {
        let p = Point::default();
        let row = ResultRow::build(&p, None, Some("numeric error: a, b"));
        let text = to_csv([&row]);
        assert!(text.starts_with("omega1,omega2,"));
        assert!(!text.contains('\r'));
        assert_eq!(from_csv(&text).unwrap(), vec![row.clone()]);
        assert!(row.failed() && !row.valid());
    }
}
