//! Machine-readable analysis reports for the CLI: serializable report
//! types plus the 15-significant-digit JSON number policy. Table output
//! rounds for display only; JSON carries the full rounded precision, so
//! both formats agree numerically.

use serde::Serialize;
use serde_json::Value;

use crate::classical::{PbeAnalysis, COL_LABELS, ROW_LABELS};
use crate::hilbert::StateVector;
use crate::qpbe::{ProfileClass, QPbeReport};
use crate::qsignaling::{COL_LABELS_Q, ROW_LABELS_Q};
use crate::{Error, Result};

/// Rounds to 15 significant decimal digits. Exact for every value that
/// is itself a 15-digit decimal, so report values are reproducible.
pub fn round15(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.14e}").parse().unwrap_or(v)
}

/// Rounds every number in a JSON tree to 15 significant digits.
pub fn round_json(value: &mut Value) {
    match value {
        Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if n.as_i64().is_none() {
                    if let Some(rounded) = serde_json::Number::from_f64(round15(f)) {
                        *value = Value::Number(rounded);
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

/// Serializes a report with the JSON number policy applied.
pub fn to_rounded_json<T: Serialize>(report: &T) -> Result<Value> {
    let mut value = serde_json::to_value(report)
        .map_err(|e| Error::NumericInvariant(format!("report serialization: {e}")))?;
    round_json(&mut value);
    Ok(value)
}

/// Compact display of a number in tables: fixed precision with trailing
/// zeros trimmed.
pub fn fmt_num(v: f64) -> String {
    let mut s = format!("{v:.6}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

/// A 4×4 bimatrix with its strategy labels.
#[derive(Debug, Clone, Serialize)]
pub struct BimatrixReport {
    pub mode: String,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    /// cells[row][col] = (player-1 payoff, player-2 payoff).
    pub cells: Vec<Vec<(f64, f64)>>,
}

impl BimatrixReport {
    pub fn new(mode: &str, quantum: bool, entries: &[[(f64, f64); 4]; 4]) -> Self {
        let (rows, cols) = if quantum {
            (ROW_LABELS_Q, COL_LABELS_Q)
        } else {
            (ROW_LABELS, COL_LABELS)
        };
        BimatrixReport {
            mode: mode.into(),
            row_labels: rows.iter().map(|s| s.to_string()).collect(),
            col_labels: cols.iter().map(|s| s.to_string()).collect(),
            cells: entries
                .iter()
                .map(|row| row.to_vec())
                .collect(),
        }
    }
}

/// One pure Nash equilibrium: grid cell, human label, payoffs.
#[derive(Debug, Clone, Serialize)]
pub struct NashEntry {
    pub cell: (usize, usize),
    pub label: String,
    pub payoffs: (f64, f64),
}

#[derive(Debug, Clone, Serialize)]
pub struct NashReport {
    pub mode: String,
    pub equilibria: Vec<NashEntry>,
}

/// The classical weak-PBE report: all 16 profile analyses plus the
/// labels of the accepted ones.
#[derive(Debug, Clone, Serialize)]
pub struct ClassicalPbeReport {
    pub accepted: Vec<String>,
    pub analyses: Vec<PbeAnalysis>,
}

impl ClassicalPbeReport {
    pub fn new(analyses: Vec<PbeAnalysis>) -> Self {
        let accepted = analyses
            .iter()
            .filter(|a| a.accepted)
            .map(|a| a.profile.label())
            .collect();
        ClassicalPbeReport { accepted, analyses }
    }
}

/// One nonzero Ψ-basis term of a final state.
#[derive(Debug, Clone, Serialize)]
pub struct StateTerm {
    /// The bitstring x of |Ψ_x⟩, most significant qubit first.
    pub label: String,
    pub re: f64,
    pub im: f64,
    pub prob: f64,
}

/// Final-state report: the profile's θ values and the nonzero Ψ-basis
/// amplitudes, in lexicographic label order.
#[derive(Debug, Clone, Serialize)]
pub struct StateReport {
    pub thetas: [f64; 4],
    pub terms: Vec<StateTerm>,
    pub payoffs: (f64, f64),
}

impl StateReport {
    pub fn new(thetas: [f64; 4], state: &StateVector, payoffs: (f64, f64)) -> Self {
        let n = state.n_qubits();
        let terms = (0..1usize << n)
            .filter_map(|x| {
                let amp = state.psi_component(x);
                let prob = amp.norm_sqr();
                if prob <= crate::TOL_ALG {
                    return None;
                }
                Some(StateTerm {
                    label: format!("{x:0width$b}", width = n),
                    re: amp.re,
                    im: amp.im,
                    prob,
                })
            })
            .collect();
        StateReport {
            thetas,
            terms,
            payoffs,
        }
    }
}

/// One row of the 16-profile NE×rationality cross-table.
#[derive(Debug, Clone, Serialize)]
pub struct ClassifyRow {
    pub cell: (usize, usize),
    pub row_label: String,
    pub col_label: String,
    pub payoffs: (f64, f64),
    pub nash: bool,
    pub rational: bool,
    pub class: ProfileClass,
}

/// The classification cross-table, without per-set verdict detail.
#[derive(Debug, Clone, Serialize)]
pub struct ClassifyReport {
    pub rows: Vec<ClassifyRow>,
    pub pbe_cells: Vec<(usize, usize)>,
    /// Profiles that are sequentially-type rational but not Nash; data
    /// for an open question, not a claim.
    pub rational_not_nash: Vec<(usize, usize)>,
}

impl ClassifyReport {
    pub fn new(report: &QPbeReport) -> Self {
        ClassifyReport {
            rows: report
                .rows
                .iter()
                .map(|row| ClassifyRow {
                    cell: row.cell,
                    row_label: ROW_LABELS_Q[row.cell.0].to_string(),
                    col_label: COL_LABELS_Q[row.cell.1].to_string(),
                    payoffs: row.payoffs,
                    nash: row.nash,
                    rational: row.rational,
                    class: row.class,
                })
                .collect(),
            pbe_cells: report.pbe_cells.clone(),
            rational_not_nash: report.rational_not_nash.clone(),
        }
    }
}

/// The top-level report union emitted by the CLI.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "report", rename_all = "kebab-case")]
pub enum AnalysisReport {
    NormalForm(BimatrixReport),
    Nash(NashReport),
    ClassicalPbe(ClassicalPbeReport),
    QuantumPbe(QPbeReport),
    State(StateReport),
    Classify(ClassifyReport),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round15_identities() {
        assert_eq!(round15(0.0), 0.0);
        assert_eq!(round15(7.75), 7.75);
        assert_eq!(round15(-6.5), -6.5);
        // A value with noise beyond 15 digits collapses onto the clean one.
        assert_eq!(round15(7.750000000000001), 7.75);
        assert_eq!(round15(0.1 + 0.2), round15(0.3));
    }

    #[test]
    fn round_json_walks_structures() {
        let mut v = serde_json::json!({
            "a": [0.30000000000000004, {"b": 1.0000000000000002}],
            "n": 3,
            "s": "text"
        });
        round_json(&mut v);
        assert_eq!(v["a"][0], 0.3);
        assert_eq!(v["a"][1]["b"], 1.0);
        assert_eq!(v["n"], 3);
    }

    #[test]
    fn fmt_num_trims() {
        assert_eq!(fmt_num(6.0), "6");
        assert_eq!(fmt_num(7.75), "7.75");
        assert_eq!(fmt_num(0.375), "0.375");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333");
    }

    #[test]
    fn state_report_drops_zero_terms() {
        let state = StateVector::psi_basis(5, 0b00011).unwrap();
        let report = StateReport::new([0.0; 4], &state, (0.0, 0.0));
        assert_eq!(report.terms.len(), 1);
        assert_eq!(report.terms[0].label, "00011");
        assert!((report.terms[0].prob - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reports_serialize_deterministically() {
        let entries = [[(1.0, 2.0); 4]; 4];
        let report = AnalysisReport::NormalForm(BimatrixReport::new("classical", false, &entries));
        let a = serde_json::to_string(&to_rounded_json(&report).unwrap()).unwrap();
        let b = serde_json::to_string(&to_rounded_json(&report).unwrap()).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("\"report\":\"normal-form\""));
    }
}
