//! Verdict types shared by every checker: a flat list of failures, each
//! carrying the name of the violated law and a minimal witness.

use serde::{Deserialize, Serialize};

/// One violated law together with the morphism (or element) ids that
/// witness the violation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    /// Name of the law or check that failed, e.g. `"associativity"`,
    /// `"R3"`, `"structural/dangling-identity"`.
    pub law: String,
    /// Ids witnessing the failure, in the order the law quantifies them.
    pub witness: Vec<usize>,
    /// Short human-readable elaboration.
    pub note: String,
}

impl Failure {
    pub fn new(law: impl Into<String>, witness: Vec<usize>, note: impl Into<String>) -> Self {
        Failure { law: law.into(), witness, note: note.into() }
    }

    pub fn is_structural(&self) -> bool {
        self.law.starts_with("structural/")
    }
}

/// Outcome of a validation pass. `ok` holds exactly when `failures` is
/// empty.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub failures: Vec<Failure>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn push(&mut self, f: Failure) {
        self.failures.push(f);
    }

    /// True when some failure is structural (malformed data) rather than
    /// a law violation.
    pub fn has_structural(&self) -> bool {
        self.failures.iter().any(Failure::is_structural)
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.failures.extend(other.failures);
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.ok() {
            return writeln!(f, "ok");
        }
        for fail in &self.failures {
            writeln!(f, "FAIL {}  witness {:?}  {}", fail.law, fail.witness, fail.note)?;
        }
        Ok(())
    }
}

/// Per-axiom verdicts for a named axiom system (R1-R4, J1-J3, RR1-RR4).
/// Only the first witness per failed axiom is retained.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub axioms: Vec<AxiomCheck>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub axiom: String,
    pub ok: bool,
    /// First counterexample, as morphism ids in quantifier order.
    pub witness: Option<Vec<usize>>,
    pub note: String,
}

impl AxiomReport {
    pub fn ok(&self) -> bool {
        self.axioms.iter().all(|a| a.ok)
    }

    pub fn pass(&mut self, axiom: impl Into<String>) {
        self.axioms.push(AxiomCheck {
            axiom: axiom.into(),
            ok: true,
            witness: None,
            note: String::new(),
        });
    }

    pub fn fail(
        &mut self,
        axiom: impl Into<String>,
        witness: Vec<usize>,
        note: impl Into<String>,
    ) {
        self.axioms.push(AxiomCheck {
            axiom: axiom.into(),
            ok: false,
            witness: Some(witness),
            note: note.into(),
        });
    }

    pub fn failed(&self, axiom: &str) -> bool {
        self.axioms.iter().any(|a| a.axiom == axiom && !a.ok)
    }
}

impl std::fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for a in &self.axioms {
            if a.ok {
                writeln!(f, "{:12} ok", a.axiom)?;
            } else {
                writeln!(
                    f,
                    "{:12} FAIL  witness {:?}  {}",
                    a.axiom,
                    a.witness.as_deref().unwrap_or(&[]),
                    a.note
                )?;
            }
        }
        Ok(())
    }
}
