use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
}

/// Result of a bounded check. A pass certifies the axioms on the sample
/// and the witnesses produced for it, not globally.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub check: String,
    pub depth: usize,
    #[serde(rename = "result")]
    pub outcome: Outcome,
    pub counterexample: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl Verdict {
    pub fn pass(check: &str, depth: usize) -> Self {
        Verdict {
            check: check.into(),
            depth,
            outcome: Outcome::Pass,
            counterexample: None,
            reason: None,
        }
    }

    pub fn fail(check: &str, depth: usize, counterexample: Vec<String>, reason: impl Into<String>) -> Self {
        Verdict {
            check: check.into(),
            depth,
            outcome: Outcome::Fail,
            counterexample: Some(counterexample),
            reason: Some(reason.into()),
        }
    }

    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }

    pub(crate) fn from_run<E: std::fmt::Display>(
        check: &str,
        depth: usize,
        run: Result<Option<Vec<String>>, E>,
    ) -> Self {
        let run = run.map(|o| o.map(|c| (c, "violating quadruple (x', x, y, y')".to_string())));
        Self::from_run_with_reason(check, depth, run)
    }

    pub(crate) fn from_run_with_reason<E: std::fmt::Display>(
        check: &str,
        depth: usize,
        run: Result<Option<(Vec<String>, String)>, E>,
    ) -> Self {
        match run {
            Ok(None) => Self::pass(check, depth),
            Ok(Some((c, why))) => Self::fail(check, depth, c, why),
            // a witness that cannot be produced is a failure, not a skip
            Err(e) => Self::fail(check, depth, Vec::new(), e.to_string()),
        }
    }
}
