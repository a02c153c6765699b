use serde::{Deserialize, Serialize};

/// Failures kept per report; the counts stay exact past this.
pub const MAX_DETAILS: usize = 32;

/// One instance that failed its check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub instance: String,
    pub observed: f64,
    pub bound: f64,
}

/// Outcome of one check family.
///
/// `worst_margin` is the smallest slack `bound − observed` seen over all
/// instances (negative on failure); it is `None` only when nothing ran.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_name: String,
    pub instances_run: u64,
    pub instances_passed: u64,
    pub worst_margin: Option<f64>,
    pub details: Vec<FailureRecord>,
}

impl CheckReport {
    pub fn new(check_name: impl Into<String>) -> Self {
        Self {
            check_name: check_name.into(),
            instances_run: 0,
            instances_passed: 0,
            worst_margin: None,
            details: Vec::new(),
        }
    }

    /// Records one instance with the given slack; `describe` runs only on failure.
    pub fn record(
        &mut self,
        pass: bool,
        observed: f64,
        bound: f64,
        describe: impl FnOnce() -> String,
    ) {
        self.instances_run += 1;
        let margin = bound - observed;
        self.worst_margin = Some(match self.worst_margin {
            Some(w) => w.min(margin),
            None => margin,
        });
        if pass {
            self.instances_passed += 1;
        } else if self.details.len() < MAX_DETAILS {
            self.details.push(FailureRecord {
                instance: describe(),
                observed,
                bound,
            });
        }
    }

    /// Records `observed ≤ bound`.
    pub fn record_le(&mut self, observed: f64, bound: f64, describe: impl FnOnce() -> String) {
        self.record(observed <= bound, observed, bound, describe);
    }

    pub fn passed(&self) -> bool {
        self.instances_passed == self.instances_run
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.instances_run += other.instances_run;
        self.instances_passed += other.instances_passed;
        self.worst_margin = match (self.worst_margin, other.worst_margin) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let room = MAX_DETAILS.saturating_sub(self.details.len());
        self.details.extend(other.details.into_iter().take(room));
    }

    /// One line such as `PASS carry 1234/1234 worst_margin=0.5`.
    pub fn summary_line(&self) -> String {
        format!(
            "{} {} {}/{} worst_margin={}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.check_name,
            self.instances_passed,
            self.instances_run,
            self.worst_margin
                .map_or("n/a".to_string(), |m| format!("{m:.3e}")),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn margins_and_failures() {
        let mut r = CheckReport::new("demo");
        assert_eq!(r.worst_margin, None);
        r.record_le(1.0, 3.0, || unreachable!());
        r.record_le(2.5, 3.0, || unreachable!());
        assert!(r.passed());
        assert_eq!(r.worst_margin, Some(0.5));
        r.record_le(4.0, 3.0, || "x=4".into());
        assert!(!r.passed());
        assert_eq!(r.worst_margin, Some(-1.0));
        assert_eq!(r.details[0].instance, "x=4");
        assert!(r.summary_line().starts_with("FAIL demo 2/3"));
    }

    proptest! {
        #[test]
        fn json_round_trip(obs in prop::collection::vec((-1e6f64..1e6, -1e6f64..1e6), 0..40)) {
            let mut r = CheckReport::new("rt");
            for (i, (o, b)) in obs.iter().enumerate() {
                r.record_le(*o, *b, || format!("case {i}"));
            }
            let text = serde_json::to_string(&r).unwrap();
            let back: CheckReport = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back, r);
        }
    }
}
