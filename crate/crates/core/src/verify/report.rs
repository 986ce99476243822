//! Claim records and reports produced by the verification suites.
//!
//! Every check a suite performs is a named *claim* with a one-sentence
//! mathematical `anchor` stating exactly what was verified.  Reports render
//! either as human-readable text or as canonical JSON: claims sorted by id,
//! struct key order fixed, and the wall-clock duration nulled out, so two
//! runs with the same configuration produce byte-identical JSON.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// The claim could not be evaluated under the given configuration
    /// (e.g. an enumeration budget was exceeded); never counts as a pass.
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClaimRecord {
    pub id: String,
    /// The mathematical statement this claim checked.
    pub anchor: String,
    pub status: Status,
    /// For failures: a concrete counterexample or mismatch description.
    /// For skipped claims: the reason.  `None` for passes.
    pub counterexample: Option<String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Totals {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub seed: u64,
    pub primes: Vec<u64>,
    pub claims: Vec<ClaimRecord>,
    pub totals: Totals,
    /// Wall-clock time; excluded from canonical JSON so output is
    /// reproducible byte for byte.
    pub duration_ms: Option<u64>,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>, seed: u64, primes: &[u64]) -> VerificationReport {
        VerificationReport {
            suite: suite.into(),
            seed,
            primes: primes.to_vec(),
            claims: Vec::new(),
            totals: Totals::default(),
            duration_ms: None,
        }
    }

    /// Records a checked claim: `Ok` is a pass, `Err` carries the
    /// counterexample text.
    pub fn record(
        &mut self,
        id: impl Into<String>,
        anchor: impl Into<String>,
        outcome: Result<(), String>,
    ) {
        let (status, counterexample) = match outcome {
            Ok(()) => (Status::Pass, None),
            Err(ce) => (Status::Fail, Some(ce)),
        };
        self.claims.push(ClaimRecord {
            id: id.into(),
            anchor: anchor.into(),
            status,
            counterexample,
        });
    }

    pub fn record_skip(
        &mut self,
        id: impl Into<String>,
        anchor: impl Into<String>,
        reason: impl Into<String>,
    ) {
        self.claims.push(ClaimRecord {
            id: id.into(),
            anchor: anchor.into(),
            status: Status::Skipped,
            counterexample: Some(reason.into()),
        });
    }

    /// Sorts claims by id and recomputes the totals.  Claim ids must be
    /// unique within a report.
    pub fn finalize(&mut self) {
        self.claims.sort_by(|a, b| a.id.cmp(&b.id));
        debug_assert!(
            self.claims.windows(2).all(|w| w[0].id != w[1].id),
            "duplicate claim id"
        );
        let mut totals = Totals::default();
        for c in &self.claims {
            match c.status {
                Status::Pass => totals.pass += 1,
                Status::Fail => totals.fail += 1,
                Status::Skipped => totals.skipped += 1,
            }
        }
        self.totals = totals;
    }

    /// Combines several suite reports into one (claims re-sorted, totals
    /// recomputed; durations summed when all parts carry one).
    pub fn merge(
        suite: impl Into<String>,
        seed: u64,
        primes: &[u64],
        parts: Vec<VerificationReport>,
    ) -> VerificationReport {
        let mut out = VerificationReport::new(suite, seed, primes);
        let mut total_ms = Some(0u64);
        for part in parts {
            total_ms = match (total_ms, part.duration_ms) {
                (Some(a), Some(b)) => Some(a + b),
                _ => None,
            };
            out.claims.extend(part.claims);
        }
        out.finalize();
        out.duration_ms = total_ms;
        out
    }

    /// A report passes only if it actually verified something: no failures
    /// and at least one passing claim.  An all-skipped report does not pass.
    pub fn passed(&self) -> bool {
        self.totals.fail == 0 && self.totals.pass > 0
    }

    /// Deterministic JSON: claims sorted (via `finalize`), fixed key order,
    /// duration nulled.  Ends with a newline.
    pub fn to_canonical_json(&self) -> String {
        let mut copy = self.clone();
        copy.duration_ms = None;
        let mut s = serde_json::to_string_pretty(&copy).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for c in &self.claims {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skipped => "SKIP",
            };
            out.push_str(&format!("[{tag}] {}  {}\n", c.id, c.anchor));
            if let Some(ce) = &c.counterexample {
                out.push_str(&format!("       -> {ce}\n"));
            }
        }
        out.push_str(&format!(
            "suite={} seed={} primes={:?}: {} pass, {} fail, {} skipped",
            self.suite,
            self.seed,
            self.primes,
            self.totals.pass,
            self.totals.fail,
            self.totals.skipped
        ));
        match self.duration_ms {
            Some(ms) => out.push_str(&format!(" in {:.1}s\n", ms as f64 / 1000.0)),
            None => out.push('\n'),
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> VerificationReport {
        let mut r = VerificationReport::new("demo", 42, &[2, 3]);
        r.record("b_second", "two equals two", Ok(()));
        r.record("a_first", "one equals one", Err("found 1 != 1 at x=0".into()));
        r.record_skip("c_third", "big enumeration", "budget exceeded");
        r.finalize();
        r.duration_ms = Some(1234);
        r
    }

    #[test]
    fn finalize_sorts_and_totals() {
        let r = sample();
        let ids: Vec<&str> = r.claims.iter().map(|c| c.id.as_str()).collect();
        assert_eq!(ids, ["a_first", "b_second", "c_third"]);
        assert_eq!(
            r.totals,
            Totals {
                pass: 1,
                fail: 1,
                skipped: 1
            }
        );
        assert!(!r.passed());
    }

    #[test]
    fn canonical_json_is_frozen() {
        let mut r = VerificationReport::new("demo", 7, &[2]);
        r.record("only", "zero equals zero", Ok(()));
        r.finalize();
        r.duration_ms = Some(99); // must not appear in canonical output
        let expect = r#"{
  "suite": "demo",
  "seed": 7,
  "primes": [
    2
  ],
  "claims": [
    {
      "id": "only",
      "anchor": "zero equals zero",
      "status": "pass",
      "counterexample": null
    }
  ],
  "totals": {
    "pass": 1,
    "fail": 0,
    "skipped": 0
  },
  "duration_ms": null
}
"#;
        assert_eq!(r.to_canonical_json(), expect);
        // identical reports produce identical bytes even with different timings
        let mut r2 = r.clone();
        r2.duration_ms = Some(12345);
        assert_eq!(r.to_canonical_json(), r2.to_canonical_json());
    }

    #[test]
    fn merge_combines_and_resorts() {
        let mut a = VerificationReport::new("x", 1, &[2]);
        a.record("m_2", "claim", Ok(()));
        a.finalize();
        a.duration_ms = Some(10);
        let mut b = VerificationReport::new("y", 1, &[2]);
        b.record("m_1", "claim", Ok(()));
        b.finalize();
        b.duration_ms = Some(5);
        let merged = VerificationReport::merge("all", 1, &[2], vec![a, b]);
        assert_eq!(merged.suite, "all");
        assert_eq!(merged.claims[0].id, "m_1");
        assert_eq!(merged.totals.pass, 2);
        assert_eq!(merged.duration_ms, Some(15));
        assert!(merged.passed());
    }

    #[test]
    fn text_rendering_mentions_failures() {
        let r = sample();
        let text = r.render_text();
        assert!(text.contains("[FAIL] a_first"));
        assert!(text.contains("found 1 != 1 at x=0"));
        assert!(text.contains("[SKIP] c_third"));
        assert!(text.contains("1 pass, 1 fail, 1 skipped"));
        assert!(text.contains("in 1.2s"));
    }
}
