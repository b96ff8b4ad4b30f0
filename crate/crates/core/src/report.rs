//! Value-object reports: every suite returns the full list of checks it ran,
//! each with a verdict and, on failure, a witness. Field order is fixed so
//! identical inputs serialize to identical bytes.

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub witness: Option<Value>,
}

impl CheckResult {
    pub fn pass(name: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            passed: true,
            witness: None,
        }
    }

    pub fn fail(name: impl Into<String>, witness: Value) -> Self {
        CheckResult {
            name: name.into(),
            passed: false,
            witness: Some(witness),
        }
    }

    pub fn from_bool(name: impl Into<String>, passed: bool, witness_on_fail: Value) -> Self {
        if passed {
            CheckResult::pass(name)
        } else {
            CheckResult::fail(name, witness_on_fail)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub descriptor: Value,
    pub seed: u64,
    pub samples: u64,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn new(command: impl Into<String>, descriptor: Value, seed: u64, samples: u64) -> Self {
        Report {
            command: command.into(),
            descriptor,
            seed,
            samples,
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: CheckResult) {
        self.checks.push(check);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    /// One check per row: name,passed,witness (witness JSON-encoded, quoted).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,passed,witness\n");
        for c in &self.checks {
            let witness = match &c.witness {
                None => String::new(),
                Some(v) => {
                    let raw = serde_json::to_string(v).expect("witness serializes");
                    format!("\"{}\"", raw.replace('"', "\"\""))
                }
            };
            out.push_str(&format!("{},{},{}\n", c.name, c.passed, witness));
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} (seed {}, samples {})\n", self.command, self.seed, self.samples);
        for c in &self.checks {
            out.push_str(&format!(
                "  [{}] {}\n",
                if c.passed { "ok" } else { "FAIL" },
                c.name
            ));
            if let Some(w) = &c.witness {
                out.push_str(&format!("       witness: {w}\n"));
            }
        }
        out.push_str(if self.passed() {
            "all checks passed\n"
        } else {
            "SOME CHECKS FAILED\n"
        });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn json_shape_is_stable() {
        let mut r = Report::new("demo", json!({"system": "C", "n": 2}), 42, 1);
        r.push(CheckResult::pass("alpha"));
        r.push(CheckResult::fail("beta", json!({"entry": "-1"})));
        // serde_json maps sort their keys, so descriptor order is n, system.
        assert_eq!(
            r.to_json_string(),
            "{\"command\":\"demo\",\"descriptor\":{\"n\":2,\"system\":\"C\"},\"seed\":42,\
             \"samples\":1,\"checks\":[{\"name\":\"alpha\",\"passed\":true,\"witness\":null},\
             {\"name\":\"beta\",\"passed\":false,\"witness\":{\"entry\":\"-1\"}}]}"
        );
        assert!(!r.passed());
        let back: Report = serde_json::from_str(&r.to_json_string()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn csv_and_text_render() {
        let mut r = Report::new("demo", json!(null), 1, 2);
        r.push(CheckResult::pass("a"));
        r.push(CheckResult::fail("b", json!({"k": 1})));
        let csv = r.to_csv();
        assert!(csv.starts_with("name,passed,witness\n"));
        assert!(csv.contains("a,true,\n"));
        assert!(csv.contains("b,false,\"{\"\"k\"\":1}\"\n"));
        assert!(r.to_text().contains("SOME CHECKS FAILED"));
    }
}
