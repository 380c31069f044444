use std::time::Duration;

use relrw::analyze::{LawResult, Verdict};
use serde::Serialize;
use serde_json::Value;

/// Everything a command reports, in the shape written by `--json`.
#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub verdicts: Vec<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<Value>,
    /// Seconds, present only with `--timing` so that plain runs stay byte-stable.
    pub timing: Option<f64>,
    #[serde(skip)]
    pub lines: Vec<String>,
}

impl Report {
    pub fn new(command: &str, inputs: Value) -> Self {
        Report {
            command: command.into(),
            inputs,
            verdicts: Vec::new(),
            output: None,
            timing: None,
            lines: Vec::new(),
        }
    }

    pub fn verdict(&mut self, name: &str, anchor: &str, pass: bool, witness: Option<String>) {
        self.verdicts.push(Verdict::new(name, anchor, pass, witness));
    }

    pub fn law(&mut self, r: &LawResult) {
        let witness = r.counterexample.as_ref().map(|c| {
            let (t, s) = &c.witness;
            let mut text = format!("({t}, {s}) {} at trial {}", c.side, c.trial);
            for (name, pairs) in &c.inputs {
                let shown: Vec<String> = pairs.iter().map(|(l, r)| format!("({l}, {r})")).collect();
                text.push_str(&format!("; {name} = {{{}}}", shown.join(", ")));
            }
            text
        });
        let name = if r.informational {
            format!("{} (informational)", r.name)
        } else {
            r.name.clone()
        };
        // informational results never decide the exit code
        self.verdict(&name, &r.anchor, r.pass || r.informational, witness);
        if r.informational && !r.pass {
            if let Some(v) = self.verdicts.last_mut() {
                v.witness = v.witness.take().map(|w| format!("does not hold: {w}"));
            }
        }
    }

    pub fn line(&mut self, text: impl Into<String>) {
        self.lines.push(text.into());
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn finish(&mut self, elapsed: Option<Duration>) {
        self.timing = elapsed.map(|d| d.as_secs_f64());
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for line in &self.lines {
            out.push_str(line);
            out.push('\n');
        }
        for v in &self.verdicts {
            let status = if v.pass { "PASS" } else { "FAIL" };
            out.push_str(&format!("{status} {}  [{}]\n", v.name, v.anchor));
            if let Some(w) = &v.witness {
                out.push_str(&format!("     witness: {w}\n"));
            }
        }
        if !self.verdicts.is_empty() {
            let passed = self.verdicts.iter().filter(|v| v.pass).count();
            out.push_str(&format!("{passed}/{} verdicts pass\n", self.verdicts.len()));
        }
        if let Some(t) = self.timing {
            out.push_str(&format!("elapsed: {t:.3}s\n"));
        }
        out
    }

    pub fn render_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}
