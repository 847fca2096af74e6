//! Shared pieces of the tab-separated reports.

use num_rational::Ratio;

use crate::mining::MiningParams;
use crate::passage::RelaxationMode;

pub const TOOL_VERSION: &str = concat!("valence ", env!("CARGO_PKG_VERSION"));

/// Run parameters written as `#`-prefixed header lines at the top of every
/// report.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: String,
    /// `(role, path)` pairs, in command-line order.
    pub inputs: Vec<(String, String)>,
    pub mode: Option<RelaxationMode>,
    pub mining: Option<MiningParams>,
    pub version: String,
}

impl RunManifest {
    pub fn new(command: impl Into<String>) -> RunManifest {
        RunManifest {
            command: command.into(),
            inputs: Vec::new(),
            mode: None,
            mining: None,
            version: TOOL_VERSION.to_string(),
        }
    }

    pub fn input(mut self, role: impl Into<String>, path: impl Into<String>) -> RunManifest {
        self.inputs.push((role.into(), path.into()));
        self
    }

    pub fn header(&self) -> String {
        let mut out = format!("#tool\t{}\n#command\t{}\n", self.version, self.command);
        for (role, path) in &self.inputs {
            out.push_str(&format!("#input\t{role}\t{path}\n"));
        }
        if let Some(mode) = self.mode {
            out.push_str(&format!("#mode\t{mode}\n"));
        }
        if let Some(p) = &self.mining {
            out.push_str(&format!(
                "#epsilon\t{:e}\n#max_iterations\t{}\n",
                p.epsilon, p.max_iterations
            ));
        }
        out
    }
}

/// Renders `value` as a percentage with two decimals, rounding half up.
/// Works on the exact rational, so `3/8` gives `37.50` and `2/3` gives `66.67`.
pub fn format_percent(value: Ratio<u64>) -> String {
    let numer = u128::from(*value.numer()) * 10_000;
    let denom = u128::from(*value.denom());
    let mut hundredths = numer / denom;
    if 2 * (numer % denom) >= denom {
        hundredths += 1;
    }
    format!("{}.{:02}", hundredths / 100, hundredths % 100)
}

pub fn format_score(value: f64) -> String {
    format!("{value:.6}")
}
