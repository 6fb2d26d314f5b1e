//! Desk-scale statistical battery over MT output streams.
//!
//! A [`Battery`] is an ordered list of [`TestDefinition`]s plus a threshold
//! `ε`. Each test produces one or more named p-values; a test fails when any
//! of them falls strictly below `ε` or strictly above `1 - ε`.

pub mod close_pairs;
pub mod collision;
pub mod complexity;
pub mod pvalue;
pub mod serial;
pub mod stream;
pub mod walk;

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
pub use stream::{Mode, StreamView, WordSource};

pub const DEFAULT_THRESHOLD: f64 = 1e-10;
pub const MINI_CRUSH: &str = "mini-crush-v1";

/// Family and parameters of one battery entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params")]
pub enum TestSpec {
    LinearComp { n_bits: usize, bit_offset: u32 },
    CollisionOver { n: usize, d: u64, t: u32 },
    ClosePairs { n: usize, t: usize },
    RandomWalk1 { walks: usize, steps: usize },
    SerialUniformity { n: usize, cells: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Consumes {
    Bits,
    Uniforms,
}

impl TestSpec {
    pub fn family(&self) -> &'static str {
        match self {
            TestSpec::LinearComp { .. } => "LinearComp",
            TestSpec::CollisionOver { .. } => "CollisionOver",
            TestSpec::ClosePairs { .. } => "ClosePairs",
            TestSpec::RandomWalk1 { .. } => "RandomWalk1",
            TestSpec::SerialUniformity { .. } => "SerialUniformity",
        }
    }

    pub fn consumes(&self) -> Consumes {
        match self {
            TestSpec::LinearComp { .. } | TestSpec::RandomWalk1 { .. } => Consumes::Bits,
            _ => Consumes::Uniforms,
        }
    }

    /// Generator outputs the test reads.
    pub fn draws(&self) -> u64 {
        match *self {
            TestSpec::LinearComp { n_bits, .. } => n_bits as u64,
            TestSpec::CollisionOver { n, t, .. } => (n + t as usize - 1) as u64,
            TestSpec::ClosePairs { n, t } => (n * t) as u64,
            TestSpec::RandomWalk1 { walks, steps } => ((walks * steps) as u64).div_ceil(32),
            TestSpec::SerialUniformity { n, .. } => n as u64,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            TestSpec::LinearComp { n_bits, bit_offset } => complexity::validate(n_bits, bit_offset),
            TestSpec::CollisionOver { n, d, t } => collision::validate(n, d, t),
            TestSpec::ClosePairs { n, t } => close_pairs::validate(n, t),
            TestSpec::RandomWalk1 { walks, steps } => walk::validate(walks, steps),
            TestSpec::SerialUniformity { n, cells } => serial::validate(n, cells),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestDefinition {
    pub id: String,
    #[serde(flatten)]
    pub spec: TestSpec,
}

impl TestDefinition {
    pub fn new(id: impl Into<String>, spec: TestSpec) -> Self {
        Self {
            id: id.into(),
            spec,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        }
    }
}

/// Two-sided rule: fail iff `p < ε` or `p > 1 - ε`. `p == ε` passes.
pub fn verdict_for(p_values: &[(String, f64)], threshold: f64) -> Verdict {
    let fails = p_values
        .iter()
        .any(|&(_, p)| p < threshold || p > 1.0 - threshold);
    if fails {
        Verdict::Fail
    } else {
        Verdict::Pass
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    pub id: String,
    pub p_values: Vec<(String, f64)>,
    pub verdict: Verdict,
    pub draws: u64,
}

/// Runs one test on a fresh view.
pub fn run_test<S: WordSource>(
    definition: &TestDefinition,
    view: &mut StreamView<S>,
    threshold: f64,
) -> Result<TestResult> {
    let wrap = |e: Error| Error::Test {
        id: definition.id.clone(),
        source: Box::new(e),
    };
    let p_values = match definition.spec {
        TestSpec::LinearComp { n_bits, bit_offset } => {
            complexity::linear_comp_test(view, n_bits, bit_offset)
        }
        TestSpec::CollisionOver { n, d, t } => collision::collision_over_test(view, n, d, t),
        TestSpec::ClosePairs { n, t } => close_pairs::close_pairs_test(view, n, t),
        TestSpec::RandomWalk1 { walks, steps } => walk::random_walk_test(view, walks, steps),
        TestSpec::SerialUniformity { n, cells } => serial::serial_uniformity_test(view, n, cells),
    }
    .map_err(wrap)?;
    Ok(TestResult {
        id: definition.id.clone(),
        verdict: verdict_for(&p_values, threshold),
        p_values,
        draws: view.draws(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Battery {
    pub name: String,
    pub threshold: f64,
    pub tests: Vec<TestDefinition>,
}

impl Battery {
    /// The built-in desk-scale battery.
    pub fn mini_crush() -> Self {
        use TestSpec::*;
        let tests = vec![
            TestDefinition::new(
                "linearcomp.r0",
                LinearComp {
                    n_bits: 50_000,
                    bit_offset: 0,
                },
            ),
            TestDefinition::new(
                "linearcomp.r29",
                LinearComp {
                    n_bits: 50_000,
                    bit_offset: 29,
                },
            ),
            TestDefinition::new(
                "collisionover.a",
                CollisionOver {
                    n: 1 << 16,
                    d: 4096,
                    t: 2,
                },
            ),
            TestDefinition::new(
                "collisionover.b",
                CollisionOver {
                    n: 1 << 16,
                    d: 64,
                    t: 4,
                },
            ),
            TestDefinition::new("closepairs.a", ClosePairs { n: 1 << 13, t: 2 }),
            TestDefinition::new("closepairs.b", ClosePairs { n: 1 << 12, t: 3 }),
            TestDefinition::new(
                "randomwalk.a",
                RandomWalk1 {
                    walks: 10_000,
                    steps: 128,
                },
            ),
            TestDefinition::new(
                "randomwalk.b",
                RandomWalk1 {
                    walks: 10_000,
                    steps: 1024,
                },
            ),
            TestDefinition::new(
                "serial.a",
                SerialUniformity {
                    n: 1_000_000,
                    cells: 1024,
                },
            ),
        ];
        Self {
            name: MINI_CRUSH.to_string(),
            threshold: DEFAULT_THRESHOLD,
            tests,
        }
    }

    pub fn builtin(name: &str) -> Option<Self> {
        (name == MINI_CRUSH).then(Self::mini_crush)
    }

    /// Checks id uniqueness and every entry's parameters.
    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::BTreeSet::new();
        for def in &self.tests {
            if !seen.insert(def.id.as_str()) {
                return Err(Error::Config(format!("duplicate test id `{}`", def.id)));
            }
            def.spec.validate().map_err(|e| Error::Test {
                id: def.id.clone(),
                source: Box::new(e),
            })?;
        }
        if !(0.0..0.5).contains(&self.threshold) {
            return Err(Error::Config(format!(
                "threshold {} outside [0, 0.5)",
                self.threshold
            )));
        }
        Ok(())
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.tests.iter().map(|t| t.id.as_str())
    }

    /// Ids of the LinearComp entries, the failures expected from any
    /// F2-linear generator.
    pub fn linear_comp_ids(&self) -> Vec<String> {
        self.tests
            .iter()
            .filter(|t| matches!(t.spec, TestSpec::LinearComp { .. }))
            .map(|t| t.id.clone())
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("battery serializes") + "\n"
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// A built-in name, or a path to a battery JSON file.
    pub fn load(name_or_path: &str) -> Result<Self> {
        if let Some(b) = Self::builtin(name_or_path) {
            return Ok(b);
        }
        let path = Path::new(name_or_path);
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let battery = Self::from_json(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
        battery.validate()?;
        Ok(battery)
    }

    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }
}
