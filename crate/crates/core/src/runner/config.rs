use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::group::{FamilyTag, GroupInstance};

#[derive(Clone, Debug, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub family: String,
    /// Torus rank; ignored by the other families.
    #[serde(default)]
    pub rank: Option<usize>,
    pub sizes: Vec<u64>,
}

#[derive(Clone, Debug, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub families: Vec<FamilySpec>,
    pub r_schedule: Vec<usize>,
    #[serde(default)]
    pub gamma_d: Option<usize>,
    #[serde(default = "yes")]
    pub homology: bool,
    #[serde(default)]
    pub two_route: bool,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default = "one")]
    pub workers: usize,
    /// Fill the `runtime_ms` column. Off by default so that reports are
    /// byte-reproducible.
    #[serde(default)]
    pub record_timings: bool,
}

fn yes() -> bool {
    true
}

fn one() -> usize {
    1
}

fn default_output() -> PathBuf {
    PathBuf::from("results")
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Checks the schedule and every family parameter without building any
    /// quotient.
    pub fn validate(&self) -> Result<()> {
        if self.r_schedule.is_empty() {
            return Err(Error::Config("empty R schedule".into()));
        }
        if let Some(&r) = self.r_schedule.iter().find(|&&r| r < 2 || r % 2 != 0) {
            return Err(Error::Config(format!(
                "R values must be even and at least 2, got {r}"
            )));
        }
        if self.families.is_empty() {
            return Err(Error::Config("no families configured".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("worker count must be positive".into()));
        }
        for f in &self.families {
            let (tag, group) = f.instantiate()?;
            if f.sizes.is_empty() {
                return Err(Error::Config(format!(
                    "family {} has an empty size list",
                    tag.as_str()
                )));
            }
            for &s in &f.sizes {
                group
                    .check_size(s)
                    .map_err(|e| Error::Config(format!("{}: {e}", tag.as_str())))?;
            }
        }
        Ok(())
    }
}

impl FamilySpec {
    pub fn instantiate(&self) -> Result<(FamilyTag, GroupInstance)> {
        let tag: FamilyTag = self
            .family
            .parse()
            .map_err(|e: Error| Error::Config(e.to_string()))?;
        let group =
            GroupInstance::from_tag(tag, self.rank).map_err(|e| Error::Config(e.to_string()))?;
        Ok((tag, group))
    }
}
