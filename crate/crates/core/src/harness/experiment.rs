//! Batch runner: generate, extract a separated subset when needed, verify,
//! and write one JSON line plus one CSV row per trial.
//!
//! Trials run in parallel; records are collected and written in trial order,
//! so outputs are byte-identical across runs and thread counts.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{sig12, verify_theorem1_with, BoundReport, Verdict, VerifyOptions};
use crate::dimension::DimensionMode;
use crate::error::Result;
use crate::harness::generate::{gen_instance, gen_radii, GeneratorSpec, RadiusSpec};
use crate::metric::TOLERANCE;
use crate::packing::{is_r_separated, max_separated_subset_exact, max_separated_subset_greedy};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Extraction {
    #[default]
    Exact,
    Greedy,
}

/// `count` trials sharing one generator and one radius spec. Trial `t` of
/// the group uses seeds `generator.seed + t` and `radii.seed + t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialGroup {
    pub generator: GeneratorSpec,
    pub radii: RadiusSpec,
    #[serde(default = "one")]
    pub count: usize,
}

fn one() -> usize {
    1
}

fn default_tolerance() -> f64 {
    TOLERANCE
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub trials: Vec<TrialGroup>,
    #[serde(default)]
    pub mode: DimensionMode,
    #[serde(default)]
    pub extraction: Extraction,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    pub jsonl: PathBuf,
    pub csv: PathBuf,
}

impl ExperimentConfig {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        let mut cfg: ExperimentConfig = serde_json::from_str(&text)?;
        // relative output paths are taken relative to the config file
        if let Some(dir) = path.as_ref().parent() {
            for p in [&mut cfg.jsonl, &mut cfg.csv] {
                if p.is_relative() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub family: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    pub seed: u64,
    pub radii: String,
    /// Points before extraction.
    pub raw_n: usize,
    pub extracted: bool,
    #[serde(flatten)]
    pub report: BoundReport,
}

#[derive(Debug, Serialize)]
struct CsvRow<'a> {
    family: &'a str,
    n: usize,
    d: Option<usize>,
    seed: u64,
    rbar: f64,
    diam: f64,
    ddim_subset: f64,
    ddim_ambient: f64,
    bound_theorem1: f64,
    n_over_bound: f64,
    verdict: Verdict,
}

impl<'a> From<&'a TrialRecord> for CsvRow<'a> {
    fn from(r: &'a TrialRecord) -> Self {
        let rep = &r.report;
        CsvRow {
            family: &r.family,
            n: rep.n,
            d: r.d,
            seed: r.seed,
            rbar: rep.rbar,
            diam: rep.diam,
            ddim_subset: rep.ddim.subset_upper,
            ddim_ambient: rep.ddim.ambient_upper,
            bound_theorem1: rep.bounds.theorem1,
            n_over_bound: sig12(rep.n as f64 / rep.bounds.theorem1),
            verdict: rep.verdict,
        }
    }
}

/// Runs one trial: generate, assign radii, extract if the raw set is not
/// separated, verify.
pub fn run_trial(
    trial: usize,
    group: &TrialGroup,
    offset: u64,
    cfg: &ExperimentConfig,
) -> Result<TrialRecord> {
    let gen = group.generator.with_seed(group.generator.seed.wrapping_add(offset));
    let rspec = group.radii.with_seed(group.radii.seed.wrapping_add(offset));
    let inst = gen_instance(&gen)?;
    let all = inst.all_points();
    let radii = gen_radii(&inst, &all, &rspec)?;
    let (subset, extracted) = if is_r_separated(&inst, &all, &radii)? {
        (all, false)
    } else {
        let s = match cfg.extraction {
            Extraction::Exact => max_separated_subset_exact(&inst, &all, &radii)?,
            Extraction::Greedy => max_separated_subset_greedy(&inst, &all, &radii)?,
        };
        (s, true)
    };
    let report = verify_theorem1_with(
        &inst,
        &subset,
        &radii,
        VerifyOptions {
            mode: cfg.mode,
            tolerance: cfg.tolerance,
        },
    )?;
    Ok(TrialRecord {
        trial,
        family: gen.family.name().to_string(),
        d: gen.family.dim(),
        seed: gen.seed,
        radii: rspec.mode.to_string(),
        raw_n: inst.len(),
        extracted,
        report,
    })
}

/// All trials of `cfg`, in order, without touching the filesystem.
pub fn run_trials(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    let jobs: Vec<(&TrialGroup, u64)> = cfg
        .trials
        .iter()
        .flat_map(|g| (0..g.count as u64).map(move |t| (g, t)))
        .collect();
    jobs.par_iter()
        .enumerate()
        .map(|(i, &(g, t))| run_trial(i, g, t, cfg))
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LinkStats {
    pub asserted: bool,
    pub passed: usize,
    pub total: usize,
    pub worst_slack: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub trials: usize,
    pub passed: usize,
    pub extracted: usize,
    pub links: BTreeMap<String, LinkStats>,
    /// Asserted checks that failed, across all trials.
    pub asserted_failures: usize,
}

impl ExperimentSummary {
    pub fn from_records(records: &[TrialRecord]) -> Self {
        let mut s = ExperimentSummary {
            trials: records.len(),
            ..Default::default()
        };
        for r in records {
            let rep = &r.report;
            if rep.verdict == Verdict::Pass {
                s.passed += 1;
            }
            if r.extracted {
                s.extracted += 1;
            }
            let checks = std::iter::once(&rep.theorem1)
                .chain(&rep.chain)
                .chain(&rep.volumetric.checks);
            for c in checks {
                let e = s.links.entry(c.link.clone()).or_insert(LinkStats {
                    asserted: c.asserted,
                    worst_slack: f64::INFINITY,
                    ..Default::default()
                });
                e.total += 1;
                if c.holds {
                    e.passed += 1;
                } else if c.asserted {
                    s.asserted_failures += 1;
                }
                e.worst_slack = e.worst_slack.min(c.slack);
            }
        }
        s
    }

    pub fn success(&self) -> bool {
        self.asserted_failures == 0 && self.passed == self.trials
    }
}

impl fmt::Display for ExperimentSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "trials: {}  passed: {}  extracted: {}",
            self.trials, self.passed, self.extracted
        )?;
        writeln!(
            f,
            "{:<12} {:>9} {:>9} {:>10} {:>16}",
            "check", "asserted", "passed", "rate", "worst slack"
        )?;
        for (name, l) in &self.links {
            writeln!(
                f,
                "{:<12} {:>9} {:>9} {:>9.1}% {:>16.6e}",
                name,
                if l.asserted { "yes" } else { "no" },
                format!("{}/{}", l.passed, l.total),
                100.0 * l.passed as f64 / l.total.max(1) as f64,
                l.worst_slack
            )?;
        }
        Ok(())
    }
}

/// Runs `cfg` and writes its JSON-lines report and CSV summary.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentSummary> {
    let records = run_trials(cfg)?;
    write_outputs(&records, &cfg.jsonl, &cfg.csv)?;
    Ok(ExperimentSummary::from_records(&records))
}

pub fn write_outputs(records: &[TrialRecord], jsonl: &Path, csv_path: &Path) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(jsonl)?);
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;

    let mut w = csv::Writer::from_path(csv_path)?;
    if records.is_empty() {
        w.write_record([
            "family",
            "n",
            "d",
            "seed",
            "rbar",
            "diam",
            "ddim_subset",
            "ddim_ambient",
            "bound_theorem1",
            "n_over_bound",
            "verdict",
        ])?;
    }
    for r in records {
        w.serialize(CsvRow::from(r))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::generate::{Family, RadiusMode};

    fn config(trials: Vec<TrialGroup>, dir: &Path) -> ExperimentConfig {
        ExperimentConfig {
            trials,
            mode: DimensionMode::Exact,
            extraction: Extraction::Exact,
            tolerance: TOLERANCE,
            jsonl: dir.join("out.jsonl"),
            csv: dir.join("out.csv"),
        }
    }

    #[test]
    fn empty_trial_list() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config(vec![], dir.path());
        let s = run_experiment(&cfg).unwrap();
        assert_eq!(s.trials, 0);
        assert!(s.success());
        assert_eq!(std::fs::read_to_string(&cfg.jsonl).unwrap(), "");
        let csv = std::fs::read_to_string(&cfg.csv).unwrap();
        assert_eq!(csv.lines().count(), 1);
    }

    #[test]
    fn small_run_writes_rows() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config(
            vec![
                TrialGroup {
                    generator: GeneratorSpec::new(Family::Equidistant { n: 4 }, 0),
                    radii: RadiusSpec::new(RadiusMode::Constant { r: 0.99 }, 0),
                    count: 1,
                },
                TrialGroup {
                    generator: GeneratorSpec::new(Family::RandomMetric { n: 8 }, 10),
                    radii: RadiusSpec::new(RadiusMode::UniformRange { lo: 0.05, hi: 0.5 }, 3),
                    count: 3,
                },
            ],
            dir.path(),
        );
        let s = run_experiment(&cfg).unwrap();
        assert_eq!(s.trials, 4);
        assert!(s.success(), "{s}");
        let lines = std::fs::read_to_string(&cfg.jsonl).unwrap();
        assert_eq!(lines.lines().count(), 4);
        let first: serde_json::Value = serde_json::from_str(lines.lines().next().unwrap()).unwrap();
        assert_eq!(first["verdict"], "pass");
        assert_eq!(first["n"], 4);
        assert!(first["ddim"]["subset_upper"].is_number());
        assert!(first["bounds"]["theorem1"].is_number());
        assert!(first["chain"].is_array());
        let csv = std::fs::read_to_string(&cfg.csv).unwrap();
        assert_eq!(
            csv.lines().next().unwrap(),
            "family,n,d,seed,rbar,diam,ddim_subset,ddim_ambient,bound_theorem1,n_over_bound,verdict"
        );
        assert_eq!(csv.lines().count(), 5);
    }

    #[test]
    fn config_parses() {
        let text = r#"{
            "trials": [
              {"generator": {"family": "uniform_cube", "n": 10, "d": 2, "seed": 1},
               "radii": {"mode": "nn_fraction", "beta": 0.9}, "count": 5}
            ],
            "mode": "exact",
            "jsonl": "r.jsonl",
            "csv": "r.csv"
        }"#;
        let cfg: ExperimentConfig = serde_json::from_str(text).unwrap();
        assert_eq!(cfg.trials[0].count, 5);
        assert_eq!(cfg.tolerance, TOLERANCE);
        assert_eq!(cfg.extraction, Extraction::Exact);
    }
}
