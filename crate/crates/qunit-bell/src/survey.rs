//! Sweep orchestration and report persistence.
//!
//! An exhaustive survey walks every canonical mask of one spin, groups the
//! masks into distinct correlation functions, maximizes the Bell function
//! once per group, and assembles records, a histogram over group maxima,
//! and provenance. Dimensions too large to enumerate are handled by the
//! sampled variant, which honors an explicit mask list and fills up with
//! a counter-based deterministic generator, so identical seeds reproduce
//! identical reports, serial or parallel.

use std::fmt;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bell::bell_max;
use crate::correlation::{
    distinct_correlations, fingerprint, CorrelationFingerprint, EXHAUSTIVE_CAP_TWO_S,
};
use crate::error::{Error, Result};
use crate::mask::ParityMask;
use crate::spin::SpinLabel;

const HISTOGRAM_LO: f64 = 2.0;
const HISTOGRAM_HI: f64 = 2.9;
const HISTOGRAM_WIDTH: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurveyMode {
    Exhaustive,
    Sampled,
}

impl fmt::Display for SurveyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SurveyMode::Exhaustive => "exhaustive",
            SurveyMode::Sampled => "sampled",
        })
    }
}

/// One mask's row in a survey.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyRecord {
    pub p: u64,
    pub group: usize,
    pub theta_star: f64,
    pub b_max: f64,
    pub violates: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyTotals {
    /// Size of the full canonical family at this spin, 2^(N-1) - 1.
    pub independent: u64,
    /// Distinct correlation functions among the surveyed masks.
    pub distinct: usize,
    pub min_b_max: f64,
    pub max_b_max: f64,
}

/// Counts of distinct groups per b_max bin; 0.02-wide bins over [2.0, 2.9].
/// Values outside the range land in the nearest edge bin so the counts
/// always sum to the distinct total.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u32>,
}

impl Histogram {
    fn build(values: impl Iterator<Item = f64>) -> Histogram {
        let bins = ((HISTOGRAM_HI - HISTOGRAM_LO) / HISTOGRAM_WIDTH).round() as usize;
        let edges = (0..=bins)
            .map(|k| HISTOGRAM_LO + HISTOGRAM_WIDTH * k as f64)
            .collect();
        let mut counts = vec![0u32; bins];
        for v in values {
            let raw = ((v - HISTOGRAM_LO) / HISTOGRAM_WIDTH).floor() as isize;
            let idx = raw.clamp(0, bins as isize - 1) as usize;
            counts[idx] += 1;
        }
        Histogram { edges, counts }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    pub mode: SurveyMode,
    pub grid_points: usize,
    pub refine_tol: f64,
    pub seed: Option<u64>,
    /// Exact duplicates removed from an explicit sample list.
    pub duplicates_collapsed: usize,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyReport {
    pub spin: SpinLabel,
    pub records: Vec<SurveyRecord>,
    pub histogram: Histogram,
    pub totals: SurveyTotals,
    pub provenance: Provenance,
}

/// Sampled-mode request: explicit masks first, then `count` random fills.
#[derive(Debug, Clone, Default)]
pub struct SampleSpec {
    pub count: usize,
    pub seed: u64,
    pub include: Vec<u64>,
}

fn family_size(spin: SpinLabel) -> u64 {
    (1u64 << (spin.dimension() - 1)) - 1
}

fn finish_report(
    spin: SpinLabel,
    mut records: Vec<SurveyRecord>,
    group_maxima: &[f64],
    provenance: Provenance,
) -> SurveyReport {
    records.sort_by_key(|r| r.p);
    let min_b = group_maxima.iter().copied().fold(f64::INFINITY, f64::min);
    let max_b = group_maxima
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    SurveyReport {
        spin,
        histogram: Histogram::build(group_maxima.iter().copied()),
        totals: SurveyTotals {
            independent: family_size(spin),
            distinct: group_maxima.len(),
            min_b_max: min_b,
            max_b_max: max_b,
        },
        records,
        provenance,
    }
}

fn provenance(
    mode: SurveyMode,
    grid_points: usize,
    refine_tol: f64,
    started: Instant,
) -> Provenance {
    Provenance {
        version: env!("CARGO_PKG_VERSION").to_string(),
        mode,
        grid_points,
        refine_tol,
        seed: None,
        duplicates_collapsed: 0,
        wall_time_s: started.elapsed().as_secs_f64(),
    }
}

/// Exhaustive survey over every canonical mask of one spin.
///
/// The Bell maximum is computed once per distinct correlation group (all
/// members share it); group maximization runs in parallel and the merge is
/// ordered, so the report does not depend on scheduling.
pub fn survey(spin: SpinLabel, grid_points: usize, refine_tol: f64) -> Result<SurveyReport> {
    let started = Instant::now();
    if spin.two_s() > EXHAUSTIVE_CAP_TWO_S {
        return Err(Error::ExhaustiveCap {
            two_s: spin.two_s(),
            cap: EXHAUSTIVE_CAP_TWO_S,
        });
    }
    let groups = distinct_correlations(spin)?;
    let maxima: Vec<(f64, f64)> = groups
        .groups
        .par_iter()
        .map(|members| {
            let rep = ParityMask::from_integer(spin, members[0])?;
            let r = bell_max(&rep, grid_points, refine_tol)?;
            Ok((r.theta_star, r.b_max))
        })
        .collect::<Result<_>>()?;

    let mut records = Vec::with_capacity(family_size(spin) as usize);
    for (gid, members) in groups.groups.iter().enumerate() {
        let (theta_star, b_max) = maxima[gid];
        for &p in members {
            records.push(SurveyRecord {
                p,
                group: gid,
                theta_star,
                b_max,
                violates: b_max > 2.0,
            });
        }
    }
    let group_maxima: Vec<f64> = maxima.iter().map(|&(_, b)| b).collect();
    Ok(finish_report(
        spin,
        records,
        &group_maxima,
        provenance(SurveyMode::Exhaustive, grid_points, refine_tol, started),
    ))
}

/// splitmix64 finalizer keyed by (seed, index); draw i is independent of
/// every other draw, so parallel shards can reproduce any slice.
fn keyed_random(seed: u64, index: u64) -> u64 {
    let mut z = seed
        ^ index
            .wrapping_mul(0x9E3779B97F4A7C15)
            .wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Survey an explicit and/or randomly sampled mask set.
///
/// Explicit masks are honored verbatim (exact duplicates collapse with a
/// count in provenance); random fills draw canonical masks not yet in the
/// set. Records keep the requested P even when evaluation uses the
/// complement-canonical form, so published non-canonical labels survive
/// round trips into the report.
pub fn sample_survey(
    spin: SpinLabel,
    spec: &SampleSpec,
    grid_points: usize,
    refine_tol: f64,
) -> Result<SurveyReport> {
    let started = Instant::now();
    let mut requested: Vec<u64> = Vec::new();
    let mut duplicates = 0usize;
    for &p in &spec.include {
        let mask = ParityMask::from_integer(spin, p)?;
        if mask.is_trivial() {
            return Err(Error::TrivialMask { p });
        }
        if requested.contains(&p) {
            duplicates += 1;
        } else {
            requested.push(p);
        }
    }

    let lo = 1u64 << (spin.dimension() - 1);
    let span = family_size(spin);
    // the filler only draws canonical masks; it can never exceed the family
    let already_canonical = requested.iter().filter(|&&p| p >= lo).count() as u64;
    if spec.count as u64 > span - already_canonical {
        return Err(Error::BadArguments(format!(
            "sample count {} exceeds the {} canonical masks not already requested",
            spec.count,
            span - already_canonical
        )));
    }
    let mut index = 0u64;
    let mut filled = 0usize;
    while filled < spec.count {
        let p = lo + keyed_random(spec.seed, index) % span;
        index += 1;
        if !requested.contains(&p) {
            requested.push(p);
            filled += 1;
        }
    }

    // group the sample by correlation fingerprint, first-seen order over
    // ascending requested P
    let mut order: Vec<u64> = requested.clone();
    order.sort_unstable();
    let prints: Vec<(u64, CorrelationFingerprint)> = order
        .par_iter()
        .map(|&p| Ok((p, fingerprint(&ParityMask::from_integer(spin, p)?)?)))
        .collect::<Result<_>>()?;
    let mut reps: Vec<(usize, u64, CorrelationFingerprint)> = Vec::new();
    let mut group_of: Vec<(u64, usize)> = Vec::new();
    for (p, print) in &prints {
        let gid = match reps.iter().find(|(_, _, rep)| rep.matches(print)) {
            Some(&(gid, _, _)) => gid,
            None => {
                let gid = reps.len();
                reps.push((gid, *p, print.clone()));
                gid
            }
        };
        group_of.push((*p, gid));
    }

    let maxima: Vec<(f64, f64)> = reps
        .par_iter()
        .map(|(_, p, _)| {
            let r = bell_max(
                &ParityMask::from_integer(spin, *p)?,
                grid_points,
                refine_tol,
            )?;
            Ok((r.theta_star, r.b_max))
        })
        .collect::<Result<_>>()?;

    let records: Vec<SurveyRecord> = group_of
        .iter()
        .map(|&(p, gid)| {
            let (theta_star, b_max) = maxima[gid];
            SurveyRecord {
                p,
                group: gid,
                theta_star,
                b_max,
                violates: b_max > 2.0,
            }
        })
        .collect();
    let group_maxima: Vec<f64> = maxima.iter().map(|&(_, b)| b).collect();
    Ok(finish_report(
        spin,
        records,
        &group_maxima,
        Provenance {
            seed: Some(spec.seed),
            duplicates_collapsed: duplicates,
            ..provenance(SurveyMode::Sampled, grid_points, refine_tol, started)
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl SurveyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<SurveyReport> {
        serde_json::from_str(text).map_err(|e| Error::MalformedReport(e.to_string()))
    }

    /// Records plus a `#meta` totals trailer. Floats carry 17 significant
    /// digits so parsing returns bit-identical values.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("P,group,theta_star,b_max,violates\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{:.16e},{:.16e},{}\n",
                r.p, r.group, r.theta_star, r.b_max, r.violates
            ));
        }
        out.push_str(&format!(
            "#meta independent={} distinct={} min_b_max={:.16e} max_b_max={:.16e}\n",
            self.totals.independent,
            self.totals.distinct,
            self.totals.min_b_max,
            self.totals.max_b_max
        ));
        out
    }

    /// Parse the CSV layer back into records and totals.
    pub fn from_csv(text: &str) -> Result<(Vec<SurveyRecord>, SurveyTotals)> {
        let bad = |what: &str| Error::MalformedReport(what.to_string());
        let mut records = Vec::new();
        let mut totals = None;
        for (i, line) in text.lines().enumerate() {
            if i == 0 {
                if line != "P,group,theta_star,b_max,violates" {
                    return Err(bad("missing CSV header"));
                }
                continue;
            }
            if let Some(meta) = line.strip_prefix("#meta ") {
                let mut independent = None;
                let mut distinct = None;
                let mut min_b = None;
                let mut max_b = None;
                for field in meta.split_whitespace() {
                    let (key, value) = field.split_once('=').ok_or_else(|| bad("meta field"))?;
                    match key {
                        "independent" => independent = value.parse().ok(),
                        "distinct" => distinct = value.parse().ok(),
                        "min_b_max" => min_b = value.parse().ok(),
                        "max_b_max" => max_b = value.parse().ok(),
                        _ => return Err(bad("unknown meta key")),
                    }
                }
                totals = Some(SurveyTotals {
                    independent: independent.ok_or_else(|| bad("meta independent"))?,
                    distinct: distinct.ok_or_else(|| bad("meta distinct"))?,
                    min_b_max: min_b.ok_or_else(|| bad("meta min_b_max"))?,
                    max_b_max: max_b.ok_or_else(|| bad("meta max_b_max"))?,
                });
                continue;
            }
            let mut parts = line.split(',');
            let mut next = || parts.next().ok_or_else(|| bad("short CSV row"));
            records.push(SurveyRecord {
                p: next()?.parse().map_err(|_| bad("P"))?,
                group: next()?.parse().map_err(|_| bad("group"))?,
                theta_star: next()?.parse().map_err(|_| bad("theta_star"))?,
                b_max: next()?.parse().map_err(|_| bad("b_max"))?,
                violates: next()?.parse().map_err(|_| bad("violates"))?,
            });
        }
        Ok((records, totals.ok_or_else(|| bad("missing #meta trailer"))?))
    }
}

/// Write a report to disk in the requested format.
pub fn emit(report: &SurveyReport, path: &Path, format: ReportFormat) -> Result<()> {
    let body = match format {
        ReportFormat::Json => report.to_json(),
        ReportFormat::Csv => report.to_csv(),
    };
    std::fs::write(path, body).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
