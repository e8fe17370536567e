//! Parametric study engine: actuator placement, frequency, and stiffness
//! sweeps producing plot-ready peak-acceleration samples.
//!
//! A sweep case is one (position set, stiffness, frequency tuple). Cases are
//! enumerated lexicographically over those axes and evaluated independently:
//! rebuild the mesh and system for the position set, drive each actuator at
//! its assigned frequency, solve the steady state, and record the peak field
//! at every translational node. Undamped-resonance cases are recorded as
//! skipped rather than failing the sweep. Case evaluation is data-parallel;
//! results are merged by case index, so the output is byte-identical for any
//! worker count.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fem::{assemble, generate_mesh};
use crate::model::{ActuatorAttachment, StudyConfig};
use crate::response::{
    base_excitation_forces, peak_acceleration_field, steady_state, PeakAccelerationField,
};

/// Preset actuator counts from the placement study tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresetCase {
    Single,
    Dual,
    Triple,
}

impl std::str::FromStr for PresetCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "single" => Ok(PresetCase::Single),
            "dual" => Ok(PresetCase::Dual),
            "triple" => Ok(PresetCase::Triple),
            other => Err(Error::SpecInvalid(format!(
                "unknown preset `{other}` (expected single, dual, or triple)"
            ))),
        }
    }
}

/// Reference actuator position configurations, as fractions of beam length.
///
/// Dual and triple sets follow the placement-study tables; the single set is
/// the left-hand dual column.
pub fn preset_configurations(case: PresetCase) -> Vec<Vec<f64>> {
    match case {
        PresetCase::Single => vec![vec![0.0], vec![0.03], vec![0.16], vec![0.33], vec![0.49]],
        PresetCase::Dual => vec![
            vec![0.0, 1.0],
            vec![0.03, 0.97],
            vec![0.16, 0.84],
            vec![0.33, 0.67],
            vec![0.49, 0.51],
        ],
        PresetCase::Triple => vec![
            vec![0.0, 0.49, 1.0],
            vec![0.03, 0.49, 0.97],
            vec![0.16, 0.49, 0.84],
            vec![0.33, 0.49, 0.67],
            vec![0.43, 0.49, 0.57],
        ],
    }
}

/// Inclusive frequency grid `start, start+step, …, stop` in Hz.
pub fn frequency_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    assert!(step > 0.0 && stop >= start, "grid must ascend");
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    (0..n).map(|i| start + (i as f64) * step).collect()
}

/// The haptic-range default grid: 150–250 Hz in 5 Hz steps.
pub fn default_frequency_grid() -> Vec<f64> {
    frequency_grid(150.0, 250.0, 5.0)
}

/// How per-actuator frequencies are assigned in multi-actuator cases.
#[derive(Debug, Clone, PartialEq)]
pub enum FrequencyAssignment {
    /// Every combination of grid values over the actuators (the default for
    /// the statistical studies).
    CrossProduct(Vec<f64>),
    /// Explicit per-actuator tuples, for scenario replays.
    Matched(Vec<Vec<f64>>),
}

impl FrequencyAssignment {
    fn tuples(&self, actuator_count: usize) -> Result<Vec<Vec<f64>>> {
        match self {
            FrequencyAssignment::CrossProduct(grid) => {
                if grid.is_empty() {
                    return Ok(Vec::new());
                }
                let mut tuples = vec![Vec::new()];
                for _ in 0..actuator_count {
                    let mut next = Vec::with_capacity(tuples.len() * grid.len());
                    for t in &tuples {
                        for &f in grid {
                            let mut t2 = t.clone();
                            t2.push(f);
                            next.push(t2);
                        }
                    }
                    tuples = next;
                }
                Ok(tuples)
            }
            FrequencyAssignment::Matched(tuples) => {
                for t in tuples {
                    if t.len() != actuator_count {
                        return Err(Error::SpecInvalid(format!(
                            "matched tuple {t:?} does not cover {actuator_count} actuators"
                        )));
                    }
                }
                Ok(tuples.clone())
            }
        }
    }

    fn frequencies(&self) -> Box<dyn Iterator<Item = f64> + '_> {
        match self {
            FrequencyAssignment::CrossProduct(grid) => Box::new(grid.iter().copied()),
            FrequencyAssignment::Matched(tuples) => {
                Box::new(tuples.iter().flat_map(|t| t.iter().copied()))
            }
        }
    }
}

/// Axes of a parametric study over a base scenario.
///
/// The base config supplies material, geometry, mesh resolution, gravity,
/// and the attachment template (stiffness, bolt mass, damping, amplitude).
/// When the base defines as many attachments as a position set has entries
/// they are reused positionally; otherwise the first attachment is the
/// template for every actuator.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub base: StudyConfig,
    /// Actuator position tuples in m.
    pub position_sets: Vec<Vec<f64>>,
    pub frequencies: FrequencyAssignment,
    /// Spring stiffness axis in N/m; empty keeps the template stiffness.
    pub stiffness_values: Vec<f64>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.base.attachments.is_empty() {
            return Err(Error::SpecInvalid(
                "base config must define at least one attachment as the actuator template"
                    .to_string(),
            ));
        }
        let length = self.base.geometry.length;
        for set in &self.position_sets {
            if set.is_empty() {
                return Err(Error::SpecInvalid("empty position set".to_string()));
            }
            for &p in set {
                if !(0.0..=length).contains(&p) {
                    return Err(Error::PositionOutOfRange {
                        position: p,
                        length,
                    });
                }
            }
        }
        for f in self.frequencies.frequencies() {
            if !(f > 0.0) {
                return Err(Error::SpecInvalid(format!(
                    "frequencies must be positive, got {f}"
                )));
            }
        }
        for &k in &self.stiffness_values {
            if !(k >= 0.0) {
                return Err(Error::SpecInvalid(format!(
                    "stiffness must be nonnegative, got {k}"
                )));
            }
        }
        Ok(())
    }
}

/// One record: the peak acceleration at one node for one case.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    pub case_id: String,
    /// Actuator positions of the case, m.
    pub positions: Vec<f64>,
    /// Per-actuator excitation frequencies, Hz.
    pub frequencies_hz: Vec<f64>,
    /// Actuator spring stiffness, N/m.
    pub stiffness: f64,
    /// Node coordinate the peak was evaluated at, m.
    pub evaluation_position: f64,
    /// Peak steady acceleration in g-units.
    pub peak_g: f64,
}

/// A case that could not be solved (undamped resonance).
#[derive(Debug, Clone, PartialEq)]
pub struct SkippedCase {
    pub case_id: String,
    pub reason: String,
}

/// All records of a sweep plus the cases skipped with reasons.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SampleSet {
    pub records: Vec<SampleRecord>,
    pub skipped: Vec<SkippedCase>,
}

enum CaseOutcome {
    Records(Vec<SampleRecord>),
    Skipped(SkippedCase),
}

struct CaseJob<'a> {
    case_id: String,
    frequencies: Vec<f64>,
    attachments: &'a [ActuatorAttachment],
    system: &'a crate::fem::AssembledSystem,
    positions: &'a [f64],
    stiffness: f64,
    gravity: f64,
}

fn evaluate_case(job: &CaseJob<'_>) -> Result<CaseOutcome> {
    let mut excitations = Vec::with_capacity(job.attachments.len());
    for (att, &f) in job.attachments.iter().zip(&job.frequencies) {
        excitations.push(base_excitation_forces(job.system, att, f)?);
    }
    let steady = match steady_state(job.system, &excitations) {
        Ok(s) => s,
        Err(Error::ResonanceSingular { frequency_hz }) => {
            return Ok(CaseOutcome::Skipped(SkippedCase {
                case_id: job.case_id.clone(),
                reason: format!("undamped resonance at {frequency_hz} Hz"),
            }))
        }
        Err(e) => return Err(e),
    };
    let field = peak_acceleration_field(job.system, &steady, job.gravity);
    let records = field
        .positions
        .iter()
        .zip(&field.peaks_g)
        .map(|(&x, &peak_g)| SampleRecord {
            case_id: job.case_id.clone(),
            positions: job.positions.to_vec(),
            frequencies_hz: job.frequencies.clone(),
            stiffness: job.stiffness,
            evaluation_position: x,
            peak_g,
        })
        .collect();
    Ok(CaseOutcome::Records(records))
}

#[cfg(feature = "parallel")]
fn evaluate_all(jobs: Vec<CaseJob<'_>>, workers: usize) -> Vec<Result<CaseOutcome>> {
    use rayon::prelude::*;
    if workers == 1 {
        return jobs.iter().map(evaluate_case).collect();
    }
    let run = || jobs.par_iter().map(evaluate_case).collect();
    if workers == 0 {
        run()
    } else {
        match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
            Ok(pool) => pool.install(run),
            Err(_) => run(),
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn evaluate_all(jobs: Vec<CaseJob<'_>>, _workers: usize) -> Vec<Result<CaseOutcome>> {
    jobs.iter().map(evaluate_case).collect()
}

/// Run the sweep with the given worker count (0 = library default pool,
/// 1 = sequential). Without the `parallel` feature every sweep is
/// sequential and `workers` is ignored.
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<SampleSet> {
    spec.validate()?;
    let base = &spec.base;
    let gravity = base.gravity_constant;

    let stiffness_axis: Vec<Option<f64>> = if spec.stiffness_values.is_empty() {
        vec![None]
    } else {
        spec.stiffness_values.iter().copied().map(Some).collect()
    };

    let mut out = SampleSet::default();
    for (pi, positions) in spec.position_sets.iter().enumerate() {
        let tuples = spec.frequencies.tuples(positions.len())?;
        for (ki, stiffness_override) in stiffness_axis.iter().enumerate() {
            let mut attachments = Vec::with_capacity(positions.len());
            for (j, &x) in positions.iter().enumerate() {
                let template = if base.attachments.len() == positions.len() {
                    &base.attachments[j]
                } else {
                    &base.attachments[0]
                };
                let mut att = template.at_position(x)?;
                if let Some(k) = stiffness_override {
                    att = att.with_stiffness(*k)?;
                }
                attachments.push(att);
            }
            let reported_stiffness = attachments[0].stiffness;

            let mesh = generate_mesh(base.geometry.length, base.element_count, positions)?;
            let system = assemble(&mesh, &base.material, &base.geometry, &attachments)?;

            let jobs: Vec<CaseJob<'_>> = tuples
                .iter()
                .enumerate()
                .map(|(fi, tuple)| CaseJob {
                    case_id: format!("p{pi:02}-k{ki:02}-f{fi:04}"),
                    frequencies: tuple.clone(),
                    attachments: &attachments,
                    system: &system,
                    positions,
                    stiffness: reported_stiffness,
                    gravity,
                })
                .collect();

            for outcome in evaluate_all(jobs, workers) {
                match outcome? {
                    CaseOutcome::Records(mut r) => out.records.append(&mut r),
                    CaseOutcome::Skipped(s) => out.skipped.push(s),
                }
            }
        }
    }
    Ok(out)
}

/// Sequential reference path, used by the benchmarks and as the fallback
/// when the `parallel` feature is disabled.
pub fn run_sweep_serial(spec: &SweepSpec) -> Result<SampleSet> {
    run_sweep(spec, 1)
}

/// Axis to group records by when summarizing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupBy {
    PositionSet,
    Stiffness,
    FrequencyTuple,
}

/// Five-number summary plus mean of a group's peak accelerations.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
    pub count: usize,
}

fn group_key(record: &SampleRecord, group_by: GroupBy) -> String {
    let join = |values: &[f64]| {
        values
            .iter()
            .map(|v| format!("{v}"))
            .collect::<Vec<_>>()
            .join("|")
    };
    match group_by {
        GroupBy::PositionSet => join(&record.positions),
        GroupBy::Stiffness => format!("{}", record.stiffness),
        GroupBy::FrequencyTuple => join(&record.frequencies_hz),
    }
}

/// Linear-interpolation quantile of a sorted sample (the common "type 7"
/// convention).
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Per-group quantiles of `peak_g`. Raw records stay available for external
/// distribution plots; this is only the box-plot skeleton.
pub fn quantile_summary(
    samples: &SampleSet,
    group_by: GroupBy,
) -> Result<BTreeMap<String, QuantileSummary>> {
    if samples.records.is_empty() {
        return Err(Error::EmptyGroup("no records".to_string()));
    }
    let mut groups: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in &samples.records {
        groups
            .entry(group_key(r, group_by))
            .or_default()
            .push(r.peak_g);
    }
    let mut out = BTreeMap::new();
    for (key, mut values) in groups {
        values.sort_by(|a, b| a.partial_cmp(b).expect("finite peaks"));
        let count = values.len();
        let mean = values.iter().sum::<f64>() / count as f64;
        out.insert(
            key,
            QuantileSummary {
                min: values[0],
                q1: quantile_sorted(&values, 0.25),
                median: quantile_sorted(&values, 0.5),
                q3: quantile_sorted(&values, 0.75),
                max: values[count - 1],
                mean,
                count,
            },
        );
    }
    Ok(out)
}

/// Fractions of records below, between, and above the two thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct BucketSummary {
    /// (≤ low, (low, high], > high) fractions; boundary values go to the
    /// lower bucket.
    pub fractions: (f64, f64, f64),
    pub counts: (usize, usize, usize),
}

/// Classify the records at the node nearest `evaluation_position` into
/// below/mid/above buckets.
///
/// The nearest sampled node must lie within half the local node spacing of
/// the requested position.
pub fn bucket_fractions(
    samples: &SampleSet,
    evaluation_position: f64,
    thresholds_g: (f64, f64),
) -> Result<BucketSummary> {
    let (low, high) = thresholds_g;
    assert!(low < high, "thresholds must ascend");

    let mut positions: Vec<f64> = samples
        .records
        .iter()
        .map(|r| r.evaluation_position)
        .collect();
    positions.sort_by(|a, b| a.partial_cmp(b).expect("finite positions"));
    positions.dedup();
    if positions.is_empty() {
        return Err(Error::NoSamplesAtPosition {
            position: evaluation_position,
        });
    }

    let nearest_idx = positions
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            (*a - evaluation_position)
                .abs()
                .partial_cmp(&(*b - evaluation_position).abs())
                .expect("finite")
        })
        .map(|(i, _)| i)
        .expect("nonempty positions");
    let nearest = positions[nearest_idx];

    let gap_left = (nearest_idx > 0).then(|| nearest - positions[nearest_idx - 1]);
    let gap_right =
        (nearest_idx + 1 < positions.len()).then(|| positions[nearest_idx + 1] - nearest);
    let local = gap_left.unwrap_or(f64::INFINITY).min(gap_right.unwrap_or(f64::INFINITY));
    let half_local = if local.is_finite() { 0.5 * local } else { f64::INFINITY };
    if (nearest - evaluation_position).abs() > half_local {
        return Err(Error::NoSamplesAtPosition {
            position: evaluation_position,
        });
    }

    let span = positions.last().unwrap() - positions.first().unwrap();
    let match_tol = 1e-12 * span.max(1.0);
    let mut counts = (0usize, 0usize, 0usize);
    for r in &samples.records {
        if (r.evaluation_position - nearest).abs() > match_tol {
            continue;
        }
        if r.peak_g <= low {
            counts.0 += 1;
        } else if r.peak_g <= high {
            counts.1 += 1;
        } else {
            counts.2 += 1;
        }
    }
    let total = (counts.0 + counts.1 + counts.2) as f64;
    if total == 0.0 {
        return Err(Error::NoSamplesAtPosition {
            position: evaluation_position,
        });
    }
    Ok(BucketSummary {
        fractions: (
            counts.0 as f64 / total,
            counts.1 as f64 / total,
            counts.2 as f64 / total,
        ),
        counts,
    })
}

/// Maximal contiguous intervals where the linearly interpolated peak field
/// is strictly below `threshold_g`, endpoints located by interpolation.
pub fn dead_zones(field: &PeakAccelerationField, threshold_g: f64) -> Vec<(f64, f64)> {
    let x = &field.positions;
    let f = &field.peaks_g;
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    let mut zones = Vec::new();
    let mut start = (f[0] < threshold_g).then_some(x[0]);
    for i in 0..n.saturating_sub(1) {
        let a = f[i] - threshold_g;
        let b = f[i + 1] - threshold_g;
        if a < 0.0 && b >= 0.0 {
            let cross = x[i] + (x[i + 1] - x[i]) * a / (a - b);
            zones.push((start.take().expect("zone open"), cross));
        } else if a >= 0.0 && b < 0.0 {
            let cross = x[i] + (x[i + 1] - x[i]) * a / (a - b);
            start = Some(cross);
        }
    }
    if let Some(s) = start {
        zones.push((s, x[n - 1]));
    }
    zones
}

/// Total length covered by a set of disjoint intervals.
pub fn zone_measure(zones: &[(f64, f64)]) -> f64 {
    zones.iter().map(|(a, b)| b - a).sum()
}

/// Dead zones of the pointwise-maximum envelope across fields: positions no
/// frequency set can excite above the threshold.
pub fn nullification_union(
    fields: &[PeakAccelerationField],
    threshold_g: f64,
) -> Result<Vec<(f64, f64)>> {
    let first = fields
        .first()
        .ok_or_else(|| Error::SpecInvalid("nullification needs at least one field".to_string()))?;
    let span = first
        .positions
        .last()
        .copied()
        .unwrap_or(1.0)
        .max(1e-300);
    for f in fields {
        if f.positions.len() != first.positions.len()
            || f.positions
                .iter()
                .zip(&first.positions)
                .any(|(a, b)| (a - b).abs() > 1e-12 * span)
        {
            return Err(Error::GridMismatch);
        }
    }
    let mut envelope = first.clone();
    for f in &fields[1..] {
        for (e, &v) in envelope.peaks_g.iter_mut().zip(&f.peaks_g) {
            *e = e.max(v);
        }
    }
    Ok(dead_zones(&envelope, threshold_g))
}
