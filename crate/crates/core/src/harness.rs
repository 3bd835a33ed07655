//! The empirical face of the library: the full diagnose pipeline for one
//! objective direction, sphere-sampling surveys of how often the
//! identifiability package holds, and great-circle path probes that watch
//! the solution map jump between active manifolds.

use crate::body::ConvexBody;
use crate::criticality::{
    quadratic_decay, sensitivity, strong_criticality, CritOptions, CriticalityReport,
    DecayEstimate, SensitivityReport,
};
use crate::error::{Error, Result};
use crate::identify::{
    check_partial_smoothness, extract_manifold, ActiveManifold, PartialSmoothnessVerdict,
    ProbeOptions, PsOutcome,
};
use crate::numerics::{self, dist, dot};
use crate::rng;
use crate::solver::{maximize_linear, SolveResult, SolverOptions};
use crate::tol;
use crate::Float;
use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

/// `count` i.i.d. uniform directions on S^{n−1}: normalized standard
/// Gaussians from per-index ChaCha substreams, so sample `i` is identical
/// no matter the execution order.
pub fn sample_sphere(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    (0..count)
        .map(|i| rng::unit_sphere_point(&mut rng::substream(seed, i as u64), n))
        .collect()
}

/// Pipeline knobs for a single diagnosis.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DiagnoseOptions {
    pub solver: SolverOptions,
    pub seed: u64,
    /// Radius for the global decay estimate; `None` means
    /// `min(0.5, 0.25·R)`.
    pub decay_radius: Option<f64>,
    pub decay_count: usize,
    pub probe: ProbeOptions,
    pub crit: CritOptions,
    pub with_sensitivity: bool,
    pub fd_step: f64,
}

impl Default for DiagnoseOptions {
    fn default() -> Self {
        DiagnoseOptions {
            solver: SolverOptions::default(),
            seed: 0,
            decay_radius: None,
            decay_count: 300,
            probe: ProbeOptions::default(),
            crit: CritOptions::default(),
            with_sensitivity: false,
            fd_step: 1e-4,
        }
    }
}

/// Which part of the identifiability package failed first (canonical
/// order: uniqueness, manifold, continuity, sharpness, strict
/// complementarity, manifold decay).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FailCondition {
    UniqueMaximizer,
    Licq,
    NormalConeContinuity,
    Sharpness,
    StrictComplementarity,
    ManifoldDecay,
}

impl FailCondition {
    pub fn name(&self) -> &'static str {
        match self {
            FailCondition::UniqueMaximizer => "unique_maximizer",
            FailCondition::Licq => "licq",
            FailCondition::NormalConeContinuity => "normal_cone_continuity",
            FailCondition::Sharpness => "sharpness",
            FailCondition::StrictComplementarity => "strict_complementarity",
            FailCondition::ManifoldDecay => "manifold_decay",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Overall {
    Identifiable,
    NotIdentifiable,
    Inconclusive,
}

impl Overall {
    pub fn name(&self) -> &'static str {
        match self {
            Overall::Identifiable => "identifiable",
            Overall::NotIdentifiable => "not_identifiable",
            Overall::Inconclusive => "inconclusive",
        }
    }
}

/// Everything the pipeline learned about one objective direction.
/// `overall` is `Identifiable` exactly when the solve converged, the global
/// decay certifies a strong (hence unique) maximizer, partial smoothness
/// passes, and strong criticality holds.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DiagnosisReport {
    pub c: Vec<f64>,
    pub solve: Option<SolveResult>,
    pub decay_global: Option<DecayEstimate>,
    pub manifold: Option<ActiveManifold>,
    pub ps: Option<PartialSmoothnessVerdict>,
    pub crit: Option<CriticalityReport>,
    pub sens: Option<SensitivityReport>,
    pub overall: Overall,
    pub failing: Option<FailCondition>,
    /// Stage name when a numerical error forced an inconclusive verdict.
    pub inconclusive_stage: Option<String>,
}

impl DiagnosisReport {
    pub fn signature(&self) -> Vec<usize> {
        self.solve
            .as_ref()
            .map_or_else(Vec::new, |s| s.active.clone())
    }

    pub fn t_star(&self) -> Option<f64> {
        self.crit.as_ref().and_then(|c| c.strict_comp.t_star)
    }

    pub fn dim(&self) -> Option<usize> {
        self.manifold.as_ref().and_then(|m| m.dim)
    }

    pub fn delta_global(&self) -> Option<f64> {
        self.decay_global.as_ref().map(|d| d.delta_hat)
    }
}

/// Runs solve → global decay → manifold extraction → partial smoothness →
/// strong criticality (→ sensitivity). Numerical stage errors never panic
/// and never count as geometric failures: they yield an inconclusive
/// verdict carrying the stage name.
pub fn diagnose(body: &ConvexBody, c: &[f64], opts: &DiagnoseOptions) -> DiagnosisReport {
    let mut report = DiagnosisReport {
        c: c.to_vec(),
        solve: None,
        decay_global: None,
        manifold: None,
        ps: None,
        crit: None,
        sens: None,
        overall: Overall::Inconclusive,
        failing: None,
        inconclusive_stage: None,
    };
    let mut failures: Vec<FailCondition> = Vec::new();
    let mut inconclusive: Option<String> = None;

    let solve = match maximize_linear(body, c, &opts.solver) {
        Ok(s) => s,
        Err(e) => {
            report.inconclusive_stage = Some(alloc::format!("solve: {e}"));
            return report;
        }
    };
    report.solve = Some(solve.clone());

    let decay_radius = opts
        .decay_radius
        .unwrap_or_else(|| (0.25 * body.radius()).min(0.5));
    match quadratic_decay(
        body,
        c,
        &solve,
        decay_radius,
        opts.decay_count,
        opts.seed ^ 0x6465_6361,
    ) {
        Ok(d) => {
            if d.delta_hat <= tol::DELTA_TOL {
                failures.push(FailCondition::UniqueMaximizer);
            }
            report.decay_global = Some(d);
        }
        Err(e) => inconclusive = Some(alloc::format!("quadratic_decay: {e}")),
    }

    let manifold = match extract_manifold(body, &solve) {
        Ok(m) => m,
        Err(e) => {
            let stage = alloc::format!("extract_manifold: {e}");
            report.overall = finalize(&mut report, failures, Some(stage));
            return report;
        }
    };
    if !manifold.licq {
        failures.push(FailCondition::Licq);
    }
    report.manifold = Some(manifold.clone());

    let mut probe = opts.probe.clone();
    probe.seed = opts.seed ^ 0x7073_7073;
    match check_partial_smoothness(body, &manifold, &probe) {
        Ok(v) => {
            if v.cond_ii == Some(false) {
                failures.push(FailCondition::NormalConeContinuity);
            }
            if manifold.licq && !v.cond_iii {
                failures.push(FailCondition::Sharpness);
            }
            if manifold.licq && v.outcome() == PsOutcome::Inconclusive && inconclusive.is_none() {
                inconclusive = Some("normal_cone_continuity_probe".to_string());
            }
            report.ps = Some(v);
        }
        Err(e) => {
            if inconclusive.is_none() {
                inconclusive = Some(alloc::format!("partial_smoothness: {e}"));
            }
        }
    }

    if manifold.licq {
        let mut crit = opts.crit.clone();
        crit.seed = opts.seed ^ 0x6372_6974;
        match strong_criticality(body, c, &solve, &manifold, &crit) {
            Ok(r) => {
                match r.strict_comp.verdict {
                    crate::cones::RiVerdict::Interior => {}
                    _ => failures.push(FailCondition::StrictComplementarity),
                }
                if let Some(d) = &r.manifold_decay {
                    if d.delta_hat <= tol::DELTA_TOL {
                        failures.push(FailCondition::ManifoldDecay);
                    }
                }
                report.crit = Some(r);
            }
            Err(e) => {
                if inconclusive.is_none() {
                    inconclusive = Some(alloc::format!("strong_criticality: {e}"));
                }
            }
        }
    }

    if opts.with_sensitivity && manifold.licq {
        let strong = report.crit.as_ref().is_some_and(|c| c.strong);
        match sensitivity(
            body,
            c,
            &solve,
            &manifold,
            opts.fd_step,
            &opts.solver,
            strong,
        ) {
            Ok(s) => report.sens = Some(s),
            Err(e) => {
                if inconclusive.is_none() {
                    inconclusive = Some(alloc::format!("sensitivity: {e}"));
                }
            }
        }
    }

    report.overall = finalize(&mut report, failures, inconclusive);
    report
}

fn finalize(
    report: &mut DiagnosisReport,
    mut failures: Vec<FailCondition>,
    inconclusive: Option<String>,
) -> Overall {
    failures.sort();
    if let Some(first) = failures.first() {
        report.failing = Some(*first);
        return Overall::NotIdentifiable;
    }
    if let Some(stage) = inconclusive {
        report.inconclusive_stage = Some(stage);
        return Overall::Inconclusive;
    }
    let ps_ok = report.ps.as_ref().is_some_and(|v| v.passes());
    let crit_ok = report.crit.as_ref().is_some_and(|c| c.strong);
    let decay_ok = report
        .decay_global
        .as_ref()
        .is_some_and(|d| d.delta_hat > tol::DELTA_TOL);
    if report.solve.is_some() && decay_ok && ps_ok && crit_ok {
        Overall::Identifiable
    } else {
        Overall::Inconclusive
    }
}

/// One survey sample, kept slim enough to hold thousands of them.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SampleRecord {
    pub index: usize,
    pub c: Vec<f64>,
    pub verdict: Overall,
    pub failing: Option<FailCondition>,
    pub signature: Vec<usize>,
    pub delta_hat: Option<f64>,
    pub t_star: Option<f64>,
    pub dim: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FailureRecord {
    pub index: usize,
    pub c: Vec<f64>,
    pub failing: FailCondition,
}

/// Aggregated survey outcome. `identifiable + failures.len() +
/// inconclusive` always equals `total`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SurveyStats {
    pub total: usize,
    pub identifiable: usize,
    pub inconclusive: usize,
    pub seed: u64,
    pub failures: Vec<FailureRecord>,
    pub per_condition: BTreeMap<String, usize>,
    /// Active-set signature → count of samples landing on it.
    pub census: BTreeMap<String, usize>,
    pub samples: Vec<SampleRecord>,
}

/// Canonical printable form of an active-set signature: indices joined by
/// `+`, or `-` when empty.
pub fn signature_string(sig: &[usize]) -> String {
    if sig.is_empty() {
        return String::from("-");
    }
    let mut out = String::new();
    for (k, i) in sig.iter().enumerate() {
        if k > 0 {
            out.push('+');
        }
        out.push_str(&alloc::format!("{i}"));
    }
    out
}

/// Diagnoses `count` seeded sphere directions. Sample `i` draws from
/// substream `i` and its pipeline stages reseed from `seed ⊕ i`-derived
/// substreams, so the outcome is a pure function of `(body, i, seed, opts)`
/// — serial and parallel execution produce identical stats.
pub fn survey(body: &ConvexBody, count: usize, seed: u64, opts: &DiagnoseOptions) -> SurveyStats {
    let reports: Vec<SampleRecord> = (0..count)
        .map(|i| survey_sample(body, i, seed, opts))
        .collect();
    aggregate_survey(reports, seed)
}

/// One survey sample; exposed so a parallel driver can fan out and then
/// [`aggregate_survey`] in index order.
pub fn survey_sample(
    body: &ConvexBody,
    index: usize,
    seed: u64,
    opts: &DiagnoseOptions,
) -> SampleRecord {
    let c = rng::unit_sphere_point(&mut rng::substream(seed, index as u64), body.n());
    let mut o = opts.clone();
    o.seed = seed ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    let rep = diagnose(body, &c, &o);
    SampleRecord {
        index,
        c,
        verdict: rep.overall,
        failing: rep.failing,
        signature: rep.signature(),
        delta_hat: rep.delta_global(),
        t_star: rep.t_star(),
        dim: rep.dim(),
    }
}

/// Order-independent aggregation (samples are sorted by index first).
pub fn aggregate_survey(mut samples: Vec<SampleRecord>, seed: u64) -> SurveyStats {
    samples.sort_by_key(|s| s.index);
    let total = samples.len();
    let mut identifiable = 0;
    let mut inconclusive = 0;
    let mut failures = Vec::new();
    let mut per_condition: BTreeMap<String, usize> = BTreeMap::new();
    let mut census: BTreeMap<String, usize> = BTreeMap::new();
    for s in &samples {
        *census.entry(signature_string(&s.signature)).or_insert(0) += 1;
        match s.verdict {
            Overall::Identifiable => identifiable += 1,
            Overall::Inconclusive => inconclusive += 1,
            Overall::NotIdentifiable => {
                let failing = s
                    .failing
                    .expect("not-identifiable samples carry a condition");
                *per_condition.entry(failing.name().to_string()).or_insert(0) += 1;
                failures.push(FailureRecord {
                    index: s.index,
                    c: s.c.clone(),
                    failing,
                });
            }
        }
    }
    SurveyStats {
        total,
        identifiable,
        inconclusive,
        seed,
        failures,
        per_condition,
        census,
        samples,
    }
}

/// Great-circle path probe options.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PathOptions {
    pub solver: SolverOptions,
    pub seed: u64,
    pub decay_count: usize,
    pub decay_radius: Option<f64>,
    /// A step-to-step solution jump larger than
    /// `max(jump_floor, jump_factor · median drift)` flags a transition
    /// even when the active signature does not change.
    pub jump_factor: f64,
    pub jump_floor: Option<f64>,
    /// Reuse the previous step's solution as a warm start.
    pub warm_start: bool,
}

impl Default for PathOptions {
    fn default() -> Self {
        PathOptions {
            solver: SolverOptions::default(),
            seed: 0,
            decay_count: 200,
            decay_radius: None,
            jump_factor: 10.0,
            jump_floor: None,
            warm_start: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PathStep {
    pub index: usize,
    /// Angle along the great circle, in radians from `from`.
    pub theta: f64,
    pub c: Vec<f64>,
    pub signature: Option<Vec<usize>>,
    pub x: Option<Vec<f64>>,
    pub value: Option<f64>,
    pub delta_hat: Option<f64>,
    pub error: Option<String>,
}

/// A detected discontinuity: a maximal run of adjacent boundary steps
/// (signature changes and/or solution jumps), reported with the solution
/// jump across the whole run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Transition {
    pub start_index: usize,
    pub end_index: usize,
    pub theta_lo: f64,
    pub theta_hi: f64,
    pub jump: f64,
    pub sig_before: Vec<usize>,
    pub sig_after: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PathProbe {
    pub steps: Vec<PathStep>,
    pub transitions: Vec<Transition>,
    pub jump_threshold: f64,
}

/// Walks the great circle from `from` to `to` with `steps` uniform angles,
/// solving at every step and flagging where the solution map jumps between
/// manifolds.
pub fn path_probe(
    body: &ConvexBody,
    from: &[f64],
    to: &[f64],
    steps: usize,
    opts: &PathOptions,
) -> Result<PathProbe> {
    if steps < 2 {
        return Err(Error::InvalidInput(
            "path probe needs at least 2 steps".into(),
        ));
    }
    let f = numerics::normalized(from)
        .ok_or_else(|| Error::InvalidInput("`from` must be nonzero".into()))?;
    let t = numerics::normalized(to)
        .ok_or_else(|| Error::InvalidInput("`to` must be nonzero".into()))?;
    let cos_omega = dot(&f, &t).clamp(-1.0, 1.0);
    if 1.0 - cos_omega.abs() < 1e-12 {
        return Err(Error::InvalidInput(
            "`from` and `to` must not be parallel".into(),
        ));
    }
    let omega = Float::acos(cos_omega);
    let sin_omega = Float::sin(omega);
    let decay_radius = opts
        .decay_radius
        .unwrap_or_else(|| (0.25 * body.radius()).min(0.5));

    let mut path_steps: Vec<PathStep> = Vec::with_capacity(steps);
    let mut prev_x: Option<Vec<f64>> = None;
    for k in 0..steps {
        let s = k as f64 / (steps - 1) as f64;
        let a = Float::sin((1.0 - s) * omega) / sin_omega;
        let b = Float::sin(s * omega) / sin_omega;
        let c: Vec<f64> = f.iter().zip(&t).map(|(fi, ti)| a * fi + b * ti).collect();

        let mut solver = opts.solver.clone();
        if opts.warm_start {
            solver.warm_start = prev_x.clone();
        }
        let mut step = PathStep {
            index: k,
            theta: s * omega,
            c: c.clone(),
            signature: None,
            x: None,
            value: None,
            delta_hat: None,
            error: None,
        };
        match maximize_linear(body, &c, &solver) {
            Ok(r) => {
                step.delta_hat = quadratic_decay(
                    body,
                    &c,
                    &r,
                    decay_radius,
                    opts.decay_count.max(100),
                    opts.seed ^ (k as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15),
                )
                .ok()
                .map(|d| d.delta_hat);
                prev_x = Some(r.x.clone());
                step.signature = Some(r.active.clone());
                step.x = Some(r.x);
                step.value = Some(r.value);
            }
            Err(e) => {
                step.error = Some(e.to_string());
                prev_x = None;
            }
        }
        path_steps.push(step);
    }

    // Median step drift over consecutive solved steps.
    let mut drifts: Vec<f64> = Vec::new();
    for w in path_steps.windows(2) {
        if let (Some(a), Some(b)) = (&w[0].x, &w[1].x) {
            drifts.push(dist(a, b));
        }
    }
    let mut sorted = drifts.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite drifts"));
    let median = sorted.get(sorted.len() / 2).copied().unwrap_or(0.0);
    let floor = opts
        .jump_floor
        .unwrap_or_else(|| 1e-5 * (1.0 + body.radius()));
    let jump_threshold = (opts.jump_factor * median).max(floor);

    // Boundary steps, then maximal runs of adjacent boundaries.
    let mut boundary: Vec<usize> = Vec::new();
    for (k, w) in path_steps.windows(2).enumerate() {
        let sig_change = match (&w[0].signature, &w[1].signature) {
            (Some(a), Some(b)) => a != b,
            _ => false,
        };
        let jumped = match (&w[0].x, &w[1].x) {
            (Some(a), Some(b)) => dist(a, b) > jump_threshold,
            _ => false,
        };
        if sig_change || jumped {
            boundary.push(k);
        }
    }
    let mut transitions: Vec<Transition> = Vec::new();
    let mut i = 0;
    while i < boundary.len() {
        let start = boundary[i];
        let mut end = start;
        while i + 1 < boundary.len() && boundary[i + 1] == boundary[i] + 1 {
            i += 1;
            end = boundary[i];
        }
        i += 1;
        let (lo, hi) = (start, end + 1);
        let jump = match (&path_steps[lo].x, &path_steps[hi].x) {
            (Some(a), Some(b)) => dist(a, b),
            _ => f64::NAN,
        };
        transitions.push(Transition {
            start_index: lo,
            end_index: hi,
            theta_lo: path_steps[lo].theta,
            theta_hi: path_steps[hi].theta,
            jump,
            sig_before: path_steps[lo].signature.clone().unwrap_or_default(),
            sig_after: path_steps[hi].signature.clone().unwrap_or_default(),
        });
    }

    Ok(PathProbe {
        steps: path_steps,
        transitions,
        jump_threshold,
    })
}
