//! Probability of the target falling in the cocked hat or in an unbounded
//! cell: Monte Carlo estimates, exact enumeration over two-ray selections,
//! and the tangent-circle reduction with its special-selection count.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;

use crate::arrangement::{in_unbounded_component, DirectionArc};
use crate::distributions::{validate_pairwise_intersection, ErrorModel, TwoRaySiteModel};
use crate::error::{Error, Result};
use crate::exec::{chunk_count, map_chunks, Execution};
use crate::geometry::{
    intersect_rays, lines_triangle, point_in_triangle, Angle, Cone, Line, Point2, Ray, Sign,
    Triangle,
};
use crate::rng::substream;
use crate::scenarios::Scenario;

/// One ray per site: bit `k` set selects the plus ray at site `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SelectionPattern {
    mask: u32,
    len: u8,
}

impl SelectionPattern {
    pub const MAX_SITES: usize = 31;

    pub fn new(mask: u32, len: usize) -> Self {
        assert!(len <= Self::MAX_SITES, "pattern length {len}");
        assert!(
            len == 32 || mask >> len == 0,
            "mask {mask:#b} too wide for {len} sites"
        );
        Self {
            mask,
            len: len as u8,
        }
    }

    pub fn from_signs(signs: &[Sign]) -> Self {
        let mask = signs
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == Sign::Plus)
            .fold(0u32, |m, (k, _)| m | (1 << k));
        Self::new(mask, signs.len())
    }

    /// Every selection for `n` sites, in mask order.
    pub fn all(n: usize) -> impl Iterator<Item = SelectionPattern> {
        (0..1u32 << n).map(move |m| SelectionPattern::new(m, n))
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn sign(&self, k: usize) -> Sign {
        if self.mask >> k & 1 == 1 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn signs(&self) -> Vec<Sign> {
        (0..self.len()).map(|k| self.sign(k)).collect()
    }

    /// Error angle of the selected ray at every site.
    pub fn errors(&self, sites: &[TwoRaySiteModel]) -> Vec<f64> {
        sites
            .iter()
            .enumerate()
            .map(|(k, m)| m.eps(self.sign(k)))
            .collect()
    }
}

impl fmt::Display for SelectionPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 0..self.len() {
            f.write_str(if self.sign(k) == Sign::Plus { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl FromStr for SelectionPattern {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let signs = s
            .chars()
            .map(|c| match c {
                '+' => Ok(Sign::Plus),
                '-' => Ok(Sign::Minus),
                other => Err(format!("unexpected {other:?} in selection pattern")),
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if signs.len() > Self::MAX_SITES {
            return Err(format!("pattern longer than {} sites", Self::MAX_SITES));
        }
        Ok(Self::from_signs(&signs))
    }
}

/// Ways to phrase the cocked-hat event when rays may fail to meet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Formulation {
    /// The hat forms and contains the target.
    Conjunction,
    /// The hat contains the target, given that it forms.
    Conditional,
    /// The triangle of the supporting lines contains the target.
    Lines,
    /// As `Conjunction`, for models where every pair of rays meets.
    Constrained,
}

impl Formulation {
    pub const ALL: [Formulation; 4] = [
        Formulation::Conjunction,
        Formulation::Conditional,
        Formulation::Lines,
        Formulation::Constrained,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Formulation::Conjunction => "conjunction",
            Formulation::Conditional => "conditional",
            Formulation::Lines => "lines",
            Formulation::Constrained => "constrained",
        }
    }
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Formulation {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Formulation::ALL
            .into_iter()
            .find(|f| f.name() == s.to_ascii_lowercase())
            .ok_or_else(|| {
                format!("unknown formulation {s:?}; expected conjunction, conditional, lines or constrained")
            })
    }
}

/// Which event an estimate or enumeration is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    /// Target inside the cocked hat (three sites).
    Hat,
    /// Target in an unbounded cell of the supporting lines.
    Unbounded,
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quantity::Hat => "hat",
            Quantity::Unbounded => "unbounded",
        })
    }
}

/// Exact probability over the `2^n` equally likely selections.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactResult {
    pub favorable: Vec<SelectionPattern>,
    pub numerator: u64,
    /// `2^n`, or the number of hat-forming selections for the conditional event.
    pub denominator: u64,
    /// Selections whose three rays form a hat (hat events only).
    pub forming: Option<u64>,
}

impl ExactResult {
    pub fn probability(&self) -> Ratio<u64> {
        Ratio::new(self.numerator, self.denominator)
    }

    pub fn decimal(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    pub quantity: Quantity,
    pub formulation: Formulation,
    pub p_hat: f64,
    pub trials: u64,
    pub successes: u64,
    /// Trials counted in the denominator of `p_hat`.
    pub denominator: u64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
    /// Frequency of hat formation (conditional formulation only).
    pub conditioning_frequency: Option<f64>,
}

/// Chunking and execution mode of the Monte Carlo loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McOptions {
    pub chunk_size: u64,
    pub execution: Execution,
}

impl Default for McOptions {
    fn default() -> Self {
        Self {
            chunk_size: 1 << 14,
            execution: Execution::default(),
        }
    }
}

/// 95% normal quantile.
pub const Z_95: f64 = 1.959963984540054;

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    assert!(successes <= trials, "{successes} successes out of {trials}");
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let low = if successes == 0 {
        0.0
    } else {
        (center - half).clamp(0.0, p)
    };
    let high = if successes == trials {
        1.0
    } else {
        (center + half).clamp(p, 1.0)
    };
    Ok((low, high))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeltaOutcome {
    /// The hat (or, for `Lines`, the line triangle) exists.
    pub forms: bool,
    /// It exists and strictly contains the target.
    pub contains: bool,
    /// Some pair of rays failed to meet.
    pub pair_missed: bool,
}

/// Precomputed true bearings for repeated three-site evaluations.
#[derive(Debug, Clone)]
pub struct DeltaEvaluator {
    origins: [Point2; 3],
    bearings: [Angle; 3],
    target: Point2,
}

impl DeltaEvaluator {
    pub fn new(scenario: &Scenario) -> Result<Self> {
        if scenario.n() != 3 {
            return Err(Error::WrongSiteCount {
                expected: "exactly 3",
                got: scenario.n(),
            });
        }
        let mut bearings = [Angle::ZERO; 3];
        for (b, p) in bearings.iter_mut().zip(&scenario.points) {
            if *p == scenario.target {
                return Err(Error::DegenerateRay);
            }
            *b = (scenario.target - *p).angle();
        }
        Ok(Self {
            origins: [scenario.points[0], scenario.points[1], scenario.points[2]],
            bearings,
            target: scenario.target,
        })
    }

    fn rays(&self, eps: &[f64]) -> [Ray; 3] {
        std::array::from_fn(|k| Ray::new(self.origins[k], self.bearings[k] + eps[k]))
    }

    pub fn outcome(&self, eps: &[f64], formulation: Formulation) -> Result<DeltaOutcome> {
        let rays = self.rays(eps);
        if formulation == Formulation::Lines {
            let tri = lines_triangle(&rays[0].line(), &rays[1].line(), &rays[2].line());
            return Ok(DeltaOutcome {
                forms: tri.is_some(),
                contains: tri.is_some_and(|t| point_in_triangle(self.target, &t)),
                pair_missed: false,
            });
        }
        let meet = |a: usize, b: usize| intersect_rays(&rays[a], &rays[b]).ok().flatten();
        let corners = [meet(0, 1), meet(1, 2), meet(0, 2)];
        let pair_missed = corners.iter().any(Option::is_none);
        let tri = match corners {
            [Some(a), Some(b), Some(c)] => Triangle::new(a, b, c).ok(),
            _ => None,
        };
        Ok(DeltaOutcome {
            forms: tri.is_some(),
            contains: tri.is_some_and(|t| point_in_triangle(self.target, &t)),
            pair_missed,
        })
    }
}

fn check_delta_preconditions(
    scenario: &Scenario,
    model: &ErrorModel,
    formulation: Formulation,
) -> Result<()> {
    model.check_sites(scenario)?;
    if scenario.n() != 3 {
        return Err(Error::WrongSiteCount {
            expected: "exactly 3",
            got: scenario.n(),
        });
    }
    match formulation {
        Formulation::Lines if model.max_abs_error() > FRAC_PI_2 => Err(Error::LinesSupport),
        Formulation::Constrained => {
            let report = validate_pairwise_intersection(scenario, model)?;
            if report.valid {
                Ok(())
            } else {
                Err(Error::PairwiseIntersection(report.describe()))
            }
        }
        _ => Ok(()),
    }
}

fn audit_failure() -> Error {
    Error::PairwiseIntersection(
        "a sampled pair of rays failed to meet under a validated model".into(),
    )
}

fn estimate(
    quantity: Quantity,
    formulation: Formulation,
    trials: u64,
    successes: u64,
    denominator: u64,
    seed: u64,
) -> Result<EstimateResult> {
    let (ci_low, ci_high) = wilson_interval(successes, denominator, Z_95)?;
    Ok(EstimateResult {
        quantity,
        formulation,
        p_hat: successes as f64 / denominator as f64,
        trials,
        successes,
        denominator,
        ci_low,
        ci_high,
        seed,
        conditioning_frequency: (formulation == Formulation::Conditional)
            .then(|| denominator as f64 / trials as f64),
    })
}

/// Sum per-chunk `(successes, events)` counts for `trials` draws.
fn run_chunks<F>(trials: u64, seed: u64, opts: &McOptions, trial: F) -> Result<(u64, u64)>
where
    F: Fn(&mut crate::rng::StreamRng, &mut Vec<f64>) -> Result<(bool, bool)> + Sync + Send,
{
    let chunks = chunk_count(trials, opts.chunk_size);
    let partial = map_chunks(opts.execution, chunks, |c| -> Result<(u64, u64)> {
        let mut rng = substream(seed, c);
        let start = c * opts.chunk_size;
        let count = opts.chunk_size.min(trials - start);
        let mut buf = Vec::new();
        let (mut hits, mut events) = (0u64, 0u64);
        for _ in 0..count {
            let (event, hit) = trial(&mut rng, &mut buf)?;
            events += u64::from(event);
            hits += u64::from(hit);
        }
        Ok((hits, events))
    });
    partial.into_iter().try_fold((0, 0), |(h, e), r| {
        let (dh, de) = r?;
        Ok((h + dh, e + de))
    })
}

/// Monte Carlo estimate of the probability that the target is in the hat.
pub fn mc_estimate_delta(
    scenario: &Scenario,
    model: &ErrorModel,
    formulation: Formulation,
    trials: u64,
    seed: u64,
) -> Result<EstimateResult> {
    mc_estimate_delta_with(
        scenario,
        model,
        formulation,
        trials,
        seed,
        &McOptions::default(),
    )
}

pub fn mc_estimate_delta_with(
    scenario: &Scenario,
    model: &ErrorModel,
    formulation: Formulation,
    trials: u64,
    seed: u64,
    opts: &McOptions,
) -> Result<EstimateResult> {
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    check_delta_preconditions(scenario, model, formulation)?;
    let eval = DeltaEvaluator::new(scenario)?;
    let (hits, forming) = run_chunks(trials, seed, opts, |rng, buf| {
        buf.resize(3, 0.0);
        model.sample_into(rng, buf);
        let o = eval.outcome(buf, formulation)?;
        if formulation == Formulation::Constrained && o.pair_missed {
            return Err(audit_failure());
        }
        Ok((o.forms, o.contains))
    })?;
    let denominator = if formulation == Formulation::Conditional {
        if forming == 0 {
            return Err(Error::ConditioningEventEmpty);
        }
        forming
    } else {
        trials
    };
    estimate(Quantity::Hat, formulation, trials, hits, denominator, seed)
}

/// Bearings and target for repeated arrangement evaluations.
struct UnboundedEvaluator {
    origins: Vec<Point2>,
    bearings: Vec<Angle>,
    target: Point2,
}

impl UnboundedEvaluator {
    fn new(scenario: &Scenario) -> Self {
        Self {
            origins: scenario.points.clone(),
            bearings: scenario
                .points
                .iter()
                .map(|p| (scenario.target - *p).angle())
                .collect(),
            target: scenario.target,
        }
    }

    fn rays(&self, eps: &[f64]) -> Vec<Ray> {
        self.origins
            .iter()
            .zip(&self.bearings)
            .zip(eps)
            .map(|((o, b), e)| Ray::new(*o, *b + *e))
            .collect()
    }

    fn unbounded(&self, eps: &[f64], audit: bool) -> Result<bool> {
        let rays = self.rays(eps);
        if audit {
            for (a, ra) in rays.iter().enumerate() {
                for rb in &rays[a + 1..] {
                    if !matches!(intersect_rays(ra, rb), Ok(Some(_))) {
                        return Err(audit_failure());
                    }
                }
            }
        }
        let lines: Vec<Line> = rays.iter().map(Ray::line).collect();
        Ok(in_unbounded_component(self.target, &lines)?.unbounded)
    }
}

fn check_unbounded_preconditions(scenario: &Scenario, model: &ErrorModel) -> Result<()> {
    model.check_sites(scenario)?;
    if scenario.n() < 3 {
        return Err(Error::WrongSiteCount {
            expected: "at least 3",
            got: scenario.n(),
        });
    }
    let report = validate_pairwise_intersection(scenario, model)?;
    if !report.valid {
        return Err(Error::PairwiseIntersection(report.describe()));
    }
    Ok(())
}

/// Monte Carlo estimate of the probability that the target is in an unbounded cell.
pub fn mc_estimate_unbounded(
    scenario: &Scenario,
    model: &ErrorModel,
    trials: u64,
    seed: u64,
) -> Result<EstimateResult> {
    mc_estimate_unbounded_with(scenario, model, trials, seed, &McOptions::default())
}

pub fn mc_estimate_unbounded_with(
    scenario: &Scenario,
    model: &ErrorModel,
    trials: u64,
    seed: u64,
    opts: &McOptions,
) -> Result<EstimateResult> {
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    check_unbounded_preconditions(scenario, model)?;
    let eval = UnboundedEvaluator::new(scenario);
    let n = scenario.n();
    let (hits, _) = run_chunks(trials, seed, opts, |rng, buf| {
        buf.resize(n, 0.0);
        model.sample_into(rng, buf);
        Ok((true, eval.unbounded(buf, true)?))
    })?;
    estimate(
        Quantity::Unbounded,
        Formulation::Constrained,
        trials,
        hits,
        trials,
        seed,
    )
}

/// Exact hat probability for a three-site two-ray model.
pub fn exact_two_ray_delta(
    scenario: &Scenario,
    model: &ErrorModel,
    formulation: Formulation,
) -> Result<ExactResult> {
    let sites = model.two_ray_sites().ok_or(Error::NotTwoRay)?;
    check_delta_preconditions(scenario, model, formulation)?;
    let eval = DeltaEvaluator::new(scenario)?;
    let mut favorable = Vec::new();
    let mut forming = 0;
    for pattern in SelectionPattern::all(3) {
        let o = eval.outcome(&pattern.errors(&sites), formulation)?;
        forming += u64::from(o.forms);
        if o.contains {
            favorable.push(pattern);
        }
    }
    let numerator = favorable.len() as u64;
    let denominator = match formulation {
        Formulation::Conditional if forming == 0 => return Err(Error::ConditioningEventEmpty),
        Formulation::Conditional => forming,
        _ => 8,
    };
    Ok(ExactResult {
        favorable,
        numerator,
        denominator,
        forming: (formulation != Formulation::Lines).then_some(forming),
    })
}

/// Default cap on the number of sites enumerated exactly.
pub const DEFAULT_ENUMERATION_CAP: usize = 20;

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap || n > SelectionPattern::MAX_SITES {
        return Err(Error::EnumerationTooLarge { n, cap });
    }
    Ok(())
}

/// Patterns per enumeration chunk.
const PATTERN_CHUNK: u64 = 1 << 12;

fn enumerate_patterns<F>(n: usize, exec: Execution, keep: F) -> Result<Vec<SelectionPattern>>
where
    F: Fn(SelectionPattern) -> Result<bool> + Sync + Send,
{
    let total = 1u64 << n;
    let parts = map_chunks(exec, chunk_count(total, PATTERN_CHUNK), |c| {
        let lo = c * PATTERN_CHUNK;
        let hi = (lo + PATTERN_CHUNK).min(total);
        let mut out = Vec::new();
        for m in lo..hi {
            let p = SelectionPattern::new(m as u32, n);
            if keep(p)? {
                out.push(p);
            }
        }
        Ok(out)
    });
    let mut all = Vec::new();
    for part in parts {
        all.extend(part?);
    }
    Ok(all)
}

/// Exact probability that the target is in an unbounded cell, over all selections.
pub fn exact_two_ray_unbounded(scenario: &Scenario, model: &ErrorModel) -> Result<ExactResult> {
    exact_two_ray_unbounded_with(
        scenario,
        model,
        DEFAULT_ENUMERATION_CAP,
        Execution::default(),
    )
}

pub fn exact_two_ray_unbounded_with(
    scenario: &Scenario,
    model: &ErrorModel,
    cap: usize,
    exec: Execution,
) -> Result<ExactResult> {
    let sites = model.two_ray_sites().ok_or(Error::NotTwoRay)?;
    check_unbounded_preconditions(scenario, model)?;
    let n = scenario.n();
    check_cap(n, cap)?;
    let eval = UnboundedEvaluator::new(scenario);
    let favorable = enumerate_patterns(n, exec, |p| eval.unbounded(&p.errors(&sites), false))?;
    Ok(ExactResult {
        numerator: favorable.len() as u64,
        denominator: 1u64 << n,
        favorable,
        forming: None,
    })
}

/// Tangent construction for one site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentSite {
    /// The support cone translated so that both bounding rays touch the circle.
    pub d_star: Cone,
    pub q_plus: Ray,
    pub q_minus: Ray,
    pub m_plus: Line,
    pub m_minus: Line,
    /// Positions of the tangent points on the circle.
    pub a_plus: Angle,
    pub a_minus: Angle,
    /// Shorter arc between the tangent points, from `a_plus` counterclockwise to `a_minus`.
    pub arc: DirectionArc,
}

/// Unit circle about the target with every support cone translated to touch it.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentReduction {
    pub center: Point2,
    pub sites: Vec<TangentSite>,
}

impl TangentReduction {
    pub fn n(&self) -> usize {
        self.sites.len()
    }

    pub fn tangent_angle(&self, point: TangentPoint) -> Angle {
        let s = &self.sites[point.site];
        match point.sign {
            Sign::Plus => s.a_plus,
            _ => s.a_minus,
        }
    }

    pub fn tangent_position(&self, point: TangentPoint) -> Point2 {
        self.center + self.tangent_angle(point).unit()
    }

    /// Every arc shorter than a half circle.
    pub fn check_condition_i(&self) -> Result<()> {
        for (i, s) in self.sites.iter().enumerate() {
            if s.arc.length >= PI - ARC_TOL {
                return Err(Error::ArcCondition {
                    condition: "i",
                    sites: vec![i],
                });
            }
        }
        Ok(())
    }

    /// Every two arcs overlap in an arc longer than a half circle.
    pub fn check_condition_ii(&self) -> Result<()> {
        for i in 0..self.n() {
            for j in i + 1..self.n() {
                match arc_union_length(&self.sites[i].arc, &self.sites[j].arc) {
                    Some(len) if len > PI + ARC_TOL => {}
                    _ => {
                        return Err(Error::ArcCondition {
                            condition: "ii",
                            sites: vec![i, j],
                        })
                    }
                }
            }
        }
        Ok(())
    }
}

/// Angular tolerance of the arc tests, in radians.
pub const ARC_TOL: f64 = 1e-9;

/// Length of `a ∪ b` when the two closed arcs overlap, `None` when disjoint.
fn arc_union_length(a: &DirectionArc, b: &DirectionArc) -> Option<f64> {
    let from_a = a.start.sweep_to(b.start);
    let from_b = b.start.sweep_to(a.start);
    let len = if from_a <= a.length {
        a.length.max(from_a + b.length)
    } else if from_b <= b.length {
        b.length.max(from_b + a.length)
    } else {
        return None;
    };
    Some(len.min(TAU))
}

/// Translate each two-ray support cone so that its rays touch the unit
/// circle about the target, and record the tangent points and arcs.
pub fn tangent_reduction(scenario: &Scenario, model: &ErrorModel) -> Result<TangentReduction> {
    let sites = model.two_ray_sites().ok_or(Error::NotTwoRay)?;
    model.check_sites(scenario)?;
    let report = validate_pairwise_intersection(scenario, model)?;
    if !report.valid {
        return Err(Error::PairwiseIntersection(report.describe()));
    }
    let f = scenario.target;
    let mut out = Vec::with_capacity(sites.len());
    for (i, m) in sites.iter().enumerate() {
        let bearing = (f - scenario.points[i]).angle();
        let width = m.eps_plus() - m.eps_minus();
        if width >= PI {
            return Err(Error::ImproperSupportCone(i));
        }
        let dir_minus = bearing + m.eps_minus();
        let dir_plus = bearing + m.eps_plus();
        // The circle sits to the left of the minus ray and to the right of the plus ray.
        let a_minus = dir_minus + (-FRAC_PI_2);
        let a_plus = dir_plus + FRAC_PI_2;
        let t_minus = f + a_minus.unit();
        let t_plus = f + a_plus.unit();
        let m_minus = Line::new(t_minus, dir_minus);
        let m_plus = Line::new(t_plus, dir_plus);
        let apex = m_minus.intersect(&m_plus).ok_or(Error::DegenerateArc(i))?;
        let arc_len = a_plus.sweep_to(a_minus);
        if (arc_len - PI).abs() <= ARC_TOL || arc_len <= ARC_TOL {
            return Err(Error::DegenerateArc(i));
        }
        let d_star = Cone {
            apex,
            start: dir_minus,
            end: dir_plus,
        };
        let site = TangentSite {
            d_star,
            q_plus: Ray::new(apex, dir_plus),
            q_minus: Ray::new(apex, dir_minus),
            m_plus,
            m_minus,
            a_plus,
            a_minus,
            arc: DirectionArc::new(a_plus, arc_len),
        };
        let tangent = |l: &Line| (l.signed_distance(f).abs() - 1.0).abs() <= 1e-9;
        let touches = |q: &Ray, t: Point2| (t - q.origin).dot(q.direction.unit()) > 0.0;
        if !(tangent(&m_minus)
            && tangent(&m_plus)
            && touches(&site.q_minus, t_minus)
            && touches(&site.q_plus, t_plus)
            && d_star.contains_point_strictly(f))
        {
            return Err(Error::DegenerateArc(i));
        }
        out.push(site);
    }
    let reduction = TangentReduction {
        center: f,
        sites: out,
    };
    reduction.check_condition_i()?;
    reduction.check_condition_ii()?;
    Ok(reduction)
}

/// Tangent point `a_site^sign` of a reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TangentPoint {
    pub site: usize,
    pub sign: Sign,
}

impl fmt::Display for TangentPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.sign == Sign::Plus { '+' } else { '-' };
        write!(f, "a{}{}", self.site + 1, s)
    }
}

/// A special selection with the shortest arc holding its tangent points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialSelectionWitness {
    pub pattern: SelectionPattern,
    pub shortest_arc: DirectionArc,
    /// Sites at the counterclockwise start and end of the arc.
    pub endpoint_sites: (usize, usize),
}

impl SpecialSelectionWitness {
    pub fn endpoints(&self) -> (TangentPoint, TangentPoint) {
        let (i, j) = self.endpoint_sites;
        (
            TangentPoint {
                site: i,
                sign: self.pattern.sign(i),
            },
            TangentPoint {
                site: j,
                sign: self.pattern.sign(j),
            },
        )
    }
}

/// Whether the chosen tangent points lie on an open half circle; if so,
/// the shortest arc holding them.
fn half_circle_witness(
    reduction: &TangentReduction,
    pattern: SelectionPattern,
) -> Result<Option<SpecialSelectionWitness>> {
    let mut pts: Vec<(f64, usize)> = (0..reduction.n())
        .map(|k| {
            let a = reduction.tangent_angle(TangentPoint {
                site: k,
                sign: pattern.sign(k),
            });
            (a.radians(), k)
        })
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let m = pts.len();
    let (mut gap, mut after) = (f64::NEG_INFINITY, 0);
    for k in 0..m {
        let next = (k + 1) % m;
        let g = if m == 1 {
            TAU
        } else {
            crate::geometry::ccw_sweep(pts[k].0, pts[next].0)
        };
        if g > gap {
            gap = g;
            after = next;
        }
    }
    if (gap - PI).abs() <= ARC_TOL {
        return Err(Error::DegenerateSelection);
    }
    if gap < PI {
        return Ok(None);
    }
    let before = (after + m - 1) % m;
    let length = TAU - gap;
    Ok(Some(SpecialSelectionWitness {
        pattern,
        shortest_arc: DirectionArc {
            start: Angle::new(pts[after].0),
            end: Angle::new(pts[before].0),
            length,
        },
        endpoint_sites: (pts[after].1, pts[before].1),
    }))
}

/// Count selections whose tangent points lie on an arc shorter than a half circle.
pub fn count_special_selections(
    reduction: &TangentReduction,
) -> Result<(usize, Vec<SpecialSelectionWitness>)> {
    count_special_selections_with(reduction, DEFAULT_ENUMERATION_CAP, Execution::default())
}

pub fn count_special_selections_with(
    reduction: &TangentReduction,
    cap: usize,
    exec: Execution,
) -> Result<(usize, Vec<SpecialSelectionWitness>)> {
    reduction.check_condition_i()?;
    reduction.check_condition_ii()?;
    let n = reduction.n();
    check_cap(n, cap)?;
    let patterns =
        enumerate_patterns(
            n,
            exec,
            |p| Ok(half_circle_witness(reduction, p)?.is_some()),
        )?;
    let witnesses = patterns
        .into_iter()
        .map(|p| half_circle_witness(reduction, p).map(|w| w.expect("special pattern")))
        .collect::<Result<Vec<_>>>()?;
    Ok((witnesses.len(), witnesses))
}

/// How often each tangent point is an endpoint of a special selection's arc.
pub fn endpoint_multiplicity(
    reduction: &TangentReduction,
) -> Result<BTreeMap<TangentPoint, usize>> {
    let (_, witnesses) = count_special_selections(reduction)?;
    let mut counts: BTreeMap<TangentPoint, usize> = (0..reduction.n())
        .flat_map(|site| [Sign::Minus, Sign::Plus].map(|sign| (TangentPoint { site, sign }, 0)))
        .collect();
    for w in &witnesses {
        let (a, b) = w.endpoints();
        *counts.entry(a).or_default() += 1;
        *counts.entry(b).or_default() += 1;
    }
    Ok(counts)
}
