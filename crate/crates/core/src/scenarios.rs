//! Observation sites plus target: validation, the three hull cases of the
//! three-site problem, the per-case cone systems, the counterexample
//! constructions and randomized generation of valid configurations.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

use rand::Rng;

use crate::distributions::{
    max_valid_half_width, validate_pairwise_intersection, ErrorModel, SiteModel, TwoRaySiteModel,
};
use crate::error::{Error, Result};
use crate::estimators::{
    exact_two_ray_delta, DeltaEvaluator, ExactResult, Formulation, SelectionPattern,
};
use crate::geometry::{
    cone_between, diameter, intersect_rays, orientation, orientation_scaled, Cone, Point2, Sign,
};

/// Observation sites `P_1..P_n` and the true position `F`.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub points: Vec<Point2>,
    pub target: Point2,
}

/// A point of a scenario: a site (0-based) or the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Site(usize),
    Target,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Site(i) => write!(f, "P{}", i + 1),
            Label::Target => write!(f, "F"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GeneralPositionReport {
    pub duplicates: Vec<(Label, Label)>,
    pub collinear: Vec<[Label; 3]>,
}

impl GeneralPositionReport {
    pub fn valid(&self) -> bool {
        self.duplicates.is_empty() && self.collinear.is_empty()
    }
}

impl fmt::Display for GeneralPositionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.valid() {
            return write!(f, "general position");
        }
        let mut parts = Vec::new();
        for (a, b) in &self.duplicates {
            parts.push(format!("{a} = {b}"));
        }
        for [a, b, c] in &self.collinear {
            parts.push(format!("{a}, {b}, {c} collinear"));
        }
        write!(f, "{}", parts.join("; "))
    }
}

impl Scenario {
    pub fn new(points: Vec<Point2>, target: Point2) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::WrongSiteCount {
                expected: "at least 1",
                got: 0,
            });
        }
        if !target.is_finite() || points.iter().any(|p| !p.is_finite()) {
            return Err(Error::GeneralPosition("non-finite coordinate".into()));
        }
        Ok(Self { points, target })
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn point(&self, label: Label) -> Point2 {
        match label {
            Label::Site(i) => self.points[i],
            Label::Target => self.target,
        }
    }

    /// Sites followed by the target.
    pub fn labels(&self) -> Vec<Label> {
        (0..self.n())
            .map(Label::Site)
            .chain(std::iter::once(Label::Target))
            .collect()
    }

    pub fn diameter(&self) -> f64 {
        let mut all = self.points.clone();
        all.push(self.target);
        diameter(&all)
    }

    pub fn with_target(&self, target: Point2) -> Scenario {
        Scenario {
            points: self.points.clone(),
            target,
        }
    }

    pub fn rotated(&self, angle: f64) -> Scenario {
        Scenario {
            points: self.points.iter().map(|p| p.rotated(angle)).collect(),
            target: self.target.rotated(angle),
        }
    }

    pub fn relabeled(&self, perm: &[usize]) -> Scenario {
        Scenario {
            points: perm.iter().map(|&k| self.points[k]).collect(),
            target: self.target,
        }
    }

    /// Duplicate points and collinear triples among all `n + 1` points,
    /// with the zero band scaled by the squared scenario diameter.
    pub fn general_position(&self) -> GeneralPositionReport {
        let labels = self.labels();
        let scale2 = self.diameter().powi(2);
        let mut report = GeneralPositionReport::default();
        for (a, &la) in labels.iter().enumerate() {
            for &lb in &labels[a + 1..] {
                if self.point(la).dist2(self.point(lb)) <= (crate::geometry::EPS.powi(2)) * scale2 {
                    report.duplicates.push((la, lb));
                }
            }
        }
        if !report.duplicates.is_empty() {
            return report;
        }
        for (a, &la) in labels.iter().enumerate() {
            for (b, &lb) in labels.iter().enumerate().skip(a + 1) {
                for &lc in &labels[b + 1..] {
                    let s =
                        orientation_scaled(self.point(la), self.point(lb), self.point(lc), scale2);
                    if s == Sign::Zero {
                        report.collinear.push([la, lb, lc]);
                    }
                }
            }
        }
        report
    }

    pub fn require_general_position(&self) -> Result<()> {
        let report = self.general_position();
        if report.valid() {
            Ok(())
        } else {
            Err(Error::GeneralPosition(report.to_string()))
        }
    }
}

pub fn validate_general_position(scenario: &Scenario) -> GeneralPositionReport {
    scenario.general_position()
}

/// Three sites on a circle of the given radius about the origin, listed
/// counterclockwise from the top, with the target at the centre.
pub fn equilateral(radius: f64) -> Scenario {
    let points = (0..3)
        .map(|k| {
            let a = FRAC_PI_2 + k as f64 * TAU / 3.0;
            Point2::new(radius * a.cos(), radius * a.sin())
        })
        .collect();
    Scenario {
        points,
        target: Point2::ORIGIN,
    }
}

/// Shape of the convex hull `T` of three sites and the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HullCase {
    /// Triangle with the target inside.
    Case1,
    /// Triangle with the target a vertex; `interior` is the site inside it.
    Case2 { interior: usize },
    /// Quadrilateral; `diagonal` is the site opposite the target.
    Case3 { diagonal: usize },
}

impl HullCase {
    pub fn tag(&self) -> CaseTag {
        match self {
            HullCase::Case1 => CaseTag::Case1,
            HullCase::Case2 { .. } => CaseTag::Case2,
            HullCase::Case3 { .. } => CaseTag::Case3,
        }
    }
}

/// A hull case without its relabeling detail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseTag {
    Case1,
    Case2,
    Case3,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self {
            CaseTag::Case1 => 1,
            CaseTag::Case2 => 2,
            CaseTag::Case3 => 3,
        };
        write!(f, "Case{k}")
    }
}

fn strictly_inside(x: Point2, a: Point2, b: Point2, c: Point2) -> bool {
    let s1 = orientation(a, b, x);
    s1 != Sign::Zero && s1 == orientation(b, c, x) && s1 == orientation(c, a, x)
}

fn require_three(scenario: &Scenario) -> Result<()> {
    if scenario.n() != 3 {
        return Err(Error::WrongSiteCount {
            expected: "exactly 3",
            got: scenario.n(),
        });
    }
    Ok(())
}

/// Classify the hull of `P_1, P_2, P_3, F`.
pub fn classify_t(scenario: &Scenario) -> Result<HullCase> {
    require_three(scenario)?;
    scenario
        .require_general_position()
        .map_err(|e| Error::DegenerateHull(e.to_string()))?;
    let [p0, p1, p2] = [scenario.points[0], scenario.points[1], scenario.points[2]];
    let f = scenario.target;
    if strictly_inside(f, p0, p1, p2) {
        return Ok(HullCase::Case1);
    }
    for k in 0..3 {
        let a = scenario.points[(k + 1) % 3];
        let b = scenario.points[(k + 2) % 3];
        if strictly_inside(scenario.points[k], a, b, f) {
            return Ok(HullCase::Case2 { interior: k });
        }
    }
    for k in 0..3 {
        let pk = scenario.points[k];
        let a = scenario.points[(k + 1) % 3];
        let b = scenario.points[(k + 2) % 3];
        let sa = orientation(pk, f, a);
        let sb = orientation(pk, f, b);
        if sa != Sign::Zero && sb == sa.flip() {
            return Ok(HullCase::Case3 { diagonal: k });
        }
    }
    Err(Error::DegenerateHull(
        "no hull case matches the four points".into(),
    ))
}

/// The cones `C_1, C_2, C_3` confining the three random rays in each hull case.
///
/// In cases 2 and 3 the distinguished site is the one recorded in the case;
/// the two others are the remaining sites in cyclic order.
pub fn case_cones(scenario: &Scenario, case: HullCase) -> Result<[Cone; 3]> {
    let actual = classify_t(scenario)?;
    if actual != case {
        return Err(Error::CaseMismatch(case));
    }
    let p = &scenario.points;
    let f = scenario.target;
    let bearing = |i: usize| (f - p[i]).angle();
    let toward = |i: usize, j: usize| (p[j] - p[i]).angle();
    let mut cones = [Cone {
        apex: Point2::ORIGIN,
        start: crate::geometry::Angle::ZERO,
        end: crate::geometry::Angle::ZERO,
    }; 3];
    match case {
        HullCase::Case1 => {
            for i in 0..3 {
                cones[i] = cone_between(p[i], toward(i, (i + 2) % 3), toward(i, (i + 1) % 3))?;
            }
        }
        HullCase::Case2 { interior: k } => {
            let (a, b) = ((k + 1) % 3, (k + 2) % 3);
            cones[a] = cone_between(p[a], bearing(k), toward(a, k))?;
            cones[k] = cone_between(p[k], bearing(a), bearing(b))?;
            cones[b] = cone_between(p[b], bearing(k), toward(b, k))?;
        }
        HullCase::Case3 { diagonal: k } => {
            let (a, b) = ((k + 1) % 3, (k + 2) % 3);
            cones[a] = cone_between(p[a], bearing(k), toward(a, b))?;
            cones[k] = cone_between(p[k], bearing(a), bearing(b))?;
            cones[b] = cone_between(p[b], bearing(k), toward(b, a))?;
        }
    }
    Ok(cones)
}

/// One selection of the three-site two-ray table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatternRow {
    pub pattern: SelectionPattern,
    pub hat_forms: bool,
    pub target_in_hat: bool,
}

/// All eight sign selections of a valid three-site two-ray model.
pub fn sign_pattern_table(scenario: &Scenario, model: &ErrorModel) -> Result<Vec<PatternRow>> {
    require_three(scenario)?;
    let sites = model.two_ray_sites().ok_or(Error::NotTwoRay)?;
    let report = validate_pairwise_intersection(scenario, model)?;
    if !report.valid {
        return Err(Error::PairwiseIntersection(report.describe()));
    }
    let eval = DeltaEvaluator::new(scenario)?;
    SelectionPattern::all(3)
        .map(|pattern| {
            let eps = pattern.errors(&sites);
            let outcome = eval.outcome(&eps, Formulation::Conjunction)?;
            Ok(PatternRow {
                pattern,
                hat_forms: outcome.forms,
                target_in_hat: outcome.contains,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CounterexampleId {
    Ce1,
    Ce2,
    Ce3,
}

impl CounterexampleId {
    pub fn name(self) -> &'static str {
        match self {
            CounterexampleId::Ce1 => "CE1",
            CounterexampleId::Ce2 => "CE2",
            CounterexampleId::Ce3 => "CE3",
        }
    }
}

impl std::str::FromStr for CounterexampleId {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_uppercase().as_str() {
            "CE1" => Ok(CounterexampleId::Ce1),
            "CE2" => Ok(CounterexampleId::Ce2),
            "CE3" => Ok(CounterexampleId::Ce3),
            other => Err(format!(
                "unknown counterexample {other:?}; expected CE1, CE2 or CE3"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifiedProperty {
    pub name: String,
    pub holds: bool,
}

/// Exact probabilities recorded while verifying a counterexample.
#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleFigures {
    pub conjunction: ExactResult,
    pub conditional: Option<ExactResult>,
    pub lines: ExactResult,
    pub hat_forming_patterns: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleSpec {
    pub id: CounterexampleId,
    pub scenario: Scenario,
    pub model: ErrorModel,
    pub verified_properties: Vec<VerifiedProperty>,
    pub figures: CounterexampleFigures,
}

fn prop(name: &str, holds: bool) -> VerifiedProperty {
    VerifiedProperty {
        name: name.to_string(),
        holds,
    }
}

fn figures(scenario: &Scenario, model: &ErrorModel) -> Result<CounterexampleFigures> {
    let conjunction = exact_two_ray_delta(scenario, model, Formulation::Conjunction)?;
    let conditional = match exact_two_ray_delta(scenario, model, Formulation::Conditional) {
        Ok(r) => Some(r),
        Err(Error::ConditioningEventEmpty) => None,
        Err(e) => return Err(e),
    };
    let lines = exact_two_ray_delta(scenario, model, Formulation::Lines)?;
    Ok(CounterexampleFigures {
        hat_forming_patterns: conjunction.forming.unwrap_or(0),
        conjunction,
        conditional,
        lines,
    })
}

fn all_below(model: &ErrorModel, bound: f64, strict: bool) -> bool {
    let m = model.max_abs_error();
    if strict {
        m < bound
    } else {
        m <= bound
    }
}

/// `R_i^+` meets neither ray of site `i + 1` (mod 3), for every site.
fn plus_rays_miss_successor(scenario: &Scenario, model: &ErrorModel) -> Result<bool> {
    let sites = model.two_ray_sites().ok_or(Error::NotTwoRay)?;
    let ray = |i: usize, s: Sign| crate::distributions::site_ray(scenario, i, sites[i].eps(s));
    for i in 0..3 {
        let j = (i + 1) % 3;
        let plus = ray(i, Sign::Plus)?;
        for s in [Sign::Plus, Sign::Minus] {
            if !matches!(intersect_rays(&plus, &ray(j, s)?), Ok(None)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn ce1_properties(
    scenario: &Scenario,
    model: &ErrorModel,
) -> Result<(Vec<VerifiedProperty>, CounterexampleFigures)> {
    let sites = model.two_ray_sites().ok_or(Error::NotTwoRay)?;
    let all_minus = SelectionPattern::new(0, 3);
    let outcome = DeltaEvaluator::new(scenario)?
        .outcome(&all_minus.errors(&sites), Formulation::Conjunction)?;
    let fig = figures(scenario, model)?;
    let conditional_one = fig
        .conditional
        .as_ref()
        .is_some_and(|r| r.numerator == r.denominator && r.numerator > 0);
    let props = vec![
        prop(
            "R_i+ meets neither R_(i+1)+ nor R_(i+1)-",
            plus_rays_miss_successor(scenario, model)?,
        ),
        prop(
            "all-minus selection forms a hat containing F",
            outcome.forms && outcome.contains,
        ),
        prop(
            "conjunction = 1/8 and conditional = 1",
            (fig.conjunction.numerator, fig.conjunction.denominator) == (1, 8) && conditional_one,
        ),
        prop("all |eps| < pi/2", all_below(model, FRAC_PI_2, true)),
    ];
    Ok((props, fig))
}

fn ce1() -> Result<CounterexampleSpec> {
    // Sites listed clockwise so that a counterclockwise error turns R_i away
    // from site i + 1.
    let scenario = equilateral(1.0).relabeled(&[0, 2, 1]);
    let eps_minus = -10f64.to_radians();
    let model_for = |deg: f64| -> Result<ErrorModel> {
        let m = TwoRaySiteModel::new(eps_minus, deg.to_radians())?;
        Ok(ErrorModel::new(vec![SiteModel::TwoRay(m); 3]))
    };
    let holds = |deg: f64| -> bool {
        model_for(deg)
            .and_then(|m| ce1_properties(&scenario, &m))
            .is_ok_and(|(props, _)| props.iter().all(|p| p.holds))
    };
    // Walk down from 80 degrees to the smallest angle that still works, then
    // back off by a margin.
    let mut deg = 80.0;
    if !holds(deg) {
        return Err(Error::CounterexampleUnverified {
            id: "CE1",
            detail: "no plus-angle found at 80 degrees".into(),
        });
    }
    while deg > 1.0 && holds(deg - 1.0) {
        deg -= 1.0;
    }
    let chosen = (deg + 5.0).min(80.0);
    let model = model_for(chosen)?;
    finish(CounterexampleId::Ce1, scenario, model, ce1_properties)
}

fn lines_probability_is(fig: &CounterexampleFigures, num: u64) -> bool {
    fig.lines.numerator == num
}

fn ce2_properties(
    scenario: &Scenario,
    model: &ErrorModel,
) -> Result<(Vec<VerifiedProperty>, CounterexampleFigures)> {
    let fig = figures(scenario, model)?;
    let shift = 10.0 * scenario.diameter();
    let moved = scenario.with_target(Point2::new(scenario.target.x + shift, scenario.target.y));
    let moved_fig = figures(&moved, model)?;
    let props = vec![
        prop("all |eps| < pi/2", all_below(model, FRAC_PI_2, true)),
        prop("lines probability = 0", lines_probability_is(&fig, 0)),
        prop(
            "lines probability = 0 after moving F right by 10 diameters",
            lines_probability_is(&moved_fig, 0),
        ),
    ];
    Ok((props, fig))
}

fn ce2() -> Result<CounterexampleSpec> {
    let eps = 0.5f64.to_radians();
    let model = ErrorModel::two_ray_symmetric(3, eps)?;
    let distance = 10.0;
    let mut spread = 10f64.to_radians();
    for _ in 0..40 {
        let points = [-1.0, 0.0, 1.0]
            .iter()
            .map(|k| {
                let a = PI + k * spread;
                Point2::new(distance * a.cos(), distance * a.sin())
            })
            .collect();
        let scenario = Scenario::new(points, Point2::ORIGIN)?;
        if scenario.general_position().valid() {
            if let Ok((props, _)) = ce2_properties(&scenario, &model) {
                if props.iter().all(|p| p.holds) {
                    return finish(CounterexampleId::Ce2, scenario, model, ce2_properties);
                }
            }
        }
        spread /= 2.0;
    }
    Err(Error::CounterexampleUnverified {
        id: "CE2",
        detail: "separation search exhausted".into(),
    })
}

fn ce3_properties(
    scenario: &Scenario,
    model: &ErrorModel,
) -> Result<(Vec<VerifiedProperty>, CounterexampleFigures)> {
    let fig = figures(scenario, model)?;
    let props = vec![
        prop("all |eps| <= pi/2", all_below(model, FRAC_PI_2, false)),
        prop(
            "lines probability = 1",
            fig.lines.numerator == fig.lines.denominator,
        ),
        prop(
            "hat-forming pattern count = 0",
            fig.hat_forming_patterns == 0,
        ),
    ];
    Ok((props, fig))
}

fn ce3() -> Result<CounterexampleSpec> {
    let scenario = equilateral(1.0);
    // Errors just short of a right angle; the search closes in on 90 degrees.
    for deg in [89.0, 89.5, 89.9, 90.0] {
        let model = ErrorModel::two_ray_symmetric(3, f64::to_radians(deg))?;
        if let Ok((props, _)) = ce3_properties(&scenario, &model) {
            if props.iter().all(|p| p.holds) {
                return finish(CounterexampleId::Ce3, scenario, model, ce3_properties);
            }
        }
    }
    Err(Error::CounterexampleUnverified {
        id: "CE3",
        detail: "no error magnitude up to 90 degrees verified".into(),
    })
}

type PropertyCheck =
    fn(&Scenario, &ErrorModel) -> Result<(Vec<VerifiedProperty>, CounterexampleFigures)>;

fn finish(
    id: CounterexampleId,
    scenario: Scenario,
    model: ErrorModel,
    check: PropertyCheck,
) -> Result<CounterexampleSpec> {
    scenario.require_general_position()?;
    let (verified_properties, figures) = check(&scenario, &model)?;
    if let Some(bad) = verified_properties.iter().find(|p| !p.holds) {
        return Err(Error::CounterexampleUnverified {
            id: id.name(),
            detail: bad.name.clone(),
        });
    }
    Ok(CounterexampleSpec {
        id,
        scenario,
        model,
        verified_properties,
        figures,
    })
}

/// Build a counterexample configuration and verify every listed property.
pub fn make_counterexample(id: CounterexampleId) -> Result<CounterexampleSpec> {
    match id {
        CounterexampleId::Ce1 => ce1(),
        CounterexampleId::Ce2 => ce2(),
        CounterexampleId::Ce3 => ce3(),
    }
}

/// Re-run the property checks of a counterexample.
pub fn reverify(spec: &CounterexampleSpec) -> Result<Vec<VerifiedProperty>> {
    let check: PropertyCheck = match spec.id {
        CounterexampleId::Ce1 => ce1_properties,
        CounterexampleId::Ce2 => ce2_properties,
        CounterexampleId::Ce3 => ce3_properties,
    };
    Ok(check(&spec.scenario, &spec.model)?.0)
}

/// Shape of the error model attached to generated scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModelKind {
    /// Uniform errors on the validated half-widths.
    #[default]
    Interval,
    /// Two rays per site, each at a random fraction of the validated half-width.
    TwoRay,
}

/// Fraction of the validated half-width used by generators.
pub const SAFETY_FACTOR: f64 = 0.9;
/// Rejection budget of the generators.
pub const MAX_ATTEMPTS: usize = 10_000;

/// Random scenario in the unit square with an interval model passing validation.
pub fn random_valid_scenario<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> Result<(Scenario, ErrorModel)> {
    random_valid_configuration(n, ModelKind::Interval, None, rng)
}

/// Random valid configuration, optionally restricted to one hull case (`n = 3`).
pub fn random_valid_configuration<R: Rng + ?Sized>(
    n: usize,
    kind: ModelKind,
    case: Option<CaseTag>,
    rng: &mut R,
) -> Result<(Scenario, ErrorModel)> {
    if n < 3 {
        return Err(Error::WrongSiteCount {
            expected: "at least 3",
            got: n,
        });
    }
    if case.is_some() && n != 3 {
        return Err(Error::WrongSiteCount {
            expected: "exactly 3 for a case-targeted scenario",
            got: n,
        });
    }
    let unit = |rng: &mut R| Point2::new(rng.random::<f64>(), rng.random::<f64>());
    for _ in 0..MAX_ATTEMPTS {
        let points: Vec<Point2> = (0..n).map(|_| unit(rng)).collect();
        let target = unit(rng);
        let scenario = Scenario::new(points, target)?;
        if !scenario.general_position().valid() {
            continue;
        }
        if let Some(want) = case {
            match classify_t(&scenario) {
                Ok(c) if c.tag() == want => {}
                _ => continue,
            }
        }
        let Ok(widths) = max_valid_half_width(&scenario) else {
            continue;
        };
        let sites: Option<Vec<SiteModel>> = widths
            .iter()
            .map(|w| {
                let w = SAFETY_FACTOR * w.radians();
                match kind {
                    ModelKind::Interval => crate::distributions::SymmetricIntervalSiteModel::new(w)
                        .ok()
                        .map(SiteModel::Interval),
                    ModelKind::TwoRay => {
                        let lo = -w * rng.random_range(0.2..=1.0);
                        let hi = w * rng.random_range(0.2..=1.0);
                        TwoRaySiteModel::new(lo, hi).ok().map(SiteModel::TwoRay)
                    }
                }
            })
            .collect();
        let Some(sites) = sites else { continue };
        let model = ErrorModel::new(sites);
        if validate_pairwise_intersection(&scenario, &model)?.valid {
            return Ok((scenario, model));
        }
    }
    Err(Error::RejectionBudget(MAX_ATTEMPTS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{cone_c_ij, true_ray};
    use crate::rng::substream;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    #[test]
    fn general_position_reports() {
        assert!(equilateral(1.0).general_position().valid());
        let s = Scenario::new(vec![p(0., 0.), p(2., 0.), p(0., 5.)], p(1., 0.)).unwrap();
        let r = s.general_position();
        assert_eq!(
            r.collinear,
            vec![[Label::Site(0), Label::Site(1), Label::Target]]
        );
        let s = Scenario::new(vec![p(0., 0.), p(0., 0.), p(3., 1.)], p(1., 2.)).unwrap();
        let r = s.general_position();
        assert_eq!(r.duplicates, vec![(Label::Site(0), Label::Site(1))]);
        assert!(!r.valid());
        assert!(Scenario::new(vec![], p(0., 0.)).is_err());
    }

    #[test]
    fn hull_cases() {
        assert_eq!(classify_t(&equilateral(1.0)).unwrap(), HullCase::Case1);

        let (a, c, f) = (p(0., 0.), p(4., 0.), p(2., 3.));
        let centroid = p((a.x + c.x + f.x) / 3.0, (a.y + c.y + f.y) / 3.0);
        let s = Scenario::new(vec![a, centroid, c], f).unwrap();
        assert_eq!(classify_t(&s).unwrap(), HullCase::Case2 { interior: 1 });

        let s = Scenario::new(vec![p(0., 0.), p(2., 2.), p(4., 0.)], p(2., -2.)).unwrap();
        assert_eq!(classify_t(&s).unwrap(), HullCase::Case3 { diagonal: 1 });

        let s4 = Scenario::new(
            vec![p(0., 0.), p(2., 2.), p(4., 0.), p(1., 1.5)],
            p(2., -2.),
        )
        .unwrap();
        assert!(classify_t(&s4).is_err());
    }

    #[test]
    fn classification_survives_relabeling() {
        let mut rng = substream(3, 0);
        for _ in 0..200 {
            let pts: Vec<Point2> = (0..3).map(|_| p(rng.random(), rng.random())).collect();
            let s = Scenario::new(pts, p(rng.random(), rng.random())).unwrap();
            let Ok(base) = classify_t(&s) else { continue };
            for perm in [[1, 2, 0], [2, 1, 0], [0, 2, 1]] {
                let r = classify_t(&s.relabeled(&perm)).unwrap();
                let expected = match base {
                    HullCase::Case1 => HullCase::Case1,
                    HullCase::Case2 { interior } => HullCase::Case2 {
                        interior: perm.iter().position(|&k| k == interior).unwrap(),
                    },
                    HullCase::Case3 { diagonal } => HullCase::Case3 {
                        diagonal: perm.iter().position(|&k| k == diagonal).unwrap(),
                    },
                };
                assert_eq!(r, expected);
            }
        }
    }

    #[test]
    fn case1_cones_match_triangle_angles() {
        let s = equilateral(2.0);
        let cones = case_cones(&s, HullCase::Case1).unwrap();
        for c in cones {
            assert!((c.width() - PI / 3.0).abs() < 1e-12);
        }
        assert!(case_cones(&s, HullCase::Case3 { diagonal: 0 }).is_err());
    }

    #[test]
    fn case2_outer_cone_is_c_ij() {
        let (a, c, f) = (p(0., 0.), p(4., 0.), p(2., 3.));
        let s = Scenario::new(vec![a, p(2.0, 1.0), c], f).unwrap();
        let case = classify_t(&s).unwrap();
        assert_eq!(case, HullCase::Case2 { interior: 1 });
        let cones = case_cones(&s, case).unwrap();
        let c01 = cone_c_ij(&s, 0, 1).unwrap().whole;
        assert!(cones[0].same_as(&c01, 1e-12));
        let c21 = cone_c_ij(&s, 2, 1).unwrap().whole;
        assert!(cones[2].same_as(&c21, 1e-12));
        // The interior site's cone is the intersection of its two C_ij.
        let inter = cone_c_ij(&s, 1, 0)
            .unwrap()
            .whole
            .intersect(&cone_c_ij(&s, 1, 2).unwrap().whole)
            .unwrap();
        assert!(cones[1].same_as(&inter, 1e-12));
    }

    #[test]
    fn case3_cones_are_c_ij_intersections() {
        let s = Scenario::new(vec![p(0., 0.), p(2., 2.), p(4., 0.)], p(2., -2.)).unwrap();
        let case = classify_t(&s).unwrap();
        let cones = case_cones(&s, case).unwrap();
        for (i, cone) in cones.iter().enumerate() {
            let others: Vec<usize> = (0..3).filter(|&j| j != i).collect();
            let a = cone_c_ij(&s, i, others[0]).unwrap().whole;
            let b = cone_c_ij(&s, i, others[1]).unwrap().whole;
            let inter = a.intersect(&b).unwrap();
            assert!(cone.same_as(&inter, 1e-12), "site {i}");
            let r = true_ray(s.points[i], s.target).unwrap();
            assert!(cone.contains_direction(r.direction));
        }
    }

    #[test]
    fn counterexamples_verify() {
        for id in [
            CounterexampleId::Ce1,
            CounterexampleId::Ce2,
            CounterexampleId::Ce3,
        ] {
            let spec = make_counterexample(id).unwrap();
            assert!(spec.verified_properties.iter().all(|p| p.holds));
            assert_eq!(reverify(&spec).unwrap(), spec.verified_properties);
        }
    }

    #[test]
    fn first_counterexample_is_rotation_symmetric() {
        let spec = make_counterexample(CounterexampleId::Ce1).unwrap();
        let rotated = spec.scenario.rotated(TAU / 3.0);
        // Rotation by a third of a turn permutes the sites cyclically.
        for (k, q) in rotated.points.iter().enumerate() {
            let hit = spec.scenario.points.iter().position(|s| s.dist(*q) < 1e-12);
            assert!(hit.is_some(), "site {k} not mapped onto a site");
        }
        let fig = &spec.figures;
        let rot_fig = figures(&rotated, &spec.model).unwrap();
        assert_eq!(fig.conjunction.numerator, rot_fig.conjunction.numerator);
        assert_eq!(fig.lines.numerator, rot_fig.lines.numerator);
    }

    #[test]
    fn generators_replay_and_validate() {
        let (s1, m1) = random_valid_scenario(8, &mut substream(42, 0)).unwrap();
        let (s2, m2) = random_valid_scenario(8, &mut substream(42, 0)).unwrap();
        assert_eq!(s1, s2);
        assert_eq!(m1, m2);
        assert!(validate_pairwise_intersection(&s1, &m1).unwrap().valid);

        let mut rng = substream(9, 0);
        for tag in [CaseTag::Case1, CaseTag::Case2, CaseTag::Case3] {
            let (s, m) =
                random_valid_configuration(3, ModelKind::TwoRay, Some(tag), &mut rng).unwrap();
            assert_eq!(classify_t(&s).unwrap().tag(), tag);
            assert!(m.two_ray_sites().is_some());
        }
        assert!(random_valid_scenario(2, &mut rng).is_err());
    }
}
