//! Error-angle laws with zero median, their support cones, and the
//! pairwise-intersection validator.
//!
//! Every provided law has bounded support. The validator checks every
//! combination of extreme rays for each pair of sites. For a single pair
//! the set of direction pairs whose rays meet is convex in the two angles
//! (both rays must point to the same side of the base line, and the two
//! base angles must sum to less than pi), so meeting at the corners of
//! the support rectangle implies meeting everywhere inside it.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{
    apply_error, cone_c_ij, intersect_rays, orientation, true_ray, Angle, Cone, Point2, Ray, Sign,
};
use crate::rng::substream;
use crate::scenarios::Scenario;

/// Error concentrated on two rays, each taken with probability 1/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoRaySiteModel {
    eps_minus: f64,
    eps_plus: f64,
}

impl TwoRaySiteModel {
    pub fn new(eps_minus: f64, eps_plus: f64) -> Result<Self> {
        if !(eps_minus > -PI && eps_minus < 0.0 && eps_plus > 0.0 && eps_plus < PI) {
            return Err(Error::InvalidSiteModel(format!(
                "two-ray angles must satisfy -pi < {eps_minus} < 0 < {eps_plus} < pi"
            )));
        }
        Ok(Self {
            eps_minus,
            eps_plus,
        })
    }

    pub fn symmetric(eps: f64) -> Result<Self> {
        Self::new(-eps.abs(), eps.abs())
    }

    pub fn eps_minus(&self) -> f64 {
        self.eps_minus
    }

    pub fn eps_plus(&self) -> f64 {
        self.eps_plus
    }

    pub fn eps(&self, sign: Sign) -> f64 {
        match sign {
            Sign::Plus => self.eps_plus,
            _ => self.eps_minus,
        }
    }
}

/// Error uniform on `[-half_width, half_width]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricIntervalSiteModel {
    half_width: f64,
}

impl SymmetricIntervalSiteModel {
    pub fn new(half_width: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width < PI) {
            return Err(Error::InvalidSiteModel(format!(
                "interval half-width {half_width} must lie in (0, pi)"
            )));
        }
        Ok(Self { half_width })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }
}

/// Picks `first` with probability `weight`, otherwise `second`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoRayMixture {
    first: TwoRaySiteModel,
    second: TwoRaySiteModel,
    weight: f64,
}

impl TwoRayMixture {
    pub fn new(first: TwoRaySiteModel, second: TwoRaySiteModel, weight: f64) -> Result<Self> {
        if !(weight > 0.0 && weight < 1.0) {
            return Err(Error::InvalidSiteModel(format!(
                "mixture weight {weight} must lie in (0, 1)"
            )));
        }
        Ok(Self {
            first,
            second,
            weight,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SiteModel {
    TwoRay(TwoRaySiteModel),
    Interval(SymmetricIntervalSiteModel),
    Mixture(TwoRayMixture),
}

impl SiteModel {
    /// Smallest and largest error angle in the support.
    pub fn extent(&self) -> (f64, f64) {
        match self {
            SiteModel::TwoRay(m) => (m.eps_minus, m.eps_plus),
            SiteModel::Interval(m) => (-m.half_width, m.half_width),
            SiteModel::Mixture(m) => (
                m.first.eps_minus.min(m.second.eps_minus),
                m.first.eps_plus.max(m.second.eps_plus),
            ),
        }
    }

    /// Error angles whose rays bound the support; pairwise validation uses these.
    pub fn extreme_errors(&self) -> Vec<f64> {
        match self {
            SiteModel::TwoRay(m) => vec![m.eps_minus, m.eps_plus],
            SiteModel::Interval(m) => vec![-m.half_width, m.half_width],
            SiteModel::Mixture(m) => vec![
                m.first.eps_minus,
                m.first.eps_plus,
                m.second.eps_minus,
                m.second.eps_plus,
            ],
        }
    }

    pub fn as_two_ray(&self) -> Option<&TwoRaySiteModel> {
        match self {
            SiteModel::TwoRay(m) => Some(m),
            _ => None,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            SiteModel::TwoRay(m) => {
                if rng.random::<bool>() {
                    m.eps_plus
                } else {
                    m.eps_minus
                }
            }
            SiteModel::Interval(m) => loop {
                let u: f64 = rng.random();
                let e = m.half_width * (2.0 * u - 1.0);
                if e != 0.0 {
                    break e;
                }
            },
            SiteModel::Mixture(m) => {
                let pick = if rng.random::<f64>() < m.weight {
                    m.first
                } else {
                    m.second
                };
                SiteModel::TwoRay(pick).sample(rng)
            }
        }
    }
}

/// Independent per-site error laws.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorModel {
    pub sites: Vec<SiteModel>,
}

impl ErrorModel {
    pub fn new(sites: Vec<SiteModel>) -> Self {
        Self { sites }
    }

    pub fn two_ray_symmetric(n: usize, eps: f64) -> Result<Self> {
        let m = TwoRaySiteModel::symmetric(eps)?;
        Ok(Self::new(vec![SiteModel::TwoRay(m); n]))
    }

    pub fn intervals(half_widths: &[f64]) -> Result<Self> {
        half_widths
            .iter()
            .map(|&a| SymmetricIntervalSiteModel::new(a).map(SiteModel::Interval))
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn two_ray_sites(&self) -> Option<Vec<TwoRaySiteModel>> {
        self.sites.iter().map(|s| s.as_two_ray().copied()).collect()
    }

    /// Largest absolute error in any site's support.
    pub fn max_abs_error(&self) -> f64 {
        self.sites
            .iter()
            .map(|s| {
                let (lo, hi) = s.extent();
                lo.abs().max(hi.abs())
            })
            .fold(0.0, f64::max)
    }

    pub fn check_sites(&self, scenario: &Scenario) -> Result<()> {
        if self.len() != scenario.n() {
            return Err(Error::SiteCountMismatch {
                model: self.len(),
                scenario: scenario.n(),
            });
        }
        Ok(())
    }

    /// One independent draw per site, written into `out`.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        for (slot, site) in out.iter_mut().zip(&self.sites) {
            *slot = site.sample(rng);
        }
    }
}

/// One independent draw per site.
pub fn sample_errors<R: Rng + ?Sized>(model: &ErrorModel, rng: &mut R) -> Vec<Angle> {
    model
        .sites
        .iter()
        .map(|s| Angle::new(s.sample(rng)))
        .collect()
}

/// Ray from site `i` rotated by `eps` off the true bearing.
pub fn site_ray(scenario: &Scenario, i: usize, eps: f64) -> Result<Ray> {
    let r = true_ray(scenario.points[i], scenario.target)?;
    apply_error(r, Angle::new(eps))
}

/// Smallest cone holding the site's random ray, plus the two-ray cone `D_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportCone {
    pub site: usize,
    pub k: Cone,
    pub d: Option<Cone>,
}

pub fn support_cone(scenario: &Scenario, model: &ErrorModel, i: usize) -> Result<SupportCone> {
    model.check_sites(scenario)?;
    if i >= scenario.n() {
        return Err(Error::SiteIndex {
            index: i,
            n: scenario.n(),
        });
    }
    let site = &model.sites[i];
    let (lo, hi) = site.extent();
    if hi - lo >= PI {
        return Err(Error::ImproperSupportCone(i));
    }
    let bearing = true_ray(scenario.points[i], scenario.target)?.direction;
    let k = Cone {
        apex: scenario.points[i],
        start: bearing + lo,
        end: bearing + hi,
    };
    Ok(SupportCone {
        site: i,
        k,
        d: site.as_two_ray().map(|_| k),
    })
}

/// A pair of extreme rays that fail to meet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairFailure {
    pub i: usize,
    pub j: usize,
    pub sign_i: Sign,
    pub sign_j: Sign,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PairwiseReport {
    pub valid: bool,
    pub failures: Vec<PairFailure>,
    /// Two-ray pairs whose four boundary-ray crossings do not form a convex
    /// quadrilateral around the target.
    pub quadrilateral_failures: Vec<(usize, usize)>,
}

impl PairwiseReport {
    pub fn describe(&self) -> String {
        let sym = |s: Sign| if s == Sign::Plus { '+' } else { '-' };
        let mut parts: Vec<String> = self
            .failures
            .iter()
            .map(|f| {
                format!(
                    "R{}{} misses R{}{}",
                    f.i + 1,
                    sym(f.sign_i),
                    f.j + 1,
                    sym(f.sign_j)
                )
            })
            .collect();
        parts.extend(
            self.quadrilateral_failures
                .iter()
                .map(|(i, j)| format!("D{} and D{} do not meet in a quadrilateral", i + 1, j + 1)),
        );
        parts.join("; ")
    }
}

fn sign_of(eps: f64) -> Sign {
    if eps > 0.0 {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

/// Convex quadrilateral `q` (in cyclic order) strictly containing `f`.
fn convex_quad_around(q: [Point2; 4], f: Point2) -> bool {
    let mut turn = Sign::Zero;
    for k in 0..4 {
        let (a, b, c) = (q[k], q[(k + 1) % 4], q[(k + 2) % 4]);
        for s in [orientation(a, b, c), orientation(a, b, f)] {
            if s == Sign::Zero || (turn != Sign::Zero && s != turn) {
                return false;
            }
            turn = s;
        }
    }
    true
}

/// Check that every pair of extreme rays from distinct sites meets.
pub fn validate_pairwise_intersection(
    scenario: &Scenario,
    model: &ErrorModel,
) -> Result<PairwiseReport> {
    model.check_sites(scenario)?;
    let n = scenario.n();
    let rays: Vec<Vec<(f64, Ray)>> = (0..n)
        .map(|i| {
            model.sites[i]
                .extreme_errors()
                .into_iter()
                .map(|e| site_ray(scenario, i, e).map(|r| (e, r)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut report = PairwiseReport::default();
    for i in 0..n {
        for j in i + 1..n {
            let mut pair_ok = true;
            for (ei, ri) in &rays[i] {
                for (ej, rj) in &rays[j] {
                    if !matches!(intersect_rays(ri, rj), Ok(Some(_))) {
                        pair_ok = false;
                        report.failures.push(PairFailure {
                            i,
                            j,
                            sign_i: sign_of(*ei),
                            sign_j: sign_of(*ej),
                        });
                    }
                }
            }
            if let (true, Some(mi), Some(mj)) = (
                pair_ok,
                model.sites[i].as_two_ray(),
                model.sites[j].as_two_ray(),
            ) {
                let ray = |k: usize, m: &TwoRaySiteModel, s: Sign| site_ray(scenario, k, m.eps(s));
                let meet = |s: Sign, t: Sign| -> Result<Point2> {
                    let a = ray(i, mi, s)?;
                    let b = ray(j, mj, t)?;
                    intersect_rays(&a, &b)?.ok_or(Error::DegenerateOverlap)
                };
                let quad = [
                    meet(Sign::Minus, Sign::Minus)?,
                    meet(Sign::Minus, Sign::Plus)?,
                    meet(Sign::Plus, Sign::Plus)?,
                    meet(Sign::Plus, Sign::Minus)?,
                ];
                if !convex_quad_around(quad, scenario.target) {
                    report.quadrilateral_failures.push((i, j));
                }
            }
        }
    }
    report.valid = report.failures.is_empty() && report.quadrilateral_failures.is_empty();
    Ok(report)
}

/// Validate and turn a failing report into an error.
pub fn require_pairwise_intersection(scenario: &Scenario, model: &ErrorModel) -> Result<()> {
    let report = validate_pairwise_intersection(scenario, model)?;
    if report.valid {
        Ok(())
    } else {
        Err(Error::PairwiseIntersection(report.describe()))
    }
}

/// Count sampled joint draws in which some pair of rays fails to meet.
pub fn audit_pairwise_intersection(
    scenario: &Scenario,
    model: &ErrorModel,
    samples: u64,
    seed: u64,
) -> Result<u64> {
    model.check_sites(scenario)?;
    let n = scenario.n();
    let mut rng = substream(seed, 0);
    let mut eps = vec![0.0; n];
    let mut rays = Vec::with_capacity(n);
    let mut bad = 0;
    for _ in 0..samples {
        model.sample_into(&mut rng, &mut eps);
        rays.clear();
        for (i, &e) in eps.iter().enumerate() {
            rays.push(site_ray(scenario, i, e)?);
        }
        let all_meet = (0..n)
            .all(|i| (i + 1..n).all(|j| matches!(intersect_rays(&rays[i], &rays[j]), Ok(Some(_)))));
        if !all_meet {
            bad += 1;
        }
    }
    Ok(bad)
}

/// Angular room on either side of the true bearing inside `cap(C_ij)` over `j`.
fn bearing_room(scenario: &Scenario, i: usize) -> Result<f64> {
    let bearing = true_ray(scenario.points[i], scenario.target)?.direction;
    let mut room = FRAC_PI_2;
    for j in (0..scenario.n()).filter(|&j| j != i) {
        let c = cone_c_ij(scenario, i, j)?.whole;
        let before = c.start.sweep_to(bearing);
        let after = bearing.sweep_to(c.end);
        room = room.min(before).min(after);
    }
    Ok(room)
}

/// Bisection step tolerance, in radians of the widest site.
const BISECTION_TOL: f64 = 1e-6;

/// Largest symmetric half-widths, scaled from each site's angular room by a
/// common factor, for which the interval model passes validation.
pub fn max_valid_half_width(scenario: &Scenario) -> Result<Vec<Angle>> {
    let report = scenario.general_position();
    if !report.valid() {
        return Err(Error::GeneralPosition(report.to_string()));
    }
    let room = (0..scenario.n())
        .map(|i| bearing_room(scenario, i))
        .collect::<Result<Vec<_>>>()?;
    let widest = room.iter().copied().fold(0.0, f64::max);
    if widest <= 0.0 {
        return Err(Error::NoConstrainedModel);
    }
    let passes = |t: f64| -> bool {
        let widths: Vec<f64> = room.iter().map(|b| b * t).collect();
        match ErrorModel::intervals(&widths) {
            Ok(model) => {
                matches!(validate_pairwise_intersection(scenario, &model), Ok(r) if r.valid)
            }
            Err(_) => false,
        }
    };
    let scale = if passes(1.0) {
        1.0
    } else {
        let (mut lo, mut hi) = (0.0, 1.0);
        while (hi - lo) * widest > BISECTION_TOL {
            let mid = 0.5 * (lo + hi);
            if passes(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if lo == 0.0 {
            return Err(Error::NoConstrainedModel);
        }
        lo
    };
    Ok(room.iter().map(|b| Angle::new(b * scale)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::{equilateral, make_counterexample, CounterexampleId};
    use std::f64::consts::TAU;

    #[test]
    fn site_model_constructors() {
        assert!(TwoRaySiteModel::new(-0.1, 0.2).is_ok());
        assert!(TwoRaySiteModel::new(0.1, 0.2).is_err());
        assert!(TwoRaySiteModel::new(-0.1, PI).is_err());
        assert!(SymmetricIntervalSiteModel::new(0.0).is_err());
        assert!(SymmetricIntervalSiteModel::new(PI).is_err());
        let a = TwoRaySiteModel::symmetric(0.1).unwrap();
        assert!(TwoRayMixture::new(a, a, 1.0).is_err());
    }

    #[test]
    fn support_cone_examples() {
        let s = Scenario::new(
            vec![Point2::new(-1.0, 0.0), Point2::new(0.0, 2.0)],
            Point2::ORIGIN,
        )
        .unwrap();
        let ten = 10f64.to_radians();
        let model = ErrorModel::two_ray_symmetric(2, ten).unwrap();
        let c = support_cone(&s, &model, 0).unwrap();
        assert!((c.k.start.radians() + ten).abs() < 1e-12);
        assert!((c.k.end.radians() - ten).abs() < 1e-12);
        assert_eq!(c.d, Some(c.k));

        let five = 5f64.to_radians();
        let model = ErrorModel::intervals(&[five, five]).unwrap();
        let c = support_cone(&s, &model, 0).unwrap();
        assert!((c.k.width() - 2.0 * five).abs() < 1e-12);
        assert!(c.k.contains_direction(Angle::ZERO));
        assert_eq!(c.d, None);

        let wide = ErrorModel::new(vec![
            SiteModel::TwoRay(
                TwoRaySiteModel::new(-2.0, 1.5).unwrap()
            );
            2
        ]);
        assert_eq!(
            support_cone(&s, &wide, 0),
            Err(Error::ImproperSupportCone(0))
        );
    }

    #[test]
    fn equilateral_small_interval_is_valid() {
        let s = equilateral(1.0);
        let model = ErrorModel::intervals(&[1f64.to_radians(); 3]).unwrap();
        let r = validate_pairwise_intersection(&s, &model).unwrap();
        assert!(r.valid, "{}", r.describe());
    }

    #[test]
    fn single_site_is_vacuously_valid() {
        let s = Scenario::new(vec![Point2::new(1.0, 0.0)], Point2::ORIGIN).unwrap();
        let model = ErrorModel::two_ray_symmetric(1, 3.0).unwrap();
        assert!(validate_pairwise_intersection(&s, &model).unwrap().valid);
    }

    #[test]
    fn first_counterexample_fails_validation() {
        let ce = make_counterexample(CounterexampleId::Ce1).unwrap();
        let r = validate_pairwise_intersection(&ce.scenario, &ce.model).unwrap();
        assert!(!r.valid);
        // R_i^+ misses both rays of the next site (indices mod 3).
        for i in 0..3 {
            let j = (i + 1) % 3;
            for sj in [Sign::Plus, Sign::Minus] {
                let hit = r.failures.iter().any(|f| {
                    (f.i, f.j, f.sign_i, f.sign_j) == (i, j, Sign::Plus, sj)
                        || (f.i, f.j, f.sign_i, f.sign_j) == (j, i, sj, Sign::Plus)
                });
                assert!(hit, "missing failure R{}+ / R{}{:?}", i + 1, j + 1, sj);
            }
        }
    }

    #[test]
    fn max_half_width_equilateral_is_symmetric() {
        let s = equilateral(1.0);
        let w = max_valid_half_width(&s).unwrap();
        assert_eq!(w.len(), 3);
        assert!(w[0].radians() > 0.0);
        for k in 1..3 {
            assert!((w[k].radians() - w[0].radians()).abs() < 1e-6);
        }
        let widths: Vec<f64> = w.iter().map(|a| a.radians()).collect();
        let model = ErrorModel::intervals(&widths).unwrap();
        assert!(validate_pairwise_intersection(&s, &model).unwrap().valid);
    }

    #[test]
    fn max_half_width_shrinks_with_collinearity() {
        // P_1, P_2 and F approach a common line with P_2 between P_1 and F.
        let mut last = f64::INFINITY;
        for k in 1..5 {
            let lift = 10f64.powi(-k);
            let s = Scenario::new(
                vec![
                    Point2::new(-2.0, 0.0),
                    Point2::new(-1.0, lift),
                    Point2::new(0.3, 1.5),
                ],
                Point2::ORIGIN,
            )
            .unwrap();
            let w = max_valid_half_width(&s).unwrap();
            let narrow = w[0].radians().min(w[1].radians());
            assert!(narrow < last, "lift {lift}: {narrow} >= {last}");
            last = narrow;
        }
        assert!(last < 1e-3);
    }

    #[test]
    fn sampling_frequencies_and_replay() {
        let model = ErrorModel::new(vec![
            SiteModel::TwoRay(TwoRaySiteModel::new(-0.1, 0.3).unwrap()),
            SiteModel::Interval(SymmetricIntervalSiteModel::new(0.2).unwrap()),
        ]);
        let mut rng = substream(11, 0);
        let n = 1_000_000;
        let mut positive = [0u64; 2];
        for _ in 0..n {
            let e = sample_errors(&model, &mut rng);
            for (k, a) in e.iter().enumerate() {
                assert!(a.radians() != 0.0);
                if a.radians() > 0.0 {
                    positive[k] += 1;
                }
            }
        }
        for p in positive {
            let freq = p as f64 / n as f64;
            assert!((freq - 0.5).abs() < 0.002, "frequency {freq}");
        }

        let mut a = substream(5, 2);
        let mut b = substream(5, 2);
        for _ in 0..100 {
            assert_eq!(sample_errors(&model, &mut a), sample_errors(&model, &mut b));
        }
    }

    #[test]
    fn two_ray_sample_values() {
        let m = TwoRaySiteModel::new(-0.25, 0.5).unwrap();
        let model = ErrorModel::new(vec![SiteModel::TwoRay(m)]);
        let mut rng = substream(1, 1);
        for _ in 0..64 {
            let e = sample_errors(&model, &mut rng)[0].radians();
            assert!(e == -0.25 || e == 0.5);
        }
    }

    #[test]
    fn quadrilateral_predicate() {
        let sq = [
            Point2::new(-1.0, -1.0),
            Point2::new(1.0, -1.0),
            Point2::new(1.0, 1.0),
            Point2::new(-1.0, 1.0),
        ];
        assert!(convex_quad_around(sq, Point2::ORIGIN));
        assert!(!convex_quad_around(sq, Point2::new(3.0, 0.0)));
        let bow = [sq[0], sq[2], sq[1], sq[3]];
        assert!(!convex_quad_around(bow, Point2::new(0.1, 0.0)));
        let _ = TAU;
    }
}
