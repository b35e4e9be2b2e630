//! Text form of error models.
//!
//! A spec is `auto`, `auto:interval`, `auto:tworay`, or one site spec per
//! site separated by `;` (a single site spec applies to every site). Site
//! specs are `tworay:±A`, `tworay:LO,HI` and `interval:A`. Angles take a
//! `deg` or `rad` suffix; a bare number is in radians.

use cocked_hat::distributions::{
    max_valid_half_width, ErrorModel, SiteModel, SymmetricIntervalSiteModel, TwoRaySiteModel,
};
use cocked_hat::scenarios::{Scenario, SAFETY_FACTOR};

use crate::error::{CliError, CliResult};
use crate::scenario_file::format_coord;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SiteSpec {
    TwoRay { minus: f64, plus: f64 },
    Interval { half_width: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AutoKind {
    Interval,
    TwoRay,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    /// Symmetric sites at the validated fraction of the widest admissible half-width.
    Auto(AutoKind),
    Sites(Vec<SiteSpec>),
}

pub fn parse_angle(text: &str) -> Result<f64, String> {
    let t = text.trim();
    let (num, scale) = if let Some(n) = t.strip_suffix("deg").or_else(|| t.strip_suffix('°')) {
        (n, std::f64::consts::PI / 180.0)
    } else if let Some(n) = t.strip_suffix("rad") {
        (n, 1.0)
    } else {
        (t, 1.0)
    };
    let v: f64 = num
        .trim()
        .parse()
        .map_err(|_| format!("{text:?} is not an angle"))?;
    if !v.is_finite() {
        return Err(format!("{text:?} is not finite"));
    }
    Ok(v * scale)
}

fn parse_site(text: &str) -> Result<SiteSpec, String> {
    let (kind, args) = text
        .split_once(':')
        .ok_or_else(|| format!("{text:?} lacks a `kind:` prefix"))?;
    match kind.trim() {
        "tworay" => {
            let args = args.trim();
            let sym = args.strip_prefix('±').or_else(|| args.strip_prefix("+-"));
            if let Some(a) = sym {
                let a = parse_angle(a)?;
                return Ok(SiteSpec::TwoRay { minus: -a, plus: a });
            }
            match args.split(',').collect::<Vec<_>>()[..] {
                [lo, hi] => Ok(SiteSpec::TwoRay {
                    minus: parse_angle(lo)?,
                    plus: parse_angle(hi)?,
                }),
                [a] => {
                    let a = parse_angle(a)?.abs();
                    Ok(SiteSpec::TwoRay { minus: -a, plus: a })
                }
                _ => Err(format!("tworay takes ±A or LO,HI, got {args:?}")),
            }
        }
        "interval" => Ok(SiteSpec::Interval {
            half_width: parse_angle(args)?,
        }),
        other => Err(format!(
            "unknown site model {other:?}; expected tworay or interval"
        )),
    }
}

impl std::str::FromStr for ModelSpec {
    type Err = CliError;
    fn from_str(text: &str) -> CliResult<Self> {
        let err = |message: String| CliError::ModelSpec {
            spec: text.to_string(),
            message,
        };
        match text.trim() {
            "auto" | "auto:interval" => return Ok(ModelSpec::Auto(AutoKind::Interval)),
            "auto:tworay" => return Ok(ModelSpec::Auto(AutoKind::TwoRay)),
            _ => {}
        }
        let sites = text
            .split(';')
            .filter(|s| !s.trim().is_empty())
            .map(parse_site)
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        if sites.is_empty() {
            return Err(err("no site models".into()));
        }
        Ok(ModelSpec::Sites(sites))
    }
}

fn build_site(spec: SiteSpec) -> cocked_hat::Result<SiteModel> {
    Ok(match spec {
        SiteSpec::TwoRay { minus, plus } => SiteModel::TwoRay(TwoRaySiteModel::new(minus, plus)?),
        SiteSpec::Interval { half_width } => {
            SiteModel::Interval(SymmetricIntervalSiteModel::new(half_width)?)
        }
    })
}

impl ModelSpec {
    /// The error model this spec denotes for `scenario`.
    pub fn resolve(&self, scenario: &Scenario) -> CliResult<ErrorModel> {
        let n = scenario.n();
        let sites = match self {
            ModelSpec::Auto(kind) => max_valid_half_width(scenario)?
                .into_iter()
                .map(|w| {
                    let a = SAFETY_FACTOR * w.radians();
                    build_site(match kind {
                        AutoKind::Interval => SiteSpec::Interval { half_width: a },
                        AutoKind::TwoRay => SiteSpec::TwoRay { minus: -a, plus: a },
                    })
                })
                .collect::<cocked_hat::Result<Vec<_>>>()?,
            ModelSpec::Sites(specs) if specs.len() == 1 => vec![build_site(specs[0])?; n],
            ModelSpec::Sites(specs) => specs
                .iter()
                .map(|s| build_site(*s))
                .collect::<cocked_hat::Result<Vec<_>>>()?,
        };
        let model = ErrorModel::new(sites);
        model.check_sites(scenario)?;
        Ok(model)
    }
}

/// Lossless spec for a model of two-ray and interval sites.
pub fn format_model(model: &ErrorModel) -> Option<String> {
    let sites = model
        .sites
        .iter()
        .map(|s| match s {
            SiteModel::TwoRay(m) => Some(format!(
                "tworay:{}rad,{}rad",
                format_coord(m.eps_minus()),
                format_coord(m.eps_plus())
            )),
            SiteModel::Interval(m) => Some(format!("interval:{}rad", format_coord(m.half_width()))),
            SiteModel::Mixture(_) => None,
        })
        .collect::<Option<Vec<_>>>()?;
    Some(sites.join(";"))
}
