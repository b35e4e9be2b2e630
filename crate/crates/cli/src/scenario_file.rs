//! `.scn` scenario files: `P <x> <y>` per site, then `F <x> <y>`, with `#`
//! comments. Coordinates are written with 17 fractional digits in
//! scientific notation, which round-trips every finite `f64`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use cocked_hat::geometry::Point2;
use cocked_hat::scenarios::Scenario;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub fn format_coord(v: f64) -> String {
    format!("{v:.17e}")
}

/// Comment-free text whose hash identifies the scenario.
pub fn canonical_text(scenario: &Scenario) -> String {
    let mut out = String::new();
    for p in &scenario.points {
        writeln!(out, "P {} {}", format_coord(p.x), format_coord(p.y)).unwrap();
    }
    let f = scenario.target;
    writeln!(out, "F {} {}", format_coord(f.x), format_coord(f.y)).unwrap();
    out
}

/// Hex SHA-256 of the canonical text.
pub fn scenario_hash(scenario: &Scenario) -> String {
    hex::encode(Sha256::digest(canonical_text(scenario).as_bytes()))
}

fn parse_number(field: &str) -> Result<f64, String> {
    let v: f64 = field
        .parse()
        .map_err(|_| format!("{field:?} is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{field:?} is not finite"))
    }
}

/// Parse `x,y` (used for inline coordinates).
pub fn parse_pair(text: &str) -> Result<Point2, String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [x, y] = parts[..] else {
        return Err(format!("expected x,y but got {text:?}"));
    };
    Ok(Point2::new(parse_number(x)?, parse_number(y)?))
}

pub fn parse_scenario(text: &str, origin: &str) -> CliResult<Scenario> {
    let syntax = |line: usize, message: String| CliError::ScenarioSyntax {
        origin: origin.to_string(),
        line,
        message,
    };
    let mut points = Vec::new();
    let mut target: Option<Point2> = None;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        let [tag, x, y] = fields[..] else {
            return Err(syntax(
                line,
                format!("expected `<P|F> <x> <y>`, got {body:?}"),
            ));
        };
        let p = Point2::new(
            parse_number(x).map_err(|m| syntax(line, m))?,
            parse_number(y).map_err(|m| syntax(line, m))?,
        );
        match tag {
            "P" | "p" => points.push(p),
            "F" | "f" if target.is_some() => {
                return Err(syntax(line, "second target record".into()))
            }
            "F" | "f" => target = Some(p),
            other => return Err(syntax(line, format!("unknown record {other:?}"))),
        }
    }
    let end = text.lines().count();
    let target = target.ok_or_else(|| syntax(end, "no `F` target record".into()))?;
    if points.is_empty() {
        return Err(syntax(end, "no `P` site records".into()));
    }
    Ok(Scenario::new(points, target)?)
}

pub fn read_scenario(path: &Path) -> CliResult<Scenario> {
    let shown = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: shown.clone(),
        source,
    })?;
    parse_scenario(&text, &shown)
}

pub fn write_scenario(path: &Path, scenario: &Scenario, comments: &[String]) -> CliResult<()> {
    let mut text = String::new();
    for c in comments {
        writeln!(text, "# {c}").unwrap();
    }
    text.push_str(&canonical_text(scenario));
    fs::write(path, text).map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use cocked_hat::scenarios::equilateral;

    #[test]
    fn canonical_text_round_trips() {
        let s = equilateral(1.0);
        let back = parse_scenario(&canonical_text(&s), "mem").unwrap();
        assert_eq!(back, s);
        assert_eq!(scenario_hash(&back), scenario_hash(&s));
        assert_eq!(scenario_hash(&s).len(), 64);
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# three sites\nP 0 1\n\nP 1 0  # east\nP -1 0\nF 0 0.25\n";
        let s = parse_scenario(text, "mem").unwrap();
        assert_eq!(s.n(), 3);
        assert_eq!(s.target, Point2::new(0.0, 0.25));
    }

    #[test]
    fn syntax_errors_name_the_line() {
        let cases = [
            ("P 0 1\nQ 1 1\nF 0 0\n", 2),
            ("P 0 1\nP 1 x\nF 0 0\n", 2),
            ("P 0 1\nF 0 0\nF 1 1\n", 3),
            ("P 0 1\nP 1 1\n", 2),
            ("P 0 1 2\n", 1),
            ("P inf 1\nF 0 0\n", 1),
        ];
        for (text, want) in cases {
            match parse_scenario(text, "mem") {
                Err(CliError::ScenarioSyntax { line, .. }) => assert_eq!(line, want, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn pairs() {
        assert_eq!(parse_pair(" 1.5, -2 ").unwrap(), Point2::new(1.5, -2.0));
        assert!(parse_pair("1").is_err());
        assert!(parse_pair("1,2,3").is_err());
    }
}
