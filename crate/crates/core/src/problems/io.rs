//! Plain-text instance formats.
//!
//! Points: one `x y` pair per line. Set systems: a header line `n s`, then
//! one line per set with space-separated 0-based element indices. Blank lines
//! and lines starting with `#` are ignored in both formats.

use std::fs;
use std::path::Path;

use super::{Point2D, ProblemError, SetSystem};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_err(line: usize, message: impl Into<String>) -> ProblemError {
    ProblemError::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_points(text: &str) -> Result<Vec<Point2D>, ProblemError> {
    content_lines(text)
        .map(|(line, l)| {
            let fields: Vec<&str> = l.split_whitespace().collect();
            let [x, y] = fields[..] else {
                return Err(parse_err(line, format!("expected 2 fields, found {}", fields.len())));
            };
            let x: f64 = x.parse().map_err(|_| parse_err(line, format!("bad number {x:?}")))?;
            let y: f64 = y.parse().map_err(|_| parse_err(line, format!("bad number {y:?}")))?;
            if !x.is_finite() || !y.is_finite() {
                return Err(parse_err(line, "coordinates must be finite"));
            }
            Ok(Point2D::new(x, y))
        })
        .collect()
}

pub fn parse_set_system(text: &str) -> Result<SetSystem, ProblemError> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let nums: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| parse_err(line, format!("bad count {t:?}"))))
        .collect::<Result<_, _>>()?;
    let [n, s] = nums[..] else {
        return Err(parse_err(line, "header must be `n s`"));
    };
    let mut sets = Vec::with_capacity(s);
    for (line, l) in lines {
        let set: Vec<usize> = l
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(line, format!("bad index {t:?}"))))
            .collect::<Result<_, _>>()?;
        sets.push(set);
    }
    if sets.len() != s {
        return Err(parse_err(line, format!("header announces {s} sets, found {}", sets.len())));
    }
    SetSystem::new(n, sets)
}

pub fn read_points(path: impl AsRef<Path>) -> Result<Vec<Point2D>, ProblemError> {
    parse_points(&fs::read_to_string(path)?)
}

pub fn read_set_system(path: impl AsRef<Path>) -> Result<SetSystem, ProblemError> {
    parse_set_system(&fs::read_to_string(path)?)
}

pub fn format_points(points: &[Point2D]) -> String {
    points.iter().map(|p| format!("{} {}\n", p.x, p.y)).collect()
}

pub fn format_set_system(sys: &SetSystem) -> String {
    let mut out = format!("{} {}\n", sys.universe_size(), sys.num_sets());
    for set in sys.sets() {
        let line: Vec<String> = set.iter().map(usize::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_round_trip() {
        let pts = vec![Point2D::new(0.5, -1.25), Point2D::new(3.0, 1e-3)];
        assert_eq!(parse_points(&format_points(&pts)).unwrap(), pts);
    }

    #[test]
    fn points_skip_comments_and_report_lines() {
        let text = "# header\n1 2\n\n3 x\n";
        match parse_points(text) {
            Err(ProblemError::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_points("1 2 3\n").is_err());
        assert!(parse_points("inf 0\n").is_err());
    }

    #[test]
    fn set_system_round_trip() {
        let sys = SetSystem::new(4, vec![vec![0, 3], vec![2]]).unwrap();
        assert_eq!(parse_set_system(&format_set_system(&sys)).unwrap(), sys);
    }

    #[test]
    fn set_system_count_mismatch() {
        assert!(parse_set_system("3 2\n0 1\n").is_err());
        assert!(parse_set_system("").is_err());
        assert!(matches!(parse_set_system("2 1\n5\n"), Err(ProblemError::IndexOutOfRange { .. })));
    }
}
