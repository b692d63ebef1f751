//! Flag value grammars: byte sizes, durations, inclusive ranges and date
//! ranges.

use chrono::NaiveDate;

use crate::event::{SECS_PER_DAY, SECS_PER_HOUR};

const BYTE_UNITS: [(&str, u64); 5] = [
    ("TB", 1_000_000_000_000),
    ("GB", 1_000_000_000),
    ("MB", 1_000_000),
    ("KB", 1_000),
    ("B", 1),
];

const TIME_UNITS: [(&str, i64); 4] = [("d", SECS_PER_DAY), ("h", SECS_PER_HOUR), ("m", 60), ("s", 1)];

fn split_number(s: &str) -> (&str, &str) {
    let end = s
        .find(|c: char| !(c.is_ascii_digit() || c == '.'))
        .unwrap_or(s.len());
    (s[..end].trim(), s[end..].trim())
}

fn scaled(num: &str, mult: f64, what: &str, original: &str) -> Result<f64, String> {
    let v: f64 = num
        .parse()
        .map_err(|_| format!("invalid {what} `{original}`"))?;
    let v = v * mult;
    if !v.is_finite() || v < 0.0 {
        return Err(format!("invalid {what} `{original}`"));
    }
    Ok(v.round())
}

/// `40TB`, `1.5 GB`, `512` (bytes). Decimal multipliers.
pub fn parse_bytes(s: &str) -> Result<u64, String> {
    let (num, unit) = split_number(s.trim());
    let mult = if unit.is_empty() {
        1
    } else {
        BYTE_UNITS
            .iter()
            .find(|(u, _)| u.eq_ignore_ascii_case(unit))
            .map(|&(_, m)| m)
            .ok_or_else(|| format!("unknown size unit `{unit}` (use B, KB, MB, GB or TB)"))?
    };
    let v = scaled(num, mult as f64, "size", s)?;
    if v > u64::MAX as f64 {
        return Err(format!("size `{s}` too large"));
    }
    Ok(v as u64)
}

/// `1.2d`, `6h`, `30m`, `45s`, or bare seconds.
pub fn parse_duration_secs(s: &str) -> Result<i64, String> {
    let (num, unit) = split_number(s.trim());
    let mult = if unit.is_empty() {
        1
    } else {
        TIME_UNITS
            .iter()
            .find(|(u, _)| *u == unit)
            .map(|&(_, m)| m)
            .ok_or_else(|| format!("unknown duration unit `{unit}` (use d, h, m or s)"))?
    };
    Ok(scaled(num, mult as f64, "duration", s)? as i64)
}

/// `lo:hi:step` (inclusive of `hi` when it lies on the grid), a comma list,
/// or a single value.
fn parse_range<T, F>(s: &str, one: F, step_add: impl Fn(T, T) -> Option<T>) -> Result<Vec<T>, String>
where
    T: Copy + PartialOrd + Default,
    F: Fn(&str) -> Result<T, String>,
{
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [lo, hi, step] => {
            let (lo, hi, step) = (one(lo)?, one(hi)?, one(step)?);
            if step <= T::default() {
                return Err("range step must be positive".into());
            }
            if lo > hi {
                return Err("range start exceeds its end".into());
            }
            let mut out = vec![lo];
            let mut cur = lo;
            while let Some(next) = step_add(cur, step).filter(|n| *n <= hi) {
                out.push(next);
                cur = next;
            }
            Ok(out)
        }
        [single] => single.split(',').map(|v| one(v.trim())).collect(),
        _ => Err(format!("invalid range `{s}` (use lo:hi:step or a comma list)")),
    }
}

pub fn parse_byte_list(s: &str) -> Result<Vec<u64>, String> {
    let v = parse_range(s, parse_bytes, u64::checked_add)?;
    if v.contains(&0) {
        return Err("capacities must be positive".into());
    }
    Ok(v)
}

pub fn parse_duration_list(s: &str) -> Result<Vec<i64>, String> {
    parse_range(s, parse_duration_secs, i64::checked_add)
}

/// `YYYY-MM-DD:YYYY-MM-DD` (inclusive) or a single day.
pub fn parse_date_range(s: &str) -> Result<(NaiveDate, NaiveDate), String> {
    let day = |d: &str| {
        NaiveDate::parse_from_str(d.trim(), "%Y-%m-%d").map_err(|_| format!("invalid date `{d}`"))
    };
    let (first, last) = match s.split_once(':') {
        Some((a, b)) => (day(a)?, day(b)?),
        None => (day(s)?, day(s)?),
    };
    if first > last {
        return Err(format!("date range `{s}` ends before it starts"));
    }
    Ok((first, last))
}
