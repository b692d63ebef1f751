//! File lifetimes: maximal runs of opens of one path where consecutive opens
//! are at most `tau` apart.

use std::collections::HashMap;

use rayon::prelude::*;

use super::StatsError;
use crate::event::{FilePath, Timestamp, TraceEvent, SECS_PER_DAY, SECS_PER_HOUR};

/// 1.2 days.
pub const DEFAULT_TAU_SECS: i64 = SECS_PER_DAY * 6 / 5;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LifetimeRecord {
    pub path: FilePath,
    /// First open of the lifetime.
    pub t_s: Timestamp,
    /// Latest close before the next lifetime, or the last open when no close
    /// was seen.
    pub t_e: Timestamp,
    pub opens: u64,
    /// False when no close was observed.
    pub complete: bool,
}

impl LifetimeRecord {
    pub fn length_secs(&self) -> i64 {
        self.t_e.secs_since(self.t_s)
    }

    pub fn hours(&self) -> f64 {
        self.length_secs() as f64 / SECS_PER_HOUR as f64
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Segmentation {
    /// Ordered by `(t_s, path)`.
    pub records: Vec<LifetimeRecord>,
    /// Closes with no live lifetime for their path.
    pub orphan_closes: u64,
}

impl Segmentation {
    pub fn mean_hours(&self) -> Option<f64> {
        mean_lifetime_hours(&self.records)
    }

    pub fn incomplete(&self) -> usize {
        self.records.iter().filter(|r| !r.complete).count()
    }
}

struct Open {
    t_s: Timestamp,
    last_open: Timestamp,
    opens: u64,
    latest_close: Option<Timestamp>,
}

impl Open {
    fn close(self, path: FilePath) -> LifetimeRecord {
        LifetimeRecord {
            path,
            t_s: self.t_s,
            t_e: self.latest_close.unwrap_or(self.last_open),
            opens: self.opens,
            complete: self.latest_close.is_some(),
        }
    }
}

/// Groups opens greedily per path: an open more than `tau_secs` after the
/// previous open of the same path starts a new lifetime. Events must be
/// time-ordered.
pub fn segment_lifetimes<'a>(
    events: impl IntoIterator<Item = &'a TraceEvent>,
    tau_secs: i64,
) -> Segmentation {
    let mut live: HashMap<FilePath, Open> = HashMap::new();
    let mut out = Segmentation::default();
    for e in events {
        match e {
            TraceEvent::Open { ts, path, .. } => match live.get_mut(path) {
                Some(cur) if ts.secs_since(cur.last_open) <= tau_secs => {
                    cur.last_open = *ts;
                    cur.opens += 1;
                }
                _ => {
                    let fresh = Open {
                        t_s: *ts,
                        last_open: *ts,
                        opens: 1,
                        latest_close: None,
                    };
                    if let Some(prev) = live.insert(path.clone(), fresh) {
                        out.records.push(prev.close(path.clone()));
                    }
                }
            },
            TraceEvent::Close { ts, path, .. } => match live.get_mut(path) {
                Some(cur) => {
                    cur.latest_close = Some(cur.latest_close.map_or(*ts, |c| c.max(*ts)));
                }
                None => out.orphan_closes += 1,
            },
            _ => {}
        }
    }
    out.records
        .extend(live.into_iter().map(|(path, open)| open.close(path)));
    out.records
        .sort_unstable_by(|a, b| (a.t_s, &a.path).cmp(&(b.t_s, &b.path)));
    out
}

pub fn mean_lifetime_hours(records: &[LifetimeRecord]) -> Option<f64> {
    if records.is_empty() {
        return None;
    }
    let total: i64 = records.iter().map(LifetimeRecord::length_secs).sum();
    Some(total as f64 / records.len() as f64 / SECS_PER_HOUR as f64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub tau_secs: i64,
    pub lifetimes: usize,
    pub mean_hours: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdSweep {
    pub points: Vec<SweepPoint>,
    /// Mean of the per-threshold means that exist.
    pub grand_mean_hours: Option<f64>,
}

pub fn threshold_sweep(events: &[TraceEvent], taus_secs: &[i64]) -> Result<ThresholdSweep, StatsError> {
    if taus_secs.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    let points: Vec<SweepPoint> = taus_secs
        .par_iter()
        .map(|&tau_secs| {
            let seg = segment_lifetimes(events, tau_secs);
            SweepPoint {
                tau_secs,
                lifetimes: seg.records.len(),
                mean_hours: seg.mean_hours(),
            }
        })
        .collect();
    let means: Vec<f64> = points.iter().filter_map(|p| p.mean_hours).collect();
    let grand_mean_hours = (!means.is_empty()).then(|| means.iter().sum::<f64>() / means.len() as f64);
    Ok(ThresholdSweep {
        points,
        grand_mean_hours,
    })
}

/// Fraction of lifetimes strictly shorter than each threshold.
pub fn lifetime_quantile_report(
    records: &[LifetimeRecord],
    thresholds_secs: &[i64],
) -> Result<Vec<f64>, StatsError> {
    if records.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    let n = records.len() as f64;
    Ok(thresholds_secs
        .iter()
        .map(|&t| records.iter().filter(|r| r.length_secs() < t).count() as f64 / n)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::SessionKey;

    const DAY: i64 = SECS_PER_DAY;

    fn open(p: &str, s: i64) -> TraceEvent {
        TraceEvent::Open {
            ts: Timestamp::from_secs(s),
            session: SessionKey::new("t", "u"),
            path: p.into(),
        }
    }

    fn close(p: &str, s: i64) -> TraceEvent {
        TraceEvent::Close {
            ts: Timestamp::from_secs(s),
            session: SessionKey::new("t", "u"),
            path: p.into(),
        }
    }

    #[test]
    fn opens_within_threshold_merge() {
        let ev = [open("/a", 0), open("/a", DAY), close("/a", DAY * 105 / 100)];
        let seg = segment_lifetimes(&ev, DEFAULT_TAU_SECS);
        assert_eq!(seg.records.len(), 1);
        let r = &seg.records[0];
        assert_eq!(r.length_secs(), DAY * 105 / 100);
        assert_eq!(r.opens, 2);
        assert!(r.complete);
    }

    #[test]
    fn gap_over_threshold_splits() {
        let ev = [open("/a", 0), open("/a", 3 * DAY)];
        let seg = segment_lifetimes(&ev, DEFAULT_TAU_SECS);
        assert_eq!(seg.records.len(), 2);
        assert!(seg.records.iter().all(|r| !r.complete && r.length_secs() == 0));
    }

    #[test]
    fn gap_exactly_tau_extends() {
        let ev = [open("/a", 0), open("/a", DEFAULT_TAU_SECS)];
        assert_eq!(segment_lifetimes(&ev, DEFAULT_TAU_SECS).records.len(), 1);
        let ev = [open("/a", 0), open("/a", DEFAULT_TAU_SECS + 1)];
        assert_eq!(segment_lifetimes(&ev, DEFAULT_TAU_SECS).records.len(), 2);
    }

    #[test]
    fn close_without_open_is_counted() {
        let ev = [close("/a", 0), open("/a", 10), close("/a", 20)];
        let seg = segment_lifetimes(&ev, DEFAULT_TAU_SECS);
        assert_eq!(seg.orphan_closes, 1);
        assert_eq!(seg.records[0].length_secs(), 10);
    }

    #[test]
    fn close_belongs_to_lifetime_before_next_open() {
        let ev = [
            open("/a", 0),
            close("/a", 100),
            close("/a", 3 * DAY),
            open("/a", 4 * DAY),
            close("/a", 4 * DAY + 50),
        ];
        let seg = segment_lifetimes(&ev, DEFAULT_TAU_SECS);
        let lens: Vec<_> = seg.records.iter().map(LifetimeRecord::length_secs).collect();
        assert_eq!(lens, [3 * DAY, 50]);
    }

    #[test]
    fn sweep_of_single_threshold_is_its_mean() {
        let ev = [open("/a", 0), close("/a", 7200), open("/b", 0), close("/b", 3600)];
        let sweep = threshold_sweep(&ev, &[DAY]).unwrap();
        assert_eq!(sweep.grand_mean_hours, Some(1.5));
        assert_eq!(sweep.points[0].mean_hours, Some(1.5));
        let sweep = threshold_sweep(&ev, &[DAY, 2 * DAY, 10 * DAY]).unwrap();
        assert!(sweep.points.iter().all(|p| p.mean_hours == Some(1.5)));
        assert!(threshold_sweep(&ev, &[]).is_err());
    }

    fn record(hours: f64) -> LifetimeRecord {
        LifetimeRecord {
            path: "/a".into(),
            t_s: Timestamp::from_secs(0),
            t_e: Timestamp::from_secs((hours * 3600.0) as i64),
            opens: 1,
            complete: true,
        }
    }

    #[test]
    fn quantile_report() {
        let recs = [record(0.5), record(2.0), record(20.0)];
        let h = SECS_PER_HOUR;
        let q = lifetime_quantile_report(&recs, &[h, 5 * h, 10 * h]).unwrap();
        assert_eq!(q, vec![1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0]);
        let zeros = [record(0.0), record(0.0)];
        assert_eq!(lifetime_quantile_report(&zeros, &[h, 5 * h]).unwrap(), vec![1.0, 1.0]);
        assert!(matches!(
            lifetime_quantile_report(&[], &[h]),
            Err(StatsError::EmptyInput)
        ));
    }
}
