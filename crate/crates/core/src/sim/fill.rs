use std::collections::HashMap;

use serde::Serialize;

use crate::event::{FilePath, TraceEvent};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FillPoint {
    pub capacity: u64,
    /// Seconds from the first event to the filling transfer; absent when the
    /// cache never fills.
    pub duration_secs: Option<i64>,
}

/// Replays transfers into an initially empty cache. A cache is full at the
/// first transfer after which the bytes it would hold (current size of every
/// transferred path) reach its capacity. Nothing is evicted before that
/// point, so one running total serves every capacity.
pub fn fill_time(events: &[TraceEvent], capacities: &[u64]) -> Vec<FillPoint> {
    // (timestamp, running maximum of held bytes) after each transfer.
    let mut curve: Vec<(i64, u128)> = Vec::new();
    if let Some(first) = events.first() {
        let t0 = first.ts();
        let mut sizes: HashMap<&FilePath, u64> = HashMap::new();
        let mut held: u128 = 0;
        let mut peak: u128 = 0;
        for e in events {
            if let TraceEvent::Transfer { ts, path, size } = e {
                let old = sizes.insert(path, *size).unwrap_or(0);
                held = held - old as u128 + *size as u128;
                peak = peak.max(held);
                curve.push((ts.secs_since(t0), peak));
            }
        }
    }
    capacities
        .iter()
        .map(|&capacity| {
            let i = curve.partition_point(|&(_, peak)| peak < capacity as u128);
            FillPoint {
                capacity,
                duration_secs: curve.get(i).map(|&(d, _)| d),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::{Timestamp, SECS_PER_DAY};

    fn transfer(p: &str, day: i64, size: u64) -> TraceEvent {
        TraceEvent::Transfer {
            ts: Timestamp::from_secs(day * SECS_PER_DAY),
            path: p.into(),
            size,
        }
    }

    #[test]
    fn constant_rate() {
        let ev: Vec<_> = (0..100)
            .map(|d| transfer(&format!("/f{d}"), d, 1_000))
            .collect();
        let pts = fill_time(&ev, &[10_000, 25_500, 1_000_000]);
        assert_eq!(pts[0].duration_secs, Some(9 * SECS_PER_DAY));
        assert_eq!(pts[1].duration_secs, Some(25 * SECS_PER_DAY));
        assert_eq!(pts[2].duration_secs, None);
    }

    #[test]
    fn replacement_counts_once() {
        let ev = [transfer("/a", 0, 5), transfer("/a", 1, 5), transfer("/b", 2, 5)];
        let pts = fill_time(&ev, &[10]);
        assert_eq!(pts[0].duration_secs, Some(2 * SECS_PER_DAY));
    }

    #[test]
    fn empty_trace_never_fills() {
        assert_eq!(fill_time(&[], &[1])[0].duration_secs, None);
    }
}
