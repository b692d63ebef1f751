//! Reference LRU: a plain list scanned linearly, most recent at index 0.

use super::{SimError, SimResult};
use crate::event::TraceEvent;

pub fn oracle_lru<'a>(
    events: impl IntoIterator<Item = &'a TraceEvent>,
    capacity: u64,
) -> Result<SimResult, SimError> {
    if capacity == 0 {
        return Err(SimError::ZeroCapacity);
    }
    let mut list: Vec<(&str, u64)> = Vec::new();
    let mut r = SimResult {
        capacity,
        ..SimResult::default()
    };
    for e in events {
        match e {
            TraceEvent::Transfer { path, size, .. } => {
                if *size > capacity {
                    r.oversize += 1;
                    continue;
                }
                if let Some(i) = list.iter().position(|(p, _)| *p == path.as_str()) {
                    r.bytes_evicted += list.remove(i).1;
                }
                list.insert(0, (path.as_str(), *size));
                r.bytes_inserted += size;
                while list.iter().map(|(_, s)| s).sum::<u64>() > capacity {
                    let (_, s) = list.pop().unwrap();
                    r.bytes_evicted += s;
                    r.eviction_events += 1;
                }
            }
            TraceEvent::Read { .. } | TraceEvent::ReadV { .. } => {
                r.total_reads += 1;
                let pos = e
                    .path()
                    .and_then(|p| list.iter().position(|(q, _)| *q == p.as_str()));
                match pos {
                    Some(i) => {
                        let item = list.remove(i);
                        list.insert(0, item);
                        r.hits += 1;
                    }
                    None => r.misses += 1,
                }
            }
            _ => {}
        }
    }
    r.final_occupied = list.iter().map(|(_, s)| s).sum();
    if r.total_reads > 0 {
        r.hit_rate = Some(r.hits as f64 / r.total_reads as f64);
    }
    Ok(r)
}
