use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use super::SimError;
use crate::event::{FilePath, Timestamp, TraceEvent};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FileEntry {
    pub path: FilePath,
    pub size: u64,
    pub first_access: Timestamp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Hit,
    Miss,
    /// Not a read operation.
    Neutral,
    /// A transfer larger than the whole cache; it bypasses the cache.
    Oversize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Applied {
    pub outcome: Outcome,
    /// Entries pushed out to make room, least recent first.
    pub evicted: Vec<FileEntry>,
    /// The previous entry of a re-transferred path.
    pub replaced: Option<FileEntry>,
}

impl Applied {
    fn plain(outcome: Outcome) -> Self {
        Applied {
            outcome,
            evicted: Vec::new(),
            replaced: None,
        }
    }
}

/// Fully associative LRU cache keyed by path. Recency is a monotone tick per
/// touch; the smallest live tick is the eviction victim.
#[derive(Clone, Debug)]
pub struct CacheState {
    capacity: u64,
    occupied: u64,
    clock: u64,
    entries: HashMap<FilePath, (FileEntry, u64)>,
    recency: BTreeMap<u64, FilePath>,
}

impl CacheState {
    pub fn new(capacity: u64) -> Result<Self, SimError> {
        if capacity == 0 {
            return Err(SimError::ZeroCapacity);
        }
        Ok(CacheState {
            capacity,
            occupied: 0,
            clock: 0,
            entries: HashMap::new(),
            recency: BTreeMap::new(),
        })
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    pub fn occupied(&self) -> u64 {
        self.occupied
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, path: &FilePath) -> bool {
        self.entries.contains_key(path)
    }

    /// Most recent first.
    pub fn residents(&self) -> impl Iterator<Item = &FileEntry> + '_ {
        self.recency.values().rev().map(|p| &self.entries[p].0)
    }

    fn touch(&mut self, path: &FilePath) {
        self.clock += 1;
        let tick = self.clock;
        if let Some((_, old)) = self.entries.get_mut(path) {
            self.recency.remove(old);
            *old = tick;
            self.recency.insert(tick, path.clone());
        }
    }

    fn remove(&mut self, path: &FilePath) -> Option<FileEntry> {
        let (entry, tick) = self.entries.remove(path)?;
        self.recency.remove(&tick);
        self.occupied -= entry.size;
        Some(entry)
    }

    fn insert(&mut self, path: &FilePath, size: u64, ts: Timestamp) -> Applied {
        let replaced = self.remove(path);
        let first_access = replaced.as_ref().map_or(ts, |e| e.first_access);
        self.clock += 1;
        self.entries.insert(
            path.clone(),
            (
                FileEntry {
                    path: path.clone(),
                    size,
                    first_access,
                },
                self.clock,
            ),
        );
        self.recency.insert(self.clock, path.clone());
        self.occupied += size;

        let mut evicted = Vec::new();
        while self.occupied > self.capacity {
            let (_, victim) = self
                .recency
                .pop_first()
                .expect("over capacity with no residents");
            let (entry, _) = self.entries.remove(&victim).expect("recency index out of sync");
            self.occupied -= entry.size;
            evicted.push(entry);
        }
        Applied {
            outcome: Outcome::Neutral,
            evicted,
            replaced,
        }
    }

    pub fn apply_event(&mut self, event: &TraceEvent) -> Applied {
        match event {
            TraceEvent::Transfer { ts, path, size } => {
                if *size > self.capacity {
                    log::warn!(
                        "transfer of {path} ({size} B) exceeds capacity {} B; bypassed",
                        self.capacity
                    );
                    return Applied::plain(Outcome::Oversize);
                }
                self.insert(path, *size, *ts)
            }
            TraceEvent::Read { path, .. }
            | TraceEvent::ReadV {
                path: Some(path), ..
            } => {
                if self.contains(path) {
                    self.touch(path);
                    Applied::plain(Outcome::Hit)
                } else {
                    Applied::plain(Outcome::Miss)
                }
            }
            TraceEvent::ReadV { path: None, .. } => Applied::plain(Outcome::Miss),
            TraceEvent::Open { .. } | TraceEvent::Close { .. } => Applied::plain(Outcome::Neutral),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SimResult {
    pub capacity: u64,
    pub hits: u64,
    pub misses: u64,
    pub total_reads: u64,
    /// Absent when there were no reads.
    pub hit_rate: Option<f64>,
    pub bytes_inserted: u64,
    /// Bytes removed by eviction or replaced by a re-transfer.
    pub bytes_evicted: u64,
    pub eviction_events: u64,
    pub oversize: u64,
    pub final_occupied: u64,
}

impl SimResult {
    pub(crate) fn tally(&mut self, outcome: Outcome) {
        match outcome {
            Outcome::Hit => {
                self.hits += 1;
                self.total_reads += 1;
            }
            Outcome::Miss => {
                self.misses += 1;
                self.total_reads += 1;
            }
            Outcome::Oversize => self.oversize += 1,
            Outcome::Neutral => {}
        }
    }

    pub(crate) fn finish(&mut self, occupied: u64) {
        self.final_occupied = occupied;
        self.hit_rate = (self.total_reads > 0).then(|| self.hits as f64 / self.total_reads as f64);
    }
}

pub fn simulate_lru<'a>(
    events: impl IntoIterator<Item = &'a TraceEvent>,
    capacity: u64,
) -> Result<SimResult, SimError> {
    let mut state = CacheState::new(capacity)?;
    let mut res = SimResult {
        capacity,
        ..SimResult::default()
    };
    for e in events {
        let applied = state.apply_event(e);
        assert!(state.occupied() <= capacity, "capacity invariant violated");
        res.tally(applied.outcome);
        if applied.outcome == Outcome::Neutral {
            if let TraceEvent::Transfer { size, .. } = e {
                res.bytes_inserted += size;
            }
        }
        if let Some(old) = &applied.replaced {
            res.bytes_evicted += old.size;
        }
        res.eviction_events += applied.evicted.len() as u64;
        res.bytes_evicted += applied.evicted.iter().map(|f| f.size).sum::<u64>();
    }
    res.finish(state.occupied());
    Ok(res)
}

/// One independent simulation per capacity, in input order.
pub fn hit_rate_sweep(events: &[TraceEvent], capacities: &[u64]) -> Result<Vec<SimResult>, SimError> {
    if capacities.is_empty() {
        return Err(SimError::NoCapacities);
    }
    capacities
        .par_iter()
        .map(|&c| simulate_lru(events, c))
        .collect()
}
