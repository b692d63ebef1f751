use std::collections::BTreeMap;

use crate::event::{FilePath, TraceEvent};

/// Read-operation tallies. All fields are sums, so partial results over
/// disjoint parts of a stream merge exactly.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReadStats {
    pub per_file_counts: BTreeMap<FilePath, u64>,
    /// Vector reads that never got a path.
    pub unresolved_ops: u64,
    pub total_read_ops: u64,
    /// One sample per `size@offset` pair, vector-read chunks included.
    pub size_samples: u64,
    pub total_bytes_read: u128,
    pub total_offset: u128,
}

impl ReadStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_events<'a>(events: impl IntoIterator<Item = &'a TraceEvent>) -> Self {
        let mut stats = Self::new();
        for e in events {
            stats.observe(e);
        }
        stats
    }

    /// A vector read counts as one operation however many chunks it carries;
    /// each chunk is a separate size/offset sample.
    pub fn observe(&mut self, event: &TraceEvent) {
        match event {
            TraceEvent::Read {
                path, size, offset, ..
            } => {
                self.count_op(Some(path));
                self.sample(*size, *offset);
            }
            TraceEvent::ReadV { path, chunks, .. } => {
                self.count_op(path.as_ref());
                for c in chunks {
                    self.sample(c.size, c.offset);
                }
            }
            _ => {}
        }
    }

    fn count_op(&mut self, path: Option<&FilePath>) {
        self.total_read_ops += 1;
        match path {
            Some(p) => *self.per_file_counts.entry(p.clone()).or_default() += 1,
            None => self.unresolved_ops += 1,
        }
    }

    fn sample(&mut self, size: u64, offset: u64) {
        self.size_samples += 1;
        self.total_bytes_read += size as u128;
        self.total_offset += offset as u128;
    }

    pub fn merge(&mut self, other: &ReadStats) {
        for (path, n) in &other.per_file_counts {
            *self.per_file_counts.entry(path.clone()).or_default() += n;
        }
        self.unresolved_ops += other.unresolved_ops;
        self.total_read_ops += other.total_read_ops;
        self.size_samples += other.size_samples;
        self.total_bytes_read += other.total_bytes_read;
        self.total_offset += other.total_offset;
    }

    pub fn distinct_files(&self) -> usize {
        self.per_file_counts.len()
    }

    /// Mean operations per file with at least one resolved read.
    pub fn mean_reads_per_file(&self) -> Option<f64> {
        if self.per_file_counts.is_empty() {
            return None;
        }
        let resolved = self.total_read_ops - self.unresolved_ops;
        Some(resolved as f64 / self.per_file_counts.len() as f64)
    }

    pub fn mean_read_size(&self) -> Option<f64> {
        (self.size_samples > 0).then(|| self.total_bytes_read as f64 / self.size_samples as f64)
    }

    pub fn mean_offset(&self) -> Option<f64> {
        (self.size_samples > 0).then(|| self.total_offset as f64 / self.size_samples as f64)
    }
}

pub fn count_reads_per_file<'a>(events: impl IntoIterator<Item = &'a TraceEvent>) -> ReadStats {
    ReadStats::from_events(events)
}

/// `(total bytes read, mean read size, mean offset)`; the means are absent
/// when there are no samples.
pub fn read_size_stats<'a>(
    events: impl IntoIterator<Item = &'a TraceEvent>,
) -> (u128, Option<f64>, Option<f64>) {
    let s = ReadStats::from_events(events);
    (s.total_bytes_read, s.mean_read_size(), s.mean_offset())
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TransferStats {
    pub transfers: u64,
    pub total_bytes: u128,
}

impl TransferStats {
    pub fn from_events<'a>(events: impl IntoIterator<Item = &'a TraceEvent>) -> Self {
        let mut s = Self::default();
        for e in events {
            if let TraceEvent::Transfer { size, .. } = e {
                s.transfers += 1;
                s.total_bytes += *size as u128;
            }
        }
        s
    }

    pub fn merge(&mut self, other: &TransferStats) {
        self.transfers += other.transfers;
        self.total_bytes += other.total_bytes;
    }
}

pub fn transfer_totals<'a>(events: impl IntoIterator<Item = &'a TraceEvent>) -> u128 {
    TransferStats::from_events(events).total_bytes
}
