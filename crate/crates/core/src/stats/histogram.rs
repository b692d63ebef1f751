use super::StatsError;

/// Bins are left-closed and right-open except the last, which also holds its
/// right edge. Samples outside `[first edge, last edge]` are not counted.
#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    /// `n` equal-width bins spanning `[lo, hi]`.
    pub fn uniform_edges(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        let width = (hi - lo) / n as f64;
        (0..=n)
            .map(|i| if i == n { hi } else { lo + width * i as f64 })
            .collect()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `(low edge, high edge, count)` per bin.
    pub fn bins(&self) -> impl Iterator<Item = (f64, f64, u64)> + '_ {
        self.bin_edges
            .windows(2)
            .zip(&self.counts)
            .map(|(w, &c)| (w[0], w[1], c))
    }
}

pub fn build_histogram(samples: &[f64], edges: &[f64]) -> Result<Histogram, StatsError> {
    if edges.len() < 2 {
        return Err(StatsError::InvalidBins("need at least two edges".into()));
    }
    if edges.iter().any(|e| !e.is_finite()) || edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(StatsError::InvalidBins(
            "edges must be finite and strictly increasing".into(),
        ));
    }
    let bins = edges.len() - 1;
    let (lo, hi) = (edges[0], edges[bins]);
    let mut counts = vec![0u64; bins];
    for &x in samples {
        if !(lo..=hi).contains(&x) {
            continue;
        }
        // Number of edges <= x, minus one, is the bin index.
        let idx = edges.partition_point(|&e| e <= x) - 1;
        counts[idx.min(bins - 1)] += 1;
    }
    Ok(Histogram {
        bin_edges: edges.to_vec(),
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_binning() {
        let h = build_histogram(&[1.0, 2.0, 3.0], &[0.0, 2.0, 4.0]).unwrap();
        assert_eq!(h.counts, vec![1, 2]);
    }

    #[test]
    fn last_bin_is_right_closed() {
        let h = build_histogram(&[4.0, 4.5, -0.1, 0.0], &[0.0, 2.0, 4.0]).unwrap();
        assert_eq!(h.counts, vec![1, 1]);
    }

    #[test]
    fn empty_samples() {
        let h = build_histogram(&[], &[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(h.counts, vec![0, 0]);
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(build_histogram(&[1.0], &[0.0]).is_err());
        assert!(build_histogram(&[1.0], &[0.0, 0.0]).is_err());
        assert!(build_histogram(&[1.0], &[1.0, 0.0]).is_err());
        assert!(build_histogram(&[1.0], &[0.0, f64::NAN]).is_err());
    }

    #[test]
    fn uniform_edges_end_exactly() {
        let e = Histogram::uniform_edges(0.0, 240.0, 240);
        assert_eq!(e.len(), 241);
        assert_eq!(e[1], 1.0);
        assert_eq!(*e.last().unwrap(), 240.0);
    }
}
