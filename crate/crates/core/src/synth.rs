//! Seeded generator of synthetic XRootD daily logs.
//!
//! Each file of the population gets a size, a read budget and a sequence of
//! lifetimes separated by idle gaps longer than the default lifetime
//! threshold. A lifetime is split into sessions (open .. close) that never
//! cross midnight, reads are scattered uniformly over the sessions, and the
//! first access of a lifetime is preceded by a whole-file transfer line.
//!
//! Identical `(profile, seed, days)` always yield byte-identical logs.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, LogNormal, Pareto};
use serde::{Deserialize, Serialize};

use crate::event::{
    Chunk, FilePath, SessionKey, TimeRange, Timestamp, TraceEvent, SECS_PER_DAY, SECS_PER_HOUR,
};
use crate::parser::{log_file_name, TRANSFER_PHRASE};

/// Default lifetime threshold in days; generated idle gaps must exceed it.
pub const LIFETIME_THRESHOLD_DAYS: f64 = 1.2;

/// Mean file size used by the cache content model.
pub const MEAN_FILE_SIZE: f64 = 200_000_000.0;
pub const MEAN_READ_SIZE: f64 = 154_632.0;
pub const MEAN_READ_OFFSET: f64 = 1.52e9;
pub const MEAN_MONTHLY_READS: f64 = 1562.46;
/// Fitted lifetime-histogram power law `a * x^b + eps` (x in hours).
pub const LIFETIME_POWER_LAW: (f64, f64, f64) = (15227.387, -1.031, -995.488);

#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("invalid day range: {0} > {1}")]
    InvalidRange(NaiveDate, NaiveDate),
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub weight: f64,
    pub dist: Dist,
}

/// Scalar distributions the generator draws from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Dist {
    Constant {
        value: f64,
    },
    Uniform {
        low: f64,
        high: f64,
    },
    Exponential {
        mean: f64,
    },
    /// Log-normal parameterized by its arithmetic mean and log-space sigma.
    LogNormal {
        mean: f64,
        sigma: f64,
    },
    Pareto {
        scale: f64,
        shape: f64,
    },
    /// Density proportional to `a * x^b + eps` on `[min, max]`, with `max`
    /// pulled in to where the density reaches zero.
    PowerLaw {
        a: f64,
        b: f64,
        eps: f64,
        min: f64,
        max: Option<f64>,
    },
    Shifted {
        offset: f64,
        dist: Box<Dist>,
    },
    Mixture {
        components: Vec<Component>,
    },
}

impl Dist {
    pub fn lognormal_with_mode(mode: f64, sigma: f64) -> Dist {
        Dist::LogNormal {
            mean: mode * (1.5 * sigma * sigma).exp(),
            sigma,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(format!("{name} must be finite"))
            }
        };
        match self {
            Dist::Constant { value } => finite("value", *value),
            Dist::Uniform { low, high } => {
                finite("low", *low)?;
                finite("high", *high)?;
                if low > high {
                    return Err("uniform low > high".into());
                }
                Ok(())
            }
            Dist::Exponential { mean } => {
                finite("mean", *mean)?;
                if *mean <= 0.0 {
                    return Err("exponential mean must be > 0".into());
                }
                Ok(())
            }
            Dist::LogNormal { mean, sigma } => {
                finite("mean", *mean)?;
                finite("sigma", *sigma)?;
                if *mean <= 0.0 || *sigma < 0.0 {
                    return Err("log-normal needs mean > 0 and sigma >= 0".into());
                }
                Ok(())
            }
            Dist::Pareto { scale, shape } => {
                finite("scale", *scale)?;
                finite("shape", *shape)?;
                if *scale <= 0.0 || *shape <= 0.0 {
                    return Err("pareto needs scale > 0 and shape > 0".into());
                }
                Ok(())
            }
            Dist::PowerLaw { a, b, eps, min, max } => {
                for (n, v) in [("a", a), ("b", b), ("eps", eps), ("min", min)] {
                    finite(n, *v)?;
                }
                if let Some(m) = max {
                    finite("max", *m)?;
                }
                if *min <= 0.0 {
                    return Err("power law min must be > 0".into());
                }
                let law = PowerLawDensity::new(*a, *b, *eps, *min, *max)?;
                if law.norm <= 0.0 || !law.norm.is_finite() {
                    return Err("power law density does not normalize".into());
                }
                Ok(())
            }
            Dist::Shifted { offset, dist } => {
                finite("offset", *offset)?;
                dist.validate()
            }
            Dist::Mixture { components } => {
                if components.is_empty() {
                    return Err("mixture needs at least one component".into());
                }
                for c in components {
                    if !c.weight.is_finite() || c.weight < 0.0 {
                        return Err("mixture weights must be finite and >= 0".into());
                    }
                    c.dist.validate()?;
                }
                if components.iter().map(|c| c.weight).sum::<f64>() <= 0.0 {
                    return Err("mixture weights sum to zero".into());
                }
                Ok(())
            }
        }
    }

    /// Expected value; infinite for heavy tails without a mean.
    pub fn mean(&self) -> f64 {
        match self {
            Dist::Constant { value } => *value,
            Dist::Uniform { low, high } => 0.5 * (low + high),
            Dist::Exponential { mean } | Dist::LogNormal { mean, .. } => *mean,
            Dist::Pareto { scale, shape } => {
                if *shape <= 1.0 {
                    f64::INFINITY
                } else {
                    shape * scale / (shape - 1.0)
                }
            }
            Dist::PowerLaw { a, b, eps, min, max } => PowerLawDensity::new(*a, *b, *eps, *min, *max)
                .map(|p| p.mean())
                .unwrap_or(f64::NAN),
            Dist::Shifted { offset, dist } => offset + dist.mean(),
            Dist::Mixture { components } => {
                let total: f64 = components.iter().map(|c| c.weight).sum();
                components.iter().map(|c| c.weight * c.dist.mean()).sum::<f64>() / total
            }
        }
    }

    /// Greatest lower bound of the support.
    pub fn support_min(&self) -> f64 {
        match self {
            Dist::Constant { value } => *value,
            Dist::Uniform { low, .. } => *low,
            Dist::Exponential { .. } | Dist::LogNormal { .. } => 0.0,
            Dist::Pareto { scale, .. } => *scale,
            Dist::PowerLaw { min, .. } => *min,
            Dist::Shifted { offset, dist } => offset + dist.support_min(),
            Dist::Mixture { components } => components
                .iter()
                .filter(|c| c.weight > 0.0)
                .map(|c| c.dist.support_min())
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Draws one value. The distribution must have passed [`Dist::validate`].
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Dist::Constant { value } => *value,
            Dist::Uniform { low, high } => {
                if low == high {
                    *low
                } else {
                    rng.random_range(*low..*high)
                }
            }
            Dist::Exponential { mean } => Exp::new(1.0 / mean).expect("validated").sample(rng),
            Dist::LogNormal { mean, sigma } => {
                let mu = mean.ln() - 0.5 * sigma * sigma;
                LogNormal::new(mu, *sigma).expect("validated").sample(rng)
            }
            Dist::Pareto { scale, shape } => {
                Pareto::new(*scale, *shape).expect("validated").sample(rng)
            }
            Dist::PowerLaw { a, b, eps, min, max } => {
                let law = PowerLawDensity::new(*a, *b, *eps, *min, *max).expect("validated");
                law.quantile(rng.random::<f64>())
            }
            Dist::Shifted { offset, dist } => offset + dist.sample(rng),
            Dist::Mixture { components } => {
                let total: f64 = components.iter().map(|c| c.weight).sum();
                let mut u = rng.random::<f64>() * total;
                for c in components {
                    if u < c.weight {
                        return c.dist.sample(rng);
                    }
                    u -= c.weight;
                }
                let last = components.iter().rev().find(|c| c.weight > 0.0).expect("validated");
                last.dist.sample(rng)
            }
        }
    }
}

/// Normalized density proportional to `a x^b + eps` on `[lo, hi]`.
#[derive(Clone, Copy, Debug)]
pub struct PowerLawDensity {
    a: f64,
    b: f64,
    eps: f64,
    lo: f64,
    hi: f64,
    norm: f64,
}

impl PowerLawDensity {
    pub fn new(a: f64, b: f64, eps: f64, lo: f64, max: Option<f64>) -> Result<Self, String> {
        let f = |x: f64| a * x.powf(b) + eps;
        if f(lo) <= 0.0 {
            return Err("power law density is not positive at min".into());
        }
        // Root of a x^b + eps; f is monotone so there is at most one.
        let root = if a != 0.0 && b != 0.0 && -eps / a > 0.0 {
            Some((-eps / a).powf(1.0 / b)).filter(|r| *r > lo)
        } else {
            None
        };
        let hi = match (root, max) {
            (Some(r), Some(m)) => r.min(m),
            (Some(r), None) => r,
            (None, Some(m)) => m,
            (None, None) => return Err("power law needs a max when density never reaches zero".into()),
        };
        if hi <= lo {
            return Err("power law max must exceed min".into());
        }
        let mut law = PowerLawDensity {
            a,
            b,
            eps,
            lo,
            hi,
            norm: 1.0,
        };
        law.norm = law.integral(hi);
        Ok(law)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// Unnormalized integral of the density from `lo` to `x`.
    fn integral(&self, x: f64) -> f64 {
        let (a, b, lo) = (self.a, self.b, self.lo);
        let power = if (b + 1.0).abs() < 1e-12 {
            a * (x / lo).ln()
        } else {
            a / (b + 1.0) * (x.powf(b + 1.0) - lo.powf(b + 1.0))
        };
        power + self.eps * (x - lo)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.lo {
            0.0
        } else if x >= self.hi {
            1.0
        } else {
            self.integral(x) / self.norm
        }
    }

    pub fn quantile(&self, u: f64) -> f64 {
        let (mut lo, mut hi) = (self.lo, self.hi);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn mean(&self) -> f64 {
        let (a, b) = (self.a, self.b);
        let first = |x: f64| {
            let power = if (b + 2.0).abs() < 1e-12 {
                a * x.ln()
            } else {
                a / (b + 2.0) * x.powf(b + 2.0)
            };
            power + 0.5 * self.eps * x * x
        };
        (first(self.hi) - first(self.lo)) / self.norm
    }
}

/// Parameters of the synthetic workload.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WorkloadProfile {
    pub file_population: u64,
    /// Bytes per file.
    pub file_size: Dist,
    /// Read operations per file per 30 days.
    pub read_count: Dist,
    /// Bytes per `size@offset` pair.
    pub read_size: Dist,
    pub read_offset: Dist,
    pub lifetime_hours: Dist,
    /// Idle time between lifetimes of one file, in days.
    pub inter_lifetime_gap_days: Dist,
    pub readv_fraction: f64,
    pub max_readv_chunks: u32,
    /// Upper bound on sessions per file per day of a lifetime.
    pub sessions_per_day: u32,
    /// Probability that a lifetime after the first starts with a transfer.
    pub retransfer_fraction: f64,
    /// Probability of a noise line after each event line.
    pub junk_line_rate: f64,
    pub users: u32,
}

impl Default for WorkloadProfile {
    fn default() -> Self {
        default_profile()
    }
}

/// Profile calibrated to the published read, offset, size and lifetime
/// statistics of the studied cache node, at desk scale (250 files).
pub fn default_profile() -> WorkloadProfile {
    let low = Dist::lognormal_with_mode(25.0, 0.5);
    let high = Dist::lognormal_with_mode(150.0, 0.3);
    let (w_low, w_high, w_tail, tail_shape) = (0.45, 0.40, 0.15, 1.5);
    let tail_mean = (MEAN_MONTHLY_READS - w_low * low.mean() - w_high * high.mean()) / w_tail;
    let read_count = Dist::Mixture {
        components: vec![
            Component { weight: w_low, dist: low },
            Component { weight: w_high, dist: high },
            Component {
                weight: w_tail,
                dist: Dist::Pareto {
                    scale: tail_mean * (tail_shape - 1.0) / tail_shape,
                    shape: tail_shape,
                },
            },
        ],
    };
    let (a, b, eps) = LIFETIME_POWER_LAW;
    // The power-law body covers 3 minutes up to where the fit reaches zero
    // (about 14 h); the long tail carries the multi-day lifetimes.
    let lifetime_hours = Dist::Mixture {
        components: vec![
            Component {
                weight: 0.847,
                dist: Dist::PowerLaw {
                    a,
                    b,
                    eps,
                    min: 0.05,
                    max: None,
                },
            },
            Component {
                weight: 0.153,
                dist: Dist::Shifted {
                    offset: 10.0,
                    dist: Box::new(Dist::Exponential { mean: 134.0 }),
                },
            },
        ],
    };
    WorkloadProfile {
        file_population: 250,
        file_size: Dist::LogNormal {
            mean: MEAN_FILE_SIZE,
            sigma: 0.5,
        },
        read_count,
        read_size: Dist::LogNormal {
            mean: MEAN_READ_SIZE,
            sigma: 1.0,
        },
        read_offset: Dist::LogNormal {
            mean: MEAN_READ_OFFSET,
            sigma: 1.0,
        },
        lifetime_hours,
        inter_lifetime_gap_days: Dist::Shifted {
            offset: 1.25,
            dist: Box::new(Dist::Exponential { mean: 6.75 }),
        },
        readv_fraction: 0.3,
        max_readv_chunks: 4,
        sessions_per_day: 2,
        retransfer_fraction: 1.0,
        junk_line_rate: 0.0,
        users: 50,
    }
}

/// Population of the full-scale month in [`WorkloadProfile::august_2021`].
pub const AUGUST_2021_POPULATION: u64 = 256_000;

impl WorkloadProfile {
    /// Cache-study month: about 60 TB transferred over 31 days, most of it
    /// first fetches, so distinct bytes sit just above 50 TB. `scale`
    /// multiplies the population (0.001 gives a GB-sized cache study).
    pub fn august_2021(scale: f64) -> Self {
        WorkloadProfile {
            retransfer_fraction: 0.1,
            ..default_profile().scaled_to(AUGUST_2021_POPULATION as f64 * scale)
        }
    }

    /// Same distributions with the population multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        self.scaled_to(self.file_population as f64 * factor)
    }

    fn scaled_to(&self, population: f64) -> Self {
        WorkloadProfile {
            file_population: (population.round() as u64).max(1),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::InvalidProfile(m));
        if self.file_population == 0 {
            return bad("file_population must be >= 1".into());
        }
        for (name, d) in [
            ("file_size", &self.file_size),
            ("read_count", &self.read_count),
            ("read_size", &self.read_size),
            ("read_offset", &self.read_offset),
            ("lifetime_hours", &self.lifetime_hours),
            ("inter_lifetime_gap_days", &self.inter_lifetime_gap_days),
        ] {
            if let Err(e) = d.validate() {
                return bad(format!("{name}: {e}"));
            }
            if d.support_min() < 0.0 {
                return bad(format!("{name}: support must be non-negative"));
            }
        }
        for (name, p) in [
            ("readv_fraction", self.readv_fraction),
            ("retransfer_fraction", self.retransfer_fraction),
            ("junk_line_rate", self.junk_line_rate),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} must be in [0, 1]"));
            }
        }
        if self.inter_lifetime_gap_days.support_min() <= LIFETIME_THRESHOLD_DAYS {
            return bad(format!(
                "inter_lifetime_gap_days must stay above {LIFETIME_THRESHOLD_DAYS} days"
            ));
        }
        if self.max_readv_chunks == 0 || self.sessions_per_day == 0 || self.users == 0 {
            return bad("max_readv_chunks, sessions_per_day and users must be >= 1".into());
        }
        Ok(())
    }
}

/// Generated events plus the log text, one entry per calendar day.
#[derive(Clone, Debug)]
pub struct Corpus {
    /// Exactly the events written to the logs, in file/line order.
    pub events: Vec<TraceEvent>,
    pub days: Vec<(NaiveDate, String)>,
}

impl Corpus {
    /// Writes `xrootd-YYYYMMDD.log` files (one per day, possibly empty).
    pub fn write(&self, out_dir: &Path) -> Result<Vec<PathBuf>, SynthError> {
        let io_err = |path: &Path| {
            let path = path.to_path_buf();
            move |source| SynthError::Io { path, source }
        };
        fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
        let mut written = Vec::with_capacity(self.days.len());
        for (date, text) in &self.days {
            let path = out_dir.join(log_file_name(*date));
            let file = fs::File::create(&path).map_err(io_err(&path))?;
            let mut w = BufWriter::new(file);
            w.write_all(text.as_bytes()).map_err(io_err(&path))?;
            w.flush().map_err(io_err(&path))?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Generates the corpus for `first..=last` and writes it under `out_dir`.
pub fn generate(
    profile: &WorkloadProfile,
    seed: u64,
    first: NaiveDate,
    last: NaiveDate,
    out_dir: &Path,
) -> Result<(Vec<TraceEvent>, Vec<PathBuf>), SynthError> {
    let corpus = synthesize(profile, seed, first, last)?;
    let files = corpus.write(out_dir)?;
    Ok((corpus.events, files))
}

struct Session {
    open: Timestamp,
    close: Timestamp,
    key: SessionKey,
    reads: Vec<TraceEvent>,
}

/// Generates the corpus in memory.
pub fn synthesize(
    profile: &WorkloadProfile,
    seed: u64,
    first: NaiveDate,
    last: NaiveDate,
) -> Result<Corpus, SynthError> {
    profile.validate()?;
    let range = TimeRange::days(first, last).ok_or(SynthError::InvalidRange(first, last))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span = range.end.secs_since(range.start);
    let days = (span + 1) as f64 / SECS_PER_DAY as f64;
    let threshold_secs = (LIFETIME_THRESHOLD_DAYS * SECS_PER_DAY as f64) as i64;
    let mut next_tid: u64 = 1;
    let mut events = Vec::new();

    for file_idx in 0..profile.file_population {
        let path = FilePath::new(&format!(
            "/store/mc/run{:03}/file{:07}.root",
            file_idx % 997,
            file_idx
        ));
        let size = (profile.file_size.sample(&mut rng).round() as u64).max(1);
        let reads = (profile.read_count.sample(&mut rng) * days / 30.0).round().max(0.0) as u64;

        let mut lifetimes = Vec::new();
        let mut t = range.start.plus_secs(rng.random_range(0..=span));
        while t <= range.end {
            let len = (profile.lifetime_hours.sample(&mut rng) * SECS_PER_HOUR as f64).round() as i64;
            let end = t.plus_secs(len.max(0)).min(range.end);
            lifetimes.push((t, end));
            let gap = (profile.inter_lifetime_gap_days.sample(&mut rng) * SECS_PER_DAY as f64).ceil() as i64;
            t = end.plus_secs(gap.max(threshold_secs + 1));
        }

        // (lifetime index, session); sessions never cross midnight.
        let mut sessions: Vec<(usize, Session)> = Vec::new();
        for (lt, &(start, end)) in lifetimes.iter().enumerate() {
            let mut seg_start = start;
            loop {
                let midnight = Timestamp::start_of(seg_start.date()).plus_secs(SECS_PER_DAY);
                let seg_end = end.min(midnight.plus_secs(-1));
                let k = rng.random_range(1..=profile.sessions_per_day) as i64;
                let len = seg_end.secs_since(seg_start);
                for j in 0..k {
                    let user = rng.random_range(0..profile.users);
                    let session = Session {
                        open: seg_start.plus_secs(len * j / k),
                        close: seg_start.plus_secs(len * (j + 1) / k),
                        key: SessionKey::new(&next_tid.to_string(), &format!("u{user}")),
                        reads: Vec::new(),
                    };
                    sessions.push((lt, session));
                    next_tid += 1;
                }
                if seg_end >= end {
                    break;
                }
                seg_start = midnight;
            }
        }

        for _ in 0..reads {
            let pick = rng.random_range(0..sessions.len());
            let session = &mut sessions[pick].1;
            let ts = session
                .open
                .plus_secs(rng.random_range(0..=session.close.secs_since(session.open)));
            let chunk = |rng: &mut ChaCha8Rng| {
                Chunk::new(
                    profile.read_size.sample(rng).round().max(0.0) as u64,
                    profile.read_offset.sample(rng).round().max(0.0) as u64,
                )
            };
            let read = if rng.random::<f64>() < profile.readv_fraction {
                let n = rng.random_range(1..=profile.max_readv_chunks);
                TraceEvent::ReadV {
                    ts,
                    session: session.key.clone(),
                    path: Some(path.clone()),
                    chunks: (0..n).map(|_| chunk(&mut rng)).collect(),
                }
            } else {
                let c = chunk(&mut rng);
                TraceEvent::Read {
                    ts,
                    session: session.key.clone(),
                    path: path.clone(),
                    size: c.size,
                    offset: c.offset,
                }
            };
            session.reads.push(read);
        }

        let mut current = usize::MAX;
        for (lt, mut s) in sessions {
            if lt != current {
                current = lt;
                if lt == 0 || rng.random::<f64>() < profile.retransfer_fraction {
                    events.push(TraceEvent::Transfer {
                        ts: lifetimes[lt].0,
                        path: path.clone(),
                        size,
                    });
                }
            }
            s.reads.sort_by_key(TraceEvent::ts);
            events.push(TraceEvent::Open {
                ts: s.open,
                session: s.key.clone(),
                path: path.clone(),
            });
            events.append(&mut s.reads);
            events.push(TraceEvent::Close {
                ts: s.close,
                session: s.key,
                path: path.clone(),
            });
        }
    }

    // Stable: ties keep generation order (file index, then line order).
    events.sort_by_key(TraceEvent::ts);
    let days = render(&events, first, last, profile.junk_line_rate, seed);
    Ok(Corpus { events, days })
}

fn render(
    events: &[TraceEvent],
    first: NaiveDate,
    last: NaiveDate,
    junk_rate: f64,
    seed: u64,
) -> Vec<(NaiveDate, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let mut out: Vec<(NaiveDate, String)> = first
        .iter_days()
        .take_while(|d| *d <= last)
        .map(|d| (d, String::new()))
        .collect();
    let mut day_idx = 0;
    for e in events {
        let date = e.ts().date();
        while out[day_idx].0 < date {
            day_idx += 1;
        }
        let text = &mut out[day_idx].1;
        render_line(e, &mut rng, text);
        if junk_rate > 0.0 && rng.random::<f64>() < junk_rate {
            render_junk(e.ts(), &mut rng, text);
        }
    }
    out
}

/// Appends the canonical log line for `e`.
pub fn render_line<R: Rng + ?Sized>(e: &TraceEvent, rng: &mut R, out: &mut String) {
    use std::fmt::Write as _;
    let pfx = e.ts().log_prefix();
    let sess = |s: &SessionKey| format!("tid={} uid={}", s.thread_id, s.user_id);
    let _ = match e {
        TraceEvent::Open { session, path, .. } => {
            writeln!(out, "{pfx} {} ofs open r {path}", sess(session))
        }
        TraceEvent::Close { session, path, .. } => {
            let score: f64 = rng.random();
            writeln!(out, "{pfx} {} cache prefetch score = {score:.3} {path}", sess(session))
        }
        TraceEvent::Read {
            session,
            path,
            size,
            offset,
            ..
        } => writeln!(out, "{pfx} {} req=read {size}@{offset} fn={path}", sess(session)),
        TraceEvent::ReadV { session, chunks, .. } => {
            let _ = write!(out, "{pfx} {} fh=0 readV", sess(session));
            for c in chunks {
                let _ = write!(out, " {}@{}", c.size, c.offset);
            }
            writeln!(out)
        }
        TraceEvent::Transfer { path, size, .. } => {
            writeln!(out, "{pfx} cache {TRANSFER_PHRASE} {size} {path}")
        }
    };
}

fn render_junk<R: Rng + ?Sized>(ts: Timestamp, rng: &mut R, out: &mut String) {
    use std::fmt::Write as _;
    let pfx = ts.log_prefix();
    let n: u32 = rng.random_range(1000..100_000);
    let _ = match rng.random_range(0..3) {
        0 => writeln!(out, "{pfx} {n} XrootdXeq: u{n}.1:27@worker{n} pub IPv4 login"),
        1 => writeln!(out, "{pfx} {n} XrdPfc_Cache: info heartbeat ok"),
        _ => writeln!(out, "{pfx} {n} ofs_stat: stat /store/mc/tmp{n} rc=0"),
    };
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::EventKind;
    use crate::parser::classify_line;

    fn day(d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2021, 8, d).unwrap()
    }

    #[test]
    fn default_profile_carries_calibration_values() {
        let p = default_profile();
        p.validate().unwrap();
        assert!((p.file_size.mean() - 200_000_000.0).abs() < 1e-6);
        assert!((p.read_size.mean() - 154_632.0).abs() < 1e-9);
        assert!((p.read_offset.mean() - 1.52e9).abs() < 1e-3);
        assert!((p.read_count.mean() - 1562.46).abs() < 1e-9);
        let Dist::Mixture { components } = &p.lifetime_hours else { panic!() };
        let Dist::PowerLaw { a, b, eps, .. } = components[0].dist else { panic!() };
        assert_eq!((a, b, eps), (15227.387, -1.031, -995.488));
        assert!(p.inter_lifetime_gap_days.support_min() > LIFETIME_THRESHOLD_DAYS);
    }

    #[test]
    fn read_count_modes_near_25_and_150() {
        let p = default_profile();
        let Dist::Mixture { components } = &p.read_count else { panic!() };
        for (c, mode) in components.iter().zip([25.0, 150.0]) {
            let Dist::LogNormal { mean, sigma } = c.dist else { panic!() };
            let mu = mean.ln() - 0.5 * sigma * sigma;
            assert!(((mu - sigma * sigma).exp() - mode).abs() < 1e-9);
        }
    }

    #[test]
    fn lifetime_mixture_matches_threshold_fractions() {
        // Share of lifetimes under 1 h, 5 h and 10 h of the mixture.
        let (a, b, eps) = LIFETIME_POWER_LAW;
        let body = PowerLawDensity::new(a, b, eps, 0.05, None).unwrap();
        let w = 0.847;
        let under = |h: f64| w * body.cdf(h);
        assert!((under(1.0) - 0.546).abs() < 0.005);
        assert!((under(5.0) - 0.78).abs() < 0.005);
        assert!((under(10.0) - 0.838).abs() < 0.005);
        let (_, hi) = body.support();
        assert!((hi - 14.092).abs() < 1e-3);
    }

    #[test]
    fn power_law_sampler_matches_cdf() {
        let (a, b, eps) = LIFETIME_POWER_LAW;
        let law = PowerLawDensity::new(a, b, eps, 0.05, None).unwrap();
        for u in [0.01, 0.3, 0.5, 0.9, 0.999] {
            assert!((law.cdf(law.quantile(u)) - u).abs() < 1e-9);
        }
        let d = Dist::PowerLaw { a, b, eps, min: 0.05, max: None };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 200_000;
        let mean = (0..n).map(|_| d.sample(&mut rng)).sum::<f64>() / n as f64;
        assert!((mean - d.mean()).abs() / d.mean() < 0.02, "{mean} vs {}", d.mean());
    }

    #[test]
    fn rejects_gap_at_or_below_threshold() {
        let p = WorkloadProfile {
            inter_lifetime_gap_days: Dist::Constant { value: 1.2 },
            ..default_profile()
        };
        assert!(matches!(p.validate(), Err(SynthError::InvalidProfile(_))));
        let p = WorkloadProfile {
            readv_fraction: 1.5,
            ..default_profile()
        };
        assert!(p.validate().is_err());
        let p = WorkloadProfile {
            file_population: 0,
            ..default_profile()
        };
        assert!(p.validate().is_err());
    }

    fn single_file_profile(reads: f64) -> WorkloadProfile {
        WorkloadProfile {
            file_population: 1,
            read_count: Dist::Constant { value: reads * 30.0 },
            lifetime_hours: Dist::Constant { value: 2.0 },
            inter_lifetime_gap_days: Dist::Constant { value: 5.0 },
            sessions_per_day: 1,
            ..default_profile()
        }
    }

    #[test]
    fn single_lifetime_construction() {
        let c = synthesize(&single_file_profile(3.0), 11, day(1), day(1)).unwrap();
        let count = |k| c.events.iter().filter(|e| e.kind() == k).count();
        assert_eq!(count(EventKind::Transfer), 1);
        assert_eq!(count(EventKind::Open), 1);
        assert_eq!(count(EventKind::Close), 1);
        assert_eq!(count(EventKind::Read) + count(EventKind::ReadV), 3);
        assert_eq!(c.events[0].kind(), EventKind::Transfer);
        assert_eq!(c.events[1].kind(), EventKind::Open);
        assert_eq!(c.events.last().unwrap().kind(), EventKind::Close);
    }

    #[test]
    fn deterministic_per_seed() {
        let p = WorkloadProfile {
            file_population: 20,
            junk_line_rate: 0.1,
            ..default_profile()
        };
        let a = synthesize(&p, 7, day(1), day(2)).unwrap();
        let b = synthesize(&p, 7, day(1), day(2)).unwrap();
        let c = synthesize(&p, 8, day(1), day(2)).unwrap();
        assert_eq!(a.days, b.days);
        assert_eq!(a.events, b.events);
        assert_ne!(a.days, c.days);
        assert_eq!(a.days.len(), 2);
    }

    #[test]
    fn every_line_classifies_as_its_event() {
        let p = WorkloadProfile {
            file_population: 10,
            junk_line_rate: 0.3,
            ..default_profile()
        };
        let c = synthesize(&p, 1, day(1), day(3)).unwrap();
        let lines: Vec<&str> = c.days.iter().flat_map(|(_, t)| t.lines()).collect();
        let classified: Vec<_> = lines.iter().filter_map(|l| classify_line(l)).collect();
        let kinds: Vec<_> = c.events.iter().map(TraceEvent::kind).collect();
        assert_eq!(classified, kinds);
        assert!(lines.len() > kinds.len());
    }

    #[test]
    fn events_valid_sorted_and_sessions_stay_within_a_day() {
        let c = synthesize(&default_profile().scaled(0.1), 5, day(1), day(7)).unwrap();
        assert!(c.events.is_sorted_by_key(TraceEvent::ts));
        let mut opened = std::collections::HashMap::new();
        for e in &c.events {
            e.validate().unwrap();
            match e {
                TraceEvent::Open { ts, session, .. } => {
                    opened.insert(session.clone(), ts.date());
                }
                TraceEvent::ReadV { ts, session, path, .. } => {
                    assert!(path.is_some());
                    assert_eq!(opened.get(session), Some(&ts.date()));
                }
                _ => {}
            }
        }
    }
}
