//! Trace event vocabulary shared by the parser, the generator, the statistics
//! engine and the cache simulator.

use std::fmt;
use std::sync::Arc;

use chrono::{DateTime, Datelike, NaiveDate, Timelike};

pub const SECS_PER_HOUR: i64 = 3_600;
pub const SECS_PER_DAY: i64 = 86_400;

/// Absolute instant in whole seconds since the Unix epoch (UTC).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(i64);

impl Timestamp {
    pub const fn from_secs(secs: i64) -> Self {
        Timestamp(secs)
    }

    pub const fn as_secs(self) -> i64 {
        self.0
    }

    pub fn from_ymd_hms(y: i32, mo: u32, d: u32, h: u32, mi: u32, s: u32) -> Option<Self> {
        let dt = NaiveDate::from_ymd_opt(y, mo, d)?.and_hms_opt(h, mi, s)?;
        Some(Timestamp(dt.and_utc().timestamp()))
    }

    /// Midnight (00:00:00 UTC) of `date`.
    pub fn start_of(date: NaiveDate) -> Self {
        Timestamp(date.and_hms_opt(0, 0, 0).expect("midnight").and_utc().timestamp())
    }

    /// Calendar day (UTC) containing this instant.
    pub fn date(self) -> NaiveDate {
        self.to_datetime().date_naive()
    }

    fn to_datetime(self) -> DateTime<chrono::Utc> {
        DateTime::from_timestamp(self.0, 0).expect("timestamp in chrono range")
    }

    /// Seconds elapsed from `earlier` to `self`; negative if `earlier` is later.
    pub fn secs_since(self, earlier: Timestamp) -> i64 {
        self.0 - earlier.0
    }

    pub fn plus_secs(self, secs: i64) -> Self {
        Timestamp(self.0 + secs)
    }

    /// `YYMMDD HH:MM:SS`, the prefix used by XRootD server logs.
    pub fn log_prefix(self) -> String {
        let dt = self.to_datetime();
        format!(
            "{:02}{:02}{:02} {:02}:{:02}:{:02}",
            dt.year() % 100,
            dt.month(),
            dt.day(),
            dt.hour(),
            dt.minute(),
            dt.second()
        )
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_datetime().format("%Y-%m-%d %H:%M:%S"))
    }
}

/// Closed interval of instants.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TimeRange {
    pub start: Timestamp,
    pub end: Timestamp,
}

impl TimeRange {
    /// `None` unless `start <= end`.
    pub fn new(start: Timestamp, end: Timestamp) -> Option<Self> {
        (start <= end).then_some(TimeRange { start, end })
    }

    pub fn unbounded() -> Self {
        TimeRange {
            start: Timestamp(i64::MIN),
            end: Timestamp(i64::MAX),
        }
    }

    /// Every second of the calendar days `first..=last`.
    pub fn days(first: NaiveDate, last: NaiveDate) -> Option<Self> {
        let next = last.succ_opt()?;
        TimeRange::new(Timestamp::start_of(first), Timestamp::start_of(next).plus_secs(-1))
    }

    pub fn contains(&self, ts: Timestamp) -> bool {
        self.start <= ts && ts <= self.end
    }
}

/// Thread ID and user ID pair that ties a vector read to its file open.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SessionKey {
    pub thread_id: Arc<str>,
    pub user_id: Arc<str>,
}

impl SessionKey {
    pub fn new(thread_id: &str, user_id: &str) -> Self {
        SessionKey {
            thread_id: thread_id.into(),
            user_id: user_id.into(),
        }
    }
}

/// Relative file path used as the cache key. Compared byte-wise.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FilePath(Arc<str>);

impl FilePath {
    pub fn new(path: &str) -> Self {
        FilePath(path.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for FilePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for FilePath {
    fn from(s: &str) -> Self {
        FilePath::new(s)
    }
}

/// One `size@offset` byte range.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Chunk {
    pub size: u64,
    pub offset: u64,
}

impl Chunk {
    pub const fn new(size: u64, offset: u64) -> Self {
        Chunk { size, offset }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EventKind {
    Open,
    Close,
    Read,
    ReadV,
    Transfer,
}

impl EventKind {
    pub const ALL: [EventKind; 5] = [
        EventKind::Open,
        EventKind::Close,
        EventKind::Read,
        EventKind::ReadV,
        EventKind::Transfer,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EventKind::Open => "open",
            EventKind::Close => "close",
            EventKind::Read => "read",
            EventKind::ReadV => "readv",
            EventKind::Transfer => "transfer",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceEvent {
    Open {
        ts: Timestamp,
        session: SessionKey,
        path: FilePath,
    },
    Close {
        ts: Timestamp,
        session: SessionKey,
        path: FilePath,
    },
    Read {
        ts: Timestamp,
        session: SessionKey,
        path: FilePath,
        size: u64,
        offset: u64,
    },
    /// Vector read. `path` is `None` until matched to an open of the same session.
    ReadV {
        ts: Timestamp,
        session: SessionKey,
        path: Option<FilePath>,
        chunks: Vec<Chunk>,
    },
    /// Whole-file fetch into the cache.
    Transfer {
        ts: Timestamp,
        path: FilePath,
        size: u64,
    },
}

impl TraceEvent {
    pub fn ts(&self) -> Timestamp {
        match self {
            TraceEvent::Open { ts, .. }
            | TraceEvent::Close { ts, .. }
            | TraceEvent::Read { ts, .. }
            | TraceEvent::ReadV { ts, .. }
            | TraceEvent::Transfer { ts, .. } => *ts,
        }
    }

    pub fn kind(&self) -> EventKind {
        match self {
            TraceEvent::Open { .. } => EventKind::Open,
            TraceEvent::Close { .. } => EventKind::Close,
            TraceEvent::Read { .. } => EventKind::Read,
            TraceEvent::ReadV { .. } => EventKind::ReadV,
            TraceEvent::Transfer { .. } => EventKind::Transfer,
        }
    }

    /// File the event refers to, if known.
    pub fn path(&self) -> Option<&FilePath> {
        match self {
            TraceEvent::Open { path, .. }
            | TraceEvent::Close { path, .. }
            | TraceEvent::Read { path, .. }
            | TraceEvent::Transfer { path, .. } => Some(path),
            TraceEvent::ReadV { path, .. } => path.as_ref(),
        }
    }

    pub fn session(&self) -> Option<&SessionKey> {
        match self {
            TraceEvent::Open { session, .. }
            | TraceEvent::Close { session, .. }
            | TraceEvent::Read { session, .. }
            | TraceEvent::ReadV { session, .. } => Some(session),
            TraceEvent::Transfer { .. } => None,
        }
    }

    /// True for the two kinds that count as file read operations.
    pub fn is_read_op(&self) -> bool {
        matches!(self, TraceEvent::Read { .. } | TraceEvent::ReadV { .. })
    }

    /// Checks every structural invariant of the event.
    pub fn validate(&self) -> Result<(), Violation> {
        if let Some(session) = self.session() {
            if session.thread_id.is_empty() || session.user_id.is_empty() {
                return Err(Violation::EmptySessionComponent);
            }
        }
        if let Some(path) = self.path() {
            if path.as_str().is_empty() {
                return Err(Violation::EmptyPath);
            }
            if path.as_str().contains(['\n', '\r']) {
                return Err(Violation::PathNewline);
            }
        }
        match self {
            TraceEvent::ReadV { chunks, .. } if chunks.is_empty() => Err(Violation::EmptyChunks),
            TraceEvent::Transfer { size: 0, .. } => Err(Violation::ZeroByteTransfer),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum Violation {
    #[error("zero-byte transfer")]
    ZeroByteTransfer,
    #[error("empty chunk sequence")]
    EmptyChunks,
    #[error("empty path")]
    EmptyPath,
    #[error("path contains a newline")]
    PathNewline,
    #[error("empty session component")]
    EmptySessionComponent,
}
