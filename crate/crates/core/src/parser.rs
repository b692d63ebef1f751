//! Keyphrase-anchored parser for XRootD server logs.
//!
//! Lines are classified by the operation keyphrases the server writes
//! (`req=read`, `fh=0 readV`, `open r`/`open rat`, `prefetch score` and the
//! misspelled `successfuly read size from info file =`). Field extraction is
//! position tolerant: the parser looks for `size@offset` tokens after the
//! anchor, a leading timestamp, `tid=`/`uid=` session tokens and the first
//! token starting with `/` (or an `fn=` token) as the file path.

use std::collections::{BinaryHeap, HashMap};
use std::cmp::Reverse;
use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use flate2::read::MultiGzDecoder;
use rayon::prelude::*;

use crate::event::{Chunk, EventKind, FilePath, SessionKey, TimeRange, Timestamp, TraceEvent};

pub const READ_PHRASE: &str = "req=read";
pub const READV_PHRASE: &str = "fh=0 readV";
pub const CLOSE_PHRASE: &str = "prefetch score";
/// Spelling matches what the servers actually write.
pub const TRANSFER_PHRASE: &str = "successfuly read size from info file =";

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("malformed {} line: {reason}", kind.name())]
pub struct MalformedLine {
    pub kind: EventKind,
    pub reason: &'static str,
}

impl MalformedLine {
    fn new(kind: EventKind, reason: &'static str) -> Self {
        MalformedLine { kind, reason }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

/// Per-kind line counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct KindCounts {
    pub open: u64,
    pub close: u64,
    pub read: u64,
    pub readv: u64,
    pub transfer: u64,
}

impl KindCounts {
    pub fn get(&self, kind: EventKind) -> u64 {
        match kind {
            EventKind::Open => self.open,
            EventKind::Close => self.close,
            EventKind::Read => self.read,
            EventKind::ReadV => self.readv,
            EventKind::Transfer => self.transfer,
        }
    }

    pub fn bump(&mut self, kind: EventKind) {
        let slot = match kind {
            EventKind::Open => &mut self.open,
            EventKind::Close => &mut self.close,
            EventKind::Read => &mut self.read,
            EventKind::ReadV => &mut self.readv,
            EventKind::Transfer => &mut self.transfer,
        };
        *slot += 1;
    }

    pub fn total(&self) -> u64 {
        self.open + self.close + self.read + self.readv + self.transfer
    }

    pub fn add(&mut self, other: &KindCounts) {
        self.open += other.open;
        self.close += other.close;
        self.read += other.read;
        self.readv += other.readv;
        self.transfer += other.transfer;
    }
}

/// What a parse run saw. For every kind,
/// `lines_matched = emitted + malformed + out_of_range`.
#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct ParseReport {
    pub files: u64,
    pub files_skipped: u64,
    pub lines_total: u64,
    pub lines_matched: KindCounts,
    pub malformed: KindCounts,
    pub out_of_range: KindCounts,
    pub readv_unresolved: u64,
    /// Extra `size@offset` pairs on single-read lines (first pair is used).
    pub field_warnings: u64,
    pub byte_volume_scanned: u64,
}

impl ParseReport {
    pub fn malformed_total(&self) -> u64 {
        self.malformed.total()
    }

    pub fn merge(&mut self, other: &ParseReport) {
        self.files += other.files;
        self.files_skipped += other.files_skipped;
        self.lines_total += other.lines_total;
        self.lines_matched.add(&other.lines_matched);
        self.malformed.add(&other.malformed);
        self.out_of_range.add(&other.out_of_range);
        self.readv_unresolved += other.readv_unresolved;
        self.field_warnings += other.field_warnings;
        self.byte_volume_scanned += other.byte_volume_scanned;
    }
}

/// Classifies a line by keyphrase. When several keyphrases occur the most
/// specific wins: Transfer, ReadV, Read, Close, Open.
pub fn classify_line(line: &str) -> Option<EventKind> {
    if line.contains(TRANSFER_PHRASE) {
        Some(EventKind::Transfer)
    } else if line.contains(READV_PHRASE) {
        Some(EventKind::ReadV)
    } else if line.contains(READ_PHRASE) {
        Some(EventKind::Read)
    } else if line.contains(CLOSE_PHRASE) {
        Some(EventKind::Close)
    } else if has_open_phrase(line) {
        Some(EventKind::Open)
    } else {
        None
    }
}

/// `open r` / `open rat` as whole tokens followed by at least one more token.
fn has_open_phrase(line: &str) -> bool {
    if !line.contains("open r") {
        return false;
    }
    let mut tokens = line.split_ascii_whitespace();
    while let Some(tok) = tokens.next() {
        if tok == "open" {
            let mut ahead = tokens.clone();
            if matches!(ahead.next(), Some("r" | "rat")) && ahead.next().is_some() {
                return true;
            }
        }
    }
    false
}

/// Outcome of feeding one line to the parser.
#[derive(Debug, PartialEq)]
pub enum LineOutcome {
    NotAnEvent,
    Event {
        event: TraceEvent,
        /// Ignored extra `size@offset` pairs on a single-read line.
        extra_pairs: usize,
    },
    Malformed(MalformedLine),
}

pub fn parse_line(line: &str) -> LineOutcome {
    let parsed = match classify_line(line) {
        None => return LineOutcome::NotAnEvent,
        Some(EventKind::Read) => parse_read_counting(line),
        Some(EventKind::ReadV) => parse_readv(line).map(|e| (e, 0)),
        Some(EventKind::Open) => parse_open(line).map(|e| (e, 0)),
        Some(EventKind::Close) => parse_close(line).map(|e| (e, 0)),
        Some(EventKind::Transfer) => parse_transfer(line).map(|e| (e, 0)),
    };
    match parsed {
        Ok((event, extra_pairs)) => LineOutcome::Event { event, extra_pairs },
        Err(m) => LineOutcome::Malformed(m),
    }
}

pub fn parse_read(line: &str) -> Result<TraceEvent, MalformedLine> {
    parse_read_counting(line).map(|(e, _)| e)
}

fn parse_read_counting(line: &str) -> Result<(TraceEvent, usize), MalformedLine> {
    const K: EventKind = EventKind::Read;
    let ts = timestamp(line).ok_or(MalformedLine::new(K, "missing timestamp"))?;
    let session = session(line).ok_or(MalformedLine::new(K, "missing tid/uid"))?;
    let mut pairs = pairs_after(line, READ_PHRASE);
    let first = pairs.next().ok_or(MalformedLine::new(K, "missing size@offset"))?;
    let path = path(line).ok_or(MalformedLine::new(K, "missing path"))?;
    let event = TraceEvent::Read {
        ts,
        session,
        path,
        size: first.size,
        offset: first.offset,
    };
    Ok((event, pairs.count()))
}

pub fn parse_readv(line: &str) -> Result<TraceEvent, MalformedLine> {
    const K: EventKind = EventKind::ReadV;
    let ts = timestamp(line).ok_or(MalformedLine::new(K, "missing timestamp"))?;
    let session = session(line).ok_or(MalformedLine::new(K, "missing tid/uid"))?;
    let chunks: Vec<Chunk> = pairs_after(line, READV_PHRASE).collect();
    if chunks.is_empty() {
        return Err(MalformedLine::new(K, "missing size@offset"));
    }
    Ok(TraceEvent::ReadV {
        ts,
        session,
        path: None,
        chunks,
    })
}

pub fn parse_open(line: &str) -> Result<TraceEvent, MalformedLine> {
    let (ts, session, path) = session_line(line, EventKind::Open)?;
    Ok(TraceEvent::Open { ts, session, path })
}

pub fn parse_close(line: &str) -> Result<TraceEvent, MalformedLine> {
    let (ts, session, path) = session_line(line, EventKind::Close)?;
    Ok(TraceEvent::Close { ts, session, path })
}

fn session_line(
    line: &str,
    kind: EventKind,
) -> Result<(Timestamp, SessionKey, FilePath), MalformedLine> {
    let ts = timestamp(line).ok_or(MalformedLine::new(kind, "missing timestamp"))?;
    let session = session(line).ok_or(MalformedLine::new(kind, "missing tid/uid"))?;
    let path = path(line).ok_or(MalformedLine::new(kind, "missing path"))?;
    Ok((ts, session, path))
}

pub fn parse_transfer(line: &str) -> Result<TraceEvent, MalformedLine> {
    const K: EventKind = EventKind::Transfer;
    let ts = timestamp(line).ok_or(MalformedLine::new(K, "missing timestamp"))?;
    let rest = after(line, TRANSFER_PHRASE).unwrap_or("");
    let size: u64 = rest
        .split_ascii_whitespace()
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or(MalformedLine::new(K, "missing transfer size"))?;
    if size == 0 {
        return Err(MalformedLine::new(K, "zero-byte transfer"));
    }
    let path = path(line).ok_or(MalformedLine::new(K, "missing path"))?;
    Ok(TraceEvent::Transfer { ts, path, size })
}

fn after<'a>(line: &'a str, anchor: &str) -> Option<&'a str> {
    line.find(anchor).map(|i| &line[i + anchor.len()..])
}

fn pairs_after<'a>(line: &'a str, anchor: &str) -> impl Iterator<Item = Chunk> + 'a {
    after(line, anchor)
        .unwrap_or("")
        .split_ascii_whitespace()
        .filter_map(size_at_offset)
}

fn size_at_offset(token: &str) -> Option<Chunk> {
    let (size, offset) = token.split_once('@')?;
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    if !digits(size) || !digits(offset) {
        return None;
    }
    Some(Chunk::new(size.parse().ok()?, offset.parse().ok()?))
}

fn session(line: &str) -> Option<SessionKey> {
    let mut tid = None;
    let mut uid = None;
    for tok in line.split_ascii_whitespace() {
        if let Some(t) = tok.strip_prefix("tid=") {
            tid.get_or_insert(t);
        } else if let Some(u) = tok.strip_prefix("uid=") {
            uid.get_or_insert(u);
        }
    }
    match (tid, uid) {
        (Some(t), Some(u)) if !t.is_empty() && !u.is_empty() => Some(SessionKey::new(t, u)),
        _ => None,
    }
}

fn path(line: &str) -> Option<FilePath> {
    let mut first_slash = None;
    for tok in line.split_ascii_whitespace() {
        if let Some(p) = tok.strip_prefix("fn=") {
            if !p.is_empty() {
                return Some(FilePath::new(p));
            }
        } else if first_slash.is_none() && tok.starts_with('/') {
            first_slash = Some(tok);
        }
    }
    first_slash.map(FilePath::new)
}

/// Leading timestamp: `YYMMDD HH:MM:SS`, or `YYYY-MM-DD HH:MM:SS` /
/// `YYYY-MM-DDTHH:MM:SS`, optionally wrapped in brackets.
pub fn timestamp(line: &str) -> Option<Timestamp> {
    let line = line.trim_start().trim_start_matches('[');
    let mut tokens = line.split_ascii_whitespace();
    let first = tokens.next()?.trim_end_matches(']');
    if let Some((date, time)) = first.split_once('T') {
        let (y, mo, d) = iso_date(date)?;
        let (h, mi, s) = clock(time)?;
        return Timestamp::from_ymd_hms(y, mo, d, h, mi, s);
    }
    let (y, mo, d) = if first.len() == 6 && first.bytes().all(|b| b.is_ascii_digit()) {
        let n = |r: std::ops::Range<usize>| first[r].parse::<u32>().ok();
        (2000 + n(0..2)? as i32, n(2..4)?, n(4..6)?)
    } else {
        iso_date(first)?
    };
    let (h, mi, s) = clock(tokens.next()?.trim_end_matches(']'))?;
    Timestamp::from_ymd_hms(y, mo, d, h, mi, s)
}

fn iso_date(s: &str) -> Option<(i32, u32, u32)> {
    let mut it = s.splitn(3, '-');
    let y = it.next()?;
    if y.len() != 4 {
        return None;
    }
    Some((y.parse().ok()?, it.next()?.parse().ok()?, it.next()?.parse().ok()?))
}

fn clock(s: &str) -> Option<(u32, u32, u32)> {
    // Fractional seconds are dropped.
    let s = s.split('.').next()?;
    let mut it = s.splitn(3, ':');
    let h = it.next()?;
    let m = it.next()?;
    let sec = it.next()?;
    if h.len() != 2 || m.len() != 2 || sec.len() != 2 {
        return None;
    }
    Some((h.parse().ok()?, m.parse().ok()?, sec.parse().ok()?))
}

/// Most recent open per session, used to attach paths to vector reads.
#[derive(Debug, Default)]
pub struct SessionTable {
    open: HashMap<SessionKey, FilePath>,
}

impl SessionTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records opens and resolves vector reads in place. Returns `false` only
    /// for a vector read that stays unresolved.
    pub fn observe(&mut self, event: &mut TraceEvent) -> bool {
        match event {
            TraceEvent::Open { session, path, .. } => {
                self.open.insert(session.clone(), path.clone());
                true
            }
            TraceEvent::ReadV { session, path, .. } if path.is_none() => {
                *path = self.open.get(session).cloned();
                path.is_some()
            }
            _ => true,
        }
    }

    pub fn len(&self) -> usize {
        self.open.len()
    }

    pub fn is_empty(&self) -> bool {
        self.open.is_empty()
    }
}

/// Attaches to each vector read the path of the latest preceding open with the
/// same session key. Returns the number left unresolved.
pub fn resolve_readv(events: &mut [TraceEvent]) -> usize {
    let mut table = SessionTable::new();
    events.iter_mut().map(|e| table.observe(e)).filter(|ok| !ok).count()
}

/// Streams the events of one log, line by line.
///
/// Vector reads are resolved in line order against this file's opens only.
/// Events outside `range` are dropped after resolution, so an open before the
/// range still names a vector read inside it.
pub struct FileEvents<R> {
    reader: R,
    buf: Vec<u8>,
    range: TimeRange,
    sessions: SessionTable,
    report: ParseReport,
    error: Option<io::Error>,
}

impl<R: BufRead> FileEvents<R> {
    pub fn new(reader: R, range: TimeRange) -> Self {
        FileEvents {
            reader,
            buf: Vec::with_capacity(256),
            range,
            sessions: SessionTable::new(),
            report: ParseReport {
                files: 1,
                ..Default::default()
            },
            error: None,
        }
    }

    pub fn report(&self) -> &ParseReport {
        &self.report
    }

    /// Consumes the iterator, returning the report or the read error that
    /// stopped it.
    pub fn finish(self) -> io::Result<ParseReport> {
        match self.error {
            Some(e) => Err(e),
            None => Ok(self.report),
        }
    }
}

impl<R: BufRead> Iterator for FileEvents<R> {
    type Item = TraceEvent;

    fn next(&mut self) -> Option<TraceEvent> {
        if self.error.is_some() {
            return None;
        }
        loop {
            self.buf.clear();
            match self.reader.read_until(b'\n', &mut self.buf) {
                Ok(0) => return None,
                Ok(n) => self.report.byte_volume_scanned += n as u64,
                Err(e) => {
                    self.error = Some(e);
                    return None;
                }
            }
            self.report.lines_total += 1;
            let text = String::from_utf8_lossy(&self.buf);
            let line = text.trim_end_matches(['\n', '\r']);
            match parse_line(line) {
                LineOutcome::NotAnEvent => {}
                LineOutcome::Malformed(m) => {
                    log::debug!("{m}: {line}");
                    self.report.lines_matched.bump(m.kind);
                    self.report.malformed.bump(m.kind);
                }
                LineOutcome::Event {
                    mut event,
                    extra_pairs,
                } => {
                    let kind = event.kind();
                    self.report.lines_matched.bump(kind);
                    self.report.field_warnings += extra_pairs as u64;
                    let resolved = self.sessions.observe(&mut event);
                    if !self.range.contains(event.ts()) {
                        self.report.out_of_range.bump(kind);
                        continue;
                    }
                    if !resolved {
                        self.report.readv_unresolved += 1;
                    }
                    debug_assert!(event.validate().is_ok());
                    return Some(event);
                }
            }
        }
    }
}

/// Opens a log, transparently decompressing `.gz` files.
pub fn open_log(path: &Path) -> io::Result<Box<dyn BufRead + Send>> {
    let file = File::open(path)?;
    if path.extension().is_some_and(|e| e == "gz") {
        Ok(Box::new(BufReader::new(MultiGzDecoder::new(file))))
    } else {
        Ok(Box::new(BufReader::with_capacity(1 << 16, file)))
    }
}

/// Parses one log file into a time-ordered event list.
pub fn parse_file(path: &Path, range: TimeRange) -> io::Result<(Vec<TraceEvent>, ParseReport)> {
    let mut events_iter = FileEvents::new(open_log(path)?, range);
    let mut events: Vec<TraceEvent> = events_iter.by_ref().collect();
    let report = events_iter.finish()?;
    if !events.is_sorted_by_key(TraceEvent::ts) {
        log::warn!("{}: lines out of time order, sorting", path.display());
        events.sort_by_key(TraceEvent::ts);
    }
    Ok((events, report))
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// Skip unreadable files instead of failing the run.
    pub tolerant: bool,
}

/// Parses a set of logs into one globally time-ordered stream.
///
/// Files are parsed concurrently; the merge is stable, breaking timestamp
/// ties by file order and then by line order.
pub fn parse_logs(
    files: &[PathBuf],
    range: TimeRange,
    options: ParseOptions,
) -> Result<(Vec<TraceEvent>, ParseReport), ParseError> {
    let parsed: Vec<_> = files
        .par_iter()
        .map(|path| parse_file(path, range).map_err(|source| (path.clone(), source)))
        .collect();

    let mut report = ParseReport::default();
    let mut streams = Vec::with_capacity(parsed.len());
    for result in parsed {
        match result {
            Ok((events, file_report)) => {
                report.merge(&file_report);
                streams.push(events);
            }
            Err((path, source)) if options.tolerant => {
                log::warn!("skipping {}: {source}", path.display());
                report.files_skipped += 1;
            }
            Err((path, source)) => return Err(ParseError::Io { path, source }),
        }
    }
    Ok((merge_streams(streams), report))
}

/// Stable k-way merge of individually sorted streams.
pub fn merge_streams(streams: Vec<Vec<TraceEvent>>) -> Vec<TraceEvent> {
    let total = streams.iter().map(Vec::len).sum();
    let mut iters: Vec<_> = streams.into_iter().map(|s| s.into_iter().peekable()).collect();
    let mut heap = BinaryHeap::with_capacity(iters.len());
    for (i, it) in iters.iter_mut().enumerate() {
        if let Some(e) = it.peek() {
            heap.push(Reverse((e.ts(), i)));
        }
    }
    let mut out = Vec::with_capacity(total);
    while let Some(Reverse((_, i))) = heap.pop() {
        let it = &mut iters[i];
        out.push(it.next().expect("peeked"));
        if let Some(e) = it.peek() {
            heap.push(Reverse((e.ts(), i)));
        }
    }
    out
}

/// Date encoded in an `xrootd-YYYYMMDD.log[.gz]` file name.
pub fn log_file_date(path: &Path) -> Option<NaiveDate> {
    let name = path.file_name()?.to_str()?;
    let stem = name.strip_suffix(".gz").unwrap_or(name);
    let digits = stem.strip_prefix("xrootd-")?.strip_suffix(".log")?;
    if digits.len() != 8 {
        return None;
    }
    NaiveDate::parse_from_str(digits, "%Y%m%d").ok()
}

pub fn log_file_name(date: NaiveDate) -> String {
    format!("xrootd-{}.log", date.format("%Y%m%d"))
}

/// Daily logs in `dir`, ordered by date, optionally restricted to
/// `first..=last`. Other files are ignored.
pub fn discover_logs(dir: &Path, days: Option<(NaiveDate, NaiveDate)>) -> io::Result<Vec<PathBuf>> {
    let mut found = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        let Some(date) = log_file_date(&path) else {
            continue;
        };
        if days.is_some_and(|(first, last)| date < first || date > last) {
            continue;
        }
        found.push((date, path));
    }
    found.sort();
    Ok(found.into_iter().map(|(_, p)| p).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const PFX: &str = "210801 12:00:00 tid=t1 uid=u1";

    fn ts(h: u32, m: u32, s: u32) -> Timestamp {
        Timestamp::from_ymd_hms(2021, 8, 1, h, m, s).unwrap()
    }

    #[test]
    fn classifies_by_keyphrase() {
        assert_eq!(
            classify_line("x req=read 4096@0 fn=/store/a"),
            Some(EventKind::Read)
        );
        assert_eq!(
            classify_line("x successfuly read size from info file = 1000"),
            Some(EventKind::Transfer)
        );
        assert_eq!(classify_line("heartbeat ok"), None);
        assert_eq!(classify_line("a fh=0 readV 1@2"), Some(EventKind::ReadV));
        assert_eq!(classify_line("cache prefetch score = 0.5 /a"), Some(EventKind::Close));
        assert_eq!(classify_line("ofs open rat /store/z"), Some(EventKind::Open));
        assert_eq!(classify_line("ofs open r /store/z"), Some(EventKind::Open));
    }

    #[test]
    fn open_phrase_needs_whole_tokens_and_a_follower() {
        assert_eq!(classify_line("ofs open rw /store/z"), None);
        assert_eq!(classify_line("reopen r /store/z"), None);
        assert_eq!(classify_line("ofs open r"), None);
    }

    #[test]
    fn precedence_prefers_most_specific_phrase() {
        let line = format!("{PFX} open r /a req=read 1@2 fh=0 readV 3@4");
        assert_eq!(classify_line(&line), Some(EventKind::ReadV));
        let line = format!("{PFX} prefetch score req=read 1@2 fn=/a");
        assert_eq!(classify_line(&line), Some(EventKind::Read));
        let line = format!("{PFX} fh=0 readV {TRANSFER_PHRASE} 5 /a");
        assert_eq!(classify_line(&line), Some(EventKind::Transfer));
    }

    #[test]
    fn parses_read() {
        let e = parse_read(&format!("{PFX} req=read 12345@67890 fn=/store/x")).unwrap();
        assert_eq!(
            e,
            TraceEvent::Read {
                ts: ts(12, 0, 0),
                session: SessionKey::new("t1", "u1"),
                path: "/store/x".into(),
                size: 12345,
                offset: 67890,
            }
        );
        let e = parse_read(&format!("{PFX} req=read 0@0 fn=/store/x")).unwrap();
        assert!(matches!(e, TraceEvent::Read { size: 0, offset: 0, .. }));
        let err = parse_read(&format!("{PFX} req=read fn=/store/x")).unwrap_err();
        assert_eq!(err.kind, EventKind::Read);
    }

    #[test]
    fn extra_read_pairs_are_warnings() {
        let out = parse_line(&format!("{PFX} req=read 1@2 3@4 fn=/x"));
        match out {
            LineOutcome::Event { event, extra_pairs } => {
                assert_eq!(extra_pairs, 1);
                assert!(matches!(event, TraceEvent::Read { size: 1, offset: 2, .. }));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parses_readv_chunks() {
        let e = parse_readv(&format!("{PFX} fh=0 readV 100@0 200@4096")).unwrap();
        let TraceEvent::ReadV { chunks, path, .. } = e else { panic!() };
        assert_eq!(chunks, vec![Chunk::new(100, 0), Chunk::new(200, 4096)]);
        assert_eq!(path, None);
        let e = parse_readv(&format!("{PFX} fh=0 readV 100@0")).unwrap();
        let TraceEvent::ReadV { chunks, .. } = e else { panic!() };
        assert_eq!(chunks, vec![Chunk::new(100, 0)]);
        assert!(parse_readv(&format!("{PFX} fh=0 readV")).is_err());
    }

    #[test]
    fn parses_open_and_close() {
        let e = parse_open(&format!("{PFX} ofs open r /store/y")).unwrap();
        assert_eq!(e.kind(), EventKind::Open);
        assert_eq!(e.ts(), ts(12, 0, 0));
        assert_eq!(e.path().unwrap().as_str(), "/store/y");
        let e = parse_open(&format!("{PFX} ofs open rat /store/z")).unwrap();
        assert_eq!(e.path().unwrap().as_str(), "/store/z");
        let e = parse_close(&format!("{PFX} cache prefetch score = 0.25 /store/y")).unwrap();
        assert_eq!(e.kind(), EventKind::Close);
        assert_eq!(e.path().unwrap().as_str(), "/store/y");
        assert!(parse_open("tid=a uid=b ofs open r /store/y").is_err());
        assert!(parse_open(&format!("{PFX} ofs open r nopath")).is_err());
    }

    #[test]
    fn parses_transfer() {
        let line = |n: &str| format!("210801 12:00:00 cache {TRANSFER_PHRASE} {n} /store/w");
        let e = parse_transfer(&line("200000000")).unwrap();
        assert!(matches!(e, TraceEvent::Transfer { size: 200_000_000, .. }));
        assert_eq!(parse_transfer(&line("0")).unwrap_err().reason, "zero-byte transfer");
        assert!(matches!(
            parse_transfer(&line("1")).unwrap(),
            TraceEvent::Transfer { size: 1, .. }
        ));
        assert!(parse_transfer(&format!("210801 12:00:00 {TRANSFER_PHRASE} 5")).is_err());
    }

    #[test]
    fn timestamp_formats() {
        let want = ts(12, 34, 56);
        assert_eq!(timestamp("210801 12:34:56 x"), Some(want));
        assert_eq!(timestamp("[2021-08-01 12:34:56] x"), Some(want));
        assert_eq!(timestamp("2021-08-01T12:34:56.123 x"), Some(want));
        assert_eq!(timestamp("hello 12:34:56"), None);
        assert_eq!(timestamp("211301 12:34:56"), None);
    }

    fn open(t: &str, p: &str, s: i64) -> TraceEvent {
        TraceEvent::Open {
            ts: Timestamp::from_secs(s),
            session: SessionKey::new(t, "u"),
            path: p.into(),
        }
    }

    fn readv(t: &str, s: i64) -> TraceEvent {
        TraceEvent::ReadV {
            ts: Timestamp::from_secs(s),
            session: SessionKey::new(t, "u"),
            path: None,
            chunks: vec![Chunk::new(1, 0)],
        }
    }

    #[test]
    fn resolve_uses_most_recent_open() {
        let mut ev = vec![open("t1", "/A", 0), readv("t1", 1)];
        assert_eq!(resolve_readv(&mut ev), 0);
        assert_eq!(ev[1].path().unwrap().as_str(), "/A");

        let mut ev = vec![open("t1", "/A", 0), open("t1", "/B", 1), readv("t1", 2)];
        assert_eq!(resolve_readv(&mut ev), 0);
        assert_eq!(ev[2].path().unwrap().as_str(), "/B");

        let mut ev = vec![readv("t2", 0)];
        assert_eq!(resolve_readv(&mut ev), 1);
        assert_eq!(ev[0].path(), None);
    }

    #[test]
    fn file_events_count_lines() {
        let text = format!(
            "{PFX} ofs open r /a\n\
             junk line\n\
             {PFX} fh=0 readV 1@2\n\
             {PFX} req=read fn=/a\n\
             210802 00:00:00 tid=t1 uid=u1 req=read 1@1 fn=/a\n"
        );
        let range = TimeRange::days(
            NaiveDate::from_ymd_opt(2021, 8, 1).unwrap(),
            NaiveDate::from_ymd_opt(2021, 8, 1).unwrap(),
        )
        .unwrap();
        let mut it = FileEvents::new(text.as_bytes(), range);
        let events: Vec<_> = it.by_ref().collect();
        let report = it.finish().unwrap();
        assert_eq!(events.len(), 2);
        assert_eq!(events[1].path().unwrap().as_str(), "/a");
        assert_eq!(report.lines_total, 5);
        assert_eq!(report.lines_matched.read, 2);
        assert_eq!(report.malformed.read, 1);
        assert_eq!(report.out_of_range.read, 1);
        assert_eq!(report.readv_unresolved, 0);
        assert_eq!(report.byte_volume_scanned, text.len() as u64);
    }

    #[test]
    fn merge_is_stable_by_file_order() {
        let a = vec![open("a", "/1", 5), open("a", "/2", 7)];
        let b = vec![open("b", "/3", 5), open("b", "/4", 6)];
        let merged = merge_streams(vec![a, b]);
        let paths: Vec<_> = merged.iter().map(|e| e.path().unwrap().as_str()).collect();
        assert_eq!(paths, ["/1", "/3", "/4", "/2"]);
    }

    #[test]
    fn log_names() {
        let d = NaiveDate::from_ymd_opt(2021, 8, 1).unwrap();
        assert_eq!(log_file_name(d), "xrootd-20210801.log");
        assert_eq!(log_file_date(Path::new("/x/xrootd-20210801.log.gz")), Some(d));
        assert_eq!(log_file_date(Path::new("xrootd-2021081.log")), None);
        assert_eq!(log_file_date(Path::new("other.log")), None);
    }
}
