//! Random trace builders and brute-force reference implementations shared by
//! the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use xcache_trace::event::{Chunk, FilePath, SessionKey, Timestamp, TraceEvent};

pub const T0: i64 = 1_627_776_000; // 2021-08-01 00:00:00 UTC
pub const DAY: i64 = 86_400;

pub fn session(n: u32) -> SessionKey {
    SessionKey::new(&format!("t{n}"), &format!("u{}", n % 7))
}

pub fn open(path: &str, secs: i64, s: u32) -> TraceEvent {
    TraceEvent::Open {
        ts: Timestamp::from_secs(secs),
        session: session(s),
        path: path.into(),
    }
}

pub fn close(path: &str, secs: i64, s: u32) -> TraceEvent {
    TraceEvent::Close {
        ts: Timestamp::from_secs(secs),
        session: session(s),
        path: path.into(),
    }
}

pub fn read(path: &str, secs: i64, size: u64, offset: u64) -> TraceEvent {
    TraceEvent::Read {
        ts: Timestamp::from_secs(secs),
        session: session(0),
        path: path.into(),
        size,
        offset,
    }
}

pub fn transfer(path: &str, secs: i64, size: u64) -> TraceEvent {
    TraceEvent::Transfer {
        ts: Timestamp::from_secs(secs),
        path: path.into(),
        size,
    }
}

/// Mixed stream over `files` paths: transfers, reads, resolved and
/// unresolved vector reads, opens and closes. Sizes are drawn from
/// `size_of(rng)`; timestamps are non-decreasing.
pub fn random_trace<R: Rng>(
    rng: &mut R,
    len: usize,
    files: u32,
    mut size_of: impl FnMut(&mut R) -> u64,
) -> Vec<TraceEvent> {
    let mut t = T0;
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        t += rng.random_range(0..3);
        let p = format!("/store/f{}", rng.random_range(0..files));
        let ev = match rng.random_range(0..100) {
            0..25 => transfer(&p, t, size_of(rng)),
            25..70 => read(&p, t, rng.random_range(1..1000), rng.random_range(0..10_000)),
            70..82 => TraceEvent::ReadV {
                ts: Timestamp::from_secs(t),
                session: session(1),
                path: rng.random_bool(0.8).then(|| FilePath::new(&p)),
                chunks: (0..rng.random_range(1..4))
                    .map(|_| Chunk::new(rng.random_range(1..500), rng.random_range(0..5000)))
                    .collect(),
            },
            82..91 => open(&p, t, rng.random_range(0..5)),
            _ => close(&p, t, rng.random_range(0..5)),
        };
        out.push(ev);
    }
    out
}

/// Opens and closes for a handful of paths at distinct timestamps spread
/// over `days` days, in time order.
pub fn random_schedule<R: Rng>(rng: &mut R, days: i64) -> Vec<TraceEvent> {
    let paths = rng.random_range(1..6);
    let n = rng.random_range(5..80);
    let mut used = std::collections::BTreeSet::new();
    while used.len() < n {
        used.insert(rng.random_range(0..days * DAY));
    }
    used.into_iter()
        .map(|offset| {
            let p = format!("/p{}", rng.random_range(0..paths));
            if rng.random_bool(0.6) {
                open(&p, T0 + offset, 0)
            } else {
                close(&p, T0 + offset, 0)
            }
        })
        .collect()
}

/// `(path, t_s, t_e, opens, complete)` per lifetime plus orphan closes,
/// computed from timestamps alone with pairwise scans.
pub type BruteLifetime = (String, i64, i64, u64, bool);

pub fn brute_lifetimes(events: &[TraceEvent], tau: i64) -> (Vec<BruteLifetime>, u64) {
    let mut opens: BTreeMap<String, Vec<i64>> = BTreeMap::new();
    let mut closes: BTreeMap<String, Vec<i64>> = BTreeMap::new();
    for e in events {
        match e {
            TraceEvent::Open { ts, path, .. } => opens.entry(path.to_string()).or_default().push(ts.as_secs()),
            TraceEvent::Close { ts, path, .. } => closes.entry(path.to_string()).or_default().push(ts.as_secs()),
            _ => {}
        }
    }
    let mut out = Vec::new();
    let mut orphans = 0u64;
    for (path, cl) in &closes {
        let first_open = opens.get(path).and_then(|o| o.iter().min().copied());
        orphans += cl.iter().filter(|&&c| first_open.is_none_or(|f| c < f)).count() as u64;
    }
    for (path, os) in &opens {
        // Group index of open i = number of gaps > tau among opens 1..=i.
        let group: Vec<usize> = (0..os.len())
            .map(|i| (1..=i).filter(|&j| os[j] - os[j - 1] > tau).count())
            .collect();
        let groups = group.last().map_or(0, |g| g + 1);
        for g in 0..groups {
            let members: Vec<i64> = (0..os.len()).filter(|&i| group[i] == g).map(|i| os[i]).collect();
            let start = members[0];
            let last_open = *members.last().unwrap();
            let next_start = (0..os.len()).find(|&i| group[i] == g + 1).map(|i| os[i]);
            let latest_close = closes
                .get(path)
                .into_iter()
                .flatten()
                .filter(|&&c| c >= start && next_start.is_none_or(|n| c < n))
                .max()
                .copied();
            out.push((
                path.clone(),
                start,
                latest_close.unwrap_or(last_open),
                members.len() as u64,
                latest_close.is_some(),
            ));
        }
    }
    out.sort_by(|a, b| (a.1, &a.0).cmp(&(b.1, &b.0)));
    (out, orphans)
}

/// Independent read tally: one op per Read/ReadV, one sample per pair.
pub fn brute_read_tally(events: &[TraceEvent]) -> (HashMap<String, u64>, u64, u64, u128, u128) {
    let mut per_file = HashMap::new();
    let (mut ops, mut samples, mut bytes, mut offsets) = (0u64, 0u64, 0u128, 0u128);
    for e in events {
        let pairs: Vec<(u64, u64)> = match e {
            TraceEvent::Read { size, offset, .. } => vec![(*size, *offset)],
            TraceEvent::ReadV { chunks, .. } => chunks.iter().map(|c| (c.size, c.offset)).collect(),
            _ => continue,
        };
        ops += 1;
        if let Some(p) = e.path() {
            *per_file.entry(p.to_string()).or_insert(0) += 1;
        }
        for (s, o) in pairs {
            samples += 1;
            bytes += s as u128;
            offsets += o as u128;
        }
    }
    (per_file, ops, samples, bytes, offsets)
}
