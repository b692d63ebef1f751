use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use super::output::{Format, Report, Table, Value};
use super::{
    CapacityArgs, CliError, ContentArgs, FitArgs, GenerateArgs, InputArgs, InputOut,
    LifetimesArgs, Preset, ReadsArgs, SweepArgs, EXIT_DATA, EXIT_OK,
};
use crate::event::{TimeRange, TraceEvent, SECS_PER_DAY, SECS_PER_HOUR};
use crate::parser::{discover_logs, parse_logs, ParseOptions};
use crate::sim::{
    content_model, fill_step, fill_time, hit_rate_sweep, oracle_lru, ContentModelParams,
    SimResult,
};
use crate::stats::{
    build_histogram, fit_power_law, lifetime_quantile_report, segment_lifetimes,
    threshold_sweep, Histogram, PowerLawFit, ReadStats, StatsError, TransferStats,
};
use crate::synth::{default_profile, synthesize, WorkloadProfile};

pub(super) struct Ctx {
    pub format: Option<Format>,
    pub flags: Vec<String>,
}

impl Ctx {
    fn report(&self, command: &'static str, seed: Option<u64>, tables: Vec<Table>) -> Report {
        Report {
            command,
            seed,
            flags: self.flags.clone(),
            tables,
        }
    }
}

fn data<E: std::fmt::Display>(context: &str) -> impl FnOnce(E) -> CliError + '_ {
    move |e| CliError::Data(format!("{context}: {e}"))
}

pub(super) fn emit(report: &Report, out: Option<&Path>, format: Option<Format>) -> Result<(), CliError> {
    let format = Format::for_output(format, out);
    let written = report
        .emit(out, format)
        .map_err(data("cannot write output"))?;
    for p in written {
        log::info!("wrote {}", p.display());
    }
    Ok(())
}

fn load(input: &InputArgs) -> Result<Vec<TraceEvent>, CliError> {
    let days = input.days.as_ref().map(|d| (d.0, d.1));
    let files = if input.logs.is_file() {
        vec![input.logs.clone()]
    } else {
        discover_logs(&input.logs, days).map_err(data(&format!("cannot list {}", input.logs.display())))?
    };
    if files.is_empty() {
        return Err(CliError::Data(format!(
            "no xrootd-YYYYMMDD.log files in {}",
            input.logs.display()
        )));
    }
    let range = match days {
        Some((a, b)) => TimeRange::days(a, b).expect("validated date range"),
        None => TimeRange::unbounded(),
    };
    let (events, report) = parse_logs(
        &files,
        range,
        ParseOptions {
            tolerant: input.tolerant,
        },
    )
    .map_err(|e| CliError::Data(e.to_string()))?;
    log::info!(
        "parsed {} files, {} lines, {} events",
        report.files,
        report.lines_total,
        events.len()
    );
    if report.malformed_total() > 0 {
        log::warn!("{} malformed lines skipped", report.malformed_total());
    }
    if report.readv_unresolved > 0 {
        log::warn!("{} vector reads without an open session", report.readv_unresolved);
    }
    Ok(events)
}

fn histogram_table(command: &str, h: &Histogram, scale: f64) -> Table {
    let mut t = Table::new(command, "histogram");
    for (lo, hi, count) in h.bins() {
        t.push(vec![(lo / scale).into(), (hi / scale).into(), count.into()]);
    }
    t
}

fn edges(bin: f64, max: f64) -> Result<Vec<f64>, CliError> {
    if !(bin > 0.0 && max > 0.0 && bin.is_finite() && max.is_finite()) {
        return Err(CliError::Usage("histogram bin and max must be positive".into()));
    }
    let n = (max / bin).ceil() as usize;
    Ok(Histogram::uniform_edges(0.0, bin * n as f64, n))
}

pub(super) fn generate(ctx: &Ctx, a: GenerateArgs) -> Result<i32, CliError> {
    let mut profile = match &a.profile {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(data(&format!("cannot read {}", p.display())))?;
            serde_json::from_str::<WorkloadProfile>(&text)
                .map_err(|e| CliError::Usage(format!("invalid profile {}: {e}", p.display())))?
        }
        None => match a.preset {
            Preset::Default => default_profile(),
            Preset::August2021 => WorkloadProfile::august_2021(1.0),
        },
    };
    if let Some(s) = a.scale {
        if !(s > 0.0 && s.is_finite()) {
            return Err(CliError::Usage("--scale must be positive".into()));
        }
        profile = profile.scaled(s);
    }
    if let Some(n) = a.population {
        profile.file_population = n;
    }
    if let Some(r) = a.junk_rate {
        profile.junk_line_rate = r;
    }
    let (first, last) = (a.days.0, a.days.1);
    let corpus = synthesize(&profile, a.seed, first, last)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let written = corpus.write(&a.out).map_err(|e| CliError::Data(e.to_string()))?;

    let mut files = Table::new("generate", "files");
    for ((date, text), path) in corpus.days.iter().zip(&written) {
        files.push(vec![
            date.to_string().into(),
            path.display().to_string().into(),
            (text.len() as u64).into(),
            (text.lines().count() as u64).into(),
        ]);
    }
    let tr = TransferStats::from_events(&corpus.events);
    let summary = Table::new("generate", "summary").with_row(vec![
        a.seed.into(),
        corpus.days.len().into(),
        written.len().into(),
        corpus.events.len().into(),
        tr.transfers.into(),
        tr.total_bytes.into(),
    ]);
    let report = ctx.report("generate", Some(a.seed), vec![files, summary]);
    emit(&report, a.report.as_deref(), ctx.format)?;
    Ok(EXIT_OK)
}

pub(super) fn analyze_reads(ctx: &Ctx, a: ReadsArgs) -> Result<i32, CliError> {
    const CMD: &str = "analyze reads";
    let edges = edges(a.bin, a.max)?;
    let events = load(&a.input)?;
    let s = ReadStats::from_events(&events);
    let summary = Table::new(CMD, "summary").with_row(vec![
        s.total_read_ops.into(),
        s.unresolved_ops.into(),
        s.distinct_files().into(),
        s.mean_reads_per_file().into(),
        s.size_samples.into(),
        s.total_bytes_read.into(),
        s.mean_read_size().into(),
        s.mean_offset().into(),
    ]);
    let mut per_file = Table::new(CMD, "per_file");
    for (p, n) in &s.per_file_counts {
        per_file.push(vec![p.as_str().into(), (*n).into()]);
    }
    let counts: Vec<f64> = s.per_file_counts.values().map(|&n| n as f64).collect();
    let h = build_histogram(&counts, &edges).map_err(|e| CliError::Usage(e.to_string()))?;
    let report = ctx.report(CMD, None, vec![summary, per_file, histogram_table(CMD, &h, 1.0)]);
    emit(&report, a.out.out.as_deref(), ctx.format)?;
    Ok(EXIT_OK)
}

pub(super) fn analyze_lifetimes(ctx: &Ctx, a: LifetimesArgs) -> Result<i32, CliError> {
    const CMD: &str = "analyze lifetimes";
    let hour = SECS_PER_HOUR as f64;
    let edges = edges(a.bin as f64, a.max as f64)?;
    let events = load(&a.input)?;
    let seg = segment_lifetimes(&events, a.tau);
    let quantiles = match lifetime_quantile_report(&seg.records, &a.thresholds.0) {
        Ok(q) => q,
        Err(StatsError::EmptyInput) => {
            return Err(CliError::Data("no lifetimes found (no open lines)".into()))
        }
        Err(e) => return Err(CliError::Data(e.to_string())),
    };
    let summary = Table::new(CMD, "summary").with_row(vec![
        a.tau.into(),
        seg.records.len().into(),
        seg.incomplete().into(),
        seg.orphan_closes.into(),
        seg.mean_hours().into(),
    ]);
    let mut qt = Table::new(CMD, "quantiles");
    for (t, q) in a.thresholds.0.iter().zip(quantiles) {
        qt.push(vec![(*t as f64 / hour).into(), q.into()]);
    }
    let secs: Vec<f64> = seg.records.iter().map(|r| r.length_secs() as f64).collect();
    let h = build_histogram(&secs, &edges).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut records = Table::new(CMD, "records");
    for r in &seg.records {
        records.push(vec![
            r.path.as_str().into(),
            r.t_s.as_secs().into(),
            r.t_e.as_secs().into(),
            r.hours().into(),
            r.opens.into(),
            r.complete.into(),
        ]);
    }
    let report = ctx.report(
        CMD,
        None,
        vec![summary, qt, histogram_table(CMD, &h, hour), records],
    );
    emit(&report, a.out.out.as_deref(), ctx.format)?;
    Ok(EXIT_OK)
}

pub(super) fn analyze_transfers(ctx: &Ctx, a: InputOut) -> Result<i32, CliError> {
    const CMD: &str = "analyze transfers";
    let events = load(&a.input)?;
    let total = TransferStats::from_events(&events);
    let mut daily: BTreeMap<chrono::NaiveDate, TransferStats> = BTreeMap::new();
    for e in &events {
        if matches!(e, TraceEvent::Transfer { .. }) {
            daily
                .entry(e.ts().date())
                .or_default()
                .merge(&TransferStats::from_events([e]));
        }
    }
    let summary = Table::new(CMD, "summary").with_row(vec![total.transfers.into(), total.total_bytes.into()]);
    let mut dt = Table::new(CMD, "daily");
    for (d, s) in daily {
        dt.push(vec![d.to_string().into(), s.transfers.into(), s.total_bytes.into()]);
    }
    emit(&ctx.report(CMD, None, vec![summary, dt]), a.out.out.as_deref(), ctx.format)?;
    Ok(EXIT_OK)
}

pub(super) fn sweep_tau(ctx: &Ctx, a: SweepArgs) -> Result<i32, CliError> {
    const CMD: &str = "analyze sweep-tau";
    if a.taus.0.iter().any(|&t| t <= 0) {
        return Err(CliError::Usage("thresholds must be positive".into()));
    }
    let events = load(&a.input)?;
    let sweep = threshold_sweep(&events, &a.taus.0).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut t = Table::new(CMD, "sweep");
    for p in &sweep.points {
        t.push(vec![
            p.tau_secs.into(),
            (p.tau_secs as f64 / SECS_PER_DAY as f64).into(),
            p.lifetimes.into(),
            p.mean_hours.into(),
        ]);
    }
    let summary = Table::new(CMD, "summary").with_row(vec![sweep.grand_mean_hours.into()]);
    emit(&ctx.report(CMD, None, vec![t, summary]), a.out.out.as_deref(), ctx.format)?;
    Ok(EXIT_OK)
}

fn read_points(path: &Path) -> Result<Vec<(f64, f64)>, CliError> {
    let text = fs::read_to_string(path).map_err(data(&format!("cannot read {}", path.display())))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| CliError::Data(format!("{} is empty", path.display())))?
        .split(',')
        .map(str::trim)
        .collect();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| *h == name)
            .ok_or_else(|| CliError::Data(format!("{}: missing `{name}` column", path.display())))
    };
    let (xi, yi) = (col("x")?, col("y")?);
    lines
        .enumerate()
        .map(|(i, line)| {
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            let num = |j: usize| cells.get(j).and_then(|c| c.parse::<f64>().ok());
            match (num(xi), num(yi)) {
                (Some(x), Some(y)) => Ok((x, y)),
                _ => Err(CliError::Data(format!("{}: bad row {}", path.display(), i + 2))),
            }
        })
        .collect()
}

pub(super) fn fit_powerlaw(ctx: &Ctx, a: FitArgs) -> Result<i32, CliError> {
    const CMD: &str = "fit-powerlaw";
    let points = match (&a.points, &a.logs) {
        (Some(p), _) => read_points(p)?,
        (None, Some(logs)) => {
            let input = InputArgs {
                logs: logs.clone(),
                days: a.days.clone(),
                tolerant: false,
            };
            let events = load(&input)?;
            let hour = SECS_PER_HOUR as f64;
            let edges = edges(a.bin as f64, a.max as f64)?;
            let seg = segment_lifetimes(&events, a.tau);
            let secs: Vec<f64> = seg.records.iter().map(|r| r.length_secs() as f64).collect();
            let h = build_histogram(&secs, &edges).map_err(|e| CliError::Usage(e.to_string()))?;
            h.bins()
                .map(|(lo, hi, c)| ((lo + hi) / 2.0 / hour, c as f64))
                .collect()
        }
        (None, None) => unreachable!("clap requires a source"),
    };
    let (fit, code): (PowerLawFit, i32) = match fit_power_law(&points) {
        Ok(f) => (f, EXIT_OK),
        Err(StatsError::NonConvergence { best }) => {
            log::warn!("fit did not converge; reporting best parameters");
            (best, EXIT_DATA)
        }
        Err(e) => return Err(CliError::Data(e.to_string())),
    };
    let ft = Table::new(CMD, "fit").with_row(vec![
        fit.a.into(),
        fit.b.into(),
        fit.eps.into(),
        fit.rmse.into(),
        fit.iterations.into(),
        fit.converged.into(),
    ]);
    let mut pt = Table::new(CMD, "points");
    for &(x, y) in &points {
        pt.push(vec![x.into(), y.into(), fit.eval(x).into()]);
    }
    emit(&ctx.report(CMD, None, vec![ft, pt]), a.out.out.as_deref(), ctx.format)?;
    Ok(code)
}

fn detail_row(r: &SimResult) -> Vec<Value> {
    vec![
        r.capacity.into(),
        r.hits.into(),
        r.misses.into(),
        r.total_reads.into(),
        r.hit_rate.into(),
        r.bytes_inserted.into(),
        r.bytes_evicted.into(),
        r.eviction_events.into(),
        r.oversize.into(),
        r.final_occupied.into(),
    ]
}

pub(super) fn hit_rate(ctx: &Ctx, a: CapacityArgs, oracle: bool) -> Result<i32, CliError> {
    let events = load(&a.input)?;
    let caps = &a.capacities.0;
    let results: Vec<SimResult> = if oracle {
        caps.iter()
            .map(|&c| oracle_lru(&events, c))
            .collect::<Result<_, _>>()
    } else {
        hit_rate_sweep(&events, caps)
    }
    .map_err(|e| CliError::Usage(e.to_string()))?;

    let report = if oracle {
        let mut d = Table::new("oracle lru", "detail");
        results.iter().for_each(|r| d.push(detail_row(r)));
        ctx.report("oracle lru", None, vec![d])
    } else {
        let cmd = "simulate hit-rate";
        let mut curve = Table::new(cmd, "curve");
        let mut d = Table::new(cmd, "detail");
        for r in &results {
            curve.push(vec![r.capacity.into(), r.hit_rate.into()]);
            d.push(detail_row(r));
        }
        ctx.report(cmd, None, vec![curve, d])
    };
    emit(&report, a.out.out.as_deref(), ctx.format)?;
    Ok(EXIT_OK)
}

pub(super) fn content(ctx: &Ctx, a: ContentArgs) -> Result<i32, CliError> {
    const CMD: &str = "simulate content-model";
    let mut p = match &a.params {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(data(&format!("cannot read {}", path.display())))?;
            serde_json::from_str::<ContentModelParams>(&text)
                .map_err(|e| CliError::Usage(format!("invalid parameters {}: {e}", path.display())))?
        }
        None => ContentModelParams::default(),
    };
    if let Some(v) = a.seed {
        p.seed = v;
    }
    if let Some(v) = a.capacity {
        p.capacity = v;
    }
    if let Some(v) = a.steps {
        p.steps = v;
    }
    if let Some(d) = &a.days {
        p.steps = (d.1 - d.0).num_days() as u32;
    }
    if let Some(v) = a.access_rate {
        p.access_rate = v;
    }
    if let Some(v) = a.file_size {
        p.file_size = v;
    }
    if let Some(v) = a.h0 {
        p.h0 = v;
    }
    if let Some(v) = a.h_cap {
        p.h_cap = v;
    }
    if a.delta.is_some() {
        p.delta = a.delta;
    }
    if let Some(v) = a.size_params {
        p.size_params = v;
    }
    if let Some(v) = a.rate_params {
        p.rate_params = v;
    }
    p.clamp_negative |= a.clamp_negative;

    let series = content_model(&p).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut t = Table::new(CMD, "series");
    for s in &series {
        t.push(vec![
            s.step.into(),
            s.size_param.into(),
            s.rate_param.into(),
            s.hit_rate.into(),
            s.increment.into(),
            s.cache_bytes.into(),
            s.evicted_bytes_cumulative.into(),
        ]);
    }
    let summary = Table::new(CMD, "summary").with_row(vec![
        p.capacity.into(),
        p.steps.into(),
        fill_step(&series, p.capacity).into(),
    ]);
    emit(&ctx.report(CMD, Some(p.seed), vec![t, summary]), a.out.out.as_deref(), ctx.format)?;
    Ok(EXIT_OK)
}

pub(super) fn fill(ctx: &Ctx, a: CapacityArgs) -> Result<i32, CliError> {
    const CMD: &str = "simulate fill-time";
    let events = load(&a.input)?;
    let mut t = Table::new(CMD, "fill");
    for p in fill_time(&events, &a.capacities.0) {
        t.push(vec![
            p.capacity.into(),
            p.duration_secs.into(),
            p.duration_secs.map(|s| s as f64 / SECS_PER_DAY as f64).into(),
        ]);
    }
    emit(&ctx.report(CMD, None, vec![t]), a.out.out.as_deref(), ctx.format)?;
    Ok(EXIT_OK)
}
