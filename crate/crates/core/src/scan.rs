//! Bulk classification of every even `n <= limit`, as JSON lines.
//!
//! A scan file holds one [`ScanRecord`] per even `n` in ascending order,
//! a `{"component": …}` line before the first record that reaches each
//! cycle, and a closing `{"summary": …}` line. Everything in the summary is
//! recomputed from the preceding lines, so a resumed scan ends with the same
//! summary as an uninterrupted one.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Seek, SeekFrom, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orbit::{Certificate, Classification, Classifier, ComponentResult, Config, Cycle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Finite,
    PotentiallyInfinite,
    Indeterminate,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Finite => "finite",
            Status::PotentiallyInfinite => "potentially_infinite",
            Status::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanRecord {
    pub n: u64,
    pub status: Status,
    /// Minimum of the cycle the forward orbit of `n` entered.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub component_id: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub component_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl ScanRecord {
    pub fn from_classification(n: u64, c: &Classification) -> Self {
        let component_id = c.cycle.as_ref().map(Cycle::min);
        let mut record =
            ScanRecord { n, status: status_of(&c.result), component_id, certificate: None, component_size: None, reason: None };
        match &c.result {
            ComponentResult::Finite(f) => record.component_size = Some(f.size()),
            ComponentResult::PotentiallyInfinite { certificate } => record.certificate = Some(certificate.clone()),
            ComponentResult::Indeterminate(i) => {
                record.reason = Some(format!("{} after {} at {}", i.limit.as_str(), i.explored, i.at));
            }
        }
        record
    }

    fn from_error(n: u64, e: &Error) -> Self {
        ScanRecord {
            n,
            status: Status::Indeterminate,
            component_id: None,
            certificate: None,
            component_size: None,
            reason: Some(e.to_string()),
        }
    }
}

fn status_of(r: &ComponentResult) -> Status {
    match r {
        ComponentResult::Finite(_) => Status::Finite,
        ComponentResult::PotentiallyInfinite { .. } => Status::PotentiallyInfinite,
        ComponentResult::Indeterminate(_) => Status::Indeterminate,
    }
}

/// A cycle met during the scan and what became of its component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentRecord {
    pub id: u64,
    pub cycle: Cycle,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl ComponentRecord {
    pub fn new(cycle: &Cycle, result: &Result<ComponentResult>) -> Self {
        let mut record = ComponentRecord {
            id: cycle.min(),
            cycle: cycle.clone(),
            status: Status::Indeterminate,
            nodes: None,
            certificate: None,
            reason: None,
        };
        match result {
            Ok(r) => {
                record.status = status_of(r);
                match r {
                    ComponentResult::Finite(f) => record.nodes = Some(f.nodes.clone()),
                    ComponentResult::PotentiallyInfinite { certificate } => record.certificate = Some(certificate.clone()),
                    ComponentResult::Indeterminate(i) => {
                        record.reason = Some(format!("{} after {} at {}", i.limit.as_str(), i.explored, i.at))
                    }
                }
            }
            Err(e) => record.reason = Some(e.to_string()),
        }
        record
    }

    pub fn size(&self) -> Option<usize> {
        self.nodes.as_ref().map(Vec::len)
    }

    pub fn is_isolated(&self) -> bool {
        self.size() == Some(self.cycle.order())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatusCounts {
    pub finite: u64,
    pub potentially_infinite: u64,
    pub indeterminate: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub limit: u64,
    pub records: u64,
    pub counts: StatusCounts,
    /// Every cycle met, ascending by minimum.
    pub cycles: Vec<ComponentRecord>,
    /// Number of finite components with a node `<= limit`.
    pub finite_components: usize,
    /// Each `n` whose component is finite and larger than for every smaller `n`.
    pub record_sizes: Vec<(u64, usize)>,
    pub indeterminate: Vec<u64>,
    pub config: Config,
}

impl Summary {
    pub fn finite(&self) -> impl Iterator<Item = &ComponentRecord> {
        self.cycles.iter().filter(|c| c.status == Status::Finite)
    }
}

/// One line of a scan file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum ScanLine {
    Record(ScanRecord),
    Component { component: ComponentRecord },
    Summary { summary: Box<Summary> },
}

impl ScanLine {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("scan lines always serialize")
    }

    /// Parses one line. Untagged deserialization cannot carry 128-bit
    /// certificates, so the shape is picked from the leading key.
    pub fn parse(line: &str) -> Option<ScanLine> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct ComponentLine {
            component: ComponentRecord,
        }
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct SummaryLine {
            summary: Box<Summary>,
        }
        let line = line.trim();
        if line.starts_with(r#"{"component":"#) {
            serde_json::from_str::<ComponentLine>(line).ok().map(|c| ScanLine::Component { component: c.component })
        } else if line.starts_with(r#"{"summary":"#) {
            serde_json::from_str::<SummaryLine>(line).ok().map(|s| ScanLine::Summary { summary: s.summary })
        } else {
            serde_json::from_str(line).ok().map(ScanLine::Record)
        }
    }
}

/// Folds scan lines, in file order, into a [`Summary`].
#[derive(Debug, Clone, Default)]
pub struct SummaryBuilder {
    last_n: u64,
    records: u64,
    counts: StatusCounts,
    components: BTreeMap<u64, ComponentRecord>,
    record_sizes: Vec<(u64, usize)>,
    indeterminate: Vec<u64>,
}

impl SummaryBuilder {
    /// Largest `n` recorded so far, or 0.
    pub fn last_n(&self) -> u64 {
        self.last_n
    }

    pub fn has_component(&self, id: u64) -> bool {
        self.components.contains_key(&id)
    }

    pub fn push(&mut self, line: &ScanLine) -> Result<()> {
        match line {
            ScanLine::Record(r) => {
                if r.n <= self.last_n || r.n % 2 == 1 {
                    return Err(Error::Domain(format!("scan record {} out of order after {}", r.n, self.last_n)));
                }
                self.last_n = r.n;
                self.records += 1;
                match r.status {
                    Status::Finite => {
                        self.counts.finite += 1;
                        let size = r.component_size.unwrap_or(0);
                        if self.record_sizes.last().is_none_or(|&(_, best)| size > best) {
                            self.record_sizes.push((r.n, size));
                        }
                    }
                    Status::PotentiallyInfinite => self.counts.potentially_infinite += 1,
                    Status::Indeterminate => {
                        self.counts.indeterminate += 1;
                        self.indeterminate.push(r.n);
                    }
                }
            }
            ScanLine::Component { component } => {
                self.components.entry(component.id).or_insert_with(|| component.clone());
            }
            ScanLine::Summary { .. } => {}
        }
        Ok(())
    }

    pub fn finish(&self, limit: u64, config: &Config) -> Summary {
        let cycles: Vec<ComponentRecord> = self.components.values().cloned().collect();
        let finite_components = cycles
            .iter()
            .filter(|c| c.nodes.as_ref().is_some_and(|nodes| nodes.first().is_some_and(|&v| v <= limit)))
            .count();
        Summary {
            limit,
            records: self.records,
            counts: self.counts.clone(),
            cycles,
            finite_components,
            record_sizes: self.record_sizes.clone(),
            indeterminate: self.indeterminate.clone(),
            config: config.clone(),
        }
    }
}

const CHUNK: u64 = 1 << 12;

/// Classifies every even `n` in `(after, limit]` and hands the lines to
/// `sink` in ascending order of `n`. Failures for a single `n` become
/// indeterminate records. Components already in `builder` are not repeated.
pub fn scan_range(
    limit: u64,
    after: u64,
    classifier: &Classifier,
    builder: &mut SummaryBuilder,
    mut sink: impl FnMut(&ScanLine) -> Result<()>,
) -> Result<()> {
    let mut start = (after + 1).max(2);
    start += start % 2;
    while start <= limit {
        let end = (start + 2 * CHUNK).min(limit + 1);
        let results: Vec<(u64, Result<Classification>)> =
            (start / 2..end.div_ceil(2))
            .into_par_iter()
            .map(|h| (2 * h, classifier.classify_detailed(2 * h)))
            .collect();
        for (n, result) in results {
            let record = match &result {
                Ok(c) => {
                    if let Some(cycle) = &c.cycle {
                        if !builder.has_component(cycle.min()) {
                            let line = ScanLine::Component {
                                component: ComponentRecord::new(cycle, &classifier.component_of(cycle)),
                            };
                            builder.push(&line)?;
                            sink(&line)?;
                        }
                    }
                    ScanRecord::from_classification(n, c)
                }
                Err(e) => ScanRecord::from_error(n, e),
            };
            let line = ScanLine::Record(record);
            builder.push(&line)?;
            sink(&line)?;
        }
        start = end + end % 2;
    }
    Ok(())
}

/// In-memory scan of `[2, limit]`.
pub fn scan_summary(limit: u64, classifier: &Classifier) -> Result<Summary> {
    let mut builder = SummaryBuilder::default();
    scan_range(limit, 0, classifier, &mut builder, |_| Ok(()))?;
    Ok(builder.finish(limit, classifier.config()))
}

/// Reads an existing scan file. Returns the builder state and the byte
/// length of its well-formed prefix, excluding any summary line and any
/// trailing partial line.
pub fn read_scan(path: &Path) -> Result<(SummaryBuilder, u64, Option<Summary>)> {
    let file = File::open(path).map_err(|e| io_error(path, e))?;
    let mut reader = BufReader::new(file);
    let mut builder = SummaryBuilder::default();
    let mut good = 0u64;
    let mut summary = None;
    let mut line = String::new();
    loop {
        line.clear();
        let read = reader.read_line(&mut line).map_err(|e| io_error(path, e))?;
        if read == 0 || !line.ends_with('\n') {
            break;
        }
        match ScanLine::parse(line.trim_end()) {
            Some(ScanLine::Summary { summary: s }) => {
                summary = Some(*s);
                break;
            }
            Some(parsed) => builder.push(&parsed)?,
            None => break,
        }
        good += read as u64;
    }
    Ok((builder, good, summary))
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

/// Scans to `limit` into `path`, picking up after the last complete record
/// if the file already exists.
pub fn scan_to_file(path: &Path, limit: u64, classifier: &Classifier) -> Result<Summary> {
    let (mut builder, good, _) = if path.exists() { read_scan(path)? } else { (SummaryBuilder::default(), 0, None) };
    if builder.last_n() > limit {
        return Err(Error::Domain(format!("{} already holds records past limit {limit}", path.display())));
    }
    let mut file = OpenOptions::new().create(true).write(true).truncate(false).open(path).map_err(|e| io_error(path, e))?;
    file.set_len(good).map_err(|e| io_error(path, e))?;
    file.seek(SeekFrom::End(0)).map_err(|e| io_error(path, e))?;
    let mut out = BufWriter::new(file);
    let after = builder.last_n();
    scan_range(limit, after, classifier, &mut builder, |line| {
        writeln!(out, "{}", line.to_json()).map_err(|e| io_error(path, e))
    })?;
    let summary = builder.finish(limit, classifier.config());
    writeln!(out, "{}", ScanLine::Summary { summary: Box::new(summary.clone()) }.to_json())
        .and_then(|_| out.flush())
        .map_err(|e| io_error(path, e))?;
    Ok(summary)
}
