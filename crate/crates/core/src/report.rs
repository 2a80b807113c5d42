//! Tables derived from a finished scan.

use std::fmt::Write;

use serde::Serialize;

use crate::scan::{Status, Summary};

/// Cycles whose minimum lies in `[10^decade, 10^(decade+1))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecadeRow {
    pub decade: u32,
    pub cycles: usize,
    pub isolated: usize,
    pub finite: usize,
}

fn percent(part: usize, whole: usize) -> f64 {
    if whole == 0 {
        0.0
    } else {
        100.0 * part as f64 / whole as f64
    }
}

pub fn decade_table(summary: &Summary) -> Vec<DecadeRow> {
    let mut rows: Vec<DecadeRow> = Vec::new();
    for c in &summary.cycles {
        let decade = c.id.ilog10();
        if rows.last().is_none_or(|r| r.decade != decade) {
            rows.push(DecadeRow { decade, cycles: 0, isolated: 0, finite: 0 });
        }
        let row = rows.last_mut().expect("row just pushed");
        row.cycles += 1;
        if c.status == Status::Finite {
            row.finite += 1;
            if c.is_isolated() {
                row.isolated += 1;
            }
        }
    }
    rows
}

#[derive(Debug, Clone, Serialize)]
pub struct Stats {
    pub limit: u64,
    pub decades: Vec<DecadeRow>,
    pub record_sizes: Vec<(u64, usize)>,
}

impl Stats {
    pub fn new(summary: &Summary) -> Self {
        Stats { limit: summary.limit, decades: decade_table(summary), record_sizes: summary.record_sizes.clone() }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let total = |f: fn(&DecadeRow) -> usize| self.decades.iter().map(f).sum::<usize>();
        let (cycles, isolated, finite) = (total(|r| r.cycles), total(|r| r.isolated), total(|r| r.finite));
        writeln!(out, "scan limit {}: cycles={cycles} isolated={isolated} finite={finite}", self.limit).unwrap();
        writeln!(out, "{:<16} {:>7} {:>16} {:>16}", "cycle minimum", "cycles", "isolated", "finite").unwrap();
        for r in &self.decades {
            let range = format!("[1e{}, 1e{})", r.decade, r.decade + 1);
            writeln!(
                out,
                "{range:<16} {:>7} {:>8} ({:>5.1}%) {:>8} ({:>5.1}%)",
                r.cycles,
                r.isolated,
                percent(r.isolated, r.cycles),
                r.finite,
                percent(r.finite, r.cycles)
            )
            .unwrap();
        }
        writeln!(out).unwrap();
        writeln!(out, "{:<16} {:>5}", "record n", "size").unwrap();
        for (n, size) in &self.record_sizes {
            writeln!(out, "{n:<16} {size:>5}").unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit::{Classifier, Config};
    use crate::scan::scan_summary;

    #[test]
    fn small_scan_table() {
        let summary = scan_summary(1000, &Classifier::new(Config::default())).unwrap();
        let stats = Stats::new(&summary);
        let tens = stats.decades.iter().find(|r| r.decade == 1).unwrap();
        assert_eq!((tens.cycles, tens.isolated, tens.finite), (1, 1, 1));
        assert_eq!(stats.record_sizes, vec![(28, 1)]);
        let text = stats.render();
        assert!(text.contains("[1e1, 1e2)"));
        assert!(text.contains("28"));
    }

    #[test]
    fn percent_of_nothing() {
        assert_eq!(percent(0, 0), 0.0);
        assert_eq!(percent(1, 4), 25.0);
    }
}
