//! Scaling benchmarks.
//!
//! A measurement covers reading the input graph text, executing the program
//! and printing the result; compiling the program is excluded.

use std::fmt;
use std::time::{Duration, Instant};

use crate::generators::{generate, GenError, GraphClass};
use crate::interp::{exec, Limits, Outcome, Program, RunStats};
use crate::text::{parse_host, print_host, TextError};

pub const CSV_HEADER: &str = "program,class,size,rep,ms,steps,probes,outcome";

/// Repetition index, or the median row summarising a size.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rep {
    Run(usize),
    Median,
}

impl fmt::Display for Rep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rep::Run(i) => write!(f, "{i}"),
            Rep::Median => f.write_str("median"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub program: String,
    pub class: String,
    /// Nodes plus edges of the input graph.
    pub size: usize,
    pub rep: Rep,
    pub ms: f64,
    pub steps: u64,
    pub probes: u64,
    /// `graph`, `fail` or `limit`.
    pub outcome: &'static str,
}

impl BenchRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{:.3},{},{},{}",
            self.program,
            self.class,
            self.size,
            self.rep,
            self.ms,
            self.steps,
            self.probes,
            self.outcome
        )
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Text(#[from] TextError),
    #[error("sizes must be ascending")]
    UnsortedSizes,
}

/// One timed run: parse `input`, execute, print the result.
pub struct Measured {
    pub elapsed: Duration,
    pub outcome: Outcome,
    pub stats: RunStats,
    /// Printed output graph, if the run produced one.
    pub output: Option<String>,
}

pub fn measure(program: &Program, input: &str, limits: Limits) -> Result<Measured, TextError> {
    let start = Instant::now();
    let g = parse_host(input)?;
    let (outcome, stats) = exec(program, g, limits);
    let output = outcome.graph().map(print_host);
    let elapsed = start.elapsed();
    Ok(Measured {
        elapsed,
        outcome,
        stats,
        output,
    })
}

pub fn median(xs: &mut [f64]) -> f64 {
    assert!(!xs.is_empty(), "median of nothing");
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2.0
    }
}

/// Runs `program` on `class` graphs of each size, `reps` times per size.
/// Emits one row per repetition followed by a median row per size.
pub fn bench(
    program: &Program,
    program_name: &str,
    class: GraphClass,
    sizes: &[usize],
    reps: usize,
    limits: Limits,
) -> Result<Vec<BenchRow>, BenchError> {
    if sizes.windows(2).any(|w| w[0] > w[1]) {
        return Err(BenchError::UnsortedSizes);
    }
    let mut rows = Vec::new();
    for &n in sizes {
        let g = generate(class, n)?;
        let size = g.size();
        let input = print_host(&g);
        drop(g);
        let mut times = Vec::with_capacity(reps);
        let mut last = None;
        for rep in 0..reps {
            let m = measure(program, &input, limits)?;
            let ms = m.elapsed.as_secs_f64() * 1e3;
            times.push(ms);
            let row = BenchRow {
                program: program_name.to_string(),
                class: class.name().to_string(),
                size,
                rep: Rep::Run(rep),
                ms,
                steps: m.stats.steps,
                probes: m.stats.probes,
                outcome: m.outcome.name(),
            };
            last = Some(row.clone());
            rows.push(row);
        }
        if let Some(mut row) = last {
            row.rep = Rep::Median;
            row.ms = median(&mut times);
            rows.push(row);
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::programs::bundled_source;

    #[test]
    fn median_odd_and_even() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn rows_and_csv() {
        let p = Program::parse(bundled_source("is-cycle").unwrap()).unwrap();
        let rows = bench(&p, "is-cycle", GraphClass::Cycle, &[4, 8], 3, Limits::default())
            .unwrap();
        assert_eq!(rows.len(), 8);
        assert_eq!(rows[3].rep, Rep::Median);
        assert_eq!(rows[0].size, 8);
        assert!(rows.iter().all(|r| r.outcome == "graph"));
        // Counters are deterministic across repetitions.
        assert!(rows[..4].iter().all(|r| (r.steps, r.probes) == (rows[0].steps, rows[0].probes)));
        let line = rows[0].csv_line();
        assert_eq!(line.split(',').count(), CSV_HEADER.split(',').count());
        assert!(line.starts_with("is-cycle,cycle,8,0,"));
    }

    #[test]
    fn unsorted_sizes_rejected() {
        let p = Program::parse(bundled_source("is-cycle").unwrap()).unwrap();
        assert!(matches!(
            bench(&p, "x", GraphClass::Cycle, &[8, 4], 1, Limits::default()),
            Err(BenchError::UnsortedSizes)
        ));
    }
}
