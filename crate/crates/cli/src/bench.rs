//! Seeded benchmark: random subdivisions, random queries, every answer
//! checked against the brute-force oracle.

use std::collections::BTreeSet;
use std::io::Write;
use std::time::Instant;

use ptloc::{
    locate_bruteforce, synth, Fallback, LocateResult, LocationKind, PackedEdgeIndex, Point, Subdivision, Word,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::commands::result_line;
use crate::Failure;

pub struct Options {
    pub sizes: Vec<usize>,
    pub queries: usize,
    pub seed: u64,
    pub no_fallback: bool,
    pub timing: bool,
}

/// One line of the report.
#[derive(Debug, Serialize)]
pub struct Record {
    pub n: usize,
    #[serde(rename = "T")]
    pub t: usize,
    pub word_bits: u32,
    pub lanes_per_word: u32,
    pub words_per_stream: usize,
    /// Word operations of one packed evaluation.
    pub word_ops_per_query: u64,
    /// Whether every evaluated query issued the same number.
    pub word_ops_constant: bool,
    pub queries: usize,
    pub queries_per_second: Option<f64>,
    pub oracle_mismatch_count: usize,
}

/// Seed of the subdivision and queries for one size.
pub fn size_seed(seed: u64, n: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ n as u64
}

fn agrees(got: &LocateResult, want: &LocateResult) -> bool {
    got.kind() == want.kind()
        && got.face() == want.face()
        && (want.kind() != LocationKind::Inside || got.triangle() == want.triangle())
}

pub fn run<W: Word + Send + Sync>(opts: &Options, out: &mut impl Write) -> Result<(), Failure> {
    let fallback = if opts.no_fallback {
        Fallback::Off
    } else {
        Fallback::Exact
    };
    let mut first_failure = None;
    for &n in &opts.sizes {
        if !(3..=synth::MAX_VERTICES).contains(&n) {
            return Err(Failure::Input(format!("size {n} outside 3..={}", synth::MAX_VERTICES)));
        }
        let mut rng = synth::rng(size_seed(opts.seed, n));
        let sub: Subdivision<f64> = synth::random_subdivision(n, &mut rng);
        let idx = PackedEdgeIndex::<f64, W>::build(&sub).map_err(|e| Failure::Input(format!("size {n}: {e}")))?;
        let queries = synth::random_queries(&idx.bbox, opts.queries, &mut rng);

        let checked: Vec<(Option<u64>, Option<String>)> = queries
            .par_iter()
            .enumerate()
            .map(|(i, q)| {
                let ops = idx.query_point(q.x, q.y).map(|qp| idx.evaluate_counted(&qp).2 .0);
                let got = idx
                    .locate_with(q.x, q.y, fallback)
                    .expect("generated queries are finite");
                let want = locate_bruteforce(&idx.geometry, *q);
                let miss = (!agrees(&got, &want)).then(|| {
                    format!(
                        "mismatch seed={} n={n} query={i} x={:e} y={:e} locate=\"{}\" oracle=\"{}\"",
                        opts.seed,
                        q.x,
                        q.y,
                        result_line(&got),
                        result_line(&want)
                    )
                });
                (ops, miss)
            })
            .collect();

        let ops: BTreeSet<u64> = checked.iter().filter_map(|c| c.0).collect();
        let mismatches = checked.iter().filter(|c| c.1.is_some()).count();
        if first_failure.is_none() {
            first_failure = checked.iter().find_map(|c| c.1.clone());
        }
        if ops.len() > 1 && first_failure.is_none() {
            first_failure = Some(format!("word operation count varies across queries at n={n}: {ops:?}"));
        }
        let queries_per_second = opts.timing.then(|| throughput(&idx, &queries, fallback));
        let l = idx.layout();
        let record = Record {
            n,
            t: idx.triangle_count(),
            word_bits: l.word_bits,
            lanes_per_word: l.lanes_per_word,
            words_per_stream: idx.words_per_stream(),
            word_ops_per_query: ops.last().copied().unwrap_or(0),
            word_ops_constant: ops.len() <= 1,
            queries: queries.len(),
            queries_per_second,
            oracle_mismatch_count: mismatches,
        };
        let line = serde_json::to_string(&record).expect("record serializes");
        writeln!(out, "{line}").map_err(|e| Failure::Input(format!("stdout: {e}")))?;
    }
    match first_failure {
        Some(msg) => Err(Failure::Verification(msg)),
        None => Ok(()),
    }
}

fn throughput<W: Word>(idx: &PackedEdgeIndex<f64, W>, queries: &[Point<f64>], fallback: Fallback) -> f64 {
    let start = Instant::now();
    for q in queries {
        std::hint::black_box(idx.locate_with(q.x, q.y, fallback).ok());
    }
    queries.len() as f64 / start.elapsed().as_secs_f64().max(1e-9)
}
