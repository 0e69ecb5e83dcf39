use std::io::Write;
use std::path::{Path, PathBuf};

use ptloc::format::{parse_queries, parse_subdivision, peek_header, read_index, write_index, write_subdivision};
use ptloc::{synth, Coord, Fallback, LocateResult, Location, PackedEdgeIndex, Point, Subdivision, Word};
use rayon::prelude::*;

use crate::Failure;

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write_out(out: &mut impl Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::Input(format!("stdout: {e}")))
}

pub fn build(input: &Path, output: &Path, wide: bool, out: &mut impl Write) -> Result<(), Failure> {
    let text = read_text(input)?;
    let sub: Subdivision<f64> =
        parse_subdivision(&text).map_err(|e| Failure::Input(format!("{}: {e}", input.display())))?;
    let (bytes, report) = if wide {
        build_as::<u128>(&sub)?
    } else {
        build_as::<u64>(&sub)?
    };
    std::fs::write(output, bytes).map_err(|e| Failure::Input(format!("{}: {e}", output.display())))?;
    write_out(out, &report)
}

fn build_as<W: Word>(sub: &Subdivision<f64>) -> Result<(Vec<u8>, String), Failure> {
    let idx = PackedEdgeIndex::<f64, W>::build(sub).map_err(|e| Failure::Input(e.to_string()))?;
    let l = idx.layout();
    let report = format!(
        "triangles {}\nlanes {}\ncut_bit {}\nB {}\nL {}\nK {}\nwords_per_stream {}\nerror_budget {:e}\n",
        idx.triangle_count(),
        idx.streams.lanes(),
        idx.cut.cut_bit,
        idx.cut.width_b,
        l.lane_bits,
        l.lanes_per_word,
        idx.words_per_stream(),
        idx.error_budget,
    );
    Ok((write_index(&idx), report))
}

pub enum Queries {
    Single(f64, f64),
    File(PathBuf),
}

pub fn result_line(r: &LocateResult) -> String {
    match r.location {
        Location::Inside { triangle, face } => format!("inside {face} {triangle}"),
        Location::OnEdge { triangle, face, slot } => format!("edge {face} {triangle} {slot}"),
        Location::Outside => "outside".to_string(),
    }
}

pub fn locate(index: &Path, queries: Queries, no_fallback: bool, out: &mut impl Write) -> Result<(), Failure> {
    let bytes = std::fs::read(index).map_err(|e| Failure::Input(format!("{}: {e}", index.display())))?;
    let head = peek_header(&bytes).map_err(|e| Failure::Input(format!("{}: {e}", index.display())))?;
    let fallback = if no_fallback { Fallback::Off } else { Fallback::Exact };
    match (head.coord_tag, head.word_bits) {
        (64, 64) => locate_as::<f64, u64>(&bytes, index, queries, fallback, out),
        (64, 128) => locate_as::<f64, u128>(&bytes, index, queries, fallback, out),
        (32, 64) => locate_as::<f32, u64>(&bytes, index, queries, fallback, out),
        (32, 128) => locate_as::<f32, u128>(&bytes, index, queries, fallback, out),
        (t, w) => Err(Failure::Input(format!(
            "{}: unsupported index with f{t} coordinates and {w}-bit words",
            index.display()
        ))),
    }
}

fn locate_as<T: Coord + Send + Sync, W: Word + Send + Sync>(
    bytes: &[u8],
    path: &Path,
    queries: Queries,
    fallback: Fallback,
    out: &mut impl Write,
) -> Result<(), Failure> {
    let idx = read_index::<T, W>(bytes).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let points: Vec<Point<T>> = match queries {
        Queries::Single(x, y) => {
            let c = |v: f64| T::from(v).filter(|c| c.is_finite());
            match (c(x), c(y)) {
                (Some(x), Some(y)) => vec![Point::new(x, y)],
                _ => {
                    return Err(Failure::Input(format!(
                        "query ({x}, {y}) is not a finite coordinate pair"
                    )))
                }
            }
        }
        Queries::File(p) => {
            parse_queries(&read_text(&p)?).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?
        }
    };
    let lines: Vec<String> = points
        .par_iter()
        .map(|q| idx.locate_with(q.x, q.y, fallback).map(|r| result_line(&r)))
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::Input(e.to_string()))?;
    let mut text = lines.join("\n");
    text.push('\n');
    write_out(out, &text)
}

pub fn generate(vertices: usize, output: &Path, seed: u64) -> Result<(), Failure> {
    if !(3..=synth::MAX_VERTICES).contains(&vertices) {
        return Err(Failure::Input(format!(
            "vertex count must be in 3..={}",
            synth::MAX_VERTICES
        )));
    }
    let sub: Subdivision<f64> = synth::random_subdivision(vertices, &mut synth::rng(seed));
    std::fs::write(output, write_subdivision(&sub)).map_err(|e| Failure::Input(format!("{}: {e}", output.display())))
}
