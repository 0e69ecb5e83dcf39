use std::path::PathBuf;
use std::process::{Command, Output};

const SQUARE: &str = "vertices 4\n0 0\n1 0\n1 1\n0 1\nfaces 1\n0 1 2 3\n";

fn ptloc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptloc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

struct Scratch(PathBuf);

impl Scratch {
    fn new(name: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("ptloc-cli-{name}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn file(&self, name: &str, contents: &str) -> String {
        let p = self.0.join(name);
        std::fs::write(&p, contents).unwrap();
        p.to_string_lossy().into_owned()
    }

    fn path(&self, name: &str) -> String {
        self.0.join(name).to_string_lossy().into_owned()
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn build_square(dir: &Scratch, word_bits: &str) -> String {
    let input = dir.file("square.txt", SQUARE);
    let index = dir.path(&format!("square{word_bits}.idx"));
    let out = ptloc(&["build", &input, &index, "--word-bits", word_bits]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    index
}

#[test]
fn build_reports_layout() {
    let dir = Scratch::new("build");
    let input = dir.file("square.txt", SQUARE);
    let out = ptloc(&["build", &input, &dir.path("sq.idx")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for line in [
        "triangles 2",
        "lanes 6",
        "cut_bit -2",
        "B 3",
        "L 12",
        "K 5",
        "words_per_stream 2",
    ] {
        assert!(text.lines().any(|l| l == line), "missing `{line}` in\n{text}");
    }
    assert!(text.contains("error_budget"));
}

#[test]
fn build_rejects_bad_input() {
    let dir = Scratch::new("bad");
    let bowtie = dir.file("bowtie.txt", "vertices 4\n0 0\n1 1\n1 0\n0 1\nfaces 1\n0 1 2 3\n");
    assert_eq!(ptloc(&["build", &bowtie, &dir.path("x.idx")]).status.code(), Some(1));
    let nan = dir.file("nan.txt", "vertices 3\n0 0\nnan 1\n1 1\nfaces 1\n0 1 2\n");
    assert_eq!(ptloc(&["build", &nan, &dir.path("x.idx")]).status.code(), Some(1));
    assert_eq!(
        ptloc(&["build", &dir.path("missing.txt"), &dir.path("x.idx")])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        ptloc(&["build", &bowtie, &dir.path("x.idx"), "--word-bits", "32"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn locate_square_examples() {
    let dir = Scratch::new("locate");
    for bits in ["64", "128"] {
        let index = build_square(&dir, bits);
        let line = |x: &str, y: &str| stdout(&ptloc(&["locate", &index, x, y])).trim().to_string();
        let inside = line("0.75", "0.25");
        assert!(inside.starts_with("inside 0 "), "{inside}");
        let edge = line("0.5", "0.5");
        assert!(edge.starts_with("edge 0 0 "), "{edge}");
        assert_eq!(line("2", "2"), "outside");
        assert_eq!(line("-1", "0.5"), "outside");
    }
}

#[test]
fn batch_queries_keep_their_order() {
    let dir = Scratch::new("batch");
    let index = build_square(&dir, "64");
    let mut text = String::new();
    let mut expect = Vec::new();
    for i in 0..500 {
        let x = (i % 25) as f64 / 20.0 - 0.1;
        let y = (i / 25) as f64 / 20.0 - 0.1;
        text.push_str(&format!("{x} {y}\n"));
        expect.push(
            stdout(&ptloc(&["locate", &index, &x.to_string(), &y.to_string()]))
                .trim()
                .to_string(),
        );
    }
    let queries = dir.file("q.txt", &text);
    let out = ptloc(&["locate", &index, "--queries", &queries]);
    assert_eq!(out.status.code(), Some(0));
    let got: Vec<String> = stdout(&out).lines().map(str::to_string).collect();
    assert_eq!(got, expect);
}

#[test]
fn locate_rejects_corrupt_index_and_bad_queries() {
    let dir = Scratch::new("corrupt");
    let index = build_square(&dir, "64");
    let mut bytes = std::fs::read(&index).unwrap();
    bytes[0] ^= 0xff;
    let bad = dir.path("bad.idx");
    std::fs::write(&bad, &bytes).unwrap();
    assert_eq!(ptloc(&["locate", &bad, "0.5", "0.5"]).status.code(), Some(1));
    bytes[0] ^= 0xff;
    bytes[8] = 7;
    std::fs::write(&bad, &bytes).unwrap();
    assert_eq!(ptloc(&["locate", &bad, "0.5", "0.5"]).status.code(), Some(1));
    let q = dir.file("q.txt", "0.1 0.1\ninf 0\n");
    assert_eq!(ptloc(&["locate", &index, "--queries", &q]).status.code(), Some(1));
    assert_eq!(ptloc(&["locate", &index, "nan", "0"]).status.code(), Some(1));
}

#[test]
fn own_vertices_are_never_outside() {
    let dir = Scratch::new("roundtrip");
    let input = dir.path("gen.txt");
    assert_eq!(
        ptloc(&["generate", "200", &input, "--seed", "5"]).status.code(),
        Some(0)
    );
    let index = dir.path("gen.idx");
    assert_eq!(ptloc(&["build", &input, &index]).status.code(), Some(0));
    let text = std::fs::read_to_string(&input).unwrap();
    let n: usize = text.lines().next().unwrap()[9..].parse().unwrap();
    let verts: String = text.lines().skip(1).take(n).map(|l| format!("{l}\n")).collect();
    let q = dir.file("verts.txt", &verts);
    let out = stdout(&ptloc(&["locate", &index, "--queries", &q]));
    assert_eq!(out.lines().count(), n);
    assert!(out.lines().all(|l| l.starts_with("edge ")), "{out}");
}

fn bench(args: &[&str]) -> (Option<i32>, Vec<serde_json::Value>) {
    let mut all = vec!["bench"];
    all.extend_from_slice(args);
    let out = ptloc(&all);
    let records = stdout(&out).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    (out.status.code(), records)
}

#[test]
fn bench_reports_are_reproducible() {
    let args = ["--sizes", "16,200", "--queries", "500", "--seed", "3"];
    let a = ptloc(&[&["bench"][..], &args].concat());
    let b = ptloc(&[&["bench"][..], &args].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let (_, recs) = bench(&args);
    assert_eq!(recs.len(), 2);
    for r in &recs {
        assert_eq!(r["oracle_mismatch_count"], 0);
        assert_eq!(r["word_ops_constant"], true);
        assert!(r["queries_per_second"].is_null());
        for key in ["n", "T", "words_per_stream", "word_ops_per_query"] {
            assert!(r[key].as_u64().unwrap() > 0, "{key}");
        }
    }
}

#[test]
fn bench_ops_scale_with_words() {
    for bits in ["64", "128"] {
        let (code, recs) = bench(&["--sizes", "16,1024", "--queries", "200", "--word-bits", bits]);
        assert_eq!(code, Some(0));
        let per_word: Vec<f64> = recs
            .iter()
            .map(|r| r["word_ops_per_query"].as_f64().unwrap() / r["words_per_stream"].as_f64().unwrap())
            .collect();
        // ops per word only depend on lanes per word
        for (r, w) in recs.iter().zip(&per_word) {
            let k = r["lanes_per_word"].as_f64().unwrap();
            assert_eq!(*w, 28.0 + 2.0 * k);
        }
    }
}

#[test]
fn bench_timing_and_input_errors() {
    let (code, recs) = bench(&["--sizes", "10", "--queries", "50", "--timing"]);
    assert_eq!(code, Some(0));
    assert!(recs[0]["queries_per_second"].as_f64().unwrap() > 0.0);
    assert_eq!(bench(&["--sizes", "2"]).0, Some(1));
    assert_eq!(bench(&["--sizes", "abc"]).0, Some(1));
}

#[test]
fn help_succeeds() {
    assert_eq!(ptloc(&["--help"]).status.code(), Some(0));
    assert_eq!(ptloc(&[]).status.code(), Some(1));
}

#[test]
fn bench_without_fallback_reports_first_mismatch() {
    let out = ptloc(&[
        "bench",
        "--sizes",
        "10",
        "--queries",
        "20000",
        "--seed",
        "1",
        "--no-fallback",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("mismatch seed=1 n=10 query="), "{err}");
    let rec: serde_json::Value = serde_json::from_str(stdout(&out).lines().next().unwrap()).unwrap();
    assert!(rec["oracle_mismatch_count"].as_u64().unwrap() > 0);
}
