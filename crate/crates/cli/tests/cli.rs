use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use posweight_oracle::synth::planted_collection;

const TOY: &str =
    "#DOC d1\nthe\tDT\ncat\tNN\nsat\tVBD\n#DOC d2\na\tDT\ndog\tNN\nran\tVBD\nfast\tRB\n";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_posweight"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

struct Fixture {
    _dir: tempfile::TempDir,
    root: PathBuf,
}

impl Fixture {
    fn planted() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path().to_path_buf();
        let c = planted_collection(3);
        fs::write(root.join("corpus.tagged"), c.tagged_text()).unwrap();
        fs::write(root.join("topics.tsv"), c.topics_text()).unwrap();
        fs::write(root.join("qrels.txt"), c.qrels_text()).unwrap();
        Self { _dir: dir, root }
    }

    fn path(&self, name: &str) -> String {
        self.root.join(name).to_string_lossy().into_owned()
    }

    fn common(&self) -> Vec<String> {
        vec![
            "--tagged".into(),
            self.path("corpus.tagged"),
            "--topics".into(),
            self.path("topics.tsv"),
        ]
    }

    fn with(&self, cmd: &str, extra: &[&str]) -> Output {
        let mut args = vec![cmd.to_string()];
        args.extend(self.common());
        args.extend(extra.iter().map(|s| s.to_string()));
        bin().args(&args).output().unwrap()
    }
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn toy_index_summary() {
    let dir = tempfile::tempdir().unwrap();
    let toy = write(dir.path(), "toy.tagged", TOY);
    let out = dir.path().join("ix").to_string_lossy().into_owned();
    let o = run(&["index", "--tagged", &toy, "--n", "2", "--out", &out]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("documents\t2"), "{s}");
    assert!(s.contains("terms (unique)\t7"), "{s}");
    assert!(s.contains("POS 2-grams\t3"), "{s}");

    let first = fs::read(dir.path().join("ix/index.txt")).unwrap();
    let stats = fs::read(dir.path().join("ix/posstats.txt")).unwrap();
    let o = run(&["index", "--tagged", &toy, "--n", "2", "--out", &out]);
    assert!(o.status.success());
    assert_eq!(fs::read(dir.path().join("ix/index.txt")).unwrap(), first);
    assert_eq!(fs::read(dir.path().join("ix/posstats.txt")).unwrap(), stats);
}

#[test]
fn missing_corpus_is_startup_error() {
    let o = run(&[
        "index",
        "--tagged",
        "/definitely/not/here.tagged",
        "--out",
        "/tmp/unused",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("not found"));
}

#[test]
fn unknown_model_lists_valid_models() {
    let f = Fixture::planted();
    let o = f.with("search", &["--model", "foo"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).contains("tfidf, bm25, dirichlet"),
        "{}",
        stderr(&o)
    );
    let o = f.with("search", &["--weight", "pos_nope", "--w", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("pos_ridf"));
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["search", "--n", "many"]).status.code(), Some(1));
    let h = run(&["--help"]);
    assert_eq!(h.status.code(), Some(0));
    assert!(stdout(&h).contains("sweep"));
}

#[test]
fn depth_limits_lines_per_query() {
    let f = Fixture::planted();
    let o = f.with("search", &["--model", "bm25", "--depth", "10"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let mut per_query = std::collections::HashMap::new();
    for line in stdout(&o).lines() {
        let fields: Vec<&str> = line.split(' ').collect();
        assert_eq!(fields.len(), 6, "{line}");
        *per_query.entry(fields[0].to_string()).or_insert(0) += 1;
    }
    assert_eq!(per_query.len(), 25);
    assert!(per_query.values().all(|&n| n <= 10));
}

#[test]
fn zero_w_equals_baseline_bytes() {
    let f = Fixture::planted();
    for model in ["tfidf", "bm25", "dirichlet"] {
        let base = f.with("search", &["--model", model, "--weight", "none"]);
        assert!(base.status.success());
        for weight in [
            "pos_ml_boolean",
            "pos_ml_weighted",
            "pos_idf",
            "pos_ridf",
            "pos_bs",
        ] {
            let zero = f.with(
                "search",
                &["--model", model, "--weight", weight, "--w", "0"],
            );
            assert!(zero.status.success());
            assert_eq!(zero.stdout, base.stdout, "{model} {weight}");
        }
    }
}

#[test]
fn search_then_evaluate() {
    let f = Fixture::planted();
    let run_file = f.path("bm25.run");
    let pos_file = f.path("pos.run");
    assert!(f.with("search", &["--out", &run_file]).status.success());
    assert!(f
        .with(
            "search",
            &[
                "--out",
                &pos_file,
                "--weight",
                "pos_idf",
                "--w",
                "2",
                "--run-tag",
                "pos"
            ]
        )
        .status
        .success());
    let o = run(&[
        "evaluate",
        "--run",
        &pos_file,
        "--baseline",
        &run_file,
        "--qrels",
        &f.path("qrels.txt"),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.starts_with("qid\tAP\tP10\n"));
    assert!(s.lines().any(|l| l.starts_with("all\t")));
    let map_line = s.lines().find(|l| l.starts_with("MAP\t")).unwrap();
    assert!(map_line.ends_with("**"), "{map_line}");
}

#[test]
fn sweep_reports_and_config_precedence() {
    let f = Fixture::planted();
    let cfg = write(
        &f.root,
        "exp.toml",
        "model = \"tfidf\"\nw_grid = [0, 1, 10]\nweight = [\"pos_idf\"]\n",
    );
    let out = f.path("sweep");
    let o = f.with(
        "sweep",
        &[
            "--config",
            &cfg,
            "--qrels",
            &f.path("qrels.txt"),
            "--model",
            "bm25",
            "--out",
            &out,
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let tsv = fs::read_to_string(f.root.join("sweep/sweep.tsv")).unwrap();
    let rows: Vec<&str> = tsv.lines().skip(1).collect();
    // baseline + three grid points, flag beats file for the model
    assert_eq!(rows.len(), 4, "{tsv}");
    assert!(rows.iter().all(|r| r.starts_with("bm25\t")));
    let zero = rows
        .iter()
        .find(|r| r.split('\t').nth(3) == Some("0"))
        .unwrap();
    assert_eq!(zero.split('\t').nth(5), Some("+0.00%"));
    assert!(stdout(&o).contains("baseline"));

    let o = f.with("sweep", &["--qrels", &f.path("qrels.txt"), "--w-grid", ""]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn traintest_splits() {
    let f = Fixture::planted();
    let q = f.path("qrels.txt");
    let grid = ["--w-grid", "0,1,2,5", "--weight", "pos_idf,pos_bs"];
    let mut args = vec![
        "--qrels",
        q.as_str(),
        "--train",
        "301-325",
        "--test",
        "301-325",
    ];
    args.extend(grid);
    let o = f.with("traintest", &args);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    for line in s.lines().skip(1).take_while(|l| !l.is_empty()) {
        let c: Vec<&str> = line.split('\t').collect();
        assert_eq!(c[4], c[8], "{line}");
        assert_eq!(c[5], c[9], "{line}");
    }

    let mut args = vec![
        "--qrels",
        q.as_str(),
        "--train",
        "301-315",
        "--test",
        "310-325",
    ];
    args.extend(grid);
    let o = f.with("traintest", &args);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("overlap"));

    let mut args = vec![
        "--qrels",
        q.as_str(),
        "--train",
        "301-312",
        "--test",
        "313-325",
    ];
    args.extend(grid);
    assert!(f.with("traintest", &args).status.success());
}

#[test]
fn correlate_and_export() {
    let f = Fixture::planted();
    let o = f.with("correlate", &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 6);

    let dir = tempfile::tempdir().unwrap();
    let tiny = write(dir.path(), "tiny.tagged", "#DOC a\ncat\tNN\nsat\tVBD\n");
    let o = run(&["correlate", "--tagged", &tiny, "--n", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("at least 3"));

    let out = f.path("weights");
    let o = f.with(
        "weights-export",
        &["--weight", "pos_idf,pos_bs", "--out", &out],
    );
    assert!(o.status.success());
    let text = fs::read_to_string(f.root.join("weights/pos_idf.tsv")).unwrap();
    assert!(text.starts_with("# kind=pos_idf"));
    assert!(f.root.join("weights/pos_bs.tsv").exists());
}

#[test]
fn malformed_data_is_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.tagged", "cat\tNN\n");
    let o = run(&[
        "index",
        "--tagged",
        &bad,
        "--out",
        &dir.path().join("ix").to_string_lossy(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 1"), "{}", stderr(&o));

    let unknown = write(dir.path(), "unk.tagged", "#DOC a\ncat\tZZZ\n");
    let out = dir.path().join("ix2").to_string_lossy().into_owned();
    let o = run(&["index", "--tagged", &unknown, "--out", &out]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("ZZZ"));
    let o = run(&[
        "index",
        "--tagged",
        &unknown,
        "--out",
        &out,
        "--unknown-tags",
        "error",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn raw_sgml_corpus_with_fallback_tagger() {
    let dir = tempfile::tempdir().unwrap();
    let sgml = write(
        dir.path(),
        "c.sgml",
        "<DOC><DOCNO> A1 </DOCNO><TEXT>The cat quickly jumped over the sleeping dog.</TEXT></DOC>\n\
         <DOC><DOCNO>A2</DOCNO><TEXT>A famous dog barked loudly.</TEXT></DOC>\n",
    );
    let topics = write(dir.path(), "t.tsv", "1\tdog barked\n");
    let o = run(&[
        "search", "--corpus", &sgml, "--topics", &topics, "--weight", "pos_idf", "--w", "1",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("1 Q0 A2 1 "), "{}", stdout(&o));
}
