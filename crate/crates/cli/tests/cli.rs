//! End-to-end tests of the `graphlet` binary: subcommand behavior, file
//! formats and exit codes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_graphlet"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("spawn graphlet");
    assert!(
        out.status.success(),
        "graphlet {args:?} failed ({:?}): {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn run_code(args: &[&str]) -> (i32, String) {
    let out = bin().args(args).output().expect("spawn graphlet");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn write(path: &Path, text: &str) {
    fs::write(path, text).unwrap();
}

fn data_lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

struct Dir {
    _keep: tempfile::TempDir,
    root: PathBuf,
}

fn dir() -> Dir {
    let keep = tempfile::tempdir().unwrap();
    let root = keep.path().to_path_buf();
    Dir { _keep: keep, root }
}

#[test]
fn gen_writes_the_directed_k4_trie() {
    let d = dir();
    let out = d.root.join("d4.gt");
    run_ok(&["gen", "-k", "4", "--directed", "-o", out.to_str().unwrap()]);
    let text = fs::read_to_string(&out).unwrap();
    let counting = text
        .lines()
        .filter(|l| l.starts_with("n ") && l.split_whitespace().nth(3) == Some("c"))
        .count();
    assert_eq!(counting, 214);
    assert!(text.contains("graphlet-set 1 4 directed 214 730"));
}

#[test]
fn census_of_a_triangle_matches_the_documented_rows() {
    let d = dir();
    let net = d.root.join("tri.txt");
    write(&net, "a b\nb c\nc a\n");
    let fr = d.root.join("fr.csv");
    let freq = d.root.join("freq.csv");
    run_ok(&[
        "census", "--input", net.to_str().unwrap(), "--undirected", "-k", "3",
        "--out-fr", fr.to_str().unwrap(), "--out-freq", freq.to_str().unwrap(),
    ]);
    let rows = data_lines(&fr);
    assert_eq!(rows[0], "node,orbit0,orbit1,orbit2,orbit3");
    assert_eq!(rows[1], "a,2,0,0,1");
    assert_eq!(rows[2], "b,2,0,0,1");
    assert_eq!(rows[3], "c,2,0,0,1");

    let freqs = data_lines(&freq);
    assert_eq!(freqs[0], "graphlet_id,canonical_key,frequency");
    assert_eq!(freqs.len(), 4);
}

#[test]
fn census_with_prebuilt_trie_matches_in_memory_generation() {
    let d = dir();
    let net = d.root.join("net.txt");
    run_ok(&[
        "rand-net", "--model", "gnm", "-n", "25", "-m", "70", "--directed",
        "--seed", "5", "-o", net.to_str().unwrap(),
    ]);
    let gt = d.root.join("d3.gt");
    run_ok(&["gen", "-k", "3", "--directed", "-o", gt.to_str().unwrap()]);

    let fr_a = d.root.join("a").join("fr.csv");
    let freq_a = d.root.join("a").join("freq.csv");
    fs::create_dir(d.root.join("a")).unwrap();
    run_ok(&[
        "census", "--input", net.to_str().unwrap(), "--directed", "-k", "3",
        "--out-fr", fr_a.to_str().unwrap(), "--out-freq", freq_a.to_str().unwrap(),
    ]);

    let fr_b = d.root.join("b").join("fr.csv");
    let freq_b = d.root.join("b").join("freq.csv");
    fs::create_dir(d.root.join("b")).unwrap();
    run_ok(&[
        "census", "--input", net.to_str().unwrap(), "--directed",
        "--gtrie", gt.to_str().unwrap(),
        "--out-fr", fr_b.to_str().unwrap(), "--out-freq", freq_b.to_str().unwrap(),
    ]);

    assert_eq!(data_lines(&fr_a), data_lines(&fr_b));
    assert_eq!(data_lines(&freq_a), data_lines(&freq_b));
}

#[test]
fn oracle_census_agrees_with_the_trie_engine() {
    let d = dir();
    let net = d.root.join("net.txt");
    run_ok(&[
        "rand-net", "--model", "gnm", "-n", "20", "-m", "55", "--directed",
        "--seed", "11", "-o", net.to_str().unwrap(),
    ]);
    let fr_fast = d.root.join("fr-fast.csv");
    let fr_oracle = d.root.join("fr-oracle.csv");
    let freq = d.root.join("freq.csv");
    run_ok(&[
        "census", "--input", net.to_str().unwrap(), "--directed", "-k", "4", "--oracle",
        "--out-fr", fr_fast.to_str().unwrap(), "--out-freq", freq.to_str().unwrap(),
    ]);
    run_ok(&[
        "oracle-census", "--input", net.to_str().unwrap(), "--directed", "-k", "4",
        "--out-fr", fr_oracle.to_str().unwrap(), "--out-freq", freq.to_str().unwrap(),
    ]);
    assert_eq!(data_lines(&fr_fast), data_lines(&fr_oracle));
}

#[test]
fn compare_of_identical_networks_is_all_ones() {
    let d = dir();
    let a = d.root.join("a.txt");
    write(&a, "x y\ny z\nz x\n");
    let b = d.root.join("copy").join("a.txt");
    fs::create_dir(d.root.join("copy")).unwrap();
    write(&b, "x y\ny z\nz x\n");
    let matrix = d.root.join("m.csv");
    run_ok(&[
        "compare", "--inputs", a.to_str().unwrap(), b.to_str().unwrap(),
        "--directed", "-k", "3", "--metric", "gda",
        "--out-matrix", matrix.to_str().unwrap(),
    ]);
    let rows = data_lines(&matrix);
    // duplicate stems are disambiguated
    assert_eq!(rows[0], "id,a,a-2");
    assert_eq!(rows[1], "a,1.0000,1.0000");
    assert_eq!(rows[2], "a-2,1.0000,1.0000");
}

#[test]
fn compare_emits_newick_and_heatmap() {
    let d = dir();
    let mut inputs = Vec::new();
    for (model, seed) in [("gnm", "21"), ("reciprocal", "22"), ("dag", "23")] {
        let p = d.root.join(format!("{model}.txt"));
        run_ok(&[
            "rand-net", "--model", model, "-n", "30", "-m", "80", "--directed",
            "--seed", seed, "-o", p.to_str().unwrap(),
        ]);
        inputs.push(p);
    }
    let matrix = d.root.join("m.csv");
    let tree = d.root.join("t.nwk");
    let heat = d.root.join("h.csv");
    run_ok(&[
        "compare", "--inputs",
        inputs[0].to_str().unwrap(), inputs[1].to_str().unwrap(), inputs[2].to_str().unwrap(),
        "--directed", "-k", "3", "--metric", "gda-prime",
        "--out-matrix", matrix.to_str().unwrap(),
        "--out-newick", tree.to_str().unwrap(),
        "--out-heatmap", heat.to_str().unwrap(),
    ]);
    let nwk = fs::read_to_string(&tree).unwrap();
    let tree_line = nwk.lines().last().unwrap();
    assert!(tree_line.starts_with('(') && tree_line.ends_with(';'));
    // 3 leaf branches plus 1 internal branch; the root has no length
    assert_eq!(tree_line.matches(':').count(), 4);

    let heat_rows = data_lines(&heat);
    assert_eq!(heat_rows[0], "netA,netB,gda");
    assert_eq!(heat_rows.len(), 1 + 9);
}

#[test]
fn rand_net_is_reproducible_and_loadable() {
    let d = dir();
    let p1 = d.root.join("one").join("net.txt");
    let p2 = d.root.join("two").join("net.txt");
    fs::create_dir(d.root.join("one")).unwrap();
    fs::create_dir(d.root.join("two")).unwrap();
    for p in [&p1, &p2] {
        run_ok(&[
            "rand-net", "--model", "reciprocal", "-n", "18", "-m", "25", "--directed",
            "--seed", "33", "-o", p.to_str().unwrap(),
        ]);
    }
    assert_eq!(fs::read(&p1).unwrap(), fs::read(&p2).unwrap());
    assert!(fs::read_to_string(&p1).unwrap().contains("# seed 33"));
}

#[test]
fn usage_errors_exit_with_code_2() {
    let d = dir();
    let missing = d.root.join("missing.txt");
    let out_fr = d.root.join("fr.csv");
    let out_freq = d.root.join("freq.csv");

    // missing input file
    let (code, msg) = run_code(&[
        "census", "--input", missing.to_str().unwrap(), "--undirected", "-k", "3",
        "--out-fr", out_fr.to_str().unwrap(), "--out-freq", out_freq.to_str().unwrap(),
    ]);
    assert_eq!(code, 2, "missing file: {msg}");

    // k out of range
    let net = d.root.join("net.txt");
    write(&net, "a b\n");
    let (code, msg) = run_code(&[
        "census", "--input", net.to_str().unwrap(), "--directed", "-k", "9",
        "--out-fr", out_fr.to_str().unwrap(), "--out-freq", out_freq.to_str().unwrap(),
    ]);
    assert_eq!(code, 2, "k out of range: {msg}");

    // unknown flag (clap)
    let (code, _) = run_code(&["census", "--no-such-flag"]);
    assert_eq!(code, 2);

    // neither -k nor --gtrie
    let (code, msg) = run_code(&[
        "census", "--input", net.to_str().unwrap(), "--undirected",
        "--out-fr", out_fr.to_str().unwrap(), "--out-freq", out_freq.to_str().unwrap(),
    ]);
    assert_eq!(code, 2, "missing k: {msg}");

    // conflicting directedness flags
    let (code, _) = run_code(&[
        "census", "--input", net.to_str().unwrap(), "--directed", "--undirected", "-k", "3",
        "--out-fr", out_fr.to_str().unwrap(), "--out-freq", out_freq.to_str().unwrap(),
    ]);
    assert_eq!(code, 2);

    // undirected model restriction
    let (code, _) = run_code(&[
        "rand-net", "--model", "dag", "-n", "10", "-m", "15", "--undirected",
        "-o", d.root.join("x.txt").to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
}

#[test]
fn data_errors_exit_with_code_1() {
    let d = dir();
    let net = d.root.join("bad.txt");
    write(&net, "a b\nlonely\n");
    let out_fr = d.root.join("fr.csv");
    let out_freq = d.root.join("freq.csv");
    let (code, msg) = run_code(&[
        "census", "--input", net.to_str().unwrap(), "--undirected", "-k", "3",
        "--out-fr", out_fr.to_str().unwrap(), "--out-freq", out_freq.to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
    assert!(msg.contains("line 2"), "diagnostic names the line: {msg}");
}

#[test]
fn trie_directedness_mismatch_is_a_usage_error() {
    let d = dir();
    let gt = d.root.join("d3.gt");
    run_ok(&["gen", "-k", "3", "--directed", "-o", gt.to_str().unwrap()]);
    let net = d.root.join("net.txt");
    write(&net, "a b\nb c\n");
    let (code, msg) = run_code(&[
        "census", "--input", net.to_str().unwrap(), "--undirected",
        "--gtrie", gt.to_str().unwrap(),
        "--out-fr", d.root.join("fr.csv").to_str().unwrap(),
        "--out-freq", d.root.join("freq.csv").to_str().unwrap(),
    ]);
    assert_eq!(code, 2, "{msg}");
    assert!(msg.contains("directed"));
}

#[test]
fn self_loops_warn_but_do_not_fail() {
    let d = dir();
    let net = d.root.join("net.txt");
    write(&net, "a a\na b\n");
    let out = run_ok(&[
        "census", "--input", net.to_str().unwrap(), "--undirected", "-k", "3",
        "--out-fr", d.root.join("fr.csv").to_str().unwrap(),
        "--out-freq", d.root.join("freq.csv").to_str().unwrap(),
    ]);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("dropped 1 self-loop"), "{stderr}");
}
