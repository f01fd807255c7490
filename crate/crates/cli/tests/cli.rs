use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use holefill::io::{InstanceFile, SolutionFile};
use holefill::verify::{self, VerifyOptions};
use holefill::{corpus, BoundaryMapping64};
use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holefill")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on standard output")
}

struct Work {
    dir: TempDir,
}

impl Work {
    fn new() -> Self {
        Work { dir: tempfile::tempdir().unwrap() }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn s(&self, name: &str) -> String {
        self.path(name).to_str().unwrap().to_owned()
    }

    fn corpus(&self, name: &str) -> String {
        let bm = corpus::by_name::<f64>(name).unwrap();
        let file = format!("{name}.json");
        fs::write(self.path(&file), InstanceFile::from_mapping(&bm).to_json()).unwrap();
        self.s(&file)
    }

    fn solve(&self, name: &str, extra: &[&str]) -> (String, SolutionFile) {
        let inst = self.corpus(name);
        let sol = self.s(&format!("{name}.sol.json"));
        let mut args = vec!["solve", &inst, "-o", &sol];
        args.extend_from_slice(extra);
        let out = run(&args);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let file = SolutionFile::parse(&fs::read_to_string(&sol).unwrap()).unwrap();
        (sol, file)
    }
}

#[test]
fn validate_exit_codes() {
    let w = Work::new();
    assert_eq!(code(&run(&["validate", &w.corpus("identity")])), 0);

    let mut scaled = InstanceFile::from_mapping(&corpus::identity::<f64>());
    scaled.images.iter_mut().flatten().for_each(|c| *c *= 1.5);
    fs::write(w.path("scaled.json"), scaled.to_json()).unwrap();
    let out = run(&["validate", &w.s("scaled.json")]);
    assert_eq!(code(&out), 1);
    let kind = stdout_json(&out)["violation"]["kind"].as_str().unwrap().to_owned();
    assert!(kind == "ExpansivePair" || kind == "EdgeNotCritical", "{kind}");

    let text = InstanceFile::from_mapping(&corpus::fold::<f64>()).to_json();
    fs::write(w.path("trunc.json"), &text[..text.len() / 2]).unwrap();
    assert_eq!(code(&run(&["validate", &w.s("trunc.json")])), 64);
    assert_eq!(code(&run(&["validate", &w.s("missing.json")])), 64);
}

#[test]
fn solve_corpus() {
    let w = Work::new();
    let (_, fold) = w.solve("fold", &[]);
    assert_eq!(fold.trace.routine1 + fold.trace.routine2, 3);

    let (_, skew) = w.solve("skew", &["--policy", "bisector", "--branch", "+"]);
    assert!(skew.trace.routine2 >= 1);
    assert_eq!(skew.trace.branch.as_str(), "+");

    let (_, minus) = w.solve("skew", &["--branch", "-", "--audit"]);
    assert_eq!(minus.trace.branch.as_str(), "-");
}

#[test]
fn solve_rejects_invalid_and_bad_flags() {
    let w = Work::new();
    let mut scaled = InstanceFile::from_mapping(&corpus::identity::<f64>());
    scaled.images[2] = vec![2.0, 2.0];
    fs::write(w.path("bad.json"), scaled.to_json()).unwrap();
    let out = run(&["solve", &w.s("bad.json")]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout_json(&out)["status"], "invalid");

    let fold = w.corpus("fold");
    assert_eq!(code(&run(&["solve", &fold, "--policy", "bisector"])), 65);
    assert_eq!(code(&run(&["solve", &fold, "--policy", "sideways"])), 65);
    assert_eq!(code(&run(&["solve", &fold, "--bogus"])), 65);
    assert_eq!(code(&run(&["frobnicate"])), 65);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn verify_round_trip_matches_memory() {
    let w = Work::new();
    for name in ["identity", "fold", "dihedral", "skew", "corner-fold"] {
        let (sol, file) = w.solve(name, &[]);
        let out = run(&["verify", &w.s(&format!("{name}.json")), &sol, "--samples", "300", "--seed", "4"]);
        assert_eq!(code(&out), 0, "{name}: {}", String::from_utf8_lossy(&out.stdout));

        let bm: BoundaryMapping64 = corpus::by_name(name).unwrap();
        let opts = VerifyOptions { tol: None, samples: 300, seed: 4 };
        let direct = verify::verify(&bm, &file.to_mesh().unwrap(), &opts);
        assert_eq!(stdout_json(&out), serde_json::to_value(&direct).unwrap(), "{name}");
    }
}

#[test]
fn verify_failures() {
    let w = Work::new();
    let (sol, mut file) = w.solve("skew", &[]);
    let inst = w.s("skew.json");
    file.vertices_image[0][2] += 1e-3;
    fs::write(w.path("moved.json"), file.to_json()).unwrap();
    let out = run(&["verify", &inst, &w.s("moved.json")]);
    assert_eq!(code(&out), 2);
    assert_eq!(stdout_json(&out)["pass"], false);

    let text = fs::read_to_string(&sol).unwrap();
    fs::write(w.path("trunc.json"), &text[..20]).unwrap();
    assert_eq!(code(&run(&["verify", &inst, &w.s("trunc.json")])), 64);
}

#[test]
fn gen_is_deterministic_and_valid() {
    let w = Work::new();
    for (d, folds) in [("2", "2"), ("3", "4")] {
        let a = w.s(&format!("a{d}.json"));
        let b = w.s(&format!("b{d}.json"));
        for out in [&a, &b] {
            assert_eq!(code(&run(&["gen", "--folds", folds, "--d", d, "--seed", "1", "-o", out])), 0);
        }
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
        assert_eq!(code(&run(&["validate", &a])), 0);
    }
    let out = run(&["gen", "--shape", "square", "--folds", "1", "--seed", "3"]);
    assert_eq!(code(&out), 0);
    assert!(InstanceFile::parse(std::str::from_utf8(&out.stdout).unwrap()).is_ok());
    assert_eq!(code(&run(&["gen", "--shape", "blob"])), 65);
    assert_eq!(code(&run(&["gen", "--d", "1"])), 65);
}

/// Domain coordinates of every `<line class="...">` in an SVG.
fn lines(svg: &str, class: &str) -> Vec<[f64; 4]> {
    let attr = |l: &str, k: &str| -> f64 {
        let start = l.find(&format!(" {k}=\"")).unwrap() + k.len() + 3;
        l[start..].split('"').next().unwrap().parse().unwrap()
    };
    svg.lines()
        .filter(|l| l.starts_with(&format!("<line class=\"{class}\"")))
        .map(|l| [attr(l, "x1"), attr(l, "y1"), attr(l, "x2"), attr(l, "y2")])
        .collect()
}

fn render(sol: &str, out: &str, extra: &[&str]) -> i32 {
    let mut args = vec!["render", sol, "-o", out];
    args.extend_from_slice(extra);
    code(&run(&args))
}

#[test]
fn render_fold_svg_has_one_seam() {
    let w = Work::new();
    let (sol, _) = w.solve("fold", &[]);
    let svg = w.s("fold.svg");
    assert_eq!(render(&sol, &svg, &[]), 0);
    let text = fs::read_to_string(&svg).unwrap();
    let seams = lines(&text, "seam");
    assert_eq!(seams.len(), 1);
    // 5% margin on a unit square puts x = 0.5 at 0.55
    let [x1, y1, x2, y2] = seams[0];
    assert!((x1 - 0.55).abs() < 1e-9 && (x2 - 0.55).abs() < 1e-9);
    assert!((y1 - y2).abs() > 0.99);
    assert!(text.contains("class=\"reflected\"") && text.contains("class=\"preserved\""));

    assert_eq!(render(&sol, &svg, &["--style", "plain"]), 0);
    let plain = fs::read_to_string(&svg).unwrap();
    assert!(lines(&plain, "seam").is_empty());
}

#[test]
fn render_identity_svg() {
    let w = Work::new();
    let (sol, _) = w.solve("identity", &[]);
    let svg = w.s("id.svg");
    assert_eq!(render(&sol, &svg, &[]), 0);
    let text = fs::read_to_string(&svg).unwrap();
    assert_eq!(lines(&text, "mesh").len(), 1);
    assert!(lines(&text, "seam").is_empty());
    assert!(!text.contains("class=\"reflected\""));
    assert!(text.contains(r#"viewBox="0 0 1.1 1.1""#));
}

fn normal(v: &[[f64; 3]], f: &[usize; 3]) -> [f64; 3] {
    let (a, b, c) = (v[f[0]], v[f[1]], v[f[2]]);
    let (u, w) = ([b[0] - a[0], b[1] - a[1], b[2] - a[2]], [c[0] - a[0], c[1] - a[1], c[2] - a[2]]);
    let n = [u[1] * w[2] - u[2] * w[1], u[2] * w[0] - u[0] * w[2], u[0] * w[1] - u[1] * w[0]];
    let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    [n[0] / len, n[1] / len, n[2] / len]
}

#[test]
fn render_dihedral_obj() {
    let w = Work::new();
    let (sol, _) = w.solve("dihedral", &[]);
    let obj = w.s("d.obj");
    assert_eq!(render(&sol, &obj, &[]), 0);
    let text = fs::read_to_string(&obj).unwrap();
    let mut verts = Vec::new();
    let mut faces = Vec::new();
    for l in text.lines() {
        let mut it = l.split_whitespace();
        match it.next() {
            Some("v") => {
                let c: Vec<f64> = it.map(|x| x.parse().unwrap()).collect();
                verts.push([c[0], c[1], c[2]]);
            }
            Some("f") => {
                let c: Vec<usize> = it.map(|x| x.parse::<usize>().unwrap() - 1).collect();
                faces.push([c[0], c[1], c[2]]);
            }
            other => panic!("unexpected record {other:?}"),
        }
    }
    // every face lies in one of two planes, at a right angle to each other
    let normals: Vec<[f64; 3]> = faces.iter().map(|f| normal(&verts, f)).collect();
    let mut planes: Vec<[f64; 3]> = Vec::new();
    for n in &normals {
        if !planes.iter().any(|p| (p[0] * n[0] + p[1] * n[1] + p[2] * n[2]).abs() > 1.0 - 1e-9) {
            planes.push(*n);
        }
    }
    assert_eq!(planes.len(), 2);
    let dot = planes[0].iter().zip(&planes[1]).map(|(a, b)| a * b).sum::<f64>();
    assert!(dot.abs() < 1e-9);

    let (fold_sol, _) = w.solve("fold", &[]);
    assert_eq!(render(&fold_sol, &w.s("f.obj"), &[]), 65);
    assert_eq!(render(&fold_sol, &w.s("f.png"), &[]), 65);
    assert!(!Path::new(&w.s("f.obj")).exists());
}

#[test]
fn solve_output_is_byte_identical() {
    let w = Work::new();
    for name in ["identity", "fold", "dihedral", "skew", "corner-fold"] {
        let inst = w.corpus(name);
        let runs: Vec<Vec<u8>> = (0..3)
            .map(|k| {
                let out = w.s(&format!("{name}.{k}.json"));
                assert_eq!(code(&run(&["solve", &inst, "--policy", "random", "--seed", "9", "-o", &out])), 0);
                fs::read(out).unwrap()
            })
            .collect();
        assert!(runs.iter().all(|r| r == &runs[0]), "{name}");
    }
}
