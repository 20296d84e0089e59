use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rgr::bench::{gen_scene, SceneStyle};
use rgr::io::{encode_pfm, save_image, save_mask};
use rgr::{ImageSize, RgbImage};
use tempfile::TempDir;

fn rgr() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rgr"))
}

fn run(args: &[&str]) -> Output {
    rgr().args(args).output().expect("spawn rgr")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Writes a small scene image, its ground truth, and a confidence map that is
/// 0.8 on the object, 0.3 in a 3-pixel halo around it and 0 elsewhere.
struct Fixture {
    dir: TempDir,
    image: PathBuf,
    conf: PathBuf,
    gt: PathBuf,
}

fn fixture(w: usize, h: usize) -> Fixture {
    let dir = TempDir::new().unwrap();
    let size = ImageSize::new(w, h).unwrap();
    let scene = gen_scene::<f64>(size, 11, SceneStyle::Ellipse).unwrap();
    let image = dir.path().join("img.png");
    let gt = dir.path().join("gt.png");
    let conf = dir.path().join("conf.pfm");
    save_image(&scene.image, &image).unwrap();
    save_mask(&scene.gt, &gt).unwrap();
    let labels = scene.gt.labels();
    let inside = |x: i64, y: i64| {
        x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h && labels[y as usize * w + x as usize]
    };
    let scores: Vec<f32> = (0..w * h)
        .map(|i| {
            let (x, y) = ((i % w) as i64, (i / w) as i64);
            let near = (-3..=3).any(|d| inside(x + d, y) || inside(x, y + d));
            if inside(x, y) {
                0.8
            } else if near {
                0.3
            } else {
                0.0
            }
        })
        .collect();
    fs::write(&conf, encode_pfm(size, &scores)).unwrap();
    Fixture { dir, image, conf, gt }
}

fn png_size(path: &Path) -> (u32, u32) {
    let bytes = fs::read(path).unwrap();
    // IHDR follows the 8-byte signature and 8-byte chunk header.
    let w = u32::from_be_bytes(bytes[16..20].try_into().unwrap());
    let h = u32::from_be_bytes(bytes[20..24].try_into().unwrap());
    (w, h)
}

#[test]
fn refine_writes_mask_and_report() {
    let f = fixture(64, 48);
    let out = f.dir.path().join("mask.png");
    let scores = f.dir.path().join("scores.pfm");
    let report = f.dir.path().join("report.json");
    let o = run(&[
        "refine",
        p(&f.image),
        p(&f.conf),
        "-o",
        p(&out),
        "--emit-scores",
        p(&scores),
        "--report",
        p(&report),
        "--gt",
        p(&f.gt),
        "--seed-spacing",
        "4",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(png_size(&out), (64, 48));
    assert!(fs::read(&scores).unwrap().starts_with(b"Pf\n64 48\n"));
    let v: serde_json::Value = serde_json::from_slice(&fs::read(&report).unwrap()).unwrap();
    assert_eq!(v["config"]["seed_spacing"], 4.0);
    assert_eq!(v["config"]["theta_s"], 16.0);
    assert_eq!(v["config"]["roi_margin"], 8.0);
    assert!(v["iou"].as_f64().unwrap() > 0.9, "{v}");
}

#[test]
fn config_file_and_flag_override() {
    let f = fixture(48, 40);
    let cfg = f.dir.path().join("rgr.conf");
    fs::write(&cfg, "# test\ntau0=0.3\nn-s=3\nconnectivity=8\n").unwrap();
    let report = f.dir.path().join("r.json");
    let o = run(&[
        "refine",
        p(&f.image),
        p(&f.conf),
        "-o",
        p(&f.dir.path().join("m.png")),
        "--config",
        p(&cfg),
        "--n-s",
        "2",
        "--report",
        p(&report),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&fs::read(&report).unwrap()).unwrap();
    assert_eq!(v["config"]["tau0"], 0.3);
    assert_eq!(v["config"]["n_s"], 2);
    assert_eq!(v["config"]["connectivity"], 8);

    fs::write(&cfg, "nonsense=1\n").unwrap();
    let o = run(&[
        "refine",
        p(&f.image),
        p(&f.conf),
        "-o",
        p(&f.dir.path().join("m.png")),
        "--config",
        p(&cfg),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn dimension_mismatch_exits_2() {
    let f = fixture(64, 48);
    let other = fixture(48, 40);
    let o = run(&[
        "refine",
        p(&f.image),
        p(&other.conf),
        "-o",
        p(&f.dir.path().join("m.png")),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&[
        "baseline",
        p(&f.image),
        p(&other.conf),
        "-o",
        p(&f.dir.path().join("m.png")),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["refine"]).status.code(), Some(2));
    assert_eq!(run(&["bench", "--connectivity", "6"]).status.code(), Some(2));
    assert_eq!(
        run(&["bench", "--tau-f", "0.1", "--scenes", "1"]).status.code(),
        Some(2)
    );
}

#[test]
fn decode_failure_exits_3() {
    let f = fixture(32, 32);
    let junk = f.dir.path().join("junk.pfm");
    fs::write(&junk, b"Pf\nnot a header").unwrap();
    let o = run(&[
        "refine",
        p(&f.image),
        p(&junk),
        "-o",
        p(&f.dir.path().join("m.png")),
    ]);
    assert_eq!(o.status.code(), Some(3));
    let missing = f.dir.path().join("missing.png");
    let o = run(&[
        "refine",
        p(&missing),
        p(&f.conf),
        "-o",
        p(&f.dir.path().join("m.png")),
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn write_failure_exits_4() {
    let f = fixture(32, 32);
    let out = f.dir.path().join("no/such/dir/m.png");
    let o = run(&["refine", p(&f.image), p(&f.conf), "-o", p(&out)]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn fixed_seed_is_reproducible_across_threads() {
    let f = fixture(64, 48);
    let outputs: Vec<(Vec<u8>, Vec<u8>)> = [("1", "a"), ("1", "b"), ("8", "c")]
        .iter()
        .map(|(threads, tag)| {
            let mask = f.dir.path().join(format!("{tag}.png"));
            let scores = f.dir.path().join(format!("{tag}.pfm"));
            let o = run(&[
                "--threads",
                threads,
                "refine",
                p(&f.image),
                p(&f.conf),
                "-o",
                p(&mask),
                "--emit-scores",
                p(&scores),
                "--n-s",
                "1",
                "--rng-seed",
                "7",
            ]);
            assert!(o.status.success());
            (fs::read(&mask).unwrap(), fs::read(&scores).unwrap())
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);

    // Full multi-pass run, 1 vs 8 threads.
    let runs: Vec<Vec<u8>> = ["1", "8"]
        .iter()
        .map(|t| {
            let scores = f.dir.path().join(format!("ns{t}.pfm"));
            let o = run(&[
                "refine",
                p(&f.image),
                p(&f.conf),
                "-o",
                p(&f.dir.path().join("x.png")),
                "--emit-scores",
                p(&scores),
                "--threads",
                t,
            ]);
            assert!(o.status.success());
            fs::read(&scores).unwrap()
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn eval_identity_reports_perfect_scores() {
    let f = fixture(64, 48);
    let report = f.dir.path().join("eval.json");
    let o = run(&["eval", p(&f.gt), p(&f.gt), "--report", p(&report)]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&fs::read(&report).unwrap()).unwrap();
    assert_eq!(v["iou"], 1.0);
    assert_eq!(v["boundary_f"], 1.0);

    let o = run(&["eval", p(&f.gt), p(&f.gt)]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["iou"], 1.0);
}

#[test]
fn baseline_on_zero_confidence_is_empty() {
    let dir = TempDir::new().unwrap();
    let size = ImageSize::new(40, 30).unwrap();
    let img = RgbImage::from_fn(size, |x, y| [(x * 6) as u8, (y * 8) as u8, 90]);
    let image = dir.path().join("img.ppm");
    save_image(&img, &image).unwrap();
    let conf = dir.path().join("zero.pfm");
    fs::write(&conf, encode_pfm(size, &vec![0.0; size.len()])).unwrap();
    let out = dir.path().join("m.png");
    let report = dir.path().join("r.json");
    let o = run(&[
        "baseline",
        p(&image),
        p(&conf),
        "-o",
        p(&out),
        "--superpixels",
        "12",
        "--report",
        p(&report),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mask = rgr::io::load_mask::<f64>(&out).unwrap();
    assert_eq!(mask.count_foreground(), 0);
    let v: serde_json::Value = serde_json::from_slice(&fs::read(&report).unwrap()).unwrap();
    assert_eq!(v["config"]["superpixels"], 12);
}

#[test]
fn bench_csv_has_one_row_per_method_and_scene() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("b.csv");
    let json = dir.path().join("b.json");
    let o = run(&[
        "bench",
        "--scenes",
        "2",
        "--width",
        "64",
        "--height",
        "48",
        "--csv",
        p(&csv),
        "--report",
        p(&json),
        "--seed-spacing",
        "4",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("method,scene_id,iou,boundary_f,runtime_ms"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 6);
    for method in ["threshold", "sppx", "rgr"] {
        assert_eq!(
            rows.iter()
                .filter(|r| r.starts_with(&format!("{method},")))
                .count(),
            2
        );
    }
    let v: serde_json::Value = serde_json::from_slice(&fs::read(&json).unwrap()).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 6);
    assert_eq!(v["config"]["seed_spacing"], 4.0);
}
