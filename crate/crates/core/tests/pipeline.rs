use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use d3f_ldp::ingest::{encode_idx_images, encode_idx_labels, MnistPaths, RawGrid, IMAGE_PIXELS};
use d3f_ldp::ldp::{read_curve_csv, CurveKind};
use d3f_ldp::pipeline::{self, Data, RunConfig};
use d3f_ldp::{Error, Hypothesis};

/// Small synthetic digit set: zeros light up the top rows, other digits a
/// band lower down, with deterministic speckle.
fn write_fake_mnist(dir: &Path, train: usize, test: usize) {
    let make = |count: usize, salt: u32| {
        let mut grids = Vec::with_capacity(count);
        let mut labels = Vec::with_capacity(count);
        for i in 0..count as u32 {
            let digit = ((i * 7 + salt) % 10) as u8;
            let mut g: RawGrid = [0; IMAGE_PIXELS];
            let mut h = i.wrapping_mul(2_654_435_761).wrapping_add(salt);
            for (p, v) in g.iter_mut().enumerate() {
                h ^= h << 13;
                h ^= h >> 17;
                h ^= h << 5;
                let row = p / 28;
                // every fourth image wears the other class's pattern
                let looks_zero = (digit == 0) != (i % 4 == 3);
                let on = if looks_zero { row < 8 } else { (10..18).contains(&row) };
                *v = if on { 120 + (h % 136) as u8 } else { (h % 90) as u8 };
            }
            grids.push(g);
            labels.push(digit);
        }
        (encode_idx_images(&grids), encode_idx_labels(&labels))
    };
    fs::create_dir_all(dir).unwrap();
    let (ti, tl) = make(train, 1);
    let (vi, vl) = make(test, 2);
    fs::write(dir.join("train-images-idx3-ubyte"), ti).unwrap();
    fs::write(dir.join("train-labels-idx1-ubyte"), tl).unwrap();
    fs::write(dir.join("t10k-images-idx3-ubyte"), vi).unwrap();
    fs::write(dir.join("t10k-labels-idx1-ubyte"), vl).unwrap();
}

fn small_config(data_dir: &Path, out: &Path) -> RunConfig {
    let mut cfg = RunConfig {
        data: MnistPaths::in_dir(data_dir),
        seeds: vec![1, 2],
        checkpoints: vec![1, 3],
        ns: vec![1, 2, 4, 8],
        trials: 4000,
        trajectory_length: 1000,
        trajectory_count: 3,
        histogram_ns: vec![1, 5],
        histogram_trials: 500,
        histogram_bins: 10,
        rate_grid: 11,
        output_dir: out.to_path_buf(),
        ..Default::default()
    };
    cfg.training.epochs = 3;
    cfg.training.batch_size = 32;
    cfg
}

fn setup() -> (tempfile::TempDir, RunConfig, Data) {
    let tmp = tempfile::tempdir().unwrap();
    let data_dir = tmp.path().join("mnist");
    write_fake_mnist(&data_dir, 600, 200);
    let cfg = small_config(&data_dir, &tmp.path().join("out"));
    let data = Data::load(&cfg.data).unwrap();
    (tmp, cfg, data)
}

fn tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(root).unwrap().to_path_buf(), fs::read(&p).unwrap());
            }
        }
    }
    out
}

#[test]
fn train_writes_one_file_per_seed_and_checkpoint() {
    let (_tmp, mut cfg, data) = setup();
    cfg.seeds = vec![1, 2, 3];
    let written = pipeline::cmd_train(&cfg, &data).unwrap();
    let models: Vec<_> = written.iter().filter(|p| p.extension().unwrap() == "json").collect();
    assert_eq!(models.len(), 6);
    let first = tree(&cfg.output_dir);
    pipeline::cmd_train(&cfg, &data).unwrap();
    assert_eq!(first, tree(&cfg.output_dir));
    let log = fs::read_to_string(cfg.output_dir.join("train_log_seed2.csv")).unwrap();
    assert_eq!(log.lines().count(), 1 + cfg.training.epochs);

    cfg.seeds.clear();
    assert!(matches!(pipeline::cmd_train(&cfg, &data), Err(Error::Config(_))));
}

#[test]
fn trajectories_follow_the_clt_band() {
    let (_tmp, cfg, data) = setup();
    let out = pipeline::cmd_trajectories(&cfg, &data).unwrap();
    let chars = pipeline::cmd_characterize(&cfg, &data).unwrap();
    for ((_, traces), c) in out.iter().zip(&chars) {
        let distinct: HashSet<_> = traces
            .iter()
            .filter(|t| t.hypothesis == Hypothesis::H0)
            .map(|t| t.scores.iter().map(|x| x.to_bits()).collect::<Vec<_>>())
            .collect();
        assert_eq!(distinct.len(), 3);
        for t in traces {
            let ch = &c.chars[t.hypothesis.index()];
            let end = *t.running_mean.last().unwrap();
            let band = 3.0 * ch.sigma / (t.scores.len() as f64).sqrt();
            assert!(
                (end - ch.mu).abs() <= band,
                "{} {end} vs {} +- {band}",
                t.hypothesis,
                ch.mu
            );
        }
    }
}

#[test]
fn curves_join_all_kinds_and_reparse() {
    let (_tmp, cfg, data) = setup();
    let out = pipeline::cmd_curves(&cfg, &data).unwrap();
    assert!(out.diagnostics.is_empty(), "{:?}", out.diagnostics);
    for k in [Hypothesis::H0, Hypothesis::H1] {
        let path = cfg.output_dir.join(format!("curves_{k}.csv"));
        let recs = read_curve_csv(fs::File::open(&path).unwrap()).unwrap();
        assert_eq!(recs, out.records[k.index()]);
        let json: Vec<d3f_ldp::ldp::CurveRecord> =
            serde_json::from_reader(fs::File::open(cfg.output_dir.join(format!("curves_{k}.json"))).unwrap()).unwrap();
        assert_eq!(json, recs);
        for &g in &out.gammas {
            for &n in &cfg.ns {
                let kinds: HashSet<_> = recs
                    .iter()
                    .filter(|r| r.gamma == g && r.n == n)
                    .map(|r| r.kind as u8)
                    .collect();
                assert_eq!(kinds.len(), 3, "gamma {g} n {n}");
            }
            let ldp: Vec<f64> = recs
                .iter()
                .filter(|r| r.gamma == g && r.kind == CurveKind::Ldp)
                .map(|r| r.value.unwrap())
                .collect();
            for w in ldp.windows(2) {
                assert!(w[1] <= w[0] && (w[1] < w[0] || w[0] == 1.0));
            }
        }
        for r in recs.iter().filter(|r| r.kind == CurveKind::Empirical) {
            assert_eq!(r.note == "low-confidence", r.events.unwrap() < 10);
        }
    }
}

#[test]
fn out_of_range_gammas_are_reported() {
    let (_tmp, mut cfg, data) = setup();
    cfg.gammas = vec![-1e6, 0.0, 1e6];
    let out = pipeline::cmd_curves(&cfg, &data).unwrap();
    assert!(out.diagnostics.iter().any(|d| d.contains("-1000000")));
    assert!(out.diagnostics.iter().any(|d| d.contains("1000000")));
    let text = fs::read_to_string(cfg.output_dir.join("curves_diagnostics.csv")).unwrap();
    assert!(text.lines().count() > 2);
}

#[test]
fn rates_are_monotone_and_single_seed_bands_are_flat() {
    let (_tmp, mut cfg, data) = setup();
    let out = pipeline::cmd_rates(&cfg, &data).unwrap();
    assert_eq!(out.bands.len(), 2 * cfg.rate_grid);
    for (_, _, pts) in &out.per_seed {
        for w in pts.windows(2) {
            assert!(w[1].i0 >= w[0].i0 && w[1].i1 <= w[0].i1, "{w:?}");
        }
    }
    assert!(out.bands.iter().any(|b| b.i0_std > 0.0));

    cfg.seeds = vec![1];
    let single = pipeline::cmd_rates(&cfg, &data).unwrap();
    assert!(single.bands.iter().all(|b| b.i0_std == 0.0 && b.i1_std == 0.0));
}

#[test]
fn full_run_is_deterministic() {
    let run = |out: &Path| {
        let (_tmp, mut cfg, data) = setup();
        cfg.output_dir = out.to_path_buf();
        pipeline::cmd_characterize(&cfg, &data).unwrap();
        pipeline::cmd_trajectories(&cfg, &data).unwrap();
        pipeline::cmd_curves(&cfg, &data).unwrap();
        pipeline::cmd_simulate(&cfg, &data).unwrap();
        pipeline::cmd_rates(&cfg, &data).unwrap();
        let mut t = tree(out);
        // the recorded config names its own temporary directories
        t.remove(Path::new("config.toml"));
        t
    };
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ta = run(a.path());
    assert_eq!(ta, run(b.path()));
    for name in [
        "characterization.csv",
        "simulate.csv",
        "histograms.csv",
        "rates.csv",
        "rates_per_seed.csv",
    ] {
        assert!(ta.contains_key(Path::new(name)), "{name}");
    }
}

#[test]
fn recorded_config_reloads() {
    let (_tmp, cfg, data) = setup();
    pipeline::cmd_characterize(&cfg, &data).unwrap();
    let back = RunConfig::from_toml_file(&cfg.output_dir.join("config.toml")).unwrap();
    assert_eq!(back, cfg);
}

#[test]
fn cli_end_to_end() {
    let tmp = tempfile::tempdir().unwrap();
    let data_dir = tmp.path().join("mnist");
    write_fake_mnist(&data_dir, 400, 100);
    let out = tmp.path().join("out");
    let bin = env!("CARGO_BIN_EXE_d3f");
    let run = |args: &[&str]| {
        Command::new(bin)
            .args(args)
            .args([
                "--out",
                out.to_str().unwrap(),
                "--epochs",
                "2",
                "--trials",
                "2000",
                "--ns",
                "1,2,4",
            ])
            .env("D3F_DATA_DIR", &data_dir)
            .env("RUST_LOG", "warn")
            .output()
            .unwrap()
    };
    for cmd in [
        "train",
        "characterize",
        "trajectories",
        "curves",
        "simulate",
        "rates",
        "oracle-check",
    ] {
        let o = run(&[cmd]);
        assert!(o.status.success(), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
    }
    for f in [
        "config.toml",
        "models/seed1_epoch2.json",
        "curves_H0.csv",
        "curves_H1.json",
        "rates.csv",
        "oracle_check.csv",
    ] {
        assert!(out.join(f).exists(), "{f}");
    }
    let o = run(&["curves", "--gammas", "-0.5,0.5", "--seeds", "1"]);
    assert!(o.status.success());

    let o = Command::new(bin)
        .args([
            "characterize",
            "--data-dir",
            tmp.path().join("nowhere").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("nowhere"));
}
