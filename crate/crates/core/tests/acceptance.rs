//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use halq::cli::{collect_records, run_analysis, RunConfig};
use halq::corpus;
use halq::hal::build_matrix;
use halq::preprocess::{preprocess, Label, PreprocessConfig, StemSeq};
use halq::query::{parse_query, select_subcorpus};
use halq::report::{sweep, AnalysisConfig, WindowRange};
use halq::semspace::{pair_geometry, Axis, Orientation};
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;
use sha2::{Digest, Sha256};

const BIN: &str = env!("CARGO_BIN_EXE_halq");
const GOLDEN: &str = include_str!("data/golden_nh_bw_wh_5_w11.csv");
const PAIRS: [(&str, &str); 3] = [("black", "women"), ("white", "women"), ("black", "white")];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn within(limit: Duration, took: Duration) -> Result<(), String> {
    if took < limit {
        Ok(())
    } else {
        Err(format!("took {took:?}, limit {limit:?}"))
    }
}

fn golden_matrix() -> Outcome {
    let start = Instant::now();
    let out = Command::new(BIN)
        .args(["matrix", "--doc", "NH.BW-Wh.5", "--window", "11"])
        .output()
        .map_err(|e| e.to_string())?;
    let took = start.elapsed();
    if !out.status.success() {
        return Err(String::from_utf8_lossy(&out.stderr).into_owned());
    }
    let got = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    let cells = |s: &str| -> Vec<String> {
        s.lines()
            .flat_map(|l| l.split(',').map(str::to_string).collect::<Vec<_>>())
            .collect()
    };
    let (want, have) = (cells(GOLDEN), cells(&got));
    if want.len() != have.len() {
        return Err(format!(
            "shape differs: {} vs {} fields",
            have.len(),
            want.len()
        ));
    }
    let header = 21 + 20;
    let wrong = want.iter().zip(&have).filter(|(a, b)| a != b).count();
    if wrong > 0 {
        return Err(format!("{wrong} fields differ"));
    }
    within(Duration::from_secs(1), took)?;
    Ok(format!("{}/400 cells, {took:.0?}", want.len() - header))
}

fn random_stems(runner: &mut TestRunner, max_len: usize) -> (Vec<String>, usize) {
    let strategy = (1usize..=6).prop_flat_map(move |alphabet| {
        (
            proptest::collection::vec(
                (0..alphabet).prop_map(|c| ((b'a' + c as u8) as char).to_string()),
                0..=max_len,
            ),
            2usize..=12,
        )
    });
    strategy.new_tree(runner).unwrap().current()
}

fn hal_oracle() -> Outcome {
    let start = Instant::now();
    let mut runner = TestRunner::deterministic();
    for case in 0..200 {
        let (stems, window) = random_stems(&mut runner, 30);
        let m = build_matrix(&StemSeq::new(stems.clone()), window).map_err(|e| e.to_string())?;
        let mut oracle: BTreeMap<(&str, &str), u64> = BTreeMap::new();
        for later in 0..stems.len() {
            for earlier in 0..=later {
                if later - earlier + 2 <= window {
                    *oracle.entry((&stems[later], &stems[earlier])).or_default() +=
                        (window - 1 - (later - earlier)) as u64;
                }
            }
        }
        for (i, a) in m.vocab().iter().enumerate() {
            for (j, b) in m.vocab().iter().enumerate() {
                let want = oracle.get(&(a.as_str(), b.as_str())).copied().unwrap_or(0);
                if m.at(i, j) != want {
                    return Err(format!(
                        "case {case}: cell ({a},{b}) = {} want {want}",
                        m.at(i, j)
                    ));
                }
            }
        }
    }
    let took = start.elapsed();
    within(Duration::from_secs(5), took)?;
    Ok(format!("200/200 documents, {took:.0?}"))
}

fn closed_form_identity() -> Outcome {
    let mut runner = TestRunner::deterministic();
    let mut cases = 0;
    let mut worst = 0.0f64;
    let mut gs_raw_y = Vec::new();
    let mut attempts = 0;
    while cases < 250 {
        attempts += 1;
        if attempts > 100_000 {
            return Err(format!("only {cases} non-degenerate cases generated"));
        }
        let (stems, window) = random_stems(&mut runner, 30);
        let vocab: Vec<String> = StemSeq::new(stems.clone())
            .vocabulary()
            .into_iter()
            .map(str::to_string)
            .collect();
        if vocab.len() < 2 {
            continue;
        }
        let m = build_matrix(&StemSeq::new(stems), window).unwrap();
        let (a, b) = (&vocab[0], &vocab[vocab.len() - 1]);
        let (Ok(oriented), Ok(raw)) = (
            pair_geometry(&m, a, b, Orientation::Oriented),
            pair_geometry(&m, a, b, Orientation::GsRaw),
        ) else {
            continue;
        };
        cases += 1;
        let id = 2.0 * oriented.cosine.powi(2) - 1.0;
        for (what, err) in [
            ("x oriented", oriented.correlation(Axis::X) - id),
            ("x gs-raw", raw.correlation(Axis::X) + id),
            ("z oriented", oriented.correlation(Axis::Z) - id),
            ("z gs-raw", raw.correlation(Axis::Z) - id),
            ("y oriented", oriented.correlation(Axis::Y) - 1.0),
        ] {
            if err.abs() > 1e-9 {
                return Err(format!("{what}: deviation {err:e}"));
            }
            worst = worst.max(err.abs());
        }
        gs_raw_y.push(raw.correlation(Axis::Y));
    }
    let y_raw = if gs_raw_y.iter().all(|r| (r + 1.0).abs() <= 1e-9) {
        "-1"
    } else {
        "mixed"
    };
    Ok(format!(
        "{cases} cases, max deviation {worst:.1e}; y checked under oriented (gs-raw y gives {y_raw})"
    ))
}

fn full_run() -> RunConfig {
    RunConfig {
        pairs: PAIRS
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect(),
        windows: WindowRange::default(),
        analysis: AnalysisConfig::default(),
    }
}

fn band_consistency() -> Outcome {
    let series = run_analysis(&corpus::bundled(), &full_run()).map_err(|e| e.to_string())?;
    let records = collect_records(&series).map_err(|e| e.to_string())?;
    let mut checked = 0;
    for rec in &records {
        let (Some(cs), Some(r)) = (rec.cosine, rec.r) else {
            continue;
        };
        checked += 1;
        if cs <= 0.5 && r > -0.5 + 1e-6 {
            return Err(format!(
                "{} {}:{} w{}: cs {cs} r {r}",
                rec.doc_id, rec.stem_a, rec.stem_b, rec.window
            ));
        }
        if cs > 0.7 && r <= -0.02 - 1e-6 {
            return Err(format!(
                "{} {}:{} w{}: cs {cs} r {r}",
                rec.doc_id, rec.stem_a, rec.stem_b, rec.window
            ));
        }
    }
    Ok(format!(
        "{checked} measured records ({} absent)",
        records.len() - checked
    ))
}

fn caption_check() -> Outcome {
    let docs = corpus::bundled();
    let cfg = AnalysisConfig::default();
    let mut passing = 0;
    let mut detail = Vec::new();
    let group: Vec<_> = docs
        .iter()
        .filter(|d| d.id.starts_with("NH.WhW-B."))
        .collect();
    if group.len() != 6 {
        return Err(format!(
            "expected 6 NH.WhW-B documents, found {}",
            group.len()
        ));
    }
    for doc in group {
        let s = sweep(doc, "white", "women", &[8, 9, 10], &cfg).map_err(|e| e.to_string())?;
        let ok = s.points.iter().all(|p| match (p.cosine(), p.r()) {
            (Some(cs), Some(r)) => cs <= 0.55 && r <= -0.4,
            _ => false,
        });
        if ok {
            passing += 1;
        } else {
            let p = &s.points[0];
            detail.push(format!(
                "{} misses (w8 cs {:.3} r {:.3})",
                doc.id,
                p.cosine().unwrap_or(f64::NAN),
                p.r().unwrap_or(f64::NAN)
            ));
        }
    }
    let msg = format!("{passing}/6 documents in band; {}", detail.join(", "));
    if passing >= 5 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn partition() -> Outcome {
    let cfg = PreprocessConfig::default();
    let docs = corpus::bundled();
    let mut got = Vec::new();
    for query in [
        "black*white*women",
        "white*women-black",
        "black*women-white",
    ] {
        let q = parse_query(query, &cfg).map_err(|e| e.to_string())?;
        let selected = select_subcorpus(&docs, &q, &cfg);
        let count = |label| selected.iter().filter(|d| d.label == label).count();
        got.push((count(Label::Hate), count(Label::Nohate)));
    }
    let want = vec![(4, 2), (3, 6), (2, 5)];
    let msg = format!("hate/non-hate per query {got:?}");
    if got == want {
        Ok(msg)
    } else {
        Err(format!("{msg}, want {want:?}"))
    }
}

fn normalization() -> Outcome {
    let cfg = PreprocessConfig::default();
    let mut runs = 0;
    let mut worst = 0.0f64;
    for doc in corpus::bundled() {
        let stems = preprocess(&doc, &cfg);
        for window in 2..=12 {
            let m = build_matrix(&stems, window).unwrap().with_doc_id(&doc.id);
            for (a, b) in PAIRS {
                for o in [Orientation::Oriented, Orientation::GsRaw] {
                    let Ok(g) = pair_geometry(&m, a, b, o) else {
                        continue;
                    };
                    runs += 1;
                    let s = g.state;
                    let from_a = s.reconstruct_from_a(&g.basis);
                    let from_b = s.reconstruct_from_b(&g.basis);
                    let lifted = g.basis.lift(s.phi);
                    let recon = from_a
                        .iter()
                        .zip(&from_b)
                        .zip(&lifted)
                        .map(|((x, y), z)| (x - y).abs().max((x - z).abs()))
                        .fold(0.0, f64::max);
                    let dev = [
                        (s.alpha.powi(2) + s.alpha_perp.powi(2) - 1.0).abs(),
                        (s.beta.powi(2) + s.beta_perp.powi(2) - 1.0).abs(),
                        recon,
                    ];
                    let d = dev.iter().copied().fold(0.0, f64::max);
                    if d > 1e-10 {
                        return Err(format!(
                            "{} {a}:{b} w{window} {o:?}: deviation {d:e}",
                            doc.id
                        ));
                    }
                    worst = worst.max(d);
                }
            }
        }
    }
    Ok(format!("{runs} runs, max deviation {worst:.1e}"))
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("halq-acceptance-{}", std::process::id()));
    let mut digests = Vec::new();
    for i in 0..2 {
        let out = dir.join(i.to_string());
        let status = Command::new(BIN)
            .args(["analyze", "--format", "both", "--out"])
            .arg(&out)
            .status()
            .map_err(|e| e.to_string())?;
        if !status.success() {
            return Err(format!("analyze exited with {status}"));
        }
        let hash = |name: &str| -> Result<Vec<u8>, String> {
            let bytes = std::fs::read(out.join(name)).map_err(|e| e.to_string())?;
            Ok(Sha256::digest(bytes).to_vec())
        };
        digests.push((hash("analysis.csv")?, hash("analysis.svg")?));
    }
    let _ = std::fs::remove_dir_all(&dir);
    if digests[0] != digests[1] {
        return Err("outputs differ between runs".into());
    }

    let start = Instant::now();
    let docs = corpus::bundled();
    let series = run_analysis(&docs, &full_run()).map_err(|e| e.to_string())?;
    let records = collect_records(&series).map_err(|e| e.to_string())?;
    let mut sink = Vec::new();
    halq::report::emit_csv(&records, &mut sink).map_err(|e| e.to_string())?;
    halq::report::emit_svg(&series, &mut sink).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    within(Duration::from_secs(2), took)?;
    Ok(format!(
        "CSV and SVG identical across runs; {} docs x {} pairs x {} windows in {took:.0?}",
        docs.len(),
        PAIRS.len(),
        WindowRange::default().len()
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("golden HAL matrix", golden_matrix),
        ("HAL oracle equivalence", hal_oracle),
        ("closed-form identity", closed_form_identity),
        ("band consistency", band_consistency),
        ("caption qualitative check", caption_check),
        ("sub-corpus partition", partition),
        ("normalization and reconstruction", normalization),
        ("determinism and runtime", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
