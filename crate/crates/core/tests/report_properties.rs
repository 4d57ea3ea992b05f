use halq::cli::{collect_records, rank_by_profile, run_analysis, RunConfig};
use halq::corpus;
use halq::preprocess::Label;
use halq::report::{
    classify_relation, emit_csv, emit_svg, parse_csv, profile_distance, sweep, AnalysisConfig,
    AnalysisRecord, RelationClass, WindowRange,
};
use proptest::prelude::*;
use sha2::{Digest, Sha256};

fn default_run() -> RunConfig {
    RunConfig {
        pairs: [("black", "women"), ("white", "women"), ("black", "white")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect(),
        windows: WindowRange::default(),
        analysis: AnalysisConfig::default(),
    }
}

fn hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

// Also reproduced by a separate numpy implementation.
const FULL_CSV_SHA256: &str = "f93248f054903451121e476024022d156b75a5ff143643ba4e53351c7cd1bbdb";
const FULL_SVG_SHA256: &str = "78cf06c9ce916ea034338b4532c4abe5afe8f61e1d990a5978a28e6deb3e390d";

#[test]
fn full_corpus_output_is_pinned() {
    let series = run_analysis(&corpus::bundled(), &default_run()).unwrap();
    let records = collect_records(&series).unwrap();
    assert_eq!(records.len(), 22 * 3 * 7);
    let mut csv = Vec::new();
    emit_csv(&records, &mut csv).unwrap();
    assert_eq!(hex(&csv), FULL_CSV_SHA256);
    let mut svg = Vec::new();
    emit_svg(&series, &mut svg).unwrap();
    assert_eq!(hex(&svg), FULL_SVG_SHA256);
}

#[test]
fn emitted_classes_match_recomputation_from_printed_values() {
    let series = run_analysis(&corpus::bundled(), &default_run()).unwrap();
    let mut csv = Vec::new();
    emit_csv(&collect_records(&series).unwrap(), &mut csv).unwrap();
    for rec in parse_csv(csv.as_slice()).unwrap() {
        match (rec.cosine, rec.r, rec.relation) {
            (None, None, None) => {}
            (Some(_), Some(_), Some(RelationClass::Degenerate)) => assert!(rec.degenerate),
            (Some(cs), Some(r), Some(class)) => {
                assert_eq!(classify_relation(cs, r).unwrap().class, class, "{rec:?}");
            }
            _ => panic!("inconsistent row {rec:?}"),
        }
    }
}

#[test]
fn pinned_black_women_window_eleven() {
    let docs = corpus::bundled();
    let doc = corpus::find(&docs, "NH.BW-Wh.5").unwrap();
    let s = sweep(doc, "black", "women", &[11], &AnalysisConfig::default()).unwrap();
    let (cs, r) = (s.points[0].cosine().unwrap(), s.points[0].r().unwrap());
    // cs^2 = 1223236 / 2908894
    assert!((cs - 0.648471925889).abs() < 1e-11);
    assert!((r - -0.158968322668).abs() < 1e-11);
    assert_eq!(classify_relation(cs, r).unwrap().class, RelationClass::Weak);
}

#[test]
fn pinned_profile_distance() {
    let docs = corpus::bundled();
    let windows: Vec<usize> = (4..=10).collect();
    let cfg = AnalysisConfig::default();
    let p = sweep(
        corpus::find(&docs, "H.WBWh.1").unwrap(),
        "black",
        "women",
        &windows,
        &cfg,
    )
    .unwrap();
    let q = sweep(
        corpus::find(&docs, "NH.BW-Wh.5").unwrap(),
        "black",
        "women",
        &windows,
        &cfg,
    )
    .unwrap();
    let d = profile_distance(&p, &q).unwrap();
    assert!((d - 0.758854791917).abs() < 1e-9, "{d}");
    assert_eq!(profile_distance(&p, &p).unwrap(), 0.0);
}

#[test]
fn pinned_ranking_against_h_bw_wh_1() {
    let docs = corpus::bundled();
    let mut run = default_run();
    run.pairs.truncate(1);
    let reference = corpus::find(&docs, "H.BW-Wh.1").unwrap().clone();
    let ranked = rank_by_profile(&reference, &docs, &run).unwrap();
    let expected = [
        ("H.BW-Wh.1", 0.0),
        ("NH.BW-Wh.3", 0.166497),
        ("H.WBWh.2", 0.204115),
        ("NH.BW-Wh.5", 0.341650),
        ("NH.BW-Wh.1", 0.454300),
        ("H.BW-Wh.2", 0.620147),
        ("NH.BW-Wh.4", 0.629124),
        ("NH.WBWh.2", 0.725749),
        ("H.WBWh.3", 0.775960),
        ("NH.BW-Wh.2", 0.830731),
        ("NH.WBWh.1", 0.833340),
        ("H.WBWh.4", 0.837079),
        ("H.WBWh.1", 0.837193),
    ];
    for (entry, (id, d)) in ranked.iter().zip(expected) {
        assert_eq!(entry.doc_id, id);
        assert!(
            (entry.distance - d).abs() < 5e-7,
            "{id}: {}",
            entry.distance
        );
    }
    // the white:women-only documents never contain "black"
    assert_eq!(ranked.len(), 22);
    assert!(ranked[13..]
        .iter()
        .all(|e| e.distance.is_infinite() && e.doc_id.contains("WhW-B")));
}

fn quantize(x: f64) -> f64 {
    format!("{x:.6}").parse().unwrap()
}

fn record() -> impl Strategy<Value = AnalysisRecord> {
    (
        "[A-Za-z.,\" -]{1,12}",
        any::<bool>(),
        "[a-z]{1,8}",
        "[a-z]{1,8}",
        2usize..64,
        prop::option::of((0.0f64..=1.0, -1.0f64..=1.0, any::<bool>())),
    )
        .prop_map(|(doc_id, hate, stem_a, stem_b, window, values)| {
            let label = if hate { Label::Hate } else { Label::Nohate };
            let (cosine, r, degenerate, relation) = match values {
                None => (None, None, false, None),
                Some((_, _, true)) => (Some(1.0), Some(1.0), true, Some(RelationClass::Degenerate)),
                Some((cs, r, false)) => {
                    let (cs, r) = (quantize(cs), quantize(r));
                    (
                        Some(cs),
                        Some(r),
                        false,
                        Some(classify_relation(cs, r).unwrap().class),
                    )
                }
            };
            AnalysisRecord {
                doc_id,
                label,
                stem_a,
                stem_b,
                window,
                cosine,
                r,
                degenerate,
                relation,
            }
        })
}

proptest! {
    #[test]
    fn csv_round_trip(records in prop::collection::vec(record(), 0..20)) {
        let mut buf = Vec::new();
        emit_csv(&records, &mut buf).unwrap();
        let parsed = parse_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(&parsed, &records);
        let mut again = Vec::new();
        emit_csv(&parsed, &mut again).unwrap();
        prop_assert_eq!(buf, again);
    }

    #[test]
    fn classification_bands(cs in 0.0f64..=1.0, r in -1.0f64..=1.0) {
        let c = classify_relation(cs, r).unwrap();
        let expected = if cs <= 0.5 {
            RelationClass::Opposition
        } else if cs <= 0.7 {
            RelationClass::Weak
        } else {
            RelationClass::Equivalence
        };
        prop_assert_eq!(c.class, expected);
        // points on the identity curve are always consistent with their band
        let on_curve = classify_relation(cs, 2.0 * cs * cs - 1.0).unwrap();
        prop_assert!(on_curve.is_consistent(), "{cs}: {:?}", on_curve.note);
    }
}

#[test]
fn empty_inputs() {
    let mut buf = Vec::new();
    emit_csv(&[], &mut buf).unwrap();
    assert_eq!(
        String::from_utf8(buf).unwrap(),
        "doc_id,label,stem_a,stem_b,window,cosine,r,degenerate,relation_class\n"
    );
    assert!(emit_svg(&[], Vec::new()).is_err());
}
