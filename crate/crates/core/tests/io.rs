mod common;

use billiard_blocks::dynamics::closed_orbit_from_match;
use billiard_blocks::io::certificates::{parse_certificates, write_certificates};
use billiard_blocks::io::config::{parse_config, RunConfig};
use billiard_blocks::io::manifest::RunManifest;
use billiard_blocks::io::orbit_file::{parse_orbit, write_orbit};
use billiard_blocks::io::svg::{render_svg, Panel};
use billiard_blocks::io::table_file::{parse_table, write_table};
use billiard_blocks::curve::congruence_distance;
use common::*;
use proptest::prelude::*;

#[test]
fn constructed_tables_survive_a_round_trip() {
    let out = default_outcome();
    for t in [&out.table_a, &out.table_b] {
        let text = write_table(t);
        let back = parse_table(&text).unwrap();
        assert_eq!(write_table(&back), text);
        assert_eq!(back.length(), t.length());
        assert!(congruence_distance(t, &back) <= 1e-14);
    }
}

#[test]
fn certificates_survive_a_round_trip() {
    let out = default_outcome();
    let text = write_certificates(&out.certificates).unwrap();
    assert_eq!(text.lines().count(), 13);
    assert_eq!(parse_certificates(&text).unwrap(), out.certificates);
}

#[test]
fn matched_orbit_file() {
    let out = default_outcome();
    let orbit = closed_orbit_from_match(&out.table_a, out.thetas[0]).unwrap();
    let text = write_orbit(&out.table_a, &orbit);
    let parsed = parse_orbit(&text).unwrap();
    assert_eq!(parsed.period, orbit.period);
    assert_eq!(parsed.rows.len(), orbit.period);
    assert_eq!(parsed.perimeter, orbit.perimeter);
    let sum: f64 = parsed.rows.iter().map(|r| r.chord).sum();
    assert!((sum - orbit.perimeter).abs() <= 1e-12);
}

#[test]
fn shipped_config_is_valid() {
    let text = include_str!("../../../config/default.toml");
    let cfg = parse_config(text).unwrap();
    assert_eq!(cfg.construction.permutation, vec![1, 3, 2, 4]);
    assert_eq!(parse_config(&cfg.to_toml()).unwrap(), cfg);
    assert_eq!(cfg, RunConfig::default());
}

#[test]
fn manifest_lists_what_was_written() {
    let dir = tempfile::tempdir().unwrap();
    let mut m = RunManifest::new("construct", RunConfig::default());
    std::fs::write(dir.path().join("table_a.txt"), write_table(&circle())).unwrap();
    m.files.push("table_a.txt".into());
    m.timings.insert("total".into(), 0.5);
    let path = m.write(dir.path(), "manifest.toml").unwrap();
    let back = RunManifest::parse(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(back, m);
    m.files.push("missing.txt".into());
    assert!(m.write(dir.path(), "manifest.toml").is_err());
}

#[test]
fn svg_has_a_panel_per_table() {
    let out = default_outcome();
    let orbit = closed_orbit_from_match(&out.table_b, out.thetas[0]).unwrap();
    let pts: Vec<_> = orbit.states.iter().map(|s| out.table_b.point(s.s)).collect();
    let svg = render_svg(&[
        Panel { table: &out.table_a, orbit: None },
        Panel { table: &out.table_b, orbit: Some(pts) },
    ]);
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert!(svg.contains(r#"id="panel1""#) && svg.contains(r#"id="panel2""#));
    assert_eq!(svg.matches("<polygon").count(), 3);
    assert_eq!(svg.matches("<circle").count(), 8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bumped_tables_round_trip(c in 0.2f64..0.6, h in 0.05f64..0.15, amp in -0.3f64..0.3) {
        let t = oval_with(&[(c, h, amp)]);
        let text = write_table(&t);
        let back = parse_table(&text).unwrap();
        prop_assert_eq!(write_table(&back), text);
        for k in 0..16 {
            let s = t.length() * k as f64 / 16.0;
            prop_assert!((t.kappa(s) - back.kappa(s)).abs() <= 1e-15);
        }
    }
}
