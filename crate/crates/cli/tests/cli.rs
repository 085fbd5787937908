use std::process::Command;

use ambient_cli::{Status, VerificationReport};

fn ambient(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ambient")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

#[test]
fn g2_suite_passes() {
    let (code, text) = ambient(&["verify", "g2", "--no-timing"]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("pass                 g2.dim: 14"));
    assert!(text.contains("g2.pair.sl2"));
}

#[test]
fn i_family_with_explicit_i() {
    let (code, text) = ambient(&["verify", "i-family", "--I", "x", "--no-timing"]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("i.filtration.dims: [1,3,4,5] [1,3,4,5] [1,3,4,5]"));
    assert!(text.contains("pass                 i.ricci-flat"));
    assert!(text.contains("pass                 i.nabla-phi"));
}

#[test]
fn fq_family_flat_branch() {
    let (code, text) = ambient(&["verify", "fq-family", "--F", "q^2", "--no-timing"]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("trivial holonomy"));
}

#[test]
fn json_reports_are_byte_stable() {
    let dir = std::env::temp_dir();
    let a = dir.join(format!("ambient-a-{}.json", std::process::id()));
    let b = dir.join(format!("ambient-b-{}.json", std::process::id()));
    for p in [&a, &b] {
        let (code, _) = ambient(&["verify", "structure-equations", "--json", p.to_str().unwrap(), "--no-timing"]);
        assert_eq!(code, 0);
    }
    let (sa, sb) = (std::fs::read_to_string(&a).unwrap(), std::fs::read_to_string(&b).unwrap());
    assert_eq!(sa, sb);
    let r = VerificationReport::from_json(&sa).unwrap();
    assert_eq!(r.suite, "structure-equations");
    assert!(r.checks.windows(2).all(|w| w[0].id < w[1].id));
    assert_eq!(r.get("se.printed.d-eta3").unwrap().status, Status::RecordedDiscrepancy);
    assert_eq!(r.get("se.resolved.d-eta3").unwrap().status, Status::Pass);
    let _ = std::fs::remove_file(a);
    let _ = std::fs::remove_file(b);
}

#[test]
fn depth_and_point_options() {
    let (code, text) = ambient(&["verify", "holonomy", "--depth", "1", "--point", "x=2,t=1", "--no-timing"]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("hol.q^3.dims: [1,3]"));
}

#[test]
fn failing_input_exits_one() {
    // t = 0 is outside the ambient chart
    let (code, text) = ambient(&["verify", "holonomy", "--point", "t=0", "--no-timing"]);
    assert_eq!(code, 1, "{text}");
    assert!(text.contains("fail"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(ambient(&["verify", "nope"]).0, 2);
    assert_eq!(ambient(&["verify", "i-family", "--I", "x +"]).0, 2);
    assert_eq!(ambient(&["verify", "fq-family", "--F", "y"]).0, 2);
    assert_eq!(ambient(&["classify-pair", "--x", "1,0", "--y", "0,0,0,0,0,0,1"]).0, 2);
    assert_eq!(ambient(&["root-type", "--coeffs", "a,b,c,d,e"]).0, 2);
    assert_eq!(ambient(&[]).0, 2);
}

#[test]
fn classify_pair_and_root_type() {
    let (code, text) = ambient(&["classify-pair", "--x", "1,0,0,0,0,0,0", "--y", "0,1,0,0,0,0,0"]);
    assert_eq!(code, 0);
    assert!(text.contains("stabilizer dim 5"));
    let (code, text) = ambient(&["root-type", "--coeffs", "0,1,0,0,0"]);
    assert_eq!(code, 0);
    assert_eq!(text.trim(), "[3,1]");
}
