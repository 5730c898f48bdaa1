use std::process::{Command, Output};

fn pronil(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pronil")).args(args).output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn identities_exit_codes() {
    let ok = pronil(&["identities", "--max-n", "2", "--json"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["passed"], true);
    assert_eq!(pronil(&["identities", "--max-n", "0"]).status.code(), Some(2));
    let three = pronil(&["identities", "--max-n", "3"]);
    assert_eq!(three.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&three.stderr).contains("runtime"));
}

#[test]
fn construct_base_case_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.json");
    let out = pronil(&["construct", "--q", "1", "-K", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let w: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(w["r_factors"][0], "[a,b,b]");
    assert_eq!(w["s_factors"][0], "[a,b,a]^-1");
    assert_eq!(w["schema_version"], 1);
    assert_eq!(w["report"]["p1"], true);
}

#[test]
fn construct_trivial_and_weight_eleven() {
    let zero = pronil(&["construct", "--q", "0,0", "-K", "5", "--json"]);
    assert_eq!(zero.status.code(), Some(0));
    let w = json(&zero);
    assert!(w["r_factors"].as_array().unwrap().iter().all(|f| f == "1"));
    assert_eq!(
        pronil(&["construct", "--q", "1,0,1,1", "-K", "11"]).status.code(),
        Some(0)
    );
    assert_eq!(pronil(&["construct", "--q", "1,x"]).status.code(), Some(2));
    assert_eq!(pronil(&["construct", "-K", "0", "--q", "1"]).status.code(), Some(2));
}

#[test]
fn verify_round_trip_and_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.json");
    let p = path.to_str().unwrap();
    assert_eq!(
        pronil(&["construct", "--q", "1,1", "-K", "6", "--out", p])
            .status
            .code(),
        Some(0)
    );
    let ok = pronil(&["verify", p, "--json"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["stored_report_matches"], true);
    let text = std::fs::read_to_string(&path)
        .unwrap()
        .replacen("\"[a,b,b]\"", "\"[a,b,b]^-1\"", 1);
    std::fs::write(&path, text).unwrap();
    let bad = pronil(&["verify", p, "--json"]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(json(&bad)["report"]["p1"], false);
    std::fs::write(&path, "{not json").unwrap();
    assert_eq!(pronil(&["verify", p]).status.code(), Some(2));
}

#[test]
fn phi_engel_image() {
    let out = pronil(&["phi", "[a,_3 b]", "-K", "6", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["image"]["f"][3], "1/1");
    assert_eq!(v["image"]["e"], "0/1");
    assert_eq!(v["gamma_weight"], 4);
    assert_eq!(pronil(&["phi", "[a,b"]).status.code(), Some(2));
}

#[test]
fn coinv_reports() {
    let out = pronil(&["coinv", "--ring", "Q", "-K", "4", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["lambda2_dim"], 6);
    assert_eq!(pronil(&["coinv", "--ring", "Zp:2"]).status.code(), Some(2));
    assert_eq!(pronil(&["coinv", "--ring", "Z"]).status.code(), Some(2));
    let extra = pronil(&["coinv", "-K", "6", "--act", "1/2", "f=0,1", "q=1", "--json"]);
    assert_eq!(extra.status.code(), Some(0));
    let v = json(&extra);
    assert_eq!(v["acting"].as_array().unwrap().len(), 7);
    assert!(v["theta_classes"].get("q=1").is_some());
}

#[test]
fn lemma23_reports_every_instance() {
    let out = pronil(&["lemma23", "--trials", "10", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["instances"].as_array().unwrap().len(), 4);
    assert_eq!(v["instances"][3]["exact"], true);
}

#[test]
fn report_pipeline() {
    let out = pronil(&["report", "--q", "1,0,1", "-K", "7", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["f_q"][2], "1/1");
    assert_eq!(v["phi_r"]["f"], v["f_q"]);
    assert!(v["theta"].get("Q").is_some() && v["theta"].get("Zp:3").is_some());
}
