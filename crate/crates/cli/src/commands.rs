use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use pronil_core::coinv::{
    build_coinvariants, coinv_report, default_action, lemma23_instances, lemma23_test, CoinvReport,
};
use pronil_core::freelie::HallBasis;
use pronil_core::lamplighter::{phi_word, LampVariant};
use pronil_core::magnus::{verify_corollary_42, GroupWord};
use pronil_core::par::{map_indexed, Execution};
use pronil_core::ring::{parse_coeff, Coeff, Ring};
use pronil_core::series::TruncatedSeries;
use pronil_core::witness::{f_q_series, max_q_len, verify_witness, WitnessEngine, WitnessPair, SCHEMA_VERSION};
use pronil_core::Error;

use crate::{Command, RunConfig};

// desk-scale limits: beyond these the dense Magnus arithmetic runs out of time or memory
const MAX_IDENTITY_N: usize = 6;
const MAX_WITNESS_WEIGHT: usize = 15;
const MAX_COINV_WEIGHT: usize = 40;
const MAX_PHI_WEIGHT: usize = 4096;

#[derive(Debug)]
pub enum CliError {
    Math(String),
    Usage(String),
    Resource(String),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Math(m) => write!(f, "check failed: {m}"),
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Resource(m) => write!(f, "resource limit: {m}"),
            CliError::Io(m) => write!(f, "i/o: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Usage(_) | Error::Parse { .. } | Error::VariantMismatch(_) | Error::TruncationMismatch { .. } => {
                CliError::Usage(e.to_string())
            }
            Error::Resource(_) | Error::Truncation { .. } => CliError::Resource(e.to_string()),
            Error::NonLie { .. } | Error::Unsolvable { .. } => CliError::Math(e.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub struct Outcome {
    pub passed: bool,
}

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    if cfg.weight == Some(0) {
        return Err(CliError::Usage("K must be at least 1".into()));
    }
    match &cfg.command {
        Command::Identities { max_n } => identities(cfg, *max_n),
        Command::Construct => construct(cfg),
        Command::Verify { input } => verify(cfg, input),
        Command::Phi { word } => phi(cfg, word),
        Command::Coinv { inputs, act } => coinv(cfg, inputs, act),
        Command::Lemma23 { trials } => lemma23(cfg, *trials),
        Command::Report => report(cfg),
    }
}

fn parse_q(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| CliError::Usage(format!("q entry {t:?} is not an integer")))
        })
        .collect()
}

fn q_of(cfg: &RunConfig) -> Result<Vec<i64>> {
    match &cfg.q {
        Some(s) => parse_q(s),
        None => Err(CliError::Usage("--q is required".into())),
    }
}

fn ring_of(cfg: &RunConfig, default: Ring) -> Result<Ring> {
    match &cfg.ring {
        Some(s) => Ok(s.parse()?),
        None => Ok(default),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Writes `--out` and prints either the JSON or the summary.
fn emit<T: Serialize>(cfg: &RunConfig, report: &T, summary: &str) -> Result<()> {
    let text = to_json(report);
    if let Some(p) = &cfg.out {
        write_file(p, &text)?;
    }
    if cfg.json {
        print!("{text}");
    } else {
        println!("{summary}");
    }
    Ok(())
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

#[derive(Serialize)]
struct IdentityRow {
    n: usize,
    lie_identity: bool,
    group_congruence: bool,
}

fn identities(cfg: &RunConfig, max_n: usize) -> Result<Outcome> {
    if max_n == 0 {
        return Err(CliError::Usage("--max-n must be at least 1".into()));
    }
    if max_n > MAX_IDENTITY_N {
        return Err(CliError::Resource(format!(
            "--max-n {max_n} exceeds the supported {MAX_IDENTITY_N}"
        )));
    }
    let basis = HallBasis::new(2 * max_n + 2)?;
    let rows = map_indexed(max_n, Execution::default(), |i| -> Result<IdentityRow> {
        let n = i + 1;
        Ok(IdentityRow {
            n,
            lie_identity: basis.check_identity(n)?,
            group_congruence: verify_corollary_42(n)?,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let passed = rows.iter().all(|r| r.lie_identity && r.group_congruence);
    let summary = rows
        .iter()
        .map(|r| {
            format!(
                "n={}: lie identity {}, group congruence {}",
                r.n,
                verdict(r.lie_identity),
                verdict(r.group_congruence)
            )
        })
        .collect::<Vec<_>>()
        .join("\n");
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "identities",
        "max_n": max_n,
        "results": rows,
        "passed": passed,
    });
    emit(cfg, &report, &summary)?;
    Ok(Outcome { passed })
}

fn witness_weight(cfg: &RunConfig, q: &[i64]) -> Result<usize> {
    let k = cfg.weight.unwrap_or((2 * q.len() + 1).max(3));
    if k > MAX_WITNESS_WEIGHT {
        return Err(CliError::Resource(format!(
            "witness weight {k} exceeds the supported {MAX_WITNESS_WEIGHT}"
        )));
    }
    if q.len() > max_q_len(k) {
        return Err(CliError::Usage(format!(
            "q has {} entries but K = {k} realises at most {}",
            q.len(),
            max_q_len(k)
        )));
    }
    Ok(k)
}

fn build(cfg: &RunConfig, q: &[i64]) -> Result<WitnessPair> {
    let k = witness_weight(cfg, q)?;
    if cfg.verbose > 0 {
        eprintln!("building witness for q = {q:?} at K = {k}");
    }
    Ok(WitnessEngine::new(k)?.build(q)?)
}

fn witness_summary(w: &WitnessPair) -> String {
    let r = w.report.as_ref().is_some_and(|r| r.passed());
    format!(
        "q = {:?}, K = {}\nr = {}\ns = {}\nn = [{}]\nverify: {}",
        w.q,
        w.k,
        w.r_word(),
        w.s_word(),
        w.n.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", "),
        verdict(r)
    )
}

fn construct(cfg: &RunConfig) -> Result<Outcome> {
    let q = q_of(cfg)?;
    let w = build(cfg, &q)?;
    let passed = w.report.as_ref().is_some_and(|r| r.passed());
    // the witness itself is the report
    emit(cfg, &w, &witness_summary(&w))?;
    Ok(Outcome { passed })
}

fn verify(cfg: &RunConfig, input: &Path) -> Result<Outcome> {
    let text = fs::read_to_string(input).map_err(|e| CliError::Io(format!("{}: {e}", input.display())))?;
    let w = WitnessPair::from_json(&text)?;
    if w.k > MAX_WITNESS_WEIGHT {
        return Err(CliError::Resource(format!(
            "witness weight {} exceeds the supported {MAX_WITNESS_WEIGHT}",
            w.k
        )));
    }
    let r = verify_witness(&w);
    let passed = r.passed();
    let mut summary = format!(
        "q = {:?}, K = {}\np0 {}  p1 {}  p2 {}  p3 {}",
        w.q,
        w.k,
        verdict(r.p0),
        verdict(r.p1),
        verdict(r.p2),
        verdict(r.p3)
    );
    if let Some(f) = &r.p1_first_failure {
        summary.push_str(&format!(
            "\n[r,a][s,b] fails at step {} with weight {}",
            f.step, f.weight
        ));
    }
    if let Some(m) = &r.p3_first_failure {
        summary.push_str(&format!("\nseries: {m}"));
    }
    let stored = w.report.as_ref().map(|s| s == &r);
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "verify",
        "q": w.q,
        "K": w.k,
        "report": r,
        "stored_report_matches": stored,
        "passed": passed,
    });
    emit(cfg, &report, &summary)?;
    Ok(Outcome { passed })
}

fn phi(cfg: &RunConfig, word: &str) -> Result<Outcome> {
    let w: GroupWord = word.parse()?;
    let ring = ring_of(cfg, Ring::Integers)?;
    let k = cfg.weight.unwrap_or(8);
    if k > MAX_PHI_WEIGHT {
        return Err(CliError::Resource(format!(
            "K = {k} exceeds the supported {MAX_PHI_WEIGHT}"
        )));
    }
    let img = phi_word(&w, LampVariant::from_ring(ring), k)?;
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "phi",
        "word": w.to_string(),
        "ring": ring,
        "K": k,
        "image": img.to_json(),
        "gamma_weight": img.gamma_weight(),
    });
    emit(cfg, &report, &format!("{img}\ngamma weight {}", img.gamma_weight()))?;
    Ok(Outcome { passed: true })
}

fn coinv_inputs(cfg: &RunConfig, k: usize, inputs: &[String]) -> Result<Vec<(String, TruncatedSeries)>> {
    let mut qs: Vec<Vec<i64>> = Vec::new();
    let mut out = Vec::new();
    if let Some(s) = &cfg.q {
        qs.push(parse_q(s)?);
    }
    for item in inputs {
        if let Some(s) = item.strip_prefix("q=") {
            qs.push(parse_q(s)?);
        } else if let Some(s) = item.strip_prefix("f=") {
            let cs = s
                .split(',')
                .map(|t| parse_coeff(t.trim()))
                .collect::<pronil_core::Result<Vec<_>>>()?;
            out.push((item.clone(), TruncatedSeries::from_coeffs(Ring::Rationals, cs)?));
        } else {
            return Err(CliError::Usage(format!("input {item:?} is neither q=... nor f=...")));
        }
    }
    if qs.is_empty() && out.is_empty() && k >= 3 {
        let m = max_q_len(k).min(3);
        qs = (0..1i64 << m).map(|b| (0..m).map(|i| (b >> i) & 1).collect()).collect();
    }
    if !qs.is_empty() {
        let wk = k.clamp(3, MAX_WITNESS_WEIGHT);
        if k > MAX_WITNESS_WEIGHT {
            eprintln!("note: witnesses built at K = {wk}; higher coefficients of f_q are zero-padded");
        }
        let engine = WitnessEngine::new(wk)?;
        for q in qs {
            if q.len() > max_q_len(wk) {
                return Err(CliError::Usage(format!("q = {q:?} is too long for K = {wk}")));
            }
            let w = engine.build_unverified(&q, Execution::default())?;
            let label = format!("q={}", q.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
            out.push((label, f_q_series(&w)?));
        }
    }
    Ok(out)
}

fn coinv_space_report(
    ring: Ring,
    k: usize,
    act: &[Coeff],
    inputs: &[(String, TruncatedSeries)],
) -> Result<CoinvReport> {
    let mut acting = default_action(ring, k);
    acting.extend(act.iter().cloned());
    let space = build_coinvariants(ring, k, &acting)?;
    Ok(coinv_report(&space, inputs)?)
}

fn coinv(cfg: &RunConfig, inputs: &[String], act: &[String]) -> Result<Outcome> {
    let ring = ring_of(cfg, Ring::Rationals)?;
    let k = cfg.weight.unwrap_or(8);
    if k > MAX_COINV_WEIGHT {
        return Err(CliError::Resource(format!(
            "K = {k} exceeds the supported {MAX_COINV_WEIGHT}"
        )));
    }
    let act = act
        .iter()
        .map(|s| parse_coeff(s))
        .collect::<pronil_core::Result<Vec<_>>>()?;
    let series = coinv_inputs(cfg, k, inputs)?;
    let report = coinv_space_report(ring, k, &act, &series)?;
    let mut summary = format!(
        "ring {}, K = {}: dim Λ² = {}, relation rank {}, coinvariant rank {}, theta rank {}",
        report.ring, report.k, report.lambda2_dim, report.relation_rank, report.rank, report.theta_rank
    );
    for (a, b) in &report.equal_pairs {
        summary.push_str(&format!("\nequal classes: {a} ~ {b}"));
    }
    emit(cfg, &report, &summary)?;
    Ok(Outcome { passed: true })
}

fn lemma23(cfg: &RunConfig, trials: usize) -> Result<Outcome> {
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let reports = lemma23_instances()
        .iter()
        .map(|f| lemma23_test(f, trials, cfg.seed))
        .collect::<pronil_core::Result<Vec<_>>>()?;
    let passed = reports.iter().all(|r| r.exact && r.psi_kills_d);
    let summary = reports
        .iter()
        .map(|r| {
            format!(
                "{}: exact {} (kernel Q-dim {} vs {}), psi kills {}/{} sampled elements of D",
                r.name,
                verdict(r.exact),
                r.kernel_qdim,
                r.expected_kernel_qdim,
                r.psi_killed,
                r.psi_samples
            )
        })
        .collect::<Vec<_>>()
        .join("\n");
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "lemma23",
        "seed": cfg.seed,
        "trials": trials,
        "instances": reports,
        "passed": passed,
    });
    emit(cfg, &report, &summary)?;
    Ok(Outcome { passed })
}

fn report(cfg: &RunConfig) -> Result<Outcome> {
    let q = q_of(cfg)?;
    let w = build(cfg, &q)?;
    let passed = w.report.as_ref().is_some_and(|r| r.passed());
    let f = f_q_series(&w)?;
    let img = phi_word(&w.r_word(), LampVariant::Z, w.k)?;
    let label = format!("q={}", q.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
    let extra = ring_of(cfg, Ring::mod_p(3)?)?;
    let mut theta = BTreeMap::new();
    for ring in [Ring::Rationals, extra] {
        if ring == Ring::Integers {
            return Err(CliError::Usage("theta classes need Q or Zp:<p>".into()));
        }
        let r = coinv_space_report(ring, w.k, &[], &[(label.clone(), f.clone())])?;
        theta.insert(ring.to_string(), r);
    }
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "report",
        "q": w.q,
        "K": w.k,
        "r_factors": w.r_factors,
        "s_factors": w.s_factors,
        "n": w.n.iter().map(|n| n.to_string()).collect::<Vec<_>>(),
        "witness_report": w.report,
        "f_q": f.coeff_strings(),
        "phi_r": img.to_json(),
        "theta": theta,
        "passed": passed,
    });
    let mut summary = witness_summary(&w);
    summary.push_str(&format!("\nf_q = {f}"));
    for (ring, r) in &theta {
        let zero = r.theta_rank == 0;
        summary.push_str(&format!(
            "\ntheta over {ring}: coinvariant rank {}, class {}",
            r.rank,
            if zero { "zero" } else { "nonzero" }
        ));
    }
    emit(cfg, &report, &summary)?;
    Ok(Outcome { passed })
}
