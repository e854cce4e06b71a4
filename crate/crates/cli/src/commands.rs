use std::fmt::Write as _;

use cyclolog::characters::{character_record, enumerate_characters};
use cyclolog::dedekind::{determinant_check, nonvanishing_certificate, CertificateStatus};
use cyclolog::erdos::{
    bbw_function, bbw_indices, bbw_prec, classify_alternative, scan, trig_sums, ScanOptions, ScanStore,
};
use cyclolog::intrel::{relation_lattice_rank, search_basis};
use cyclolog::lseries::{decompose_l1, l1, l1_direct, Route, DIRECT_TERMS};
use cyclolog::periodic::PeriodicFunction;
use cyclolog::precision::{classify_zero, decimal_digits, working_prec, ZeroClass, ZeroTag};
use cyclolog::relations::{enumerate_relations, relation_record, verify_relation, LogBasis, Slot};
use cyclolog::Error;
use serde_json::{json, Map, Value};

use crate::{Command, Config};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_DIVERGENT: u8 = 2;
pub const EXIT_INCONCLUSIVE: u8 = 3;
pub const EXIT_INVARIANT: u8 = 4;

/// Result of a command: JSON lines, a text rendering, and the exit code.
pub struct Outcome {
    pub json: Vec<Value>,
    pub text: String,
    pub code: u8,
    /// Goes to stderr whatever the output mode.
    pub note: Option<String>,
}

impl Outcome {
    fn single(json: Value, text: String) -> Self {
        Outcome { json: vec![json], text, code: EXIT_OK, note: None }
    }

    fn with_code(mut self, code: u8) -> Self {
        self.code = code;
        self
    }
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Divergent { .. } => EXIT_DIVERGENT,
            Error::Inconclusive(_) => EXIT_INCONCLUSIVE,
            Error::InvariantViolation(_) => EXIT_INVARIANT,
            _ => EXIT_USAGE,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

type CmdResult = Result<Outcome, Failure>;

/// Exit code for a set of classifications where `bad` marks a violated expectation.
fn classes_code<'a>(classes: impl IntoIterator<Item = &'a ZeroClass>, bad: ZeroTag) -> u8 {
    let mut code = EXIT_OK;
    for c in classes {
        if c.tag == bad {
            return EXIT_INVARIANT;
        }
        if c.is_indeterminate() {
            code = EXIT_INCONCLUSIVE;
        }
    }
    code
}

pub fn run(cmd: &Command, cfg: &Config) -> CmdResult {
    let prec = cfg.prec;
    match cmd {
        Command::Lseries { q, f, route } => lseries(*q, f, route, prec),
        Command::Decompose { q, f } => decompose(*q, f, prec),
        Command::Relations { q } => relations(*q, prec),
        Command::Dedekind { p } => dedekind(*p, prec),
        Command::Certificate { p } => certificate(*p, prec),
        Command::Scan { q } => scan_cmd(*q, cfg),
        Command::Classify { f } => classify(f, prec),
        Command::Bbw { q, l } => bbw(*q, *l, prec),
        Command::Intrel { q, bound } => intrel(*q, *bound, prec),
        Command::Rank { q, bound } => rank(*q, *bound, prec),
        Command::Characters { q, even } => characters(*q, *even, prec),
    }
}

fn parse_function(q: Option<u64>, csv: &str) -> Result<PeriodicFunction, Failure> {
    let f = PeriodicFunction::parse_csv(csv)?;
    if let Some(q) = q {
        if f.period() != q {
            return Err(usage(format!("expected {q} values f(1), ..., f({q}), got {}", f.period())));
        }
    }
    Ok(f)
}

fn lseries(q: u64, csv: &str, route: &str, prec: u32) -> CmdResult {
    let f = parse_function(Some(q), csv)?;
    let route: Route = route.parse()?;
    f.check_convergent(prec)?;
    let digits = decimal_digits(prec);
    let wp = working_prec(prec);
    let class = classify_zero(prec, |p| l1(&f, Route::Digamma, p).expect("convergent"));
    let decomposition = decompose_l1(&f, wp)?.to_record(prec);

    let mut m = Map::new();
    m.insert("q".into(), json!(q));
    m.insert("route".into(), json!(route.to_string()));
    m.insert("convergent".into(), json!(true));
    m.insert("L_class".into(), json!(class.tag.to_string()));
    m.insert("decomposition".into(), serde_json::to_value(&decomposition).expect("record serializes"));
    m.insert("prec_bits".into(), json!(prec));
    let l_text = if route == Route::Direct {
        let d = l1_direct(&f, DIRECT_TERMS)?;
        m.insert("terms".into(), json!(d.terms));
        m.insert("tail_bound".into(), json!(format!("{:e}", d.tail_bound)));
        format!("{}", d.value)
    } else {
        l1(&f, route, wp)?.to_decimal(digits)
    };
    m.insert("L".into(), json!(l_text));

    let mut text = String::new();
    writeln!(text, "L(1, f) = {l_text}  [{route} route, {prec} bits]").unwrap();
    writeln!(text, "classification: {}", class.tag).unwrap();
    writeln!(text, "pi coefficient: {}", decomposition.pi_coeff).unwrap();
    for (b, c) in decomposition.log2sin_coeffs.iter().enumerate() {
        writeln!(text, "log(2 sin {}π/{q}) coefficient: {c}", b + 1).unwrap();
    }
    if q % 2 == 0 {
        writeln!(text, "log 2 coefficient: {}", decomposition.log2_coeff).unwrap();
    }
    Ok(Outcome::single(Value::Object(m), text))
}

fn decompose(q: u64, csv: &str, prec: u32) -> CmdResult {
    let f = parse_function(Some(q), csv)?;
    let d = decompose_l1(&f, working_prec(prec))?;
    let rec = d.to_record(prec);
    let mut text = format!("L(1, f) = {}\npi: {}\n", rec.value, rec.pi_coeff);
    for (b, c) in rec.log2sin_coeffs.iter().enumerate() {
        writeln!(text, "log(2 sin {}π/{q}): {c}", b + 1).unwrap();
    }
    if q % 2 == 0 {
        writeln!(text, "log 2: {}", rec.log2_coeff).unwrap();
    }
    Ok(Outcome::single(serde_json::to_value(&rec).expect("record serializes"), text))
}

fn basis_keys(basis: &LogBasis) -> Value {
    json!(basis.slots().iter().map(Slot::key).collect::<Vec<_>>())
}

fn relations(q: u64, prec: u32) -> CmdResult {
    let set = enumerate_relations(q)?;
    let classes: Vec<ZeroClass> = set.relations.iter().map(|r| verify_relation(r, prec)).collect();
    let records: Vec<Value> = set.relations.iter().zip(&classes).map(|(r, c)| relation_record(r, c)).collect();
    let mut m = Map::new();
    m.insert("q".into(), json!(q));
    m.insert("basis".into(), basis_keys(&set.basis));
    m.insert("rank".into(), json!(set.rank));
    m.insert("count".into(), json!(records.len()));
    m.insert("all_zero".into(), json!(classes.iter().all(ZeroClass::is_zero)));
    m.insert("relations".into(), Value::Array(records.clone()));
    m.insert("prec_bits".into(), json!(prec));

    let mut text = format!("{} relations mod {q}, rank {}\n", records.len(), set.rank);
    for r in &records {
        let coeffs = r["coeffs"].as_object().expect("coeffs object");
        let terms: Vec<String> = coeffs.iter().map(|(k, v)| format!("{}·[{k}]", v.as_str().unwrap_or("?"))).collect();
        writeln!(
            text,
            "  {} = 0  ({}, residual 2^{})",
            terms.join(" + "),
            r["class"].as_str().unwrap_or("?"),
            r["residual_bits"]
        )
        .unwrap();
    }
    let code = classes_code(&classes, ZeroTag::NonZero);
    Ok(Outcome::single(Value::Object(m), text).with_code(code))
}

fn dedekind(p: u64, prec: u32) -> CmdResult {
    let check = determinant_check(p, prec)?;
    let v = check.to_json();
    let text = format!(
        "p = {p}\ndet (direct)  = {}\ndet (product) = {}\nagree: {}\n",
        v["det_direct"].as_str().unwrap_or("?"),
        v["det_product"].as_str().unwrap_or("?"),
        check.agree
    );
    let code = if check.agree { EXIT_OK } else { EXIT_INVARIANT };
    Ok(Outcome::single(v, text).with_code(code))
}

fn certificate(p: u64, prec: u32) -> CmdResult {
    let cert = nonvanishing_certificate(p, prec)?;
    let v = cert.to_json();
    let mut text = format!("p = {p}: {}\n", cert.status.as_str());
    if let Some(factors) = v["factors"].as_array() {
        for f in factors {
            writeln!(
                text,
                "  {}: |S| = {} ({})",
                f["character"].as_str().unwrap_or("?"),
                f["abs"].as_str().unwrap_or("?"),
                f["class"].as_str().unwrap_or("?")
            )
            .unwrap();
        }
    }
    let code = match cert.status {
        CertificateStatus::Certified => EXIT_OK,
        CertificateStatus::Inconclusive => EXIT_INCONCLUSIVE,
        CertificateStatus::Failed => EXIT_INVARIANT,
    };
    Ok(Outcome::single(v, text).with_code(code))
}

fn scan_cmd(q: u64, cfg: &Config) -> CmdResult {
    let opts = ScanOptions { threads: cfg.threads, ..ScanOptions::default() };
    let report = scan(q, cfg.prec, &opts)?;
    let note = match &cfg.store {
        Some(path) if !report.records.is_empty() => {
            let out = ScanStore::new(path).record(&report)?;
            Some(format!("store {}: {} appended, {} verified", path.display(), out.appended, out.verified))
        }
        _ => None,
    };
    let summary = report.to_json(false);
    let mut json: Vec<Value> = report.records.iter().map(|r| r.to_json(q, cfg.prec)).collect();
    json.push(summary.clone());

    let mut text = format!("q = {q}: {} admissible functions\n", report.admissible_count);
    if let Some(reason) = report.reason {
        writeln!(text, "none admissible ({reason})").unwrap();
    } else {
        writeln!(text, "nonzero: {} of {}", summary["nonzero_count"], report.records.len()).unwrap();
        writeln!(
            text,
            "min |L| = {} at {:?}",
            summary["min_abs_L"].as_str().unwrap_or("?"),
            report.argmin.as_deref().unwrap_or(&[])
        )
        .unwrap();
    }
    let code =
        if report.records.iter().any(|r| r.class == ZeroTag::Indeterminate) { EXIT_INCONCLUSIVE } else { EXIT_OK };
    Ok(Outcome { json, text, code, note })
}

fn classify(csv: &str, prec: u32) -> CmdResult {
    let f = parse_function(None, csv)?;
    let verdict = classify_alternative(&f, prec)?;
    let v = verdict.to_json();
    let text = format!(
        "p = {}: {}\nL(1, f) = {} ({})\ncot sum = {} ({})\n",
        verdict.p,
        verdict.branch.as_str(),
        v["L"].as_str().unwrap_or("?"),
        verdict.l_class.tag,
        v["cot_sum"].as_str().unwrap_or("?"),
        verdict.cot_sum.tag
    );
    Ok(Outcome::single(v, text))
}

fn bbw(q: u64, l: Option<u64>, prec: u32) -> CmdResult {
    let ls = match l {
        Some(l) => vec![l],
        None => bbw_indices(q),
    };
    if ls.is_empty() {
        return Err(usage(format!("no kernel functions exist for q = {q}")));
    }
    let d = decimal_digits(prec);
    let mut kernels = Vec::new();
    let mut classes = Vec::new();
    let mut text = format!("q = {q}\n");
    for l in ls {
        let f = bbw_function(q, l, bbw_prec(prec))?;
        let s = trig_sums(&f, prec)?;
        let cos: Vec<Value> = s
            .cos_values
            .iter()
            .zip(&s.cos_classes)
            .map(|(v, c)| json!({ "value": v.to_decimal(d), "class": c.tag.to_string() }))
            .collect();
        kernels.push(json!({
            "l": l,
            "L": s.l_value.to_decimal(d),
            "L_class": s.l_class.tag.to_string(),
            "cot_sum": s.cot_value.to_decimal(d),
            "cot_class": s.cot_class.tag.to_string(),
            "cos_sums": cos,
        }));
        writeln!(
            text,
            "  l = {l}: L {} (2^{}), trig sums {}",
            s.l_class.tag,
            s.l_class.residual_bits(),
            if s.all_trig_zero() { "all Zero" } else { "not all Zero" }
        )
        .unwrap();
        classes.push(s.l_class);
        classes.push(s.cot_class);
        classes.extend(s.cos_classes);
    }
    let mut m = Map::new();
    m.insert("q".into(), json!(q));
    m.insert("all_vanish".into(), json!(classes.iter().all(ZeroClass::is_zero)));
    m.insert("kernels".into(), Value::Array(kernels));
    m.insert("prec_bits".into(), json!(prec));
    let code = classes_code(&classes, ZeroTag::NonZero);
    Ok(Outcome::single(Value::Object(m), text).with_code(code))
}

fn intrel(q: u64, bound: u64, prec: u32) -> CmdResult {
    let basis = LogBasis::new(q)?;
    let res = search_basis(&basis, bound, prec)?;
    let mut text = format!("q = {q}, bound {bound}, {prec} bits: {}\n", res.verdict.as_str());
    match &res.found {
        Some(c) => {
            writeln!(text, "relation {c:?} on {:?}", basis.slots().iter().map(Slot::key).collect::<Vec<_>>()).unwrap()
        }
        None => writeln!(text, "no relation with norm below {:e}", res.excluded_bound).unwrap(),
    }
    Ok(Outcome::single(res.to_json(), text))
}

fn rank(q: u64, bound: u64, prec: u32) -> CmdResult {
    let lattice = relation_lattice_rank(q, bound, prec)?;
    let constructed = enumerate_relations(q)?.rank;
    let mut v = lattice.to_json();
    v["constructed_rank"] = json!(constructed);
    let mut text = format!("q = {q}: rank {} (constructed relations span rank {constructed})\n", lattice.rank);
    for g in &lattice.generators {
        writeln!(text, "  {:?}", g.integer_coeffs().unwrap_or_default()).unwrap();
    }
    let code = if lattice.pi_violations.is_empty() { EXIT_OK } else { EXIT_INVARIANT };
    Ok(Outcome::single(v, text).with_code(code))
}

fn characters(q: u64, even: bool, prec: u32) -> CmdResult {
    let chars = enumerate_characters(q, even)?;
    let mut list = Vec::with_capacity(chars.len());
    let mut text = format!("{} characters mod {q}\n", chars.len());
    for chi in &chars {
        let rec = character_record(chi, prec)?;
        let mut v = serde_json::to_value(&rec).expect("record serializes");
        v["label"] = json!(chi.label());
        writeln!(text, "  {}  parity {:+}  τ = {} + {}i", chi.label(), rec.parity, rec.gauss_sum_re, rec.gauss_sum_im)
            .unwrap();
        list.push(v);
    }
    let v = json!({
        "q": q,
        "even_only": even,
        "count": list.len(),
        "characters": list,
        "prec_bits": prec,
    });
    Ok(Outcome::single(v, text))
}
