//! Acceptance criteria. Each criterion prints one PASS/FAIL line; the process
//! exits nonzero if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rug::float::Constant;
use rug::{Float, Rational};

use cyclolog::arith::is_composite;
use cyclolog::dedekind::{determinant_check, nonvanishing_certificate, CertificateStatus};
use cyclolog::erdos::{bbw_function, bbw_indices, bbw_prec, erdos_function, scan, trig_sums, ScanOptions};
use cyclolog::intrel::{relation_lattice_rank, search_basis, Verdict};
use cyclolog::lseries::{decompose_l1, l1, l1_direct, Route, DIRECT_TERMS};
use cyclolog::periodic::PeriodicFunction;
use cyclolog::precision::{Real, ZeroTag};
use cyclolog::relations::{
    construct_relation, span_contains, valid_pairs, verify_relation, LogBasis, Provenance, RelationVector,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
}

// Oracles on raw MPFR floats, independent of the library's kernel.

fn f_pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

fn f_log_2sin(k: u64, q: u64, prec: u32) -> Float {
    let x = f_pi(prec) * Float::with_val(prec, k) / Float::with_val(prec, q);
    (x.sin() * 2u32).ln()
}

fn f_ln(n: u64, prec: u32) -> Float {
    Float::with_val(prec, n).ln()
}

fn f_diff_lt(a: &Float, b: &Float, exp: i32) -> bool {
    let d = Float::with_val(a.prec().max(b.prec()), a - b).abs();
    d < Float::with_val(64, Float::i_exp(1, exp))
}

fn real_to_float(x: &Real) -> Float {
    x.as_float().clone()
}

/// `Σ f(n)/n` summed in blocks of one period up to `blocks` periods, plus the
/// bound `max|A| / (blocks·q)` on the tail, `A` the partial sums within a period.
fn direct_oracle(vals: &[f64], blocks: u64) -> (f64, f64) {
    let q = vals.len() as u64;
    let mut total = 0.0;
    for b in (0..blocks).rev() {
        let mut block = 0.0;
        for (i, v) in vals.iter().enumerate() {
            block += v / (b * q + i as u64 + 1) as f64;
        }
        total += block;
    }
    let mut partial = 0.0f64;
    let mut max_a = 0.0f64;
    for v in vals {
        partial += v;
        max_a = max_a.max(partial.abs());
    }
    (total, max_a / (blocks * q) as f64 + 1e-13)
}

fn c1_quarter() -> Outcome {
    let start = Instant::now();
    let basis = LogBasis::new(4).map_err(err)?;
    let rel = RelationVector::from_integers(basis, &[2, 0, -1], Provenance::Manual).map_err(err)?;
    let class = verify_relation(&rel, 128);
    ensure(class.tag == ZeroTag::Zero, || format!("classified {}", class.tag))?;
    let p = 256;
    let oracle = f_log_2sin(1, 4, p) * 2u32 - Float::with_val(p, Constant::Log2);
    ensure(oracle.clone().abs() < Float::with_val(64, Float::i_exp(1, -240)), || format!("oracle residual {oracle}"))?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("residual 2^-{}", class.residual_bits()))
}

fn c2_sweep() -> Outcome {
    let start = Instant::now();
    let mut count = 0;
    for q in (6..=60u64).filter(|&q| is_composite(q)) {
        for (a, d) in valid_pairs(q) {
            let rel = construct_relation(q, a, d).map_err(err)?;
            ensure(!rel.is_zero(), || format!("zero vector for (q, a, d) = ({q}, {a}, {d})"))?;
            let class = verify_relation(&rel, 128);
            ensure(class.tag == ZeroTag::Zero && class.residual.abs_lt_pow2(-112), || {
                format!("({q}, {a}, {d}): {} residual {}", class.tag, class.residual.to_decimal(10))
            })?;
            count += 1;
        }
    }
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!("{count} relations"))
}

fn c3_determinants() -> Outcome {
    let start = Instant::now();
    for p in [3u64, 5, 7, 11, 13] {
        let check = determinant_check(p, 128).map_err(err)?;
        let rel = (&check.det_direct - &check.det_product).abs() / check.det_direct.abs();
        ensure(rel.abs_lt_pow2(-64), || format!("p = {p}: relative gap {}", rel.to_decimal(6)))?;
        let cert = nonvanishing_certificate(p, 128).map_err(err)?;
        ensure(cert.status == CertificateStatus::Certified, || format!("p = {p}: {}", cert.status.as_str()))?;
        ensure(cert.classes.iter().all(|c| c.tag == ZeroTag::NonZero), || format!("p = {p}: factor not NonZero"))?;
        let (chi0, s0) = &check.s_chi_values[0];
        ensure(chi0.is_trivial(), || "first factor is not the trivial character".into())?;
        let half_log = f_ln(p, 256) / 2u32;
        ensure(f_diff_lt(&real_to_float(s0.re()), &half_log, -112), || format!("p = {p}: trivial factor"))?;
    }
    within(start.elapsed(), Duration::from_secs(10))?;
    Ok("p = 3, 5, 7, 11, 13".into())
}

fn c4_p5_closed_forms() -> Outcome {
    let p = 256;
    let digits = |x: &Float| x.to_string_radix(10, Some(32));
    let phi = (Float::with_val(p, 5).sqrt() + 1u32) / 2u32;
    let neg_log_phi = -phi.ln();
    let closed = Float::with_val(p, &neg_log_phi * (f_ln(5, p) / 2u32));
    let direct = f_log_2sin(1, 5, p).square() - f_log_2sin(2, 5, p).square();
    ensure(f_diff_lt(&closed, &Float::with_val(p, direct), -200), || "closed form vs 2×2 oracle".into())?;

    let check = determinant_check(5, p).map_err(err)?;
    let s = check
        .s_chi_values
        .iter()
        .find(|(chi, _)| !chi.is_trivial())
        .map(|(_, s)| real_to_float(s.re()))
        .ok_or("no quadratic factor")?;
    let close30 = |a: &Float, b: &Float| f_diff_lt(a, b, -100);
    ensure(close30(&s, &neg_log_phi), || format!("S_quad = {} vs -log φ = {}", digits(&s), digits(&neg_log_phi)))?;
    for (name, x) in [("direct", &check.det_direct), ("product", &check.det_product)] {
        let x = real_to_float(x);
        ensure(close30(&x, &closed), || format!("det {name} = {} vs {}", digits(&x), digits(&closed)))?;
    }
    let shown = check.det_direct.to_decimal(30);
    ensure(shown.starts_with("-0.387240277581265840804741827"), || format!("det = {shown}"))?;
    Ok(format!("det = {shown}"))
}

fn random_zero_mean(rng: &mut StdRng) -> PeriodicFunction {
    let q = rng.gen_range(2..=30usize);
    let mut vals: Vec<Rational> =
        (0..q - 1).map(|_| Rational::from((rng.gen_range(-9i64..=9), rng.gen_range(1i64..=7)))).collect();
    let total = vals.iter().fold(Rational::new(), |acc, x| acc + x);
    vals.push(-total);
    PeriodicFunction::from_rationals(vals).expect("nonempty")
}

fn c5_three_routes() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x5eed_0005);
    let mut worst_direct = 0.0f64;
    for i in 0..200 {
        let f = random_zero_mean(&mut rng);
        let a = l1(&f, Route::Digamma, 128).map_err(err)?;
        let b = l1(&f, Route::Fourier, 128).map_err(err)?;
        ensure((&a - &b).abs_lt_pow2(-112), || {
            format!("case {i}: digamma {} vs fourier {}", a.to_decimal(30), b.to_decimal(30))
        })?;
        let d = l1_direct(&f, DIRECT_TERMS).map_err(err)?;
        let gap = (d.value - a.to_f64()).abs();
        worst_direct = worst_direct.max(gap);
        ensure(gap < 1e-5, || format!("case {i}: direct {} vs {}", d.value, a.to_f64()))?;
    }
    within(start.elapsed(), Duration::from_secs(120))?;
    Ok(format!("200 functions, worst direct gap {worst_direct:.1e}"))
}

/// First `n` decimal digits after the point of `x` in `(0, 1)`, by exact rounding.
fn fraction_digits(x: &Float, n: u32) -> String {
    let scaled = Float::with_val(x.prec(), x * rug::Integer::from(rug::Integer::u_pow_u(10, n)));
    let digits = scaled.to_integer().expect("finite").to_string();
    format!("{digits:0>width$}", width = n as usize)
}

fn c6_q3_value() -> Outcome {
    let p = 192;
    let oracle = f_pi(p) / (Float::with_val(p, 3).sqrt() * 3u32);
    let want = fraction_digits(&oracle, 25);
    for signs in [[1i8, -1], [-1, 1]] {
        let f = erdos_function(&signs).map_err(err)?;
        let l = l1(&f, Route::Digamma, p).map_err(err)?;
        let got = fraction_digits(&real_to_float(&l.abs()), 25);
        ensure(got == want, || format!("{signs:?}: |L| = 0.{got} vs 0.{want}"))?;
        let vals = [signs[0] as f64, signs[1] as f64, 0.0];
        let (sum, tail) = direct_oracle(&vals, 2_000_000);
        ensure((sum - l.to_f64()).abs() <= tail, || format!("{signs:?}: direct {sum} ± {tail:e} vs {}", l.to_f64()))?;
    }
    ensure(want.starts_with("6045997880780726"), || want.clone())?;
    Ok(format!("|L| = 0.{want}"))
}

fn c7_scan() -> Outcome {
    let start = Instant::now();
    let mut counts = Vec::new();
    for (q, expected) in [(3u64, 2u128), (5, 6), (7, 20), (9, 70), (11, 252), (13, 924)] {
        let report = scan(q, 192, &ScanOptions::default()).map_err(err)?;
        ensure(report.admissible_count == expected && report.records.len() as u128 == expected, || {
            format!("q = {q}: {} admissible, expected {expected}", report.admissible_count)
        })?;
        ensure(report.records.iter().all(|r| r.class == ZeroTag::NonZero), || format!("q = {q}: not all NonZero"))?;
        counts.push(expected.to_string());
    }
    within(start.elapsed(), Duration::from_secs(300))?;
    Ok(format!("counts {}", counts.join(", ")))
}

fn c8_bbw() -> Outcome {
    let mut n = 0;
    for q in [5u64, 7, 9] {
        for l in bbw_indices(q) {
            let f = bbw_function(q, l, bbw_prec(128)).map_err(err)?;
            let s = trig_sums(&f, 128).map_err(err)?;
            ensure(s.l_class.tag == ZeroTag::Zero, || format!("q = {q}, l = {l}: L {}", s.l_class.tag))?;
            ensure(s.all_trig_zero(), || format!("q = {q}, l = {l}: trig sum not Zero"))?;
            n += 1;
        }
    }
    Ok(format!("{n} kernel functions"))
}

fn c9_sign_regression() -> Outcome {
    let f = PeriodicFunction::from_integers(&[1, -1, 0]).map_err(err)?;
    let d = decompose_l1(&f, 192).map_err(err)?;
    let p = 192;
    let expected = Float::with_val(p, Float::with_val(p, 3).sqrt() * 3u32).recip();
    let pi_coeff = real_to_float(&d.pi_coeff);
    ensure(pi_coeff > 0, || format!("pi_coeff = {pi_coeff} is not positive"))?;
    ensure(f_diff_lt(&pi_coeff, &expected, -160), || format!("pi_coeff = {pi_coeff}"))?;
    let direct = l1_direct(&f, DIRECT_TERMS).map_err(err)?;
    ensure((d.value.to_f64() - direct.value).abs() <= direct.tail_bound, || {
        format!("value {} vs direct {}", d.value.to_f64(), direct.value)
    })?;
    let (oracle, tail) = direct_oracle(&[1.0, -1.0, 0.0], 2_000_000);
    ensure((d.value.to_f64() - oracle).abs() <= tail, || "value vs test oracle".into())?;
    let from_coeffs = d.evaluate(192).map_err(err)?;
    ensure((&from_coeffs - &d.value).abs_lt_pow2(-160), || "coefficients do not reproduce value".into())?;
    Ok(format!("pi_coeff = +{}", d.pi_coeff.to_decimal(12)))
}

fn c10_integer_relations() -> Outcome {
    let start = Instant::now();
    let lattice = relation_lattice_rank(8, 1000, 128).map_err(err)?;
    ensure(lattice.rank == 2, || format!("q = 8 rank {}", lattice.rank))?;
    let rows: Vec<Vec<Rational>> = lattice.generators.iter().map(|g| g.coeffs().to_vec()).collect();
    let target: Vec<Rational> = [-1, 1, -1, 0, 0].iter().map(|&x| Rational::from(x)).collect();
    ensure(span_contains(&rows, &target), || "span misses (-1, 1, -1, 0, 0)".into())?;
    let res = search_basis(&LogBasis::new(7).map_err(err)?, 1_000_000, 512).map_err(err)?;
    ensure(res.verdict == Verdict::NoneBelowBound, || format!("p = 7: {}", res.verdict.as_str()))?;
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!("q = 8 rank 2; p = 7 excluded below {:.2e}", res.excluded_bound))
}

fn c11_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_cyclolog");
    let run = |threads: &str| {
        Command::new(bin)
            .args(["scan", "--q", "9", "--no-store", "--threads", threads])
            .env_remove("CYCLOLOG_PREC")
            .output()
            .map_err(err)
    };
    let one = run("1")?;
    let eight = run("8")?;
    ensure(one.status.success() && eight.status.success(), || "scan exited nonzero".into())?;
    ensure(one.stdout == eight.stdout, || "outputs differ".into())?;
    Ok(format!("{} bytes identical", one.stdout.len()))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("q=4 dependence", c1_quarter),
        ("relation sweep, composite q in [6, 60]", c2_sweep),
        ("determinant routes and factors", c3_determinants),
        ("p=5 closed forms", c4_p5_closed_forms),
        ("three-route L(1,f) agreement", c5_three_routes),
        ("q=3 classical value", c6_q3_value),
        ("sign-vector scan q <= 13", c7_scan),
        ("kernel functions vanish", c8_bbw),
        ("decomposition sign regression", c9_sign_regression),
        ("integer-relation recovery", c10_integer_relations),
        ("scan determinism across threads", c11_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let t = start.elapsed();
        match result {
            Ok(detail) => println!("PASS  {:>2}  {name}: {detail} [{t:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  {:>2}  {name}: {why} [{t:.2?}]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
