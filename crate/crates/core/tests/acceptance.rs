//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::RngExt;

use common::*;
use seqspace::encoding::{audit_regularity, decode_answer, Word};
use seqspace::experiments::{
    factor, falsify_norm, verify_cord_fixed, verify_cord_invariance, CordViolation, Verdict,
};
use seqspace::functionals::{
    metric_full, metric_lower, product_metric_d, Constant, FiniteCombo, FiniteFn, Metric,
    NormCandidate, PrecisionPrefix, Projection, ProjectionAlt, ShiftedTailSum, ShiftedTailSumAlt,
    TailSum, TailSumAlt, TruncatedSup, TruncatedWeighted,
};
use seqspace::machine::{check_bound, run, Functional, SecondOrderPoly};
use seqspace::names::{SequenceName, SequenceSpec, Style};
use seqspace::numerics::Rational;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn tail_sum_cords() -> Outcome {
    let start = Instant::now();
    let styles = [Style::Standard, Style::LeftApprox, Style::Seeded(1)];
    let mut runs = 0;
    for spec in corpus() {
        for &style in &styles {
            let name = named(&spec, style);
            for n in 0..=16u32 {
                let r = run(&TailSum, &name, n).map_err(|e| e.to_string())?;
                let expected: Vec<u64> = (0..=u64::from(n) + 1).collect();
                ensure(r.trace.cord == expected, || {
                    format!("{} at n={n}: cord {:?}", name.label(), r.trace.cord)
                })?;
                runs += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!("{runs} runs, cord = {{0..n+1}} each, {elapsed:.2?}"))
}

fn tail_sum_values() -> Outcome {
    let ones = SequenceName::standard(SequenceSpec::geometric(Rational::one()));
    let zeros = SequenceName::standard(SequenceSpec::zeros());
    for n in 0..=16u32 {
        let out = run(&TailSum, &ones, n).map_err(|e| e.to_string())?.output;
        ensure(within(&out, &Rational::one(), n), || format!("ones at n={n}: {out}"))?;
        let out = run(&TailSum, &zeros, n).map_err(|e| e.to_string())?.output;
        ensure(out.is_zero(), || format!("zeros at n={n}: {out}"))?;
    }
    Ok("all-ones within 2^-n of 1, zeros exactly 0, n = 0..16".into())
}

fn factorization() -> Outcome {
    let mut rng = rng(3);
    let mut functionals: Vec<(Box<dyn Functional>, Vec<u64>)> = Vec::new();
    for i in [0u64, 3, 5, 11] {
        functionals.push((Box::new(Projection(i)), vec![i]));
    }
    let combiners = [FiniteFn::Average, FiniteFn::Sum, FiniteFn::Max, FiniteFn::Product];
    for l in 0..=4usize {
        for &c in &combiners {
            let mut coords: Vec<u64> = Vec::new();
            while coords.len() < l {
                let i = rng.random_range(0..10u64);
                if !coords.contains(&i) {
                    coords.push(i);
                }
            }
            functionals.push((Box::new(FiniteCombo::new(coords.clone(), c)), coords));
        }
    }
    let mut replays = 0;
    for (f, coords) in &functionals {
        let specs: Vec<SequenceSpec> = (0..100).map(|_| random_list(&mut rng, 12)).collect();
        let (_, report) = factor(f.as_ref(), None, &specs, 6).map_err(|e| format!("{}: {e}", f.id()))?;
        ensure(&report.coordinates == coords, || {
            format!("{}: coordinates {:?}", f.id(), report.coordinates)
        })?;
        ensure(report.equivalent(), || {
            format!("{}: {} replay mismatches", f.id(), report.mismatches.len())
        })?;
        replays += report.samples;
    }
    Ok(format!(
        "{} functionals, {replays} bit-identical replays, 0 mismatches",
        functionals.len()
    ))
}

fn cord_invariance() -> Outcome {
    // Every legal precision-0 answer for x_0 yields the same λ when |x_0| < 2.
    let specs = vec![
        SequenceSpec::zeros(),
        SequenceSpec::geometric(q("1/2")),
        SequenceSpec::geometric(q("-2/3")),
        SequenceSpec::finite_list(vec![q("3/2"), q("-5"), q("1/7"), q("12")]),
        SequenceSpec::spike(4, q("7")),
        SequenceSpec::per_index("1/(k*k + 1)").unwrap(),
    ];
    let pairs: Vec<[&dyn Functional; 2]> = vec![
        [&TailSum, &TailSumAlt],
        [&ShiftedTailSum, &ShiftedTailSumAlt],
        [&Projection(0), &ProjectionAlt(0)],
        [&Projection(3), &ProjectionAlt(3)],
    ];
    let precisions: Vec<u32> = (0..=12).collect();
    let mut runs = 0;
    for pair in &pairs {
        for spec in &specs {
            let r = verify_cord_invariance(pair, spec, &all_styles(), &precisions);
            ensure(r.passed(), || {
                format!(
                    "{} on {spec}: {} disagreements, {:?}",
                    pair[0].id(),
                    r.disagreements.len(),
                    r.failures
                )
            })?;
            runs += r.runs;
        }
    }
    Ok(format!("{runs} runs over 5 styles and dual implementations, 0 disagreements"))
}

fn fixed_cords() -> Outcome {
    let mut rng = rng(5);
    let specs: Vec<SequenceSpec> = (0..10).map(|_| random_spec(&mut rng)).collect();
    let precisions: Vec<u32> = (0..=12).collect();
    let mut bounded: Vec<Box<dyn Functional>> = vec![
        Box::new(Constant(Rational::zero())),
        Box::new(Constant(q("-3/5"))),
        Box::new(TruncatedSup(3)),
        Box::new(TruncatedWeighted(4)),
    ];
    for i in [0u64, 2, 9] {
        bounded.push(Box::new(Projection(i)));
        bounded.push(Box::new(ProjectionAlt(i)));
    }
    for c in [FiniteFn::Average, FiniteFn::Sum, FiniteFn::Max, FiniteFn::Product] {
        let f = FiniteCombo::new(vec![2, 7, 4], c);
        bounded.push(Box::new(f.alternative()));
        bounded.push(Box::new(f));
    }
    for f in &bounded {
        let r = verify_cord_fixed(f.as_ref(), &specs, &precisions);
        ensure(r.passed() && r.common_cord.is_some(), || {
            format!("{}: {:?}", f.id(), r.violations)
        })?;
    }
    let shifted_specs = vec![
        SequenceSpec::zeros(),
        SequenceSpec::spike(0, q("9")),
        SequenceSpec::geometric(q("1/2")),
    ];
    let r = verify_cord_fixed(&ShiftedTailSum, &shifted_specs, &precisions);
    let flagged = r
        .violations
        .iter()
        .any(|v| matches!(v, CordViolation::VariesAcrossInputs { .. }));
    ensure(flagged, || format!("shifted-tailsum not flagged: {:?}", r.violations))?;
    Ok(format!(
        "{} bounded functionals fixed over 10 specs, n <= 12; shifted-tailsum flagged",
        bounded.len()
    ))
}

fn falsifier() -> Outcome {
    let candidates: Vec<(Box<dyn NormCandidate>, Verdict)> = vec![
        (Box::new(TruncatedSup(3)), Verdict::HomogeneityOrDefinitenessViolated),
        (Box::new(TruncatedWeighted(5)), Verdict::HomogeneityOrDefinitenessViolated),
        (Box::new(PrecisionPrefix), Verdict::ApproximationContractViolated),
    ];
    let mut slowest = Duration::ZERO;
    for (c, expected) in &candidates {
        let start = Instant::now();
        for n in [4u32, 8, 10] {
            let ce = falsify_norm(c.as_ref(), n, 1_000_000).map_err(|e| e.to_string())?;
            ensure(ce.verdict == *expected && ce.verify(), || {
                format!("{} at n={n}: {:?}", c.id(), ce.verdict)
            })?;
            let (a1, al) = ce.observed_outputs.clone().expect("outputs present");
            let slack = pow2(1 - i64::from(n));
            ensure(a1.to_rational().abs() <= slack && al.to_rational().abs() <= slack, || {
                format!("{} at n={n}: outputs {a1}, {al} not near zero", c.id())
            })?;
            // Homogeneity would demand F(y_ℓ) = ℓ F(y_1) >= 1 for any F(y_1) >= 2^-(n+2).
            ensure(&ce.scaling_factor * &pow2(-(i64::from(n) + 2)) >= Rational::one(), || {
                "scaling factor too small".into()
            })?;
        }
        let elapsed = start.elapsed();
        slowest = slowest.max(elapsed);
        ensure(elapsed < Duration::from_secs(1), || format!("{} took {elapsed:?}", c.id()))?;
    }
    Ok(format!("3 candidates x n in {{4, 8, 10}}, slowest {slowest:.2?}"))
}

fn second_order() -> Outcome {
    let sample: SecondOrderPoly = "f(x+2) + f(f(x)*f(x)) + x*x + 4".parse().map_err(|e| format!("{e}"))?;
    let cube = |v: u64| v * v * v;
    // Hand expansion with f(x) = x³: (x+2)³ + (x³·x³)³ + x² + 4.
    let expanded = |x: u64| (x + 2).pow(3) + (x.pow(3) * x.pow(3)).pow(3) + x * x + 4;
    for x in 0..=2 {
        let v = sample.eval_u64(cube, x);
        ensure(v == BigUint::from(expanded(x)), || format!("x={x}: {v}"))?;
    }
    ensure(sample.eval_u64(cube, 1) == BigUint::from(33u32), || "x=1 is not 33".into())?;

    let mut rng = rng(7);
    let names: Vec<SequenceName> = (0..20)
        .map(|t| {
            let spec = random_spec(&mut rng);
            named(&spec, all_styles()[t % 5])
        })
        .collect();
    let precisions: Vec<u32> = (0..=12).collect();
    let p: SecondOrderPoly = "(f(x+2) + x + 2)*(f(x+2) + x + 2)".parse().map_err(|e| format!("{e}"))?;
    let pass = check_bound(&TailSum, &p, &names, &precisions);
    ensure(pass.passed(), || format!("quadratic bound violated: {:?}", pass.violations.first()))?;
    let linear: SecondOrderPoly = "x + 1".parse().map_err(|e| format!("{e}"))?;
    let fail = check_bound(&TailSum, &linear, &names, &precisions);
    let witness = fail
        .violations
        .first()
        .ok_or_else(|| "linear bound was not violated".to_string())?;
    Ok(format!(
        "sample polynomial with f = cube matches its expansion at x = 0..2; bound holds on {} runs; n+1 fails at {} n={} cost {} > {}",
        pass.checked, witness.name, witness.n, witness.cost, witness.bound
    ))
}

fn metrics() -> Outcome {
    let mut rng = rng(11);
    let n = 10u32;
    for _ in 0..50 {
        let (x, y) = (random_summable(&mut rng), random_summable(&mut rng));
        for metric in [Metric::D1, Metric::D2] {
            let full = metric_full(metric, &x, &y, n, false).map_err(|e| e.to_string())?;
            let ceiling = full.to_rational() + pow2(-(n as i64));
            let mut prev = Rational::zero();
            for m in 0..24 {
                let lower = metric_lower(metric, &x, &y, m);
                ensure(lower >= prev, || format!("{metric} not monotone at M={m} for {x}, {y}"))?;
                ensure(lower <= ceiling, || format!("{metric} lower above full for {x}, {y}"))?;
                prev = lower;
            }
        }
    }

    let pairs = [
        (SequenceSpec::zeros(), SequenceSpec::spike(3, q("10"))),
        (SequenceSpec::geometric(q("1/2")), SequenceSpec::geometric(q("-1/3"))),
        (SequenceSpec::per_index("1/(k + 1)").unwrap(), SequenceSpec::zeros()),
        (
            SequenceSpec::finite_list(vec![q("1/3"), q("5"), q("-2/7")]),
            SequenceSpec::per_index("(k*k - 3)/(k*k*k + 2)").unwrap(),
        ),
    ];
    let top = 1u64 << 14;
    for (x, y) in &pairs {
        // Prefix maxima of the exact terms up to the widest oracle window.
        let mut best = Rational::zero();
        let mut prefix_max = Vec::with_capacity(top as usize);
        for i in 0..top {
            let weight = Rational::new(1, i as i64 + 1);
            // Terms are at most 1/(i+1), so past that point the maximum is settled.
            if weight > best {
                let d = (x.value(i) - y.value(i)).abs().min(Rational::one());
                best = best.max(d * weight);
            }
            prefix_max.push(best.clone());
        }
        let (nx, ny) = (SequenceName::standard(x.clone()), SequenceName::standard(y.clone()));
        for k in 0..=10u32 {
            let oracle = &prefix_max[(1usize << (k + 4)) - 1];
            let d = product_metric_d(&nx, &ny, k);
            ensure(within(&d, oracle, k), || format!("D({x}, {y}) at k={k}: {d} vs {oracle}"))?;
        }
    }

    let e0 = SequenceSpec::spike(0, Rational::one());
    let e1 = SequenceSpec::spike(1, Rational::one());
    for m in 1..10 {
        ensure(metric_lower(Metric::D1, &e0, &e1, m) == Rational::from(2), || {
            format!("d1 spike example at M={m}")
        })?;
    }
    Ok("50 pairs monotone and below full + 2^-n; D matches 2^(k+4) window for k <= 10; d1 spikes = 2".into())
}

fn representation_contract() -> Outcome {
    let mut rng = rng(13);
    let specs = vec![
        SequenceSpec::geometric(q("-2/3")),
        SequenceSpec::per_index("(3*k - 7)/(k*k + 3)").unwrap(),
        random_list(&mut rng, 40),
    ];
    let mut checked = 0;
    for spec in &specs {
        for style in all_styles() {
            let name = named(spec, style);
            for _ in 0..10_000 {
                let i = rng.random_range(0..48u64);
                let j = rng.random_range(0..48u32);
                let w = name.answer(i, j);
                let r = decode_answer(i, &w).map_err(|e| e.to_string())?;
                ensure((r.to_rational() - spec.value(i)).abs() <= pow2(-i64::from(j)), || {
                    format!("{} at ({i}, {j}): {r}", name.label())
                })?;
                checked += 1;
            }
            let words: Vec<Word> = (0..400)
                .map(|_| {
                    let len = rng.random_range(0..22usize);
                    let mut w = Word::empty();
                    for _ in 0..len {
                        w.push(rng.random_bool(0.5));
                    }
                    w
                })
                .collect();
            audit_regularity(&name, &words).map_err(|v| format!("{}: {v:?}", name.label()))?;
        }
    }
    Ok(format!("{checked} queries within 2^-j; regularity audit passed on 15 names"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("tail sum reads exactly coordinates 0..n+1", tail_sum_cords),
        ("tail sum values on ones and zeros", tail_sum_values),
        ("bounded-query factorization", factorization),
        ("cord invariance across names and implementations", cord_invariance),
        ("bounded and fixed cords", fixed_cords),
        ("norm falsifier", falsifier),
        ("second-order polynomials and bound checks", second_order),
        ("metrics", metrics),
        ("representation contract and regularity", representation_contract),
    ];
    let mut failed = 0;
    for (k, (title, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS [{}] {title}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL [{}] {title}: {why}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
