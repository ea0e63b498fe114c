//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Run with `cargo test -p recodekit --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use recodekit::experiments::{
    bit_probabilities, compare_costs, max_complement_gap, stats, verify, Check, RunConfig,
    StatRecord, VerifyBounds,
};
use recodekit::recoding::naf_complement_weight_gap;
use recodekit::transducer::ratio;
use recodekit::{Expansion, RecodingScheme};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn within(x: f64, lo: f64, hi: f64) -> bool {
    (lo..=hi).contains(&x)
}

fn record(records: &[StatRecord], scheme: RecodingScheme, length: usize) -> &StatRecord {
    records
        .iter()
        .find(|r| r.scheme == scheme && r.length == length)
        .expect("requested combination was run")
}

fn slope(records: &[StatRecord], scheme: RecodingScheme) -> f64 {
    let short = record(records, scheme, 256);
    let long = record(records, scheme, 512);
    (long.mean_total_cost() - short.mean_total_cost()) / 256.0
}

fn multiplication_slope(records: &[StatRecord], scheme: RecodingScheme) -> f64 {
    let short = record(records, scheme, 256);
    let long = record(records, scheme, 512);
    (long.mean_multiplications - short.mean_multiplications) / 256.0
}

fn two_dimensional_run() -> (Vec<StatRecord>, Duration) {
    let start = Instant::now();
    let config = RunConfig {
        seed: 42,
        samples: 100_000,
        lengths: vec![256, 512],
        schemes: vec![RecodingScheme::Wllc, RecodingScheme::Sjsf],
        dimension: 2,
        ..Default::default()
    };
    let records = stats(&config).expect("statistics run");
    (records, start.elapsed())
}

fn criterion_1(records: &[StatRecord], elapsed: Duration) -> Outcome {
    let s = slope(records, RecodingScheme::Wllc);
    let in_range = within(s, 1.545, 1.566);
    let separated = (s - 1.304).abs() > 0.07 && (s - 1.471).abs() > 0.07;
    outcome(
        in_range && separated,
        format!(
            "complement recoding total-cost slope {s:.6} in [1.545, 1.566] (multiplications alone {:.6}); \
             distance to 1.304 {:.3}, to 1.471 {:.3}; stats for both schemes took {:.1?}",
            multiplication_slope(records, RecodingScheme::Wllc),
            (s - 1.304).abs(),
            (s - 1.471).abs(),
            elapsed
        ),
    )
}

fn criterion_2(records: &[StatRecord]) -> Outcome {
    let r = record(records, RecodingScheme::Wllc, 256);
    let ratio = r.mean_zeros / 257.0;
    outcome(
        within(ratio, 0.434, 0.455),
        format!("mean zeros / (l+1) = {ratio:.6} at l = 256 in [0.434, 0.455]"),
    )
}

fn criterion_3(records: &[StatRecord]) -> Outcome {
    let s = slope(records, RecodingScheme::Sjsf);
    let config = RunConfig {
        seed: 42,
        samples: 100_000,
        dimension: 2,
        ..Default::default()
    };
    let mut violations = 0;
    let mut compared = 0;
    let mut witness = None;
    for length in [256, 512] {
        let cmp = compare_costs(&config, length, RecodingScheme::Wllc, RecodingScheme::Sjsf)
            .expect("paired comparison");
        compared += cmp.samples;
        violations += cmp.first_cheaper;
        witness = witness.or(cmp.witness);
    }
    let mut detail = format!(
        "SJSF total-cost slope {s:.6} in [1.494, 1.506]; {compared} sampled pairs, {violations} where the complement recoding was cheaper"
    );
    if let Some(w) = witness {
        detail.push_str(&format!(" (first: {w:?})"));
    }
    outcome(within(s, 1.494, 1.506) && violations == 0, detail)
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let (max_gap, first, words) = max_complement_gap(14).expect("gap scan");
    let gap_111 = naf_complement_weight_gap(&Expansion::from_msb(&[1, 1, 1]).unwrap()).unwrap();
    let elapsed = start.elapsed();
    outcome(
        words == 32_766 && max_gap == 2 && gap_111.abs() == 2 && elapsed < Duration::from_secs(10),
        format!(
            "{words} words, max |gap| = {max_gap} (first at {first}), gap(111) = {gap_111}, {elapsed:.1?}"
        ),
    )
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let bounds = VerifyBounds {
        max_n: Some(63),
        ..Default::default()
    };
    let report = verify(Check::Thm1, &bounds).expect("thm1 suite");
    let elapsed = start.elapsed();
    outcome(
        report.passed() && report.cases == 4096 && elapsed < Duration::from_secs(60),
        format!(
            "{} oracle equalities, {} failures, {elapsed:.1?}",
            report.cases,
            report.counterexamples.len()
        ),
    )
}

fn criterion_6() -> Outcome {
    let bounds = VerifyBounds {
        max_n: Some(255),
        pairs: 10_000,
        seed: 6,
        ..Default::default()
    };
    let report = verify(Check::Sjsf, &bounds).expect("sjsf suite");
    outcome(
        report.passed() && report.cases == 256 * 256 + 10_000,
        format!(
            "{} cases (65,536 exhaustive + 10,000 random 64-bit), {} failures",
            report.cases,
            report.counterexamples.len()
        ),
    )
}

fn criterion_7() -> Outcome {
    let bounds = VerifyBounds {
        max_len: 14,
        ..Default::default()
    };
    let report = verify(Check::WllcVsNaf, &bounds).expect("wllc-vs-naf suite");
    outcome(
        report.passed() && report.cases == 32_766,
        format!(
            "{} (n, l) cases, {} where the complement recoding is lighter",
            report.cases,
            report.counterexamples.len()
        ),
    )
}

fn criterion_8() -> Outcome {
    let bounds = VerifyBounds {
        max_len: 14,
        ..Default::default()
    };
    let report = verify(Check::Transducer, &bounds).expect("transducer suite");
    let mut detail = format!(
        "{} exact checks, {} failures",
        report.cases,
        report.counterexamples.len()
    );
    if let Some(c) = report.counterexamples.first() {
        detail.push_str(&format!(" (first: {c})"));
    }
    outcome(report.passed(), detail)
}

fn criterion_9() -> Outcome {
    let bounds = VerifyBounds {
        samples: 1000,
        seed: 9,
        ..Default::default()
    };
    let report = verify(Check::CostModel, &bounds).expect("cost-model suite");
    let mut detail = format!(
        "{} random instances across binary, naf, stacked-naf, sjsf, wllc (D=2, 3); {} failures",
        report.cases,
        report.counterexamples.len()
    );
    if let Some(c) = report.counterexamples.first() {
        detail.push_str(&format!(" (first: {c})"));
    }
    outcome(report.passed() && report.cases == 6000, detail)
}

fn criterion_10() -> Outcome {
    let config = RunConfig {
        seed: 42,
        samples: 100_000,
        lengths: vec![256],
        schemes: vec![RecodingScheme::Wllc],
        dimension: 3,
        ..Default::default()
    };
    let r = &stats(&config).expect("statistics run")[0];
    let density = r.mean_weight / 257.0;
    outcome(
        within(density, 0.694, 0.714),
        format!("D = 3 mean weight / (l+1) = {density:.6} in [0.694, 0.714]"),
    )
}

fn criterion_11() -> Outcome {
    let p4 = bit_probabilities(4).expect("l = 4");
    let p2 = bit_probabilities(2).expect("l = 2");
    let e0 = p4.zero_probability(0).clone();
    let joint = p2.joint_zero_probability(0, 1).expect("pair").clone();
    let ok =
        e0 == ratio(11, 16) && e0 != ratio(3, 4) && joint == ratio(1, 2) && joint != ratio(9, 16);
    outcome(
        ok,
        format!("l = 4: P(e0=0) = {e0}; l = 2: P(e0=0 & e1=0) = {joint}"),
    )
}

fn main() -> ExitCode {
    let (records, elapsed) = two_dimensional_run();
    let criteria: Vec<(u32, Box<dyn Fn() -> Outcome + '_>)> = vec![
        (1, Box::new(|| criterion_1(&records, elapsed))),
        (2, Box::new(|| criterion_2(&records))),
        (3, Box::new(|| criterion_3(&records))),
        (4, Box::new(criterion_4)),
        (5, Box::new(criterion_5)),
        (6, Box::new(criterion_6)),
        (7, Box::new(criterion_7)),
        (8, Box::new(criterion_8)),
        (9, Box::new(criterion_9)),
        (10, Box::new(criterion_10)),
        (11, Box::new(criterion_11)),
    ];
    let mut failures = 0;
    for (id, run) in &criteria {
        let o = run();
        if !o.passed {
            failures += 1;
        }
        println!(
            "{} criterion {id}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
