//! Acceptance criteria: each one runs a property suite at its stated size
//! and must finish with zero failures inside its time budget. Prints one
//! PASS/FAIL line per criterion and exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use logicwb::check::{run_suite, CheckOptions, CheckReport, Suite};

struct Criterion {
    name: &'static str,
    suite: Suite,
    cases: Option<usize>,
    /// Lower bound on the number of checked instances.
    min_checks: usize,
    budget: Duration,
}

const SEED: u64 = 20;

fn criteria() -> Vec<Criterion> {
    let secs = Duration::from_secs;
    vec![
        Criterion { name: "GML unravelling invariance", suite: Suite::UnravelInvariance, cases: Some(200), min_checks: 200, budget: secs(10) },
        Criterion { name: "ML bisimulation invariance and the bullet counterexample", suite: Suite::BisimInvariance, cases: Some(200), min_checks: 201, budget: secs(10) },
        // 6872 trees of at most 5 nodes over 2 letters, every ordered pair.
        Criterion { name: "characteristic formulas of trees up to 5 nodes", suite: Suite::CharFormula, cases: None, min_checks: 6872 * 6872, budget: secs(60) },
        Criterion { name: "RA relativisation to dom(R)", suite: Suite::RaRelativize, cases: Some(300), min_checks: 300, budget: secs(10) },
        Criterion { name: "RA to three-variable FO", suite: Suite::Ra2fo, cases: Some(300), min_checks: 300, budget: secs(20) },
        Criterion { name: "distance-depth cut for GF_bin", suite: Suite::DistanceDepth, cases: Some(200), min_checks: 200, budget: secs(10) },
        Criterion { name: "guarded unravelling distances and invariance", suite: Suite::GfUnravel, cases: Some(100), min_checks: 100, budget: secs(30) },
        Criterion { name: "ML bullet reduction equisatisfiability", suite: Suite::ReductionEquisat, cases: Some(150), min_checks: 150, budget: secs(60) },
        // 4 + 256 + 262144 bimodal frames on 1, 2 and 3 nodes.
        Criterion { name: "bullet axioms define K", suite: Suite::AxiomsK, cases: None, min_checks: 262_404, budget: secs(60) },
        Criterion { name: "pebble game antitone and complete at domain size", suite: Suite::PebbleVsIso, cases: Some(100), min_checks: 101, budget: secs(60) },
    ]
}

fn verdict(c: &Criterion, report: &CheckReport, elapsed: Duration) -> Result<(), String> {
    if !report.failures.is_empty() {
        let first = serde_json::to_string(&report.failures[0]).unwrap_or_default();
        return Err(format!("{} of {} checks failed; first: {first}", report.failures.len(), report.cases));
    }
    if report.cases < c.min_checks {
        return Err(format!("only {} checks ran, expected at least {}", report.cases, c.min_checks));
    }
    if elapsed > c.budget {
        return Err(format!("took {elapsed:.2?}, budget {:?}", c.budget));
    }
    Ok(())
}

fn main() -> ExitCode {
    let mut failed = 0;
    for c in criteria() {
        let opts = CheckOptions { seed: SEED, cases: c.cases, corpus: None };
        let start = Instant::now();
        let outcome = run_suite(c.suite, &opts).map_err(|e| e.to_string());
        let elapsed = start.elapsed();
        let result = outcome.and_then(|report| verdict(&c, &report, elapsed).map(|()| report.cases));
        match result {
            Ok(cases) => println!("PASS {} [{}]: {cases} checks in {elapsed:.2?} (budget {:?})", c.name, c.suite, c.budget),
            Err(why) => {
                failed += 1;
                println!("FAIL {} [{}]: {why}", c.name, c.suite);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
