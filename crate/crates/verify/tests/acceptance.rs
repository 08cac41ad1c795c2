//! Exit criteria. Prints one PASS/FAIL line per criterion and fails the
//! run if any criterion fails; details of failing checks follow the summary.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use hyperstab_verify::{self as suites, Budget, Status, SuiteResult, DEFAULT_SEED};

struct Criterion {
    number: u32,
    title: &'static str,
    result: SuiteResult,
    limit: Option<(Duration, Duration)>,
}

impl Criterion {
    fn passed(&self) -> bool {
        let in_time = self.limit.map_or(true, |(took, max)| took <= max);
        self.result.passed() && self.result.count(Status::Skipped) == 0 && in_time
    }

    fn line(&self) -> String {
        let timing = match self.limit {
            Some((took, max)) => format!(", {:.1}s of {}s", took.as_secs_f64(), max.as_secs()),
            None => String::new(),
        };
        format!(
            "criterion {} {}: {} ({} checks, {} failed, {} skipped{timing})",
            self.number,
            self.title,
            if self.passed() { "PASS" } else { "FAIL" },
            self.result.checks.len(),
            self.result.count(Status::Fail),
            self.result.count(Status::Skipped),
        )
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn main() -> ExitCode {
    let mut criteria = Vec::new();

    let (example, took) = timed(suites::example19);
    criteria.push(Criterion {
        number: 1,
        title: "stable table degrees 0-18",
        result: example,
        limit: Some((took, Duration::from_secs(60))),
    });

    let tables = suites::tables();
    let mut columns = tables.select("main-L");
    columns.extend(tables.select("tab-ex3-"));
    criteria.push(Criterion {
        number: 2,
        title: "first-page columns",
        result: columns,
        limit: None,
    });

    criteria.push(Criterion {
        number: 3,
        title: "M_0,n twisted counts and layers",
        result: suites::m0n(),
        limit: None,
    });

    criteria.push(Criterion {
        number: 4,
        title: "bundle rank",
        result: suites::ranks(DEFAULT_SEED),
        limit: None,
    });

    criteria.push(Criterion {
        number: 5,
        title: "differential scan",
        result: suites::diffscan(),
        limit: None,
    });

    let (counts, took) = timed(|| suites::counts(Budget::LARGE));
    criteria.push(Criterion {
        number: 6,
        title: "point counts",
        result: counts.select("count-"),
        limit: Some((took, Duration::from_secs(3600))),
    });

    criteria.push(Criterion {
        number: 7,
        title: "Euler characteristic identity",
        result: suites::euler(),
        limit: None,
    });

    criteria.push(Criterion {
        number: 8,
        title: "stratification",
        result: counts.select("strata-"),
        limit: None,
    });

    for c in &criteria {
        println!("{}", c.line());
    }
    let failing: Vec<&Criterion> = criteria.iter().filter(|c| !c.passed()).collect();
    for c in &failing {
        println!();
        print!("{}", c.result.report());
    }
    if failing.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
