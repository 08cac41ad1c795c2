//! Verification suites run by `hyperstab verify` and the acceptance tests.
//! Each check records how its expected value was obtained.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use hyperstab_core::equivariant_poincare_m0n;
use hyperstab_core::ffcount::{self, CountError, GroupVariant};
use hyperstab_core::linalg::{self, WorkingField};
use hyperstab_core::m0n::{brute_twisted_count, twisted_count_config_p1, BRUTE_POINT_BOUND};
use hyperstab_core::series::TatePolynomial;
use hyperstab_core::spectral::{self, ConfigurationType, DifferentialKind, Family};
use hyperstab_core::stable::{self, StableCohomologyTable, EXAMPLE_ROWS};
use hyperstab_core::symfunc::{partitions, schur_expand};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// Where an expected value comes from: a published table or formula, a
/// direct consequence of the definitions, or an independent computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Published,
    Trivial,
    Derived,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub id: String,
    pub status: Status,
    pub expected: String,
    pub actual: String,
    pub origin: Origin,
}

impl Check {
    pub fn compare(
        id: impl Into<String>,
        origin: Origin,
        expected: impl ToString,
        actual: impl ToString,
    ) -> Self {
        let (expected, actual) = (expected.to_string(), actual.to_string());
        let status = if expected == actual {
            Status::Pass
        } else {
            Status::Fail
        };
        Check {
            id: id.into(),
            status,
            expected,
            actual,
            origin,
        }
    }

    pub fn skipped(id: impl Into<String>, origin: Origin, reason: impl ToString) -> Self {
        Check {
            id: id.into(),
            status: Status::Skipped,
            expected: String::new(),
            actual: reason.to_string(),
            origin,
        }
    }

    fn error(
        id: impl Into<String>,
        origin: Origin,
        expected: impl ToString,
        err: impl fmt::Display,
    ) -> Self {
        Check {
            id: id.into(),
            status: Status::Fail,
            expected: expected.to_string(),
            actual: format!("error: {err}"),
            origin,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub checks: Vec<Check>,
}

impl SuiteResult {
    pub fn new(suite: &str) -> Self {
        SuiteResult {
            suite: suite.to_string(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: SuiteResult) {
        self.checks.extend(other.checks);
    }

    pub fn count(&self, status: Status) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }

    pub fn passed(&self) -> bool {
        self.count(Status::Fail) == 0
    }

    /// Checks whose id starts with `prefix`.
    pub fn select(&self, prefix: &str) -> SuiteResult {
        SuiteResult {
            suite: format!("{}:{prefix}", self.suite),
            checks: self
                .checks
                .iter()
                .filter(|c| c.id.starts_with(prefix))
                .cloned()
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("suite serializes") + "\n"
    }

    pub fn report(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skipped => "SKIP",
            };
            out.push_str(&format!("{tag} {} [{:?}]", c.id, c.origin));
            if c.status == Status::Fail {
                out.push_str(&format!(
                    "\n    expected: {}\n    actual:   {}",
                    c.expected, c.actual
                ));
            } else if c.status == Status::Skipped {
                out.push_str(&format!(" ({})", c.actual));
            }
            out.push('\n');
        }
        out.push_str(&format!(
            "{}: {} passed, {} failed, {} skipped\n",
            self.suite,
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Skipped)
        ));
        out
    }
}

/// Enumeration budget in coset lookups.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget(pub u128);

impl Budget {
    pub const SMALL: Budget = Budget(100_000_000);
    pub const MEDIUM: Budget = Budget(ffcount::DEFAULT_BUDGET);
    pub const LARGE: Budget = Budget(100_000_000_000);
}

impl Default for Budget {
    fn default() -> Self {
        Budget::MEDIUM
    }
}

impl FromStr for Budget {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "small" => Ok(Budget::SMALL),
            "medium" => Ok(Budget::MEDIUM),
            "large" => Ok(Budget::LARGE),
            other => other
                .replace('_', "")
                .parse::<u128>()
                .map(Budget)
                .map_err(|_| {
                    format!("budget must be small, medium, large or an integer, got {other:?}")
                }),
        }
    }
}

pub const DEFAULT_SEED: u64 = 2024;

pub const SUITES: [&str; 8] = [
    "example19",
    "tables",
    "m0n",
    "ranks",
    "diffscan",
    "counts",
    "euler",
    "all",
];

#[derive(Clone, Copy, Debug)]
pub struct SuiteOptions {
    pub budget: Budget,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            budget: Budget::default(),
            seed: DEFAULT_SEED,
        }
    }
}

/// Runs a suite by name; `None` for an unknown name.
pub fn run(name: &str, opts: SuiteOptions) -> Option<SuiteResult> {
    Some(match name {
        "example19" => example19(),
        "tables" => tables(),
        "m0n" => m0n(),
        "ranks" => ranks(opts.seed),
        "diffscan" => diffscan(),
        "counts" => counts(opts.budget),
        "euler" => euler(),
        "all" => {
            let mut all = SuiteResult::new("all");
            for s in &SUITES[..SUITES.len() - 1] {
                all.extend(run(s, opts).expect("listed suite"));
            }
            all
        }
        _ => return None,
    })
}

pub fn example19() -> SuiteResult {
    let mut out = SuiteResult::new("example19");
    match stable::cohomology_table(0, 18) {
        Ok(table) => {
            for (i, row) in EXAMPLE_ROWS.iter().enumerate() {
                let want: BTreeMap<i32, u64> = row.iter().copied().collect();
                out.push(Check::compare(
                    format!("example19-H{i}"),
                    Origin::Published,
                    StableCohomologyTable::render_row(&want),
                    StableCohomologyTable::render_row(table.row(i)),
                ));
            }
        }
        Err(e) => out.push(Check::error("example19", Origin::Published, "19 rows", e)),
    }
    out
}

fn render_cells(cells: &BTreeMap<(i64, i64), u64>) -> String {
    if cells.is_empty() {
        return "none".into();
    }
    cells
        .iter()
        .map(|((r, w), m)| format!("{r}:Q(-{w})^{m}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Compares two cell maps, reporting only the cells that differ.
fn compare_cells(
    id: String,
    expected: &BTreeMap<(i64, i64), u64>,
    actual: &BTreeMap<(i64, i64), u64>,
) -> Check {
    if expected == actual {
        return Check::compare(
            id,
            Origin::Published,
            format!("{} cells", expected.len()),
            format!("{} cells", actual.len()),
        );
    }
    let keys: BTreeSet<_> = expected.keys().chain(actual.keys()).collect();
    let differ = |m: &BTreeMap<(i64, i64), u64>| -> BTreeMap<(i64, i64), u64> {
        keys.iter()
            .filter(|k| expected.get(k) != actual.get(k))
            .filter_map(|k| m.get(k).map(|v| (**k, *v)))
            .collect()
    };
    Check::compare(
        id,
        Origin::Published,
        render_cells(&differ(expected)),
        render_cells(&differ(actual)),
    )
}

pub fn tables() -> SuiteResult {
    let mut out = SuiteResult::new("tables");
    let printed = spectral::printed_main_columns();
    for l in 3..=6u32 {
        let id = format!("main-L{l}");
        let want: BTreeMap<(i64, i64), u64> =
            printed[&l].iter().map(|&(r, w, m)| ((r, w), m)).collect();
        match spectral::e1_column(l, 40) {
            Ok(col) => {
                let got: BTreeMap<(i64, i64), u64> = col
                    .cells()
                    .into_iter()
                    .filter(|&((row, _), _)| row >= spectral::PRINTED_ROW_FLOOR)
                    .collect();
                out.push(compare_cells(id, &want, &got));
            }
            Err(e) => out.push(Check::error(id, Origin::Published, "column", e)),
        }
    }

    let types = spectral::five_point_types();
    let cells_of = |col: &spectral::E1Column| -> BTreeMap<(i64, i64), u64> {
        col.entries
            .iter()
            .map(|e| ((e.row, -e.twist), e.multiplicity))
            .collect()
    };
    let printed_pairs = |list: &[(i64, i64)]| -> BTreeMap<(i64, i64), u64> {
        let mut m = BTreeMap::new();
        for &k in list {
            *m.entry(k).or_insert(0) += 1;
        }
        m
    };
    match spectral::type_columns(&types, 25) {
        Ok(cols) => {
            for (col, (ty, printed)) in cols
                .iter()
                .zip(spectral::printed_five_point_hyperelliptic())
            {
                out.push(compare_cells(
                    format!("tab-ex3-{ty}"),
                    &printed_pairs(&printed),
                    &cells_of(col),
                ));
            }
        }
        Err(e) => out.push(Check::error("tab-ex3", Origin::Published, "columns", e)),
    }
    match spectral::twisted_columns(&types) {
        Ok(cols) => {
            for (col, (ty, printed)) in cols.iter().zip(spectral::printed_five_point_twisted()) {
                out.push(compare_cells(
                    format!("tab-ex1-{ty}"),
                    &printed_pairs(&printed),
                    &cells_of(col),
                ));
            }
            let unmatched = spectral::unmatched_after_cancellation(&cols);
            out.push(Check::compare(
                "tab-ex1-cancellation",
                Origin::Published,
                "[]",
                format!("{unmatched:?}"),
            ));
        }
        Err(e) => out.push(Check::error("tab-ex1", Origin::Published, "columns", e)),
    }
    let small: BTreeMap<(i64, i64), u64> = spectral::main_table_small_column()
        .cells
        .iter()
        .map(|&(r, w, m)| ((r, w), m))
        .collect();
    out.push(compare_cells(
        "table1-collapse".into(),
        &small,
        &spectral::collapse_small_columns(),
    ));
    out
}

pub fn m0n() -> SuiteResult {
    let mut out = SuiteResult::new("m0n");
    let mut cases = Vec::new();
    for n in 1..=5 {
        for mu in partitions(n) {
            for q in [3u64, 5, 7] {
                cases.push((mu.clone(), q));
            }
        }
    }
    for mu in partitions(6) {
        if mu.lcm() <= 6 {
            cases.push((mu, 3));
        }
    }
    for (mu, q) in cases {
        let id = format!("twisted-count-{mu}-q{q}");
        let formula = twisted_count_config_p1(&mu).eval(q as i128);
        match brute_twisted_count(&mu, q, BRUTE_POINT_BOUND) {
            Ok(b) => out.push(Check::compare(id, Origin::Derived, formula, b)),
            Err(e) => out.push(Check::error(id, Origin::Derived, formula, e)),
        }
    }
    for n in 3..=10u32 {
        let mut product = vec![1i128];
        for j in 2..=(n as i128 - 2) {
            let mut next = vec![0; product.len() + 1];
            for (i, &c) in product.iter().enumerate() {
                next[i] += c;
                next[i + 1] += j * c;
            }
            product = next;
        }
        match equivariant_poincare_m0n(n) {
            Ok(ep) => {
                out.push(Check::compare(
                    format!("identity-layers-n{n}"),
                    Origin::Derived,
                    format!("{product:?}"),
                    format!("{:?}", ep.betti()),
                ));
                let negative: Vec<String> = ep
                    .layers
                    .iter()
                    .flat_map(|(i, chi)| match schur_expand(chi) {
                        Ok(exp) => exp
                            .into_iter()
                            .filter(|(_, m)| *m < 0)
                            .map(|(lambda, m)| format!("i={i} {lambda}:{m}"))
                            .collect::<Vec<_>>(),
                        Err(e) => vec![format!("i={i} error {e}")],
                    })
                    .collect();
                out.push(Check::compare(
                    format!("schur-nonnegative-n{n}"),
                    Origin::Trivial,
                    "[]",
                    format!("{negative:?}"),
                ));
            }
            Err(e) => out.push(Check::error(
                format!("m0n-n{n}"),
                Origin::Derived,
                "layers",
                e,
            )),
        }
    }
    out
}

/// The nine types with at most two lines.
pub fn small_types() -> Vec<ConfigurationType> {
    [
        (1, 0, 0),
        (0, 1, 0),
        (0, 0, 1),
        (2, 0, 0),
        (1, 1, 0),
        (0, 2, 0),
        (1, 0, 1),
        (0, 1, 1),
        (0, 0, 2),
    ]
    .into_iter()
    .map(|(a, b, c)| ConfigurationType::new(a, b, c))
    .collect()
}

/// `(d, n)` pairs checked for each type, all inside the degree bound.
pub fn rank_pairs(ty: &ConfigurationType) -> [(i64, i64); 2] {
    [
        (linalg::minimal_degree(ty, 1) + 1, 1),
        (linalg::minimal_degree(ty, 2) + 2, 2),
    ]
}

pub const RANK_TRIALS: u64 = 100;

pub fn ranks(seed: u64) -> SuiteResult {
    let mut out = SuiteResult::new("ranks");
    let mut types = small_types();
    types.extend(spectral::types_with_lines(3));
    for ty in types {
        for (d, n) in rank_pairs(&ty) {
            let id = format!("rank-{ty}-d{d}-n{n}");
            let expected = format!("0/{RANK_TRIALS} jumps");
            match linalg::verify_bundle_rank(&ty, d, n, RANK_TRIALS, seed, WorkingField::Rational) {
                Ok(r) => {
                    let bad: Vec<String> = r
                        .failures
                        .iter()
                        .map(|f| format!("trial {} kernel {}", f.trial, f.kernel_dimension))
                        .collect();
                    let actual = if bad.is_empty() {
                        expected.clone()
                    } else {
                        format!("{}/{RANK_TRIALS} jumps: {}", bad.len(), bad.join(", "))
                    };
                    out.push(Check::compare(id, Origin::Published, &expected, actual));
                }
                Err(e) => out.push(Check::error(id, Origin::Published, expected, e)),
            }
        }
    }
    let ty = ConfigurationType::new(2, 0, 0);
    let id = "rank-below-bound-(2,0,0)-d2-n0";
    match linalg::below_bound_witness(&ty, 2, 0, 50, seed) {
        Ok(Some(_)) => out.push(Check::compare(
            id,
            Origin::Derived,
            "rank drops",
            "rank drops",
        )),
        Ok(None) => out.push(Check::compare(
            id,
            Origin::Derived,
            "rank drops",
            "no drop in 50 trials",
        )),
        Err(e) => out.push(Check::error(id, Origin::Derived, "witness found", e)),
    }
    out
}

pub const DIFFSCAN_BOUND: u32 = 8;

pub fn diffscan() -> SuiteResult {
    let mut out = SuiteResult::new("diffscan");
    let cands = spectral::differential_candidates(DIFFSCAN_BOUND);
    for family in [Family::A, Family::B, Family::C, Family::D, Family::E] {
        let hits = cands.iter().filter(|c| c.family == family).count();
        out.push(Check::compare(
            format!("diffscan-family-{family:?}"),
            Origin::Published,
            0,
            hits,
        ));
    }
    let stray: Vec<String> = cands
        .iter()
        .filter(|c| c.r != 1 || c.kind.is_none())
        .map(|c| format!("{}->{} {:?} r={}", c.source, c.target, c.family, c.r))
        .collect();
    out.push(Check::compare(
        "diffscan-only-r1-kinds",
        Origin::Published,
        "[]",
        format!("{stray:?}"),
    ));
    for (kind, family, offset) in [
        (DifferentialKind::I, Family::F, 1),
        (DifferentialKind::II, Family::G, 0),
    ] {
        let of_kind: Vec<_> = cands.iter().filter(|c| c.family == family).collect();
        let bad = of_kind
            .iter()
            .filter(|c| c.kind != Some(kind) || c.j_prime as i64 - c.j as i64 != offset)
            .count();
        out.push(Check::compare(
            format!("diffscan-kind-{kind:?}-offset"),
            Origin::Published,
            format!("j'-j={offset} on all, nonempty"),
            if of_kind.is_empty() {
                "no solutions".to_string()
            } else if bad > 0 {
                format!("{bad} of {} off", of_kind.len())
            } else {
                format!("j'-j={offset} on all, nonempty")
            },
        ));
    }
    out
}

/// `(g, l, q, variant)` cases compared against the printed counts.
pub fn count_cases() -> Vec<(u32, u32, u64, GroupVariant)> {
    use GroupVariant::*;
    vec![
        (2, 1, 3, Full),
        (2, 1, 5, Full),
        (2, 2, 3, Full),
        (2, 3, 3, G0Prime),
        (3, 1, 3, Full),
        (3, 2, 3, Full),
        (4, 1, 3, Full),
        (3, 4, 3, G0Prime),
        (4, 5, 3, G0Prime),
        (2, 0, 3, Full),
        (2, 0, 5, Full),
        (3, 0, 3, Full),
    ]
}

fn over_budget(e: &CountError) -> bool {
    matches!(e, CountError::ResourceBound { .. })
}

pub fn counts(budget: Budget) -> SuiteResult {
    let mut out = SuiteResult::new("counts");
    for (g, l, q, variant) in count_cases() {
        let id = format!("count-g{g}-l{l}-q{q}");
        let expected = match ffcount::closed_form_count(g, l) {
            Ok(p) => p.eval(q as i128).to_string(),
            Err(e) => {
                out.push(Check::error(id, Origin::Published, "printed form", e));
                continue;
            }
        };
        let raw = match ffcount::enumerate_count(g, l, q, variant, budget.0) {
            Ok(r) => {
                out.push(Check::compare(
                    &id,
                    Origin::Published,
                    &expected,
                    r.stack_count,
                ));
                r.raw_count
            }
            Err(e) if over_budget(&e) => {
                out.push(Check::skipped(&id, Origin::Published, e));
                continue;
            }
            Err(e) => {
                out.push(Check::error(&id, Origin::Published, &expected, e));
                continue;
            }
        };
        let sid = format!("strata-g{g}-l{l}-q{q}");
        match ffcount::stratified_count(g, l, q, budget.0) {
            Ok(s) => out.push(Check::compare(
                sid,
                Origin::Trivial,
                raw,
                s.values().sum::<u128>(),
            )),
            Err(e) => out.push(Check::error(sid, Origin::Trivial, raw, e)),
        }
    }
    let id = "strata-psi-round-trip-g2-l1-q3";
    match ffcount::naive_members(2, 1, 3) {
        Ok(members) => {
            let ok = members
                .iter()
                .filter(|t| {
                    ffcount::psi(t, 3)
                        .and_then(|img| ffcount::psi_inverse(&img, 3))
                        .map(|back| back.as_ref() == Some(*t))
                        .unwrap_or(false)
                })
                .count();
            out.push(Check::compare(id, Origin::Trivial, members.len(), ok));
        }
        Err(e) => out.push(Check::error(id, Origin::Trivial, "members", e)),
    }
    out
}

pub fn euler() -> SuiteResult {
    let mut out = SuiteResult::new("euler");
    let series = match stable::stable_series(12) {
        Ok(s) => s,
        Err(e) => {
            out.push(Check::error("euler", Origin::Published, "series", e));
            return out;
        }
    };
    for l in 1..=4 {
        let id = format!("euler-l{l}");
        match ffcount::euler_identity_check(l, &series) {
            Ok(r) => {
                let side = |f: fn(&ffcount::EulerRow) -> i128| {
                    TatePolynomial::from_terms(r.rows.iter().map(|row| (row.exponent, f(row))))
                        .to_string()
                };
                out.push(Check::compare(
                    &id,
                    Origin::Published,
                    side(|x| x.rhs),
                    side(|x| x.lhs),
                ));
                if l == 4 {
                    out.push(Check::compare(
                        "euler-l4-window",
                        Origin::Published,
                        "up to L^6: 1 + L + L^6",
                        format!("up to L^{}: {}", r.window, side(|x| x.lhs)),
                    ));
                }
            }
            Err(e) => out.push(Check::error(id, Origin::Published, "identity", e)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_names() {
        assert_eq!("small".parse::<Budget>().unwrap(), Budget::SMALL);
        assert_eq!("1_000".parse::<Budget>().unwrap(), Budget(1000));
        assert!("huge".parse::<Budget>().is_err());
    }

    #[test]
    fn statuses_and_selection() {
        let mut s = SuiteResult::new("t");
        s.push(Check::compare("a-1", Origin::Trivial, 1, 1));
        s.push(Check::compare("a-2", Origin::Derived, 1, 2));
        s.push(Check::skipped("b-1", Origin::Published, "over budget"));
        assert!(!s.passed());
        assert_eq!(s.count(Status::Skipped), 1);
        let a = s.select("a-");
        assert_eq!(a.checks.len(), 2);
        assert!(s.select("b-").passed());
        let report = s.report();
        assert!(report.contains("FAIL a-2"));
        assert!(report.ends_with("t: 1 passed, 1 failed, 1 skipped\n"));
        let json: serde_json::Value = serde_json::from_str(&s.to_json()).unwrap();
        assert_eq!(json["checks"][2]["status"], "skipped");
        assert_eq!(json["checks"][0]["origin"], "trivial");
    }

    #[test]
    fn unknown_suite() {
        assert!(run("nope", SuiteOptions::default()).is_none());
    }

    #[test]
    fn small_budget_skips_the_largest_case() {
        let cases = count_cases();
        let over: Vec<_> = cases
            .iter()
            .filter(|(g, l, q, _)| ffcount::enumeration_work(*g, *l, *q) > Budget::SMALL.0)
            .collect();
        assert_eq!(over.len(), 1);
        assert_eq!((over[0].0, over[0].1), (4, 5));
    }
}
