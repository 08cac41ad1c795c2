use hyperstab_core::linalg::*;
use hyperstab_core::spectral::{types_with_lines, ConfigurationType};

fn small_types() -> Vec<ConfigurationType> {
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

fn checked_pairs(ty: &ConfigurationType) -> [(i64, i64); 3] {
    [
        (minimal_degree(ty, 0) + 1, 0),
        (minimal_degree(ty, 1) + 1, 1),
        (minimal_degree(ty, 2) + 2, 2),
    ]
}

#[test]
fn fibers_have_constant_rank() {
    let mut types = small_types();
    types.extend(types_with_lines(3));
    for ty in types {
        for (d, n) in checked_pairs(&ty) {
            let r = verify_bundle_rank(&ty, d, n, 100, 2024, WorkingField::Rational).unwrap();
            assert!(r.passed(), "{}", r.to_json());
        }
    }
}

// At the smallest degree allowed by the bound the fiber can still jump:
// for three pairs on F_2 the residual alpha vanishes identically, and on
// F_0 two points sharing a horizontal ruling force that line into f.
#[test]
fn minimal_degree_exceptions() {
    let three_pairs = ConfigurationType::new(0, 0, 3);
    assert_eq!(minimal_degree(&three_pairs, 2), 6);
    let r = verify_bundle_rank(&three_pairs, 6, 2, 20, 1, WorkingField::Rational).unwrap();
    assert_eq!(r.failures.len(), 20);
    assert!(r.failures.iter().all(|f| f.kernel_dimension == 1));

    let s = SectionSpace::new(2, 0).unwrap();
    let generic = [
        PointOnSurface::off_exceptional(1, 0, 3).unwrap(),
        PointOnSurface::off_exceptional(1, 2, 1).unwrap(),
        PointOnSurface::off_exceptional(1, 2, 4).unwrap(),
    ];
    let aligned = [
        PointOnSurface::off_exceptional(1, 0, 1).unwrap(),
        PointOnSurface::off_exceptional(1, 2, 1).unwrap(),
        PointOnSurface::off_exceptional(1, 2, 4).unwrap(),
    ];
    let k = |pts: &[PointOnSurface]| {
        kernel_dimension(
            &configuration_rows(pts, &s),
            s.dimension(),
            WorkingField::Rational,
        )
        .unwrap()
    };
    assert_eq!(k(&generic), 1);
    assert_eq!(k(&aligned), 2);
}

#[test]
fn prime_field_matches_rationals_on_same_seed() {
    for ty in types_with_lines(3) {
        let n = 3;
        let d = minimal_degree(&ty, n) + 1;
        let s = SectionSpace::new(d, n).unwrap();
        let p = default_prime(d, n);
        for trial in 0..20 {
            let q = trial_kernel_dimension(&ty, &s, 99, trial, WorkingField::Rational).unwrap();
            let f = trial_kernel_dimension(&ty, &s, 99, trial, WorkingField::Prime(p)).unwrap();
            assert_eq!(q, f, "{ty} trial {trial}");
        }
    }
}

#[test]
fn rank_drops_below_the_bound() {
    let ty = ConfigurationType::new(2, 0, 0);
    assert!(below_bound_witness(&ty, 2, 0, 50, 5).unwrap().is_some());
}
