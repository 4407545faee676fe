use num_bigint::BigInt;
use num_traits::One;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use schreier_rewire::group::{FamilyTag, GroupInstance};
use schreier_rewire::groupoid::{correction_set, label_rewiring};
use schreier_rewire::homology::{
    abelianized_matrix, first_homology, rewired_complex, schreier_presentation, smith_normal_form,
    torsion_growth_stat, within_hadamard, SnfResult, SparseIntegerMatrix,
};
use schreier_rewire::rewire::{build_rewiring, Distortion};
use schreier_rewire::schreier::build_schreier;

struct Routes {
    rewired: SnfResult,
    schreier: SnfResult,
}

fn both_routes(tag: FamilyTag, rank: Option<usize>, size: u64, r: usize, base: usize) -> Routes {
    let group = GroupInstance::from_tag(tag, rank).unwrap();
    let g = build_schreier(group.quotient(size).unwrap().action());
    let b = group.max_relator_len() as u64;
    let rw = build_rewiring(&g, &group, r).unwrap();
    let dl = match rw.distortion {
        Distortion::Finite(d) => d,
        Distortion::Unbounded => panic!("disconnected"),
    };
    let lab = label_rewiring(&g, &rw.edges).unwrap();
    let corr = correction_set(&g, &lab, &group).unwrap();
    let p = rewired_complex(&g, &group, &rw.edges, &lab, &corr).unwrap();
    for i in 0..p.relator_count() {
        assert!(p.relator(i).len() as u64 <= 4 * b * dl.max(1).pow(4));
    }
    let m = abelianized_matrix(&p);
    let rewired = smith_normal_form(&m);
    assert!(within_hadamard(&m, &rewired.trs));

    let s = schreier_presentation(&g, &group, base).unwrap();
    assert!(s.max_relator_len() <= b as usize);
    let m = abelianized_matrix(&s);
    let schreier = smith_normal_form(&m);
    assert!(within_hadamard(&m, &schreier.trs));
    assert_eq!(schreier, first_homology(&s));
    Routes { rewired, schreier }
}

fn instance() -> impl Strategy<Value = (FamilyTag, Option<usize>, u64)> {
    prop_oneof![
        (2usize..=3, 2u64..=10).prop_map(|(k, n)| (
            FamilyTag::Torus,
            Some(k),
            if k == 3 { n.min(5) } else { n }
        )),
        (2u64..=6).prop_map(|n| (FamilyTag::Heisenberg, None, n)),
        prop::sample::select(vec![3u64, 5]).prop_map(|p| (FamilyTag::Sl3zProjective, None, p)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn routes_agree((tag, rank, size) in instance(), half in 1usize..=2, base_seed in any::<u64>()) {
        let index = GroupInstance::from_tag(tag, rank).unwrap().quotient(size).unwrap().index();
        let base = (base_seed % index as u64) as usize;
        let r = both_routes(tag, rank, size, 2 * half, base);
        prop_assert!(r.rewired.same_group(&r.schreier),
            "{} vs {}", r.rewired.describe(), r.schreier.describe());
        if tag == FamilyTag::Torus {
            prop_assert_eq!(r.schreier.betti, rank.unwrap());
            prop_assert!(r.schreier.trs.is_one());
        }
    }

    #[test]
    fn factors_survive_unimodular_changes(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = rng.gen_range(1..=7);
        let cols = rng.gen_range(1..=7);
        let mut a: Vec<Vec<i64>> = (0..rows)
            .map(|_| (0..cols).map(|_| rng.gen_range(-6..=6)).collect())
            .collect();
        let before = smith_normal_form(&SparseIntegerMatrix::from_dense(cols, &a));
        for _ in 0..12 {
            let t = rng.gen_range(-2..=2);
            if rng.gen_bool(0.5) && rows > 1 {
                let (i, j) = (rng.gen_range(0..rows), rng.gen_range(0..rows));
                if i != j {
                    for c in 0..cols {
                        a[i][c] += t * a[j][c];
                    }
                }
            } else if cols > 1 {
                let (i, j) = (rng.gen_range(0..cols), rng.gen_range(0..cols));
                if i != j {
                    for row in a.iter_mut() {
                        row[i] += t * row[j];
                    }
                }
            }
        }
        let after = smith_normal_form(&SparseIntegerMatrix::from_dense(cols, &a));
        prop_assert_eq!(before.factors(), after.factors());
        prop_assert_eq!(before.betti, after.betti);
        let f = after.factors();
        for w in f.windows(2) {
            prop_assert_eq!(&w[1] % &w[0], BigInt::from(0));
        }
    }
}

#[test]
fn heisenberg_torsion_closed_form() {
    for n in 2u64..=7 {
        let r = both_routes(FamilyTag::Heisenberg, None, n, 2, 0);
        for s in [&r.rewired, &r.schreier] {
            assert_eq!(s.betti, 2, "n={n}");
            assert_eq!(s.trs, BigInt::from(n), "n={n}");
        }
        let stat = torsion_growth_stat(&r.rewired.trs, n * n * n);
        let closed = (n as f64).ln() / (n * n * n) as f64;
        assert!(((stat - closed) / closed).abs() <= 1e-9, "n={n}");
    }
}

#[test]
fn lattice_quotients_agree_at_second_base() {
    for (tag, p, base) in [
        (FamilyTag::Sl3zProjective, 7, 11),
        (FamilyTag::Sl3zPrincipal, 2, 101),
        (FamilyTag::Heisenberg, 8, 300),
    ] {
        let r = both_routes(tag, None, p, 2, base);
        let at_zero = both_routes(tag, None, p, 2, 0);
        assert!(r.rewired.same_group(&r.schreier), "{tag} {p}");
        assert!(r.schreier.same_group(&at_zero.schreier), "{tag} {p}");
    }
}
