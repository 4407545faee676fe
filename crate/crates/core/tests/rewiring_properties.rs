use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use schreier_rewire::group::{FamilyTag, GroupInstance};
use schreier_rewire::groupoid::{
    abelian_rank_lower_bound, correction_set, label_rewiring, rank_upper_bound,
};
use schreier_rewire::homology::{abelianized_matrix, rewired_complex, smith_normal_form};
use schreier_rewire::rewire::{
    build_rewiring, cycle_decomposition, separated_positions, Distortion,
};
use schreier_rewire::schreier::{build_schreier, exceptional_vertices, LabeledSchreierGraph};

fn graph(tag: FamilyTag, rank: Option<usize>, size: u64) -> (GroupInstance, LabeledSchreierGraph) {
    let g = GroupInstance::from_tag(tag, rank).unwrap();
    let s = build_schreier(g.quotient(size).unwrap().action());
    (g, s)
}

fn family() -> impl Strategy<Value = (FamilyTag, Option<usize>, u64)> {
    prop_oneof![
        (2usize..=3, 2u64..=12).prop_map(|(k, n)| (
            FamilyTag::Torus,
            Some(k),
            if k == 3 { n.min(6) } else { n }
        )),
        (2u64..=7).prop_map(|n| (FamilyTag::Heisenberg, None, n)),
        prop::sample::select(vec![3u64, 5, 7]).prop_map(|p| (FamilyTag::Sl3zProjective, None, p)),
        Just((FamilyTag::Sl3zPrincipal, None, 2)),
    ]
}

/// Circular distance on a cycle of length `len`.
fn cyc(a: usize, b: usize, len: usize) -> usize {
    let d = a.abs_diff(b);
    d.min(len - d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rewiring_bounds((tag, rank, size) in family(), half in 1usize..=2) {
        let r = 2 * half;
        let (group, g) = graph(tag, rank, size);
        let rw = build_rewiring(&g, &group, r).unwrap();
        prop_assert!(rw.density <= rw.density_bound());
        match rw.distortion {
            Distortion::Finite(d) => prop_assert!(BigInt::from(d) <= rw.budget),
            Distortion::Unbounded => prop_assert!(false, "rewired graph disconnected"),
        }
        // H only ever drops edges, and keeps every s_1 edge
        prop_assert!(rw.edges.len() <= g.edge_count());
        prop_assert_eq!(rw.edges.vertex_count(), g.vertex_count());
        for x in 0..g.vertex_count() {
            prop_assert!(rw.edges.contains(x, 0));
        }
        let exc = exceptional_vertices(&g, &group, r).unwrap();
        prop_assert_eq!(&exc, &rw.exceptional);
        prop_assert_eq!(rw.degenerate, exc.len() == g.vertex_count());
    }

    #[test]
    fn kept_sets_cover_previous_cycles((tag, rank, size) in family(), half in 1usize..=2) {
        let r = 2 * half;
        let (group, g) = graph(tag, rank, size);
        let rw = build_rewiring(&g, &group, r).unwrap();
        for i in 1..g.generator_count() {
            for cycle in cycle_decomposition(&g, i - 1).cycles {
                let len = cycle.len();
                let kept: Vec<usize> = (0..len).filter(|&p| rw.selected[i][cycle[p] as usize]).collect();
                for p in 0..len {
                    prop_assert!(kept.iter().any(|&q| cyc(p, q, len) <= r));
                }
            }
        }
    }

    #[test]
    fn separated_positions_properties(len in 1usize..200, r in 1usize..20) {
        let pos = separated_positions(len, r);
        let m = pos.len();
        prop_assert_eq!(m, (len / r).max(1));
        if m > 1 {
            for (a, &p) in pos.iter().enumerate() {
                for &q in &pos[a + 1..] {
                    prop_assert!(cyc(p, q, len) >= r);
                }
            }
        }
        for p in 0..len {
            prop_assert!(pos.iter().any(|&q| cyc(p, q, len) <= r));
        }
        if len >= r {
            prop_assert!(m * r <= len);
        }
    }

    #[test]
    fn corrections_fix_their_vertex_and_sandwich((tag, rank, size) in family()) {
        let (group, g) = graph(tag, rank, size);
        let rw = build_rewiring(&g, &group, 2).unwrap();
        let dl = match rw.distortion {
            Distortion::Finite(d) => d,
            Distortion::Unbounded => unreachable!(),
        };
        let lab = label_rewiring(&g, &rw.edges).unwrap();
        let corr = correction_set(&g, &lab, &group).unwrap();
        for e in &corr.entries {
            let end = e.witness.iter().fold(e.vertex, |v, &l| g.step(v, l));
            prop_assert_eq!(end, e.vertex);
            prop_assert!(!e.element.is_identity());
            prop_assert!(e.witness.len() as u64 <= dl * dl + 1);
        }
        if tag == FamilyTag::Torus {
            prop_assert!(corr.is_empty());
        }
        let upper = rank_upper_bound(rw.edges.len(), g.vertex_count(), &corr, None);
        let p = rewired_complex(&g, &group, &rw.edges, &lab, &corr).unwrap();
        let snf = smith_normal_form(&abelianized_matrix(&p));
        let lower = abelian_rank_lower_bound(&snf) as i64;
        let n = g.vertex_count() as i64;
        prop_assert!(BigRational::new((lower - 1).into(), n.into()) <= upper.measured);
    }
}

#[test]
fn normal_families_are_all_or_nothing() {
    for (tag, rank, sizes) in [
        (FamilyTag::Torus, Some(2), vec![4u64, 6, 7, 8, 16]),
        (FamilyTag::Heisenberg, None, vec![2, 3, 4, 8]),
        (FamilyTag::Sl3zPrincipal, None, vec![2, 3]),
    ] {
        for size in sizes {
            let (group, g) = graph(tag, rank, size);
            for r in [2, 4] {
                let x = exceptional_vertices(&g, &group, r).unwrap().len();
                assert!(x == 0 || x == g.vertex_count(), "{tag} {size} R={r}: {x}");
            }
        }
    }
}

#[test]
fn torus_bad_fraction_and_rank_trend() {
    let group = GroupInstance::from_tag(FamilyTag::Torus, Some(2)).unwrap();
    let mut previous: Option<BigRational> = None;
    for n in [8u64, 16, 32, 64] {
        let g = build_schreier(group.quotient(n).unwrap().action());
        assert!(exceptional_vertices(&g, &group, 2).unwrap().is_empty());
        let best = n as usize / 4;
        let rw = build_rewiring(&g, &group, best).unwrap();
        let lab = label_rewiring(&g, &rw.edges).unwrap();
        let corr = correction_set(&g, &lab, &group).unwrap();
        let upper = rank_upper_bound(rw.edges.len(), g.vertex_count(), &corr, None).measured;
        assert!(
            upper <= BigRational::new(1.into(), (best as i64).into()),
            "n={n}"
        );
        if let Some(p) = &previous {
            assert!(upper <= *p, "n={n}");
        }
        previous = Some(upper);
    }
}

#[test]
fn ball_codes_independent_of_thread_count() {
    let (group, g) = graph(FamilyTag::Sl3zProjective, None, 7);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                let codes: Vec<_> = (0..g.vertex_count()).map(|v| g.ball_code(v, 3)).collect();
                (codes, exceptional_vertices(&g, &group, 2).unwrap())
            })
    };
    assert_eq!(run(1), run(4));
}
