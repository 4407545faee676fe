use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use schreier_rewire::farber::{fixed_point_fraction, gamma_sum};
use schreier_rewire::group::{reduced_words, FamilyTag, GroupInstance, Word};
use schreier_rewire::groupoid::{correction_set, label_rewiring};
use schreier_rewire::rewire::{build_rewiring, Distortion};
use schreier_rewire::schreier::{build_schreier, enumerate_ball};

const PRIMES: [u64; 4] = [3, 5, 7, 11];

/// Fractions of every non-trivial reduced word of length at most 4 in the
/// projective family at the primes above. Individual words are not
/// monotone in `p`; the envelope and the average are.
#[test]
fn projective_fractions_shrink_with_p() {
    let group = GroupInstance::from_tag(FamilyTag::Sl3zProjective, None).unwrap();
    let words: Vec<Word> = (1..=4)
        .flat_map(|len| reduced_words(6, len))
        .filter(|w| !group.evaluate_word(w).unwrap().is_identity())
        .collect();
    assert!(words.len() > 17_000);

    let mut maxima = Vec::new();
    let mut means = Vec::new();
    for p in PRIMES {
        let graph = build_schreier(group.quotient(p).unwrap().action());
        let envelope = BigRational::new(BigInt::from(p + 2), BigInt::from(p * p + p + 1));
        let mut max = BigRational::zero();
        let mut sum = BigRational::zero();
        for w in &words {
            let f = fixed_point_fraction(&graph, w).unwrap().fraction;
            assert!(f >= BigRational::zero() && f <= BigRational::one());
            if p >= 5 {
                assert!(f <= envelope, "p={p} word {w:?}: {f}");
            }
            sum += &f;
            max = max.max(f);
        }
        maxima.push(max);
        means.push(sum / BigInt::from(words.len()));
    }
    assert!(maxima.windows(2).all(|w| w[0] > w[1]), "{maxima:?}");
    assert!(means.windows(2).all(|w| w[0] > w[1]), "{means:?}");
    assert!(means.last().unwrap().to_f64().unwrap() < 0.02);
}

#[test]
fn full_fraction_means_trivial_permutation() {
    let group = GroupInstance::from_tag(FamilyTag::Sl3zProjective, None).unwrap();
    let q = group.quotient(3).unwrap();
    let graph = build_schreier(q.action());
    for w in reduced_words(6, 3) {
        let f = fixed_point_fraction(&graph, &w).unwrap();
        assert_eq!(f.fraction.is_one(), q.action().fixes_all(&w));
    }
}

#[test]
fn principal_fractions_are_zero_or_one() {
    let group = GroupInstance::from_tag(FamilyTag::Sl3zPrincipal, None).unwrap();
    for p in [2, 3] {
        let graph = build_schreier(group.quotient(p).unwrap().action());
        let ball = enumerate_ball(&group, 3).unwrap();
        for i in 0..ball.elements.len() {
            let f = fixed_point_fraction(&graph, &ball.word(i)).unwrap();
            assert!(f.fixed == 0 || f.fixed == f.total, "p={p}");
        }
    }
}

#[test]
fn fixed_point_sum_dominates_correction_measure() {
    for (tag, rank, size) in [
        (FamilyTag::Torus, Some(2), 16u64),
        (FamilyTag::Heisenberg, None, 8),
        (FamilyTag::Heisenberg, None, 3),
    ] {
        let group = GroupInstance::from_tag(tag, rank).unwrap();
        let graph = build_schreier(group.quotient(size).unwrap().action());
        let rw = build_rewiring(&graph, &group, 2).unwrap();
        let Distortion::Finite(dl) = rw.distortion else {
            panic!("disconnected")
        };
        let lab = label_rewiring(&graph, &rw.edges).unwrap();
        let corr = correction_set(&graph, &lab, &group).unwrap();
        let gamma = gamma_sum(&graph, &group, dl as usize).unwrap();
        assert_eq!(gamma.radius, (dl * dl + 1) as usize);
        assert!(corr.measure() <= gamma.gamma, "{tag} {size}");
    }
}
