use proptest::prelude::*;

use choquet_core::bratteli::{embed_to_level, fibonacci_diagram, uhf_diagram};
use choquet_core::discrete_choquet::{choquet_integral, Capacity};
use choquet_core::linalg::{eigvalsh, random_unitary, seeded_rng, HermitianMatrix, SquareMatrix};
use choquet_core::multimatrix::{functional_calculus, rank_vector_at, spectrum, AlgebraShape, Element, Multiplicity, RankVector, SpectralMap};
use choquet_core::scale::{scale_map, RankFunction};
use choquet_core::trace_engine::choquet_formula;
use choquet_core::verifier::generate;
use num_complex::Complex64;

const TOL: f64 = 1e-9;

fn shapes() -> impl Strategy<Value = AlgebraShape> {
    prop::collection::vec(1usize..=4, 1..=3).prop_map(|ks| AlgebraShape::new(ks).unwrap())
}

fn hermitian(n: usize) -> impl Strategy<Value = HermitianMatrix> {
    prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), n * n).prop_map(move |entries| {
        let m = SquareMatrix::from_fn(n, |i, j| {
            let (re, im) = entries[i * n + j];
            let (tr, ti) = entries[j * n + i];
            if i == j {
                Complex64::new(re, 0.0)
            } else {
                Complex64::new(re + tr, im - ti)
            }
        });
        HermitianMatrix::new(m).unwrap()
    })
}

/// A random positive element together with a random increasing table on its shape.
fn instance() -> impl Strategy<Value = (Element, choquet_core::scale::LevelScale)> {
    (shapes(), any::<u64>()).prop_map(|(shape, seed)| {
        let mut rng = seeded_rng(seed);
        (generate::positive_element(&mut rng, &shape).unwrap(), generate::increasing_table(&mut rng, &shape).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigenvalues_sum_to_trace(m in (1usize..=6).prop_flat_map(hermitian)) {
        let s = eigvalsh(&m).unwrap();
        let norm = m.as_matrix().frobenius_norm();
        prop_assert!(s.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!((s.eigenvalues.iter().sum::<f64>() - m.trace()).abs() <= 1e-9 * (1.0 + norm));
    }

    #[test]
    fn eigenvalues_are_unitarily_invariant(m in (1usize..=6).prop_flat_map(hermitian), seed in any::<u64>()) {
        let u = random_unitary(m.size(), seed).unwrap();
        let a = eigvalsh(&m).unwrap().eigenvalues;
        let b = eigvalsh(&m.conjugate_by(&u)).unwrap().eigenvalues;
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-8, "{} vs {}", x, y);
        }
    }

    #[test]
    fn rank_vectors_increase_and_match_thresholds((a, _) in instance()) {
        let p = spectrum(&a, TOL).unwrap();
        prop_assert!(p.rank_vectors.windows(2).all(|w| w[0].lt(&w[1])));
        prop_assert!(p.distinct_values.windows(2).all(|w| w[0] > w[1]));
        prop_assert!(p.rank_vectors.last().unwrap().le(&a.shape().order_unit()));
        for (lambda, r) in p.distinct_values.iter().zip(&p.rank_vectors) {
            prop_assert_eq!(&rank_vector_at(&a, *lambda, TOL).unwrap(), r);
        }
    }

    #[test]
    fn indicator_of_upper_set_is_a_projection_of_the_right_rank((a, _) in instance(), pick in any::<prop::sample::Index>()) {
        let p = spectrum(&a, TOL).unwrap();
        let j = pick.index(p.distinct_values.len());
        let cut = p.distinct_values[j];
        let f = SpectralMap(p.distinct_values.iter().map(|&x| (x, if x >= cut { 1.0 } else { 0.0 })).collect());
        let q = functional_calculus(&a, &f, TOL).unwrap();
        let square = Element::new(q.blocks().iter().map(|b| {
            HermitianMatrix::new(b.as_matrix().mul(b.as_matrix())).unwrap()
        }).collect()).unwrap();
        prop_assert!(square.approx_eq(&q, 1e-9));
        let qs = spectrum(&q, TOL).unwrap();
        let rank = if qs.distinct_values[0] > 0.5 { qs.rank_vectors[0].clone() } else { a.shape().zero_rank() };
        prop_assert_eq!(&rank, &p.rank_vectors[j]);
    }

    #[test]
    fn trace_is_bounded_by_unit_value_times_norm((a, alpha) in instance()) {
        let (value, _) = choquet_formula(&a, &alpha, TOL).unwrap();
        let unit = alpha.value(&a.shape().order_unit()).unwrap();
        prop_assert!(value >= 0.0);
        prop_assert!(value <= unit * a.norm().unwrap() + 1e-9);
    }

    #[test]
    fn embedding_preserves_norm_and_spectrum(seed in any::<u64>(), fib in any::<bool>(), level in 1usize..=3) {
        let d = if fib { fibonacci_diagram(5).unwrap() } else { uhf_diagram(&[2, 3], 5).unwrap() };
        let mut rng = seeded_rng(seed);
        let a = generate::positive_element(&mut rng, d.shape_at(level).unwrap()).unwrap();
        let b = embed_to_level(&d, &a, level, level + 1).unwrap();
        prop_assert!((a.norm().unwrap() - b.norm().unwrap()).abs() <= 1e-9);
        let (pa, pb) = (spectrum(&a, TOL).unwrap(), spectrum(&b, TOL).unwrap());
        prop_assert_eq!(pa.distinct_values.len(), pb.distinct_values.len());
        for (x, y) in pa.distinct_values.iter().zip(&pb.distinct_values) {
            prop_assert!((x - y).abs() <= 1e-9);
        }
    }

    #[test]
    fn scale_map_is_additive_and_monotone(r in prop::collection::vec(0usize..5, 2), s in prop::collection::vec(0usize..5, 2)) {
        let m = Multiplicity(vec![vec![1, 1], vec![1, 0]]);
        let (r, s) = (RankVector(r), RankVector(s));
        let sum = RankVector(r.ranks().iter().zip(s.ranks()).map(|(a, b)| a + b).collect());
        let (mr, ms) = (scale_map(&r, &m).unwrap(), scale_map(&s, &m).unwrap());
        let msum = scale_map(&sum, &m).unwrap();
        prop_assert_eq!(msum.ranks().to_vec(), mr.ranks().iter().zip(ms.ranks()).map(|(a, b)| a + b).collect::<Vec<_>>());
        if r.le(&s) {
            prop_assert!(mr.le(&ms));
        }
    }

    #[test]
    fn discrete_integral_is_comonotone_additive_homogeneous_and_monotone(
        n in 1usize..=6,
        seed in any::<u64>(),
        t in 0.0f64..4.0,
    ) {
        use rand::Rng;
        let mut rng = seeded_rng(seed);
        let raw: Vec<f64> = (0..1u32 << n).map(|_| rng.random_range(0.0..1.0)).collect();
        // monotone closure over subsets
        let mut values = vec![0.0; 1 << n];
        for mask in 1..(1usize << n) {
            let mut v: f64 = raw[mask];
            for i in 0..n {
                if mask & (1 << i) != 0 {
                    v = v.max(values[mask ^ (1 << i)]);
                }
            }
            values[mask] = v;
        }
        let c = Capacity::new(n, values).unwrap();
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..3.0)).collect();
        // comonotone partner: an increasing function of x
        let y: Vec<f64> = x.iter().map(|v| v * v + 0.5).collect();
        let xy: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let (ix, iy, ixy) = (choquet_integral(&c, &x).unwrap(), choquet_integral(&c, &y).unwrap(), choquet_integral(&c, &xy).unwrap());
        prop_assert!((ixy - ix - iy).abs() <= 1e-10);
        let tx: Vec<f64> = x.iter().map(|v| t * v).collect();
        prop_assert!((choquet_integral(&c, &tx).unwrap() - t * ix).abs() <= 1e-10);
        let bigger: Vec<f64> = x.iter().map(|v| v + rng.random_range(0.0..1.0)).collect();
        prop_assert!(choquet_integral(&c, &bigger).unwrap() >= ix - 1e-10);
    }
}

#[test]
fn cluster_tol_zero_is_exact_on_exact_input() {
    let a = Element::diagonal(&[vec![2.0, 1.0, 1.0], vec![1.0, 0.25]]).unwrap();
    let p = spectrum(&a, 0.0).unwrap();
    assert_eq!(p.distinct_values, vec![2.0, 1.0, 0.25]);
    let shape = AlgebraShape::new(vec![3, 2]).unwrap();
    assert_eq!(p.rank_vectors.last().unwrap(), &shape.order_unit());
}
