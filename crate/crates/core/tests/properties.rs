use std::sync::Arc;

use polypart::cells::{cells_entered_line, parity, CellCounts, SignVector};
use polypart::equivariant::{hemisphere_fold, model_g};
use polypart::mollifier::eta;
use polypart::polyalg::{basis_dim, grad_bound};
use polypart::spectrum::{wht, Spectrum};
use polypart::{Embedding, MonomialBasis, Polynomial, VarietyKind, VarietySpec, XsPoint};
use proptest::prelude::*;

fn table(s: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-1000i64..1000, 1 << s)
}

fn sized_table() -> impl Strategy<Value = (usize, Vec<i64>)> {
    (0usize..=8).prop_flat_map(|s| (Just(s), table(s)))
}

fn xs_point(s: usize) -> impl Strategy<Value = XsPoint> {
    any::<u64>().prop_map(move |seed| XsPoint::random_point(s, seed).unwrap())
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

proptest! {
    #[test]
    fn transform_is_an_involution_up_to_scale((s, t) in sized_table()) {
        let back = Spectrum::of_table(s, t.clone()).unwrap().inverse_scaled();
        prop_assert_eq!(back, t.iter().map(|&x| x << s).collect::<Vec<_>>());
    }

    #[test]
    fn parseval((s, t) in sized_table()) {
        let g = Spectrum::of_table(s, t.clone()).unwrap();
        let lhs: i64 = g.values().iter().map(|v| v * v).sum();
        let rhs: i64 = t.iter().map(|v| v * v).sum::<i64>() << s;
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn relabeling_cells_twists_the_spectrum(s in 1usize..=6, seed in any::<u64>(), j in 1usize..=6) {
        prop_assume!(j <= s);
        let counts: Vec<u64> = (0..1u64 << s).map(|w| (w.wrapping_mul(seed | 1) >> 3) % 50).collect();
        let c = CellCounts::from_vec(s, counts).unwrap();
        let (g, fg) = (wht(&c), wht(&c.flipped(j)));
        for v in 0..1u32 << s {
            let sign = if parity(v, 1 << (j - 1)) == 1 { -1 } else { 1 };
            prop_assert_eq!(fg.get(v), sign * g.get(v));
        }
    }

    #[test]
    fn sign_vector_flip_is_an_involution(bits in 0u32..1 << 10, j in 1usize..=10) {
        let w = SignVector::new(bits, 10).unwrap();
        prop_assert_eq!(w.flipped(j).flipped(j), w);
        prop_assert_ne!(w.flipped(j).get(j), w.get(j));
    }

    #[test]
    fn basis_dim_matches_stars_and_bars(n in 1usize..=4, d in 0usize..=8) {
        prop_assert_eq!(basis_dim(n, d).unwrap(), binomial(n + d, d));
        prop_assert_eq!(MonomialBasis::new(n, d).unwrap().len(), binomial(n + d, d));
    }

    #[test]
    fn gradient_bound_dominates_unit_polynomials(
        n in 1usize..=3,
        d in 1usize..=4,
        seed in any::<u64>(),
        x in prop::collection::vec(-1.0f64..1.0, 3),
        r in 0.5f64..4.0,
    ) {
        let basis = Arc::new(MonomialBasis::new(n, d).unwrap());
        let x: Vec<f64> = x[..n].iter().map(|v| v * r / (n as f64).sqrt()).collect();
        let c: Vec<f64> = (0..basis.len()).map(|i| ((seed >> (i % 60)) & 7) as f64 - 3.5).collect();
        let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        let p = Polynomial::new(basis.clone(), c.iter().map(|v| v / norm).collect()).unwrap();
        let g = p.grad(&x).unwrap();
        let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!(gnorm <= grad_bound(&basis, r) * (1.0 + 1e-12));
    }

    #[test]
    fn eta_is_a_clamped_ramp(eps in 1e-6f64..1.0, t in -3.0f64..3.0) {
        let v = eta(eps, t);
        prop_assert!((0.0..=1.0).contains(&v));
        if t <= eps { prop_assert_eq!(v, 0.0); }
        if t >= 2.0 * eps { prop_assert_eq!(v, 1.0); }
    }

    #[test]
    fn flipping_a_block_negates_one_polynomial(x in xs_point(4), j in 1usize..=4) {
        let emb = Embedding::new(2, 4).unwrap();
        let p = emb.coeffs(&x).unwrap();
        let q = emb.coeffs(&x.flip(j).unwrap()).unwrap();
        for i in 0..4 {
            let expect: Vec<f64> = if i + 1 == j { p[i].iter().map(|c| -c).collect() } else { p[i].clone() };
            prop_assert_eq!(&q[i], &expect);
        }
    }

    #[test]
    fn model_map_is_equivariant(x in xs_point(4), j in 1usize..=4) {
        let (g, fg) = (model_g(&x), model_g(&x.flip(j).unwrap()));
        for v in 1..16u32 {
            let sign = if v >> (j - 1) & 1 == 1 { -1.0 } else { 1.0 };
            prop_assert_eq!(fg[v as usize - 1], sign * g[v as usize - 1]);
        }
    }

    #[test]
    fn hemisphere_fold_is_flip_invariant(x in xs_point(3), mask in 0u32..8) {
        let a = hemisphere_fold(&x).unwrap();
        let b = hemisphere_fold(&x.flip_mask(mask)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn lines_enter_at_most_degree_plus_one_cells(
        seed in any::<u64>(),
        degrees in prop::collection::vec(1usize..=3, 1..=3),
        a in prop::collection::vec(-1.0f64..1.0, 2),
        angle in 0.0f64..std::f64::consts::PI,
    ) {
        let polys: Vec<Polynomial> = degrees
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                let basis = Arc::new(MonomialBasis::new(2, d).unwrap());
                let c = (0..basis.len())
                    .map(|k| (seed.rotate_left((7 * i + 3 * k) as u32) % 2001) as f64 / 1000.0 - 1.0)
                    .collect();
                Polynomial::new(basis, c).unwrap()
            })
            .collect();
        let line = VarietySpec::build(2, VarietyKind::Line { point: a, dir: vec![angle.cos(), angle.sin()] }).unwrap();
        let cells = cells_entered_line(&line, &polys).unwrap();
        prop_assert!(cells.cells.len() <= degrees.iter().sum::<usize>() + 1);
    }
}
