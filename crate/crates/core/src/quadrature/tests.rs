use super::*;
use crate::classes::ClassSpec;
use crate::trig::{compositions, norm, Exponent, FrequencyIndex, IndexSet, QuadratureOptions, TrigPolynomial};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::{PI, TAU};

fn dense_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| TAU * i as f64 / n as f64 + 1e-3).collect()
}

#[test]
fn fejer_order_one_is_constant() {
    let k = fejer_kernel(&[1]).unwrap();
    assert_eq!(k.len(), 1);
    assert_eq!(k.mean(), Complex64::new(1.0, 0.0));
    let k = fejer_kernel(&[1, 1, 1]).unwrap();
    assert_eq!(k.len(), 1);
}

#[test]
fn fejer_coefficients_are_triangular() {
    let k = fejer_kernel(&[4]).unwrap();
    assert_eq!(k.len(), 7);
    for kk in -3i64..=3 {
        let c = k.get_slice(&[kk]);
        assert!((c.re - (1.0 - kk.abs() as f64 / 4.0)).abs() < 1e-15);
    }
    let g = crate::trig::sample(&k, &[256]).unwrap();
    assert!(g.min_real() >= -1e-12);
}

#[test]
fn fejer_closed_form_matches_coefficients() {
    for n in [1u64, 3, 8, 17] {
        let k = fejer_kernel(&[n]).unwrap();
        for x in dense_grid(500) {
            let direct = k.eval(&[x]).re;
            assert!((direct - fejer_closed_form(n, x)).abs() < 1e-10, "N = {n}, x = {x}");
        }
        assert!((fejer_closed_form(n, 0.0) - n as f64).abs() < 1e-12);
    }
}

#[test]
fn fejer_norms() {
    let opts = QuadratureOptions::default();
    for n in [8u64, 16, 32, 64, 128, 256] {
        let k = fejer_kernel(&[n]).unwrap();
        let g = crate::trig::sample(&k, &[8 * n as usize]).unwrap();
        assert!((g.mean_abs() - 1.0).abs() < 1e-10);
        assert!((g.sup_norm() / n as f64 - 1.0).abs() < 1e-9);
        for q in [2.0, 4.0] {
            let v = norm(&k, Exponent::P(q), &opts).unwrap() / (n as f64).powf(1.0 - 1.0 / q);
            assert!((0.2..=1.0 + 1e-9).contains(&v), "N = {n}, q = {q}: {v}");
        }
    }
    // Multivariate: unit L_1 norm and ϑ(N)^{1-1/q} scaling.
    let k = fejer_kernel(&[8, 4]).unwrap();
    let g = crate::trig::sample(&k, &[64, 32]).unwrap();
    assert!((g.mean_abs() - 1.0).abs() < 1e-10);
    let ratios: Vec<f64> = [[4u64, 4], [8, 8], [16, 8], [32, 16]]
        .iter()
        .map(|n| {
            let k = fejer_kernel(n).unwrap();
            let theta = n.iter().map(|&v| (2 * v + 1) as f64).product::<f64>();
            norm(&k, Exponent::P(2.0), &opts).unwrap() / theta.powf(0.5)
        })
        .collect();
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(hi / lo < 1.5, "{ratios:?}");
}

#[test]
fn fejer_rejects_order_zero() {
    assert!(fejer_kernel(&[3, 0]).is_err());
    assert!(fejer_kernel(&[]).is_err());
}

#[test]
fn exact_knots_are_reduced() {
    let k = Knot::exact(vec![4, 0, 3], vec![3, 5, 2]).unwrap();
    assert_eq!(
        k,
        Knot::Exact {
            num: vec![1, 0, 3],
            den_pow: vec![1, 0, 2]
        }
    );
    let x = k.point();
    assert!((x[0] - PI / 2.0).abs() < 1e-15 && x[1] == 0.0);
}

#[test]
fn one_dimensional_sparse_grid_is_the_full_grid() {
    for n in 0..8u32 {
        let sg = sparse_grid(n, 1);
        assert_eq!(sg.len(), 1 << n);
        let mut xs: Vec<f64> = sg.points.iter().map(|k| k.point()[0]).collect();
        xs.sort_by(|a, b| a.total_cmp(b));
        for (i, x) in xs.iter().enumerate() {
            assert!((x - PI * i as f64 / (1u64 << n) as f64).abs() < 1e-14);
        }
    }
}

/// Counts the union by reduced denominators: a point with reduced
/// exponents `b` appears iff `Σ b_j ≤ n`, and there are `∏ φ(b_j)` of them
/// with `φ(0) = 1`, `φ(b) = 2^{b-1}`.
fn sg_size_by_denominators(n: u32, d: usize) -> u64 {
    (0..=n)
        .flat_map(|l| compositions(l, d))
        .map(|b| b.iter().map(|&v| if v == 0 { 1u64 } else { 1 << (v - 1) }).product::<u64>())
        .sum()
}

#[test]
fn sparse_grid_sizes_match_counting_oracle() {
    for d in 1..=3 {
        for n in 0..=8 {
            assert_eq!(sparse_grid(n, d).len() as u64, sg_size_by_denominators(n, d), "n = {n}, d = {d}");
        }
    }
    // d = 2, n = 2: grids (0,2), (1,1), (2,0) share the origin and (π/2, 0), (0, π/2).
    assert_eq!(sparse_grid(2, 2).len(), 8);
    // Positive parts only: the single grid (1,1) at n = 2.
    assert_eq!(sparse_grid_with(2, 2, 1).len(), 4);
}

#[test]
fn sparse_grid_lies_on_every_web_of_its_level() {
    for d in 1..=3 {
        for n in 0..=7 {
            let sg = sparse_grid(n, d);
            let report = is_nl_net(&sg, n, 0);
            assert_eq!(report.worst_count, 0, "n = {n}, d = {d}");
            assert!(report.is_net && !report.approximate);
        }
    }
}

#[test]
fn float_knots_use_tolerance() {
    let web = Web::new(vec![2, 1]);
    assert!(web.contains(&Knot::float(vec![PI / 4.0, 0.3])));
    assert!(!web.contains(&Knot::float(vec![PI / 3.0, 0.3])));
    let exact = Knot::exact(vec![1, 1], vec![2, 3]).unwrap();
    assert!(web.contains(&exact));
    assert!(!Web::new(vec![1, 2]).contains(&exact));
}

fn generic_points(count: usize, d: usize) -> KnotSet {
    let pts = (0..count)
        .map(|i| {
            Knot::float(
                (0..d)
                    .map(|j| PI * ((i as f64 + 1.0) * (2f64.sqrt() + j as f64 * 3f64.sqrt())).fract())
                    .collect(),
            )
        })
        .collect();
    KnotSet::new(d, pts, None).unwrap()
}

#[test]
fn added_generic_points_set_the_net_level() {
    for (n, l) in [(4u32, 2u32), (5, 3), (6, 0)] {
        let x = sparse_grid(n, 2).union(&generic_points(1 << l, 2)).unwrap();
        assert!(is_nl_net(&x, n, l).is_net);
        if l > 0 {
            let r = is_nl_net(&x, n, l - 1);
            assert!(!r.is_net);
            assert_eq!(r.worst_count, 1 << l);
        }
        assert!(is_nl_net(&x, n, l).approximate);
    }
}

#[test]
fn single_irrational_point_is_a_level_zero_net() {
    let x = KnotSet::new(2, vec![Knot::float(vec![PI / 3.0, PI / 3.0])], None).unwrap();
    for n in 0..6 {
        let r = is_nl_net(&x, n, 0);
        assert!(r.is_net);
        assert_eq!(r.worst_count, 1);
    }
}

#[test]
fn knot_set_json_round_trip() {
    let x = smolyak_cubature(3, 2).unwrap();
    let s = x.to_json().unwrap();
    assert!(s.contains("\"den_pow\""));
    assert_eq!(KnotSet::from_json(&s).unwrap(), x);
    let y = generic_points(3, 2);
    assert_eq!(KnotSet::from_json(&y.to_json().unwrap()).unwrap(), y);
    assert!(KnotSet::from_json(r#"{"d":1,"points":[{"num":[1],"den_pow":[1]}],"weights":[0.5,0.5]}"#).is_err());
}

#[test]
fn cubature_needs_weights() {
    let f = TrigPolynomial::constant(2, 1.0);
    assert!(matches!(cubature(&f, &sparse_grid(3, 2)), Err(crate::Error::MissingWeights)));
}

#[test]
fn constant_integrates_with_normalized_weights() {
    for d in 1..=3 {
        for n in 0..=6 {
            let x = smolyak_cubature(n, d).unwrap();
            let total: f64 = x.weights().unwrap().iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "n = {n}, d = {d}: {total}");
            let v = cubature(&TrigPolynomial::constant(d, 2.5), &x).unwrap();
            assert!((v - 2.5).abs() < 1e-12);
        }
    }
}

#[test]
fn rectangle_rule_is_exact_below_half_the_grid() {
    let n = 5u32;
    let (x, _) = dirichlet_cardinal(n).unwrap();
    let m = 1i64 << n;
    for k in -(m - 1)..m {
        let t = TrigPolynomial::monomial(vec![k], Complex64::new(1.0, 0.0));
        let v = cubature_direct(&t, &x).unwrap();
        let expect = if k == 0 { 1.0 } else { 0.0 };
        assert!((v - expect).abs() < 1e-12, "k = {k}");
    }
    let t = TrigPolynomial::monomial(vec![m], Complex64::new(1.0, 0.0));
    assert!((cubature_direct(&t, &x).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn smolyak_is_exact_on_the_hyperbolic_cross() {
    for d in [1usize, 2] {
        for n in 0..=6u32 {
            let x = smolyak_cubature(n, d).unwrap();
            let symbol = CubatureSymbol::new(&x).unwrap();
            for k in IndexSet::step_cross(d, n).members() {
                let e = symbol.error_at(&k.0).norm();
                assert!(e < 1e-12, "n = {n}, k = {:?}: {e}", k.0);
            }
            // Something in the next layer is not integrated exactly.
            if n >= 1 {
                let worst = IndexSet::layer(d, n + 1)
                    .members()
                    .iter()
                    .map(|k| symbol.error_at(&k.0).norm())
                    .fold(0.0, f64::max);
                assert!(worst > 0.5, "n = {n}, d = {d}");
            }
        }
    }
}

#[test]
fn symbol_agrees_with_direct_summation() {
    let x = smolyak_cubature(4, 2).unwrap();
    let symbol = CubatureSymbol::new(&x).unwrap();
    let pts: Vec<Vec<f64>> = x.points.iter().map(|k| k.point()).collect();
    let w = x.weights().unwrap();
    for k in [[0i64, 0], [3, 5], [-16, 1], [17, -32], [40, 8]] {
        let direct: Complex64 = pts
            .iter()
            .zip(w)
            .map(|(p, &wj)| Complex64::from_polar(wj, k[0] as f64 * p[0] + k[1] as f64 * p[1]))
            .sum();
        assert!((direct - symbol.at(&k)).norm() < 1e-12, "k = {k:?}");
    }
}

#[test]
fn fast_and_direct_cubature_agree() {
    let spec = ClassSpec::H { r: 1.5, q: 2.0, d: 2 };
    let f = crate::classes::sample_class(spec, &IndexSet::step_cross(2, 7), 3).unwrap().f;
    let x = smolyak_cubature(4, 2).unwrap();
    let a = cubature(&f, &x).unwrap();
    let b = cubature_direct(&f, &x).unwrap();
    assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    let g = |p: &[f64]| f.eval(p).re;
    assert!((cubature_fn(g, &x).unwrap() - a).abs() < 1e-12);
}

#[test]
fn block_norms_match_enumeration() {
    let x = smolyak_cubature(3, 2).unwrap();
    let symbol = CubatureSymbol::new(&x).unwrap();
    for s in [vec![0u32, 0], vec![2, 1], vec![4, 0], vec![5, 3], vec![6, 6]] {
        let direct: f64 = IndexSet::dyadic_block(s.clone())
            .members()
            .iter()
            .map(|k| symbol.error_at(&k.0).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!((direct - symbol.block_norm(&s)).abs() < 1e-10 * direct.max(1.0), "s = {s:?}");
    }
}

#[test]
fn aligned_member_attains_the_supremum() {
    let x = smolyak_cubature(3, 2).unwrap();
    for spec in [
        ClassSpec::H { r: 1.5, q: 2.0, d: 2 },
        ClassSpec::B { r: 1.5, q: 2.0, theta: 2.0, d: 2 },
        ClassSpec::B { r: 1.5, q: 2.0, theta: 1.0, d: 2 },
        ClassSpec::HTheta { r: 2.0, q: 2.0, theta: 3.0, d: 2 },
    ] {
        let sup = aligned_sup(spec, &x, 7).unwrap();
        let f = aligned_member(spec, &x, 7).unwrap();
        assert!(f.is_real(1e-12));
        let err = (f.mean().re - cubature(&f, &x).unwrap()).abs();
        assert!((err - sup).abs() < 1e-10 * sup, "{spec:?}: {err} vs {sup}");
        let cn = crate::classes::class_norm(&f, spec).unwrap();
        assert!(cn <= 1.0 + 1e-9, "{spec:?}: class norm {cn}");
        let stats = class_cubature_error(spec, &x, 7, &[1, 2, 3]).unwrap();
        assert!(stats.max <= sup * (1.0 + 1e-9));
    }
    assert!(aligned_sup(ClassSpec::H { r: 1.5, q: 1.5, d: 2 }, &x, 5).is_err());
}

#[test]
fn reference_curves() {
    let (lo, hi) = cubature_reference(1.5, 4, 2);
    assert!((lo - 2f64.powf(-6.0) * 2.0).abs() < 1e-15);
    assert!((hi - 2f64.powf(-6.0) * 4.0).abs() < 1e-15);
}

#[test]
fn cardinal_functions_interpolate() {
    let (x, psis) = dirichlet_cardinal(4).unwrap();
    let pts: Vec<f64> = x.points.iter().map(|k| k.point()[0]).collect();
    for (j, psi) in psis.iter().enumerate() {
        for (i, &xi) in pts.iter().enumerate() {
            let v = psi.eval(&[xi]);
            let expect = if i == j { 1.0 } else { 0.0 };
            assert!((v - expect).norm() < 1e-12);
        }
    }
    // Anything in the span is reproduced from its values.
    let mut f = TrigPolynomial::zero(1);
    for (j, psi) in psis.iter().enumerate() {
        f = f.add(&psi.scale((j as f64 * 0.7).sin())).unwrap();
    }
    let g = recovery_apply(&f, &x, &psis).unwrap();
    assert!(f.max_abs_diff(&g) < 1e-8);
}

#[test]
fn dirichlet_recovery_reproduces_low_degree() {
    let n = 4u32;
    let (x, psis) = dirichlet_cardinal(n).unwrap();
    let mut r = crate::rng::stream(5, 0);
    let half = (1i64 << (n - 1)) - 1;
    let mut t = TrigPolynomial::zero(1);
    for k in 0..=half {
        let c = Complex64::new(crate::rng::normal(&mut r), if k == 0 { 0.0 } else { crate::rng::normal(&mut r) });
        t.set(FrequencyIndex(vec![k]), c);
        t.set(FrequencyIndex(vec![-k]), c.conj());
    }
    let g = recovery_apply(&t, &x, &psis).unwrap();
    assert!(t.sub(&g).unwrap().pruned(1e-12).is_empty());
}

#[test]
fn zero_recovery_functions() {
    let (x, psis) = dirichlet_cardinal(3).unwrap();
    let zeros: Vec<TrigPolynomial> = psis.iter().map(|_| TrigPolynomial::zero(1)).collect();
    let spec = ClassSpec::H { r: 1.5, q: 2.0, d: 1 };
    let stats = recovery_error(spec, &x, &zeros, 2.0, 6, &[1, 2]).unwrap();
    for (e, seed) in stats.errors.iter().zip([1u64, 2]) {
        let f = crate::classes::sample_class(spec, &IndexSet::step_cross(1, 6), seed).unwrap().f;
        assert!((e - f.l2_norm()).abs() < 1e-14);
    }
    assert!(recovery_apply(&TrigPolynomial::zero(1), &x, &psis[1..]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn web_membership_is_exact_for_sparse_grid_points(n in 1u32..12, d in 1usize..4, seed in 0u64..1000) {
        // A random point of a random generating grid lies on every web of level n.
        let mut r = crate::rng::stream(seed, 0);
        let levels = {
            let all = compositions(n, d);
            all[(crate::rng::uniform(&mut r) * all.len() as f64) as usize % all.len()].clone()
        };
        let num: Vec<i64> = levels
            .iter()
            .map(|&b| (crate::rng::uniform(&mut r) * (1u64 << b) as f64) as i64)
            .collect();
        let knot = Knot::exact(num, levels).unwrap();
        for s in compositions(n, d) {
            prop_assert!(Web::new(s).contains(&knot));
        }
    }

    #[test]
    fn fejer_is_nonnegative(n in 1u64..40) {
        let k = fejer_kernel(&[n]).unwrap();
        let g = crate::trig::sample(&k, &[crate::trig::next_pow2(4 * n as usize)]).unwrap();
        prop_assert!(g.min_real() >= -1e-12);
        prop_assert!((g.mean_abs() - 1.0).abs() < 1e-10);
    }
}
