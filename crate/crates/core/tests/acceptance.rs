//! Acceptance criteria. Each test writes one `PASS`/`FAIL` line straight to
//! stdout (bypassing the test harness capture) and then asserts.

use num_complex::Complex64;
use sparse_trig::greedy::{
    harmonic_target, wcga, Backend, Coefficients, GreedyOptions, TrigDictionary,
};
use sparse_trig::harness::{execute, fit_level, gaussian_target, preset, CheckKind, Experiment, Status, Summary};
use sparse_trig::layered::g_p_m_detailed;
use sparse_trig::quadrature::{fejer_kernel, is_nl_net, sparse_grid, Knot, KnotSet, Web};
use sparse_trig::trig::{analyze, block_of, compositions, compositions_upto, norm, sample, Exponent, QuadratureOptions};
use sparse_trig::{FrequencyIndex, IndexSet, TrigPolynomial};
use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::io::Write;

fn report(id: u32, name: &str, passed: bool, detail: &str) {
    let verdict = if passed { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "acceptance {id:>2} {verdict} {name}: {detail}");
}

fn soft_report(id: u32, name: &str, passed: bool, detail: &str) {
    let verdict = if passed { "PASS" } else { "WARN" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "acceptance {id:>2} {verdict} {name}: {detail}");
}

fn random_poly(set: &IndexSet, seed: u64) -> TrigPolynomial {
    let mut r = sparse_trig::rng::stream(seed, 9);
    let mut t = TrigPolynomial::zero(set.dim);
    for k in set.members() {
        let c = Complex64::new(sparse_trig::rng::normal(&mut r), sparse_trig::rng::normal(&mut r));
        t.set(k, c);
    }
    t
}

fn checks_line(s: &Summary) -> String {
    s.checks
        .iter()
        .map(|c| format!("{} [{}]", c.detail, if c.passed { "ok" } else { "breach" }))
        .collect::<Vec<_>>()
        .join("; ")
}

fn asserted_pass(s: &Summary) -> bool {
    s.checks.iter().filter(|c| c.kind == CheckKind::Asserted).all(|c| c.passed)
}

#[test]
fn criterion_01_exactness_suite() {
    let opts = QuadratureOptions::default();
    let mut worst_parseval: f64 = 0.0;
    let mut worst_roundtrip: f64 = 0.0;
    let mut partition_ok = true;
    let sets = [
        IndexSet::step_cross(1, 8),
        IndexSet::step_cross(2, 6),
        IndexSet::step_cross(3, 4),
        IndexSet::cube(2, 7),
        IndexSet::hyperbolic_cross(2, 20),
    ];
    for (i, set) in sets.iter().enumerate() {
        for seed in 0..4 {
            let t = random_poly(set, 10 * i as u64 + seed);
            let l2 = norm(&t, Exponent::P(2.0), &opts).unwrap();
            worst_parseval = worst_parseval.max((l2 - t.l2_norm()).abs() / t.l2_norm());
            let sizes: Vec<usize> = set.max_abs().iter().map(|&m| (2 * m as usize + 1).next_power_of_two()).collect();
            let back = analyze(&sample(&t, &sizes).unwrap(), set).unwrap();
            worst_roundtrip = worst_roundtrip.max(back.max_abs_diff(&t));
            let blocks = t.blocks();
            let mut sum = TrigPolynomial::zero(set.dim);
            for (s, part) in &blocks {
                partition_ok &= part.keys().all(|k| &block_of(&k.0) == s);
                sum = sum.add(part).unwrap();
            }
            partition_ok &= sum == t && blocks.values().map(|b| b.len()).sum::<usize>() == t.len();
        }
    }
    let mut cardinality_ok = true;
    let mut checked = 0usize;
    for d in 1..=3usize {
        for s in compositions_upto(12, d) {
            let members = IndexSet::dyadic_block(s.clone()).members();
            let distinct: BTreeSet<&FrequencyIndex> = members.iter().collect();
            let expected = 1usize << s.iter().sum::<u32>();
            cardinality_ok &= members.len() == expected
                && distinct.len() == expected
                && members.iter().all(|k| block_of(&k.0) == s);
            // Per-axis count by scanning the whole band window.
            let axis_product: usize = s
                .iter()
                .map(|&sj| {
                    let w = 1i64 << sj;
                    (-w..=w).filter(|&k| block_of(&[k]) == vec![sj]).count()
                })
                .product();
            cardinality_ok &= axis_product == expected;
            checked += 1;
        }
    }
    let passed = worst_parseval <= 1e-10 && worst_roundtrip <= 1e-12 && partition_ok && cardinality_ok;
    report(
        1,
        "exactness suite",
        passed,
        &format!(
            "Parseval {worst_parseval:.2e}, analyze/sample {worst_roundtrip:.2e}, partition {partition_ok}, \
             |rho(s)| = 2^|s| on {checked} blocks {cardinality_ok}"
        ),
    );
    assert!(passed);
}

#[test]
fn criterion_02_ia_invariants() {
    let runs = sparse_trig::par::map_range(100, |i| {
        let seed = i as u64;
        let bounds: Vec<u64> = if i % 2 == 0 { vec![6] } else { vec![3, 3] };
        let p = if i % 3 == 0 { 3.0 } else { 4.0 };
        let m = 16 + (i * 37) % 241;
        let dict = TrigDictionary::for_box(&bounds, p).unwrap();
        let t = if i % 4 < 2 {
            harmonic_target(&dict, seed)
        } else {
            gaussian_target(&dict, seed)
        }
        .scale(0.5 + (i % 5) as f64);
        let opts = GreedyOptions {
            backend: Backend::Grid,
            ..GreedyOptions::default()
        };
        let out = g_p_m_detailed(&t, m, p, &opts).unwrap();
        let trace = out.trace.as_ref().unwrap();
        let mut formal_ok = true;
        for s in &trace.steps {
            match s.coeffs.as_ref().unwrap() {
                Coefficients::Rational { plus, minus, denominator } => {
                    let total: u64 = plus.iter().sum::<u64>() + minus.iter().sum::<u64>();
                    formal_ok &= *denominator == s.step as u64 && total == *denominator;
                }
                _ => formal_ok = false,
            }
        }
        let Coefficients::Rational { plus, minus, denominator } = &trace.coefficients else {
            return (false, false, 0u64, 0.0);
        };
        let net: Vec<i64> = plus.iter().zip(minus).map(|(&a, &b)| a as i64 - b as i64).collect();
        let cancelled: u64 = plus.iter().zip(minus).map(|(&a, &b)| 2 * a.min(b)).sum();
        // Net A-norm of G_m relative to the formal one; below 1 when +phi and -phi both occur.
        let net_fraction = net.iter().map(|a| a.unsigned_abs()).sum::<u64>() as f64 / *denominator as f64;
        // Coefficients of the rescaled approximant over the selected atoms.
        let quantum = out.scale / *denominator as f64;
        let sel_dict = TrigDictionary::for_support(t.dim(), t.keys(), p).unwrap();
        let coords = sel_dict.coordinates(&out.approximant).unwrap();
        let mut multiple_ok = true;
        for (atom, &a) in trace.selected.iter().zip(&net) {
            let idx = sel_dict.position(&atom.id()).unwrap();
            let ratio = coords[idx] / quantum;
            multiple_ok &= (ratio - a as f64).abs() <= 1e-9 * (*denominator as f64);
        }
        (formal_ok && net_fraction <= 1.0, multiple_ok, cancelled, net_fraction)
    });
    let formal = runs.iter().filter(|r| r.0).count();
    let multiples = runs.iter().filter(|r| r.1).count();
    let with_cancel = runs.iter().filter(|r| r.2 > 0).count();
    let min_net = runs.iter().map(|r| r.3).fold(f64::INFINITY, f64::min);
    let passed = formal == 100 && multiples == 100;
    report(
        2,
        "IA invariants",
        passed,
        &format!(
            "signed counts sum to m in {formal}/100 runs, coefficients are integer multiples of ||t||_A/m in \
             {multiples}/100; {with_cancel} runs selected both signs of an atom, net/formal A-norm >= {min_net:.3}"
        ),
    );
    assert!(passed);
}

/// Sorted atom energies by direct quadrature: the best m-term `L_2` errors.
fn thresholding_residuals(f: &TrigPolynomial, dict: &TrigDictionary) -> Vec<f64> {
    let sizes: Vec<usize> = dict.bounds.iter().map(|&n| (2 * n as usize + 2).next_power_of_two()).collect();
    let fx = sample(f, &sizes).unwrap();
    let count = fx.len() as f64;
    let mut energy: Vec<f64> = dict
        .atoms()
        .iter()
        .map(|a| {
            let ip: f64 = (0..fx.len()).map(|i| fx.samples()[i].re * a.eval(&fx.node(i))).sum::<f64>() / count;
            ip * ip / a.l2_sq()
        })
        .collect();
    energy.sort_by(|a, b| b.total_cmp(a));
    (1..=energy.len()).map(|m| energy[m..].iter().rev().sum::<f64>().sqrt()).collect()
}

#[test]
fn criterion_03_l2_oracle_equivalence() {
    let boxes: [&[u64]; 5] = [&[7], &[2, 3], &[4, 4], &[8, 8], &[16, 16]];
    let worst = sparse_trig::par::map_range(100, |i| {
        let bounds = boxes[i % boxes.len()];
        let dict = TrigDictionary::for_box(bounds, 2.0).unwrap();
        let f = gaussian_target(&dict, 1000 + i as u64);
        let oracle = thresholding_residuals(&f, &dict);
        let steps = dict.len().min(200);
        let tr = wcga(&f, &dict, 1.0, steps, 0.0, &GreedyOptions::default()).unwrap();
        tr.steps
            .iter()
            .enumerate()
            .map(|(m, s)| (s.residual_p - oracle[m]).abs())
            .fold(0.0, f64::max)
    });
    let worst = worst.into_iter().fold(0.0, f64::max);
    let largest = TrigDictionary::for_box(&[16, 16], 2.0).unwrap().len();
    let passed = worst <= 1e-10 && largest == 1089;
    report(
        3,
        "L2 oracle equivalence",
        passed,
        &format!("max residual gap {worst:.2e} over 100 seeds, largest dictionary {largest}"),
    );
    assert!(passed);
}

fn preset_criterion(id: u32, name: &str, preset_id: &str) {
    let config = preset(preset_id).unwrap();
    let out = execute(&config).unwrap();
    let s = &out.summary;
    let passed = asserted_pass(s);
    let slope = s.fit.as_ref().map_or("none".into(), |f| format!("{:.4}", f.slope));
    report(
        id,
        name,
        passed,
        &format!("preset {preset_id}, pooled slope {slope}; {}", checks_line(s)),
    );
    assert!(passed, "{s:#?}");
}

#[test]
fn criterion_04_lp_rate() {
    preset_criterion(4, "IA rate in L_4", "ia-box-lp");
}

#[test]
fn criterion_05_sup_rate() {
    preset_criterion(5, "IA rate in the uniform norm", "ia-box-sup");
}

#[test]
fn criterion_06_layered_w_l2() {
    preset_criterion(6, "layered method on W^1.5_2 in L_2", "layered-w-l2");
}

#[test]
fn criterion_07_kernel_l2() {
    preset_criterion(7, "layered method on F_1.5 in L_2", "kernel-l2");
}

#[test]
fn criterion_08_fejer_suite() {
    let opts = QuadratureOptions::default();
    let mut worst_l1: f64 = 0.0;
    let mut worst_min: f64 = 0.0;
    let mut worst_sup: f64 = 0.0;
    let mut band = (f64::INFINITY, 0.0f64);
    for n in [8u64, 16, 32, 64, 128, 256] {
        let k = fejer_kernel(&[n]).unwrap();
        let g = sample(&k, &[16 * n as usize]).unwrap();
        worst_l1 = worst_l1.max((g.mean_abs() - 1.0).abs());
        worst_min = worst_min.min(g.min_real());
        worst_sup = worst_sup.max((g.sup_norm() / n as f64 - 1.0).abs());
        for q in [1.5, 2.0, 3.0, 4.0, 8.0] {
            let v = norm(&k, Exponent::P(q), &opts).unwrap() / (n as f64).powf(1.0 - 1.0 / q);
            band = (band.0.min(v), band.1.max(v));
        }
    }
    let passed = worst_l1 <= 1e-10 && worst_min >= -1e-12 && worst_sup <= 1e-9 && band.0 >= 0.2 && band.1 <= 1.0 + 1e-9;
    report(
        8,
        "Fejer kernel suite",
        passed,
        &format!(
            "| ||K||_1 - 1 | {worst_l1:.2e}, min {worst_min:.2e}, | ||K||_inf/N - 1 | {worst_sup:.2e}, \
             ||K||_q/N^(1-1/q) in [{:.4}, {:.4}]",
            band.0, band.1
        ),
    );
    assert!(passed);
}

fn irrational_points(count: usize, d: usize) -> KnotSet {
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
fn criterion_09_sparse_grid_facts() {
    let mut inclusion_ok = true;
    for d in 1..=3usize {
        for n in 0..=12u32 {
            let sg = sparse_grid(n, d);
            let webs: Vec<Web> = compositions(n, d).into_iter().map(Web::new).collect();
            inclusion_ok &= sg.all_exact() && sg.points.iter().all(|k| webs.iter().all(|w| w.contains(k)));
        }
    }
    let mut width: f64 = 1.0;
    for d in 1..=3usize {
        let ratios: Vec<f64> = (4..=12u32)
            .map(|n| sparse_grid(n, d).len() as f64 / (2f64.powi(n as i32) * (n as f64).powi(d as i32 - 1)))
            .collect();
        let hi = ratios.iter().cloned().fold(0.0, f64::max);
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        width = width.max(hi / lo);
    }
    let mut net_ok = true;
    for (n, l, d) in [(6u32, 3u32, 2usize), (8, 5, 2), (5, 2, 3), (7, 1, 1)] {
        let x = sparse_grid(n, d).union(&irrational_points(1 << l, d)).unwrap();
        net_ok &= is_nl_net(&x, n, l).is_net && !is_nl_net(&x, n, l - 1).is_net;
    }
    let passed = inclusion_ok && width <= 4.0 && net_ok;
    report(
        9,
        "sparse grid facts",
        passed,
        &format!("SG(n) on every web {inclusion_ok}, size ratio band width {width:.3}, net levels {net_ok}"),
    );
    assert!(passed);
}

#[test]
fn criterion_10_cubature_decay() {
    let config = preset("cubature-sparse-grid").unwrap();
    let out = execute(&config).unwrap();
    let s = &out.summary;
    let passed = asserted_pass(s);
    let fit = s.fit.as_ref().unwrap();
    // Same level fit on the mean error of the random class samples, reported only:
    // random phases decay faster than the class worst case.
    let sample_rows: Vec<[f64; 2]> = config_levels(&config)
        .into_iter()
        .map(|n| {
            let e: Vec<f64> = out
                .rows
                .iter()
                .filter(|r| r.regime == "cubature/sample" && r.n == Some(n))
                .map(|r| r.error)
                .collect();
            [n as f64, e.iter().sum::<f64>() / e.len() as f64]
        })
        .collect();
    let sample_slope = fit_level(&sample_rows, 1.0).map_or(f64::NAN, |f| f.slope);
    report(
        10,
        "sparse grid cubature decay",
        passed,
        &format!(
            "preset cubature-sparse-grid, supremum slope {:.4}, mean sample slope {sample_slope:.4}; {}",
            fit.slope,
            checks_line(s)
        ),
    );
    assert!(passed, "{s:#?}");
}

fn config_levels(config: &sparse_trig::harness::ExperimentConfig) -> Vec<u32> {
    match &config.experiment {
        Experiment::Cubature { n, .. } => n.clone(),
        _ => Vec::new(),
    }
}

#[test]
fn criterion_11_lebesgue_monitor() {
    let config = preset("lebesgue-monitor").unwrap();
    let out = execute(&config).unwrap();
    let s = &out.summary;
    let ok = s.status == Status::Pass;
    soft_report(11, "Lebesgue-type monitor", ok, &checks_line(s));
    // Monitored only: a breach is a warning (exit code 2), never a failure.
    assert_ne!(s.status, Status::Fail);
}
