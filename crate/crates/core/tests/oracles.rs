//! Engine values against oracles that share no code with it.

use std::f64::consts::PI;

use num_complex::Complex;
use rand::Rng;

use seminorm::engine::{crawford, numerical_radius, OptimizerConfig, SeminormContext};
use seminorm::harness::{check_inequality, CheckInputs, CheckStatus};
use seminorm::sampling::{ginibre, rng_from_seed};
use seminorm::{Matrix, MeanKind, StateClass};

type C = Complex<f64>;

/// Boundary of the numerical range of a 2×2 matrix: the ellipse with foci at
/// the eigenvalues and minor axis `sqrt(tr(A*A) - |λ₁|² - |λ₂|²)`.
fn ellipse_points(a: &Matrix, samples: usize) -> Vec<C> {
    let (p, q, r, s) = (a.get(0, 0), a.get(0, 1), a.get(1, 0), a.get(1, 1));
    let tr = p + s;
    let det = p * s - q * r;
    let disc = (tr * tr - det * 4.0).sqrt();
    let (l1, l2) = ((tr + disc) / 2.0, (tr - disc) / 2.0);
    let fro2: f64 = a.entries().iter().map(|z| z.norm_sqr()).sum();
    let minor = (fro2 - l1.norm_sqr() - l2.norm_sqr()).max(0.0).sqrt();
    let focal = (l1 - l2).norm();
    let major = (minor * minor + focal * focal).sqrt();
    let center = (l1 + l2) / 2.0;
    let dir = if focal > 0.0 { (l1 - l2) / focal } else { C::new(1.0, 0.0) };
    (0..samples)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / samples as f64;
            center + dir * C::new(0.5 * major * t.cos(), 0.5 * minor * t.sin())
        })
        .collect()
}

fn inside_ellipse(a: &Matrix) -> bool {
    // Origin is in the range iff the winding of the boundary around 0 is nonzero.
    let pts = ellipse_points(a, 4096);
    let mut winding = 0.0;
    for k in 0..pts.len() {
        let (u, v) = (pts[k], pts[(k + 1) % pts.len()]);
        winding += (v / u).arg();
    }
    winding.abs() > PI
}

#[test]
fn numerical_radius_matches_elliptical_range() {
    let mut rng = rng_from_seed(2024);
    for _ in 0..40 {
        let a: Matrix = ginibre(&mut rng, 2);
        let pts = ellipse_points(&a, 200_000);
        let oracle = pts.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let (v, _) = numerical_radius(&a);
        assert!((v - oracle).abs() <= 1e-8 * v.max(1.0), "{v} vs {oracle}");
    }
}

#[test]
fn crawford_matches_elliptical_range() {
    let mut rng = rng_from_seed(99);
    for k in 0..40 {
        let mut a: Matrix = ginibre(&mut rng, 2);
        if k % 2 == 1 {
            // Push the range away from the origin.
            let shift = C::from_polar(3.0, rng.random::<f64>() * 2.0 * PI);
            a = &a + &Matrix::identity(2).scale(shift);
        }
        let oracle = if inside_ellipse(&a) {
            0.0
        } else {
            ellipse_points(&a, 200_000).iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min)
        };
        let m = crawford(&a);
        assert!((m - oracle).abs() <= 1e-7 * m.max(1.0), "{m} vs {oracle}");
    }
}

fn random_density(rng: &mut impl Rng, n: usize) -> Vec<Vec<C>> {
    // Columns of a factor L, with rank drawn from 1..=n and ρ = LL*/‖L‖².
    let rank = rng.random_range(1..=n);
    let mut cols: Vec<Vec<C>> = (0..rank)
        .map(|_| (0..n).map(|_| C::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect())
        .collect();
    let total: f64 = cols.iter().flatten().map(|z| z.norm_sqr()).sum();
    for z in cols.iter_mut().flatten() {
        *z /= total.sqrt();
    }
    cols
}

/// `tr(ρK)` for `ρ = Σ l lᴴ`, written without the library's state types.
fn trace_form(k: &Matrix, cols: &[Vec<C>]) -> C {
    let n = k.dim();
    let mut acc = C::new(0.0, 0.0);
    for l in cols {
        for i in 0..n {
            for j in 0..n {
                acc += l[i].conj() * k.get(i, j) * l[j];
            }
        }
    }
    acc
}

#[test]
fn mixed_seminorm_against_dense_state_sampler() {
    let mut rng = rng_from_seed(7);
    let a: Matrix = ginibre(&mut rng, 3);
    let gram = a.gram();
    for mean in MeanKind::ALL {
        let mut best: f64 = 0.0;
        for _ in 0..100_000 {
            let rho = random_density(&mut rng, 3);
            let u = trace_form(&a, &rho).norm_sqr();
            let w = trace_form(&gram, &rho).re;
            best = best.max(seminorm::path_eval(mean, 0.5, u, w.max(0.0)).unwrap());
        }
        let sampled = best.sqrt();
        let engine = SeminormContext::new(&a)
            .unwrap()
            .seminorm(mean, 0.5, StateClass::Mixed, &OptimizerConfig::default())
            .unwrap()
            .value;
        assert!(sampled <= engine + 1e-12, "{mean}: sampler {sampled} above engine {engine}");
        assert!(engine - sampled <= 0.05 * engine, "{mean}: sampler {sampled} far below engine {engine}");
    }
}

#[test]
fn equality_biconditional_against_dense_state_sampler() {
    // Random pair in dimension 3: both sides of the biconditional are strict.
    let g = seminorm::harness::generate(seminorm::harness::GeneratorKind::Ginibre, 3, 11).a;
    let h = seminorm::harness::generate(seminorm::harness::GeneratorKind::Ginibre, 3, 12).a;
    let check = check_inequality("equality_characterization", &CheckInputs::pair(g.clone(), h.clone()), MeanKind::Arithmetic, 0.5, 1e-7).unwrap();
    assert_eq!(check.status, CheckStatus::Pass);

    let ba = h.adjoint().matmul(&g);
    let (ga, hb, sum) = (g.gram(), h.gram(), &g + &h);
    let sum_gram = sum.gram();
    let mut rng = rng_from_seed(11);
    let (mut sup, mut sa, mut sb, mut ss) = (f64::NEG_INFINITY, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100_000 {
        let rho = random_density(&mut rng, 3);
        let (fa, fb) = (trace_form(&g, &rho), trace_form(&h, &rho));
        sup = sup.max((trace_form(&ba, &rho) + fa.conj() * fb).re);
        sa = sa.max(0.5 * (fa.norm_sqr() + trace_form(&ga, &rho).re));
        sb = sb.max(0.5 * (fb.norm_sqr() + trace_form(&hb, &rho).re));
        ss = ss.max(0.5 * (trace_form(&sum, &rho).norm_sqr() + trace_form(&sum_gram, &rho).re));
    }
    let (sa, sb, ss) = (sa.sqrt(), sb.sqrt(), ss.sqrt());
    let v = &check.values;
    let scale = check.scale;
    assert!(sup <= v["witness_sup"] + 1e-9 * scale);
    assert!(v["witness_sup"] - sup <= 0.05 * scale);
    assert!(sa <= v["seminorm_a"] + 1e-12 && sb <= v["seminorm_b"] + 1e-12 && ss <= v["seminorm_sum"] + 1e-12);
    // Sampled sides agree with the engine on which side of equality we are.
    assert!(2.0 * sa * sb - sup > 1e-3 * scale);
    assert!(v["witness_gap"] > 1e-3 * scale);
    assert!(v["defect"] > 1e-3 * scale);
    assert!(sa + sb - ss > 0.0 || v["defect"] > 0.0);
}

#[test]
fn nilpotent_closed_forms_for_both_state_classes() {
    let a = Matrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]).unwrap();
    let ctx = SeminormContext::new(&a).unwrap();
    let want = [
        (MeanKind::Arithmetic, 2f64.sqrt()),
        (MeanKind::Geometric, (8.0 / (3.0 * 3f64.sqrt())).sqrt()),
        (MeanKind::Harmonic, (24.0 - 16.0 * 2f64.sqrt()).sqrt()),
    ];
    for (mean, value) in want {
        for class in [StateClass::Pure, StateClass::Mixed] {
            let got = ctx.seminorm(mean, 0.5, class, &OptimizerConfig::default()).unwrap().value;
            assert!((got - value).abs() < 1e-6, "{mean} {class}: {got} vs {value}");
        }
    }
}
