//! The equality case of the triangle inequality for `‖·‖_∇`.

use num_complex::Complex;

use super::checks::{finish, CheckInputs, PropertyCheck, Workbench, EQUALITY_CHECK};
use crate::engine::sphere_ascent;
use crate::error::Result;
use crate::linalg::{hermitian_eigen, HERMITIAN_TOL};
use crate::meanlib::MeanKind;
use crate::sampling::{complex_gaussian_vec, derive_seed, rng_from_seed};
use crate::states::{State, StateClass};
use crate::Matrix;

const RANDOM_STARTS: usize = 8;

type C = Complex<f64>;

/// `Σ_k x_k* K x_k` over the blocks of a stacked factor.
fn block_form(k: &Matrix, x: &[C]) -> C {
    let n = k.dim();
    x.chunks(n)
        .map(|xs| {
            let y = k.mul_vec(xs);
            xs.iter().zip(&y).fold(C::new(0.0, 0.0), |acc, (a, b)| acc + a.conj() * b)
        })
        .sum()
}

/// `f(b*a) + conj(f(a)) f(b)` at the state encoded by a unit factor.
fn witness_form(a: &Matrix, b: &Matrix, ba: &Matrix, x: &[C]) -> C {
    block_form(ba, x) + block_form(a, x).conj() * block_form(b, x)
}

/// Factor vector for a state, padded to `blocks` blocks.
fn factor_of(s: &State<f64>, blocks: usize) -> Result<Vec<C>> {
    let n = s.dim();
    let mut x = vec![C::new(0.0, 0.0); n * blocks];
    match s {
        State::Pure(p) => x[..n].copy_from_slice(p.vector()),
        State::Mixed(m) => {
            let e = hermitian_eigen(m.rho(), HERMITIAN_TOL)?;
            let rho_blocks = blocks.min(n);
            for k in 0..rho_blocks {
                let i = n - 1 - k;
                let w = e.values[i].max(0.0).sqrt();
                for (j, z) in e.vector(i).into_iter().enumerate() {
                    x[k * n + j] = z * w;
                }
            }
        }
    }
    Ok(x)
}

/// `sup_f Re(f(b*a) + conj(f(a)) f(b))` and the imaginary part at the maximizer.
pub(crate) fn witness_sup(a: &Matrix, b: &Matrix, seeds: &[State<f64>], bench: &Workbench) -> Result<(f64, f64)> {
    let opts = bench.options();
    let n = a.dim();
    let blocks = match opts.state_class {
        StateClass::Pure => 1,
        StateClass::Mixed => n,
    };
    let ba = b.adjoint().matmul(a);
    let settings = opts.optimizer.settings::<f64>();
    let mut starts = seeds.iter().map(|s| factor_of(s, blocks)).collect::<Result<Vec<_>>>()?;
    for k in 0..RANDOM_STARTS {
        let mut rng = rng_from_seed(derive_seed(opts.optimizer.seed, "equality-start", k as u64));
        starts.push(complex_gaussian_vec(&mut rng, n * blocks));
    }
    let mut best: Option<(f64, Vec<C>)> = None;
    for x0 in starts {
        let run = sphere_ascent(|x: &[C]| witness_form(a, b, &ba, x).re, x0, &settings);
        if best.as_ref().is_none_or(|(v, _)| run.value > *v) {
            best = Some((run.value, run.x));
        }
    }
    let (value, x) = best.expect("at least one start");
    Ok((value, witness_form(a, b, &ba, &x).im))
}

pub(crate) fn evaluate_equality(inputs: &CheckInputs, b: &Matrix, tol: f64, bench: &Workbench) -> Result<PropertyCheck> {
    let a = &inputs.a;
    let (mean, mu) = (MeanKind::Arithmetic, 0.5);
    let sum = a + b;
    let ra = bench.result(a, mean, mu)?;
    let rb = bench.result(b, mean, mu)?;
    let rs = bench.result(&sum, mean, mu)?;
    let (sa, sb, ssum) = (ra.value, rb.value, rs.value);
    let seeds = [ra.witness.clone(), rb.witness.clone(), rs.witness.clone()];
    let (sup, im) = witness_sup(a, b, &seeds, bench)?;
    let defect = sa + sb - ssum;
    let gap = 2.0 * sa * sb - sup;
    let scale = (sa + sb).max(2.0 * sa * sb).max(1.0);
    let t = tol * scale;
    let equality = defect.abs() <= t;
    let witness = gap.abs() <= t;
    let slack = match (equality, witness) {
        (true, true) => t - defect.abs().max(gap.abs()).max(im.abs()),
        (false, false) => defect.abs().min(gap.abs()) - t,
        _ => -defect.abs().max(gap.abs()),
    };
    let values = vec![
        ("seminorm_a", sa),
        ("seminorm_b", sb),
        ("seminorm_sum", ssum),
        ("defect", defect),
        ("witness_sup", sup),
        ("witness_gap", gap),
        ("imaginary_part", im),
        ("equality", f64::from(u8::from(equality))),
        ("witness_condition", f64::from(u8::from(witness))),
    ];
    Ok(finish(&EQUALITY_CHECK, inputs, mean, mu, tol, bench.options(), slack, scale, values))
}
