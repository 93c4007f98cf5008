//! Independent oracles shared by the integration tests.
//!
//! Nothing here calls into the closed forms under test: densities are built
//! from the raw Laplace kernel and integrated numerically.

#![allow(dead_code)]

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
/// Gauss weights for the nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// 15-point Kronrod estimate and its distance from the embedded 7-point Gauss rule.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    let fc = f(c);
    let (mut k, mut g) = (WGK[7] * fc, WG[3] * fc);
    for i in 0..7 {
        let pair = f(c - h * XGK[i]) + f(c + h * XGK[i]);
        k += WGK[i] * pair;
        if i % 2 == 1 {
            g += WG[i / 2] * pair;
        }
    }
    (k * h, (k - g).abs() * h)
}

fn gk_adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (k, err) = gk15(f, a, b);
    // The floor stops refinement once the error estimate is rounding noise.
    if depth == 0 || err <= tol.max(64.0 * f64::EPSILON * k.abs()) {
        return k;
    }
    let m = 0.5 * (a + b);
    gk_adapt(f, a, m, 0.5 * tol, depth - 1) + gk_adapt(f, m, b, 0.5 * tol, depth - 1)
}

/// Adaptive Gauss–Kronrod (G7/K15) quadrature to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    gk_adapt(&f, a, b, tol, 50)
}

/// Integral over `[a, b]` split at the kink `k`.
pub fn integrate_split<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, k: f64, b: f64, tol: f64) -> f64 {
    integrate(f, a, k, tol) + integrate(f, k, b, tol)
}

/// Unnormalized Laplace kernel `e^{−|x−s|/λ}/(2λ)`.
pub fn kernel(x: f64, s: f64, lambda: f64) -> f64 {
    (-(x - s).abs() / lambda).exp() / (2.0 * lambda)
}

/// Quadrature moments of the truncated density: `(mass, E x, E x²)` with
/// `mass` the normalizer.
pub fn trunc_moments_oracle(s: f64, c0: f64, c1: f64, lambda: f64) -> (f64, f64, f64) {
    let tol = 1e-14;
    let mass = integrate_split(|x| kernel(x, s, lambda), c0, s, c1, tol);
    let m1 = integrate_split(|x| x * kernel(x, s, lambda), c0, s, c1, tol);
    let m2 = integrate_split(|x| x * x * kernel(x, s, lambda), c0, s, c1, tol);
    (mass, m1 / mass, m2 / mass)
}

/// BIT moments from the mass decomposition
/// `p0·c0^j + p1·c1^j + ∫_{c0}^{c1} x^j·kernel`.
pub fn bit_moments_oracle(s: f64, c0: f64, c1: f64, lambda: f64) -> (f64, f64, f64) {
    let tol = 1e-14;
    let p0 = 0.5 * (-(s - c0) / lambda).exp();
    let p1 = 0.5 * (-(c1 - s) / lambda).exp();
    let interior = integrate_split(|x| kernel(x, s, lambda), c0, s, c1, tol);
    let m1 = integrate_split(|x| x * kernel(x, s, lambda), c0, s, c1, tol);
    let m2 = integrate_split(|x| x * x * kernel(x, s, lambda), c0, s, c1, tol);
    (p0 + p1 + interior, p0 * c0 + p1 * c1 + m1, p0 * c0 * c0 + p1 * c1 * c1 + m2)
}

/// Rejection sampler for the truncated density: redraw Laplace until the
/// draw lands in bounds.
pub fn trunc_rejection_sample<R: Rng>(s: f64, c0: f64, c1: f64, lambda: f64, rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random::<f64>() - 0.5;
        let x = s - lambda * u.signum() * (1.0 - 2.0 * u.abs()).ln();
        if (c0..=c1).contains(&x) {
            return x;
        }
    }
}

/// One-sample Kolmogorov–Smirnov statistic against `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((i as f64 + 1.0) / n - f)
        })
        .fold(0.0, f64::max)
}

/// Two-sample KS statistic.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic 1% critical value of the one-sample KS statistic.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.627_6 / (n as f64).sqrt()
}

/// Two-sample 1% critical value.
pub fn ks_two_sample_critical_1pct(na: usize, nb: usize) -> f64 {
    1.627_6 * ((na + nb) as f64 / (na * nb) as f64).sqrt()
}

/// Bisection on a sign change of `f` over `[a, b]`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    assert!(fa * f(b) <= 0.0, "no sign change on [{a}, {b}]");
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Every multiset of size `n` drawn from `0..k`, as nondecreasing index vectors.
pub fn multisets(k: usize, n: usize) -> Vec<Vec<usize>> {
    fn go(k: usize, n: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for v in start..k {
            cur.push(v);
            go(k, n, v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(k, n, 0, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Largest change of `stat` over all datasets of `n` records drawn from
/// `values` and all single-record substitutions.
pub fn brute_force_gs<T: Copy, F: Fn(&[T]) -> f64>(values: &[T], n: usize, stat: F) -> f64 {
    let mut worst = 0.0f64;
    let mut data = vec![values[0]; n];
    for idx in multisets(values.len(), n) {
        for (slot, &i) in data.iter_mut().zip(&idx) {
            *slot = values[i];
        }
        let base = stat(&data);
        for pos in 0..n {
            let keep = data[pos];
            for &v in values {
                data[pos] = v;
                worst = worst.max((stat(&data) - base).abs());
            }
            data[pos] = keep;
        }
    }
    worst
}

/// Mean and standard error of a sample.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Random valid `(s, c0, c1, λ)`: width in [0.1, 10], λ log-uniform in
/// [0.01, 10]·width, `s` uniform in bounds with occasional boundary hits.
pub fn random_tuple<R: Rng>(rng: &mut R) -> (f64, f64, f64, f64) {
    let c0 = rng.random_range(-5.0..5.0);
    let width = 10f64.powf(rng.random_range(-1.0..1.0));
    let c1 = c0 + width;
    let lambda = width * 10f64.powf(rng.random_range(-2.0..1.0));
    let s = match rng.random_range(0..20) {
        0 => c0,
        1 => c1,
        _ => rng.random_range(c0..c1),
    };
    (s, c0, c1, lambda)
}

/// Prints one acceptance line and returns whether it passed.
pub fn report(id: &str, pass: bool, detail: impl std::fmt::Display) -> bool {
    println!("[{}] criterion {id}: {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}

pub struct Timer(Instant);

impl Timer {
    pub fn start() -> Self {
        Self(Instant::now())
    }

    pub fn secs(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}
