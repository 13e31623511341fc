//! Independent composite-Simpson oracle for the weighted power integral.

use bessel_hierarchy::specfun::{bessel_j, BesselOrder};

pub fn integrand(d: u32, p: f64, k: u32) -> impl Fn(f64) -> f64 {
    let nu = BesselOrder::for_degree(d, k).unwrap();
    let h = f64::from(d) / 2.0;
    move |r: f64| {
        if r == 0.0 {
            // r^{1-d/2} J_ν(r) stays bounded and the weight r^{d-1} vanishes
            return 0.0;
        }
        (bessel_j(nu, r).unwrap() * r.powf(1.0 - h)).abs().powf(p) * r.powf(2.0 * h - 1.0)
    }
}

/// Composite Simpson on `n` (even) panels.
pub fn simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Simpson value on `[0, R]` with an error estimate from halving the step.
pub fn simpson_oracle(d: u32, p: f64, k: u32, r_max: f64) -> (f64, f64) {
    let f = integrand(d, p, k);
    let n = 2 * ((r_max / 0.004).ceil() as usize);
    let fine = simpson(&f, 0.0, r_max, 2 * n);
    let coarse = simpson(&f, 0.0, r_max, n);
    (fine, (fine - coarse).abs())
}
