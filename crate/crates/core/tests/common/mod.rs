//! Reference matrices typed in by hand or built from the cosine formula,
//! independent of the library's own constructors.
#![allow(dead_code)]

use std::f64::consts::PI;

use dctprune::{Dyadic, FlowGraphPlan, Transform};

/// `W` times two.
#[rustfmt::skip]
pub const W2: [[i64; 8]; 8] = [
    [2,  2,  2,  2,  2,  2,  2,  2],
    [2,  2,  2,  0,  0, -2, -2, -2],
    [2,  1, -1, -2, -2, -1,  1,  2],
    [2,  0, -2, -2,  2,  2,  0, -2],
    [2, -2, -2,  2,  2, -2, -2,  2],
    [2, -2,  0,  2, -2,  0,  2, -2],
    [1, -2,  2, -1, -1,  2, -2,  1],
    [0, -2,  2, -2,  2, -2,  2,  0],
];

#[rustfmt::skip]
pub const M: [[i64; 8]; 8] = [
    [1,  1,  1,  1,  1,  1,  1,  1],
    [1,  0,  0,  0,  0,  0,  0, -1],
    [1,  0,  0, -1, -1,  0,  0,  1],
    [0,  0, -1,  0,  0,  1,  0,  0],
    [1, -1, -1,  1,  1, -1, -1,  1],
    [0, -1,  0,  0,  0,  0,  1,  0],
    [0, -1,  1,  0,  0,  1, -1,  0],
    [0,  0,  0, -1,  1,  0,  0,  0],
];

pub fn cosine(k: usize, n: usize) -> f64 {
    let a = if k == 0 { (0.125f64).sqrt() } else { 0.5 };
    a * ((2 * n + 1) as f64 * k as f64 * PI / 16.0).cos()
}

pub fn sdct_oracle() -> [[i64; 8]; 8] {
    let mut t = [[0; 8]; 8];
    for (k, row) in t.iter_mut().enumerate() {
        for (n, v) in row.iter_mut().enumerate() {
            let c = cosine(k, n);
            *v = if c.abs() < 1e-12 { 0 } else { c.signum() as i64 };
        }
    }
    t
}

pub fn rdct_oracle() -> [[i64; 8]; 8] {
    let mut t = [[0; 8]; 8];
    for (k, row) in t.iter_mut().enumerate() {
        for (n, v) in row.iter_mut().enumerate() {
            *v = (2.0 * cosine(k, n)).round() as i64;
        }
    }
    t
}

/// (name, integer matrix, denominator exponent)
pub fn oracles() -> Vec<(&'static str, [[i64; 8]; 8], u32)> {
    vec![
        ("lodct", W2, 1),
        ("lodct-p4", W2, 1),
        ("mrdct", M, 0),
        ("mrdct-p6", M, 0),
        ("sdct", sdct_oracle(), 0),
        ("rdct", rdct_oracle(), 0),
    ]
}

pub fn plan_of(t: &Transform) -> &FlowGraphPlan {
    match t {
        Transform::Approx { plan, .. } => plan,
        Transform::Exact(_) => panic!("exact transform has no plan"),
    }
}

pub fn check_vector(name: &str, plan: &FlowGraphPlan, mat: &[[i64; 8]; 8], den: u32, x: &[i64; 8]) {
    let xs: Vec<Dyadic> = x.iter().map(|&v| Dyadic::from_int(v)).collect();
    let got = plan.evaluate(&xs).unwrap();
    for (k, g) in got.iter().enumerate() {
        let num: i64 = mat[k].iter().zip(x).map(|(a, b)| a * b).sum();
        assert_eq!(*g, Dyadic::new(num, den), "{name} row {k} x={x:?}");
    }
}

/// Bit-exact comparison of `plan` with `mat / 2^den` on one vector.
pub fn plan_agrees(plan: &FlowGraphPlan, mat: &[[i64; 8]; 8], den: u32, x: &[i64; 8]) -> bool {
    let xs: Vec<Dyadic> = x.iter().map(|&v| Dyadic::from_int(v)).collect();
    let got = plan.evaluate(&xs).unwrap();
    got.iter().enumerate().all(|(k, g)| {
        let num: i64 = mat[k].iter().zip(x).map(|(a, b)| a * b).sum();
        *g == Dyadic::new(num, den)
    })
}

/// The `i`-th vector of `{-1, 0, 1}^8` in base-3 order.
pub fn ternary(i: usize) -> [i64; 8] {
    let mut x = [0i64; 8];
    let mut c = i;
    for v in &mut x {
        *v = (c % 3) as i64 - 1;
        c /= 3;
    }
    x
}
