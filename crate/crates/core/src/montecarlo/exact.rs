//! Exact noise-averaged success via second-moment propagation.
//!
//! Every cycle is linear in the amplitude vector `v`, and the obstruction
//! events are independent, so `S = E[v v^T]` evolves as
//! `S <- (1 - B) A_open S A_open^T + B A_obst S A_obst^T`. The success
//! probability is a diagonal entry of the final `S`.

use super::{McProtocol, NoiseSpec, SlazNoise};

type Mat<const D: usize> = [[f64; D]; D];

fn identity<const D: usize>() -> Mat<D> {
    let mut m = [[0.0; D]; D];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

fn mul<const D: usize>(a: &Mat<D>, b: &Mat<D>) -> Mat<D> {
    let mut out = [[0.0; D]; D];
    for i in 0..D {
        for j in 0..D {
            out[i][j] = (0..D).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// `A S A^T`.
fn congruence<const D: usize>(a: &Mat<D>, s: &Mat<D>) -> Mat<D> {
    let as_ = mul(a, s);
    let mut out = [[0.0; D]; D];
    for i in 0..D {
        for j in 0..D {
            out[i][j] = (0..D).map(|k| as_[i][k] * a[j][k]).sum();
        }
    }
    out
}

fn mix<const D: usize>(p: f64, a: &Mat<D>, b: &Mat<D>) -> Mat<D> {
    let mut out = [[0.0; D]; D];
    for i in 0..D {
        for j in 0..D {
            out[i][j] = (1.0 - p) * a[i][j] + p * b[i][j];
        }
    }
    out
}

/// Givens rotation on axes `(i, j)`.
fn givens<const D: usize>(i: usize, j: usize, theta: f64) -> Mat<D> {
    let (s, c) = theta.sin_cos();
    let mut m = identity();
    m[i][i] = c;
    m[j][j] = c;
    m[i][j] = -s;
    m[j][i] = s;
    m
}

fn scale_axis<const D: usize>(axis: usize, factor: f64) -> Mat<D> {
    let mut m = identity();
    m[axis][axis] = factor;
    m
}

fn improved_exact(cycles: usize, b: f64, c: f64) -> f64 {
    let theta = std::f64::consts::FRAC_PI_2 / cycles as f64;
    let open: Mat<2> = givens(0, 1, theta);
    let obstructed = mul(&scale_axis(1, c), &open);
    let mut s = scale_axis::<2>(1, 0.0);
    for _ in 0..cycles {
        s = mix(b, &congruence(&open, &s), &congruence(&obstructed, &s));
    }
    s[1][1]
}

// axes: 0 outer, 1 inner, 2 channel
fn slaz_exact(outer: usize, inner: usize, b: f64, granularity: SlazNoise) -> f64 {
    let outer_rot: Mat<3> = givens(0, 1, std::f64::consts::FRAC_PI_2 / outer as f64);
    let inner_rot: Mat<3> = givens(1, 2, std::f64::consts::FRAC_PI_2 / inner as f64);
    let drop_channel: Mat<3> = scale_axis(2, 0.0);
    let mut s = [[0.0; 3]; 3];
    s[0][0] = 1.0;

    match granularity {
        SlazNoise::PerOuterCycle => {
            let mut open = outer_rot;
            let mut obstructed = outer_rot;
            let blocked_step = mul(&drop_channel, &inner_rot);
            for _ in 0..inner {
                open = mul(&inner_rot, &open);
                obstructed = mul(&blocked_step, &obstructed);
            }
            open = mul(&drop_channel, &open);
            for _ in 0..outer {
                s = mix(b, &congruence(&open, &s), &congruence(&obstructed, &s));
            }
        }
        SlazNoise::PerInnerSegment => {
            for _ in 0..outer {
                s = congruence(&outer_rot, &s);
                for _ in 0..inner {
                    s = congruence(&inner_rot, &s);
                    s = mix(b, &s, &congruence(&drop_channel, &s));
                }
                s = congruence(&drop_channel, &s);
            }
        }
    }
    s[0][0]
}

/// Noise-averaged success mass of a passing run: D2 for the improved
/// protocol, D1 for the nested baseline. Exact up to rounding.
pub fn exact_expected_success(protocol: &McProtocol, spec: &NoiseSpec) -> f64 {
    match protocol {
        McProtocol::Improved(p) => improved_exact(p.cycles(), spec.b(), spec.c()),
        McProtocol::Slaz(p) => slaz_exact(p.outer_cycles(), p.inner_cycles(), spec.b(), spec.granularity()),
    }
}
