use std::f64::consts::PI;

use super::transforms::{f_pen, lambda, ratio, scale, sub, t_asy, t_osz, t_osz_scalar};
use super::{rosenbrock_scale, BenchmarkInstance, LUNACEK_MU0};

const WEIERSTRASS_TERMS: i32 = 12;
const KATSUURA_DIGITS: i32 = 32;
const SCHWEFEL_OFFSET: f64 = 4.189_828_872_724_339;

/// Raw objective value, before subtracting `f_opt`.
pub(crate) fn raw(inst: &BenchmarkInstance, x: &[f64]) -> f64 {
    let d = inst.dimension;
    let df = d as f64;
    let r = &inst.rot_r;
    let q = &inst.rot_q;
    let shifted = || sub(x, &inst.x_opt);

    match inst.function_id {
        1 => shifted().iter().map(|z| z * z).sum(),
        2 => ellipsoid(&t_osz(&shifted())),
        3 => {
            let z = scale(&t_asy(&t_osz(&shifted()), 0.2), &lambda(10.0, d));
            rastrigin(&z)
        }
        4 => {
            let y = t_osz(&shifted());
            let z: Vec<f64> = y
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    let s = 10f64.powf(0.5 * ratio(i, d));
                    if v > 0.0 && i % 2 == 0 {
                        10.0 * s * v
                    } else {
                        s * v
                    }
                })
                .collect();
            rastrigin(&z) + 100.0 * f_pen(x)
        }
        5 => (0..d)
            .map(|i| {
                let xo = inst.x_opt[i];
                let s = xo.signum() * 10f64.powf(ratio(i, d));
                let z = if xo * x[i] < 25.0 { x[i] } else { xo };
                5.0 * s.abs() - s * z
            })
            .sum(),
        6 => {
            let z = q.apply(&scale(&r.apply(&shifted()), &lambda(10.0, d)));
            let s: f64 = z
                .iter()
                .zip(&inst.x_opt)
                .map(|(&zi, &xo)| {
                    let w = if zi * xo > 0.0 { 100.0 } else { 1.0 };
                    (w * zi).powi(2)
                })
                .sum();
            t_osz_scalar(s).powf(0.9)
        }
        7 => {
            let zh = scale(&r.apply(&shifted()), &lambda(10.0, d));
            let zt: Vec<f64> = zh
                .iter()
                .map(|&v| if v.abs() > 0.5 { (0.5 + v).floor() } else { (0.5 + 10.0 * v).floor() / 10.0 })
                .collect();
            let z = q.apply(&zt);
            let e: f64 = z.iter().enumerate().map(|(i, zi)| 10f64.powf(2.0 * ratio(i, d)) * zi * zi).sum();
            0.1 * (zh[0].abs() / 1e4).max(e) + f_pen(x)
        }
        8 => {
            let c = rosenbrock_scale(d);
            let z: Vec<f64> = shifted().iter().map(|v| c * v + 1.0).collect();
            rosenbrock(&z)
        }
        9 => {
            let c = rosenbrock_scale(d);
            let z: Vec<f64> = r.apply(&shifted()).iter().map(|v| c * v + 1.0).collect();
            rosenbrock(&z)
        }
        10 => ellipsoid(&t_osz(&r.apply(&shifted()))),
        11 => {
            let z = t_osz(&r.apply(&shifted()));
            1e6 * z[0] * z[0] + z[1..].iter().map(|v| v * v).sum::<f64>()
        }
        12 => {
            let z = r.apply(&t_asy(&r.apply(&shifted()), 0.5));
            z[0] * z[0] + 1e6 * z[1..].iter().map(|v| v * v).sum::<f64>()
        }
        13 => {
            let z = q.apply(&scale(&r.apply(&shifted()), &lambda(10.0, d)));
            z[0] * z[0] + 100.0 * z[1..].iter().map(|v| v * v).sum::<f64>().sqrt()
        }
        14 => {
            let z = r.apply(&shifted());
            z.iter().enumerate().map(|(i, v)| v.abs().powf(2.0 + 4.0 * ratio(i, d))).sum::<f64>().sqrt()
        }
        15 => {
            let inner = q.apply(&t_asy(&t_osz(&r.apply(&shifted())), 0.2));
            let z = r.apply(&scale(&inner, &lambda(10.0, d)));
            rastrigin(&z)
        }
        16 => {
            let inner = q.apply(&t_osz(&r.apply(&shifted())));
            let z = r.apply(&scale(&inner, &lambda(0.01, d)));
            let f0: f64 = (0..WEIERSTRASS_TERMS).map(|k| 0.5f64.powi(k) * (PI * 3f64.powi(k)).cos()).sum();
            let s: f64 = z
                .iter()
                .map(|zi| {
                    (0..WEIERSTRASS_TERMS)
                        .map(|k| 0.5f64.powi(k) * (2.0 * PI * 3f64.powi(k) * (zi + 0.5)).cos())
                        .sum::<f64>()
                })
                .sum();
            10.0 * (s / df - f0).powi(3) + 10.0 / df * f_pen(x)
        }
        17 => schaffers(inst, x, 10.0),
        18 => schaffers(inst, x, 1000.0),
        19 => {
            let c = rosenbrock_scale(d);
            let z: Vec<f64> = r.apply(&shifted()).iter().map(|v| c * v + 1.0).collect();
            let total: f64 = z
                .windows(2)
                .map(|w| {
                    let s = 100.0 * (w[0] * w[0] - w[1]).powi(2) + (w[0] - 1.0).powi(2);
                    s / 4000.0 - s.cos()
                })
                .sum();
            10.0 / (df - 1.0) * total + 10.0
        }
        20 => {
            let two_abs: Vec<f64> = inst.x_opt.iter().map(|v| 2.0 * v.abs()).collect();
            let xh: Vec<f64> = x.iter().zip(&inst.x_opt).map(|(v, o)| 2.0 * o.signum() * v).collect();
            let mut zh = xh.clone();
            for i in 1..d {
                zh[i] = xh[i] + 0.25 * (xh[i - 1] - two_abs[i - 1]);
            }
            let z: Vec<f64> = scale(&sub(&zh, &two_abs), &lambda(10.0, d))
                .iter()
                .zip(&two_abs)
                .map(|(v, a)| 100.0 * (v + a))
                .collect();
            let s: f64 = z.iter().map(|zi| zi * zi.abs().sqrt().sin()).sum();
            let zp: Vec<f64> = z.iter().map(|v| v / 100.0).collect();
            -s / (100.0 * df) + SCHWEFEL_OFFSET + 100.0 * f_pen(&zp)
        }
        21 | 22 => {
            let peaks = inst.peaks.as_ref().expect("Gallagher instance has peaks");
            let best = peaks
                .centers
                .iter()
                .zip(&peaks.weights)
                .zip(&peaks.precisions)
                .map(|((y, w), c)| {
                    let u = r.apply(&sub(x, y));
                    let quad: f64 = u.iter().zip(c).map(|(ui, ci)| ci * ui * ui).sum();
                    w * (-quad / (2.0 * df)).exp()
                })
                .fold(f64::NEG_INFINITY, f64::max);
            t_osz_scalar(10.0 - best).powi(2) + f_pen(x)
        }
        23 => {
            let z = q.apply(&scale(&r.apply(&shifted()), &lambda(100.0, d)));
            let exponent = 10.0 / df.powf(1.2);
            let prod: f64 = z
                .iter()
                .enumerate()
                .map(|(i, &zi)| {
                    let s: f64 = (1..=KATSUURA_DIGITS)
                        .map(|j| {
                            let p = 2f64.powi(j);
                            (p * zi - (p * zi).round()).abs() / p
                        })
                        .sum();
                    (1.0 + (i + 1) as f64 * s).powf(exponent)
                })
                .product();
            10.0 / (df * df) * prod - 10.0 / (df * df) + f_pen(x)
        }
        24 => {
            let mu0 = LUNACEK_MU0;
            let dd = 1.0;
            let s = 1.0 - 1.0 / (2.0 * (df + 20.0).sqrt() - 8.2);
            let mu1 = -((mu0 * mu0 - dd) / s).sqrt();
            let xh: Vec<f64> = x.iter().zip(&inst.x_opt).map(|(v, o)| 2.0 * o.signum() * v).collect();
            let a: f64 = xh.iter().map(|v| (v - mu0).powi(2)).sum();
            let b: f64 = dd * df + s * xh.iter().map(|v| (v - mu1).powi(2)).sum::<f64>();
            let centered: Vec<f64> = xh.iter().map(|v| v - mu0).collect();
            let z = q.apply(&scale(&r.apply(&centered), &lambda(100.0, d)));
            let cos_sum: f64 = z.iter().map(|zi| (2.0 * PI * zi).cos()).sum();
            a.min(b) + 10.0 * (df - cos_sum) + 1e4 * f_pen(x)
        }
        id => unreachable!("function id {id} validated at construction"),
    }
}

fn ellipsoid(z: &[f64]) -> f64 {
    let d = z.len();
    z.iter().enumerate().map(|(i, v)| 10f64.powf(6.0 * ratio(i, d)) * v * v).sum()
}

fn rastrigin(z: &[f64]) -> f64 {
    let d = z.len() as f64;
    10.0 * (d - z.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>()) + z.iter().map(|v| v * v).sum::<f64>()
}

fn rosenbrock(z: &[f64]) -> f64 {
    z.windows(2).map(|w| 100.0 * (w[0] * w[0] - w[1]).powi(2) + (w[0] - 1.0).powi(2)).sum()
}

fn schaffers(inst: &BenchmarkInstance, x: &[f64], conditioning: f64) -> f64 {
    let d = inst.dimension;
    let inner = t_asy(&inst.rot_r.apply(&sub(x, &inst.x_opt)), 0.5);
    let z = scale(&inst.rot_q.apply(&inner), &lambda(conditioning, d));
    let m: f64 = z
        .windows(2)
        .map(|w| {
            let s = (w[0] * w[0] + w[1] * w[1]).sqrt();
            s.sqrt() + s.sqrt() * (50.0 * s.powf(0.2)).sin().powi(2)
        })
        .sum::<f64>()
        / (d - 1) as f64;
    m * m + 10.0 * f_pen(x)
}
