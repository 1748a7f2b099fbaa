//! Real-space finite-difference model of the three-junction loop on the
//! periodic phase torus `(phi1, phi2)`, in units of `E_J`.
//!
//! Kinetic energy: `-2 (E_c/E_J) [(d1 + d2)^2 + (d1 - d2)^2 / (1 + 2 alpha)]`,
//! rewritten as `(1 + alpha)(d1^2 + d2^2)` plus a mixed part
//! `(alpha/2)((d1 + d2)^2 - (d1 - d2)^2)` and discretized with high-order
//! central differences along the axes and diagonals. Diagonal stencils alone
//! would decouple the two checkerboard sublattices. Potential: `2 + alpha - cos phi1 - cos phi2 - alpha cos(2 pi f + phi1 - phi2)`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::lobpcg::Lobpcg;

pub struct FdCircuit {
    pub alpha: f64,
    pub ec_over_ej: f64,
    pub f: f64,
    /// Points per axis.
    pub n: usize,
    /// Half-width of the second-derivative stencil (accuracy order `2 p`).
    pub p: usize,
}

pub struct FdSpectrum {
    pub energies: Vec<f64>,
    /// Real current matrix in the gauge `I[l-1][l] >= 0`.
    pub currents: DMatrix<f64>,
    pub iterations: usize,
    pub max_residual: f64,
}

/// Central second-difference weights `c_0..c_p` of order `2 p`.
fn stencil(p: usize) -> Vec<f64> {
    let fact = |m: usize| (1..=m).map(|v| v as f64).product::<f64>();
    let mut c = vec![0.0; p + 1];
    for k in 1..=p {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        c[k] = 2.0 * sign * fact(p).powi(2) / ((k * k) as f64 * fact(p - k) * fact(p + k));
    }
    c[0] = -2.0 * c[1..].iter().sum::<f64>();
    c
}

impl FdCircuit {
    pub fn new(alpha: f64, ej_over_ec: f64, f: f64, n: usize) -> Self {
        Self { alpha, ec_over_ej: 1.0 / ej_over_ec, f, n, p: 6 }
    }

    fn phi(&self, i: usize) -> f64 {
        2.0 * PI * i as f64 / self.n as f64
    }

    fn potential(&self) -> Vec<f64> {
        let n = self.n;
        let mut u = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (self.phi(i), self.phi(j));
                u[i * n + j] = 2.0 + self.alpha - a.cos() - b.cos() - self.alpha * (2.0 * PI * self.f + a - b).cos();
            }
        }
        u
    }

    fn loop_current(&self) -> Vec<f64> {
        let n = self.n;
        let k = self.alpha / (1.0 + 2.0 * self.alpha);
        let mut c = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (self.phi(i), self.phi(j));
                c[i * n + j] = k * (a.sin() - b.sin() - (2.0 * PI * self.f + a - b).sin());
            }
        }
        c
    }

    /// Weights of the axis and the mixed diagonal second differences.
    fn kinetic_weights(&self) -> (f64, f64) {
        let h = 2.0 * PI / self.n as f64;
        let pre = -4.0 * self.ec_over_ej / ((1.0 + 2.0 * self.alpha) * h * h);
        (pre * (1.0 + self.alpha), pre * self.alpha / 2.0)
    }

    fn apply(&self, u: &[f64], c: &[f64], x: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.n as isize;
        let (wa, wd) = self.kinetic_weights();
        let idx = |i: isize, j: isize| (i.rem_euclid(n) * n + j.rem_euclid(n)) as usize;
        let mut y = DMatrix::zeros(x.nrows(), x.ncols());
        for col in 0..x.ncols() {
            let xc = x.column(col);
            let mut yc = y.column_mut(col);
            for i in 0..n {
                for j in 0..n {
                    let here = idx(i, j);
                    let mut axes = 2.0 * c[0] * xc[here];
                    let mut mixed = 0.0;
                    for (k, ck) in c.iter().enumerate().skip(1) {
                        let k = k as isize;
                        axes += ck * (xc[idx(i + k, j)] + xc[idx(i - k, j)] + xc[idx(i, j + k)] + xc[idx(i, j - k)]);
                        mixed += ck * (xc[idx(i + k, j + k)] + xc[idx(i - k, j - k)] - xc[idx(i + k, j - k)] - xc[idx(i - k, j + k)]);
                    }
                    yc[here] = u[here] * xc[here] + wa * axes + wd * mixed;
                }
            }
        }
        y
    }

    /// Fourier symbol of the discrete kinetic operator.
    fn kinetic_symbol(&self, c: &[f64]) -> Vec<f64> {
        let n = self.n;
        let (wa, wd) = self.kinetic_weights();
        let lam = |theta: f64| c[0] + 2.0 * c.iter().enumerate().skip(1).map(|(k, ck)| ck * (k as f64 * theta).cos()).sum::<f64>();
        let mut s = vec![0.0; n * n];
        for a in 0..n {
            for b in 0..n {
                let (ta, tb) = (2.0 * PI * a as f64 / n as f64, 2.0 * PI * b as f64 / n as f64);
                s[a * n + b] = wa * (lam(ta) + lam(tb)) + wd * (lam(ta + tb) - lam(ta - tb));
            }
        }
        s
    }

    /// Lowest `k` eigenpairs with currents.
    pub fn solve(&self, k: usize, tol: f64) -> FdSpectrum {
        let n = self.n;
        let c = stencil(self.p);
        let u = self.potential();
        let symbol = self.kinetic_symbol(&c);
        let shift = 1.0;

        let mut planner = FftPlanner::<f64>::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let fft2 = |buf: &mut [Complex64], plan: &std::sync::Arc<dyn rustfft::Fft<f64>>| {
            for row in buf.chunks_mut(n) {
                plan.process(row);
            }
            let mut col = vec![Complex64::new(0.0, 0.0); n];
            for j in 0..n {
                for i in 0..n {
                    col[i] = buf[i * n + j];
                }
                plan.process(&mut col);
                for i in 0..n {
                    buf[i * n + j] = col[i];
                }
            }
        };
        let precond = |r: &DMatrix<f64>| {
            let mut out = DMatrix::zeros(r.nrows(), r.ncols());
            let mut buf = vec![Complex64::new(0.0, 0.0); n * n];
            for col in 0..r.ncols() {
                for (b, v) in buf.iter_mut().zip(r.column(col).iter()) {
                    *b = Complex64::new(*v, 0.0);
                }
                fft2(&mut buf, &fwd);
                for (b, s) in buf.iter_mut().zip(&symbol) {
                    *b /= s + shift;
                }
                fft2(&mut buf, &inv);
                for (o, b) in out.column_mut(col).iter_mut().zip(&buf) {
                    *o = b.re / (n * n) as f64;
                }
            }
            out
        };

        // deterministic start: pseudo-random values weighted toward the wells
        let m = k + 3;
        let mut state = 0x9E37_79B9_7F4A_7C15u64;
        let mut next = || {
            state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            ((z ^ (z >> 31)) >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let x0 = DMatrix::from_fn(n * n, m, |i, _| next() * (-4.0 * u[i]).exp());

        let res = Lobpcg { tol, max_iter: 2000 }.solve(|x| self.apply(&u, &c, x), precond, x0, k);

        let cur = self.loop_current();
        let mut vecs = res.vectors.clone();
        let elem = |a: &DMatrix<f64>, l: usize, m: usize| (0..n * n).map(|i| a[(i, l)] * cur[i] * a[(i, m)]).sum::<f64>();
        for l in 1..k {
            if elem(&vecs, l - 1, l) < 0.0 {
                let flipped = -vecs.column(l);
                vecs.set_column(l, &flipped);
            }
        }
        let currents = DMatrix::from_fn(k, k, |a, b| elem(&vecs, a, b));
        FdSpectrum {
            energies: res.values,
            currents,
            iterations: res.iterations,
            max_residual: res.residuals.iter().cloned().fold(0.0, f64::max),
        }
    }
}
