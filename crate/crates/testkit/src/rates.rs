//! Damping rates assembled from the complex response brackets
//! `chi(w) +- 2i S~(w)` and reduced by taking imaginary parts.
//! Written against the complex coefficient forms, not the real ones.

use num_complex::Complex64 as C;

#[derive(Debug, Clone, Copy)]
pub struct Bath {
    pub beta: f64,
    pub i_s: f64,
    pub omega_c: f64,
    /// `k_B T / hbar` in the same frequency units.
    pub thermal: f64,
}

impl Bath {
    fn eta(&self) -> f64 {
        self.beta * std::f64::consts::TAU / self.i_s.powi(2)
    }

    fn chi_imag(&self, w: f64) -> f64 {
        self.eta() * w * (-w.abs() / self.omega_c).exp()
    }

    /// Symmetrized spectral density `S = chi'' (1 + 2 n_B)`.
    fn s(&self, w: f64) -> f64 {
        let env = self.eta() * (-w.abs() / self.omega_c).exp();
        if self.thermal == 0.0 {
            return env * w.abs();
        }
        if w == 0.0 {
            return env * 2.0 * self.thermal;
        }
        let e = (w / self.thermal).exp_m1();
        env * w * (e + 2.0) / e
    }

    /// `chi(w) + 2 i S~(w)` with the reactive part dropped.
    fn plus(&self, w: f64) -> C {
        C::new(0.0, self.chi_imag(w) + self.s(w))
    }

    fn minus(&self, w: f64) -> C {
        C::new(0.0, self.chi_imag(w) - self.s(w))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Levels {
    pub i01: f64,
    pub i02: f64,
    pub i12: f64,
    pub i00: f64,
    pub i11: f64,
    pub i22: f64,
    pub omega1: f64,
    pub omega3: f64,
}

/// `[g11, g22, g12, g21]`.
pub fn gammas(lv: &Levels, rabi: f64, nu: f64, delta: f64, bath: &Bath) -> [f64; 4] {
    let theta = 0.5 * (2.0 * rabi).atan2(delta);
    let (st, ct) = theta.sin_cos();
    let (s2t, c2t) = (2.0 * theta).sin_cos();
    let om = (delta * delta + 4.0 * rabi * rabi).sqrt();

    let w0 = lv.omega3 - delta;
    let w1 = lv.omega1;
    let wq = w0 + w1;
    let w0u = w0 + om;
    let w0d = w0 - om;
    let w1u = w1 + 0.5 * (delta + om);
    let w1d = w1 + 0.5 * (delta - om);
    let wqu = wq + 0.5 * (delta + om);
    let wqd = wq + 0.5 * (delta - om);

    let p = |w: f64| bath.plus(w);
    let m = |w: f64| bath.minus(w);
    let i2s = |w: f64| C::new(0.0, bath.s(w));
    let (s_2, c_2) = (st * st, ct * ct);
    let q = s2t * s2t;

    let a = [
        s_2 * i2s(w1u) + c_2 * i2s(w1d),
        -c_2 / 2.0 * m(wqu) - s_2 / 2.0 * m(wqd),
        c_2 * c_2 / 2.0 * p(-w0u) + s_2 * s_2 / 2.0 * p(-w0d) + q / 4.0 * p(-w0),
        -0.5 * m(0.0),
        -q / 8.0 * p(om) - q / 8.0 * p(-om) - (1.0 + c2t * c2t) / 4.0 * p(0.0),
        q / 8.0 * p(om) + q / 8.0 * p(-om) - q / 4.0 * p(0.0),
    ];
    let v = nu * s2t / 4.0;
    let a2 = [
        v * p(w1u) - v * p(w1d),
        -v * c_2 * p(-w0u) + v * s_2 * p(-w0d) + v * c2t * p(-w0),
        -v * c_2 * p(om) + v * s_2 * p(-om) + v * c2t * p(0.0),
        v * c_2 * p(om) - v * s_2 * p(-om) - v * c2t * p(0.0),
    ];
    let b1 = [
        v * p(wqu) - v * p(wqd),
        v * c_2 * p(w0u) - v * s_2 * p(w0d) - v * c2t * p(w0),
        v * s_2 * p(om) - v * c_2 * p(-om) + v * c2t * p(0.0),
        -v * s_2 * p(om) + v * c_2 * p(-om) - v * c2t * p(0.0),
    ];
    let b2 = [
        -s_2 / 2.0 * m(w1u) - c_2 / 2.0 * m(w1d),
        c_2 * i2s(wqu) + s_2 * i2s(wqd),
        c_2 * c_2 / 2.0 * p(w0u) + s_2 * s_2 / 2.0 * p(w0d) + q / 4.0 * p(w0),
        -0.5 * m(0.0),
        q / 8.0 * p(om) + q / 8.0 * p(-om) - q / 4.0 * p(0.0),
        -q / 8.0 * p(om) - q / 8.0 * p(-om) - (1.0 + c2t * c2t) / 4.0 * p(0.0),
    ];

    let dot = |w: &[f64], c: &[C]| w.iter().zip(c).map(|(x, y)| y * *x).sum::<C>();
    let sq = |x: f64| x * x;
    let d11 = lv.i00 - lv.i11;
    let d22 = lv.i00 - lv.i22;
    let g11 = dot(&[sq(lv.i01), sq(lv.i02), sq(lv.i12), d11 * lv.i00, d11 * lv.i11, d11 * lv.i22], &a);
    let g12 = dot(&[sq(lv.i01), sq(lv.i12), d11 * lv.i11, d11 * lv.i22], &a2);
    let g21 = dot(&[sq(lv.i02), sq(lv.i12), d22 * lv.i11, d22 * lv.i22], &b1);
    let g22 = dot(&[sq(lv.i01), sq(lv.i02), sq(lv.i12), d22 * lv.i00, d22 * lv.i11, d22 * lv.i22], &b2);
    [g11.im, g22.im, g12.im, g21.im]
}
