//! Loop-current operator and its matrix elements between circuit eigenstates.
//!
//! In the junction phases the circulating current is
//! `alpha/(1 + 2 alpha) [sin phi_2 - sin phi_1 - sin(2 pi f + phi_2 - phi_1)]`
//! in units of `I_0 = 2 pi E_J / Phi_0`, which in the `(phi_p, phi_m)`
//! variables reads `alpha/(1 + 2 alpha) [2 cos phi_p sin phi_m - sin(2 pi f + 2 phi_m)]`.

use std::f64::consts::TAU;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::spectrum::{
    assemble, build_hamiltonian, solve_spectrum, BasisTruncation, ChargeBasis, ChargeOperator, ChargeState,
    CircuitParams, Spectrum,
};

/// Tolerance on imaginary parts left after gauge fixing, in `I_0`.
pub const REALITY_TOL: f64 = 1e-8;

/// `<bra| I |ket>` in units of `I_0`.
pub fn current_element(params: &CircuitParams, bra: ChargeState, ket: ChargeState) -> C64 {
    let k = params.alpha / (1.0 + 2.0 * params.alpha);
    let dp = bra.0 - ket.0;
    let dm = bra.1 - ket.1;
    match (dp, dm) {
        // 2 cos(phi_p) sin(phi_m): exp(i(s_p phi_p + s_m phi_m)) weighted by s_m/(2i)
        (1 | -1, 1 | -1) => C64::new(0.0, -0.5 * k * dm as f64),
        // -sin(2 pi f + 2 phi_m) = -(exp(i..) - exp(-i..))/(2i)
        (0, 2) => C64::new(0.0, 0.5 * k) * C64::from_polar(1.0, TAU * params.f),
        (0, -2) => C64::new(0.0, -0.5 * k) * C64::from_polar(1.0, -TAU * params.f),
        _ => C64::from(0.0),
    }
}

/// Charge-basis matrix of the loop-current operator (units of `I_0`).
pub fn build_current_operator(params: &CircuitParams, trunc: BasisTruncation) -> Result<ChargeOperator> {
    params.validate()?;
    trunc.validate()?;
    Ok(current_operator_on(params, Arc::new(ChargeBasis::new(trunc))))
}

/// Builds the current operator on the basis of an existing Hamiltonian.
pub fn current_operator_on(params: &CircuitParams, basis: Arc<ChargeBasis>) -> ChargeOperator {
    assemble(basis, |bra, ket| current_element(params, bra, ket))
}

/// Gauge-fixed matrix `I_ij = <i| I |j>` between the lowest eigenstates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopCurrentMatrix {
    /// Real symmetric, units of `I_0`.
    pub elements: DMatrix<f64>,
    /// Phase (radians) multiplied onto each eigenvector to reach the real gauge.
    pub gauge_phases: Vec<f64>,
    /// Largest imaginary part discarded when the matrix was made real.
    pub residual_imag: f64,
}

impl LoopCurrentMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.elements[(i, j)]
    }

    pub fn n_levels(&self) -> usize {
        self.elements.nrows()
    }

    pub fn three_level(&self) -> Result<ThreeLevelCurrents> {
        if self.n_levels() < 3 {
            return Err(invalid("three-level currents need at least three levels"));
        }
        let e = &self.elements;
        Ok(ThreeLevelCurrents {
            i01: e[(0, 1)],
            i02: e[(0, 2)],
            i12: e[(1, 2)],
            i00: e[(0, 0)],
            i11: e[(1, 1)],
            i22: e[(2, 2)],
        })
    }
}

/// The six independent current matrix elements of the three-level truncation.
///
/// In the real gauge `i01 >= 0` and `i12 >= 0`; the sign of `i02` is free.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreeLevelCurrents {
    pub i01: f64,
    pub i02: f64,
    pub i12: f64,
    pub i00: f64,
    pub i11: f64,
    pub i22: f64,
}

/// Matrix elements of `op` between the lowest `n_keep` eigenvectors of `spec`,
/// brought to the real gauge `I_{l-1,l} >= 0`.
///
/// When `I_{l-1,l}` vanishes (selection rules among higher levels) the phase
/// of level `l` is fixed by its largest coupling to a lower level instead.
pub fn current_matrix_elements(spec: &Spectrum, op: &ChargeOperator, n_keep: usize) -> Result<LoopCurrentMatrix> {
    if spec.basis.truncation() != op.basis.truncation() || spec.eigenvectors.nrows() != op.matrix.nrows() {
        return Err(invalid("spectrum and current operator are built on different charge bases"));
    }
    if n_keep == 0 || n_keep > spec.n_levels() {
        return Err(invalid(format!("cannot keep {n_keep} of {} levels", spec.n_levels())));
    }
    let v = spec.eigenvectors.columns(0, n_keep);
    let mut m: DMatrix<C64> = v.adjoint() * &op.matrix * v;

    let mut phases = vec![0.0; n_keep];
    let scale = m.iter().fold(0.0_f64, |a, z| a.max(z.norm()));
    for l in 1..n_keep {
        let pivot = if m[(l - 1, l)].norm() > 1e-6 * scale {
            l - 1
        } else {
            (0..l).max_by(|&a, &b| m[(a, l)].norm().total_cmp(&m[(b, l)].norm())).unwrap_or(0)
        };
        let z = m[(pivot, l)];
        if z.norm() == 0.0 {
            continue;
        }
        // |l> -> e^{i phi}|l> multiplies column l by e^{i phi} and row l by e^{-i phi}
        let phi = -z.arg();
        let rot = C64::from_polar(1.0, phi);
        for k in 0..n_keep {
            m[(k, l)] *= rot;
            m[(l, k)] *= rot.conj();
        }
        phases[l] = phi;
    }

    let mut residual = 0.0_f64;
    let mut elements = DMatrix::<f64>::zeros(n_keep, n_keep);
    for i in 0..n_keep {
        for j in 0..n_keep {
            let z = m[(i, j)];
            if z.im.abs() > REALITY_TOL {
                return Err(Error::NumericalFailure(format!(
                    "current element I_{i}{j} keeps imaginary part {:e} after gauge fixing",
                    z.im
                )));
            }
            residual = residual.max(z.im.abs());
            elements[(i, j)] = 0.5 * (z.re + m[(j, i)].re);
        }
    }
    Ok(LoopCurrentMatrix { elements, gauge_phases: phases, residual_imag: residual })
}

/// Spectrum and gauge-fixed currents of a circuit at one flux point.
pub fn currents_at(params: &CircuitParams, trunc: BasisTruncation, n_keep: usize) -> Result<(Spectrum, LoopCurrentMatrix)> {
    let h = build_hamiltonian(params, trunc)?;
    let spec = solve_spectrum(&h, n_keep.max(3))?;
    let op = current_operator_on(params, h.basis.clone());
    let cur = current_matrix_elements(&spec, &op, n_keep)?;
    Ok((spec, cur))
}

#[derive(Debug, Clone)]
pub struct CurrentRow {
    pub f: f64,
    pub currents: Result<ThreeLevelCurrents>,
}

/// Three-level current matrix elements on a flux grid. Failing rows are
/// reported and the sweep continues.
pub fn sweep_currents(params: &CircuitParams, f_grid: &[f64], trunc: BasisTruncation) -> Result<Vec<CurrentRow>> {
    if f_grid.is_empty() {
        return Err(invalid("flux grid is empty"));
    }
    if let Some(bad) = f_grid.iter().find(|f| !(0.4..=0.6).contains(*f)) {
        return Err(invalid(format!("flux grid value {bad} outside [0.4, 0.6]")));
    }
    Ok(f_grid
        .par_iter()
        .map(|&f| CurrentRow {
            f,
            currents: currents_at(&params.with_flux(f), trunc, 3).and_then(|(_, c)| c.three_level()),
        })
        .collect())
}
