//! Three-junction flux-qubit Hamiltonian in a truncated charge basis.
//!
//! The circuit is described by the phase variables `phi_p = (phi_1 + phi_2)/2`
//! and `phi_m = (phi_2 - phi_1)/2`. Plane waves `exp(i (n_p phi_p + n_m phi_m))`
//! are single valued in the junction phases `phi_1, phi_2` only when
//! `n_p + n_m` is even, so the basis is restricted to that sector. The
//! complementary sector describes states that change sign under a `2 pi` shift
//! of a junction phase and would double the spectrum with spurious levels.
//!
//! Energies are in units of `E_J`.

use std::f64::consts::TAU;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Physical parameters of the circuit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    /// Ratio of the small junction to the two large ones.
    pub alpha: f64,
    /// `E_J / E_c` with `E_c = e^2 / 2 C_J`.
    pub ej_over_ec: f64,
    /// `E_J / hbar` in rad/s.
    pub ej_scale: f64,
    /// Reduced flux `f = Phi_e / Phi_0`.
    pub f: f64,
}

impl CircuitParams {
    pub fn new(alpha: f64, ej_over_ec: f64, ej_scale: f64, f: f64) -> Result<Self> {
        let p = Self { alpha, ej_over_ec, ej_scale, f };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.5 && self.alpha < 1.0) {
            return Err(invalid(format!("alpha must lie in (0.5, 1), got {}", self.alpha)));
        }
        if !(self.ej_over_ec > 0.0 && self.ej_over_ec.is_finite()) {
            return Err(invalid(format!("ej_over_ec must be positive, got {}", self.ej_over_ec)));
        }
        if !(self.ej_scale > 0.0 && self.ej_scale.is_finite()) {
            return Err(invalid(format!("ej_scale must be positive, got {}", self.ej_scale)));
        }
        if !(0.0..=1.0).contains(&self.f) {
            return Err(invalid(format!("reduced flux must lie in [0, 1], got {}", self.f)));
        }
        Ok(())
    }

    pub fn with_flux(&self, f: f64) -> Self {
        Self { f, ..*self }
    }

    /// Kinetic prefactor of the `n_p` mode, `2 E_c / E_J`.
    fn kinetic_p(&self) -> f64 {
        2.0 / self.ej_over_ec
    }

    /// Kinetic prefactor of the `n_m` mode, `2 E_c / ((1 + 2 alpha) E_J)`.
    fn kinetic_m(&self) -> f64 {
        2.0 / (self.ej_over_ec * (1.0 + 2.0 * self.alpha))
    }
}

/// Plane-wave cutoff: indices run over `-n_p..=n_p` and `-n_m..=n_m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisTruncation {
    pub n_p: usize,
    pub n_m: usize,
}

impl BasisTruncation {
    pub const fn new(n_p: usize, n_m: usize) -> Self {
        Self { n_p, n_m }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_p < 4 || self.n_m < 4 {
            return Err(invalid(format!(
                "basis truncation must satisfy n_p, n_m >= 4, got ({}, {})",
                self.n_p, self.n_m
            )));
        }
        Ok(())
    }

    pub fn grown_by(&self, k: usize) -> Self {
        Self::new(self.n_p + k, self.n_m + k)
    }
}

impl Default for BasisTruncation {
    /// Cutoff at which the six lowest levels are converged well below
    /// 1e-8 E_J for `E_J / E_c = 48`, `alpha = 0.7`. The `n_m` mode is the
    /// lighter one and needs the wider window.
    fn default() -> Self {
        Self::new(12, 20)
    }
}

/// A charge state `|n_p, n_m>`.
pub type ChargeState = (i32, i32);

/// Enumeration of the charge states kept by a truncation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChargeBasis {
    trunc: BasisTruncation,
    states: Vec<ChargeState>,
    lookup: Vec<Option<usize>>,
}

impl ChargeBasis {
    pub fn new(trunc: BasisTruncation) -> Self {
        let (np, nm) = (trunc.n_p as i32, trunc.n_m as i32);
        let width = (2 * nm + 1) as usize;
        let mut lookup = vec![None; (2 * np + 1) as usize * width];
        let mut states = Vec::new();
        for p in -np..=np {
            for m in -nm..=nm {
                if (p + m).rem_euclid(2) == 0 {
                    lookup[(p + np) as usize * width + (m + nm) as usize] = Some(states.len());
                    states.push((p, m));
                }
            }
        }
        Self { trunc, states, lookup }
    }

    pub fn truncation(&self) -> BasisTruncation {
        self.trunc
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[ChargeState] {
        &self.states
    }

    pub fn index_of(&self, (p, m): ChargeState) -> Option<usize> {
        let (np, nm) = (self.trunc.n_p as i32, self.trunc.n_m as i32);
        if p.abs() > np || m.abs() > nm {
            return None;
        }
        let width = (2 * nm + 1) as usize;
        self.lookup[(p + np) as usize * width + (m + nm) as usize]
    }
}

/// A Hermitian operator represented in a [`ChargeBasis`].
#[derive(Debug, Clone)]
pub struct ChargeOperator {
    pub basis: Arc<ChargeBasis>,
    pub matrix: DMatrix<C64>,
}

impl ChargeOperator {
    /// Largest entry of `|A - A^dagger|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.matrix.nrows();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().fold(0.0_f64, |a, z| a.max(z.norm()))
    }
}

/// Matrix element `<bra| H |ket>` of the circuit Hamiltonian, in units of `E_J`.
///
/// Analytic in the plane-wave basis; valid for any pair of integer charge
/// states regardless of sector.
pub fn hamiltonian_element(params: &CircuitParams, bra: ChargeState, ket: ChargeState) -> C64 {
    let dp = bra.0 - ket.0;
    let dm = bra.1 - ket.1;
    match (dp, dm) {
        (0, 0) => {
            let (p, m) = (ket.0 as f64, ket.1 as f64);
            C64::from(params.kinetic_p() * p * p + params.kinetic_m() * m * m + 2.0 + params.alpha)
        }
        // -2 cos(phi_p) cos(phi_m) = -(1/2) sum over the four exponentials
        (1 | -1, 1 | -1) => C64::from(-0.5),
        // -alpha cos(2 pi f + 2 phi_m): raising n_m by 2 carries exp(+i 2 pi f)
        (0, 2) => -0.5 * params.alpha * C64::from_polar(1.0, TAU * params.f),
        (0, -2) => -0.5 * params.alpha * C64::from_polar(1.0, -TAU * params.f),
        _ => C64::from(0.0),
    }
}

/// Neighbour offsets reached by the Hamiltonian and the loop-current operator.
pub(crate) const COUPLING_OFFSETS: [ChargeState; 6] = [(1, 1), (1, -1), (-1, 1), (-1, -1), (0, 2), (0, -2)];

pub(crate) fn assemble<F>(basis: Arc<ChargeBasis>, element: F) -> ChargeOperator
where
    F: Fn(ChargeState, ChargeState) -> C64,
{
    let n = basis.dim();
    let mut matrix = DMatrix::<C64>::zeros(n, n);
    for (j, &ket) in basis.states().iter().enumerate() {
        matrix[(j, j)] = element(ket, ket);
        for (dp, dm) in COUPLING_OFFSETS {
            if let Some(i) = basis.index_of((ket.0 + dp, ket.1 + dm)) {
                matrix[(i, j)] = element(basis.states()[i], ket);
            }
        }
    }
    ChargeOperator { basis, matrix }
}

/// Charge-basis matrix of the circuit Hamiltonian (units of `E_J`).
pub fn build_hamiltonian(params: &CircuitParams, trunc: BasisTruncation) -> Result<ChargeOperator> {
    params.validate()?;
    trunc.validate()?;
    let basis = Arc::new(ChargeBasis::new(trunc));
    if basis.dim() < 9 {
        return Err(invalid(format!("basis dimension {} is below 9", basis.dim())));
    }
    Ok(assemble(basis, |bra, ket| hamiltonian_element(params, bra, ket)))
}

/// Lowest eigenpairs of a circuit Hamiltonian.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Ascending, units of `E_J`.
    pub eigenvalues: Vec<f64>,
    /// One column per retained level, over the charge basis.
    pub eigenvectors: DMatrix<C64>,
    pub basis: Arc<ChargeBasis>,
    /// Set when two retained levels are closer than `DEGENERACY_FLAG`;
    /// their eigenvectors are then not individually meaningful.
    pub near_degenerate: bool,
}

impl Spectrum {
    pub fn n_levels(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, l: usize) -> DVector<C64> {
        self.eigenvectors.column(l).into_owned()
    }
}

pub const DEGENERACY_FLAG: f64 = 1e-10;

/// Diagonalizes `h` and keeps the `n_levels` lowest eigenpairs.
///
/// Operators that are real in the phase representation (`A(-m,-n) = A(m,n)*`
/// in the charge basis, true for the Hamiltonian and the loop current) are
/// diagonalized as real symmetric matrices over `cos`/`sin` combinations of
/// the `+n`/`-n` charge states; anything else goes through the complex
/// Hermitian solver.
pub fn solve_spectrum(h: &ChargeOperator, n_levels: usize) -> Result<Spectrum> {
    let n = h.matrix.nrows();
    if n_levels == 0 || n_levels > n {
        return Err(invalid(format!("cannot keep {n_levels} levels of a {n}-dimensional operator")));
    }
    let scale = h.max_abs().max(f64::MIN_POSITIVE);
    let defect = h.hermiticity_defect();
    if defect > 1e-12 * scale {
        return Err(invalid(format!("operator is not Hermitian (defect {defect:e}, scale {scale:e})")));
    }
    let (values, vectors) = match RealBasis::for_operator(h) {
        Some(real) => real.eigen(h),
        None => {
            let eig = h.matrix.clone().symmetric_eigen();
            (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
        }
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalFailure(format!(
            "eigen-solver returned non-finite eigenvalues for a {n}x{n} operator"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    order.truncate(n_levels);

    let eigenvalues: Vec<f64> = order.iter().map(|&k| values[k]).collect();
    let mut eigenvectors = DMatrix::<C64>::zeros(n, n_levels);
    for (col, &k) in order.iter().enumerate() {
        eigenvectors.set_column(col, &vectors.column(k));
    }
    let near_degenerate = eigenvalues.windows(2).any(|w| w[1] - w[0] < DEGENERACY_FLAG);
    Ok(Spectrum { eigenvalues, eigenvectors, basis: h.basis.clone(), near_degenerate })
}

/// Orthonormal basis of real phase-space functions: `|0>` and, for every
/// pair `{n, -n}`, `(|n> + |-n>)/sqrt 2` and `-i(|n> - |-n>)/sqrt 2`.
struct RealBasis {
    /// Each element lists `(charge index, coefficient)`.
    vectors: Vec<Vec<(usize, C64)>>,
}

impl RealBasis {
    /// `None` unless the basis is closed under `n -> -n` and `op` is real
    /// in the phase representation.
    fn for_operator(op: &ChargeOperator) -> Option<Self> {
        let basis = &op.basis;
        let mirror: Vec<usize> = basis
            .states()
            .iter()
            .map(|&(p, m)| basis.index_of((-p, -m)))
            .collect::<Option<_>>()?;
        if mirror.len() != op.matrix.nrows() {
            return None;
        }
        let tol = 1e-13 * op.max_abs().max(f64::MIN_POSITIVE);
        for j in 0..mirror.len() {
            for i in 0..mirror.len() {
                let a = op.matrix[(i, j)];
                if a != C64::from(0.0) && (op.matrix[(mirror[i], mirror[j])] - a.conj()).norm() > tol {
                    return None;
                }
            }
        }
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut vectors = Vec::with_capacity(mirror.len());
        for (i, &mi) in mirror.iter().enumerate() {
            if mi == i {
                vectors.push(vec![(i, C64::from(1.0))]);
            } else if i < mi {
                vectors.push(vec![(i, C64::from(r)), (mi, C64::from(r))]);
                vectors.push(vec![(i, C64::new(0.0, -r)), (mi, C64::new(0.0, r))]);
            }
        }
        Some(Self { vectors })
    }

    fn eigen(&self, op: &ChargeOperator) -> (Vec<f64>, DMatrix<C64>) {
        let n = self.vectors.len();
        // column j of op * U, kept sparse: op has few non-zeros per column
        let mut real = DMatrix::<f64>::zeros(n, n);
        let mut au = vec![C64::from(0.0); op.matrix.nrows()];
        for (l, vl) in self.vectors.iter().enumerate() {
            au.iter_mut().for_each(|z| *z = C64::from(0.0));
            for &(b, cb) in vl {
                for (a, z) in op.matrix.column(b).iter().enumerate() {
                    if *z != C64::from(0.0) {
                        au[a] += z * cb;
                    }
                }
            }
            for (k, vk) in self.vectors.iter().enumerate() {
                let mut acc = C64::from(0.0);
                for &(a, ca) in vk {
                    acc += ca.conj() * au[a];
                }
                real[(k, l)] = acc.re;
            }
        }
        // symmetrize away round-off before the real solver
        let real = (&real + real.transpose()) * 0.5;
        let eig = real.symmetric_eigen();
        let dim = op.matrix.nrows();
        let mut vectors = DMatrix::<C64>::zeros(dim, n);
        for col in 0..n {
            for (k, vk) in self.vectors.iter().enumerate() {
                let w = eig.eigenvectors[(k, col)];
                if w != 0.0 {
                    for &(a, ca) in vk {
                        vectors[(a, col)] += ca * w;
                    }
                }
            }
        }
        (eig.eigenvalues.iter().copied().collect(), vectors)
    }
}

/// Transition angular frequencies between the three lowest levels, in
/// units of `E_J / hbar`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionFrequencies {
    /// `(E_1 - E_0) / hbar`
    pub omega1: f64,
    /// `(E_2 - E_0) / hbar`
    pub omega2: f64,
    /// `(E_2 - E_1) / hbar`
    pub omega3: f64,
}

impl TransitionFrequencies {
    pub fn from_levels(e0: f64, e1: f64, e2: f64) -> Self {
        let omega1 = e1 - e0;
        let omega3 = e2 - e1;
        Self { omega1, omega2: omega1 + omega3, omega3 }
    }

    /// The same frequencies in rad/s.
    pub fn to_angular(&self, ej_scale: f64) -> [f64; 3] {
        [self.omega1 * ej_scale, self.omega2 * ej_scale, self.omega3 * ej_scale]
    }
}

pub fn transition_frequencies(spec: &Spectrum) -> Result<TransitionFrequencies> {
    if spec.n_levels() < 3 {
        return Err(invalid("transition frequencies need at least three levels"));
    }
    let e = &spec.eigenvalues;
    Ok(TransitionFrequencies::from_levels(e[0], e[1], e[2]))
}

/// Number of levels reported by level sweeps.
pub const SWEEP_LEVELS: usize = 6;

#[derive(Debug, Clone)]
pub struct LevelRow {
    pub f: f64,
    pub energies: Result<[f64; SWEEP_LEVELS]>,
}

/// The six lowest levels on a grid of reduced flux values. Rows are
/// computed independently; a failing row is reported and the sweep goes on.
pub fn sweep_levels(params: &CircuitParams, f_grid: &[f64], trunc: BasisTruncation) -> Result<Vec<LevelRow>> {
    if f_grid.is_empty() {
        return Err(invalid("flux grid is empty"));
    }
    if let Some(bad) = f_grid.iter().find(|f| !(0.4..=0.6).contains(*f)) {
        return Err(invalid(format!("flux grid value {bad} outside [0.4, 0.6]")));
    }
    Ok(f_grid
        .par_iter()
        .map(|&f| LevelRow { f, energies: levels_at(&params.with_flux(f), trunc) })
        .collect())
}

fn levels_at(params: &CircuitParams, trunc: BasisTruncation) -> Result<[f64; SWEEP_LEVELS]> {
    let h = build_hamiltonian(params, trunc)?;
    let spec = solve_spectrum(&h, SWEEP_LEVELS)?;
    let mut out = [0.0; SWEEP_LEVELS];
    out.copy_from_slice(&spec.eigenvalues);
    Ok(out)
}

/// The optimal point of the circuit.
pub const OPTIMAL_FLUX: f64 = 0.5;

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_params(f: f64) -> CircuitParams {
        CircuitParams::new(0.7, 48.0, TAU * 144e9, f).unwrap()
    }

    #[test]
    fn alpha_coupling_at_half_flux() {
        let p = reference_params(0.5);
        for s in [2, -2] {
            let z = hamiltonian_element(&p, (0, 0), (0, s));
            assert!((z - C64::from(0.35)).norm() < 1e-15, "{z}");
        }
    }

    #[test]
    fn josephson_coupling_is_minus_half() {
        let p = reference_params(0.37);
        for (dp, dm) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
            assert_eq!(hamiltonian_element(&p, (dp, dm), (0, 0)), C64::from(-0.5));
        }
    }

    #[test]
    fn diagonal_element() {
        let p = reference_params(0.5);
        let z = hamiltonian_element(&p, (1, 0), (1, 0));
        assert!((z.re - (2.0 / 48.0 + 2.7)).abs() < 1e-15);
        assert_eq!(z.im, 0.0);
    }

    #[test]
    fn basis_keeps_even_sector_only() {
        let b = ChargeBasis::new(BasisTruncation::new(4, 4));
        assert_eq!(b.dim(), 41);
        assert!(b.states().iter().all(|(p, m)| (p + m) % 2 == 0));
        assert_eq!(b.index_of((1, 0)), None);
        assert!(b.index_of((1, 1)).is_some());
        assert_eq!(b.index_of((5, 1)), None);
    }

    #[test]
    fn truncation_too_small() {
        let p = reference_params(0.5);
        assert!(matches!(build_hamiltonian(&p, BasisTruncation::new(3, 8)), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(CircuitParams::new(0.5, 48.0, 1.0, 0.5).is_err());
        assert!(CircuitParams::new(0.7, -1.0, 1.0, 0.5).is_err());
        assert!(CircuitParams::new(0.7, 48.0, 1.0, 1.2).is_err());
    }

    #[test]
    fn hamiltonian_is_hermitian() {
        for f in [0.45, 0.5, 0.5123, 0.55] {
            let h = build_hamiltonian(&reference_params(f), BasisTruncation::new(8, 8)).unwrap();
            assert!(h.hermiticity_defect() < 1e-14);
        }
    }

    #[test]
    fn two_level_toy() {
        let basis = Arc::new(ChargeBasis::new(BasisTruncation::new(4, 4)));
        let mut matrix = DMatrix::<C64>::zeros(2, 2);
        matrix[(0, 1)] = C64::from(1.0);
        matrix[(1, 0)] = C64::from(1.0);
        let spec = solve_spectrum(&ChargeOperator { basis, matrix }, 2).unwrap();
        assert!((spec.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((spec.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn non_hermitian_rejected() {
        let basis = Arc::new(ChargeBasis::new(BasisTruncation::new(4, 4)));
        let mut matrix = DMatrix::<C64>::zeros(2, 2);
        matrix[(0, 1)] = C64::new(0.0, 1.0);
        matrix[(1, 0)] = C64::new(0.0, 1.0);
        assert!(solve_spectrum(&ChargeOperator { basis, matrix }, 2).is_err());
    }

    #[test]
    fn transition_identity() {
        let t = TransitionFrequencies::from_levels(-0.3, 0.1271, 0.9);
        assert!((t.omega2 - t.omega1 - t.omega3).abs() < 1e-15);
    }

    #[test]
    fn single_row_sweep() {
        let rows = sweep_levels(&reference_params(0.5), &[0.5], BasisTruncation::new(8, 8)).unwrap();
        assert_eq!(rows.len(), 1);
        let e = rows[0].energies.as_ref().unwrap();
        assert!(e.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn sweep_rejects_out_of_window_flux() {
        assert!(sweep_levels(&reference_params(0.5), &[0.3], BasisTruncation::new(8, 8)).is_err());
        assert!(sweep_levels(&reference_params(0.5), &[], BasisTruncation::new(8, 8)).is_err());
    }
}
