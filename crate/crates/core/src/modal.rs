//! Damped modal analysis via the first-order state-space form.
//!
//! The quadratic pencil (M·s² + C·s + K)·r = 0 is linearized as the 2n×2n
//! eigenproblem of A = [[0, I], [−M⁻¹K, −M⁻¹C]], whose eigenvectors take
//! the stacked form [r; s·r]. With C positive semidefinite all eigenvalues
//! satisfy Re(s) ≤ 0; |Im(s)|/2π are the damped frequencies.

pub mod eigen;

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::fem::AssembledSystem;
use crate::model::{BeamGeometry, Material};

/// Complex modes of an assembled system.
///
/// Eigenvalues are sorted by ascending |Im(s)| with conjugates adjacent
/// (positive imaginary part first); `eigenvectors.column(j)` is the state
/// vector [r_j; s_j·r_j] of `eigenvalues[j]`, unit 2-norm, and every pair
/// meets the `eigen::RESIDUAL_TOL` residual bound.
#[derive(Debug, Clone)]
pub struct ModalResult {
    pub eigenvalues: Vec<Complex<f64>>,
    pub eigenvectors: DMatrix<Complex<f64>>,
    /// |Im(s_j)|/2π in Hz.
    pub damped_frequencies_hz: Vec<f64>,
    /// −Re(s_j)/|s_j| (zero for a zero eigenvalue).
    pub modal_damping: Vec<f64>,
}

impl ModalResult {
    pub fn state_dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Damped frequencies of the distinct oscillatory modes (one entry per
    /// conjugate pair), ascending.
    pub fn oscillatory_frequencies_hz(&self) -> Vec<f64> {
        self.eigenvalues
            .iter()
            .filter(|s| s.im > 0.0)
            .map(|s| s.im / (2.0 * std::f64::consts::PI))
            .collect()
    }
}

/// State matrix A = [[0, I], [−M⁻¹K, −M⁻¹C]].
///
/// M is factorized once (Cholesky; the consistent mass matrix is SPD) and the
/// blocks are obtained by triangular solves; the backward error of M·X = K is
/// checked against 1e-12·‖K‖.
pub fn state_matrix(system: &AssembledSystem) -> Result<DMatrix<f64>> {
    let n = system.dim();
    let chol = nalgebra::Cholesky::new(system.mass.clone()).ok_or(Error::SingularMass)?;
    let minv_k = chol.solve(&system.stiffness);
    let minv_c = chol.solve(&system.damping);

    let residual = (&system.mass * &minv_k - &system.stiffness).norm();
    if residual > 1e-12 * system.stiffness.norm() {
        return Err(Error::SingularMass);
    }

    let mut a = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        a[(i, n + i)] = 1.0;
        for j in 0..n {
            a[(n + i, j)] = -minv_k[(i, j)];
            a[(n + i, n + j)] = -minv_c[(i, j)];
        }
    }
    Ok(a)
}

/// Complex eigenpairs of the state matrix.
pub fn modes(system: &AssembledSystem) -> Result<ModalResult> {
    let a = state_matrix(system)?;
    let eig = eigen::complex_eigen(&a)?;
    let damped_frequencies_hz = eig
        .values
        .iter()
        .map(|s| s.im.abs() / (2.0 * std::f64::consts::PI))
        .collect();
    let modal_damping = eig
        .values
        .iter()
        .map(|s| {
            let m = s.norm();
            if m > 0.0 {
                -s.re / m
            } else {
                0.0
            }
        })
        .collect();
    Ok(ModalResult {
        eigenvalues: eig.values,
        eigenvectors: eig.vectors,
        damped_frequencies_hz,
        modal_damping,
    })
}

/// Undamped natural frequencies from the symmetric generalized problem
/// K·φ = λ·M·φ, reduced with a Cholesky factor of M.
///
/// This is an independent route from the state-space eigensolver and is used
/// to cross-check it in the zero-damping case.
pub fn undamped_frequencies_hz(system: &AssembledSystem) -> Result<Vec<f64>> {
    let chol = nalgebra::Cholesky::new(system.mass.clone()).ok_or(Error::SingularMass)?;
    let l = chol.l();
    let tmp = l
        .solve_lower_triangular(&system.stiffness)
        .ok_or(Error::SingularMass)?;
    let b = l
        .solve_lower_triangular(&tmp.transpose())
        .ok_or(Error::SingularMass)?;
    let sym = (&b + b.transpose()) * 0.5;
    let mut lambdas: Vec<f64> = nalgebra::SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    lambdas.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(lambdas
        .into_iter()
        .map(|l| l.max(0.0).sqrt() / (2.0 * std::f64::consts::PI))
        .collect())
}

/// Closed-form natural frequencies of a pinned-pinned prismatic beam,
/// f_n = (1/2π)·(nπ/L)²·√(EI/(ρA)) for n = 1..count, in Hz.
pub fn analytical_pinned_frequencies(
    material: &Material,
    geometry: &BeamGeometry,
    count: usize,
) -> Vec<f64> {
    let l = geometry.length;
    let stiffness_per_mass = material.elastic_modulus * geometry.second_moment()
        / (material.density * geometry.area());
    (1..=count)
        .map(|n| {
            let wave = (n as f64) * std::f64::consts::PI / l;
            wave * wave * stiffness_per_mass.sqrt() / (2.0 * std::f64::consts::PI)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{assemble, constrain_pinned, generate_mesh, Dof, DofKind, Mesh};
    use crate::model::material_catalog;
    use approx::assert_relative_eq;
    use nalgebra::DVector;

    fn sdof(m: f64, c: f64, k: f64) -> AssembledSystem {
        AssembledSystem {
            mass: DMatrix::from_element(1, 1, m),
            damping: DMatrix::from_element(1, 1, c),
            stiffness: DMatrix::from_element(1, 1, k),
            mesh: Mesh {
                node_positions: vec![0.0, 1.0],
                element_spans: vec![],
                attachment_nodes: vec![],
            },
            dof_map: vec![Dof {
                node: 0,
                kind: DofKind::Translation,
            }],
        }
    }

    fn table2_bar() -> (Material, BeamGeometry) {
        let material = material_catalog("aluminum").unwrap();
        let geometry = BeamGeometry::new(
            12.0 * 254.0 / 10000.0,
            0.984 * 254.0 / 10000.0,
            0.03937 * 254.0 / 10000.0,
        )
        .unwrap();
        (material, geometry)
    }

    #[test]
    fn state_matrix_sdof_direct() {
        let a = state_matrix(&sdof(1.0, 0.0, 4.0)).unwrap();
        assert_eq!(a, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -4.0, 0.0]));

        let a = state_matrix(&sdof(2.0, 0.8, 4.0)).unwrap();
        assert_relative_eq!(
            a,
            DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -2.0, -0.4]),
            max_relative = 1e-14
        );
    }

    #[test]
    fn state_matrix_identity_block() {
        let (material, geometry) = table2_bar();
        let mesh = generate_mesh(geometry.length, 4, &[]).unwrap();
        let sys = assemble(&mesh, &material, &geometry, &[]).unwrap();
        let n = sys.dim();
        let a = state_matrix(&sys).unwrap();
        for i in 0..n {
            for j in 0..n {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert_eq!(a[(i, n + j)], expected);
                assert_eq!(a[(i, j)], 0.0);
            }
        }
    }

    #[test]
    fn sdof_undamped_modes() {
        let result = modes(&sdof(1.0, 0.0, 4.0)).unwrap();
        assert_eq!(result.eigenvalues.len(), 2);
        assert_relative_eq!(result.eigenvalues[0].im, 2.0, max_relative = 1e-10);
        assert!(result.eigenvalues[0].re.abs() <= 1e-10);
        assert_relative_eq!(
            result.damped_frequencies_hz[0],
            1.0 / std::f64::consts::PI,
            max_relative = 1e-10
        );
    }

    #[test]
    fn sdof_damped_modes_match_quadratic_formula() {
        // s² + 0.4 s + 4 = 0 → s = −0.2 ± 1.98997487421324 i
        let result = modes(&sdof(1.0, 0.4, 4.0)).unwrap();
        let s = result.eigenvalues[0];
        assert_relative_eq!(s.re, -0.2, max_relative = 1e-10);
        assert_relative_eq!(s.im, 1.989_974_874_213_24, max_relative = 1e-10);
        assert_relative_eq!(result.eigenvalues[1].re, s.re, max_relative = 0.0);
        assert_relative_eq!(result.eigenvalues[1].im, -s.im, max_relative = 0.0);
    }

    #[test]
    fn analytical_frequencies_reference_values() {
        // printed table values for the 12 in × 0.984 in × 0.03937 in aluminum
        // bar; the 0.2% band absorbs that table's unit-conversion rounding
        let (material, geometry) = table2_bar();
        let f = analytical_pinned_frequencies(&material, &geometry, 5);
        let table = [24.8197, 99.2788, 223.3774, 397.1154, 620.4928];
        for (computed, printed) in f.iter().zip(table) {
            assert_relative_eq!(*computed, printed, max_relative = 2e-3);
        }
    }

    #[test]
    fn analytical_frequency_scalings() {
        let (material, geometry) = table2_bar();
        let f = analytical_pinned_frequencies(&material, &geometry, 6);
        for (i, fi) in f.iter().enumerate() {
            let n = (i + 1) as f64;
            assert_relative_eq!(fi / f[0], n * n, max_relative = 1e-12);
        }
        let long = BeamGeometry::new(4.0 * geometry.length, geometry.width, geometry.thickness)
            .unwrap();
        let fl = analytical_pinned_frequencies(&material, &long, 3);
        for (a, b) in fl.iter().zip(&f) {
            assert_relative_eq!(*a, b / 16.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn pinned_bar_fe_matches_analytical_to_table_error_pattern() {
        let (material, geometry) = table2_bar();
        let mesh = generate_mesh(geometry.length, 30, &[]).unwrap();
        let free = assemble(&mesh, &material, &geometry, &[]).unwrap();
        let sys = constrain_pinned(&free, &[0, mesh.node_count() - 1]).unwrap();
        let result = modes(&sys).unwrap();
        let fe = result.oscillatory_frequencies_hz();
        let analytical = analytical_pinned_frequencies(&material, &geometry, 5);
        // per-mode relative error bounds follow the reference table's
        // "% error" column magnitudes
        let bounds = [1e-6, 1e-5, 1e-5, 5e-5, 1e-4];
        for ((fe_i, an_i), bound) in fe.iter().zip(&analytical).zip(bounds) {
            let rel = (fe_i - an_i).abs() / an_i;
            assert!(
                rel <= bound,
                "FE {fe_i} vs analytical {an_i}: rel error {rel:e} > {bound:e}"
            );
        }
    }

    #[test]
    fn zero_damping_cross_check_between_eigen_routes() {
        let (material, geometry) = table2_bar();
        let mesh = generate_mesh(geometry.length, 8, &[]).unwrap();
        let free = assemble(&mesh, &material, &geometry, &[]).unwrap();
        let sys = constrain_pinned(&free, &[0, mesh.node_count() - 1]).unwrap();

        let state = modes(&sys).unwrap();
        let max_s = state
            .eigenvalues
            .iter()
            .map(|s| s.norm())
            .fold(0.0, f64::max);
        for s in &state.eigenvalues {
            assert!(s.re.abs() <= 1e-8 * max_s, "undamped spectrum drifted: {s}");
        }

        let symmetric = undamped_frequencies_hz(&sys).unwrap();
        let oscillatory = state.oscillatory_frequencies_hz();
        assert_eq!(symmetric.len(), oscillatory.len());
        for (a, b) in oscillatory.iter().zip(&symmetric) {
            assert_relative_eq!(a, b, max_relative = 1e-8);
        }
    }

    #[test]
    fn eigenvector_state_structure() {
        // columns are [r; s·r]: the lower half equals s times the upper half
        let result = modes(&sdof(1.0, 0.4, 4.0)).unwrap();
        for (j, &s) in result.eigenvalues.iter().enumerate() {
            let col = result.eigenvectors.column(j);
            assert!((col[1] - s * col[0]).norm() <= 1e-10);
        }
    }

    #[test]
    fn residual_contract_on_assembled_system() {
        let (material, geometry) = table2_bar();
        use crate::model::{ActuatorAttachment, DampingSpec};
        let att = [
            ActuatorAttachment::new(0.0, 16180.0, 0.005, DampingSpec::Ratio(0.02), 4.125e-5)
                .unwrap(),
            ActuatorAttachment::new(
                geometry.length,
                16180.0,
                0.005,
                DampingSpec::Ratio(0.02),
                4.125e-5,
            )
            .unwrap(),
        ];
        let mesh = generate_mesh(geometry.length, 12, &[0.0, geometry.length]).unwrap();
        let sys = assemble(&mesh, &material, &geometry, &att).unwrap();
        let a = state_matrix(&sys).unwrap();
        let result = modes(&sys).unwrap();
        let scale = a.norm();
        for (j, &s) in result.eigenvalues.iter().enumerate() {
            let v: DVector<Complex<f64>> = result.eigenvectors.column(j).into();
            let res = eigen::pair_residual(&a, s, &v);
            assert!(res <= eigen::RESIDUAL_TOL * scale);
            assert!(s.re <= 1e-8 * scale, "damped system must not grow: {s}");
        }
        // conjugate pairing
        for pair in result.eigenvalues.chunks(2) {
            if pair.len() == 2 && pair[0].im != 0.0 {
                assert_eq!(pair[0].re, pair[1].re);
                assert_eq!(pair[0].im, -pair[1].im);
            }
        }
    }

    #[test]
    fn singular_mass_is_reported() {
        let mut sys = sdof(1.0, 0.0, 4.0);
        sys.mass[(0, 0)] = 0.0;
        assert!(matches!(state_matrix(&sys), Err(Error::SingularMass)));
    }
}
