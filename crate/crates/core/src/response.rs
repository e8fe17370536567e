//! Exact harmonic response of the assembled system.
//!
//! For forcing Σᵢ (gᵢ·sin ωᵢt + hᵢ·cos ωᵢt) the steady state is
//! dₚ(t) = Σᵢ (pᵢ·cos ωᵢt + qᵢ·sin ωᵢt), with each (pᵢ, qᵢ) solved from the
//! real 2n×2n block system
//!
//! ```text
//! [K − ω²M    ωC  ] [p]   [h]
//! [ −ωC    K − ω²M] [q] = [g]
//! ```
//!
//! The complete response adds the transient Σⱼ εⱼ·rⱼ·e^{sⱼt} built from the
//! damped modes, with ε solved from the initial conditions. Peak steady
//! acceleration per position is the per-excitation amplitude sum
//! Σᵢ ωᵢ²·√(pᵢₖ² + qᵢₖ²), an upper envelope when frequencies differ.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fem::{AssembledSystem, DofKind};
use crate::modal::{modes, ModalResult};
use crate::model::{resolve_damping, ActuatorAttachment, ExcitationCommand, StudyConfig};

/// Relative residual bound on each steady-state block solve.
pub const STEADY_RESIDUAL_TOL: f64 = 1e-10;

/// Reciprocal-condition estimate below which the harmonic block system is
/// treated as an undamped resonance.
pub const RESONANCE_RCOND: f64 = 1e-14;

/// One harmonic forcing term: amplitudes of sin and cos at every DOF.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicExcitation {
    /// Circular frequency ω in rad/s.
    pub omega: f64,
    /// g: amplitudes of the sin ωt component, one per DOF.
    pub sin_amplitudes: DVector<f64>,
    /// h: amplitudes of the cos ωt component, one per DOF.
    pub cos_amplitudes: DVector<f64>,
}

/// Steady-state coefficients for one excitation frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyComponent {
    pub omega: f64,
    /// p: cos ωt coefficients in m.
    pub cos_coeffs: DVector<f64>,
    /// q: sin ωt coefficients in m.
    pub sin_coeffs: DVector<f64>,
}

/// Superposable steady-state solution, one component per excitation.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SteadyState {
    pub components: Vec<SteadyComponent>,
}

impl SteadyState {
    /// Steady displacement at time `t` (Σᵢ pᵢ cos ωᵢt + qᵢ sin ωᵢt).
    pub fn displacement_at(&self, dim: usize, t: f64) -> DVector<f64> {
        let mut d = DVector::zeros(dim);
        for c in &self.components {
            let (s, co) = (c.omega * t).sin_cos();
            d.axpy(co, &c.cos_coeffs, 1.0);
            d.axpy(s, &c.sin_coeffs, 1.0);
        }
        d
    }

    /// Steady velocity at time `t`.
    pub fn velocity_at(&self, dim: usize, t: f64) -> DVector<f64> {
        let mut v = DVector::zeros(dim);
        for c in &self.components {
            let (s, co) = (c.omega * t).sin_cos();
            v.axpy(-c.omega * s, &c.cos_coeffs, 1.0);
            v.axpy(c.omega * co, &c.sin_coeffs, 1.0);
        }
        v
    }

    /// Steady acceleration at time `t` (−Σᵢ ωᵢ²(pᵢ cos ωᵢt + qᵢ sin ωᵢt)).
    pub fn acceleration_at(&self, dim: usize, t: f64) -> DVector<f64> {
        let mut a = DVector::zeros(dim);
        for c in &self.components {
            let (s, co) = (c.omega * t).sin_cos();
            let w2 = c.omega * c.omega;
            a.axpy(-w2 * co, &c.cos_coeffs, 1.0);
            a.axpy(-w2 * s, &c.sin_coeffs, 1.0);
        }
        a
    }
}

/// Sampled motion history.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub displacements: Vec<DVector<f64>>,
    pub velocities: Option<Vec<DVector<f64>>>,
    pub accelerations: Option<Vec<DVector<f64>>>,
}

/// Peak steady acceleration per translational node, in g-units.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakAccelerationField {
    /// Node coordinates in m, ascending.
    pub positions: Vec<f64>,
    /// Σᵢ ωᵢ²√(pᵢₖ² + qᵢₖ²) / g₀ at each position.
    pub peaks_g: Vec<f64>,
}

/// Forcing produced by an actuator's sinusoidal base displacement
/// u_b(t) = a·sin(ωt) acting through its spring and damper:
/// f(t) = k_b·a·sin(ωt) + c·a·ω·cos(ωt) at the attachment's translational DOF.
pub fn base_excitation_forces(
    system: &AssembledSystem,
    attachment: &ActuatorAttachment,
    frequency_hz: f64,
) -> Result<HarmonicExcitation> {
    if !(frequency_hz > 0.0) {
        return Err(Error::NonPositiveParameter {
            name: "frequency_hz",
            value: frequency_hz,
        });
    }
    let node = system
        .mesh
        .node_at(attachment.position)
        .ok_or(Error::UnknownAttachment {
            position: attachment.position,
        })?;
    let dof = system
        .translational_dof(node)
        .ok_or(Error::UnknownAttachment {
            position: attachment.position,
        })?;
    let omega = 2.0 * std::f64::consts::PI * frequency_hz;
    let c = resolve_damping(attachment)?;
    let n = system.dim();
    let mut sin_amplitudes = DVector::zeros(n);
    let mut cos_amplitudes = DVector::zeros(n);
    sin_amplitudes[dof] = attachment.stiffness * attachment.base_amplitude;
    cos_amplitudes[dof] = c * attachment.base_amplitude * omega;
    Ok(HarmonicExcitation {
        omega,
        sin_amplitudes,
        cos_amplitudes,
    })
}

/// Forcing for a point force F·sin(ωt), distributed as a consistent nodal
/// load N(x)ᵀ·F over the containing element (a pure translational selector
/// when the position coincides with a node).
pub fn direct_force_excitation(
    system: &AssembledSystem,
    position: f64,
    force_amplitude: f64,
    frequency_hz: f64,
) -> Result<HarmonicExcitation> {
    if !(frequency_hz > 0.0) {
        return Err(Error::NonPositiveParameter {
            name: "frequency_hz",
            value: frequency_hz,
        });
    }
    let length = system.mesh.length();
    if !(0.0..=length).contains(&position) {
        return Err(Error::PositionOutOfRange { position, length });
    }
    let n = system.dim();
    let mut sin_amplitudes = DVector::zeros(n);

    let span = system
        .mesh
        .element_spans
        .iter()
        .find(|s| {
            let x0 = system.mesh.node_positions[s.left_node];
            position >= x0 && position <= x0 + s.length
        })
        .expect("position within mesh bounds");
    let x_local = position - system.mesh.node_positions[span.left_node];
    let shape = crate::fem::shape_functions(x_local, span.length);
    let targets = [
        (span.left_node, DofKind::Translation, shape[0]),
        (span.left_node, DofKind::Rotation, shape[1]),
        (span.right_node, DofKind::Translation, shape[2]),
        (span.right_node, DofKind::Rotation, shape[3]),
    ];
    for (node, kind, weight) in targets {
        if let Some(i) = system
            .dof_map
            .iter()
            .position(|d| d.node == node && d.kind == kind)
        {
            sin_amplitudes[i] += weight * force_amplitude;
        }
    }

    Ok(HarmonicExcitation {
        omega: 2.0 * std::f64::consts::PI * frequency_hz,
        sin_amplitudes,
        cos_amplitudes: DVector::zeros(n),
    })
}

/// Build the excitation list of a study configuration against its assembled
/// system.
pub fn excitations_from_config(
    system: &AssembledSystem,
    config: &StudyConfig,
) -> Result<Vec<HarmonicExcitation>> {
    config
        .excitations
        .iter()
        .map(|exc| match *exc {
            ExcitationCommand::ActuatorBase {
                attachment,
                frequency_hz,
            } => base_excitation_forces(system, &config.attachments[attachment], frequency_hz),
            ExcitationCommand::DirectForce {
                position,
                frequency_hz,
                force_amplitude,
            } => direct_force_excitation(system, position, force_amplitude, frequency_hz),
        })
        .collect()
}

fn harmonic_block(system: &AssembledSystem, omega: f64) -> DMatrix<f64> {
    let n = system.dim();
    let mut block = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = system.stiffness[(i, j)] - omega * omega * system.mass[(i, j)];
            let wc = omega * system.damping[(i, j)];
            block[(i, j)] = z;
            block[(n + i, n + j)] = z;
            block[(i, n + j)] = wc;
            block[(n + i, j)] = -wc;
        }
    }
    block
}

/// Steady-state coefficients for every excitation, solved independently per
/// frequency by dense LU with partial pivoting.
///
/// A numerically singular block system signals an undamped resonance: there
/// is no steady state there and [`Error::ResonanceSingular`] is returned.
pub fn steady_state(
    system: &AssembledSystem,
    excitations: &[HarmonicExcitation],
) -> Result<SteadyState> {
    let n = system.dim();
    let mut components = Vec::with_capacity(excitations.len());
    for exc in excitations {
        if !(exc.omega > 0.0) {
            return Err(Error::NonPositiveParameter {
                name: "omega",
                value: exc.omega,
            });
        }
        assert_eq!(exc.sin_amplitudes.len(), n, "excitation sized to system");
        assert_eq!(exc.cos_amplitudes.len(), n, "excitation sized to system");
        let frequency_hz = exc.omega / (2.0 * std::f64::consts::PI);

        let block = harmonic_block(system, exc.omega);
        let lu = block.clone().lu();

        // cheap reciprocal-condition estimate from the U diagonal; the
        // residual check below catches anything it misses
        let upper = lu.u();
        let mut min_pivot = f64::INFINITY;
        let mut max_pivot: f64 = 0.0;
        for i in 0..2 * n {
            let u = upper[(i, i)].abs();
            min_pivot = min_pivot.min(u);
            max_pivot = max_pivot.max(u);
        }
        if max_pivot == 0.0 || min_pivot / max_pivot < RESONANCE_RCOND {
            return Err(Error::ResonanceSingular { frequency_hz });
        }

        let mut rhs = DVector::zeros(2 * n);
        rhs.rows_mut(0, n).copy_from(&exc.cos_amplitudes);
        rhs.rows_mut(n, n).copy_from(&exc.sin_amplitudes);
        let sol = lu
            .solve(&rhs)
            .ok_or(Error::ResonanceSingular { frequency_hz })?;

        let residual = (&block * &sol - &rhs).norm();
        let rhs_norm = rhs.norm();
        if rhs_norm > 0.0 && residual > STEADY_RESIDUAL_TOL * rhs_norm {
            return Err(Error::ResonanceSingular { frequency_hz });
        }

        components.push(SteadyComponent {
            omega: exc.omega,
            cos_coeffs: sol.rows(0, n).into(),
            sin_coeffs: sol.rows(n, n).into(),
        });
    }
    Ok(SteadyState { components })
}

/// Complete solution d(t) = Σᵢ(pᵢ cos ωᵢt + qᵢ sin ωᵢt) + Σⱼ εⱼ rⱼ e^{sⱼt}
/// sampled at the given times.
///
/// The coefficients ε solve V·ε = [d₀ − Σpᵢ; v₀ − Σωᵢqᵢ], the state-space
/// initial condition minus the particular part at t = 0.
pub fn complete_response(
    system: &AssembledSystem,
    excitations: &[HarmonicExcitation],
    d0: &DVector<f64>,
    v0: &DVector<f64>,
    times: &[f64],
) -> Result<Trajectory> {
    let n = system.dim();
    assert_eq!(d0.len(), n, "initial displacement sized to system");
    assert_eq!(v0.len(), n, "initial velocity sized to system");

    let steady = steady_state(system, excitations)?;
    let modal = modes(system)?;
    let coeffs = transient_coefficients(&modal, &steady, d0, v0)?;

    let mut displacements = Vec::with_capacity(times.len());
    let mut velocities = Vec::with_capacity(times.len());
    let mut accelerations = Vec::with_capacity(times.len());
    for &t in times {
        let mut d = steady.displacement_at(n, t);
        let mut v = steady.velocity_at(n, t);
        let mut a = steady.acceleration_at(n, t);

        let mut d_c = DVector::<Complex<f64>>::zeros(n);
        let mut v_c = DVector::<Complex<f64>>::zeros(n);
        let mut a_c = DVector::<Complex<f64>>::zeros(n);
        for (j, &s) in modal.eigenvalues.iter().enumerate() {
            let weight = coeffs[j] * (s * t).exp();
            if weight.norm() == 0.0 {
                continue;
            }
            let r = modal.eigenvectors.column(j).rows(0, n);
            for i in 0..n {
                let term = weight * r[i];
                d_c[i] += term;
                v_c[i] += term * s;
                a_c[i] += term * s * s;
            }
        }

        let d_norm = d.norm().max(d_c.map(|z| z.re).norm());
        let imag = d_c.map(|z| z.im).norm();
        assert!(
            imag <= 1e-8 * d_norm.max(1e-300),
            "transient imaginary residue {imag:e} exceeds 1e-8 of |d| {d_norm:e}"
        );

        for i in 0..n {
            d[i] += d_c[i].re;
            v[i] += v_c[i].re;
            a[i] += a_c[i].re;
        }
        displacements.push(d);
        velocities.push(v);
        accelerations.push(a);
    }

    Ok(Trajectory {
        times: times.to_vec(),
        displacements,
        velocities: Some(velocities),
        accelerations: Some(accelerations),
    })
}

fn transient_coefficients(
    modal: &ModalResult,
    steady: &SteadyState,
    d0: &DVector<f64>,
    v0: &DVector<f64>,
) -> Result<DVector<Complex<f64>>> {
    let n = d0.len();
    let dim = modal.state_dim();
    let mut rhs = DVector::<Complex<f64>>::zeros(dim);
    let d_p0 = steady.displacement_at(n, 0.0);
    let v_p0 = steady.velocity_at(n, 0.0);
    for i in 0..n {
        rhs[i] = Complex::new(d0[i] - d_p0[i], 0.0);
        rhs[n + i] = Complex::new(v0[i] - v_p0[i], 0.0);
    }
    let v = modal.eigenvectors.clone();
    let lu = v.clone().lu();
    let coeffs = lu.solve(&rhs).ok_or(Error::EigenbasisSingular)?;
    let residual = (&v * &coeffs - &rhs).norm();
    if !residual.is_finite() || residual > 1e-8 * rhs.norm().max(1e-300) {
        return Err(Error::EigenbasisSingular);
    }
    Ok(coeffs)
}

/// Steady acceleration sampled at the given times.
pub fn acceleration_series(steady: &SteadyState, dim: usize, times: &[f64]) -> Vec<DVector<f64>> {
    times
        .iter()
        .map(|&t| steady.acceleration_at(dim, t))
        .collect()
}

/// Peak steady acceleration Σᵢ ωᵢ²√(pᵢₖ² + qᵢₖ²) at every translational DOF,
/// converted to g-units and paired with node positions.
pub fn peak_acceleration_field(
    system: &AssembledSystem,
    steady: &SteadyState,
    gravity_constant: f64,
) -> PeakAccelerationField {
    let translational = system.translational_dofs();
    let mut positions = Vec::with_capacity(translational.len());
    let mut peaks_g = Vec::with_capacity(translational.len());
    for (dof, x) in translational {
        let mut peak = 0.0;
        for c in &steady.components {
            let p = c.cos_coeffs[dof];
            let q = c.sin_coeffs[dof];
            peak += c.omega * c.omega * p.hypot(q);
        }
        positions.push(x);
        peaks_g.push(peak / gravity_constant);
    }
    PeakAccelerationField { positions, peaks_g }
}
