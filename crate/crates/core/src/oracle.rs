//! Direct time integration used to cross-validate the analytical response.
//!
//! Constant-average-acceleration Newmark (β = 1/4, γ = 1/2): implicit,
//! unconditionally stable, second-order accurate. Deliberately a different
//! algorithm family from the modal/harmonic path so the two routes are
//! independent checks of each other.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::fem::AssembledSystem;
use crate::response::Trajectory;

const BETA: f64 = 0.25;
const GAMMA: f64 = 0.5;

/// Integrate M·d̈ + C·ḋ + K·d = f(t) from (d₀, v₀) with fixed step `dt`
/// over `duration` seconds. `forcing(t)` returns the load vector.
///
/// The step must resolve the forcing: dt ≤ 1/(20·f_max) is the intended
/// operating range for harmonic loads.
pub fn newmark_integrate(
    system: &AssembledSystem,
    forcing: impl Fn(f64) -> DVector<f64>,
    d0: &DVector<f64>,
    v0: &DVector<f64>,
    dt: f64,
    duration: f64,
) -> Result<Trajectory> {
    if !(dt > 0.0) {
        return Err(Error::NonPositiveParameter {
            name: "dt",
            value: dt,
        });
    }
    if !(duration >= 0.0) {
        return Err(Error::NonPositiveParameter {
            name: "duration",
            value: duration,
        });
    }
    let n = system.dim();
    assert_eq!(d0.len(), n, "initial displacement sized to system");
    assert_eq!(v0.len(), n, "initial velocity sized to system");

    let steps = (duration / dt).round() as usize;

    // a₀ from the equation of motion at t = 0
    let m_chol =
        nalgebra::Cholesky::new(system.mass.clone()).ok_or(Error::FactorizationFailure)?;
    let mut accel =
        m_chol.solve(&(forcing(0.0) - &system.damping * v0 - &system.stiffness * d0));

    // effective stiffness K* = K + γ/(βΔt)·C + 1/(βΔt²)·M, factorized once
    let c0 = 1.0 / (BETA * dt * dt);
    let c1 = GAMMA / (BETA * dt);
    let k_eff = &system.stiffness + &system.damping * c1 + &system.mass * c0;
    let k_lu = k_eff.lu();
    if !k_lu.is_invertible() {
        return Err(Error::FactorizationFailure);
    }

    let mut disp = d0.clone();
    let mut vel = v0.clone();
    let mut times = Vec::with_capacity(steps + 1);
    let mut displacements = Vec::with_capacity(steps + 1);
    let mut velocities = Vec::with_capacity(steps + 1);
    let mut accelerations = Vec::with_capacity(steps + 1);
    times.push(0.0);
    displacements.push(disp.clone());
    velocities.push(vel.clone());
    accelerations.push(accel.clone());

    for step in 1..=steps {
        let t = (step as f64) * dt;
        let rhs = forcing(t)
            + &system.mass * (&disp * c0 + &vel * (1.0 / (BETA * dt)) + &accel * (0.5 / BETA - 1.0))
            + &system.damping
                * (&disp * c1 + &vel * (GAMMA / BETA - 1.0)
                    + &accel * (dt * (0.5 * GAMMA / BETA - 1.0)));
        let disp_next = k_lu.solve(&rhs).ok_or(Error::FactorizationFailure)?;
        let accel_next =
            (&disp_next - &disp) * c0 - &vel * (1.0 / (BETA * dt)) - &accel * (0.5 / BETA - 1.0);
        let vel_next = &vel + (&accel * (1.0 - GAMMA) + &accel_next * GAMMA) * dt;

        disp = disp_next;
        vel = vel_next;
        accel = accel_next;
        times.push(t);
        displacements.push(disp.clone());
        velocities.push(vel.clone());
        accelerations.push(accel.clone());
    }

    Ok(Trajectory {
        times,
        displacements,
        velocities: Some(velocities),
        accelerations: Some(accelerations),
    })
}

/// Maximum and RMS pointwise deviation between two trajectories over
/// t ≥ `settle_time`, both normalized by the largest |a| in that window.
pub fn compare_trajectories(
    a: &Trajectory,
    b: &Trajectory,
    settle_time: f64,
) -> Result<(f64, f64)> {
    if a.times.len() != b.times.len()
        || a.times
            .iter()
            .zip(&b.times)
            .any(|(ta, tb)| (ta - tb).abs() > 1e-12 * ta.abs().max(1.0))
    {
        return Err(Error::GridMismatch);
    }
    let mut reference: f64 = 0.0;
    let mut max_abs: f64 = 0.0;
    let mut sum_sq = 0.0;
    let mut count = 0usize;
    for (i, &t) in a.times.iter().enumerate() {
        if t < settle_time {
            continue;
        }
        if a.displacements[i].len() != b.displacements[i].len() {
            return Err(Error::GridMismatch);
        }
        for (x, y) in a.displacements[i].iter().zip(b.displacements[i].iter()) {
            reference = reference.max(x.abs());
            let d = (x - y).abs();
            max_abs = max_abs.max(d);
            sum_sq += d * d;
            count += 1;
        }
    }
    if count == 0 || reference == 0.0 {
        return Ok((0.0, 0.0));
    }
    Ok((
        max_abs / reference,
        (sum_sq / count as f64).sqrt() / reference,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{Dof, DofKind, Mesh};
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

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

    #[test]
    fn harmonic_oscillator_returns_after_one_period() {
        // m=1, k=(2π)²: period is exactly 1 s
        let sys = sdof(1.0, 0.0, (2.0 * std::f64::consts::PI).powi(2));
        let d0 = DVector::from_element(1, 1.0);
        let v0 = DVector::zeros(1);
        let traj =
            newmark_integrate(&sys, |_| DVector::zeros(1), &d0, &v0, 1e-4, 1.0).unwrap();
        let last = traj.displacements.last().unwrap();
        assert_relative_eq!(last[0], 1.0, epsilon = 1e-4);
    }

    #[test]
    fn zero_everything_stays_zero() {
        let sys = sdof(2.0, 0.3, 5.0);
        let traj = newmark_integrate(
            &sys,
            |_| DVector::zeros(1),
            &DVector::zeros(1),
            &DVector::zeros(1),
            1e-3,
            0.2,
        )
        .unwrap();
        for d in &traj.displacements {
            assert_eq!(d[0], 0.0);
        }
    }

    #[test]
    fn damped_sdof_matches_closed_form_and_converges_second_order() {
        // d̈ + 2ζω·ḋ + ω²·d = 0 with d(0)=1, v(0)=0
        let (omega, zeta) = (8.0, 0.1);
        let sys = sdof(1.0, 2.0 * zeta * omega, omega * omega);
        let omega_d = omega * (1.0 - zeta * zeta).sqrt();
        let exact = |t: f64| {
            (-zeta * omega * t).exp()
                * ((omega_d * t).cos() + zeta * omega / omega_d * (omega_d * t).sin())
        };
        let d0 = DVector::from_element(1, 1.0);
        let v0 = DVector::zeros(1);
        let t_end = 2.0;

        let mut errors = Vec::new();
        for &dt in &[1e-3, 5e-4, 2.5e-4] {
            let traj =
                newmark_integrate(&sys, |_| DVector::zeros(1), &d0, &v0, dt, t_end).unwrap();
            let end = traj.displacements.last().unwrap()[0];
            errors.push((end - exact(t_end)).abs());
        }
        let order1 = (errors[0] / errors[1]).log2();
        let order2 = (errors[1] / errors[2]).log2();
        assert!(
            order1 >= 1.9 && order2 >= 1.9,
            "observed orders {order1:.2}, {order2:.2}"
        );
    }

    #[test]
    fn energy_conserved_without_damping() {
        use crate::fem::{assemble, generate_mesh};
        use crate::model::{material_catalog, ActuatorAttachment, BeamGeometry, DampingSpec};

        let material = material_catalog("aluminum").unwrap();
        let geometry = BeamGeometry::new(0.3048, 0.0249936, 0.00099998).unwrap();
        let att = [
            ActuatorAttachment::new(0.0, 16180.0, 0.005, DampingSpec::Coefficient(0.0), 0.0)
                .unwrap(),
            ActuatorAttachment::new(0.3048, 16180.0, 0.005, DampingSpec::Coefficient(0.0), 0.0)
                .unwrap(),
        ];
        let mesh = generate_mesh(geometry.length, 8, &[0.0, geometry.length]).unwrap();
        let sys = assemble(&mesh, &material, &geometry, &att).unwrap();
        let n = sys.dim();

        let fundamental = crate::modal::undamped_frequencies_hz(&sys).unwrap()[0];
        let period = 1.0 / fundamental;
        let dt = period / 2000.0;

        let d0 = DVector::from_fn(n, |i, _| if i % 2 == 0 { 1e-4 } else { 0.0 });
        let v0 = DVector::zeros(n);
        let traj =
            newmark_integrate(&sys, |_| DVector::zeros(n), &d0, &v0, dt, 10.0 * period).unwrap();

        let energy = |d: &DVector<f64>, v: &DVector<f64>| {
            0.5 * (v.dot(&(&sys.mass * v)) + d.dot(&(&sys.stiffness * d)))
        };
        let vels = traj.velocities.as_ref().unwrap();
        let e0 = energy(&traj.displacements[0], &vels[0]);
        for (d, v) in traj.displacements.iter().zip(vels) {
            let e = energy(d, v);
            assert!(
                (e - e0).abs() <= 1e-3 * e0,
                "energy drift {:.3e} beyond 0.1%",
                (e - e0) / e0
            );
        }
    }

    #[test]
    fn compare_identical_and_scaled() {
        let sys = sdof(1.0, 0.1, 4.0);
        let d0 = DVector::from_element(1, 1.0);
        let v0 = DVector::zeros(1);
        let a = newmark_integrate(&sys, |_| DVector::zeros(1), &d0, &v0, 1e-3, 1.0).unwrap();
        assert_eq!(compare_trajectories(&a, &a, 0.0).unwrap(), (0.0, 0.0));

        let mut b = a.clone();
        for d in &mut b.displacements {
            *d *= 1.01;
        }
        let (max_rel, rms_rel) = compare_trajectories(&a, &b, 0.0).unwrap();
        assert_relative_eq!(max_rel, 0.01, max_relative = 1e-9);
        assert!(rms_rel <= max_rel);
    }

    #[test]
    fn compare_rejects_mismatched_grids() {
        let sys = sdof(1.0, 0.1, 4.0);
        let d0 = DVector::from_element(1, 1.0);
        let v0 = DVector::zeros(1);
        let a = newmark_integrate(&sys, |_| DVector::zeros(1), &d0, &v0, 1e-3, 0.5).unwrap();
        let b = newmark_integrate(&sys, |_| DVector::zeros(1), &d0, &v0, 2e-3, 0.5).unwrap();
        assert!(matches!(
            compare_trajectories(&a, &b, 0.0),
            Err(Error::GridMismatch)
        ));
    }

    #[test]
    fn analytical_vs_newmark_damped_sdof() {
        use crate::response::{complete_response, HarmonicExcitation};

        let sys = sdof(1.0, 0.5, 400.0);
        let omega = 15.0;
        let exc = HarmonicExcitation {
            omega,
            sin_amplitudes: DVector::from_element(1, 2.0),
            cos_amplitudes: DVector::zeros(1),
        };
        let d0 = DVector::from_element(1, 1e-3);
        let v0 = DVector::from_element(1, 0.02);
        let dt = 1e-5;
        let duration = 2.0;
        let numeric = newmark_integrate(
            &sys,
            |t| DVector::from_element(1, 2.0 * (omega * t).sin()),
            &d0,
            &v0,
            dt,
            duration,
        )
        .unwrap();
        let analytic =
            complete_response(&sys, &[exc], &d0, &v0, &numeric.times).unwrap();
        let (max_rel, _) = compare_trajectories(&analytic, &numeric, 0.0).unwrap();
        assert!(max_rel <= 1e-3, "max relative deviation {max_rel:e}");
    }
}
