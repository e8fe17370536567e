//! Physical domain records shared by every solver: touch-bar material and
//! geometry, actuator attachments, excitation commands, and the study
//! configuration that ties them together.
//!
//! All values are SI internally. Types validate their invariants on
//! construction and are immutable afterwards, so they can be shared freely
//! across concurrent sweep workers.

pub mod units;

use crate::error::{Error, Result};

/// Standard gravity used to report accelerations in g-units.
pub const STANDARD_GRAVITY: f64 = 9.80665;

/// Homogeneous touch-bar material.
#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    pub name: String,
    /// Elastic modulus E in Pa.
    pub elastic_modulus: f64,
    /// Density ρ in kg/m³.
    pub density: f64,
}

impl Material {
    pub fn new(name: impl Into<String>, elastic_modulus: f64, density: f64) -> Result<Self> {
        if !(elastic_modulus > 0.0) {
            return Err(Error::NonPositiveParameter {
                name: "elastic_modulus",
                value: elastic_modulus,
            });
        }
        if !(density > 0.0) {
            return Err(Error::NonPositiveParameter {
                name: "density",
                value: density,
            });
        }
        Ok(Self {
            name: name.into(),
            elastic_modulus,
            density,
        })
    }
}

/// Catalog of touch-bar materials considered in the device literature.
///
/// Lookup is case-insensitive; "dragontrail" and "dragontrail glass" are the
/// same entry.
pub fn material_catalog(name: &str) -> Result<Material> {
    let (canonical, e, rho) = match name.trim().to_ascii_lowercase().as_str() {
        "aluminum" | "aluminium" => ("aluminum", 70e9, 2700.0),
        "dragontrail" | "dragontrail glass" => ("dragontrail glass", 74e9, 2480.0),
        "copper" => ("copper", 130e9, 8960.0),
        other => return Err(Error::UnknownMaterial(other.to_string())),
    };
    Material::new(canonical, e, rho)
}

/// Prismatic rectangular cross-section beam geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamGeometry {
    /// Length L in m.
    pub length: f64,
    /// Width b in m.
    pub width: f64,
    /// Thickness h in m.
    pub thickness: f64,
}

impl BeamGeometry {
    /// Validates positivity. Thin-beam theory degrades for stubby sections,
    /// so h/L > 0.05 logs a warning but is not rejected.
    pub fn new(length: f64, width: f64, thickness: f64) -> Result<Self> {
        for (name, value) in [
            ("length", length),
            ("width", width),
            ("thickness", thickness),
        ] {
            if !(value > 0.0) {
                return Err(Error::NonPositiveParameter { name, value });
            }
        }
        if thickness / length > 0.05 {
            log::warn!(
                "thickness/length = {:.4} exceeds 0.05; thin-beam kinematics may be inaccurate",
                thickness / length
            );
        }
        Ok(Self {
            length,
            width,
            thickness,
        })
    }

    /// Cross-sectional area A = b·h in m².
    pub fn area(&self) -> f64 {
        self.width * self.thickness
    }

    /// Second moment of area I = b·h³/12 in m⁴.
    pub fn second_moment(&self) -> f64 {
        self.width * self.thickness.powi(3) / 12.0
    }
}

/// Area and second moment of a validated geometry.
pub fn derived_section(geometry: &BeamGeometry) -> (f64, f64) {
    (geometry.area(), geometry.second_moment())
}

/// Attachment damping given either as a ratio ζ or a coefficient c in N·s/m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DampingSpec {
    Ratio(f64),
    Coefficient(f64),
}

/// One actuator bolt point: a grounded spring-damper-mass attached to the bar
/// that transmits the actuator's sinusoidal base displacement.
#[derive(Debug, Clone, PartialEq)]
pub struct ActuatorAttachment {
    /// Position along the beam axis in m.
    pub position: f64,
    /// Spring stiffness k_b in N/m.
    pub stiffness: f64,
    /// Bolt mass m_b in kg, lumped at the attachment node.
    pub bolt_mass: f64,
    pub damping: DampingSpec,
    /// Peak base displacement a in m (half the peak-to-peak stroke).
    pub base_amplitude: f64,
}

impl ActuatorAttachment {
    pub fn new(
        position: f64,
        stiffness: f64,
        bolt_mass: f64,
        damping: DampingSpec,
        base_amplitude: f64,
    ) -> Result<Self> {
        if !(position >= 0.0) || !position.is_finite() {
            return Err(Error::PositionOutOfRange {
                position,
                length: f64::INFINITY,
            });
        }
        for (name, value) in [
            ("stiffness", stiffness),
            ("bolt_mass", bolt_mass),
            ("base_amplitude", base_amplitude),
        ] {
            if !(value >= 0.0) {
                return Err(Error::NonPositiveParameter { name, value });
            }
        }
        match damping {
            DampingSpec::Ratio(z) if z < 0.0 => {
                return Err(Error::NonPositiveParameter {
                    name: "damping_ratio",
                    value: z,
                })
            }
            DampingSpec::Ratio(z) if z > 0.0 && bolt_mass == 0.0 => {
                return Err(Error::MissingMass)
            }
            DampingSpec::Coefficient(c) if c < 0.0 => {
                return Err(Error::NonPositiveParameter {
                    name: "damping_coefficient",
                    value: c,
                })
            }
            _ => {}
        }
        Ok(Self {
            position,
            stiffness,
            bolt_mass,
            damping,
            base_amplitude,
        })
    }

    /// Copy of this attachment with a different spring stiffness, used by the
    /// stiffness-axis sweeps.
    pub fn with_stiffness(&self, stiffness: f64) -> Result<Self> {
        Self::new(
            self.position,
            stiffness,
            self.bolt_mass,
            self.damping,
            self.base_amplitude,
        )
    }

    /// Copy of this attachment relocated to a different position.
    pub fn at_position(&self, position: f64) -> Result<Self> {
        Self::new(
            position,
            self.stiffness,
            self.bolt_mass,
            self.damping,
            self.base_amplitude,
        )
    }
}

/// Damping coefficient in N·s/m for an attachment.
///
/// A ratio ζ is converted with the single-degree-of-freedom resonator
/// convention c = 2ζ√(k_b·m_b); this requires a nonzero bolt mass.
pub fn resolve_damping(attachment: &ActuatorAttachment) -> Result<f64> {
    match attachment.damping {
        DampingSpec::Coefficient(c) => Ok(c),
        DampingSpec::Ratio(z) => {
            if z == 0.0 {
                Ok(0.0)
            } else if attachment.bolt_mass > 0.0 {
                Ok(2.0 * z * (attachment.stiffness * attachment.bolt_mass).sqrt())
            } else {
                Err(Error::MissingMass)
            }
        }
    }
}

/// One harmonic excitation applied to the bar.
#[derive(Debug, Clone, PartialEq)]
pub enum ExcitationCommand {
    /// Point force F·sin(ωt) at a position, used for validation scenarios.
    DirectForce {
        position: f64,
        frequency_hz: f64,
        force_amplitude: f64,
    },
    /// Sinusoidal base displacement of the referenced attachment.
    ActuatorBase {
        attachment: usize,
        frequency_hz: f64,
    },
}

impl ExcitationCommand {
    pub fn frequency_hz(&self) -> f64 {
        match self {
            ExcitationCommand::DirectForce { frequency_hz, .. } => *frequency_hz,
            ExcitationCommand::ActuatorBase { frequency_hz, .. } => *frequency_hz,
        }
    }
}

/// A complete scenario: bar, attachments, excitations, and mesh resolution.
#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub material: Material,
    pub geometry: BeamGeometry,
    pub attachments: Vec<ActuatorAttachment>,
    pub excitations: Vec<ExcitationCommand>,
    /// Requested uniform element count; node insertion may raise the actual
    /// element count.
    pub element_count: usize,
    /// Constant used to express accelerations in g-units.
    pub gravity_constant: f64,
}

impl StudyConfig {
    pub fn new(
        material: Material,
        geometry: BeamGeometry,
        attachments: Vec<ActuatorAttachment>,
        excitations: Vec<ExcitationCommand>,
        element_count: usize,
        gravity_constant: f64,
    ) -> Result<Self> {
        if element_count < 2 {
            return Err(Error::ConfigInvalid(format!(
                "element_count must be at least 2, got {element_count}"
            )));
        }
        if !(gravity_constant > 0.0) {
            return Err(Error::NonPositiveParameter {
                name: "gravity_constant",
                value: gravity_constant,
            });
        }
        let length = geometry.length;
        for att in &attachments {
            if att.position < 0.0 || att.position > length {
                return Err(Error::PositionOutOfRange {
                    position: att.position,
                    length,
                });
            }
        }
        for exc in &excitations {
            if !(exc.frequency_hz() > 0.0) {
                return Err(Error::NonPositiveParameter {
                    name: "frequency_hz",
                    value: exc.frequency_hz(),
                });
            }
            match *exc {
                ExcitationCommand::DirectForce {
                    position,
                    force_amplitude,
                    ..
                } => {
                    if position < 0.0 || position > length {
                        return Err(Error::PositionOutOfRange { position, length });
                    }
                    if !(force_amplitude >= 0.0) {
                        return Err(Error::NonPositiveParameter {
                            name: "force_amplitude",
                            value: force_amplitude,
                        });
                    }
                }
                ExcitationCommand::ActuatorBase { attachment, .. } => {
                    if attachment >= attachments.len() {
                        return Err(Error::ConfigInvalid(format!(
                            "excitation references attachment {attachment} but only {} exist",
                            attachments.len()
                        )));
                    }
                }
            }
        }
        Ok(Self {
            material,
            geometry,
            attachments,
            excitations,
            element_count,
            gravity_constant,
        })
    }

    pub fn attachment_positions(&self) -> Vec<f64> {
        self.attachments.iter().map(|a| a.position).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn catalog_matches_reference_table() {
        let al = material_catalog("aluminum").unwrap();
        assert_eq!(al.elastic_modulus, 70e9);
        assert_eq!(al.density, 2700.0);

        let dt = material_catalog("DragonTrail").unwrap();
        assert_eq!(dt.elastic_modulus, 74e9);
        assert_eq!(dt.density, 2480.0);

        let cu = material_catalog("COPPER").unwrap();
        assert_eq!(cu.elastic_modulus, 130e9);
        assert_eq!(cu.density, 8960.0);
    }

    #[test]
    fn catalog_rejects_unknown() {
        assert!(matches!(
            material_catalog("unobtanium"),
            Err(Error::UnknownMaterial(_))
        ));
    }

    #[test]
    fn derived_section_formulas() {
        let g = BeamGeometry::new(1.0, 0.024, 0.001).unwrap();
        assert_eq!(g.area(), 2.4e-5);
        assert_relative_eq!(g.second_moment(), 2.0e-12, max_relative = 1e-15);

        let unit = BeamGeometry::new(10.0, 1.0, 1.0).unwrap();
        assert_eq!(unit.area(), 1.0);
        assert_relative_eq!(unit.second_moment(), 1.0 / 12.0, max_relative = 1e-15);
    }

    #[test]
    fn derived_section_from_inch_dimensions() {
        // 0.984 in × 0.03937 in; the bar cross-section from the validation table
        let b = units::parse_quantity("0.984 in", units::Dimension::Length).unwrap();
        let h = units::parse_quantity("0.03937 in", units::Dimension::Length).unwrap();
        let g = BeamGeometry::new(0.3048, b, h).unwrap();
        let (a, i) = derived_section(&g);
        assert_relative_eq!(a, 2.4993e-5, max_relative = 1e-4);
        assert_relative_eq!(i, 2.0827e-12, max_relative = 1e-4);
    }

    #[test]
    fn derived_section_scale_consistency() {
        let g = BeamGeometry::new(1.0, 0.02, 0.003).unwrap();
        let s = 3.7;
        let gs = BeamGeometry::new(1.0, 0.02, 0.003 * s).unwrap();
        assert_relative_eq!(gs.area(), g.area() * s, max_relative = 1e-12);
        assert_relative_eq!(
            gs.second_moment(),
            g.second_moment() * s.powi(3),
            max_relative = 1e-12
        );
    }

    #[test]
    fn geometry_rejects_nonpositive() {
        assert!(BeamGeometry::new(0.0, 0.1, 0.1).is_err());
        assert!(BeamGeometry::new(1.0, -0.1, 0.1).is_err());
        assert!(BeamGeometry::new(1.0, 0.1, 0.0).is_err());
    }

    #[test]
    fn resolve_damping_passthrough_and_zero() {
        let att = ActuatorAttachment::new(0.0, 100.0, 0.0, DampingSpec::Coefficient(0.5), 0.0)
            .unwrap();
        assert_eq!(resolve_damping(&att).unwrap(), 0.5);

        let att =
            ActuatorAttachment::new(0.0, 100.0, 0.0, DampingSpec::Ratio(0.0), 0.0).unwrap();
        assert_eq!(resolve_damping(&att).unwrap(), 0.0);
    }

    #[test]
    fn resolve_damping_ratio_conversion() {
        // ζ = 0.02, k_b = 16180 N/m, m_b = 5 g: c = 2ζ√(k_b·m_b)
        let att = ActuatorAttachment::new(
            0.0,
            16180.0,
            0.005,
            DampingSpec::Ratio(0.02),
            4.125e-5,
        )
        .unwrap();
        let c = resolve_damping(&att).unwrap();
        assert_relative_eq!(c, 2.0 * 0.02 * (16180.0f64 * 0.005).sqrt(), epsilon = 0.0);
        assert_relative_eq!(c, 0.35977, max_relative = 1e-4);
    }

    #[test]
    fn resolve_damping_requires_mass_for_ratio() {
        assert!(matches!(
            ActuatorAttachment::new(0.0, 100.0, 0.0, DampingSpec::Ratio(0.02), 0.0),
            Err(Error::MissingMass)
        ));
    }

    #[test]
    fn resolve_damping_monotone() {
        let c = |z: f64, k: f64, m: f64| {
            resolve_damping(
                &ActuatorAttachment::new(0.0, k, m, DampingSpec::Ratio(z), 0.0).unwrap(),
            )
            .unwrap()
        };
        let base = c(0.02, 16180.0, 0.005);
        assert!(c(0.03, 16180.0, 0.005) >= base);
        assert!(c(0.02, 20000.0, 0.005) >= base);
        assert!(c(0.02, 16180.0, 0.010) >= base);
    }

    #[test]
    fn study_config_validation() {
        let material = material_catalog("aluminum").unwrap();
        let geometry = BeamGeometry::new(0.3048, 0.025, 0.001).unwrap();
        let att = ActuatorAttachment::new(
            0.1,
            16180.0,
            0.005,
            DampingSpec::Ratio(0.02),
            4.125e-5,
        )
        .unwrap();

        // excitation referencing a missing attachment
        let bad = StudyConfig::new(
            material.clone(),
            geometry,
            vec![att.clone()],
            vec![ExcitationCommand::ActuatorBase {
                attachment: 1,
                frequency_hz: 205.0,
            }],
            30,
            STANDARD_GRAVITY,
        );
        assert!(bad.is_err());

        // element count too small
        let bad = StudyConfig::new(
            material.clone(),
            geometry,
            vec![],
            vec![],
            1,
            STANDARD_GRAVITY,
        );
        assert!(bad.is_err());

        // attachment outside the beam
        let far = ActuatorAttachment::new(1.0, 1.0, 0.0, DampingSpec::Coefficient(0.0), 0.0)
            .unwrap();
        let bad = StudyConfig::new(
            material.clone(),
            geometry,
            vec![far],
            vec![],
            30,
            STANDARD_GRAVITY,
        );
        assert!(matches!(bad, Err(Error::PositionOutOfRange { .. })));

        let ok = StudyConfig::new(
            material,
            geometry,
            vec![att],
            vec![ExcitationCommand::ActuatorBase {
                attachment: 0,
                frequency_hz: 205.0,
            }],
            30,
            STANDARD_GRAVITY,
        );
        assert!(ok.is_ok());
    }
}
