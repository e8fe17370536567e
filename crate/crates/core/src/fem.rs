//! Discretization of the touch bar: Hermite beam elements, mesh generation
//! with exact nodes at attachment positions, and assembly of the global
//! M·d̈ + C·ḋ + K·d = f(t) system.
//!
//! Each two-node element carries translation and slope at both nodes
//! (DOF order u₁, θ₁, u₂, θ₂), interpolated by cubic Hermite polynomials.
//! A grounded spring-damper-mass attachment contributes k_b, c, m_b on the
//! diagonal of the translational DOF at its node: the boundary-shear terms
//! reduce to a unit translational selector there because the shape functions
//! interpolate nodal values, and no moments act at attachments.

use nalgebra::{DMatrix, Matrix4};

use crate::error::{Error, Result};
use crate::model::{resolve_damping, ActuatorAttachment, BeamGeometry, Material};

/// Relative tolerance (scaled by beam length) under which an attachment
/// position is considered to already lie on a mesh node.
pub const NODE_MATCH_TOL: f64 = 1e-9;

/// Kind of a nodal degree of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DofKind {
    Translation,
    Rotation,
}

/// One degree of freedom: which node it belongs to and what it measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dof {
    pub node: usize,
    pub kind: DofKind,
}

/// One element between two consecutive nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementSpan {
    pub left_node: usize,
    pub right_node: usize,
    pub length: f64,
}

/// Node layout of the discretized bar.
///
/// Node positions are strictly increasing from 0 to the beam length, and
/// every attachment position coincides exactly with a node.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub node_positions: Vec<f64>,
    pub element_spans: Vec<ElementSpan>,
    /// Node index of each attachment position passed to [`generate_mesh`],
    /// in input order.
    pub attachment_nodes: Vec<usize>,
}

impl Mesh {
    pub fn node_count(&self) -> usize {
        self.node_positions.len()
    }

    pub fn element_count(&self) -> usize {
        self.element_spans.len()
    }

    /// Total degrees of freedom n = 2·(node count).
    pub fn dof_count(&self) -> usize {
        2 * self.node_count()
    }

    pub fn length(&self) -> f64 {
        *self.node_positions.last().expect("mesh has nodes")
    }

    /// Node whose position matches `position` within the mesh tolerance.
    pub fn node_at(&self, position: f64) -> Option<usize> {
        let tol = NODE_MATCH_TOL * self.length();
        self.node_positions
            .iter()
            .position(|&x| (x - position).abs() <= tol)
    }
}

/// Uniform mesh of `element_count` elements, refined by inserting a node at
/// every attachment position that does not already coincide with one.
///
/// Insertion (rather than snapping) preserves the exact actuator positions
/// the placement studies ask for, at the cost of a nonuniform mesh whose
/// element count may exceed the request.
pub fn generate_mesh(
    length: f64,
    element_count: usize,
    attachment_positions: &[f64],
) -> Result<Mesh> {
    if !(length > 0.0) {
        return Err(Error::NonPositiveParameter {
            name: "length",
            value: length,
        });
    }
    if element_count < 2 {
        return Err(Error::ConfigInvalid(format!(
            "element_count must be at least 2, got {element_count}"
        )));
    }
    for &p in attachment_positions {
        if !(0.0..=length).contains(&p) {
            return Err(Error::PositionOutOfRange {
                position: p,
                length,
            });
        }
    }

    let mut nodes: Vec<f64> = (0..=element_count)
        .map(|i| length * (i as f64) / (element_count as f64))
        .collect();
    let tol = NODE_MATCH_TOL * length;
    for &p in attachment_positions {
        if !nodes.iter().any(|&x| (x - p).abs() <= tol) {
            nodes.push(p);
        }
    }
    nodes.sort_by(|a, b| a.partial_cmp(b).expect("finite positions"));

    let element_spans = nodes
        .windows(2)
        .enumerate()
        .map(|(i, w)| ElementSpan {
            left_node: i,
            right_node: i + 1,
            length: w[1] - w[0],
        })
        .collect();

    let mesh = Mesh {
        node_positions: nodes,
        element_spans,
        attachment_nodes: Vec::new(),
    };
    let attachment_nodes = attachment_positions
        .iter()
        .map(|&p| {
            mesh.node_at(p).ok_or(Error::AttachmentNodeMissing {
                position: p,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(Mesh {
        attachment_nodes,
        ..mesh
    })
}

/// Stiffness and consistent mass of one Hermite beam element.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementMatrices {
    pub stiffness: Matrix4<f64>,
    pub mass: Matrix4<f64>,
}

/// Element matrices from closed-form integration of the Hermite cubics.
///
/// K^e = (EI/l³)·[[12, 6l, −12, 6l], [6l, 4l², −6l, 2l²], …] and
/// M^e = (ρAl/420)·[[156, 22l, 54, −13l], …] in DOF order (u₁, θ₁, u₂, θ₂).
pub fn element_matrices(
    elastic_modulus: f64,
    second_moment: f64,
    density: f64,
    area: f64,
    length: f64,
) -> Result<ElementMatrices> {
    for (name, value) in [
        ("elastic_modulus", elastic_modulus),
        ("second_moment", second_moment),
        ("density", density),
        ("area", area),
        ("element_length", length),
    ] {
        if !(value > 0.0) {
            return Err(Error::NonPositiveParameter { name, value });
        }
    }
    let l = length;
    let kc = elastic_modulus * second_moment / (l * l * l);
    #[rustfmt::skip]
    let stiffness = Matrix4::new(
        12.0 * kc,      6.0 * l * kc,      -12.0 * kc,      6.0 * l * kc,
        6.0 * l * kc,   4.0 * l * l * kc,  -6.0 * l * kc,   2.0 * l * l * kc,
        -12.0 * kc,     -6.0 * l * kc,     12.0 * kc,       -6.0 * l * kc,
        6.0 * l * kc,   2.0 * l * l * kc,  -6.0 * l * kc,   4.0 * l * l * kc,
    );
    let mc = density * area * l / 420.0;
    #[rustfmt::skip]
    let mass = Matrix4::new(
        156.0 * mc,     22.0 * l * mc,     54.0 * mc,       -13.0 * l * mc,
        22.0 * l * mc,  4.0 * l * l * mc,  13.0 * l * mc,   -3.0 * l * l * mc,
        54.0 * mc,      13.0 * l * mc,     156.0 * mc,      -22.0 * l * mc,
        -13.0 * l * mc, -3.0 * l * l * mc, -22.0 * l * mc,  4.0 * l * l * mc,
    );
    Ok(ElementMatrices { stiffness, mass })
}

/// Hermite shape functions evaluated at local coordinate `x ∈ [0, l]`,
/// in DOF order (u₁, θ₁, u₂, θ₂). Used to build consistent nodal loads.
pub fn shape_functions(x: f64, l: f64) -> [f64; 4] {
    let xi = x / l;
    [
        1.0 - 3.0 * xi * xi + 2.0 * xi * xi * xi,
        l * (xi - 2.0 * xi * xi + xi * xi * xi),
        3.0 * xi * xi - 2.0 * xi * xi * xi,
        l * (xi * xi * xi - xi * xi),
    ]
}

/// Assembled global system with its DOF bookkeeping.
///
/// Matrices are dense; the bar never exceeds a few hundred DOFs and dense
/// factorizations keep the solvers simple. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct AssembledSystem {
    pub mass: DMatrix<f64>,
    pub damping: DMatrix<f64>,
    pub stiffness: DMatrix<f64>,
    pub mesh: Mesh,
    /// Row/column index → (node, kind). After pinned-node elimination this
    /// is shorter than 2·(node count).
    pub dof_map: Vec<Dof>,
}

impl AssembledSystem {
    /// Current system dimension (rows of M, C, K).
    pub fn dim(&self) -> usize {
        self.dof_map.len()
    }

    /// Index of the translational DOF at `node`, if it has not been
    /// eliminated by a support.
    pub fn translational_dof(&self, node: usize) -> Option<usize> {
        self.dof_map
            .iter()
            .position(|d| d.node == node && d.kind == DofKind::Translation)
    }

    /// `(dof index, node position)` for every remaining translational DOF,
    /// ascending in position.
    pub fn translational_dofs(&self) -> Vec<(usize, f64)> {
        self.dof_map
            .iter()
            .enumerate()
            .filter(|(_, d)| d.kind == DofKind::Translation)
            .map(|(i, d)| (i, self.mesh.node_positions[d.node]))
            .collect()
    }
}

/// Scatter-add of element matrices over shared DOFs, then lumped diagonal
/// contributions k_b, c, m_b at each attachment's translational DOF.
pub fn assemble(
    mesh: &Mesh,
    material: &Material,
    geometry: &BeamGeometry,
    attachments: &[ActuatorAttachment],
) -> Result<AssembledSystem> {
    let n = mesh.dof_count();
    let (area, second_moment) = (geometry.area(), geometry.second_moment());
    let mut stiffness = DMatrix::zeros(n, n);
    let mut mass = DMatrix::zeros(n, n);
    let mut damping = DMatrix::zeros(n, n);

    for span in &mesh.element_spans {
        let em = element_matrices(
            material.elastic_modulus,
            second_moment,
            material.density,
            area,
            span.length,
        )?;
        let dofs = [
            2 * span.left_node,
            2 * span.left_node + 1,
            2 * span.right_node,
            2 * span.right_node + 1,
        ];
        for (a, &ga) in dofs.iter().enumerate() {
            for (b, &gb) in dofs.iter().enumerate() {
                stiffness[(ga, gb)] += em.stiffness[(a, b)];
                mass[(ga, gb)] += em.mass[(a, b)];
            }
        }
    }

    for att in attachments {
        let node = mesh
            .node_at(att.position)
            .ok_or(Error::AttachmentNodeMissing {
                position: att.position,
            })?;
        let dof = 2 * node;
        stiffness[(dof, dof)] += att.stiffness;
        damping[(dof, dof)] += resolve_damping(att)?;
        mass[(dof, dof)] += att.bolt_mass;
    }

    let dof_map = (0..mesh.node_count())
        .flat_map(|node| {
            [
                Dof {
                    node,
                    kind: DofKind::Translation,
                },
                Dof {
                    node,
                    kind: DofKind::Rotation,
                },
            ]
        })
        .collect();

    Ok(AssembledSystem {
        mass,
        damping,
        stiffness,
        mesh: mesh.clone(),
        dof_map,
    })
}

/// Simply supported nodes: eliminates the translational DOF rows/columns of
/// the listed nodes. Rotations at pinned nodes stay free.
pub fn constrain_pinned(system: &AssembledSystem, node_indices: &[usize]) -> Result<AssembledSystem> {
    let count = system.mesh.node_count();
    for &node in node_indices {
        if node >= count {
            return Err(Error::NodeOutOfRange { node, count });
        }
    }
    let keep: Vec<usize> = system
        .dof_map
        .iter()
        .enumerate()
        .filter(|(_, d)| {
            !(d.kind == DofKind::Translation && node_indices.contains(&d.node))
        })
        .map(|(i, _)| i)
        .collect();

    let select = |m: &DMatrix<f64>| -> DMatrix<f64> {
        DMatrix::from_fn(keep.len(), keep.len(), |r, c| m[(keep[r], keep[c])])
    };

    Ok(AssembledSystem {
        mass: select(&system.mass),
        damping: select(&system.damping),
        stiffness: select(&system.stiffness),
        mesh: system.mesh.clone(),
        dof_map: keep.iter().map(|&i| system.dof_map[i]).collect(),
    })
}
