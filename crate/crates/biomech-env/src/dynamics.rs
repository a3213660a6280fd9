//! Planar articulated dynamics in generalized coordinates.
//!
//! Coordinates `q[0..9]`: pelvis x, pelvis y, torso absolute rotation, then
//! relative joint angles left hip/knee/ankle, right hip/knee/ankle. Each
//! body's center of mass is written as `p + Σ R(φ_t)·d_t` over a short chain
//! of constant local offsets `d_t`, where each `φ_t` is a sum of angle
//! coordinates. Because the angular rows are constant in `q`, the equations
//! of motion reduce to
//!
//!   M(q)·q̈ = Q − Σ m·Jᵀ·a_vp,   M = Σ m·JᵀJ + I·SᵀS,
//!
//! with `a_vp = Σ −φ̇²·R(φ)·d` the velocity-product acceleration. Generalized
//! forces Q collect gravity, joint torques (relative coordinates map them
//! one-to-one) and contact forces through point Jacobians.

use nalgebra::{SMatrix, SVector};

use crate::config::BodyParams;

pub const N_DOF: usize = 9;
pub const PELVIS_X: usize = 0;
pub const PELVIS_Y: usize = 1;
pub const TORSO_ROT: usize = 2;

pub type Vec9 = SVector<f64, 9>;
pub type Mat9 = SMatrix<f64, 9, 9>;

/// One rigid offset rotated by the sum of the listed angle coordinates.
#[derive(Debug, Clone)]
struct ChainTerm {
    dofs: Vec<usize>,
    local: [f64; 2],
}

/// A material point attached to the linkage through a chain of offsets.
#[derive(Debug, Clone)]
pub struct PointChain {
    terms: Vec<ChainTerm>,
}

impl PointChain {
    fn new(terms: Vec<(Vec<usize>, [f64; 2])>) -> Self {
        Self {
            terms: terms
                .into_iter()
                .map(|(dofs, local)| ChainTerm { dofs, local })
                .collect(),
        }
    }

    fn rotated(term: &ChainTerm, q: &[f64; N_DOF]) -> [f64; 2] {
        let phi: f64 = term.dofs.iter().map(|&d| q[d]).sum();
        let (s, c) = phi.sin_cos();
        [
            c * term.local[0] - s * term.local[1],
            s * term.local[0] + c * term.local[1],
        ]
    }

    pub fn position(&self, q: &[f64; N_DOF]) -> [f64; 2] {
        let mut p = [q[PELVIS_X], q[PELVIS_Y]];
        for term in &self.terms {
            let r = Self::rotated(term, q);
            p[0] += r[0];
            p[1] += r[1];
        }
        p
    }

    /// 2×9 Jacobian ∂p/∂q, written row-major into `jac`.
    pub fn jacobian(&self, q: &[f64; N_DOF], jac: &mut [[f64; N_DOF]; 2]) {
        *jac = [[0.0; N_DOF]; 2];
        jac[0][PELVIS_X] = 1.0;
        jac[1][PELVIS_Y] = 1.0;
        for term in &self.terms {
            let r = Self::rotated(term, q);
            // ∂(R(φ)d)/∂φ = perp(R(φ)d)
            for &d in &term.dofs {
                jac[0][d] += -r[1];
                jac[1][d] += r[0];
            }
        }
    }

    pub fn velocity(&self, q: &[f64; N_DOF], qd: &[f64; N_DOF]) -> [f64; 2] {
        let mut v = [qd[PELVIS_X], qd[PELVIS_Y]];
        for term in &self.terms {
            let r = Self::rotated(term, q);
            let phid: f64 = term.dofs.iter().map(|&d| qd[d]).sum();
            v[0] += -r[1] * phid;
            v[1] += r[0] * phid;
        }
        v
    }

    /// Acceleration of the point with q̈ = 0 (the velocity-product part).
    fn vp_accel(&self, q: &[f64; N_DOF], qd: &[f64; N_DOF]) -> [f64; 2] {
        let mut a = [0.0, 0.0];
        for term in &self.terms {
            let r = Self::rotated(term, q);
            let phid: f64 = term.dofs.iter().map(|&d| qd[d]).sum();
            a[0] -= phid * phid * r[0];
            a[1] -= phid * phid * r[1];
        }
        a
    }
}

/// A segment: its COM chain, constant angular selector, mass and inertia.
#[derive(Debug, Clone)]
pub struct BodyDef {
    com: PointChain,
    angle_dofs: Vec<usize>,
    pub mass: f64,
    pub inertia: f64,
}

impl BodyDef {
    pub fn com_position(&self, q: &[f64; N_DOF]) -> [f64; 2] {
        self.com.position(q)
    }

    pub fn com_velocity(&self, q: &[f64; N_DOF], qd: &[f64; N_DOF]) -> [f64; 2] {
        self.com.velocity(q, qd)
    }

    pub fn orientation(&self, q: &[f64; N_DOF]) -> f64 {
        self.angle_dofs.iter().map(|&d| q[d]).sum()
    }
}

/// The seven-segment planar model plus its four contact points
/// (left heel, left toe, right heel, right toe).
#[derive(Debug, Clone)]
pub struct Model {
    pub bodies: Vec<BodyDef>,
    pub contacts: Vec<PointChain>,
    pub total_mass: f64,
    pub gravity: f64,
}

fn rod_inertia(mass: f64, length: f64) -> f64 {
    mass * length * length / 12.0
}

pub fn build_model(body: &BodyParams) -> Model {
    let b = body;
    let thigh_com = 0.45 * b.thigh_length;
    let shank_com = 0.45 * b.shank_length;
    let foot_com = [
        (b.toe_offset() - b.heel_offset) / 2.0,
        -0.5 * b.ankle_height,
    ];

    let mut bodies = Vec::with_capacity(7);
    bodies.push(BodyDef {
        com: PointChain::new(vec![(vec![TORSO_ROT], [0.0, 0.5 * b.torso_length])]),
        angle_dofs: vec![TORSO_ROT],
        mass: b.torso_mass,
        inertia: rod_inertia(b.torso_mass, b.torso_length),
    });
    for (hip, knee, ankle) in [
        (3usize, 4usize, 5usize),
        (6, 7, 8),
    ] {
        bodies.push(BodyDef {
            com: PointChain::new(vec![(vec![TORSO_ROT, hip], [0.0, -thigh_com])]),
            angle_dofs: vec![TORSO_ROT, hip],
            mass: b.thigh_mass,
            inertia: rod_inertia(b.thigh_mass, b.thigh_length),
        });
        bodies.push(BodyDef {
            com: PointChain::new(vec![
                (vec![TORSO_ROT, hip], [0.0, -b.thigh_length]),
                (vec![TORSO_ROT, hip, knee], [0.0, -shank_com]),
            ]),
            angle_dofs: vec![TORSO_ROT, hip, knee],
            mass: b.shank_mass,
            inertia: rod_inertia(b.shank_mass, b.shank_length),
        });
        bodies.push(BodyDef {
            com: PointChain::new(vec![
                (vec![TORSO_ROT, hip], [0.0, -b.thigh_length]),
                (vec![TORSO_ROT, hip, knee], [0.0, -b.shank_length]),
                (vec![TORSO_ROT, hip, knee, ankle], foot_com),
            ]),
            angle_dofs: vec![TORSO_ROT, hip, knee, ankle],
            mass: b.foot_mass,
            inertia: rod_inertia(b.foot_mass, b.foot_length),
        });
    }

    // reorder to the documented segment order: torso, thigh_l, shank_l,
    // foot_l, thigh_r, shank_r, foot_r (already built in that order)
    let mut contacts = Vec::with_capacity(4);
    for (hip, knee, ankle) in [(3usize, 4usize, 5usize), (6, 7, 8)] {
        for x in [-b.heel_offset, b.toe_offset()] {
            contacts.push(PointChain::new(vec![
                (vec![TORSO_ROT, hip], [0.0, -b.thigh_length]),
                (vec![TORSO_ROT, hip, knee], [0.0, -b.shank_length]),
                (vec![TORSO_ROT, hip, knee, ankle], [x, -b.ankle_height]),
            ]));
        }
    }

    Model {
        bodies,
        contacts,
        total_mass: b.total_mass(),
        gravity: b.gravity,
    }
}

impl Model {
    /// Joint-space mass matrix at configuration `q`.
    pub fn mass_matrix(&self, q: &[f64; N_DOF]) -> Mat9 {
        let mut m = Mat9::zeros();
        let mut jac = [[0.0; N_DOF]; 2];
        for body in &self.bodies {
            body.com.jacobian(q, &mut jac);
            for i in 0..N_DOF {
                for j in i..N_DOF {
                    let v = body.mass * (jac[0][i] * jac[0][j] + jac[1][i] * jac[1][j]);
                    m[(i, j)] += v;
                    if i != j {
                        m[(j, i)] += v;
                    }
                }
            }
            for &di in &body.angle_dofs {
                for &dj in &body.angle_dofs {
                    m[(di, dj)] += body.inertia;
                }
            }
        }
        m
    }

    /// Velocity-product bias forces Σ m·Jᵀ·a_vp.
    pub fn bias_forces(&self, q: &[f64; N_DOF], qd: &[f64; N_DOF]) -> Vec9 {
        let mut bias = Vec9::zeros();
        let mut jac = [[0.0; N_DOF]; 2];
        for body in &self.bodies {
            let a = body.com.vp_accel(q, qd);
            body.com.jacobian(q, &mut jac);
            for i in 0..N_DOF {
                bias[i] += body.mass * (jac[0][i] * a[0] + jac[1][i] * a[1]);
            }
        }
        bias
    }

    /// Generalized gravity forces.
    pub fn gravity_forces(&self, q: &[f64; N_DOF]) -> Vec9 {
        let mut f = Vec9::zeros();
        let mut jac = [[0.0; N_DOF]; 2];
        for body in &self.bodies {
            body.com.jacobian(q, &mut jac);
            let w = -body.mass * self.gravity;
            for i in 0..N_DOF {
                f[i] += jac[1][i] * w;
            }
        }
        f
    }

    /// Maps a world-frame force at a contact point into generalized forces.
    pub fn apply_point_force(
        &self,
        contact_index: usize,
        q: &[f64; N_DOF],
        force: [f64; 2],
        out: &mut Vec9,
    ) {
        let mut jac = [[0.0; N_DOF]; 2];
        self.contacts[contact_index].jacobian(q, &mut jac);
        for i in 0..N_DOF {
            out[i] += jac[0][i] * force[0] + jac[1][i] * force[1];
        }
    }

    pub fn contact_position(&self, index: usize, q: &[f64; N_DOF]) -> [f64; 2] {
        self.contacts[index].position(q)
    }

    pub fn contact_velocity(&self, index: usize, q: &[f64; N_DOF], qd: &[f64; N_DOF]) -> [f64; 2] {
        self.contacts[index].velocity(q, qd)
    }

    /// Solves M(q)·q̈ = rhs. Returns `None` when the state has degenerated
    /// (non-finite coordinates make the factorization fail).
    pub fn solve_accelerations(&self, q: &[f64; N_DOF], rhs: &Vec9) -> Option<Vec9> {
        let m = self.mass_matrix(q);
        Some(m.cholesky()?.solve(rhs))
    }

    /// Kinetic energy ½ q̇ᵀ M q̇.
    pub fn kinetic_energy(&self, q: &[f64; N_DOF], qd: &[f64; N_DOF]) -> f64 {
        let m = self.mass_matrix(q);
        let v = Vec9::from_column_slice(qd);
        0.5 * (v.transpose() * m * v)[(0, 0)]
    }

    /// Gravitational potential energy relative to the ground origin.
    pub fn potential_energy(&self, q: &[f64; N_DOF]) -> f64 {
        self.bodies
            .iter()
            .map(|b| b.mass * self.gravity * b.com_position(q)[1])
            .sum()
    }
}
