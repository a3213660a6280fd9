//! The standing environment: reset, step, observations, reward, termination.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::config::EnvConfig;
use crate::contact::ground_contact;
use crate::dynamics::{build_model, Model, N_DOF, PELVIS_Y, TORSO_ROT};
use crate::muscles::activation_dynamics;
use crate::reward::{compute_reward, RewardInputs, RewardParts};
use crate::{EnvError, Result, N_MUSCLES};

/// Observation group widths: segment positions (7×2), segment orientations,
/// joint angles, joint velocities, joint accelerations, previous activations.
pub const GROUP_DIMS: [usize; 6] = [14, 7, 7, 7, 7, 12];

/// Fraction of the reference pelvis height below which the model counts as
/// fallen.
pub const FALL_FRACTION: f64 = 0.6;

const N_JOINTS: usize = 7;
const N_CONTACTS: usize = 4;

/// Grouped observations.
///
/// Segment order everywhere: torso, left thigh, left shank, left foot,
/// right thigh, right shank, right foot. Joint order: pelvis-to-world
/// rotation, left hip, left knee, left ankle, right hip, right knee, right
/// ankle. Muscle order: per leg flexor/extensor at hip, knee, ankle; left
/// leg first.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationGroups {
    pub positions: Vec<f64>,
    pub orientations: Vec<f64>,
    pub joint_angles: Vec<f64>,
    pub joint_velocities: Vec<f64>,
    pub joint_accelerations: Vec<f64>,
    pub prev_activations: Vec<f64>,
}

impl ObservationGroups {
    pub fn widths(&self) -> [usize; 6] {
        [
            self.positions.len(),
            self.orientations.len(),
            self.joint_angles.len(),
            self.joint_velocities.len(),
            self.joint_accelerations.len(),
            self.prev_activations.len(),
        ]
    }

    /// Flat observation in group order.
    pub fn concat(&self) -> Vec<f64> {
        let mut flat = Vec::with_capacity(GROUP_DIMS.iter().sum());
        flat.extend_from_slice(&self.positions);
        flat.extend_from_slice(&self.orientations);
        flat.extend_from_slice(&self.joint_angles);
        flat.extend_from_slice(&self.joint_velocities);
        flat.extend_from_slice(&self.joint_accelerations);
        flat.extend_from_slice(&self.prev_activations);
        flat
    }
}

/// Per-step diagnostics alongside the observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    /// Vertical ground reaction force per foot, N (averaged over substeps).
    pub grf_left: f64,
    pub grf_right: f64,
    /// Per-foot vertical GRF divided by body weight.
    pub w_left: f64,
    pub w_right: f64,
    pub pelvis_height: f64,
    pub reward_parts: RewardParts,
}

#[derive(Debug, Clone)]
pub struct StepResult {
    pub obs: ObservationGroups,
    pub reward: f64,
    pub done: bool,
    pub info: StepInfo,
}

/// Full state snapshot for traces and inspection.
#[derive(Debug, Clone)]
pub struct EnvState {
    pub segment_positions: Vec<[f64; 2]>,
    pub segment_orientations: Vec<f64>,
    pub segment_velocities: Vec<[f64; 2]>,
    pub joint_angles: Vec<f64>,
    pub joint_velocities: Vec<f64>,
    pub joint_accelerations: Vec<f64>,
    pub activations: Vec<f64>,
    /// World-frame contact force per point (left heel, left toe, right
    /// heel, right toe), averaged over the last step's substeps.
    pub contact_forces: Vec<[f64; 2]>,
    pub step_index: u32,
}

struct JointLimit {
    dof: usize,
    lo: f64,
    hi: f64,
}

const LIMIT_STIFFNESS: f64 = 300.0;
const LIMIT_DAMPING: f64 = 2.0;

fn joint_limits() -> Vec<JointLimit> {
    let mut limits = Vec::with_capacity(6);
    for (hip, knee, ankle) in [(3usize, 4usize, 5usize), (6, 7, 8)] {
        limits.push(JointLimit { dof: hip, lo: -0.5, hi: 1.9 });
        limits.push(JointLimit { dof: knee, lo: -2.3, hi: 0.05 });
        limits.push(JointLimit { dof: ankle, lo: -0.9, hi: 0.9 });
    }
    limits
}

pub struct StandingEnv {
    cfg: EnvConfig,
    model: Model,
    limits: Vec<JointLimit>,
    rng: ChaCha12Rng,
    q: [f64; N_DOF],
    qd: [f64; N_DOF],
    prev_joint_vel: [f64; N_JOINTS],
    joint_acc: [f64; N_JOINTS],
    activations: Vec<f64>,
    contact_force_avg: Vec<[f64; 2]>,
    step_index: u32,
    drop_drawn: f64,
    incline_rad: f64,
    diverged: bool,
    h0: f64,
}

impl StandingEnv {
    pub fn new(cfg: EnvConfig) -> Result<Self> {
        cfg.validate()?;
        let model = build_model(&cfg.body);
        let h0 = cfg.body.reference_pelvis_height();
        let rng = ChaCha12Rng::seed_from_u64(cfg.seed);
        let mut env = Self {
            model,
            limits: joint_limits(),
            rng,
            q: [0.0; N_DOF],
            qd: [0.0; N_DOF],
            prev_joint_vel: [0.0; N_JOINTS],
            joint_acc: [0.0; N_JOINTS],
            activations: vec![0.0; N_MUSCLES],
            contact_force_avg: vec![[0.0; 2]; N_CONTACTS],
            step_index: 0,
            drop_drawn: 0.0,
            incline_rad: 0.0,
            diverged: false,
            h0,
            cfg,
        };
        env.reset();
        Ok(env)
    }

    pub fn config(&self) -> &EnvConfig {
        &self.cfg
    }

    /// Reference standing pelvis height.
    pub fn h0(&self) -> f64 {
        self.h0
    }

    pub fn dt(&self) -> f64 {
        self.cfg.dt
    }

    pub fn group_dims(&self) -> [usize; 6] {
        GROUP_DIMS
    }

    pub fn action_dim(&self) -> usize {
        N_MUSCLES
    }

    /// Drop height and incline (degrees) drawn at the last reset.
    pub fn scenario(&self) -> (f64, f64) {
        (self.drop_drawn, self.incline_rad.to_degrees())
    }

    fn plane_normal(&self) -> [f64; 2] {
        [-self.incline_rad.sin(), self.incline_rad.cos()]
    }

    fn plane_tangent(&self) -> [f64; 2] {
        [self.incline_rad.cos(), self.incline_rad.sin()]
    }

    /// Poses the model in the reference standing pose at the drawn drop
    /// height above the (possibly inclined) ground and zeroes all state.
    ///
    /// On inclined ground the clearance gains the `sin(θ)/2` offset used by
    /// the inclined-platform drop protocol.
    pub fn reset(&mut self) -> ObservationGroups {
        self.drop_drawn = self.cfg.drop.sample(&mut self.rng);
        let incline_deg = self.cfg.incline_deg.sample(&mut self.rng);
        self.incline_rad = incline_deg.to_radians();

        self.q = [0.0; N_DOF];
        self.q[PELVIS_Y] = self.h0;
        self.qd = [0.0; N_DOF];
        self.prev_joint_vel = [0.0; N_JOINTS];
        self.joint_acc = [0.0; N_JOINTS];
        self.activations.fill(0.0);
        self.contact_force_avg = vec![[0.0; 2]; N_CONTACTS];
        self.step_index = 0;
        self.diverged = false;

        let target = self.drop_drawn + self.incline_rad.abs().sin() / 2.0;
        let clearance = self.min_contact_clearance();
        let n = self.plane_normal();
        self.q[PELVIS_Y] += (target - clearance) / n[1];
        ObservationGroups::from_env(self)
    }

    /// Smallest signed distance from any contact point to the ground plane.
    pub fn min_contact_clearance(&self) -> f64 {
        let n = self.plane_normal();
        (0..N_CONTACTS)
            .map(|i| {
                let p = self.model.contact_position(i, &self.q);
                n[0] * p[0] + n[1] * p[1]
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Current penetration depth per contact point.
    pub fn contact_penetrations(&self) -> [f64; N_CONTACTS] {
        let n = self.plane_normal();
        let mut out = [0.0; N_CONTACTS];
        for (i, slot) in out.iter_mut().enumerate() {
            let p = self.model.contact_position(i, &self.q);
            *slot = (-(n[0] * p[0] + n[1] * p[1])).max(0.0);
        }
        out
    }

    pub fn is_fallen(&self) -> bool {
        self.q[PELVIS_Y] < FALL_FRACTION * self.h0
    }

    /// True when the last step hit a degenerate numerical state and the
    /// episode was terminated early.
    pub fn diverged(&self) -> bool {
        self.diverged
    }

    pub fn pelvis_height(&self) -> f64 {
        self.q[PELVIS_Y]
    }

    /// Advances one control step: activation dynamics, muscle torques,
    /// contact and gravity, integrated with semi-implicit Euler over the
    /// configured substeps.
    pub fn step(&mut self, excitations: &[f64]) -> Result<StepResult> {
        assert_eq!(excitations.len(), N_MUSCLES, "excitation width mismatch");
        if excitations.iter().any(|u| !u.is_finite()) {
            return Err(EnvError::NonFiniteAction);
        }

        for (i, muscle) in self.cfg.muscles.iter().enumerate() {
            let u = excitations[i].clamp(0.0, 1.0);
            self.activations[i] = activation_dynamics(
                self.activations[i],
                u,
                self.cfg.dt,
                muscle.tau_act,
                muscle.tau_deact,
            );
        }

        let mut muscle_torque = [0.0; N_DOF];
        for (i, muscle) in self.cfg.muscles.iter().enumerate() {
            muscle_torque[muscle.joint.dof()] +=
                muscle.torque_sign() * muscle.max_torque * self.activations[i];
        }

        let n = self.plane_normal();
        let t = self.plane_tangent();
        let dt_sub = self.cfg.dt / self.cfg.substeps as f64;
        let mut force_sum = [[0.0f64; 2]; N_CONTACTS];
        let mut normal_sum = [0.0f64; 2]; // per foot
        let backup = (self.q, self.qd);

        for _ in 0..self.cfg.substeps {
            let mut rhs = self.model.gravity_forces(&self.q);
            for d in TORSO_ROT + 1..N_DOF {
                rhs[d] += muscle_torque[d];
            }
            if self.cfg.joint_limits_enabled {
                for limit in &self.limits {
                    let q = self.q[limit.dof];
                    let qd = self.qd[limit.dof];
                    if q > limit.hi {
                        rhs[limit.dof] += -LIMIT_STIFFNESS * (q - limit.hi) - LIMIT_DAMPING * qd;
                    } else if q < limit.lo {
                        rhs[limit.dof] += -LIMIT_STIFFNESS * (q - limit.lo) - LIMIT_DAMPING * qd;
                    }
                }
            }
            if self.cfg.contact_enabled {
                for ci in 0..N_CONTACTS {
                    let p = self.model.contact_position(ci, &self.q);
                    let v = self.model.contact_velocity(ci, &self.q, &self.qd);
                    let height = n[0] * p[0] + n[1] * p[1];
                    let vn = n[0] * v[0] + n[1] * v[1];
                    let vt = t[0] * v[0] + t[1] * v[1];
                    let (f_normal, f_friction) =
                        ground_contact(height, vn, vt, &self.cfg.contact);
                    if f_normal > 0.0 || f_friction != 0.0 {
                        let f = [
                            f_normal * n[0] + f_friction * t[0],
                            f_normal * n[1] + f_friction * t[1],
                        ];
                        self.model.apply_point_force(ci, &self.q, f, &mut rhs);
                        force_sum[ci][0] += f[0];
                        force_sum[ci][1] += f[1];
                        normal_sum[ci / 2] += f_normal;
                    }
                }
            }
            let bias = self.model.bias_forces(&self.q, &self.qd);
            let Some(qdd) = self.model.solve_accelerations(&self.q, &(rhs - bias)) else {
                self.diverged = true;
                break;
            };
            for d in 0..N_DOF {
                self.qd[d] += qdd[d] * dt_sub;
                self.q[d] += self.qd[d] * dt_sub;
            }
            if self.q.iter().chain(self.qd.iter()).any(|v| !v.is_finite()) {
                self.diverged = true;
                break;
            }
        }

        // a degenerate state (deep tunneling through the stiff contact) ends
        // the episode on the last sound coordinates
        if self.diverged {
            self.q = backup.0;
            self.qd = backup.1;
            force_sum = [[0.0; 2]; N_CONTACTS];
            normal_sum = [0.0; 2];
        }

        let inv = 1.0 / self.cfg.substeps as f64;
        for f in force_sum.iter_mut() {
            f[0] *= inv;
            f[1] *= inv;
        }
        for s in normal_sum.iter_mut() {
            *s *= inv;
        }
        self.contact_force_avg = force_sum.to_vec();

        for j in 0..N_JOINTS {
            let vel = self.qd[TORSO_ROT + j];
            self.joint_acc[j] = (vel - self.prev_joint_vel[j]) / self.cfg.dt;
            self.prev_joint_vel[j] = vel;
        }

        self.step_index += 1;

        let weight = self.model.total_mass * self.model.gravity;
        let grf_left = force_sum[0][1] + force_sum[1][1];
        let grf_right = force_sum[2][1] + force_sum[3][1];
        let reward_parts = compute_reward(&RewardInputs {
            activations: &self.activations,
            pelvis_height: self.q[PELVIS_Y],
            reference_height: self.h0,
            w_left: grf_left / weight,
            w_right: grf_right / weight,
            left_grounded: normal_sum[0] > 0.0,
            right_grounded: normal_sum[1] > 0.0,
        });

        let done = self.is_fallen() || self.diverged || self.step_index >= self.cfg.max_steps;
        let info = StepInfo {
            grf_left,
            grf_right,
            w_left: grf_left / weight,
            w_right: grf_right / weight,
            pelvis_height: self.q[PELVIS_Y],
            reward_parts,
        };
        Ok(StepResult {
            obs: ObservationGroups::from_env(self),
            reward: reward_parts.reward,
            done,
            info,
        })
    }

    pub fn state(&self) -> EnvState {
        EnvState {
            segment_positions: self
                .model
                .bodies
                .iter()
                .map(|b| b.com_position(&self.q))
                .collect(),
            segment_orientations: self
                .model
                .bodies
                .iter()
                .map(|b| b.orientation(&self.q))
                .collect(),
            segment_velocities: self
                .model
                .bodies
                .iter()
                .map(|b| b.com_velocity(&self.q, &self.qd))
                .collect(),
            joint_angles: self.q[TORSO_ROT..].to_vec(),
            joint_velocities: self.qd[TORSO_ROT..].to_vec(),
            joint_accelerations: self.joint_acc.to_vec(),
            activations: self.activations.clone(),
            contact_forces: self.contact_force_avg.clone(),
            step_index: self.step_index,
        }
    }

    /// Kinetic + gravitational + contact-spring + limit-spring energy.
    /// Diagnostic for passivity checks.
    pub fn mechanical_energy(&self) -> f64 {
        let ke = self.model.kinetic_energy(&self.q, &self.qd);
        let pe = self.model.potential_energy(&self.q);
        let mut e_contact = 0.0;
        if self.cfg.contact_enabled {
            for delta in self.contact_penetrations() {
                e_contact += 0.4 * self.cfg.contact.stiffness * delta.powf(2.5);
            }
        }
        let mut e_limit = 0.0;
        if self.cfg.joint_limits_enabled {
            for limit in &self.limits {
                let q = self.q[limit.dof];
                let excess = if q > limit.hi {
                    q - limit.hi
                } else if q < limit.lo {
                    q - limit.lo
                } else {
                    0.0
                };
                e_limit += 0.5 * LIMIT_STIFFNESS * excess * excess;
            }
        }
        ke + pe + e_contact + e_limit
    }

    #[doc(hidden)]
    pub fn raw_coords(&self) -> (&[f64; N_DOF], &[f64; N_DOF]) {
        (&self.q, &self.qd)
    }
}

impl ObservationGroups {
    fn from_env(env: &StandingEnv) -> Self {
        let mut positions = Vec::with_capacity(14);
        let mut orientations = Vec::with_capacity(N_JOINTS);
        for body in &env.model.bodies {
            let p = body.com_position(&env.q);
            positions.push(p[0]);
            positions.push(p[1]);
            orientations.push(body.orientation(&env.q));
        }
        Self {
            positions,
            orientations,
            joint_angles: env.q[TORSO_ROT..].to_vec(),
            joint_velocities: env.qd[TORSO_ROT..].to_vec(),
            joint_accelerations: env.joint_acc.to_vec(),
            prev_activations: env.activations.clone(),
        }
    }
}
