//! Environment configuration: scenario draws, body geometry, muscle table.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::contact::ContactParams;
use crate::{EnvError, Result, N_MUSCLES};

/// A scalar that is either fixed or drawn per reset from the env's rng.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Draw {
    Fixed { value: f64 },
    Uniform { lo: f64, hi: f64 },
    /// Normal(mean, std) truncated to the open interval (lo, hi) by
    /// rejection sampling.
    Normal { mean: f64, std: f64, lo: f64, hi: f64 },
}

impl Draw {
    pub fn fixed(value: f64) -> Self {
        Draw::Fixed { value }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Draw::Fixed { value } => value,
            Draw::Uniform { lo, hi } => {
                if lo == hi {
                    lo
                } else {
                    rng.random_range(lo..hi)
                }
            }
            Draw::Normal { mean, std, lo, hi } => {
                if std == 0.0 {
                    return mean.clamp(lo, hi);
                }
                let dist = Normal::new(mean, std).expect("valid normal");
                loop {
                    let x = dist.sample(rng);
                    if x > lo && x < hi {
                        return x;
                    }
                }
            }
        }
    }

    fn bounds(&self) -> (f64, f64) {
        match *self {
            Draw::Fixed { value } => (value, value),
            Draw::Uniform { lo, hi } => (lo, hi),
            Draw::Normal { lo, hi, .. } => (lo, hi),
        }
    }
}

/// Which joint a muscle spans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JointId {
    HipLeft,
    KneeLeft,
    AnkleLeft,
    HipRight,
    KneeRight,
    AnkleRight,
}

impl JointId {
    /// Generalized-coordinate index of the joint angle.
    pub fn dof(self) -> usize {
        match self {
            JointId::HipLeft => 3,
            JointId::KneeLeft => 4,
            JointId::AnkleLeft => 5,
            JointId::HipRight => 6,
            JointId::KneeRight => 7,
            JointId::AnkleRight => 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MuscleRole {
    Flexor,
    Extensor,
}

/// One torque muscle: joint, pull direction, strength, activation lags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuscleSpec {
    pub name: String,
    pub joint: JointId,
    pub role: MuscleRole,
    pub max_torque: f64,
    pub tau_act: f64,
    pub tau_deact: f64,
}

impl MuscleSpec {
    /// Sign of the generalized torque this muscle applies at its joint.
    ///
    /// Angle conventions (x forward, counter-clockwise positive): hip
    /// flexion is positive, knee flexion is negative, ankle dorsiflexion
    /// (the anatomical flexor direction) is positive.
    pub fn torque_sign(&self) -> f64 {
        let flexor_dir = match self.joint {
            JointId::HipLeft | JointId::HipRight => 1.0,
            JointId::KneeLeft | JointId::KneeRight => -1.0,
            JointId::AnkleLeft | JointId::AnkleRight => 1.0,
        };
        match self.role {
            MuscleRole::Flexor => flexor_dir,
            MuscleRole::Extensor => -flexor_dir,
        }
    }
}

/// The 12-muscle table: flexor/extensor per hip, knee and ankle, left leg
/// first. This fixed order is also the action and `prev_activations` layout.
pub fn default_muscles() -> Vec<MuscleSpec> {
    let mut muscles = Vec::with_capacity(N_MUSCLES);
    let legs = [
        ("l", JointId::HipLeft, JointId::KneeLeft, JointId::AnkleLeft),
        ("r", JointId::HipRight, JointId::KneeRight, JointId::AnkleRight),
    ];
    for (tag, hip, knee, ankle) in legs {
        let entries = [
            (format!("hip_flex_{tag}"), hip, MuscleRole::Flexor, 120.0),
            (format!("hip_ext_{tag}"), hip, MuscleRole::Extensor, 160.0),
            (format!("knee_flex_{tag}"), knee, MuscleRole::Flexor, 100.0),
            (format!("knee_ext_{tag}"), knee, MuscleRole::Extensor, 180.0),
            (format!("ankle_flex_{tag}"), ankle, MuscleRole::Flexor, 60.0),
            (format!("ankle_ext_{tag}"), ankle, MuscleRole::Extensor, 160.0),
        ];
        for (name, joint, role, max_torque) in entries {
            muscles.push(MuscleSpec {
                name,
                joint,
                role,
                max_torque,
                tau_act: 0.01,
                tau_deact: 0.04,
            });
        }
    }
    muscles
}

/// Segment masses and geometry. The reference standing pose has straight
/// vertical legs and flat feet, so the reference pelvis height derives from
/// the shank and thigh lengths plus the ankle height.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BodyParams {
    pub torso_mass: f64,
    pub thigh_mass: f64,
    pub shank_mass: f64,
    pub foot_mass: f64,
    pub torso_length: f64,
    pub thigh_length: f64,
    pub shank_length: f64,
    pub foot_length: f64,
    /// Ankle joint height above the sole.
    pub ankle_height: f64,
    /// Horizontal distance from ankle back to the heel contact point.
    pub heel_offset: f64,
    pub gravity: f64,
}

impl Default for BodyParams {
    fn default() -> Self {
        Self {
            torso_mass: 50.0,
            thigh_mass: 7.0,
            shank_mass: 3.5,
            foot_mass: 1.0,
            torso_length: 0.5,
            thigh_length: 0.45,
            shank_length: 0.43,
            foot_length: 0.25,
            ankle_height: 0.05,
            heel_offset: 0.07,
            gravity: 9.81,
        }
    }
}

impl BodyParams {
    pub fn total_mass(&self) -> f64 {
        self.torso_mass + 2.0 * (self.thigh_mass + self.shank_mass + self.foot_mass)
    }

    pub fn toe_offset(&self) -> f64 {
        self.foot_length - self.heel_offset
    }

    /// Pelvis height in the reference standing pose.
    pub fn reference_pelvis_height(&self) -> f64 {
        self.thigh_length + self.shank_length + self.ankle_height
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnvConfig {
    /// Drop height draw; training default is uniform over [0, 0.04] m.
    pub drop: Draw,
    /// Forward ground inclination draw, in degrees.
    pub incline_deg: Draw,
    pub seed: u64,
    /// Control timestep in seconds.
    pub dt: f64,
    /// Internal integrator substeps per control step; the stiff contact
    /// model needs a finer grid than the 10 ms control cadence.
    pub substeps: u32,
    pub max_steps: u32,
    pub contact_enabled: bool,
    pub joint_limits_enabled: bool,
    pub contact: ContactParams,
    pub body: BodyParams,
    pub muscles: Vec<MuscleSpec>,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            drop: Draw::Uniform { lo: 0.0, hi: 0.04 },
            incline_deg: Draw::fixed(0.0),
            seed: 107,
            dt: 0.01,
            substeps: 40,
            max_steps: 1000,
            contact_enabled: true,
            joint_limits_enabled: true,
            contact: ContactParams::default(),
            body: BodyParams::default(),
            muscles: default_muscles(),
        }
    }
}

impl EnvConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dt <= 0.0 {
            return Err(EnvError::Config("dt must be > 0".into()));
        }
        if self.substeps == 0 {
            return Err(EnvError::Config("substeps must be >= 1".into()));
        }
        let (drop_lo, drop_hi) = self.drop.bounds();
        if drop_lo < 0.0 || drop_hi < drop_lo {
            return Err(EnvError::Config("drop height must be >= 0".into()));
        }
        let (inc_lo, inc_hi) = self.incline_deg.bounds();
        if inc_lo.abs() >= 15.0 || inc_hi.abs() >= 15.0 || inc_hi < inc_lo {
            return Err(EnvError::Config("incline must stay within (-15, 15) deg".into()));
        }
        if self.muscles.len() != N_MUSCLES {
            return Err(EnvError::Config(format!(
                "expected {N_MUSCLES} muscles, found {}",
                self.muscles.len()
            )));
        }
        for m in &self.muscles {
            if m.max_torque <= 0.0 || m.tau_act <= 0.0 || m.tau_deact <= 0.0 {
                return Err(EnvError::Config(format!("invalid muscle spec '{}'", m.name)));
            }
        }
        Ok(())
    }
}
