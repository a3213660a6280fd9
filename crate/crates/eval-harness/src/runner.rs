//! Greedy evaluation episodes, protocol sweeps and per-step traces.

use actorcritic::ModularActor;
use biomech_env::{Draw, EnvConfig, StandingEnv};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::report::{EvalReport, EvalRow};
use crate::scenario::{perturb_observation, EvalScenario};
use crate::Result;

/// Mixes a cell seed into an independent noise stream.
fn noise_seed(seed: u64) -> u64 {
    seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(0x6c62272e07bb0142)
}

fn cell_env(base: &EnvConfig, scenario: &EvalScenario, seed: u64) -> Result<StandingEnv> {
    let cfg = EnvConfig {
        drop: scenario.drop.clone(),
        incline_deg: scenario.incline_deg.clone(),
        seed,
        max_steps: scenario.max_steps,
        ..base.clone()
    };
    Ok(StandingEnv::new(cfg)?)
}

/// Runs the greedy policy (no exploration noise) once per seed, with
/// observation noise applied before every agent evaluation. The agent is
/// only read, never mutated.
pub fn run_eval(
    actor: &ModularActor,
    base_env: &EnvConfig,
    scenario: &EvalScenario,
) -> Result<EvalReport> {
    scenario.validate()?;
    let mut report = EvalReport::default();
    for &seed in &scenario.seeds {
        let mut env = cell_env(base_env, scenario, seed)?;
        let mut noise_rng = ChaCha12Rng::seed_from_u64(noise_seed(seed));
        let (drop_m, incline_deg) = env.scenario();
        let dt = env.dt();

        let mut obs = env.reset();
        let mut total_reward = 0.0;
        let mut steps = 0u32;
        let termination = loop {
            perturb_observation(&mut obs, scenario.obs_noise_sigma, &mut noise_rng);
            let action = actor.infer(&obs.concat()).action;
            let step = env.step(&action)?;
            total_reward += step.reward;
            steps += 1;
            obs = step.obs;
            if step.done {
                break if env.diverged() {
                    "diverged"
                } else if env.is_fallen() {
                    "fall"
                } else {
                    "cap"
                };
            }
        };
        report.rows.push(EvalRow {
            scenario_id: scenario.id.clone(),
            seed,
            drop_m,
            incline_deg,
            sigma: scenario.obs_noise_sigma,
            steps,
            standing_duration_s: steps as f64 * dt,
            total_reward,
            termination,
        });
    }
    Ok(report)
}

/// σ ∈ {0, 0.02, 0.04, 0.08, 0.16, 0.32, 0.64} at a fixed 6 cm drop on
/// level ground.
pub fn noise_sweep(
    actor: &ModularActor,
    base_env: &EnvConfig,
    seeds: &[u64],
    max_steps: u32,
) -> Result<EvalReport> {
    let mut report = EvalReport::default();
    for &sigma in &crate::NOISE_LADDER {
        let scenario = EvalScenario {
            id: format!("noise_s{sigma}"),
            drop: Draw::fixed(0.06),
            incline_deg: Draw::fixed(0.0),
            obs_noise_sigma: sigma,
            seeds: seeds.to_vec(),
            max_steps,
        };
        report.extend(run_eval(actor, base_env, &scenario)?);
    }
    Ok(report)
}

/// Drop heights over the [2, 10] cm grid on level ground, no noise.
pub fn drop_sweep(
    actor: &ModularActor,
    base_env: &EnvConfig,
    seeds: &[u64],
    max_steps: u32,
) -> Result<EvalReport> {
    let mut report = EvalReport::default();
    for &drop in &crate::DROP_GRID {
        let scenario = EvalScenario {
            id: format!("drop_{:.0}cm", drop * 100.0),
            drop: Draw::fixed(drop),
            incline_deg: Draw::fixed(0.0),
            obs_noise_sigma: 0.0,
            seeds: seeds.to_vec(),
            max_steps,
        };
        report.extend(run_eval(actor, base_env, &scenario)?);
    }
    Ok(report)
}

/// Forward inclinations drawn from truncated normals with means
/// {−2.5, 0, +2.5} degrees and std 2.5, drop drawn from [0, 4] cm.
pub fn incline_sweep(
    actor: &ModularActor,
    base_env: &EnvConfig,
    seeds: &[u64],
    max_steps: u32,
    std_deg: f64,
) -> Result<EvalReport> {
    let mut report = EvalReport::default();
    for &mean in &crate::INCLINE_MEANS {
        let scenario = EvalScenario {
            id: format!("incline_m{mean}"),
            drop: Draw::Uniform { lo: 0.0, hi: 0.04 },
            incline_deg: Draw::Normal {
                mean,
                std: std_deg,
                lo: -10.0,
                hi: 10.0,
            },
            obs_noise_sigma: 0.0,
            seeds: seeds.to_vec(),
            max_steps,
        };
        report.extend(run_eval(actor, base_env, &scenario)?);
    }
    Ok(report)
}

/// One per-step row of a trace episode.
#[derive(Debug, Clone)]
pub struct TraceRow {
    pub t: f64,
    pub weights: Vec<f64>,
    pub activations: Vec<f64>,
    pub pelvis_height: f64,
    pub grf_left: f64,
    pub grf_right: f64,
    pub reward: f64,
    /// Raw (pre-squash) per-policy actions, row-major [policy][muscle];
    /// filled when requested.
    pub per_policy: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Default)]
pub struct TraceLog {
    pub rows: Vec<TraceRow>,
    pub n_policies: usize,
    pub n_muscles: usize,
}

/// Runs one seeded greedy episode logging coordination weights, muscle
/// activations, pelvis height, GRFs and reward per step.
pub fn trace(
    actor: &ModularActor,
    base_env: &EnvConfig,
    scenario: &EvalScenario,
    seed: u64,
    with_policy_actions: bool,
) -> Result<TraceLog> {
    scenario.validate()?;
    let mut env = cell_env(base_env, scenario, seed)?;
    let mut noise_rng = ChaCha12Rng::seed_from_u64(noise_seed(seed));
    let dt = env.dt();

    let mut log = TraceLog {
        rows: Vec::new(),
        n_policies: actor.n_policies(),
        n_muscles: actor.action_dim(),
    };
    let mut obs = env.reset();
    let mut t = 0.0;
    loop {
        perturb_observation(&mut obs, scenario.obs_noise_sigma, &mut noise_rng);
        let out = actor.infer(&obs.concat());
        let step = env.step(&out.action)?;
        t += dt;
        log.rows.push(TraceRow {
            t,
            weights: out.weights.clone(),
            activations: step.obs.prev_activations.clone(),
            pelvis_height: step.info.pelvis_height,
            grf_left: step.info.grf_left,
            grf_right: step.info.grf_right,
            reward: step.reward,
            per_policy: with_policy_actions.then(|| out.per_policy.clone()),
        });
        obs = step.obs;
        if step.done {
            break;
        }
    }
    Ok(log)
}

impl TraceLog {
    pub fn write_csv<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        let with_policy = self.rows.first().is_some_and(|r| r.per_policy.is_some());
        write!(w, "t")?;
        for k in 0..self.n_policies {
            write!(w, ",weight_{k}")?;
        }
        for m in 0..self.n_muscles {
            write!(w, ",activation_{m}")?;
        }
        write!(w, ",pelvis_height,grf_left,grf_right,reward")?;
        if with_policy {
            for k in 0..self.n_policies {
                for m in 0..self.n_muscles {
                    write!(w, ",policy{k}_raw{m}")?;
                }
            }
        }
        writeln!(w)?;
        for row in &self.rows {
            write!(w, "{}", row.t)?;
            for v in &row.weights {
                write!(w, ",{v}")?;
            }
            for v in &row.activations {
                write!(w, ",{v}")?;
            }
            write!(
                w,
                ",{},{},{},{}",
                row.pelvis_height, row.grf_left, row.grf_right, row.reward
            )?;
            if let Some(per_policy) = &row.per_policy {
                for policy in per_policy {
                    for v in policy {
                        write!(w, ",{v}")?;
                    }
                }
            }
            writeln!(w)?;
        }
        Ok(())
    }
}
