//! Scratch diagnostics for integrator stability. Not part of the test suite.

use biomech_env::{Draw, EnvConfig, StandingEnv, N_MUSCLES};

fn run(substeps: u32, drop: f64, excite: f64, steps: usize) {
    let cfg = EnvConfig {
        drop: Draw::fixed(drop),
        incline_deg: Draw::fixed(0.0),
        substeps,
        ..EnvConfig::default()
    };
    let mut env = StandingEnv::new(cfg).unwrap();
    let u = vec![excite; N_MUSCLES];
    let mut max_pen = 0.0f64;
    let mut max_vel = 0.0f64;
    let mut fell_at = None;
    let mut nan_at = None;
    let e0 = env.mechanical_energy();
    let mut max_e = e0;
    for k in 0..steps {
        let r = match env.step(&u) {
            Ok(r) => r,
            Err(e) => {
                println!("substeps {substeps}: step {k} error {e}");
                return;
            }
        };
        let (q, qd) = env.raw_coords();
        if q.iter().chain(qd.iter()).any(|v| !v.is_finite()) && nan_at.is_none() {
            nan_at = Some(k);
            break;
        }
        max_pen = max_pen.max(env.contact_penetrations().iter().fold(0.0f64, |a, &b| a.max(b)));
        max_vel = max_vel.max(qd.iter().fold(0.0f64, |a, &b| a.max(b.abs())));
        max_e = max_e.max(env.mechanical_energy());
        if r.done && fell_at.is_none() {
            fell_at = Some((k, env.pelvis_height()));
            break;
        }
    }
    println!(
        "substeps {substeps} drop {drop} excite {excite}: fell {:?} nan {:?} max_pen {:.4} max_vel {:.2} e0 {:.1} max_e {:.1}",
        fell_at, nan_at, max_pen, max_vel, e0, max_e
    );
}

fn energy_profile(substeps: u32) {
    let cfg = EnvConfig {
        drop: Draw::fixed(0.0),
        incline_deg: Draw::fixed(0.0),
        substeps,
        ..EnvConfig::default()
    };
    let mut env = StandingEnv::new(cfg).unwrap();
    let u = vec![0.0; N_MUSCLES];
    let mut prev = env.mechanical_energy();
    let mut worst = f64::NEG_INFINITY;
    let mut worst_step = 0;
    for k in 0..200 {
        let r = env.step(&u).unwrap();
        let e = env.mechanical_energy();
        let de = e - prev;
        if de > worst {
            worst = de;
            worst_step = k;
        }
        if k < 12 || de > 1e-6 {
            println!("  step {k:3}: dE {de:+.3e} pen {:?}", env.contact_penetrations());
        }
        prev = e;
        if r.done {
            println!("  done at {k} (pelvis {:.3})", env.pelvis_height());
            break;
        }
    }
    println!("substeps {substeps}: worst dE {worst:+.3e} at step {worst_step}");
}

fn main() {
    for substeps in [10, 20, 40, 80] {
        run(substeps, 0.0, 0.0, 2000);
        run(substeps, 0.04, 0.0, 2000);
        run(substeps, 0.10, 0.0, 2000);
        run(substeps, 0.12, 0.0, 2000);
        run(substeps, 0.02, 0.5, 2000);
        run(substeps, 0.02, 1.0, 2000);
        println!();
    }
    println!("== zero-drop energy profile ==");
    for substeps in [40, 80] {
        energy_profile(substeps);
    }
}
