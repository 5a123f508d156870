//! Command-line front end.
//!
//! Exit codes are a stable contract: 0 solved/ok, 1 malformed input,
//! 2 singular or degenerate configuration, 3 infeasible observation
//! (no pose consistent with the data).

use crate::classify::{multiplicity_from_ground_truth, on_plane_l, slopes, Multiplicity};
use crate::geom::{angle_distance, reduce_to_angles, Vec3};
use crate::scene::{CameraSpec, ObservationSpec, PoseEntry, PoseReport, SceneFile, SweepConfigFile};
use crate::sim::{run_sweep, synthesize_observation, write_csv, NoiseModel, SweepRow};
use crate::solver::{angles_from_position, solve_labeled, solve_unlabeled, SolveOutcome, SolverParams};
use clap::{Parser, Subcommand};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT_ERROR: i32 = 1;
pub const EXIT_SINGULAR: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

#[derive(Parser)]
#[command(
    name = "p2pa",
    about = "Camera pose from two landmarks and a gravity direction",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve camera pose from a scene file.
    Solve {
        /// Scene document (TOML) with two landmarks and an observation.
        scene: PathBuf,
        /// Treat the landmark correspondence as unknown.
        #[arg(long)]
        unlabeled: bool,
        /// Angle tolerance (radians) for singular-case screening.
        #[arg(long, default_value_t = 1e-9)]
        singular_tol: f64,
    },
    /// Report solution multiplicity for a scene with a ground-truth camera.
    Classify {
        /// Scene document (TOML) with two landmarks and a camera position.
        scene: PathBuf,
    },
    /// Fill in the observation a camera at the scene's pose would see.
    Synth {
        /// Scene document (TOML) with two landmarks and a camera.
        scene: PathBuf,
        /// Write the completed scene here instead of standard output.
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Seed for noise sampling; omit for an exact observation.
        #[arg(long)]
        noise_seed: Option<u64>,
        /// Direction-noise cone radius in degrees.
        #[arg(long, default_value_t = 0.0)]
        cone_deg: f64,
        /// Per-axis accelerometer noise half-width as a fraction of g.
        #[arg(long, default_value_t = 0.0)]
        accel_noise: f64,
    },
    /// Run an RMS-error-vs-altitude sweep from a config file.
    Simulate {
        /// Sweep-config document (TOML).
        config: PathBuf,
        /// CSV output path.
        #[arg(long)]
        out: PathBuf,
    },
}

/// Parses arguments and dispatches; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version through this path with code 0.
            let _ = e.print();
            return if e.exit_code() == 0 { 0 } else { EXIT_INPUT_ERROR };
        }
    };
    match cli.command {
        Command::Solve {
            scene,
            unlabeled,
            singular_tol,
        } => cmd_solve(&scene, unlabeled, singular_tol),
        Command::Classify { scene } => cmd_classify(&scene),
        Command::Synth {
            scene,
            out,
            noise_seed,
            cone_deg,
            accel_noise,
        } => cmd_synth(&scene, out.as_deref(), noise_seed, cone_deg, accel_noise),
        Command::Simulate { config, out } => cmd_simulate(&config, &out),
    }
}

fn load_scene(path: &Path) -> Result<SceneFile, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    SceneFile::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn input_error(message: String) -> i32 {
    eprintln!("error: {message}");
    EXIT_INPUT_ERROR
}

fn cmd_solve(path: &Path, unlabeled: bool, singular_tol: f64) -> i32 {
    let scene = match load_scene(path) {
        Ok(s) => s,
        Err(e) => return input_error(e),
    };
    let landmarks = match scene.landmark_pair() {
        Ok(l) => l,
        Err(e) => return input_error(e.to_string()),
    };
    let obs = match scene.observation() {
        Ok(o) => o,
        Err(e) => return input_error(e.to_string()),
    };
    let params = SolverParams {
        singular_tol,
        ..SolverParams::default()
    };
    let outcome = if unlabeled {
        solve_unlabeled(&obs, &landmarks, &params)
    } else {
        solve_labeled(&obs, &landmarks, &params)
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => return input_error(e.to_string()),
    };

    let multiplicity = scene.camera.as_ref().and_then(|c| {
        multiplicity_from_ground_truth(&landmarks, Vec3::from(c.position))
            .ok()
            .map(|m| multiplicity_label(&m))
    });

    match outcome {
        SolveOutcome::Singular(case) => {
            let report = PoseReport {
                outcome: "singular".into(),
                singular_case: Some(case.to_string()),
                poses: vec![],
                multiplicity,
            };
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            EXIT_SINGULAR
        }
        SolveOutcome::Poses(poses) => {
            let input_angles = reduce_to_angles(&obs);
            let entries: Vec<PoseEntry> = poses
                .iter()
                .map(|p| {
                    let residual = angles_from_position(&landmarks, p.position)
                        .map(|re| {
                            (re.rho1 - input_angles.rho1)
                                .abs()
                                .max((re.rho2 - input_angles.rho2).abs())
                                .max(angle_distance(re.beta, input_angles.beta))
                        })
                        .unwrap_or(f64::NAN);
                    PoseEntry::from_pose(p, residual)
                })
                .collect();
            let infeasible = entries.is_empty();
            let report = PoseReport {
                outcome: if infeasible { "infeasible" } else { "solved" }.into(),
                singular_case: None,
                poses: entries,
                multiplicity,
            };
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            if infeasible {
                EXIT_INFEASIBLE
            } else {
                EXIT_OK
            }
        }
    }
}

fn multiplicity_label(m: &Multiplicity) -> String {
    match m {
        Multiplicity::Infinite(case) => format!("infinite ({case})"),
        Multiplicity::One => "one".into(),
        Multiplicity::Two => "two".into(),
    }
}

fn cmd_classify(path: &Path) -> i32 {
    let scene = match load_scene(path) {
        Ok(s) => s,
        Err(e) => return input_error(e),
    };
    let landmarks = match scene.landmark_pair() {
        Ok(l) => l,
        Err(e) => return input_error(e.to_string()),
    };
    let Some(camera) = scene.camera.as_ref() else {
        return input_error("classify requires a [camera] section with a position".into());
    };
    let camera = Vec3::from(camera.position);
    let multiplicity = match multiplicity_from_ground_truth(&landmarks, camera) {
        Ok(m) => m,
        Err(e) => return input_error(e.to_string()),
    };
    println!("multiplicity: {}", multiplicity_label(&multiplicity));
    if let Ok(sl) = slopes(&landmarks, camera) {
        println!("slopes: s = {}, s1 = {}, s2 = {}", sl.s, sl.s1, sl.s2);
        match multiplicity {
            Multiplicity::One if sl.s1.abs().max(sl.s2.abs()) >= sl.s.abs() => {
                println!("reason: condition (a), max(|s1|, |s2|) >= |s|");
            }
            Multiplicity::One => {
                println!("reason: condition (b), camera on the double-root plane");
            }
            _ => {}
        }
        println!("on_plane_l: {}", on_plane_l(&landmarks, camera));
    }
    EXIT_OK
}

fn cmd_synth(
    path: &Path,
    out: Option<&Path>,
    noise_seed: Option<u64>,
    cone_deg: f64,
    accel_noise: f64,
) -> i32 {
    let mut scene = match load_scene(path) {
        Ok(s) => s,
        Err(e) => return input_error(e),
    };
    let landmarks = match scene.landmark_pair() {
        Ok(l) => l,
        Err(e) => return input_error(e.to_string()),
    };
    let pose = match scene.camera_pose(&landmarks) {
        Ok(p) => p,
        Err(e) => return input_error(e.to_string()),
    };
    let noise = noise_seed.map(|seed| NoiseModel {
        direction_cone_radius: cone_deg.to_radians(),
        accel_noise_half_width: accel_noise,
        rng_seed: seed,
    });
    let mut rng = ChaCha8Rng::seed_from_u64(noise.map(|n| n.rng_seed).unwrap_or(0));
    let obs = match synthesize_observation(&pose, &landmarks, noise.as_ref(), &mut rng) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_SINGULAR;
        }
    };
    scene.observation = Some(ObservationSpec::Vectors {
        v1: obs.v1.into_inner().into(),
        v2: obs.v2.into_inner().into(),
        u: obs.u.into_inner().into(),
    });
    // Keep the rotation that was actually used so the scene round-trips.
    let m = pose.rotation.matrix();
    scene.camera = Some(CameraSpec {
        position: pose.position.into(),
        rotation: Some([
            [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
            [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
            [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
        ]),
    });
    let text = scene.to_toml();
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                return input_error(format!("cannot write {}: {e}", path.display()));
            }
        }
        None => print!("{text}"),
    }
    EXIT_OK
}

fn cmd_simulate(config_path: &Path, out: &Path) -> i32 {
    let text = match std::fs::read_to_string(config_path) {
        Ok(t) => t,
        Err(e) => return input_error(format!("cannot read {}: {e}", config_path.display())),
    };
    let config = match SweepConfigFile::parse(&text).and_then(|f| f.to_sweep_config()) {
        Ok(c) => c,
        Err(e) => return input_error(format!("{}: {e}", config_path.display())),
    };
    let rows = match run_sweep(&config) {
        Ok(r) => r,
        Err(e) => return input_error(e.to_string()),
    };
    let mut buffer = Vec::new();
    write_csv(&rows, &mut buffer).expect("writing to memory cannot fail");
    if let Err(e) = std::fs::write(out, &buffer) {
        return input_error(format!("cannot write {}: {e}", out.display()));
    }
    print_summary(&rows);
    EXIT_OK
}

fn print_summary(rows: &[SweepRow]) {
    if let Some(best) = rows
        .iter()
        .filter(|r| r.rms_total_mm.is_finite())
        .min_by(|a, b| a.rms_total_mm.partial_cmp(&b.rms_total_mm).unwrap())
    {
        println!(
            "min rms {:.4} mm at altitude {:.4} mm",
            best.rms_total_mm, best.altitude_mm
        );
    }
    match rows
        .iter()
        .find(|r| r.rms_total_mm.is_finite() && r.rms_total_mm < 20.0)
    {
        Some(row) => println!(
            "rms first drops below 20 mm at altitude {:.4} mm",
            row.altitude_mm
        ),
        None => println!("rms never drops below 20 mm"),
    }
}
