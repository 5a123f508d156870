//! End-to-end acceptance gate. Each test prints a single PASS line on
//! success; a failure panics with the offending configuration so the run is
//! reproducible (all randomness is seeded).
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::time::Instant;

use nalgebra::{Rotation3, Vector3};
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use p2pa::classify::{
    discriminant_closed_form, detect_singular, multiplicity_from_ground_truth, LandmarkPair,
    Multiplicity, SingularCase,
};
use p2pa::geom::{angle_distance, reduce_to_angles, ObservationAngles};
use p2pa::sim::{run_sweep, synthesize_exact, AltitudeSpacing, NoiseModel, SweepConfig};
use p2pa::solver::{
    angles_from_position, quadratic_coeffs, solve_coaltitude, solve_distances, solve_labeled,
    solve_unlabeled, SolverParams,
};
use p2pa::CameraPose;

type Vec3 = Vector3<f64>;

const REJECT_MM: f64 = 1.0;

fn point_in_box<R: Rng>(rng: &mut R, half: f64) -> Vec3 {
    Vec3::new(
        rng.random_range(-half..half),
        rng.random_range(-half..half),
        rng.random_range(-half..half),
    )
}

fn distance_to_line(p: Vec3, a: Vec3, b: Vec3) -> f64 {
    let dir = (b - a).normalize();
    let rel = p - a;
    (rel - rel.dot(&dir) * dir).norm()
}

/// Rejection-samples a ground-truth configuration at least `REJECT_MM` from
/// every singular family: landmarks in a 1 m box, camera in a 2 m box.
fn sample_config<R: Rng>(rng: &mut R) -> (LandmarkPair, CameraPose) {
    loop {
        let m1 = point_in_box(rng, 500.0);
        let m2 = point_in_box(rng, 500.0);
        let c = point_in_box(rng, 1000.0);
        if (m2 - m1).norm() < REJECT_MM {
            continue;
        }
        // Vertical landmark line.
        if (m2.xy() - m1.xy()).norm() < REJECT_MM {
            continue;
        }
        // Colinear camera (covers camera-at-landmark too).
        if distance_to_line(c, m1, m2) < REJECT_MM {
            continue;
        }
        // Horizontally coplanar: all three altitudes nearly equal.
        if (m1.z - m2.z).abs() < 2.0 * REJECT_MM
            && (c.z - 0.5 * (m1.z + m2.z)).abs() < 2.0 * REJECT_MM
        {
            continue;
        }
        let pair = LandmarkPair::new(m1, m2).unwrap();
        // The One/Two boundary surfaces |s_i| = |s| are where the second
        // solution degenerates onto a landmark (a point of the colinear
        // singular set), so the >= 1 mm clearance extends to them: keep a
        // relative margin in slope space.
        let sl = p2pa::classify::slopes(&pair, c).unwrap();
        let margin = 1e-2 * (1.0 + sl.s.abs());
        if (sl.s1.abs() - sl.s.abs()).abs() < margin
            || (sl.s2.abs() - sl.s.abs()).abs() < margin
        {
            continue;
        }
        let rotation = Rotation3::from_euler_angles(
            rng.random_range(-0.6..0.6),
            rng.random_range(-0.6..0.6),
            rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
        );
        return (pair, CameraPose { position: c, rotation });
    }
}

fn expected_count(m: Multiplicity) -> usize {
    match m {
        Multiplicity::One => 1,
        Multiplicity::Two => 2,
        Multiplicity::Infinite(case) => panic!("rejection sampling let through {case}"),
    }
}

/// Criteria 1-4 share one 10,000-configuration sample, so they run in a
/// single test body (the sample is cheap, the independence is in the
/// assertions).
#[test]
fn criteria_1_to_4_roundtrip_multiplicity_unlabeled() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE97);
    let params = SolverParams::default();
    let n = 10_000;
    let start = Instant::now();
    let mut two_cases = 0usize;

    for trial in 0..n {
        let (pair, pose) = sample_config(&mut rng);
        let obs = synthesize_exact(&pose, &pair).unwrap();
        let observed = reduce_to_angles(&obs);

        let out = solve_labeled(&obs, &pair, &params)
            .unwrap_or_else(|e| panic!("trial {trial}: solve failed: {e}"));
        let poses = out.poses();

        // Criterion 2: pose count equals the ground-truth multiplicity.
        let mult = multiplicity_from_ground_truth(&pair, pose.position).unwrap();
        assert_eq!(
            poses.len(),
            expected_count(mult),
            "trial {trial}: count mismatch for camera {:?} landmarks {:?}/{:?}",
            pose.position,
            pair.m1(),
            pair.m2()
        );

        // Criterion 1: some returned pose matches ground truth tightly.
        let best = poses
            .iter()
            .min_by(|a, b| {
                let da = (a.position - pose.position).norm();
                let db = (b.position - pose.position).norm();
                da.partial_cmp(&db).unwrap()
            })
            .unwrap();
        let pos_err = (best.position - pose.position).norm();
        let rot_err = (best.rotation.matrix() - pose.rotation.matrix()).norm();
        assert!(
            pos_err < 1e-6,
            "trial {trial}: position error {pos_err} for camera {:?}",
            pose.position
        );
        assert!(
            rot_err < 1e-8,
            "trial {trial}: rotation error {rot_err} for camera {:?}",
            pose.position
        );

        // Criterion 3: in Two cases both poses re-synthesize the angles.
        if poses.len() == 2 {
            two_cases += 1;
            for p in poses {
                let re = angles_from_position(&pair, p.position).unwrap();
                assert!((re.rho1 - observed.rho1).abs() < 1e-9, "trial {trial}: rho1");
                assert!((re.rho2 - observed.rho2).abs() < 1e-9, "trial {trial}: rho2");
                assert!(
                    angle_distance(re.beta, observed.beta) < 1e-9,
                    "trial {trial}: beta"
                );
            }
            // Criterion 4 (Lemma part): the swapped labeling is infeasible.
            let swapped = solve_labeled(&obs.swapped(), &pair, &params).unwrap();
            assert_eq!(
                swapped.poses().len(),
                0,
                "trial {trial}: swapped labeling of a Two case returned poses"
            );
        }

        // Criterion 4 (bound part): never more than two unlabeled poses.
        let un = solve_unlabeled(&obs, &pair, &params).unwrap();
        assert!(
            un.poses().len() <= 2,
            "trial {trial}: unlabeled returned {} poses",
            un.poses().len()
        );
    }

    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "criterion 1 runtime {elapsed:?} exceeds 10 s"
    );
    assert!(two_cases > 0, "sample never exercised the two-solution region");
    println!("criterion 1 (round-trip exactness, {n} configs, {elapsed:.2?}): PASS");
    println!("criterion 2 (multiplicity conformance): PASS");
    println!("criterion 3 (two-solution forward check, {two_cases} cases): PASS");
    println!("criterion 4 (unlabeled bound + swapped-labeling lemma): PASS");
}

#[test]
fn criterion_5_discriminant_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE97 + 5);
    let mut checked = 0usize;
    while checked < 1_000 {
        let a = rng.random_range(10.0f64..500.0);
        let mut b = rng.random_range(-500.0f64..500.0);
        if b.abs() < 1.0 {
            b = b.signum() * 1.0 + b;
        }
        let c = point_in_box(&mut rng, 800.0);
        // Canonical frame: landmarks at (-a, 0, -b) and (a, 0, b).
        let pair = LandmarkPair::new(Vec3::new(-a, 0.0, -b), Vec3::new(a, 0.0, b)).unwrap();
        if distance_to_line(c, pair.m1(), pair.m2()) < REJECT_MM {
            continue;
        }
        let Ok(closed) = discriminant_closed_form(a, b, c) else {
            continue;
        };
        let angles = match angles_from_position(&pair, c) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let q = match quadratic_coeffs(&angles, 1, pair.height_difference(), pair.horizontal_distance()) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let disc = q.discriminant();
        let scale = disc.abs().max(closed.abs()).max(1e-12);
        assert!(
            (disc - closed).abs() <= 1e-6 * scale,
            "a={a} b={b} c={c:?}: disc {disc} vs closed form {closed}"
        );
        checked += 1;
    }
    println!("criterion 5 (discriminant closed form, {checked} configs): PASS");
}

#[test]
fn criterion_6_singular_detection() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE97 + 6);
    let n = 1_000;

    // Hand-built subcases of the colinear family first.
    let wide = LandmarkPair::new(Vec3::zeros(), Vec3::new(150.0, 0.0, 0.0)).unwrap();
    assert_eq!(
        detect_singular(&wide, &ObservationAngles::new(0.4, 0.4, 0.0)),
        Some(SingularCase::Colinear),
        "beta=0, rho1=rho2 subcase"
    );
    assert_eq!(
        detect_singular(
            &wide,
            &ObservationAngles::new(0.4, std::f64::consts::PI - 0.4, std::f64::consts::PI)
        ),
        Some(SingularCase::Colinear),
        "beta=pi, rho1=pi-rho2 subcase"
    );

    // Colinear: camera on the landmark line.
    for trial in 0..n {
        let (pair, camera) = loop {
            let m1 = point_in_box(&mut rng, 500.0);
            let m2 = point_in_box(&mut rng, 500.0);
            if (m2 - m1).norm() < REJECT_MM || (m2.xy() - m1.xy()).norm() < REJECT_MM {
                continue;
            }
            let t: f64 = rng.random_range(-2.0..3.0);
            if t.abs() < 1e-3 || (t - 1.0).abs() < 1e-3 {
                continue;
            }
            break (LandmarkPair::new(m1, m2).unwrap(), m1 + t * (m2 - m1));
        };
        let angles = angles_from_position(&pair, camera).unwrap();
        assert_eq!(
            detect_singular(&pair, &angles),
            Some(SingularCase::Colinear),
            "colinear trial {trial}: camera {camera:?}"
        );
    }

    // Vertical landmark line: any camera off the line sees beta = 0.
    for trial in 0..n {
        let (pair, camera) = loop {
            let m1 = point_in_box(&mut rng, 500.0);
            let dz: f64 = rng.random_range(-300.0f64..300.0);
            if dz.abs() < REJECT_MM {
                continue;
            }
            let m2 = m1 + Vec3::new(0.0, 0.0, dz);
            let c = point_in_box(&mut rng, 1000.0);
            if (c.xy() - m1.xy()).norm() < REJECT_MM {
                continue;
            }
            break (LandmarkPair::new(m1, m2).unwrap(), c);
        };
        let angles = angles_from_position(&pair, camera).unwrap();
        assert_eq!(
            detect_singular(&pair, &angles),
            Some(SingularCase::VerticalLandmarkLine),
            "vertical trial {trial}: camera {camera:?}"
        );
    }

    // Horizontally coplanar: all three points share an altitude.
    for trial in 0..n {
        let (pair, camera) = loop {
            let z: f64 = rng.random_range(-500.0f64..500.0);
            let m1 = Vec3::new(
                rng.random_range(-500.0f64..500.0),
                rng.random_range(-500.0f64..500.0),
                z,
            );
            let m2 = Vec3::new(
                rng.random_range(-500.0f64..500.0),
                rng.random_range(-500.0f64..500.0),
                z,
            );
            if (m2 - m1).norm() < REJECT_MM {
                continue;
            }
            let c = Vec3::new(
                rng.random_range(-1000.0f64..1000.0),
                rng.random_range(-1000.0f64..1000.0),
                z,
            );
            if distance_to_line(c, m1, m2) < REJECT_MM {
                continue;
            }
            break (LandmarkPair::new(m1, m2).unwrap(), c);
        };
        let angles = angles_from_position(&pair, camera).unwrap();
        assert_eq!(
            detect_singular(&pair, &angles),
            Some(SingularCase::HorizontalCoplanar),
            "coplanar trial {trial}: camera {camera:?}"
        );
    }

    println!("criterion 6 (singular detection, 3x{n} members): PASS");
}

#[test]
fn criterion_7_simulation_reproduction() {
    let start = Instant::now();
    let pair = LandmarkPair::new(Vec3::zeros(), Vec3::new(150.0, 0.0, 0.0)).unwrap();
    let placements = [("left", [0.0, -500.0]), ("center", [75.0, -500.0])];

    for (name, horizontal) in placements {
        let config = SweepConfig {
            landmarks: pair,
            camera_horizontal: horizontal,
            altitude_range: (0.001, 500.0),
            num_positions: 200,
            samples_per_position: 500,
            noise: NoiseModel::reference(7),
            spacing: AltitudeSpacing::Logarithmic,
        };
        let rows = run_sweep(&config).unwrap();

        let nearest = |target: f64| {
            rows.iter()
                .min_by(|a, b| {
                    (a.altitude_mm - target)
                        .abs()
                        .partial_cmp(&(b.altitude_mm - target).abs())
                        .unwrap()
                })
                .unwrap()
        };

        // (a) rms_total at 1 mm altitude within the paper band.
        let at_1mm = nearest(1.0);
        assert!(
            (200.0..=600.0).contains(&at_1mm.rms_total_mm),
            "{name}: rms_total at ~1 mm = {} mm",
            at_1mm.rms_total_mm
        );

        // (b) first altitude where rms_total < 20 mm lies in [20, 60] mm.
        let threshold = rows
            .iter()
            .find(|r| r.rms_total_mm < 20.0)
            .unwrap_or_else(|| panic!("{name}: rms never drops below 20 mm"));
        assert!(
            (20.0..=60.0).contains(&threshold.altitude_mm),
            "{name}: 20 mm threshold at altitude {} mm",
            threshold.altitude_mm
        );

        // (c) altitude error stays bounded even near the singularity.
        for r in rows.iter().filter(|r| r.altitude_mm >= 0.5) {
            assert!(
                r.rms_z_mm < 10.0,
                "{name}: rms_z = {} mm at altitude {} mm",
                r.rms_z_mm,
                r.altitude_mm
            );
        }

        // (d) the x-error dominates at 50 mm altitude.
        let at_50mm = nearest(50.0);
        assert!(
            at_50mm.rms_x_mm > at_50mm.rms_y_mm,
            "{name}: rms_x {} <= rms_y {} at ~50 mm",
            at_50mm.rms_x_mm,
            at_50mm.rms_y_mm
        );
    }

    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 120.0,
        "criterion 7 runtime {elapsed:?} exceeds 2 min"
    );
    println!("criterion 7 (simulation reproduction, {elapsed:.2?}): PASS");
}

#[test]
fn criterion_8_coaltitude_fast_path() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE97 + 8);
    let n = 10_000;
    let mut checked = 0usize;
    while checked < n {
        let d = rng.random_range(10.0f64..1000.0);
        let pair = LandmarkPair::new(Vec3::zeros(), Vec3::new(d, 0.0, 0.0)).unwrap();
        let camera = Vec3::new(
            rng.random_range(-1000.0f64..1000.0),
            rng.random_range(-1000.0f64..1000.0),
            rng.random_range(-1000.0f64..1000.0),
        );
        if camera.z.abs() < REJECT_MM || distance_to_line(camera, pair.m1(), pair.m2()) < REJECT_MM
        {
            continue;
        }
        let angles = angles_from_position(&pair, camera).unwrap();
        let fast = match solve_coaltitude(&angles, d) {
            Ok(v) => v,
            Err(_) => continue, // mixed-hemisphere inputs are out of the fast path's domain
        };
        let general = solve_distances(&angles, &pair).unwrap();
        assert_eq!(general.len(), 1, "co-altitude input must be unique");
        let g = &general[0];
        let scale = d.max(camera.norm());
        for (a, b, what) in [
            (fast.d1, g.d1, "d1"),
            (fast.d2, g.d2, "d2"),
            (fast.h1, g.h1, "h1"),
            (fast.h2, g.h2, "h2"),
        ] {
            assert!(
                (a - b).abs() <= 1e-9 * scale,
                "camera {camera:?} d={d}: {what} fast={a} general={b}"
            );
        }
        checked += 1;
    }
    println!("criterion 8 (co-altitude fast path, {checked} configs): PASS");
}
