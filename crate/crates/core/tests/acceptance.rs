//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

mod common;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qvpath::analysis::{
    backward_shift_check, covering_peak_check, detect_peaks, evolution_shift_check, find_covering_n,
    origin_suppression_check, total_variation, DEFAULT_MIN_HEIGHT_FRACTION,
};
use qvpath::engine::{brute_force_qvp, build_qvp, distribution, equivalence_set, gaussian_reference, step_size};
use qvpath::lorentz::{boost_interval, compose_boosts, Boost, Interval};
use qvpath::models::{build_symmetric, build_tviolating};
use qvpath::symmetry::{backward_step, forward_step, parity_operator, unwind_forward, Lattice, TranslationGenerator};

type Outcome = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn unit_lattice_for(lambda: f64, n_max: usize) -> Lattice {
    let needed = 8.0 * 2.0 * lambda * (2.0 * n_max as f64).sqrt();
    Lattice::new((needed.ceil() as usize + 2) | 1, 1.0).expect("odd positive")
}

fn gaussian_lattice() -> Lattice {
    Lattice::new(513, 2.0 * step_size(100, 1.0).unwrap()).unwrap()
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let lattice = Lattice::new(65, 1.0).map_err(err)?;
    let mut worst: f64 = 0.0;
    for model in [build_symmetric(lattice), build_tviolating(lattice, 0.2).map_err(err)?] {
        for n in 1..=10 {
            let params = model.params(n, 1.0).map_err(err)?;
            let fast = build_qvp(&params, model.forward(), model.backward()).map_err(err)?;
            let slow = brute_force_qvp(&params, model.forward(), model.backward()).map_err(err)?;
            worst = worst.max(fast.amplitudes().max_abs_diff(slow.amplitudes()).map_err(err)?);
        }
    }
    let elapsed = start.elapsed();
    ensure(
        worst < 1e-10 && elapsed < Duration::from_secs(30),
        format!("D=65 max diff {worst:.3e} (< 1e-10), {:.2}s (< 30s)", elapsed.as_secs_f64()),
    )
}

fn gaussian_limit() -> Outcome {
    let start = Instant::now();
    let lattice = gaussian_lattice();
    let model = build_symmetric(lattice);
    let reference = gaussian_reference(1.0, &lattice).map_err(err)?;
    let mut tv = Vec::new();
    for n in [100, 1000, 10_000] {
        tv.push(total_variation(&distribution(&model.build_qvp(n, 1.0).map_err(err)?), &reference).map_err(err)?);
    }
    let elapsed = start.elapsed();
    ensure(
        lattice.extent() >= 16.0
            && tv[0] > tv[1]
            && tv[1] > tv[2]
            && tv[2] < 0.01
            && elapsed < Duration::from_secs(120),
        format!(
            "D=513 extent {:.1}, TV {:.3e} > {:.3e} > {:.3e} (< 1e-2), {:.2}s (< 120s)",
            lattice.extent(),
            tv[0],
            tv[1],
            tv[2],
            elapsed.as_secs_f64()
        ),
    )
}

fn twin_peak_law() -> Outcome {
    let lattice = unit_lattice_for(0.1, 10_000);
    let model = build_tviolating(lattice, 0.1).map_err(err)?;
    let mut worst: f64 = 0.0;
    let mut counts = Vec::new();
    for n in [1000, 2000, 4000, 8000] {
        let report = detect_peaks(&distribution(&model.build_qvp(n, 1.0).map_err(err)?), DEFAULT_MIN_HEIGHT_FRACTION)
            .map_err(err)?;
        let predicted = model.predicted_separation(n, 1.0).expect("built-in model");
        worst = worst.max((report.separation - predicted).abs() / predicted);
        counts.push(report.peaks.len());
    }
    let suppression = origin_suppression_check(&distribution(&model.build_qvp(10_000, 1.0).map_err(err)?));
    ensure(
        counts.iter().all(|&c| c == 2) && worst < 0.01 && suppression < 0.01,
        format!("peaks {counts:?} (all 2), max rel error {worst:.3e} (< 1e-2), origin {suppression:.3e} at N=1e4 (< 1e-2)"),
    )
}

fn symmetric_localization() -> Outcome {
    let lattice = gaussian_lattice();
    let model = build_symmetric(lattice);
    let mut detail = Vec::new();
    let mut ok = true;
    for n in [100, 1000, 10_000] {
        let report = detect_peaks(&distribution(&model.build_qvp(n, 1.0).map_err(err)?), DEFAULT_MIN_HEIGHT_FRACTION)
            .map_err(err)?;
        let center = report.peaks.first().map_or(f64::NAN, |p| p.center);
        ok &= report.peaks.len() == 1 && center.abs() <= lattice.spacing();
        detail.push(format!("N={n}: {} peak at {center:.2e}", report.peaks.len()));
    }
    ensure(ok, format!("{} (within {:.4})", detail.join(", "), lattice.spacing()))
}

fn equivalence_set_indistinguishable() -> Outcome {
    let model = build_symmetric(Lattice::new(129, 0.25).map_err(err)?);
    let members: Vec<usize> = equivalence_set(1.0, 0.02).map_err(err)?.take(5).collect();
    let dists = members
        .iter()
        .map(|&n| model.build_qvp(n, 1.0).map(|s| distribution(&s)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    let mut worst: f64 = 0.0;
    for (i, a) in dists.iter().enumerate() {
        for b in &dists[i + 1..] {
            worst = worst.max(total_variation(a, b).map_err(err)?);
        }
    }
    ensure(
        members[0] == 5000 && worst < 0.02,
        format!("N = {members:?}, max pairwise TV {worst:.3e} (< 2e-2)"),
    )
}

fn evolution_contract() -> Outcome {
    let model = build_tviolating(Lattice::new(33, 1.0).map_err(err)?, 0.1).map_err(err)?;
    let v = model.default_initial();
    let a = 1.0;
    let round = unwind_forward(&forward_step(v, model.forward(), a).map_err(err)?, model.forward(), a).map_err(err)?;
    let identity = round.max_abs_diff(v).map_err(err)?;
    let mixed = backward_step(&forward_step(v, model.forward(), a).map_err(err)?, model.backward(), a).map_err(err)?;
    let deviation = mixed.max_abs_diff(v).map_err(err)?;
    ensure(
        identity < 1e-12 && deviation > 1e-6,
        format!("unwind o forward {identity:.3e} (< 1e-12), backward o forward {deviation:.3e} (> 1e-6)"),
    )
}

fn evolution_and_arrow() -> Outcome {
    let lattice = Lattice::new(205, 1.0).map_err(err)?;
    let model = build_tviolating(lattice, 0.1).map_err(err)?;
    let state = model.build_qvp(4000, 1.0).map_err(err)?;
    let mut worst: f64 = 0.0;
    let mut arrow = true;
    for tau in [1.0, 5.0, 10.0].map(|k| k * lattice.spacing()) {
        let fwd = evolution_shift_check(&state, &model, tau).map_err(err)?;
        let back = backward_shift_check(&state, &model, tau).map_err(err)?;
        worst = worst.max(fwd.max_error()).max(back.max_error());
        arrow &= fwd.passed() && back.passed();
        arrow &= fwd.shifts.iter().all(|&s| s > 0.0) && back.shifts.iter().all(|&s| s < 0.0);
    }
    let n = find_covering_n(10.0, 0.1, 1.0).map_err(err)?;
    let cover = covering_peak_check(&model, 10.0, 1.0).map_err(err)?;
    ensure(
        arrow && n == 5000 && cover.passed,
        format!(
            "max shift error {worst:.3e} (<= {}), covering N {n} (= 5000), peak at {:.4} width {:.4}",
            lattice.spacing(),
            cover.peak.center,
            cover.peak.width
        ),
    )
}

fn symmetry_identities() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in [9, 33, 65] {
        let lattice = Lattice::new(d, 1.0).map_err(err)?;
        let p = TranslationGenerator::new(lattice);
        let pp = parity_operator(&lattice).conjugate_matrix(p.matrix()).map_err(err)?;
        worst = worst.max(pp.add(p.matrix()).map_err(err)?.max_abs());
        let model = build_tviolating(lattice, 0.1).map_err(err)?;
        worst = worst.max(model.symmetry_relation_error().map_err(err)?);
        let symmetric = build_symmetric(lattice);
        let t = symmetric.time_reversal().expect("built-in");
        worst = worst.max(t.conjugate_matrix(p.matrix()).map_err(err)?.max_abs_diff(p.matrix()).map_err(err)?);
    }
    ensure(worst < 1e-10, format!("max deviation {worst:.3e} over D = 9, 33, 65 (< 1e-10)"))
}

fn lorentz_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1905);
    let mut invariant: f64 = 0.0;
    let mut composition: f64 = 0.0;
    for _ in 0..1000 {
        let c = rng.random_range(0.5..3.0);
        let i = Interval::new(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0) / c);
        let b1 = Boost::new(rng.random_range(-0.9..0.9) * c, c).map_err(err)?;
        let b2 = Boost::new(rng.random_range(-0.9..0.9) * c, c).map_err(err)?;
        let scale = i.dx * i.dx + c * c * i.dt * i.dt;
        let once = boost_interval(i, b1);
        invariant = invariant.max((once.invariant(c) - i.invariant(c)).abs() / scale);
        let twice = boost_interval(once, b2);
        let direct = boost_interval(i, compose_boosts(b1, b2).map_err(err)?);
        let size = scale.sqrt();
        composition = composition.max((twice.dx - direct.dx).abs() / size).max(c * (twice.dt - direct.dt).abs() / size);
    }
    ensure(
        invariant < 1e-12 && composition < 1e-12,
        format!("relative invariant drift {invariant:.3e}, composition mismatch {composition:.3e} (< 1e-12)"),
    )
}

fn run(args: &[&str]) -> Result<std::process::Output, String> {
    Command::new(env!("CARGO_BIN_EXE_qvpath")).args(args).output().map_err(err)
}

fn read(dir: &Path, name: &str) -> Result<Vec<u8>, String> {
    std::fs::read(dir.join(name)).map_err(err)
}

fn cli_determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(err)?;
    let mut ok = true;
    let mut notes = Vec::new();
    for (cmd, file, extra) in [
        ("simulate", "distribution.csv", ["--model", "tviolating", "--lambda", "0.1", "--n", "600", "--sigma", "1"]),
        ("sweep", "sweep.csv", ["--model", "tviolating", "--lambda", "0.1", "--n", "100,200,400", "--sigma", "1"]),
    ] {
        let mut outputs = Vec::new();
        for run_id in ["a", "b"] {
            let dir = tmp.path().join(format!("{cmd}-{run_id}"));
            let dir_str = dir.to_str().ok_or("non-utf8 temp path")?;
            let mut args = vec![cmd];
            args.extend(extra);
            args.extend(["--out-dir", dir_str]);
            let out = run(&args)?;
            ok &= out.status.success();
            outputs.push(read(&dir, file)?);
        }
        let same = outputs[0] == outputs[1];
        ok &= same;
        notes.push(format!("{cmd} {} bytes identical={same}", outputs[0].len()));
    }
    let verify = run(&["verify"])?;
    ok &= verify.status.code() == Some(0);
    notes.push(format!("verify exit {:?}", verify.status.code()));
    ensure(ok, notes.join(", "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("oracle equivalence", oracle_equivalence),
        ("Gaussian limit", gaussian_limit),
        ("twin-peak law", twin_peak_law),
        ("symmetric localization", symmetric_localization),
        ("equivalence-set indistinguishability", equivalence_set_indistinguishable),
        ("evolution contract", evolution_contract),
        ("emergent evolution and double-headed arrow", evolution_and_arrow),
        ("symmetry-operator identities", symmetry_identities),
        ("Lorentz invariance", lorentz_invariance),
        ("CLI determinism", cli_determinism),
    ];
    let mut failures = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} criterion {:>2} {name}: {detail} [{:.1}s]", k + 1, start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
