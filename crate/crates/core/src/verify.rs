//! Self-check suite behind `qvpath verify`: every module invariant at a
//! size that runs in seconds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{
    backward_shift_check, detect_peaks, evolution_shift_check, separation_sweep, total_variation,
    DEFAULT_MIN_HEIGHT_FRACTION,
};
use crate::engine::{brute_force_qvp, build_qvp, distribution, equivalence_set, gaussian_reference, step_operator, step_size};
use crate::linalg::{C64, ComplexMatrix, ComplexVector, HermitianGenerator};
use crate::lorentz::{boost_interval, compose_boosts, Boost, Interval};
use crate::models::{build_symmetric, build_tviolating, sigma_x};
use crate::symmetry::{
    backward_step, conjugate_generator, forward_step, parity_operator, time_reversal_operator, translate_state,
    unwind_forward, Lattice, TranslationGenerator,
};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub measured: f64,
    pub threshold: String,
}

impl std::fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} {:<44} measured={:.6e} ({})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.threshold
        )
    }
}

fn below(name: &'static str, measured: f64, limit: f64) -> CheckOutcome {
    CheckOutcome { name, passed: measured < limit, measured, threshold: format!("< {limit:e}") }
}

fn above(name: &'static str, measured: f64, limit: f64) -> CheckOutcome {
    CheckOutcome { name, passed: measured > limit, measured, threshold: format!("> {limit:e}") }
}

fn flag(name: &'static str, ok: bool, measured: f64, what: &str) -> CheckOutcome {
    CheckOutcome { name, passed: ok, measured, threshold: what.to_string() }
}

fn failed(name: &'static str, err: impl std::fmt::Display) -> CheckOutcome {
    CheckOutcome { name, passed: false, measured: f64::NAN, threshold: format!("error: {err}") }
}

macro_rules! attempt {
    ($name:expr, $body:expr) => {
        match (|| -> Result<CheckOutcome, Box<dyn std::error::Error>> { Ok($body) })() {
            Ok(c) => c,
            Err(e) => failed($name, e),
        }
    };
}

/// Runs every check, printing nothing; callers decide how to report.
pub fn run_suite() -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    out.extend(linalg_checks());
    out.extend(symmetry_checks());
    out.extend(engine_checks());
    out.extend(model_checks());
    out.extend(analysis_checks());
    out.extend(lorentz_checks());
    out
}

fn seeded_hermitian(n: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = ComplexMatrix::from_fn(n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    a.add(&a.dagger()).expect("same dim").scale(C64::new(0.5, 0.0))
}

fn linalg_checks() -> Vec<CheckOutcome> {
    let w = HermitianGenerator::new(seeded_hermitian(64, 2024)).expect("Hermitian by construction");
    let (a, b) = (0.7, -0.25);
    let group = w
        .exponential(a)
        .matmul(&w.exponential(b))
        .and_then(|m| m.max_abs_diff(&w.exponential(a + b)))
        .unwrap_or(f64::INFINITY);
    let adjoint = w.exponential(a).dagger().max_abs_diff(&w.exponential(-a)).unwrap_or(f64::INFINITY);
    vec![
        below("linalg: eigen reconstruction (64x64)", w.reconstruction_error(), 1e-10),
        below("linalg: eigenvector unitarity", w.eigenvectors().unitarity_deviation(), 1e-10),
        below("linalg: exponential group law", group, 1e-10),
        below("linalg: exponential adjoint", adjoint, 1e-10),
    ]
}

fn symmetry_checks() -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    let mut parity_worst: f64 = 0.0;
    let mut treversal_worst: f64 = 0.0;
    for sites in [9, 33, 65] {
        let l = Lattice::new(sites, 0.5).expect("odd");
        let p = TranslationGenerator::new(l);
        let par = parity_operator(&l);
        let t = time_reversal_operator(&l, None).expect("no internal factor");
        parity_worst = parity_worst.max(
            par.conjugate_matrix(p.matrix())
                .and_then(|m| Ok(m.max_abs_diff(&p.matrix().scale(C64::new(-1.0, 0.0)))?))
                .unwrap_or(f64::INFINITY),
        );
        treversal_worst = treversal_worst.max(
            t.conjugate_matrix(p.matrix())
                .and_then(|m| Ok(m.max_abs_diff(p.matrix())?))
                .unwrap_or(f64::INFINITY),
        );
    }
    out.push(below("symmetry: P p P^-1 = -p", parity_worst, 1e-10));
    out.push(below("symmetry: T p T^-1 = +p", treversal_worst, 1e-10));

    let l = Lattice::new(33, 0.5).expect("odd");
    let p = TranslationGenerator::new(l);
    out.push(attempt!("symmetry: translations compose additively", {
        let v = l.position_state(-3);
        let two = translate_state(&translate_state(&v, &p, 0.8)?, &p, 1.3)?;
        let one = translate_state(&v, &p, 2.1)?;
        below("symmetry: translations compose additively", two.max_abs_diff(&one)?, 1e-10)
    }));

    let lambda = 0.3;
    let m = build_tviolating(l, lambda).expect("|lambda| < 1");
    let t = m.time_reversal().expect("built-in").clone();
    out.push(attempt!("symmetry: conjugation is an involution", {
        let twice = conjugate_generator(&conjugate_generator(m.forward(), &t)?, &t)?;
        below("symmetry: conjugation is an involution", twice.matrix().max_abs_diff(m.forward().matrix())?, 1e-10)
    }));
    out.push(attempt!("symmetry: T e^{-iaW} T^-1 = e^{+ia TWT^-1}", {
        let a = 0.37;
        let lhs = t.conjugate_matrix(&m.forward().exponential(-a))?;
        let rhs = conjugate_generator(m.forward(), &t)?.exponential(a);
        below("symmetry: T e^{-iaW} T^-1 = e^{+ia TWT^-1}", lhs.max_abs_diff(&rhs)?, 1e-10)
    }));

    let tv = build_tviolating(Lattice::new(65, 0.5).expect("odd"), 0.1).expect("valid");
    let v = tv.default_initial().clone();
    out.push(attempt!("symmetry: unwind o forward = identity", {
        let f = forward_step(&v, tv.forward(), 0.05)?;
        below("symmetry: unwind o forward = identity", unwind_forward(&f, tv.forward(), 0.05)?.max_abs_diff(&v)?, 1e-12)
    }));
    out.push(attempt!("symmetry: backward o forward != identity", {
        let f = forward_step(&v, tv.forward(), 0.05)?;
        above(
            "symmetry: backward o forward != identity",
            backward_step(&f, tv.backward(), 0.05)?.sub(&v)?.norm(),
            1e-6,
        )
    }));
    out
}

fn engine_checks() -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    let l = Lattice::new(33, 0.5).expect("odd");
    out.push(attempt!("engine: oracle equivalence N <= 10", {
        let mut worst: f64 = 0.0;
        for model in [build_symmetric(l), build_tviolating(l, 0.2)?] {
            for n in 1..=10 {
                let params = model.params(n, 1.0)?;
                let a = build_qvp(&params, model.forward(), model.backward())?;
                let b = brute_force_qvp(&params, model.forward(), model.backward())?;
                worst = worst.max(a.amplitudes().max_abs_diff(b.amplitudes())?);
            }
        }
        below("engine: oracle equivalence N <= 10", worst, 1e-10)
    }));
    out.push(attempt!("engine: step operator is a contraction", {
        let m = build_tviolating(l, 0.2)?;
        let s = step_operator(m.forward(), m.backward(), step_size(40, 1.0)?)?;
        let mut v = m.default_initial().clone();
        let mut prev = v.norm();
        let mut increase: f64 = 0.0;
        for _ in 0..40 {
            v = s.apply(&v)?;
            increase = increase.max(v.norm() - prev);
            prev = v.norm();
        }
        flag("engine: step operator is a contraction", increase <= 1e-15, increase, "norm never increases")
    }));
    out.push(attempt!("engine: symmetric distribution is even", {
        let d = distribution(&build_symmetric(l).build_qvp(50, 1.0)?);
        below("engine: symmetric distribution is even", mirror_asymmetry(d.masses()), 1e-10)
    }));

    let gl = Lattice::new(129, 2.0 * step_size(100, 1.0).expect("valid"))
        .expect("odd");
    let sym = build_symmetric(gl);
    out.push(attempt!("engine: Gaussian limit, TV decreasing in N", {
        let reference = gaussian_reference(1.0, &gl)?;
        let tvs: Vec<f64> = [100, 1000, 10000]
            .into_iter()
            .map(|n| Ok(total_variation(&distribution(&sym.build_qvp(n, 1.0)?), &reference)?))
            .collect::<Result<_, Box<dyn std::error::Error>>>()?;
        flag(
            "engine: Gaussian limit, TV decreasing in N",
            tvs[0] > tvs[1] && tvs[1] > tvs[2] && tvs[2] < 0.01,
            tvs[2],
            "strictly decreasing over N = 1e2, 1e3, 1e4 and < 1e-2 at 1e4",
        )
    }));
    out.push(attempt!("engine: equivalence set indistinguishable", {
        let members: Vec<usize> = equivalence_set(1.0, 0.02)?.take(5).collect();
        let dists = members
            .iter()
            .map(|&n| Ok(distribution(&sym.build_qvp(n, 1.0)?)))
            .collect::<Result<Vec<_>, Box<dyn std::error::Error>>>()?;
        let mut worst: f64 = 0.0;
        for i in 0..dists.len() {
            for j in i + 1..dists.len() {
                worst = worst.max(total_variation(&dists[i], &dists[j])?);
            }
        }
        below("engine: equivalence set indistinguishable", worst, 0.02)
    }));
    out
}

fn mirror_asymmetry(masses: &[f64]) -> f64 {
    masses
        .iter()
        .zip(masses.iter().rev())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

fn model_checks() -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    let l = Lattice::new(65, 0.5).expect("odd");
    out.push(attempt!("models: W_B = T W_F T^-1", {
        let worst = build_symmetric(l)
            .symmetry_relation_error()?
            .max(build_tviolating(l, 0.1)?.symmetry_relation_error()?);
        below("models: W_B = T W_F T^-1", worst, 1e-10)
    }));
    out.push(attempt!("models: T-violating distribution is even", {
        let d = distribution(&build_tviolating(l, 0.1)?.build_qvp(200, 1.0)?);
        below("models: T-violating distribution is even", mirror_asymmetry(d.masses()), 1e-10)
    }));
    out.push(attempt!("models: lambda -> -lambda invariance", {
        let a = distribution(&build_tviolating(l, 0.15)?.build_qvp(200, 1.0)?);
        let b = distribution(&build_tviolating(l, -0.15)?.build_qvp(200, 1.0)?);
        let diff = a.masses().iter().zip(b.masses()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        below("models: lambda -> -lambda invariance", diff, 1e-10)
    }));
    out.push(attempt!("models: lambda -> 0 approaches symmetric", {
        let sym = distribution(&build_symmetric(l).build_qvp(400, 1.0)?);
        let tvs = [0.05, 0.01, 0.001]
            .into_iter()
            .map(|lam| Ok(total_variation(&distribution(&build_tviolating(l, lam)?.build_qvp(400, 1.0)?), &sym)?))
            .collect::<Result<Vec<f64>, Box<dyn std::error::Error>>>()?;
        flag(
            "models: lambda -> 0 approaches symmetric",
            tvs[0] > tvs[1] && tvs[1] > tvs[2],
            tvs[2],
            "TV monotone over lambda = 0.05, 0.01, 0.001",
        )
    }));
    out.push(attempt!("models: sector eigenvalue e^{-ik lambda dw} cos(k dw)", {
        let lam = 0.1;
        let m = build_tviolating(l, lam)?;
        let dw = step_size(100, 1.0)?;
        let s = step_operator(m.forward(), m.backward(), dw)?;
        let p = TranslationGenerator::new(l);
        let mut worst: f64 = 0.0;
        for (idx, &k) in p.eigenvalues().iter().enumerate() {
            for (internal, sign) in [(0usize, 1.0), (1, -1.0)] {
                let mut e = vec![C64::new(0.0, 0.0); 2];
                e[internal] = C64::new(1.0, 0.0);
                let v = p.eigenvectors().column(idx).kron(&ComplexVector::new(e)?);
                let factor = C64::from_polar((k * dw).cos(), -sign * k * lam * dw);
                worst = worst.max(s.apply(&v)?.max_abs_diff(&v.scale(factor))?);
            }
        }
        below("models: sector eigenvalue e^{-ik lambda dw} cos(k dw)", worst, 1e-10)
    }));
    out.push(attempt!("models: internal sigma_x time reversal squares to +1", {
        let t = time_reversal_operator(&Lattice::new(5, 1.0)?, Some(&sigma_x()))?;
        flag("models: internal sigma_x time reversal squares to +1", t.square_sign() == 1, t.square_sign() as f64, "= +1")
    }));
    out
}

fn analysis_checks() -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    out.push(attempt!("analysis: separation law within 1%", {
        let mut worst: f64 = 0.0;
        for lam in [0.05, 0.1, 0.2] {
            let steps = [1000, 2000, 4000];
            let needed = 8.0 * 2.0 * lam * (2.0 * 4000.0f64).sqrt();
            let sites = (needed.ceil() as usize + 2) | 1;
            let rows = separation_sweep(lam, 1.0, Lattice::new(sites, 1.0)?, &steps)?;
            for r in rows {
                if r.peak_count != 2 {
                    return Ok(failed("analysis: separation law within 1%", format!("{} peaks at N = {}", r.peak_count, r.steps)));
                }
                worst = worst.max(r.rel_error);
            }
        }
        below("analysis: separation law within 1%", worst, 0.01)
    }));
    out.push(attempt!("analysis: double-headed arrow", {
        let l = Lattice::new(205, 1.0)?;
        let m = build_tviolating(l, 0.1)?;
        let state = m.build_qvp(4000, 1.0)?;
        let mut worst: f64 = 0.0;
        let mut signs_ok = true;
        for k in [1.0, 5.0, 10.0] {
            let tau = k * l.spacing();
            let f = evolution_shift_check(&state, &m, tau)?;
            let b = backward_shift_check(&state, &m, tau)?;
            signs_ok &= f.shifts.iter().all(|s| *s > 0.0) && b.shifts.iter().all(|s| *s < 0.0);
            signs_ok &= f.passed() && b.passed();
            worst = worst.max(f.max_error()).max(b.max_error());
        }
        flag("analysis: double-headed arrow", signs_ok, worst, "forward > 0, backward < 0, each within one spacing")
    }));
    out.push(attempt!("analysis: peak detection deterministic", {
        let d = distribution(&build_tviolating(Lattice::new(65, 0.5)?, 0.2)?.build_qvp(300, 1.0)?);
        let same = detect_peaks(&d, DEFAULT_MIN_HEIGHT_FRACTION)? == detect_peaks(&d, DEFAULT_MIN_HEIGHT_FRACTION)?;
        flag("analysis: peak detection deterministic", same, 0.0, "identical reports")
    }));
    out
}

fn lorentz_checks() -> Vec<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(1905);
    let mut invariant_worst: f64 = 0.0;
    let mut compose_worst: f64 = 0.0;
    for _ in 0..1000 {
        let i = Interval::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let b1 = Boost::natural(rng.random_range(-0.9..0.9)).expect("subluminal");
        let b2 = Boost::natural(rng.random_range(-0.9..0.9)).expect("subluminal");
        let once = boost_interval(i, b1);
        invariant_worst = invariant_worst.max((once.invariant(1.0) - i.invariant(1.0)).abs());
        let composed = compose_boosts(b1, b2).expect("same c");
        let twice = boost_interval(once, b2);
        let direct = boost_interval(i, composed);
        compose_worst = compose_worst.max((twice.dx - direct.dx).abs().max((twice.dt - direct.dt).abs()));
    }
    vec![
        below("lorentz: interval invariance (1000 samples)", invariant_worst, 1e-12),
        below("lorentz: boost composition", compose_worst, 1e-12),
    ]
}
