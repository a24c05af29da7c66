//! Acceptance suite: one verdict line per criterion, non-zero exit on any
//! failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use dampwave_core::complex::{energy, modified_energy, ComplexSegment, State};
use dampwave_core::evolution::{
    backward_euler_step, initialize_primitives, mode, random_compatible, random_raw, reference_solution, BackwardEuler,
    ReferencePropagator, SimulateOptions, Simulator,
};
use dampwave_core::linalg::Tolerances;
use dampwave_core::models::{build_membrane_1d, build_membrane_2d, build_network, MembraneSpec, NetworkSpec};
use dampwave_core::spectral::{constants, decay_certificate};

struct Verdict {
    id: u32,
    name: &'static str,
    passed: bool,
    detail: String,
    elapsed: Duration,
    limit: Option<Duration>,
}

impl Verdict {
    fn ok(&self) -> bool {
        self.passed && self.limit.is_none_or(|l| self.elapsed <= l)
    }

    fn print(&self) {
        let limit = match self.limit {
            Some(l) => format!(" (limit {:.0?})", l),
            None => String::new(),
        };
        println!(
            "criterion {} [{}] {}: {} in {:.3?}{}",
            self.id,
            if self.ok() { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.elapsed,
            limit
        );
    }
}

fn bundled_models() -> Vec<(&'static str, ComplexSegment)> {
    vec![
        ("unit loop", build_network(&NetworkSpec::unit_loop()).unwrap()),
        (
            "random RLC (5 nodes, seed 42)",
            build_network(&NetworkSpec::random(5, 42)).unwrap(),
        ),
        (
            "membrane1d n=32",
            build_membrane_1d(&MembraneSpec::unit(1, 32)).unwrap(),
        ),
        ("membrane2d n=8", build_membrane_2d(&MembraneSpec::unit(2, 8)).unwrap()),
    ]
}

const TAUS: [f64; 3] = [1.0, 0.1, 0.01];
const SEEDS: u64 = 20;

fn steps_for(rate: f64, tau: f64) -> usize {
    (50.0 / rate / tau).ceil() as usize
}

fn certificate_formulas() -> Verdict {
    let t = Instant::now();
    let c = decay_certificate(1.0, 1.0, 1.0).unwrap();
    let elapsed = t.elapsed();
    let errs = [
        (c.delta_star - 1.0 / 6.0).abs(),
        (c.delta_double_star - 1.0 / 6.0).abs(),
        (c.prefactor - 3.0).abs(),
        (c.rate - 1.0 / 9.0).abs(),
    ];
    let worst = errs.iter().cloned().fold(0.0, f64::max);
    Verdict {
        id: 1,
        name: "certificate formulas at (1, 1, 1)",
        passed: worst <= 1e-15,
        detail: format!("max deviation {worst:.1e}"),
        elapsed,
        limit: Some(Duration::from_millis(1)),
    }
}

/// Criteria 2, 3 and 4 share the same trajectories.
fn trajectory_criteria() -> [Verdict; 3] {
    let start = Instant::now();
    let mut bound_fail = Vec::new();
    let mut worst_ratio: f64 = 0.0;
    let mut balance_fail = Vec::new();
    let mut worst_balance: f64 = f64::NEG_INFINITY;
    let mut sandwich_fail = Vec::new();
    let (mut rmin, mut rmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut runs = 0;
    let opts = SimulateOptions::default();
    for (name, seg) in bundled_models() {
        let cert = constants(&seg).unwrap().certificate;
        for tau in TAUS {
            let steps = steps_for(cert.rate, tau);
            let mut sim = Simulator::new(&seg, tau, &opts.tolerances).unwrap();
            for seed in 0..SEEDS {
                let s0 = random_compatible(&seg, seed).unwrap();
                let tr = sim.run(&s0, steps, &cert, &opts).unwrap();
                runs += 1;
                let b = tr.bound_check.unwrap();
                worst_ratio = worst_ratio.max(b.worst_ratio);
                if !b.passed {
                    bound_fail.push(format!("{name} tau={tau} seed={seed} ratio={:.3e}", b.worst_ratio));
                }

                let slack = 1e-10 * tr.e0[0] / tau;
                for n in 1..tr.len() {
                    let lhs = (tr.e0[n] - tr.e0[n - 1]) / tau;
                    let excess = (lhs + tr.damping[n]) / slack;
                    worst_balance = worst_balance.max(excess);
                    if excess > 1.0 {
                        balance_fail.push(format!("{name} tau={tau} seed={seed} step={n}"));
                        break;
                    }
                }

                for (n, &r) in tr.edelta_ratio.iter().enumerate() {
                    if tr.e0[n] == 0.0 && r.is_nan() {
                        continue;
                    }
                    rmin = rmin.min(r);
                    rmax = rmax.max(r);
                    if !(0.5 * (1.0 - 1e-9)..=1.5 * (1.0 + 1e-9)).contains(&r) {
                        sandwich_fail.push(format!("{name} tau={tau} seed={seed} step={n} ratio={r}"));
                        break;
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let first = |v: &Vec<String>| v.first().cloned().unwrap_or_default();
    [
        Verdict {
            id: 2,
            name: "certified bound on trajectories",
            passed: bound_fail.is_empty(),
            detail: format!(
                "{runs} runs, worst E0(t_n)/(3e^(-c'(t_n-t_m))E0(t_m)) = {worst_ratio:.6}, {} failing {}",
                bound_fail.len(),
                first(&bound_fail)
            ),
            elapsed,
            limit: Some(Duration::from_secs(120)),
        },
        Verdict {
            id: 3,
            name: "discrete power balance",
            passed: balance_fail.is_empty(),
            detail: format!(
                "worst (d_tau E0 + |u_n|_beta^2) / slack = {worst_balance:.3e}, {} failing {}",
                balance_fail.len(),
                first(&balance_fail)
            ),
            elapsed: Duration::ZERO,
            limit: None,
        },
        Verdict {
            id: 4,
            name: "modified-energy sandwich",
            passed: sandwich_fail.is_empty(),
            detail: format!(
                "E_delta/E0 in [{rmin:.6}, {rmax:.6}], {} failing {}",
                sandwich_fail.len(),
                first(&sandwich_fail)
            ),
            elapsed: Duration::ZERO,
            limit: None,
        },
    ]
}

fn poincare_convergence() -> Verdict {
    let start = Instant::now();
    let one = constants(&build_membrane_1d(&MembraneSpec::unit(1, 256)).unwrap())
        .unwrap()
        .poincare;
    let two = constants(&build_membrane_2d(&MembraneSpec::unit(2, 32)).unwrap())
        .unwrap()
        .poincare;
    let t1 = 1.0 / std::f64::consts::PI;
    let t2 = 1.0 / (std::f64::consts::PI * std::f64::consts::SQRT_2);
    let (e1, e2) = ((one - t1).abs() / t1, (two - t2).abs() / t2);
    Verdict {
        id: 5,
        name: "Poincare constant convergence",
        passed: e1 <= 0.01 && e2 <= 0.02,
        detail: format!("1D n=256: {one:.6} (rel err {e1:.2e}), 2D n=32: {two:.6} (rel err {e2:.2e})"),
        elapsed: start.elapsed(),
        limit: Some(Duration::from_secs(30)),
    }
}

fn energy_norm(seg: &ComplexSegment, a: &State, b: &State) -> f64 {
    let d = State::new(
        a.u.iter().zip(&b.u).map(|(x, y)| x - y).collect(),
        a.ustar.iter().zip(&b.ustar).map(|(x, y)| x - y).collect(),
    );
    (2.0 * energy(seg, &d).unwrap()).sqrt()
}

fn oracle_equivalence() -> Verdict {
    let start = Instant::now();
    let loop_seg = build_network(&NetworkSpec::unit_loop()).unwrap();
    let membrane = build_membrane_1d(&MembraneSpec::unit(1, 8)).unwrap();
    let cases = [
        ("unit loop", loop_seg.clone(), State::new(vec![1.0], vec![0.0])),
        ("membrane1d n=8 mode 0", membrane.clone(), mode(&membrane, 0).unwrap()),
    ];
    let taus = [0.1, 0.05, 0.025];
    let mut passed = true;
    let mut detail = Vec::new();
    for (name, seg, s0) in &cases {
        let exact = reference_solution(seg, s0, 1.0).unwrap();
        let errs: Vec<f64> = taus
            .iter()
            .map(|&tau| {
                let stepper = BackwardEuler::new(seg, tau).unwrap();
                let steps = (1.0 / tau).round() as usize;
                let mut s = s0.clone();
                for _ in 0..steps {
                    s = stepper.step(&s).unwrap();
                }
                energy_norm(seg, &s, &exact)
            })
            .collect();
        let ratios: Vec<f64> = errs.windows(2).map(|w| w[1] / w[0]).collect();
        passed &= ratios.iter().all(|r| (0.38..=0.65).contains(r));
        detail.push(format!("{name}: ratios {:.4?}", ratios));
    }
    Verdict {
        id: 6,
        name: "first-order convergence to the reference flow",
        passed,
        detail: detail.join("; "),
        elapsed: start.elapsed(),
        limit: Some(Duration::from_secs(10)),
    }
}

fn compatibility_conservation() -> Verdict {
    let start = Instant::now();
    let mut worst_moment: f64 = 0.0;
    let mut worst_plateau: f64 = 0.0;
    let mut min_persistent = f64::INFINITY;
    let mut runs = 0;
    let opts = SimulateOptions {
        allow_incompatible: true,
        ..SimulateOptions::default()
    };
    for (name, seg) in bundled_models().into_iter().filter(|(n, _)| n.starts_with("membrane")) {
        let cert = constants(&seg).unwrap().certificate;
        for tau in TAUS {
            let steps = steps_for(cert.rate, tau);
            let mut sim = Simulator::new(&seg, tau, &Tolerances::default()).unwrap();
            for seed in 0..SEEDS {
                let s0 = random_raw(&seg, 1000 + seed).unwrap();
                let tr = sim.run(&s0, steps, &cert, &opts).unwrap();
                assert!(
                    tr.bound_check.is_none(),
                    "{name}: incompatible data must not be certified"
                );
                runs += 1;
                let m0 = &tr.compatibility.conserved_moments;
                let scale = m0.iter().map(|m| m * m).sum::<f64>().sqrt();
                for s in &tr.states {
                    let m = sim.analysis().moments(&s.ustar).unwrap();
                    let dev = m.iter().zip(m0).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() / scale;
                    worst_moment = worst_moment.max(dev);
                }
                let persistent = tr.compatibility.persistent_energy();
                min_persistent = min_persistent.min(persistent / tr.e0[0]);
                let last = *tr.e0.last().unwrap();
                worst_plateau = worst_plateau.max((last - persistent).abs() / persistent);
            }
        }
    }
    Verdict {
        id: 7,
        name: "conserved moments and persistent-mode plateau",
        passed: worst_moment <= 1e-9 && worst_plateau <= 1e-8 && min_persistent > 0.0,
        detail: format!(
            "{runs} runs, max moment drift {worst_moment:.2e}, final E0 vs persistent energy rel dev {worst_plateau:.2e}, \
             smallest persistent share {min_persistent:.3e}"
        ),
        elapsed: start.elapsed(),
        limit: None,
    }
}

fn modified_energy_decay() -> Verdict {
    let start = Instant::now();
    let seg = build_network(&NetworkSpec::unit_loop()).unwrap();
    let cert = constants(&seg).unwrap().certificate;
    let delta = cert.delta_double_star;
    let h = 1e-3;
    let samples = 20_000;
    let prop = ReferencePropagator::new(&seg, h).unwrap();
    let mut s = State::new(vec![1.0], vec![0.0]);
    let mut p = initialize_primitives(&seg, &s).unwrap();
    let mut prev = modified_energy(&seg, &s, &p, delta).unwrap();
    let mut worst = f64::NEG_INFINITY;
    let mut fails = 0;
    for _ in 0..samples {
        s = prop.advance(&s);
        p = prop.advance_primitive(&p);
        let e = modified_energy(&seg, &s, &p, delta).unwrap();
        let excess = (e - prev) / h + 2.0 * delta / 3.0 * e - 1e-2 * h;
        worst = worst.max(excess);
        if excess > 0.0 {
            fails += 1;
        }
        prev = e;
    }
    Verdict {
        id: 8,
        name: "continuous-time decay of the modified energy",
        passed: fails == 0,
        detail: format!(
            "{samples} samples on [0, {}], max of dE/dt + (2delta/3)E - 1e-2 h = {worst:.3e}, {fails} violations",
            samples as f64 * h
        ),
        elapsed: start.elapsed(),
        limit: Some(Duration::from_secs(5)),
    }
}

fn scalar_hand_example() -> Verdict {
    let start = Instant::now();
    let seg = build_network(&NetworkSpec::unit_loop()).unwrap();
    let n = backward_euler_step(&seg, &State::new(vec![1.0], vec![0.0]), 1.0).unwrap();
    let err = (n.u[0] - 1.0 / 3.0).abs().max((n.ustar[0] + 1.0 / 3.0).abs());
    Verdict {
        id: 9,
        name: "unit-loop backward Euler step",
        passed: err <= 1e-14,
        detail: format!(
            "(u, u*) = ({:.17}, {:.17}), max deviation {err:.1e}",
            n.u[0], n.ustar[0]
        ),
        elapsed: start.elapsed(),
        limit: None,
    }
}

fn main() -> ExitCode {
    let mut all = vec![certificate_formulas()];
    all.extend(trajectory_criteria());
    all.push(poincare_convergence());
    all.push(oracle_equivalence());
    all.push(compatibility_conservation());
    all.push(modified_energy_decay());
    all.push(scalar_hand_example());
    all.sort_by_key(|v| v.id);
    for v in &all {
        v.print();
    }
    let failed = all.iter().filter(|v| !v.ok()).count();
    println!("acceptance: {} of {} criteria passed", all.len() - failed, all.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
