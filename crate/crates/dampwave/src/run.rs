//! The three commands as library functions returning exit codes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use dampwave_core::complex::energy;
use dampwave_core::evolution::{
    check_decay_bound, fit_decay_rate, project_compatible, reference_solution, SimulateOptions, Simulator, Trajectory,
};
use dampwave_core::linalg::DENSE_LIMIT;
use dampwave_core::spectral::constants_with;
use dampwave_core::{Certificate, ComplexSegment, State};
use serde::Serialize;

use crate::config::{LoadedConfig, Overrides, Resolved};
use crate::error::{Error, Result};
use crate::report::{
    BoundJson, CheckReport, CompatibilityJson, ConstantsDocument, ConstantsJson, EnergyJson, FitJson, ModelJson,
    OracleJson, RunJson, RunReport, TolerancesJson, Verdict,
};
use crate::segment::write_segment;
use crate::table::{read_energy_table, write_trajectory_file};

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("reports always serialize") + "\n";
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn model_json(r: &Resolved) -> ModelJson {
    ModelJson {
        kind: r.model.name().into(),
        n1: r.segment.n1(),
        n2: r.segment.n2(),
    }
}

fn load(config: Option<&Path>) -> Result<LoadedConfig> {
    match config {
        Some(p) => LoadedConfig::read(p),
        None => Ok(LoadedConfig::default()),
    }
}

/// `constants`: writes the constants document.
pub fn run_constants(config: Option<&Path>, o: &Overrides, segment_out: Option<&Path>) -> Result<u8> {
    let r = load(config)?.resolve(o)?;
    let c = constants_with(&r.segment, &r.tolerances)?;
    if let Some(p) = segment_out {
        write_segment(p, &r.segment)?;
    }
    let doc = ConstantsDocument {
        model: model_json(&r),
        constants: ConstantsJson::from(&c),
    };
    write_json(r.report.as_deref(), &doc)?;
    Ok(0)
}

/// Result of one simulated configuration.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: RunReport,
    pub trajectory: Trajectory,
}

/// Runs a resolved configuration without writing anything.
pub fn simulate_resolved(r: &Resolved) -> Result<Outcome> {
    let seg = &r.segment;
    let tau = r
        .tau
        .ok_or_else(|| Error::Usage("no time step: pass --tau or set \"tau\"".into()))?;
    let steps = r
        .steps
        .ok_or_else(|| Error::Usage("no step count: pass --steps or set \"steps\"".into()))?;
    let consts = constants_with(seg, &r.tolerances)?;
    let mut s0 = r.initial.generate(seg)?;
    if r.project_initial {
        s0.ustar = project_compatible(seg, &s0.ustar)?;
    }
    let opts = SimulateOptions {
        delta: r.delta,
        allow_incompatible: true,
        tolerances: r.tolerances,
        ..SimulateOptions::default()
    };
    let mut sim = Simulator::new(seg, tau, &r.tolerances)?;
    let tr = sim.run(&s0, steps, &consts.certificate, &opts)?;

    let certificate = match &tr.bound_check {
        Some(b) if b.passed => Verdict::Pass,
        Some(_) => Verdict::Fail,
        None => Verdict::NotApplicable,
    };
    let fit = if tr.certificate_applicable() {
        let end = tr
            .e0
            .iter()
            .position(|&e| e.is_nan() || e < f64::MIN_POSITIVE)
            .unwrap_or(tr.len());
        fit_decay_rate(&tr.times, &tr.e0, 0..end)
            .ok()
            .map(|f| FitJson::new(&f, [0, end]))
    } else {
        None
    };
    let t_final = steps as f64 * tau;
    let oracle = if seg.n1() + seg.n2() <= DENSE_LIMIT {
        Some(oracle(
            seg,
            &s0,
            tr.states.last().expect("trajectory holds the initial state"),
            t_final,
        )?)
    } else {
        None
    };
    let report = RunReport {
        model: model_json(r),
        constants: ConstantsJson::from(&consts),
        run: RunJson {
            tau,
            steps,
            t_final,
            initial: r.initial.label(),
            project_initial: r.project_initial,
            delta: tr.delta,
            tolerances: TolerancesJson {
                kernel: r.tolerances.kernel,
                compatibility: r.tolerances.compatibility,
                bound_slack: r.tolerances.bound_slack,
            },
        },
        compatibility: CompatibilityJson::new(&tr.compatibility, r.tolerances.compatibility),
        energy: EnergyJson {
            initial: tr.e0[0],
            last: *tr.e0.last().expect("nonempty"),
            ln_final: *tr.log_e0.last().expect("nonempty"),
        },
        fit,
        certificate,
        bound_check: tr
            .bound_check
            .as_ref()
            .map(|b| BoundJson::new(b, r.tolerances.bound_slack)),
        oracle,
    };
    Ok(Outcome { report, trajectory: tr })
}

fn oracle(seg: &ComplexSegment, s0: &State, last: &State, t: f64) -> Result<OracleJson> {
    let exact = reference_solution(seg, s0, t)?;
    let diff = State::new(
        last.u.iter().zip(&exact.u).map(|(a, b)| a - b).collect(),
        last.ustar.iter().zip(&exact.ustar).map(|(a, b)| a - b).collect(),
    );
    let reference_norm = (2.0 * energy(seg, &exact)?).sqrt();
    let error_norm = (2.0 * energy(seg, &diff)?).sqrt();
    Ok(OracleJson {
        t,
        reference_norm,
        error_norm,
        relative_error: if reference_norm > 0.0 {
            error_norm / reference_norm
        } else {
            error_norm
        },
    })
}

fn write_outcome(out: &Outcome, csv: Option<&Path>, report: Option<&Path>) -> Result<()> {
    if let Some(p) = csv {
        write_trajectory_file(p, &out.trajectory)?;
    }
    write_json(report, &out.report)
}

fn summary(label: &str, out: &Outcome) -> String {
    let r = &out.report;
    let verdict = match r.certificate {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::NotApplicable => "not-applicable",
    };
    let worst = r
        .bound_check
        .as_ref()
        .map_or(String::new(), |b| format!(", worst ratio {:.6e}", b.worst_ratio));
    format!("{label}certificate: {verdict}{worst}, c' = {:.6e}", r.constants.c_prime)
}

/// `simulate` with a single configuration.
pub fn run_simulate(config: Option<&Path>, o: &Overrides) -> Result<u8> {
    let r = load(config)?.resolve(o)?;
    let out = simulate_resolved(&r)?;
    write_outcome(&out, r.csv.as_deref(), r.report.as_deref())?;
    eprintln!("{}", summary("", &out));
    Ok(out.report.certificate.exit_code())
}

/// `simulate --sweep`: independent configurations on separate threads. Each
/// writes `<stem>.csv` and `<stem>.report.json` next to its config unless the
/// config names its outputs.
pub fn run_sweep(configs: &[PathBuf], o: &Overrides) -> Result<u8> {
    if o.csv.is_some() || o.report.is_some() {
        return Err(Error::Usage(
            "--out and --report cannot be combined with --sweep".into(),
        ));
    }
    let results: Vec<(PathBuf, Result<u8>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .map(|path| {
                scope.spawn(move || {
                    let run = || -> Result<u8> {
                        let mut r = LoadedConfig::read(path)?.resolve(o)?;
                        let stem = path
                            .file_stem()
                            .map_or("run".into(), |s| s.to_string_lossy().into_owned());
                        let dir = path.parent().unwrap_or(Path::new("."));
                        r.csv.get_or_insert_with(|| dir.join(format!("{stem}.csv")));
                        r.report.get_or_insert_with(|| dir.join(format!("{stem}.report.json")));
                        let out = simulate_resolved(&r)?;
                        write_outcome(&out, r.csv.as_deref(), r.report.as_deref())?;
                        eprintln!("{}", summary(&format!("{}: ", path.display()), &out));
                        Ok(out.report.certificate.exit_code())
                    };
                    (path.clone(), run())
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    });
    let mut code = 0;
    for (path, res) in results {
        match res {
            Ok(c) => code = code.max(c),
            Err(e) => {
                eprintln!("{}: {e}", path.display());
                code = code.max(1);
            }
        }
    }
    Ok(code)
}

/// `check-decay`: re-verifies a stored trajectory against the certificate in
/// a stored report.
pub fn run_check_decay(csv: &Path, report: &Path, output: Option<&Path>) -> Result<u8> {
    let text = fs::read_to_string(report).map_err(|e| Error::io(report, e))?;
    let doc: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::json(report, &e))?;
    let num = |ptr: &str| doc.pointer(ptr).and_then(serde_json::Value::as_f64);
    let invalid = |m: &str| Error::Invalid {
        path: report.to_owned(),
        message: m.into(),
    };
    let rate = num("/constants/c_prime").ok_or_else(|| invalid("missing constants.c_prime"))?;
    let prefactor = num("/constants/C_prime").ok_or_else(|| invalid("missing constants.C_prime"))?;
    if !(rate > 0.0 && prefactor >= 1.0) {
        return Err(invalid("certificate needs c_prime > 0 and C_prime >= 1"));
    }
    let slack = num("/run/tolerances/bound_slack").unwrap_or(dampwave_core::linalg::Tolerances::default().bound_slack);
    let cert = Certificate {
        delta_star: num("/constants/delta_star").unwrap_or(f64::NAN),
        delta_double_star: num("/constants/delta_double_star").unwrap_or(1.5 * rate),
        prefactor,
        rate,
    };
    let table = read_energy_table(csv)?;
    let not_applicable = doc.pointer("/certificate").and_then(serde_json::Value::as_str) == Some("not-applicable");
    let result = if table.certified && !not_applicable {
        let b = check_decay_bound(&table.times, &table.e0, &cert, slack);
        CheckReport {
            samples: table.times.len(),
            certificate: if b.passed { Verdict::Pass } else { Verdict::Fail },
            bound_check: Some(BoundJson::new(&b, slack)),
        }
    } else {
        CheckReport {
            samples: table.times.len(),
            certificate: Verdict::NotApplicable,
            bound_check: None,
        }
    };
    write_json(output, &result)?;
    Ok(result.certificate.exit_code())
}
