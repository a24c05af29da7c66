//! Trajectory CSV: `step,t,E0,Edelta,damping,bound` with `{:.16e}` reals;
//! runs without a certificate drop `Edelta` and `bound`.

use std::io::Write;
use std::path::Path;

use dampwave_core::evolution::Trajectory;

use crate::error::{Error, Result};

pub const HEADER: [&str; 6] = ["step", "t", "E0", "Edelta", "damping", "bound"];
pub const HEADER_UNCERTIFIED: [&str; 4] = ["step", "t", "E0", "damping"];

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_trajectory<W: Write>(out: W, tr: &Trajectory) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let certified = tr.certificate_applicable();
    if certified {
        w.write_record(HEADER)?;
    } else {
        w.write_record(HEADER_UNCERTIFIED)?;
    }
    for n in 0..tr.len() {
        let mut row = vec![n.to_string(), real(tr.times[n]), real(tr.e0[n])];
        if certified {
            row.push(real(tr.edelta[n]));
        }
        row.push(real(tr.damping[n]));
        if certified {
            row.push(real(tr.bound[n]));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trajectory_file(path: &Path, tr: &Trajectory) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_trajectory(std::io::BufWriter::new(file), tr).map_err(|source| Error::Csv {
        path: path.to_owned(),
        source,
    })
}

/// `t` and `E0` columns of a stored trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyTable {
    pub times: Vec<f64>,
    pub e0: Vec<f64>,
    pub certified: bool,
}

pub fn read_energy_table(path: &Path) -> Result<EnergyTable> {
    let invalid = |message: String| Error::Invalid {
        path: path.to_owned(),
        message,
    };
    let csv_err = |source| Error::Csv {
        path: path.to_owned(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let headers = r.headers().map_err(csv_err)?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (Some(ti), Some(ei)) = (col("t"), col("E0")) else {
        return Err(invalid("missing t or E0 column".into()));
    };
    let certified = col("bound").is_some();
    let (mut times, mut e0) = (Vec::new(), Vec::new());
    for (k, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let field = |i: usize| -> Result<f64> {
            let s = rec.get(i).unwrap_or("");
            s.trim()
                .parse::<f64>()
                .map_err(|_| invalid(format!("line {}: cannot parse {s:?} as a number", k + 2)))
        };
        times.push(field(ti)?);
        e0.push(field(ei)?);
    }
    Ok(EnergyTable { times, e0, certified })
}
