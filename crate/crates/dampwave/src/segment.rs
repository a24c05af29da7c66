//! Segment documents: `n1`, `n2` and the matrices `A`, `Bm`, `G`, `M2`, `H`,
//! `D`, each either dense (array of rows) or a coordinate list
//! `{"rows", "cols", "entries": [[i, j, v], ...]}` with duplicates summed.
//! `K = M2·D` is recomputed on load and never stored.

use std::fs;
use std::path::Path;

use dampwave_core::complex::validate_segment;
use dampwave_core::linalg::{CsrMatrix, SymMatrix};
use dampwave_core::ComplexSegment;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CooMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixDoc {
    Dense(Vec<Vec<f64>>),
    Coo(CooMatrix),
}

impl MatrixDoc {
    fn to_csr(&self, name: &str, rows: usize, cols: usize) -> std::result::Result<CsrMatrix, String> {
        let (r, c, triplets) = match self {
            Self::Dense(m) => {
                let c = m.first().map_or(cols, Vec::len);
                if m.iter().any(|row| row.len() != c) {
                    return Err(format!("{name}: dense rows have unequal lengths"));
                }
                let t: Vec<_> = m
                    .iter()
                    .enumerate()
                    .flat_map(|(i, row)| {
                        row.iter()
                            .enumerate()
                            .filter(|(_, v)| **v != 0.0)
                            .map(move |(j, &v)| (i, j, v))
                    })
                    .collect();
                (m.len(), c, t)
            }
            Self::Coo(m) => (m.rows, m.cols, m.entries.clone()),
        };
        if (r, c) != (rows, cols) {
            return Err(format!("{name}: expected {rows}x{cols}, found {r}x{c}"));
        }
        if triplets.iter().any(|t| !t.2.is_finite()) {
            return Err(format!("{name}: non-finite entry"));
        }
        CsrMatrix::from_triplets(rows, cols, &triplets).map_err(|e| format!("{name}: {e}"))
    }

    fn from_csr(m: &CsrMatrix) -> Self {
        Self::Coo(CooMatrix {
            rows: m.nrows(),
            cols: m.ncols(),
            entries: m.iter().collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentDoc {
    pub n1: usize,
    pub n2: usize,
    #[serde(rename = "A")]
    pub a: MatrixDoc,
    #[serde(rename = "Bm")]
    pub bm: MatrixDoc,
    #[serde(rename = "G")]
    pub g: MatrixDoc,
    #[serde(rename = "M2")]
    pub m2: MatrixDoc,
    #[serde(rename = "H")]
    pub h: MatrixDoc,
    #[serde(rename = "D")]
    pub d: MatrixDoc,
}

impl SegmentDoc {
    pub fn from_segment(seg: &ComplexSegment) -> Self {
        Self {
            n1: seg.n1(),
            n2: seg.n2(),
            a: MatrixDoc::from_csr(seg.a().as_csr()),
            bm: MatrixDoc::from_csr(seg.bm().as_csr()),
            g: MatrixDoc::from_csr(seg.g().as_csr()),
            m2: MatrixDoc::from_csr(seg.m2().as_csr()),
            h: MatrixDoc::from_csr(seg.h().as_csr()),
            d: MatrixDoc::from_csr(seg.d()),
        }
    }

    /// Builds and validates the segment.
    pub fn to_segment(&self) -> std::result::Result<ComplexSegment, String> {
        let (n1, n2) = (self.n1, self.n2);
        let sym = |name: &str, m: &MatrixDoc, n: usize| {
            SymMatrix::new(m.to_csr(name, n, n)?).map_err(|e| format!("{name}: {e}"))
        };
        let seg = ComplexSegment::new(
            sym("A", &self.a, n1)?,
            sym("Bm", &self.bm, n1)?,
            sym("G", &self.g, n2)?,
            sym("M2", &self.m2, n2)?,
            sym("H", &self.h, n2)?,
            self.d.to_csr("D", n2, n1)?,
        )
        .map_err(|e| e.to_string())?;
        let report = validate_segment(&seg);
        if !report.usable() {
            let failed: Vec<String> = report
                .failed()
                .map(|c| format!("{} ({:e})", c.name, c.magnitude))
                .collect();
            return Err(format!("segment fails validation: {}", failed.join(", ")));
        }
        Ok(seg)
    }
}

pub fn read_segment(path: &Path) -> Result<ComplexSegment> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let doc: SegmentDoc = serde_json::from_str(&text).map_err(|e| Error::json(path, &e))?;
    doc.to_segment().map_err(|message| Error::Invalid {
        path: path.to_owned(),
        message,
    })
}

pub fn write_segment(path: &Path, seg: &ComplexSegment) -> Result<()> {
    let doc = SegmentDoc::from_segment(seg);
    let text = serde_json::to_string_pretty(&doc).expect("segment documents always serialize");
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}
