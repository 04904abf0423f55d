use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use gaborprop::frames::LatticeIndex;
use gaborprop::gabor_matrix::{FigureSeries, GaborMatrix};
use gaborprop::grid::SampledFunction;
use gaborprop::solver::SweepRow;
use serde::Serialize;

use crate::failure::Failure;

/// Matrices with more stored entries than this are not exported.
pub const EXPORT_LIMIT: usize = 20_000_000;

/// Optional output directory.
pub struct Output {
    dir: Option<PathBuf>,
}

impl Output {
    pub fn new(dir: Option<&Path>) -> Result<Self, Failure> {
        if let Some(d) = dir {
            std::fs::create_dir_all(d).map_err(|e| Failure::io(d, e))?;
        }
        Ok(Output {
            dir: dir.map(Path::to_path_buf),
        })
    }

    pub fn enabled(&self) -> bool {
        self.dir.is_some()
    }

    fn path(&self, name: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(name))
    }

    pub fn json(&self, name: &str, value: &impl Serialize) -> Result<(), Failure> {
        let Some(path) = self.path(name) else { return Ok(()) };
        let mut file = File::create(&path).map_err(|e| Failure::io(&path, e))?;
        serde_json::to_writer_pretty(&mut file, value).map_err(|e| Failure::io(&path, e))?;
        writeln!(file).map_err(|e| Failure::io(&path, e))
    }

    pub fn csv(&self, name: &str, rows: impl FnOnce(&mut csv::Writer<File>) -> csv::Result<()>) -> Result<(), Failure> {
        let Some(path) = self.path(name) else { return Ok(()) };
        let mut w = csv::Writer::from_path(&path).map_err(|e| Failure::io(&path, e))?;
        rows(&mut w).map_err(|e| Failure::io(&path, e))?;
        w.flush().map_err(|e| Failure::io(&path, e))
    }
}

/// Writes a table to standard output. A closed pipe (`| head`) ends the
/// output quietly.
pub fn stdout_csv(rows: impl FnOnce(&mut csv::Writer<io::StdoutLock<'static>>) -> csv::Result<()>) -> Result<(), Failure> {
    let mut w = csv::Writer::from_writer(io::stdout().lock());
    let result = rows(&mut w).and_then(|()| w.flush().map_err(csv::Error::from));
    match result {
        Err(e) if matches!(e.kind(), csv::ErrorKind::Io(io) if io.kind() == io::ErrorKind::BrokenPipe) => Ok(()),
        other => other.map_err(|e| Failure::config(format!("writing to standard output: {e}"))),
    }
}

pub fn print_json(value: &impl Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::config(e.to_string()))?;
    println!("{text}");
    Ok(())
}

#[derive(Serialize)]
struct FigureRow {
    n: usize,
    magnitude: f64,
    t: f64,
}

/// `n,magnitude,t`.
pub fn figure_rows<W: Write>(w: &mut csv::Writer<W>, series: &[&FigureSeries]) -> csv::Result<()> {
    if series.is_empty() {
        w.write_record(["n", "magnitude", "t"])?;
    }
    for s in series {
        for (n, magnitude, t) in s.rows() {
            w.serialize(FigureRow { n, magnitude, t })?;
        }
    }
    Ok(())
}

/// `n,magnitude,t` for a single sorted column.
pub fn sorted_rows<W: Write>(w: &mut csv::Writer<W>, sorted: &[f64], t: f64) -> csv::Result<()> {
    if sorted.is_empty() {
        w.write_record(["n", "magnitude", "t"])?;
    }
    for (i, magnitude) in sorted.iter().enumerate() {
        w.serialize(FigureRow { n: i + 1, magnitude: *magnitude, t })?;
    }
    Ok(())
}

/// `theta,nnz,rel_l2_error`.
pub fn sweep_rows<W: Write>(w: &mut csv::Writer<W>, rows: &[SweepRow]) -> csv::Result<()> {
    for row in rows {
        w.serialize(row)?;
    }
    Ok(())
}

/// `x,re,im` in one dimension, `x1,...,xd,re,im` otherwise.
pub fn solution_rows<W: Write>(w: &mut csv::Writer<W>, f: &SampledFunction) -> csv::Result<()> {
    let grid = f.grid();
    let d = grid.dim();
    let mut header: Vec<String> = if d == 1 {
        vec!["x".into()]
    } else {
        (1..=d).map(|i| format!("x{i}")).collect()
    };
    header.extend(["re".into(), "im".into()]);
    w.write_record(&header)?;
    let mut record = vec![0.0; d + 2];
    for (j, v) in f.values().iter().enumerate() {
        record[..d].copy_from_slice(&grid.point(j)[..d]);
        record[d] = v.re;
        record[d + 1] = v.im;
        w.serialize(&record)?;
    }
    Ok(())
}

/// `m_1;...;m_d;n_1;...;n_d`.
pub fn index_label(idx: &LatticeIndex, d: usize) -> String {
    idx.m[..d]
        .iter()
        .chain(&idx.n[..d])
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

/// Coordinate list `lambda_prime_indices,lambda_indices,re,im` of the stored entries.
pub fn coo_rows<W: Write>(w: &mut csv::Writer<W>, m: &GaborMatrix) -> csv::Result<()> {
    let d = m.lattice().dim();
    w.write_record(["lambda_prime_indices", "lambda_indices", "re", "im"])?;
    for (row, col, v) in m.triplets() {
        w.serialize((index_label(&row, d), index_label(&col, d), v.re, v.im))?;
    }
    Ok(())
}
