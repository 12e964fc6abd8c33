//! Plain-text matrix and spectrum exchange.
//!
//! Matrix files start with a header line `m=<dim>`, followed by `m` lines,
//! one per matrix row, each holding `2m` comma-separated floats: the real and
//! imaginary parts of the row's entries in order. Floats are written with 17
//! significant digits so files round-trip exactly.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use super::{CMatrix, EmpiricalSpectralDistribution, HermitianMatrix};
use crate::error::{Error, Result};

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_matrix<W: Write>(out: &mut W, k: &HermitianMatrix) -> Result<()> {
    write_complex_matrix(out, k.as_matrix())
}

pub fn write_complex_matrix<W: Write>(out: &mut W, a: &CMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Format("only square matrices can be exchanged".into()));
    }
    writeln!(out, "m={}", a.nrows())?;
    for i in 0..a.nrows() {
        let row: Vec<String> = (0..a.ncols())
            .flat_map(|j| [fmt_f64(a[(i, j)].re), fmt_f64(a[(i, j)].im)])
            .collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn read_complex_matrix<R: BufRead>(input: R) -> Result<CMatrix> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty matrix file".into()))??;
    let m: usize = header
        .trim()
        .strip_prefix("m=")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| Error::Format(format!("bad header {header:?}, expected m=<dim>")))?;
    if m == 0 {
        return Err(Error::Format("dimension must be at least 1".into()));
    }
    let mut out = CMatrix::zeros(m, m);
    let mut row = 0;
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if row >= m {
            return Err(Error::Format(format!("more than {m} data rows")));
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Format(format!("row {row}: {e}")))?;
        if vals.len() != 2 * m {
            return Err(Error::Format(format!("row {row}: expected {} values, found {}", 2 * m, vals.len())));
        }
        for j in 0..m {
            out[(row, j)] = Complex64::new(vals[2 * j], vals[2 * j + 1]);
        }
        row += 1;
    }
    if row != m {
        return Err(Error::Format(format!("expected {m} data rows, found {row}")));
    }
    Ok(out)
}

pub fn read_matrix<R: BufRead>(input: R) -> Result<HermitianMatrix> {
    HermitianMatrix::new(read_complex_matrix(input)?)
}

/// `index,eigenvalue` rows in ascending eigenvalue order.
pub fn write_esd<W: Write>(out: &mut W, esd: &EmpiricalSpectralDistribution) -> Result<()> {
    writeln!(out, "index,eigenvalue")?;
    for (i, v) in esd.eigenvalues().iter().enumerate() {
        writeln!(out, "{i},{}", fmt_f64(*v))?;
    }
    Ok(())
}

/// `abscissa,density` rows.
pub fn write_density<W: Write>(out: &mut W, points: &[(f64, f64)]) -> Result<()> {
    writeln!(out, "abscissa,density")?;
    for (x, d) in points {
        writeln!(out, "{},{}", fmt_f64(*x), fmt_f64(*d))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{complex_gaussian, RandomSource};
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn matrix_files_round_trip(seed in any::<u64>(), m in 1usize..6) {
            let mut rng = RandomSource::new(seed).stream(0);
            let a = CMatrix::from_fn(m, m, |_, _| complex_gaussian(&mut rng) * 1e3);
            let k = HermitianMatrix::symmetrized(&a + a.adjoint());
            let mut buf = Vec::new();
            write_matrix(&mut buf, &k).unwrap();
            let back = read_matrix(buf.as_slice()).unwrap();
            prop_assert_eq!(back, k);
        }
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(read_complex_matrix("".as_bytes()).is_err());
        assert!(read_complex_matrix("n=2\n".as_bytes()).is_err());
        assert!(read_complex_matrix("m=1\n1,0,2\n".as_bytes()).is_err());
        assert!(read_complex_matrix("m=2\n1,0,0,0\n".as_bytes()).is_err());
        let ok = read_complex_matrix("m=1\n2.5,-1\n".as_bytes()).unwrap();
        assert_eq!(ok[(0, 0)], Complex64::new(2.5, -1.0));
    }
}
