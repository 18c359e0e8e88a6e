//! CSV form of grid functions: one row per point, coordinate columns
//! `x1..xn` followed by value columns, `inf` for infinite values.

use std::io::{Read, Write};

use num_rational::BigRational;

use super::{ExtValue, GridError, GridFn, GridSpec};
use crate::scalar::{parse_rational, Scalar};

#[derive(Debug, thiserror::Error)]
pub enum CsvError {
    #[error(transparent)]
    Csv(#[from] ::csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("column tables must share one grid")]
    MixedGrids,
    #[error("malformed CSV: {0}")]
    Malformed(String),
}

/// Writes `x1..xn,value`.
pub fn write_grid<T: Scalar, W: Write>(g: &GridFn<T>, w: W) -> Result<(), CsvError> {
    write_table(&[("value", g)], w)
}

/// Writes coordinates followed by one column per named grid function.
pub fn write_table<T: Scalar, W: Write>(
    columns: &[(&str, &GridFn<T>)],
    w: W,
) -> Result<(), CsvError> {
    let spec = columns
        .first()
        .map(|(_, g)| g.spec())
        .ok_or(CsvError::MixedGrids)?;
    if columns.iter().any(|(_, g)| g.spec() != spec) {
        return Err(CsvError::MixedGrids);
    }
    let mut out = ::csv::Writer::from_writer(w);
    let mut header: Vec<String> = (1..=spec.arity()).map(|i| format!("x{i}")).collect();
    header.extend(columns.iter().map(|(name, _)| name.to_string()));
    out.write_record(&header)?;
    for (flat, idx) in spec.indices().enumerate() {
        let mut row: Vec<String> = spec
            .point_of::<T>(&idx)
            .iter()
            .map(Scalar::to_csv)
            .collect();
        row.extend(columns.iter().map(|(_, g)| g.values()[flat].to_csv()));
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a `x1..xn,value` table written by [`write_grid`]; the grid is
/// recovered from the distinct coordinates on each axis.
pub fn read_grid<T: Scalar, R: Read>(r: R) -> Result<GridFn<T>, CsvError> {
    let mut rdr = ::csv::Reader::from_reader(r);
    let header = rdr.headers()?.clone();
    let n = header.iter().take_while(|h| h.starts_with('x')).count();
    if n == 0 || header.len() != n + 1 {
        return Err(CsvError::Malformed("expected columns x1..xn,value".into()));
    }
    let mut coords: Vec<Vec<BigRational>> = Vec::new();
    let mut values: Vec<ExtValue<T>> = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let point = (0..n)
            .map(|i| {
                parse_rational(&rec[i])
                    .ok_or_else(|| CsvError::Malformed(format!("bad coordinate '{}'", &rec[i])))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let v = match rec[n].trim() {
            "inf" => ExtValue::Infinite,
            s => ExtValue::Finite(T::from_rational(
                &parse_rational(s)
                    .ok_or_else(|| CsvError::Malformed(format!("bad value '{s}'")))?,
            )),
        };
        coords.push(point);
        values.push(v);
    }
    let mut steps = Vec::with_capacity(n);
    let mut counts = Vec::with_capacity(n);
    for axis in 0..n {
        let mut distinct: Vec<&BigRational> = coords.iter().map(|p| &p[axis]).collect();
        distinct.sort();
        distinct.dedup();
        if distinct.len() < 2 {
            return Err(CsvError::Malformed(format!(
                "axis {} has fewer than two coordinates",
                axis + 1
            )));
        }
        steps.push(distinct[1].clone());
        counts.push(distinct.len() - 1);
    }
    let spec = GridSpec::new(steps, counts)?;
    if spec.len() != values.len() {
        return Err(CsvError::Malformed("rows do not form a full grid".into()));
    }
    // rows may come in any order
    let mut ordered = vec![ExtValue::Infinite; values.len()];
    let mut seen = vec![false; values.len()];
    for (p, v) in coords.iter().zip(values) {
        let idx: Vec<usize> = p
            .iter()
            .zip(spec.steps())
            .map(|(c, h)| {
                let k = c / h;
                if k.is_integer() {
                    num_traits::ToPrimitive::to_usize(&k.to_integer())
                } else {
                    None
                }
            })
            .collect::<Option<_>>()
            .ok_or_else(|| CsvError::Malformed("coordinate off the grid".into()))?;
        if !spec.contains(&idx) {
            return Err(CsvError::Malformed("coordinate off the grid".into()));
        }
        let f = spec.flat(&idx);
        if seen[f] {
            return Err(CsvError::Malformed("duplicate point".into()));
        }
        seen[f] = true;
        ordered[f] = v;
    }
    Ok(GridFn::new(spec, ordered)?)
}
