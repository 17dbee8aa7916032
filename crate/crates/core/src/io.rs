//! Columnar text formats for pseudo-orbits and shadow reports.
//!
//! Leading `# key: value` lines carry metadata. The orbit header is
//! `index,symbol,x0[,x1…],alpha`; the final row has empty symbol and alpha.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::orbit::PseudoOrbit;
use crate::shadow::ShadowReport;
use crate::spaces::Space;

pub type Metadata = Vec<(String, String)>;

pub fn write_comments<W: Write>(out: &mut W, meta: &[(String, String)]) -> Result<()> {
    for (k, v) in meta {
        writeln!(out, "# {k}: {v}")?;
    }
    Ok(())
}

fn coordinate_headers(space: &Space) -> Vec<String> {
    (0..space.coordinate_count()).map(|i| format!("x{i}")).collect()
}

pub fn write_orbit<W: Write>(mut out: W, orbit: &PseudoOrbit, meta: &[(String, String)]) -> Result<()> {
    write_comments(&mut out, meta)?;
    let space = orbit.space();
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["index".to_string(), "symbol".to_string()];
    header.extend(coordinate_headers(space));
    header.push("alpha".into());
    w.write_record(&header)?;
    for (i, p) in orbit.points().iter().enumerate() {
        let mut row = vec![i.to_string()];
        row.push(orbit.symbols().get(i).map(|s| s.to_string()).unwrap_or_default());
        row.extend(space.coordinates(p)?);
        row.push(orbit.errors().get(i).map(|a| a.to_string()).unwrap_or_default());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads an orbit written by [`write_orbit`], keeping the stored ledger.
pub fn read_orbit<R: BufRead>(mut input: R, space: &Space) -> Result<(PseudoOrbit, Metadata)> {
    let mut meta = Vec::new();
    let mut rest = String::new();
    let mut line = String::new();
    loop {
        line.clear();
        if input.read_line(&mut line)? == 0 {
            break;
        }
        if let Some(c) = line.strip_prefix('#') {
            if let Some((k, v)) = c.split_once(':') {
                meta.push((k.trim().to_string(), v.trim().to_string()));
            }
        } else {
            rest.push_str(&line);
            input.read_to_string(&mut rest)?;
            break;
        }
    }
    let mut r = csv::ReaderBuilder::new().from_reader(rest.as_bytes());
    let k = space.coordinate_count();
    let header = r.headers()?.clone();
    if header.len() != k + 3 {
        return Err(Error::Parse(format!(
            "{} expects {} columns, header has {}",
            space.name(),
            k + 3,
            header.len()
        )));
    }
    let mut points = Vec::new();
    let mut symbols = Vec::new();
    let mut errors = Vec::new();
    let mut closed = false;
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        if closed {
            return Err(Error::Parse(format!("row {row} follows the final point")));
        }
        let index: usize = rec[0]
            .parse()
            .map_err(|e| Error::Parse(format!("row {row} index: {e}")))?;
        if index != row {
            return Err(Error::Parse(format!("row {row} has index {index}")));
        }
        let fields: Vec<&str> = (2..2 + k).map(|j| &rec[j]).collect();
        points.push(space.parse_coordinates(&fields)?);
        let (sym, alpha) = (&rec[1], &rec[k + 2]);
        if sym.is_empty() && alpha.is_empty() {
            closed = true;
            continue;
        }
        symbols.push(
            sym.parse()
                .map_err(|e| Error::Parse(format!("row {row} symbol: {e}")))?,
        );
        errors.push(
            alpha
                .parse()
                .map_err(|e| Error::Parse(format!("row {row} alpha: {e}")))?,
        );
    }
    if !closed {
        return Err(Error::Parse("missing final point row".into()));
    }
    Ok((PseudoOrbit::from_parts(space.clone(), points, symbols, errors)?, meta))
}

/// Writes a shadow report with one row per orbit point and the summary as
/// comment metadata.
pub fn write_shadow_report<W: Write>(
    mut out: W,
    report: &ShadowReport,
    space: &Space,
    meta: &[(String, String)],
) -> Result<()> {
    let mut all = meta.to_vec();
    all.push(("z".into(), space.coordinates(&report.z)?.join(" ")));
    all.push(("horizon".into(), report.horizon.to_string()));
    all.push(("window".into(), report.window.to_string()));
    all.push(("tail".into(), report.tail.to_string()));
    all.push(("max_distance".into(), report.max_distance().to_string()));
    write_comments(&mut out, &all)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "symbol", "distance", "average", "bound", "cumulative_bound"])?;
    for (i, d) in report.distances.iter().enumerate() {
        let opt = |v: Option<&f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let ledger = report.bounds.as_ref();
        w.write_record([
            i.to_string(),
            report.symbols.get(i).map(|s| s.to_string()).unwrap_or_default(),
            d.to_string(),
            report.profile[i].to_string(),
            opt(ledger.and_then(|l| l.per_step.get(i))),
            opt(ledger.and_then(|l| l.cumulative.get(i))),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Example;
    use crate::ifs::{product_ifs, SymbolStream};
    use crate::orbit::{noisy_average_orbit, NoiseModel};
    use crate::spaces::{BinarySeq, Point};

    #[test]
    fn orbit_round_trip_is_exact() {
        let f = Example::Sierpinski.make().unwrap();
        let g = Example::Sigma2Shift.make().unwrap();
        let h = product_ifs(&f, &g);
        let start = Point::pair(Point::Pair(0.3, 0.2), Point::Seq(BinarySeq::constant(0)));
        let o = noisy_average_orbit(
            &h,
            &start,
            &SymbolStream::Random { seed: 9, alphabet: 6 },
            40,
            0.2,
            NoiseModel::Uniform,
            4,
        )
        .unwrap();
        let meta = vec![("system".to_string(), h.name().to_string())];
        let mut buf = Vec::new();
        write_orbit(&mut buf, &o, &meta).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# system: "));
        assert!(text.contains("index,symbol,x0,x1,x2,alpha"));
        let (back, m) = read_orbit(&buf[..], h.space()).unwrap();
        assert_eq!(back, o);
        assert_eq!(m, meta);
        assert_eq!(back.ledger_discrepancy(&h).unwrap(), 0.0);
    }

    #[test]
    fn malformed_input_is_rejected() {
        let space = Space::unit_interval();
        assert!(read_orbit("index,symbol,x0,alpha\n0,0,0.5,0\n".as_bytes(), &space).is_err());
        assert!(read_orbit("index,symbol,x0,alpha\n0,0,0.5,0\n2,,0.25,\n".as_bytes(), &space).is_err());
        assert!(read_orbit("index,symbol,x0\n0,,0.5\n".as_bytes(), &space).is_err());
        assert!(read_orbit("index,symbol,x0,alpha\n0,,1.5,\n".as_bytes(), &space).is_err());
        let (o, _) = read_orbit("index,symbol,x0,alpha\n0,1,0.5,0.25\n1,,0.5,\n".as_bytes(), &space).unwrap();
        assert_eq!(o.errors(), &[0.25]);
    }

    #[test]
    fn shadow_report_columns() {
        let f = crate::catalog::interval_halves();
        let o = noisy_average_orbit(
            &f,
            &Point::Real(0.3),
            &SymbolStream::Constant(1),
            12,
            0.01,
            NoiseModel::Uniform,
            2,
        )
        .unwrap();
        let r = crate::shadow::constructive_shadow(&f, &o, 0.1).unwrap();
        let mut buf = Vec::new();
        write_shadow_report(&mut buf, &r, f.space(), &[]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# z: 0.3\n"));
        let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows[0], "n,symbol,distance,average,bound,cumulative_bound");
        assert_eq!(rows.len(), 14);
        assert!(rows[13].starts_with("12,,"));
    }
}
