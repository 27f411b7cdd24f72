//! CSV and SVG output of section records.

use std::io::{Read, Write};

use super::{FateKind, IcOutcome, SectionRecord};

pub const CSV_HEADER: [&str; 9] = ["lambda", "energy", "ic_index", "crossing_index", "t", "A", "P_A", "B", "fate"];

/// 17 significant digits; parses back to the same f64.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, thiserror::Error)]
pub enum EmitError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed row {row}: {message}")]
    Malformed { row: usize, message: String },
}

fn fate_of(outcomes: &[IcOutcome], ic: usize) -> &'static str {
    outcomes
        .iter()
        .find(|o| o.ic_index == ic)
        .and_then(|o| o.fate.as_ref())
        .map_or("unknown", |f| f.kind.label())
}

pub fn write_csv<W: Write>(
    w: W,
    lambda: f64,
    energy: f64,
    records: &[SectionRecord],
    outcomes: &[IcOutcome],
) -> Result<(), EmitError> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(CSV_HEADER)?;
    let (l, e) = (fmt17(lambda), fmt17(energy));
    for r in records {
        wr.write_record([
            l.as_str(),
            e.as_str(),
            &r.ic_index.to_string(),
            &r.crossing_index.to_string(),
            &fmt17(r.t),
            &fmt17(r.a),
            &fmt17(r.pa),
            &fmt17(r.b),
            fate_of(outcomes, r.ic_index),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

/// One row of the section CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvRow {
    pub lambda: f64,
    pub energy: f64,
    pub ic_index: usize,
    pub crossing_index: usize,
    pub t: f64,
    pub a: f64,
    pub pa: f64,
    pub b: f64,
    pub fate: String,
}

pub fn read_csv<R: Read>(r: R) -> Result<Vec<CsvRow>, EmitError> {
    let mut rd = csv::Reader::from_reader(r);
    let header: Vec<String> = rd.headers()?.iter().map(String::from).collect();
    if header != CSV_HEADER {
        return Err(EmitError::Malformed { row: 0, message: format!("unexpected header {header:?}") });
    }
    let mut out = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let bad = |m: &str| EmitError::Malformed { row: i + 1, message: m.to_string() };
        let f = |k: usize| rec[k].parse::<f64>().map_err(|_| bad("not a number"));
        let u = |k: usize| rec[k].parse::<usize>().map_err(|_| bad("not an index"));
        out.push(CsvRow {
            lambda: f(0)?,
            energy: f(1)?,
            ic_index: u(2)?,
            crossing_index: u(3)?,
            t: f(4)?,
            a: f(5)?,
            pa: f(6)?,
            b: f(7)?,
            fate: rec[8].to_string(),
        });
    }
    Ok(out)
}

/// Per-IC fates, including ICs without crossings and infeasible ones.
pub fn write_fates_csv<W: Write>(w: W, outcomes: &[IcOutcome]) -> Result<(), EmitError> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["ic_index", "A", "P_A", "B", "fate", "t_fate", "crossings"])?;
    for o in outcomes {
        let (fate, t) = match (&o.fate, &o.infeasible) {
            (Some(f), _) => (f.kind.label(), fmt17(f.t)),
            (None, _) => ("infeasible", String::new()),
        };
        wr.write_record([
            o.ic_index.to_string(),
            fmt17(o.a),
            fmt17(o.pa),
            o.b.map(fmt17).unwrap_or_default(),
            fate.to_string(),
            t,
            o.crossings.to_string(),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

/// Scatter of the (A, P_A) projection, one circle per record.
pub fn svg_scatter(records: &[SectionRecord], outcomes: &[IcOutcome]) -> String {
    let (w, h, pad) = (800.0, 600.0, 40.0);
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for r in records {
        x0 = x0.min(r.a);
        x1 = x1.max(r.a);
        y0 = y0.min(r.pa);
        y1 = y1.max(r.pa);
    }
    if records.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let sx = if x1 > x0 { (w - 2.0 * pad) / (x1 - x0) } else { 1.0 };
    let sy = if y1 > y0 { (h - 2.0 * pad) / (y1 - y0) } else { 1.0 };
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{pad}\" y=\"{}\" font-size=\"12\">A in [{x0:.4}, {x1:.4}], P_A in [{y0:.4}, {y1:.4}]</text>\n",
        pad * 0.6
    );
    for r in records {
        let color = match outcomes.iter().find(|o| o.ic_index == r.ic_index).and_then(|o| o.fate.as_ref()).map(|f| f.kind) {
            Some(FateKind::RanToTmax) => "black",
            Some(FateKind::Escaped) => "red",
            _ => "gray",
        };
        let cx = pad + (r.a - x0) * sx;
        let cy = h - pad - (r.pa - y0) * sy;
        s.push_str(&format!("<circle class=\"pt\" cx=\"{cx:.3}\" cy=\"{cy:.3}\" r=\"0.8\" fill=\"{color}\"/>\n"));
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(ic: usize, k: usize, t: f64) -> SectionRecord {
        SectionRecord { ic_index: ic, crossing_index: k, t, a: 0.1 + t / 3.0, pa: -t / 7.0, b: 1.0 / 3.0, pb: 0.0, pb_dot: 1.0 }
    }

    #[test]
    fn three_records_round_trip() {
        let recs = [rec(0, 0, 1.0), rec(0, 1, 2.5), rec(3, 0, 0.1)];
        let mut buf = Vec::new();
        write_csv(&mut buf, 0.1, 0.25, &recs, &[]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert_eq!(text.lines().next().unwrap(), "lambda,energy,ic_index,crossing_index,t,A,P_A,B,fate");
        let rows = read_csv(buf.as_slice()).unwrap();
        for (r, x) in rows.iter().zip(&recs) {
            assert_eq!((r.t, r.a, r.pa, r.b), (x.t, x.a, x.pa, x.b));
        }
        assert_eq!(svg_scatter(&recs, &[]).matches("<circle").count(), 3);
    }
}
