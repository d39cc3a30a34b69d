//! `trajectory.csv`: one row per agent per step.
//!
//! Floats are written in scientific notation with 17 significant digits, so
//! every value reads back bit-for-bit.

use crate::InputError;
use hetsafe_core::{FilterStatus, Scenario, TrajectoryLog, Vec2};
use std::io::{Read, Write};

pub const HEADER: [&str; 11] = [
    "t",
    "agent_id",
    "px",
    "py",
    "vx",
    "vy",
    "ux",
    "uy",
    "ux_nom",
    "uy_nom",
    "qp_status",
];

#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub t: f64,
    pub agent_id: usize,
    pub p: Vec2,
    pub v: Vec2,
    pub u: Vec2,
    pub u_nom: Vec2,
    pub status: FilterStatus,
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(
    log: &TrajectoryLog,
    scenario: &Scenario,
    out: W,
) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in &log.records {
        for (a, spec) in r.agents.iter().zip(&scenario.agents) {
            let s = &a.state;
            w.write_record([
                fmt_f64(r.t),
                spec.params.id.to_string(),
                fmt_f64(s.p.x),
                fmt_f64(s.p.y),
                fmt_f64(s.v.x),
                fmt_f64(s.v.y),
                fmt_f64(a.u_applied.0.x),
                fmt_f64(a.u_applied.0.y),
                fmt_f64(a.u_nominal.0.x),
                fmt_f64(a.u_nominal.0.y),
                a.status.as_str().to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string(log: &TrajectoryLog, scenario: &Scenario) -> String {
    let mut buf = Vec::new();
    write_csv(log, scenario, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("csv output is ascii")
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<CsvRow>, InputError> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr
        .headers()
        .map_err(|e| InputError::Schema(e.to_string()))?;
    if header.iter().ne(HEADER.iter().copied()) {
        return Err(InputError::Schema(format!(
            "unexpected csv header {header:?}"
        )));
    }
    let mut rows = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| InputError::Schema(e.to_string()))?;
        let bad = |col: &str| InputError::Schema(format!("row {}: bad `{col}`", line + 1));
        let f = |k: usize| rec[k].parse::<f64>().map_err(|_| bad(HEADER[k]));
        rows.push(CsvRow {
            t: f(0)?,
            agent_id: rec[1].parse().map_err(|_| bad("agent_id"))?,
            p: Vec2::new(f(2)?, f(3)?),
            v: Vec2::new(f(4)?, f(5)?),
            u: Vec2::new(f(6)?, f(7)?),
            u_nom: Vec2::new(f(8)?, f(9)?),
            status: FilterStatus::parse(&rec[10]).ok_or_else(|| bad("qp_status"))?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use hetsafe_core::sim::{presets, run};

    #[test]
    fn header_and_row_count() {
        let mut sc = presets::headon2(1.0, 1.0);
        sc.t_end = 1.0;
        let (log, _) = run(&sc).unwrap();
        let text = to_csv_string(&log, &sc);
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), HEADER.join(","));
        assert_eq!(lines.count(), log.records.len() * sc.n_agents());
    }

    #[test]
    fn floats_round_trip_exactly() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02e23, 0.0, -0.0] {
            let back: f64 = fmt_f64(x).parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits());
        }
        // At least nine significant digits even for short decimals.
        assert!(
            fmt_f64(0.5)
                .trim_start_matches('-')
                .split('e')
                .next()
                .unwrap()
                .len()
                >= 10
        );
    }

    #[test]
    fn rejects_wrong_header() {
        let err = read_csv("a,b\n1,2\n".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("header"));
    }
}
