//! Edge-list serialization.
//!
//! Snapshots are interchanged as UTF-8 CSV with header
//! `fund_id,asset_id,market_value`, values in dollars with `.` as the
//! decimal separator. Floats are written in Rust's shortest round-trip
//! form, so export -> import is lossless.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{EdgeRecord, HoldingNetwork, SnapshotStats};

pub const EDGE_LIST_HEADER: [&str; 3] = ["fund_id", "asset_id", "market_value"];

/// JSON sidecar written next to exported snapshots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotSummary {
    pub quarter: String,
    pub n_funds: usize,
    pub n_assets: usize,
    pub e: usize,
    pub rho: f64,
    pub kbar: f64,
    pub s_tot: f64,
}

impl SnapshotSummary {
    pub fn new(quarter: &str, stats: &SnapshotStats) -> Self {
        SnapshotSummary {
            quarter: quarter.to_owned(),
            n_funds: stats.n_funds,
            n_assets: stats.n_assets,
            e: stats.n_edges,
            rho: stats.density,
            kbar: stats.mean_fund_degree,
            s_tot: stats.total_value,
        }
    }
}

/// Write the canonical fund-major edge list of a network.
pub fn write_edge_list<W: Write>(net: &HoldingNetwork, writer: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(EDGE_LIST_HEADER).map_err(csv_io)?;
    for rec in net.edge_records() {
        out.write_record([
            rec.fund_id.as_str(),
            rec.asset_id.as_str(),
            &rec.market_value.to_string(),
        ])
        .map_err(csv_io)?;
    }
    out.flush()?;
    Ok(())
}

/// Read an edge list previously written by [`write_edge_list`] (or produced
/// by hand in the same format).
pub fn read_edge_list<R: Read>(reader: R) -> Result<Vec<EdgeRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    check_header(&mut rdr, &EDGE_LIST_HEADER)?;
    let mut records = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(csv_row_error)?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != 3 {
            return Err(Error::MalformedRecord {
                line,
                message: format!("expected 3 fields, found {}", row.len()),
            });
        }
        let market_value: f64 = row[2].parse().map_err(|_| Error::MalformedRecord {
            line,
            message: format!("invalid market value {:?}", &row[2]),
        })?;
        records.push(EdgeRecord::new(&row[0], &row[1], market_value));
    }
    Ok(records)
}

pub(crate) fn check_header<R: Read>(rdr: &mut csv::Reader<R>, expected: &[&str]) -> Result<()> {
    let headers = rdr.headers().map_err(csv_row_error)?;
    let found: Vec<&str> = headers.iter().map(str::trim).collect();
    if found != expected {
        return Err(Error::UnexpectedHeader {
            expected: expected.join(","),
            found: found.join(","),
        });
    }
    Ok(())
}

pub(crate) fn csv_row_error(err: csv::Error) -> Error {
    let line = match err.kind() {
        csv::ErrorKind::Utf8 { pos, .. } => pos.as_ref().map_or(0, |p| p.line()),
        csv::ErrorKind::UnequalLengths { pos, .. } => pos.as_ref().map_or(0, |p| p.line()),
        _ => 0,
    };
    Error::MalformedRecord {
        line,
        message: err.to_string(),
    }
}

fn csv_io(err: csv::Error) -> Error {
    match err.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::MalformedRecord {
            line: 0,
            message: format!("{other:?}"),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::Quarter;

    fn toy() -> HoldingNetwork {
        HoldingNetwork::build(
            "2006Q2".parse::<Quarter>().unwrap(),
            vec![
                EdgeRecord::new("F1", "A1", 60.5),
                EdgeRecord::new("F1", "A2", 40.25),
                EdgeRecord::new("F2", "A2", 100.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn round_trip_preserves_edges() {
        let net = toy();
        let mut buf = Vec::new();
        write_edge_list(&net, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("fund_id,asset_id,market_value\n"));
        let records = read_edge_list(buf.as_slice()).unwrap();
        assert_eq!(records, net.edge_records().collect::<Vec<_>>());
    }

    #[test]
    fn shortest_float_form_survives_round_trip() {
        let net = HoldingNetwork::build(
            "2006Q2".parse::<Quarter>().unwrap(),
            vec![EdgeRecord::new("F", "A", 0.1), EdgeRecord::new("F", "B", 1e12 + 0.5)],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_edge_list(&net, &mut buf).unwrap();
        let records = read_edge_list(buf.as_slice()).unwrap();
        let rebuilt = HoldingNetwork::build(net.quarter(), records).unwrap();
        assert_eq!(
            net.edge_records().collect::<Vec<_>>(),
            rebuilt.edge_records().collect::<Vec<_>>()
        );
    }

    #[test]
    fn rejects_unknown_header() {
        let err = read_edge_list("fund,asset,value\nF1,A1,1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::UnexpectedHeader { .. }));
    }

    #[test]
    fn reports_line_of_bad_value() {
        let data = "fund_id,asset_id,market_value\nF1,A1,1.0\nF2,A2,abc\n";
        match read_edge_list(data.as_bytes()).unwrap_err() {
            Error::MalformedRecord { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other:?}"),
        }
    }
}
