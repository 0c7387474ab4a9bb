//! Parsing of holdings records and quarterly snapshot assembly.
//!
//! Records arrive per fund *class*; classes of the same fund are first
//! consolidated through a [`ClassMap`], then for each fund only the records
//! from its most recent report date inside the target quarter contribute to
//! the snapshot. Funds without a report in the quarter are absent -- there
//! is no carry-forward from earlier quarters.

use std::collections::HashMap;
use std::io::Read;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::io::{check_header, csv_row_error};
use crate::network::{EdgeRecord, HoldingNetwork, Quarter};

pub const HOLDINGS_HEADER: [&str; 4] = ["fund_class_id", "report_date", "asset_id", "market_value"];
pub const CLASS_MAP_HEADER: [&str; 2] = ["fund_class_id", "fund_id"];

/// One row of a holdings file: a fund-class position at a report date.
#[derive(Debug, Clone, PartialEq)]
pub struct HoldingRecord {
    pub fund_class_id: String,
    pub report_date: NaiveDate,
    pub asset_id: String,
    pub market_value: f64,
    /// 1-based line in the source file, kept for diagnostics.
    pub line: u64,
}

/// Mapping from share-class ids to consolidated fund ids. Ids without an
/// entry pass through unchanged.
#[derive(Debug, Clone, Default)]
pub struct ClassMap {
    map: HashMap<String, String>,
}

impl ClassMap {
    pub fn identity() -> Self {
        ClassMap::default()
    }

    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, S)>,
        S: Into<String>,
    {
        ClassMap {
            map: pairs.into_iter().map(|(c, f)| (c.into(), f.into())).collect(),
        }
    }

    /// Parse a class map CSV with header `fund_class_id,fund_id`.
    pub fn parse<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        check_header(&mut rdr, &CLASS_MAP_HEADER)?;
        let mut map = HashMap::new();
        for row in rdr.records() {
            let row = row.map_err(csv_row_error)?;
            let line = row.position().map_or(0, |p| p.line());
            if row.len() != 2 {
                return Err(Error::MalformedRecord {
                    line,
                    message: format!("expected 2 fields, found {}", row.len()),
                });
            }
            map.insert(row[0].to_owned(), row[1].to_owned());
        }
        Ok(ClassMap { map })
    }

    pub fn resolve<'a>(&'a self, class_id: &'a str) -> &'a str {
        self.map.get(class_id).map_or(class_id, String::as_str)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Parse a holdings CSV with header
/// `fund_class_id,report_date,asset_id,market_value` (dates ISO-8601).
pub fn parse_holdings<R: Read>(reader: R) -> Result<Vec<HoldingRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    check_header(&mut rdr, &HOLDINGS_HEADER)?;
    let mut records = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(csv_row_error)?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != 4 {
            return Err(Error::MalformedRecord {
                line,
                message: format!("expected 4 fields, found {}", row.len()),
            });
        }
        let report_date = NaiveDate::parse_from_str(&row[1], "%Y-%m-%d").map_err(|_| {
            Error::MalformedRecord {
                line,
                message: format!("invalid report date {:?}", &row[1]),
            }
        })?;
        let market_value: f64 = row[3].parse().map_err(|_| Error::MalformedRecord {
            line,
            message: format!("invalid market value {:?}", &row[3]),
        })?;
        if !market_value.is_finite() {
            return Err(Error::MalformedRecord {
                line,
                message: format!("non-finite market value {market_value}"),
            });
        }
        if market_value < 0.0 {
            return Err(Error::MalformedRecord {
                line,
                message: format!("negative market value {market_value}"),
            });
        }
        records.push(HoldingRecord {
            fund_class_id: row[0].to_owned(),
            report_date,
            asset_id: row[2].to_owned(),
            market_value,
            line,
        });
    }
    Ok(records)
}

/// Replace class ids with consolidated fund ids. Positions of different
/// classes of the same fund merge later through duplicate summing in
/// [`HoldingNetwork::build`].
pub fn consolidate_classes(records: Vec<HoldingRecord>, class_map: &ClassMap) -> Vec<HoldingRecord> {
    records
        .into_iter()
        .map(|mut rec| {
            rec.fund_class_id = class_map.resolve(&rec.fund_class_id).to_owned();
            rec
        })
        .collect()
}

/// Assemble the snapshot for one quarter.
///
/// For each fund, only the records at its most recent report date within
/// the quarter survive; everything else is discarded. The survivors are
/// handed to [`HoldingNetwork::build`], which sums duplicates and drops
/// zero-value positions.
pub fn build_quarter_snapshot(records: &[HoldingRecord], quarter: Quarter) -> Result<HoldingNetwork> {
    let mut latest: HashMap<&str, NaiveDate> = HashMap::new();
    for rec in records {
        if !quarter.contains(rec.report_date) {
            continue;
        }
        latest
            .entry(rec.fund_class_id.as_str())
            .and_modify(|d| *d = (*d).max(rec.report_date))
            .or_insert(rec.report_date);
    }
    if latest.is_empty() {
        return Err(Error::EmptyQuarter(quarter.to_string()));
    }
    let edges = records
        .iter()
        .filter(|rec| latest.get(rec.fund_class_id.as_str()) == Some(&rec.report_date))
        .map(|rec| EdgeRecord::new(rec.fund_class_id.clone(), rec.asset_id.clone(), rec.market_value));
    match HoldingNetwork::build(quarter, edges) {
        Err(Error::NoSurvivingEdges) | Err(Error::EmptyEdgeList) => {
            Err(Error::EmptyQuarter(quarter.to_string()))
        }
        other => other,
    }
}
