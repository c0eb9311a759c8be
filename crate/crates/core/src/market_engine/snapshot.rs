use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::fixed_point::FixedDec;

/// One row of the state-snapshot CSV.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub block: u64,
    #[serde(rename = "A")]
    pub gross_deposits: FixedDec,
    #[serde(rename = "L")]
    pub total_loans: FixedDec,
    pub reserves: FixedDec,
    pub index: FixedDec,
    pub utilization: FixedDec,
    pub borrow_rate: FixedDec,
    pub supply_rate: FixedDec,
}

pub fn write_snapshots<W: Write>(out: W, rows: &[Snapshot]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(["block", "A", "L", "reserves", "index", "utilization", "borrow_rate", "supply_rate"])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_snapshots<R: Read>(input: R) -> Result<Vec<Snapshot>, csv::Error> {
    csv::Reader::from_reader(input).deserialize().collect()
}
