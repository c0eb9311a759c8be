//! Event-log CSV: `block,action,account,amount`.
//!
//! `set_model` carries the model as JSON in the `account` column (quoted per
//! RFC 4180) and leaves `amount` empty; `set_price` leaves `account` empty;
//! `liquidate` writes `liquidator:borrower` in `account`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fixed_point::FixedDec;
use crate::rate_models::RateModel;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub block: u64,
    pub action: Action,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Action {
    Mint { account: String, amount: FixedDec },
    Redeem { account: String, shares: FixedDec },
    Borrow { account: String, amount: FixedDec },
    Repay { account: String, amount: FixedDec },
    AddCollateral { account: String, amount: FixedDec },
    Liquidate { liquidator: String, borrower: String, amount: FixedDec },
    SetModel { model: RateModel },
    SetPrice { price: FixedDec },
}

#[derive(Debug, Error)]
pub enum EventCsvError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("line {line}: {msg}")]
    Row { line: u64, msg: String },
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    block: u64,
    action: String,
    account: String,
    amount: String,
}

impl Event {
    fn to_row(&self) -> Row {
        let (action, account, amount) = match &self.action {
            Action::Mint { account, amount } => ("mint", account.clone(), amount.to_string()),
            Action::Redeem { account, shares } => ("redeem", account.clone(), shares.to_string()),
            Action::Borrow { account, amount } => ("borrow", account.clone(), amount.to_string()),
            Action::Repay { account, amount } => ("repay", account.clone(), amount.to_string()),
            Action::AddCollateral { account, amount } => {
                ("add_collateral", account.clone(), amount.to_string())
            }
            Action::Liquidate { liquidator, borrower, amount } => {
                ("liquidate", format!("{liquidator}:{borrower}"), amount.to_string())
            }
            Action::SetModel { model } => (
                "set_model",
                serde_json::to_string(model).expect("models serialize"),
                String::new(),
            ),
            Action::SetPrice { price } => ("set_price", String::new(), price.to_string()),
        };
        Row { block: self.block, action: action.to_string(), account, amount }
    }

    fn from_row(row: Row) -> Result<Event, String> {
        let amount = || row.amount.parse::<FixedDec>().map_err(|e| e.to_string());
        let account = row.account.clone();
        let action = match row.action.as_str() {
            "mint" => Action::Mint { account, amount: amount()? },
            "redeem" => Action::Redeem { account, shares: amount()? },
            "borrow" => Action::Borrow { account, amount: amount()? },
            "repay" => Action::Repay { account, amount: amount()? },
            "add_collateral" => Action::AddCollateral { account, amount: amount()? },
            "liquidate" => {
                let (liquidator, borrower) = row
                    .account
                    .split_once(':')
                    .ok_or("liquidate expects liquidator:borrower")?;
                Action::Liquidate {
                    liquidator: liquidator.to_string(),
                    borrower: borrower.to_string(),
                    amount: amount()?,
                }
            }
            "set_model" => Action::SetModel {
                model: serde_json::from_str(&row.account).map_err(|e| e.to_string())?,
            },
            "set_price" => Action::SetPrice { price: amount()? },
            other => return Err(format!("unknown action {other:?}")),
        };
        Ok(Event { block: row.block, action })
    }
}

pub fn write_events<W: Write>(out: W, events: &[Event]) -> Result<(), EventCsvError> {
    let mut w = csv::Writer::from_writer(out);
    for e in events {
        w.serialize(e.to_row())?;
    }
    if events.is_empty() {
        w.write_record(["block", "action", "account", "amount"])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_events<R: Read>(input: R) -> Result<Vec<Event>, EventCsvError> {
    let mut r = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for rec in r.deserialize::<Row>() {
        let row = rec?;
        let line = out.len() as u64 + 2;
        out.push(Event::from_row(row).map_err(|msg| EventCsvError::Row { line, msg })?);
    }
    Ok(out)
}
