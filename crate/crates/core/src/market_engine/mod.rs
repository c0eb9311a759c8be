//! Block-level state machine for one loanable-funds market.
//!
//! Interest accrues with a simple-interest factor `(1 + r t)` over each
//! interval between state-changing events, at the rate fixed at the start of
//! the interval. Every user action accrues first.
//!
//! Two accounting conventions, selected by [`CeilingPolicy`]:
//!
//! * `Capped` (Aave): reserves are held inside gross deposits `A`. Accrual
//!   adds the full interest to `A` and the reserve share to `reserves`, so
//!   cash `A - L` is untouched by accrual and `L <= A` always holds.
//!   Supplier equity is `A - reserves`.
//! * `Uncapped` (Compound, dYdX): reserves sit outside `A`, which only grows
//!   by the supplier share `(1 - lambda)` of interest. Loans grow faster than
//!   deposits, so utilization can pass 100% through accrual alone.
//!   Supplier equity is `A`.
//!
//! The derivative-token exchange rate is supplier equity over share supply.

mod events;
mod snapshot;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fixed_point::{FixedDec, FixedError};
use crate::rate_models::{self, RateError, RateModel};

pub use events::{read_events, write_events, Action, Event, EventCsvError};
pub use snapshot::{read_snapshots, write_snapshots, Snapshot};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("not enough cash in the market: requested {requested}, available {available}")]
    InsufficientLiquidity { requested: FixedDec, available: FixedDec },
    #[error("account {0} holds fewer shares than requested")]
    InsufficientShares(String),
    #[error("account {0} lacks collateral for this borrow")]
    InsufficientCollateral(String),
    #[error("borrow of {requested} exceeds available cash {available}")]
    InsufficientCash { requested: FixedDec, available: FixedDec },
    #[error("repayment exceeds debt of account {0}")]
    ExceedsDebt(String),
    #[error("account {0} is not undercollateralized")]
    NotUndercollateralized(String),
    #[error("liquidation repays more than the close factor allows")]
    RepayTooLarge,
    #[error("unknown account {0}")]
    UnknownAccount(String),
    #[error("cannot move from block {current} back to {requested}")]
    BlockInPast { current: u64, requested: u64 },
    #[error("amount must be positive, got {0}")]
    InvalidAmount(FixedDec),
    #[error("invalid market parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Rate(#[from] RateError),
    #[error(transparent)]
    Arithmetic(#[from] FixedError),
}

pub type Result<T, E = EngineError> = std::result::Result<T, E>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CeilingPolicy {
    Capped,
    Uncapped,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Position {
    pub supplied_shares: FixedDec,
    pub debt_principal: FixedDec,
    pub debt_entry_index: FixedDec,
    pub collateral_balance: FixedDec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiquidationParams {
    /// Minimum collateral value over debt value.
    pub liquidation_threshold: FixedDec,
    pub discount: FixedDec,
    pub penalty: FixedDec,
    /// Largest fraction of a debt repayable in one liquidation.
    #[serde(default = "LiquidationParams::default_close_factor")]
    pub close_factor: FixedDec,
}

impl LiquidationParams {
    fn default_close_factor() -> FixedDec {
        FixedDec::from_mantissa(crate::fixed_point::SCALE / 2)
    }

    pub fn validate(&self) -> Result<()> {
        let frac = |v: FixedDec| !v.is_negative() && v < FixedDec::ONE;
        if self.liquidation_threshold <= FixedDec::ONE {
            return Err(EngineError::InvalidParameter("liquidation threshold must exceed 1".into()));
        }
        if !frac(self.discount) || !frac(self.penalty) {
            return Err(EngineError::InvalidParameter("discount and penalty must lie in [0, 1)".into()));
        }
        if self.close_factor <= FixedDec::ZERO || self.close_factor > FixedDec::ONE {
            return Err(EngineError::InvalidParameter("close factor must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

impl Default for LiquidationParams {
    fn default() -> Self {
        LiquidationParams {
            liquidation_threshold: FixedDec::from_ratio(3, 2).expect("constant"),
            discount: FixedDec::from_ratio(1, 20).expect("constant"),
            penalty: FixedDec::from_ratio(1, 20).expect("constant"),
            close_factor: Self::default_close_factor(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarketState {
    pub block_height: u64,
    pub gross_deposits: FixedDec,
    pub total_loans: FixedDec,
    pub reserves: FixedDec,
    pub index: FixedDec,
    pub derivative_supply: FixedDec,
    pub model: RateModel,
    pub reserve_factor: FixedDec,
    pub ceiling_policy: CeilingPolicy,
    pub liquidation: LiquidationParams,
    /// Price of the single collateral asset in underlying units.
    pub collateral_price: FixedDec,
    pub accounts: BTreeMap<String, Position>,
}

/// Aggregates after accruing to some block, not yet committed.
#[derive(Clone, Copy, Debug)]
struct Accrued {
    block: u64,
    deposits: FixedDec,
    loans: FixedDec,
    reserves: FixedDec,
    index: FixedDec,
}

impl MarketState {
    pub fn new(
        model: RateModel,
        reserve_factor: FixedDec,
        ceiling_policy: CeilingPolicy,
        liquidation: LiquidationParams,
    ) -> Result<Self> {
        model.validate()?;
        liquidation.validate()?;
        if reserve_factor.is_negative() || reserve_factor > FixedDec::ONE {
            return Err(EngineError::InvalidParameter("reserve factor must lie in [0, 1]".into()));
        }
        Ok(MarketState {
            block_height: 0,
            gross_deposits: FixedDec::ZERO,
            total_loans: FixedDec::ZERO,
            reserves: FixedDec::ZERO,
            index: FixedDec::ONE,
            derivative_supply: FixedDec::ZERO,
            model,
            reserve_factor,
            ceiling_policy,
            liquidation,
            collateral_price: FixedDec::ONE,
            accounts: BTreeMap::new(),
        })
    }

    pub fn utilization(&self) -> Result<FixedDec> {
        Ok(rate_models::utilization(self.total_loans, self.gross_deposits)?)
    }

    pub fn borrow_rate(&self) -> Result<FixedDec> {
        Ok(rate_models::borrow_rate(&self.model, self.utilization()?)?)
    }

    /// Saving rate implied by the model; zero for families that do not define one.
    pub fn supply_rate(&self) -> Result<FixedDec> {
        match rate_models::saving_rate(&self.model, self.utilization()?) {
            Ok(r) => Ok(r),
            Err(RateError::NotDefinedForModel(_)) => Ok(FixedDec::ZERO),
            Err(e) => Err(e.into()),
        }
    }

    /// Cash on hand available to suppliers and borrowers, `max(A - L, 0)`.
    pub fn cash(&self) -> FixedDec {
        self.gross_deposits.saturating_sub_zero(self.total_loans)
    }

    fn equity(&self, deposits: FixedDec, reserves: FixedDec) -> FixedDec {
        match self.ceiling_policy {
            CeilingPolicy::Capped => deposits.saturating_sub_zero(reserves),
            CeilingPolicy::Uncapped => deposits,
        }
    }

    fn rate_for(&self, deposits: FixedDec, reserves: FixedDec) -> Result<FixedDec> {
        if self.derivative_supply.is_zero() {
            return Ok(FixedDec::ONE);
        }
        Ok(self.equity(deposits, reserves).checked_div(self.derivative_supply)?)
    }

    /// Underlying per derivative token; 1 for a market with no shares.
    pub fn exchange_rate(&self) -> Result<FixedDec> {
        self.rate_for(self.gross_deposits, self.reserves)
    }

    fn accrued(&self, to_block: u64) -> Result<Accrued> {
        if to_block < self.block_height {
            return Err(EngineError::BlockInPast { current: self.block_height, requested: to_block });
        }
        let t = i128::from(to_block - self.block_height);
        let mut out = Accrued {
            block: to_block,
            deposits: self.gross_deposits,
            loans: self.total_loans,
            reserves: self.reserves,
            index: self.index,
        };
        if t == 0 {
            return Ok(out);
        }
        let rt = self.borrow_rate()?.mul_int(t)?;
        if rt.is_zero() {
            return Ok(out);
        }
        let interest = self.total_loans.checked_mul(rt)?;
        let reserve_cut = interest.checked_mul(self.reserve_factor)?;
        out.index = self.index.checked_add(self.index.checked_mul(rt)?)?;
        out.loans = self.total_loans.checked_add(interest)?;
        out.reserves = self.reserves.checked_add(reserve_cut)?;
        out.deposits = match self.ceiling_policy {
            CeilingPolicy::Capped => self.gross_deposits.checked_add(interest)?,
            CeilingPolicy::Uncapped => self
                .gross_deposits
                .checked_add(interest.checked_sub(reserve_cut)?)?,
        };
        Ok(out)
    }

    fn commit(&mut self, a: Accrued) {
        self.block_height = a.block;
        self.gross_deposits = a.deposits;
        self.total_loans = a.loans;
        self.reserves = a.reserves;
        self.index = a.index;
    }

    /// Advance to `to_block`, applying interest at the current rate.
    pub fn accrue(&mut self, to_block: u64) -> Result<()> {
        let a = self.accrued(to_block)?;
        self.commit(a);
        Ok(())
    }

    /// Current debt of an account, principal scaled by index growth.
    pub fn debt_of(&self, account: &str) -> Result<FixedDec> {
        match self.accounts.get(account) {
            Some(p) => debt_at(p, self.index),
            None => Ok(FixedDec::ZERO),
        }
    }

    pub fn collateral_value(&self, account: &str) -> Result<FixedDec> {
        match self.accounts.get(account) {
            Some(p) => Ok(p.collateral_balance.checked_mul(self.collateral_price)?),
            None => Ok(FixedDec::ZERO),
        }
    }

    /// Collateral value over debt; `None` for debt-free accounts.
    pub fn health(&self, account: &str) -> Result<Option<FixedDec>> {
        let debt = self.debt_of(account)?;
        if debt.is_zero() {
            return Ok(None);
        }
        Ok(Some(self.collateral_value(account)?.checked_div(debt)?))
    }

    pub fn is_liquidatable(&self, account: &str) -> Result<bool> {
        Ok(matches!(self.health(account)?, Some(h) if h < self.liquidation.liquidation_threshold))
    }

    /// Underlying value of an account's shares at the current exchange rate.
    pub fn supplied_value(&self, account: &str) -> Result<FixedDec> {
        match self.accounts.get(account) {
            Some(p) => Ok(p.supplied_shares.checked_mul(self.exchange_rate()?)?),
            None => Ok(FixedDec::ZERO),
        }
    }

    pub fn mint(&mut self, block: u64, account: &str, amount: FixedDec) -> Result<FixedDec> {
        positive(amount)?;
        let a = self.accrued(block)?;
        let shares = amount.checked_div(self.rate_for(a.deposits, a.reserves)?)?;
        let deposits = a.deposits.checked_add(amount)?;
        let supply = self.derivative_supply.checked_add(shares)?;
        self.commit(a);
        self.gross_deposits = deposits;
        self.derivative_supply = supply;
        let pos = self.accounts.entry(account.to_string()).or_default();
        pos.supplied_shares = pos.supplied_shares.checked_add(shares)?;
        Ok(shares)
    }

    pub fn redeem(&mut self, block: u64, account: &str, shares: FixedDec) -> Result<FixedDec> {
        positive(shares)?;
        let held = self.accounts.get(account).map(|p| p.supplied_shares).unwrap_or_default();
        if held < shares {
            return Err(EngineError::InsufficientShares(account.to_string()));
        }
        let a = self.accrued(block)?;
        let payout = shares.checked_mul(self.rate_for(a.deposits, a.reserves)?)?;
        let available = a.deposits.saturating_sub_zero(a.loans);
        if payout > available {
            return Err(EngineError::InsufficientLiquidity { requested: payout, available });
        }
        self.commit(a);
        self.gross_deposits = self.gross_deposits.checked_sub(payout)?;
        self.derivative_supply = self.derivative_supply.checked_sub(shares)?;
        let pos = self.accounts.get_mut(account).expect("holder exists");
        pos.supplied_shares = pos.supplied_shares.checked_sub(shares)?;
        Ok(payout)
    }

    pub fn add_collateral(&mut self, block: u64, account: &str, amount: FixedDec) -> Result<()> {
        positive(amount)?;
        let a = self.accrued(block)?;
        self.commit(a);
        let pos = self.accounts.entry(account.to_string()).or_default();
        pos.collateral_balance = pos.collateral_balance.checked_add(amount)?;
        Ok(())
    }

    pub fn borrow(&mut self, block: u64, account: &str, amount: FixedDec) -> Result<()> {
        if amount.is_negative() {
            return Err(EngineError::InvalidAmount(amount));
        }
        let a = self.accrued(block)?;
        if amount.is_zero() {
            self.commit(a);
            return Ok(());
        }
        let available = a.deposits.saturating_sub_zero(a.loans);
        if amount > available {
            return Err(EngineError::InsufficientCash { requested: amount, available });
        }
        let pos = self.accounts.get(account).cloned().unwrap_or_default();
        let new_debt = debt_at(&pos, a.index)?.checked_add(amount)?;
        let collateral_value = pos.collateral_balance.checked_mul(self.collateral_price)?;
        if collateral_value < self.liquidation.liquidation_threshold.checked_mul(new_debt)? {
            return Err(EngineError::InsufficientCollateral(account.to_string()));
        }
        let loans = a.loans.checked_add(amount)?;
        self.commit(a);
        self.total_loans = loans;
        let pos = self.accounts.entry(account.to_string()).or_default();
        pos.debt_principal = new_debt;
        pos.debt_entry_index = self.index;
        Ok(())
    }

    pub fn repay(&mut self, block: u64, account: &str, amount: FixedDec) -> Result<()> {
        positive(amount)?;
        let a = self.accrued(block)?;
        let pos = self
            .accounts
            .get(account)
            .ok_or_else(|| EngineError::UnknownAccount(account.to_string()))?;
        let debt = debt_at(pos, a.index)?;
        if amount > debt {
            return Err(EngineError::ExceedsDebt(account.to_string()));
        }
        self.commit(a);
        self.total_loans = self.total_loans.saturating_sub_zero(amount);
        let index = self.index;
        let pos = self.accounts.get_mut(account).expect("checked above");
        pos.debt_principal = debt.checked_sub(amount)?;
        pos.debt_entry_index = index;
        Ok(())
    }

    /// Repay part of an undercollateralized borrower's debt in exchange for
    /// collateral at a discount. The penalty is charged to the borrower's
    /// debt and credited to reserves. Returns the collateral seized.
    pub fn liquidate(
        &mut self,
        block: u64,
        params: &LiquidationParams,
        liquidator: &str,
        borrower: &str,
        repay_amount: FixedDec,
    ) -> Result<FixedDec> {
        positive(repay_amount)?;
        params.validate()?;
        let a = self.accrued(block)?;
        let pos = self
            .accounts
            .get(borrower)
            .ok_or_else(|| EngineError::UnknownAccount(borrower.to_string()))?;
        let debt = debt_at(pos, a.index)?;
        let collateral_value = pos.collateral_balance.checked_mul(self.collateral_price)?;
        if debt.is_zero() || collateral_value >= params.liquidation_threshold.checked_mul(debt)? {
            return Err(EngineError::NotUndercollateralized(borrower.to_string()));
        }
        if repay_amount > params.close_factor.checked_mul(debt)? {
            return Err(EngineError::RepayTooLarge);
        }
        let seize_value = repay_amount.checked_div(FixedDec::ONE.checked_sub(params.discount)?)?;
        let seized = if self.collateral_price.is_zero() {
            pos.collateral_balance
        } else {
            seize_value.checked_div(self.collateral_price)?.min(pos.collateral_balance)
        };
        let penalty = params.penalty.checked_mul(repay_amount)?;

        self.commit(a);
        self.total_loans = self.total_loans.checked_add(penalty)?.saturating_sub_zero(repay_amount);
        self.reserves = self.reserves.checked_add(penalty)?;
        if self.ceiling_policy == CeilingPolicy::Capped {
            self.gross_deposits = self.gross_deposits.checked_add(penalty)?;
        }
        let index = self.index;
        let pos = self.accounts.get_mut(borrower).expect("checked above");
        pos.debt_principal = debt.checked_add(penalty)?.saturating_sub_zero(repay_amount);
        pos.debt_entry_index = index;
        pos.collateral_balance = pos.collateral_balance.checked_sub(seized)?;
        let liq = self.accounts.entry(liquidator.to_string()).or_default();
        liq.collateral_balance = liq.collateral_balance.checked_add(seized)?;
        Ok(seized)
    }

    /// Switch rate model. Interest up to `block` accrues under the old one.
    pub fn set_model(&mut self, block: u64, model: RateModel) -> Result<()> {
        model.validate()?;
        self.accrue(block)?;
        if let Some(lambda) = model.reserve_factor() {
            self.reserve_factor = lambda;
        }
        self.model = model;
        Ok(())
    }

    pub fn set_price(&mut self, block: u64, price: FixedDec) -> Result<()> {
        if price.is_negative() {
            return Err(EngineError::InvalidAmount(price));
        }
        self.accrue(block)?;
        self.collateral_price = price;
        Ok(())
    }

    pub fn apply(&mut self, event: &Event) -> Result<()> {
        let b = event.block;
        match &event.action {
            Action::Mint { account, amount } => self.mint(b, account, *amount).map(drop),
            Action::Redeem { account, shares } => self.redeem(b, account, *shares).map(drop),
            Action::Borrow { account, amount } => self.borrow(b, account, *amount),
            Action::Repay { account, amount } => self.repay(b, account, *amount),
            Action::AddCollateral { account, amount } => self.add_collateral(b, account, *amount),
            Action::Liquidate { liquidator, borrower, amount } => {
                let params = self.liquidation;
                self.liquidate(b, &params, liquidator, borrower, *amount).map(drop)
            }
            Action::SetModel { model } => self.set_model(b, model.clone()),
            Action::SetPrice { price } => self.set_price(b, *price),
        }
    }

    /// Replay an event log from a starting state, stopping at the first error.
    pub fn replay<'a>(mut self, events: impl IntoIterator<Item = &'a Event>) -> Result<Self> {
        for e in events {
            self.apply(e)?;
        }
        Ok(self)
    }

    pub fn snapshot(&self) -> Result<Snapshot> {
        Ok(Snapshot {
            block: self.block_height,
            gross_deposits: self.gross_deposits,
            total_loans: self.total_loans,
            reserves: self.reserves,
            index: self.index,
            utilization: self.utilization()?,
            borrow_rate: self.borrow_rate()?,
            supply_rate: self.supply_rate()?,
        })
    }

    /// Structural invariants. Debt aggregation is checked up to the rounding
    /// slack of per-account floors (a few mantissa units per account per
    /// event), expressed as a relative tolerance.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let neg = [
            ("A", self.gross_deposits),
            ("L", self.total_loans),
            ("reserves", self.reserves),
            ("supply", self.derivative_supply),
        ];
        for (name, v) in neg {
            if v.is_negative() {
                return Err(format!("{name} negative: {v}"));
            }
        }
        if self.index < FixedDec::ONE {
            return Err(format!("index below one: {}", self.index));
        }
        if self.ceiling_policy == CeilingPolicy::Capped && self.total_loans > self.gross_deposits {
            return Err(format!("capped market has L {} > A {}", self.total_loans, self.gross_deposits));
        }
        let mut shares = FixedDec::ZERO;
        let mut debt = 0.0;
        for (id, p) in &self.accounts {
            if p.supplied_shares.is_negative() || p.debt_principal.is_negative() || p.collateral_balance.is_negative() {
                return Err(format!("negative position for {id}"));
            }
            shares = shares.checked_add(p.supplied_shares).map_err(|e| e.to_string())?;
            debt += debt_at(p, self.index).map_err(|e| e.to_string())?.to_f64();
        }
        if shares != self.derivative_supply {
            return Err(format!("share sum {shares} != supply {}", self.derivative_supply));
        }
        let loans = self.total_loans.to_f64();
        if (debt - loans).abs() > 1e-9 * loans.max(1.0) {
            return Err(format!("account debts {debt} diverge from L {loans}"));
        }
        Ok(())
    }
}

fn positive(amount: FixedDec) -> Result<()> {
    if amount <= FixedDec::ZERO {
        Err(EngineError::InvalidAmount(amount))
    } else {
        Ok(())
    }
}

fn debt_at(p: &Position, index: FixedDec) -> Result<FixedDec> {
    if p.debt_principal.is_zero() {
        return Ok(FixedDec::ZERO);
    }
    Ok(p.debt_principal.checked_mul(index)?.checked_div(p.debt_entry_index)?)
}
