use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use plflab_core::econometrics::{
    granger_long_run, irf, johansen, select_lags, stability_check, vecm_fit, JohansenResult, LagCriterion,
    StabilityReport, VecmFit,
};
use plflab_core::econometrics::vecm::VecmReport;
use plflab_core::panel::Panel;
use serde::{Deserialize, Serialize};

use super::{load_panel, FreqArg, RateArg};
use crate::error::{CliError, Result};
use crate::io::{create_dir, csv_bytes, write_bytes, write_json, Ctx};

/// Largest lag order tried by the automatic AIC choice.
const MAX_AUTO_LAGS: usize = 8;

#[derive(Args, Debug)]
pub struct VecmArgs {
    /// Panel CSV (default: $PLFLAB_DATA_DIR/panel.csv)
    #[arg(long)]
    pub panel: Option<PathBuf>,
    /// Token market, e.g. DAI
    #[arg(long)]
    pub market: String,
    /// Platforms to include, comma separated, in variable order (default: all, sorted)
    #[arg(long, value_delimiter = ',')]
    pub platforms: Vec<String>,
    /// Lag order of the levels VAR (default: AIC over 1..=8)
    #[arg(long)]
    pub lags: Option<usize>,
    /// Cointegrating rank (default: Johansen trace test at 5%)
    #[arg(long)]
    pub rank: Option<usize>,
    /// Impulse-response horizon in periods
    #[arg(long, default_value_t = 30)]
    pub horizon: usize,
    #[arg(long, value_enum, default_value = "daily")]
    pub frequency: FreqArg,
    #[arg(long, value_enum, default_value = "borrow")]
    pub rate: RateArg,
    /// Output directory (receives irf.csv and vecm.json)
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IrfCsvRow {
    pub horizon: usize,
    pub impulse: String,
    pub response: String,
    pub value: f64,
}

#[derive(Serialize)]
struct VecmFile<'a> {
    market: &'a str,
    variables: &'a [String],
    lag_table: Option<Vec<(usize, f64, f64)>>,
    johansen: &'a JohansenResult,
    fit: VecmReport,
    stability: &'a StabilityReport,
    /// Long-run response of each variable to a one-s.d. orthogonalized shock.
    long_run_impact: Vec<Vec<f64>>,
}

fn choose_platforms(panel: &Panel, market: &str, given: &[String]) -> Result<Vec<String>> {
    let markets = panel.markets();
    if !markets.contains(market) {
        let list = markets.into_iter().collect::<Vec<_>>().join(", ");
        return Err(CliError::Input(format!("unknown market {market:?}; available markets: {list}")));
    }
    let have = panel.platforms_for(market);
    let chosen: Vec<String> = if given.is_empty() { have.iter().cloned().collect() } else { given.to_vec() };
    if let Some(p) = chosen.iter().find(|p| !have.contains(*p)) {
        let list = have.into_iter().collect::<Vec<_>>().join(", ");
        return Err(CliError::Input(format!("platform {p:?} has no {market} data; available: {list}")));
    }
    if chosen.len() < 2 {
        return Err(CliError::Input(format!("{market}: a VECM needs at least two platforms, got {}", chosen.len())));
    }
    Ok(chosen)
}


pub fn report_text(names: &[String], j: &JohansenResult, fit: &VecmFit, st: &StabilityReport) -> String {
    let mut s = String::new();
    let w = names.iter().map(|n| n.len()).max().unwrap_or(0).max(8);
    let _ = writeln!(s, "Johansen trace test: K = {}, lags = {}, T = {}", j.k, j.lags, j.n_obs);
    let _ = writeln!(s, "  {:<8} {:>12} {:>10} {:>10} {:>12}", "H0: r <=", "eigenvalue", "trace", "5% cv", "1% cv");
    for r in 0..j.k {
        let _ = writeln!(
            s,
            "  {:<8} {:>12.6} {:>10.3} {:>10.2} {:>12.2}",
            r, j.eigenvalues[r], j.trace[r], j.crit_5[r], j.crit_1[r]
        );
    }
    let _ = writeln!(s, "  selected rank: {}; fitted rank: {}", j.rank, fit.rank);
    for warning in &fit.warnings {
        let _ = writeln!(s, "  warning: {warning}");
    }
    let _ = writeln!(s);
    if fit.rank == 0 {
        let _ = writeln!(s, "Long-run relations: none (rank 0, VAR in differences)");
    } else {
        let _ = writeln!(s, "Adjustment coefficients alpha (standard errors)");
        let _ = write!(s, "  {:<w$}", "");
        for c in 0..fit.rank {
            let _ = write!(s, " {:>22}", format!("ect{}", c + 1));
        }
        let _ = writeln!(s);
        for (i, n) in names.iter().enumerate() {
            let _ = write!(s, "  {n:<w$}");
            for c in 0..fit.rank {
                let _ = write!(s, " {:>22}", format!("{:.6} ({:.6})", fit.alpha[(i, c)], fit.alpha_se[(i, c)]));
            }
            let _ = writeln!(s);
        }
        let _ = writeln!(s, "\nLong-run relations beta' (normalized), constant rho");
        let _ = write!(s, "  {:<6}", "");
        for n in names {
            let _ = write!(s, " {n:>w$}");
        }
        let _ = writeln!(s, " {:>w$}", "const");
        for c in 0..fit.rank {
            let _ = write!(s, "  {:<6}", format!("ect{}", c + 1));
            for i in 0..fit.k {
                let _ = write!(s, " {:>w$.4}", fit.beta[(i, c)]);
            }
            let _ = writeln!(s, " {:>w$.4}", fit.rho[c]);
        }
    }
    for (l, g) in fit.gamma.iter().enumerate() {
        let _ = writeln!(s, "\nShort-run Gamma_{} (row: equation, column: lagged difference)", l + 1);
        let _ = write!(s, "  {:<w$}", "");
        for n in names {
            let _ = write!(s, " {n:>w$}");
        }
        let _ = writeln!(s);
        for (i, n) in names.iter().enumerate() {
            let _ = write!(s, "  {n:<w$}");
            for c in 0..fit.k {
                let _ = write!(s, " {:>w$.4}", g[(i, c)]);
            }
            let _ = writeln!(s);
        }
    }
    let moduli: Vec<String> = st.moduli.iter().map(|m| format!("{m:.4}")).collect();
    let _ = writeln!(
        s,
        "\nStability: {} unit root(s) (expected {}), {} explosive, moduli [{}]",
        st.unit_roots,
        st.expected_unit_roots,
        st.explosive,
        moduli.join(", ")
    );
    if !st.near_unit.is_empty() {
        let _ = writeln!(s, "  warning: roots close to the unit circle: {:?}", st.near_unit);
    }
    s
}

pub fn run(ctx: &Ctx, args: &VecmArgs) -> Result<()> {
    let panel = load_panel(ctx, &ctx.input_or_default(args.panel.as_deref(), "panel.csv", "--panel")?)?;
    let names = choose_platforms(&panel, &args.market, &args.platforms)?;
    if args.horizon == 0 {
        return Err(CliError::Input("--horizon must be at least 1".into()));
    }
    if let Some(r) = args.rank {
        if r > names.len() {
            return Err(CliError::Input(format!("--rank {r} exceeds the number of variables {}", names.len())));
        }
    }
    if args.lags == Some(0) {
        return Err(CliError::Input("--lags must be at least 1".into()));
    }
    let y = panel.market_matrix(&args.market, &names, args.rate.into(), args.frequency.into())?;
    let (lags, lag_table) = match args.lags {
        Some(p) => (p, None),
        None => {
            let sel = select_lags(&y, MAX_AUTO_LAGS, LagCriterion::Aic)?;
            (sel.selected, Some(sel.table))
        }
    };
    let j = johansen(&y, lags)?;
    let fit = vecm_fit(&y, args.rank.unwrap_or(j.rank), lags)?;
    let st = stability_check(&fit);
    let responses = irf(&fit, args.horizon)?;
    let chol = fit
        .sigma
        .clone()
        .cholesky()
        .ok_or_else(|| CliError::Numerical("residual covariance is not positive definite".into()))?;
    let long_run = granger_long_run(&fit)? * chol.l();

    print!("{}", report_text(&names, &j, &fit, &st));

    create_dir(&args.out)?;
    let irf_rows: Vec<IrfCsvRow> = responses
        .rows()
        .into_iter()
        .map(|r| IrfCsvRow {
            horizon: r.horizon,
            impulse: names[r.impulse].clone(),
            response: names[r.response].clone(),
            value: r.value,
        })
        .collect();
    write_bytes(&args.out.join("irf.csv"), &csv_bytes(&["horizon", "impulse", "response", "value"], &irf_rows)?)?;
    let file = VecmFile {
        market: &args.market,
        variables: &names,
        lag_table,
        johansen: &j,
        fit: fit.report(),
        stability: &st,
        long_run_impact: (0..long_run.nrows()).map(|i| long_run.row(i).iter().copied().collect()).collect(),
    };
    write_json(&args.out.join("vecm.json"), &file)
}
