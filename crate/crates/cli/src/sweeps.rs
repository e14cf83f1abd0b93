//! LOS-probability, path-loss and PLF tables.

use a2a_core::antenna::sigma_f_paper_fit;
use a2a_core::baselines::{baseline_loss_db, plos_3gpp_umi};
use a2a_core::los::plos;
use a2a_core::montecarlo::mc_plf;
use a2a_core::pathloss::total_loss;
use a2a_core::BaselineKind;
use rayon::prelude::*;

use crate::error::CliError;
use crate::scenario::{Point, Scenario};
use crate::table::{Cell, Table};

/// Evaluates `f` at every sweep point, in parallel, keeping sweep order.
fn per_point<F>(scenario: &Scenario, f: F) -> Result<Vec<(Point, Vec<Cell>)>, CliError>
where
    F: Fn(&Point) -> Result<Vec<Cell>, CliError> + Sync,
{
    let sweep = scenario.sweep()?;
    sweep
        .points
        .par_iter()
        .map(|p| f(p).map(|row| (*p, row)))
        .collect()
}

/// Columns: swept variable, `plos`, and `plos_3gpp` when enabled.
pub fn run_plos_sweep(scenario: &Scenario) -> Result<Table, CliError> {
    let axis = scenario.sweep()?.axis;
    let mut columns = vec![axis.column(), "plos"];
    if scenario.baseline_3gpp {
        columns.push("plos_3gpp");
    }
    let mut table = Table::new("plos", &columns);
    let rows = per_point(scenario, |p| {
        let q = scenario.query(p)?;
        let mut row = vec![Cell::Num(axis.of(p)), Cell::Num(plos(&q))];
        if scenario.baseline_3gpp {
            row.push(plos_3gpp_umi(p.d, p.h_r)?.into());
        }
        Ok(row)
    })?;
    for (_, row) in rows {
        table.push(row);
    }
    Ok(table)
}

pub const PATHLOSS_COLUMNS: [&str; 11] = [
    "total_db",
    "pl_los_db",
    "pl_nlos_db",
    "p_los",
    "free_space_db",
    "los_only_db",
    "n_buildings",
    "e_obstacle_height",
    "p_gr",
    "los_clamped",
    "diffraction_out_of_domain",
];

/// Columns: swept variable, then [`PATHLOSS_COLUMNS`].
pub fn run_pathloss_sweep(scenario: &Scenario) -> Result<Table, CliError> {
    let axis = scenario.sweep()?.axis;
    let mut columns = vec![axis.column()];
    columns.extend(PATHLOSS_COLUMNS);
    let mut table = Table::new("pathloss", &columns);
    let opts = scenario.pathloss;
    let gain = scenario.gain;
    let rows = per_point(scenario, |p| {
        let q = scenario.query(p)?;
        let b = total_loss(&q, gain, &opts)?;
        let free = baseline_loss_db(BaselineKind::FreeSpace, &q, gain, &opts)?;
        let los_only = baseline_loss_db(BaselineKind::LosOnly, &q, gain, &opts)?;
        Ok(vec![
            axis.of(p).into(),
            b.total_db.into(),
            b.pl_los_db.into(),
            b.pl_nlos_db.into(),
            b.p_los.into(),
            free.into(),
            los_only.into(),
            b.n_buildings.into(),
            b.e_obstacle_height.into(),
            b.p_gr.into(),
            b.los_clamped.into(),
            b.diffraction_out_of_domain.into(),
        ])
    })?;
    for (_, row) in rows {
        table.push(row);
    }
    Ok(table)
}

/// PLF summary per wobble level and the pooled CDF table.
#[derive(Debug, Clone, PartialEq)]
pub struct PlfReport {
    /// Columns: `sigma_w_deg`, `sigma_f_db`, `sigma_f_se_db`, `mean_db`,
    /// `reference_sigma_f_db`, `tail_c1`, `tail_c2`, `tail_r2`.
    pub summary: Table,
    /// Columns: `sigma_w_deg`, `plf_db`, `cdf`.
    pub cdf: Table,
}

/// Runs the PLF experiment at every `antenna.sigma_w_deg` value. Every
/// level uses the same seed, so neighbouring levels share random numbers.
pub fn run_plf(scenario: &Scenario) -> Result<PlfReport, CliError> {
    let mc = scenario.mc_config();
    let mut summary = Table::new(
        "plf_summary",
        &[
            "sigma_w_deg",
            "sigma_f_db",
            "sigma_f_se_db",
            "mean_db",
            "reference_sigma_f_db",
            "tail_c1",
            "tail_c2",
            "tail_r2",
        ],
    );
    let mut cdf = Table::new("plf_cdf", &["sigma_w_deg", "plf_db", "cdf"]);
    for sigma_w in scenario.antenna.sigma_w_deg.values() {
        if sigma_w < 0.0 {
            return Err(CliError::scenario(
                "antenna.sigma_w_deg",
                "must be non-negative",
            ));
        }
        let stats = mc_plf(&scenario.antenna.config(sigma_w), &mc)?;
        let fit = stats.tail_fit;
        summary.push(vec![
            sigma_w.into(),
            stats.sigma_f_db.into(),
            stats.sigma_f_se_db.into(),
            stats.mean_db.into(),
            sigma_f_paper_fit(sigma_w).into(),
            fit.map(|f| f.c1).into(),
            fit.map(|f| f.c2).into(),
            fit.map(|f| f.r_squared).into(),
        ]);
        for (x, f) in &stats.cdf {
            cdf.push(vec![sigma_w.into(), (*x).into(), (*f).into()]);
        }
    }
    Ok(PlfReport { summary, cdf })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(json: &str) -> Scenario {
        Scenario::from_json(json).unwrap()
    }

    #[test]
    fn zero_sigma_gives_unit_plos() {
        let s = scenario(
            r#"{"geometry": {"d": {"start": 10, "stop": 1000, "steps": 20}},
                "environment": {"sigma_h": 0, "beta_h": 3e-3}}"#,
        );
        let t = run_plos_sweep(&s).unwrap();
        assert!(t.column("plos").unwrap().iter().all(|&p| p == 1.0));
    }

    #[test]
    fn plos_sweep_columns() {
        let s = scenario(r#"{"baseline_3gpp": true, "geometry": {"d": [100, 200]}}"#);
        let t = run_plos_sweep(&s).unwrap();
        assert_eq!(t.columns, ["d", "plos", "plos_3gpp"]);
        assert_eq!(t.rows.len(), 2);
    }

    #[test]
    fn pathloss_sweep_is_repeatable() {
        let s = Scenario::default();
        let a = run_pathloss_sweep(&s).unwrap().to_csv().unwrap();
        let b = run_pathloss_sweep(&s).unwrap().to_csv().unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("d,total_db,pl_los_db"));
    }

    #[test]
    fn plf_zero_wobble_row() {
        let s = scenario(r#"{"antenna": {"sigma_w_deg": [0, 27.7]}, "mc": {"trials": 10000}}"#);
        let r = run_plf(&s).unwrap();
        let sigma = r.summary.column("sigma_f_db").unwrap();
        assert_eq!(sigma[0], 0.0);
        let reference = r.summary.column("reference_sigma_f_db").unwrap();
        assert_eq!(reference[1], 18.7);
        assert_eq!(r.cdf.rows.len(), 2 * a2a_core::antenna::CDF_POINTS);
    }

    #[test]
    fn plf_needs_enough_trials() {
        let s = scenario(r#"{"mc": {"trials": 100}}"#);
        assert!(run_plf(&s).is_err());
    }
}
