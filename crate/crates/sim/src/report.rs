//! Density-versus-flight-time analysis of a sweep.
//!
//! The rank correlation is computed directly between airspace density and
//! mean flight time. Outlier identification works against a linear trend
//! with a team-size offset: the two- and three-vehicle rows form two clearly
//! shifted clusters, and folding that shift into the trend keeps the
//! residuals about the density effect itself. Rows where the straight line
//! extrapolates to a non-positive flight time carry no information about
//! being "below" it and are excluded from the flagging.

use serde::Serialize;

use crate::stats::{mean, spearman};
use crate::sweep::SweepResult;

/// One avoidance-on sweep row projected onto the density axis.
#[derive(Clone, Debug, Serialize)]
pub struct CorrelationRow {
    pub config_id: u32,
    pub team_size: usize,
    pub density: f64,
    pub mean_flight_time: f64,
    /// Flight time minus the fitted trend at this row.
    pub residual: f64,
    /// Trend prediction; negative predictions make the residual
    /// uninformative.
    pub prediction: f64,
}

/// Least-squares fit of `flight_time ~ density + [team_size == 3]`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TrendFit {
    pub intercept: f64,
    pub density_slope: f64,
    pub team3_offset: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CorrelationReport {
    /// Spearman rank correlation of mean flight time against density.
    pub spearman_rho: f64,
    pub trend: TrendFit,
    pub rows: Vec<CorrelationRow>,
    /// Configuration ids whose mean residual over informative rows is
    /// negative.
    pub below_trend_config_ids: Vec<u32>,
}

fn fit_trend(rows: &[(f64, bool, f64)]) -> TrendFit {
    // Normal equations for [1, density, team3] against flight time.
    let n = rows.len() as f64;
    let mut xtx = [[0.0f64; 3]; 3];
    let mut xty = [0.0f64; 3];
    for &(density, team3, ft) in rows {
        let x = [1.0, density, if team3 { 1.0 } else { 0.0 }];
        for a in 0..3 {
            for b in 0..3 {
                xtx[a][b] += x[a] * x[b];
            }
            xty[a] += x[a] * ft;
        }
    }
    let _ = n;
    // Gaussian elimination with partial pivoting on the 3x3 system.
    let mut aug = [[0.0f64; 4]; 3];
    for r in 0..3 {
        aug[r][..3].copy_from_slice(&xtx[r]);
        aug[r][3] = xty[r];
    }
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&a, &b| aug[a][col].abs().partial_cmp(&aug[b][col].abs()).unwrap())
            .unwrap();
        aug.swap(col, pivot);
        for r in 0..3 {
            if r != col && aug[col][col] != 0.0 {
                let f = aug[r][col] / aug[col][col];
                let pivot_row = aug[col];
                for (value, pivot_value) in aug[r].iter_mut().zip(pivot_row.iter()) {
                    *value -= f * pivot_value;
                }
            }
        }
    }
    TrendFit {
        intercept: aug[0][3] / aug[0][0],
        density_slope: aug[1][3] / aug[1][1],
        team3_offset: aug[2][3] / aug[2][2],
    }
}

/// Rank correlation and trend residuals over the avoidance-on rows of a
/// sweep. Requires at least six configurations.
pub fn correlation_report(sweep: &SweepResult) -> CorrelationReport {
    let on_rows: Vec<_> = sweep.rows.iter().filter(|r| r.avoidance).collect();
    let mut config_ids: Vec<u32> = on_rows.iter().map(|r| r.config_id).collect();
    config_ids.sort_unstable();
    config_ids.dedup();
    assert!(
        config_ids.len() >= 6,
        "correlation report needs at least 6 configurations, got {}",
        config_ids.len()
    );

    let densities: Vec<f64> = on_rows.iter().map(|r| r.density).collect();
    let flight_times: Vec<f64> = on_rows.iter().map(|r| r.mean_flight_time).collect();
    let rho = spearman(&densities, &flight_times);

    let trend = fit_trend(
        &on_rows
            .iter()
            .map(|r| (r.density, r.team_size == 3, r.mean_flight_time))
            .collect::<Vec<_>>(),
    );

    let rows: Vec<CorrelationRow> = on_rows
        .iter()
        .map(|r| {
            let prediction = trend.intercept
                + trend.density_slope * r.density
                + if r.team_size == 3 { trend.team3_offset } else { 0.0 };
            CorrelationRow {
                config_id: r.config_id,
                team_size: r.team_size,
                density: r.density,
                mean_flight_time: r.mean_flight_time,
                residual: r.mean_flight_time - prediction,
                prediction,
            }
        })
        .collect();

    let below_trend_config_ids = config_ids
        .iter()
        .copied()
        .filter(|id| {
            let residuals: Vec<f64> = rows
                .iter()
                .filter(|row| row.config_id == *id && row.prediction > 0.0)
                .map(|row| row.residual)
                .collect();
            !residuals.is_empty() && mean(&residuals) < 0.0
        })
        .collect();

    CorrelationReport {
        spearman_rho: rho,
        trend,
        rows,
        below_trend_config_ids,
    }
}
