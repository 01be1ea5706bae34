//! Parameter sweeps producing one CSV row per grid cell.

use std::io::Write;

use rand::RngCore;
use serde::Serialize;

use super::boxes::{honest_boxes, BoxPair};
use super::protocol::{run_batch, summarize, ProtocolParams};
use super::{key_rate, DiqkdError, KeyRateParams};
use crate::rng;

pub const CSV_HEADER: &str =
    "n,alpha,gamma,delta,c,nu,beta,PrE_est,abort_freq,qber,rate_bits,rate_per_copy,eps_smooth,seed";

/// Cartesian grid; cells are ordered with `n` varying slowest and `pr_e` fastest.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepGrid {
    pub n: Vec<usize>,
    pub alpha: Vec<f64>,
    pub gamma: Vec<f64>,
    pub delta: Vec<f64>,
    pub c: Vec<f64>,
    pub nu: Vec<f64>,
    pub beta: Vec<f64>,
    /// Used when a cell has no simulated runs.
    pub pr_e: Vec<f64>,
}

impl SweepGrid {
    pub fn len(&self) -> usize {
        self.n.len()
            * self.alpha.len()
            * self.gamma.len()
            * self.delta.len()
            * self.c.len()
            * self.nu.len()
            * self.beta.len()
            * self.pr_e.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn cell(&self, mut idx: usize) -> KeyRateParams {
        let mut take = |len: usize| {
            let i = idx % len;
            idx /= len;
            i
        };
        let pr_e = self.pr_e[take(self.pr_e.len())];
        let beta = self.beta[take(self.beta.len())];
        let nu = self.nu[take(self.nu.len())];
        let c = self.c[take(self.c.len())];
        let delta = self.delta[take(self.delta.len())];
        let gamma = self.gamma[take(self.gamma.len())];
        let alpha = self.alpha[take(self.alpha.len())];
        let n = self.n[take(self.n.len())];
        KeyRateParams {
            alpha,
            gamma,
            delta,
            c,
            nu,
            beta,
            pr_e,
            n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub alpha: f64,
    pub gamma: f64,
    pub delta: f64,
    pub c: f64,
    pub nu: f64,
    pub beta: f64,
    /// `1 − abort_freq` when runs were simulated, else the grid's `Pr[E]`.
    #[serde(rename = "PrE_est")]
    pub pr_e_est: f64,
    pub abort_freq: Option<f64>,
    pub qber: Option<f64>,
    pub rate_bits: f64,
    pub rate_per_copy: f64,
    pub eps_smooth: f64,
    pub seed: u64,
}

/// Evaluates the key rate on every cell. With `runs > 0` each cell also
/// simulates honest, leakage-free protocol runs (protocol seed drawn from
/// stream `cell index` of `seed`) and the rate uses the estimated `Pr[E]`;
/// an estimate of 0 gives a rate of −∞.
pub fn sweep(grid: &SweepGrid, runs: usize, seed: u64) -> Result<Vec<SweepRow>, DiqkdError> {
    (0..grid.len())
        .map(|idx| {
            let mut p = grid.cell(idx);
            let (abort_freq, qber) = if runs > 0 {
                let proto = ProtocolParams {
                    n: p.n,
                    alpha: p.alpha,
                    gamma: p.gamma,
                    delta: p.delta,
                    seed: rng::stream(seed, idx as u64).next_u64(),
                };
                let make = || Ok(Box::new(honest_boxes(p.delta)?) as Box<dyn BoxPair>);
                let s = summarize(&run_batch(&proto, make, None, 0.0, runs)?);
                p.pr_e = 1.0 - s.abort_freq;
                (Some(s.abort_freq), Some(s.mean_qber))
            } else {
                (None, None)
            };
            let (rate_bits, rate_per_copy, eps_smooth) = if p.pr_e > 0.0 {
                let r = key_rate(&p)?;
                (r.hmin_minus_h0_bits, r.rate_per_copy, r.eps_smooth)
            } else {
                key_rate(&KeyRateParams { pr_e: 1.0, ..p })?;
                (f64::NEG_INFINITY, f64::NEG_INFINITY, f64::INFINITY)
            };
            Ok(SweepRow {
                n: p.n,
                alpha: p.alpha,
                gamma: p.gamma,
                delta: p.delta,
                c: p.c,
                nu: p.nu,
                beta: p.beta,
                pr_e_est: p.pr_e,
                abort_freq,
                qber,
                rate_bits,
                rate_per_copy,
                eps_smooth,
                seed,
            })
        })
        .collect()
}

/// Real number with 15 significant digits; non-finite values become
/// `nan`, `inf` or `-inf`.
pub fn format_real(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else if v == 0.0 {
        "0.0".into()
    } else {
        let mag = v.abs().log10().floor() as i32;
        if (-4..15).contains(&mag) {
            format!("{:.*}", (14 - mag).max(1) as usize, v)
        } else {
            format!("{v:.14e}")
        }
    }
}

/// Writes the header and one line per row; missing statistics are empty fields.
pub fn write_csv<W: Write>(rows: &[SweepRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    let opt = |v: Option<f64>| v.map(format_real).unwrap_or_default();
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.n,
            format_real(r.alpha),
            format_real(r.gamma),
            format_real(r.delta),
            format_real(r.c),
            format_real(r.nu),
            format_real(r.beta),
            format_real(r.pr_e_est),
            opt(r.abort_freq),
            opt(r.qber),
            format_real(r.rate_bits),
            format_real(r.rate_per_copy),
            format_real(r.eps_smooth),
            r.seed
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> SweepGrid {
        SweepGrid {
            n: vec![10_000],
            alpha: vec![0.1],
            gamma: vec![0.2],
            delta: vec![0.01],
            c: vec![0.001],
            nu: vec![0.3],
            beta: vec![0.5],
            pr_e: vec![0.9],
        }
    }

    #[test]
    fn empty_grid_gives_header_only() {
        let rows = sweep(&SweepGrid::default(), 0, 0).unwrap();
        assert!(rows.is_empty());
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn single_cell_matches_direct_call() {
        let g = grid();
        let rows = sweep(&g, 0, 7).unwrap();
        assert_eq!(rows.len(), 1);
        let direct = key_rate(&g.cell(0)).unwrap();
        assert_eq!(rows[0].rate_bits, direct.hmin_minus_h0_bits);
        assert_eq!(rows[0].eps_smooth, direct.eps_smooth);
        assert_eq!(rows[0].abort_freq, None);
    }

    #[test]
    fn ten_by_ten_grid_has_hundred_rows_in_order() {
        let g = SweepGrid {
            c: (0..10).map(|i| i as f64 * 1e-3).collect(),
            gamma: (1..=10).map(|i| i as f64 * 0.01).collect(),
            ..grid()
        };
        let rows = sweep(&g, 0, 0).unwrap();
        assert_eq!(rows.len(), 100);
        assert_eq!((rows[0].gamma, rows[0].c), (0.01, 0.0));
        assert_eq!((rows[1].gamma, rows[1].c), (0.01, 1e-3));
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 101);
    }

    #[test]
    fn simulated_cells_estimate_abort_probability() {
        let g = SweepGrid {
            n: vec![500],
            delta: vec![0.0],
            ..grid()
        };
        let rows = sweep(&g, 50, 1).unwrap();
        assert_eq!(rows[0].abort_freq, Some(0.0));
        assert_eq!(rows[0].pr_e_est, 1.0);
        assert_eq!(rows[0].qber, Some(0.0));
        assert_eq!(rows, sweep(&g, 50, 1).unwrap());
    }

    #[test]
    fn real_formatting() {
        assert_eq!(format_real(8.0 / 9.0), "0.888888888888889");
        assert_eq!(format_real(1.0), "1.00000000000000");
        assert_eq!(format_real(2f64.powi(-50)), "8.88178419700125e-16");
        assert_eq!(format_real(f64::NEG_INFINITY), "-inf");
        assert_eq!(format_real(-1234.5), "-1234.50000000000");
    }
}
